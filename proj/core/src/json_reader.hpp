#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vlcsim/errors.hpp"

namespace vlcsim::detail {

/// Runs `check` and adds the keys of any ValidationError it throws; then
/// throws one error with every key seen, duplicates dropped, when there are any.
template <typename Check>
void finish_validation(std::vector<std::string>& bad, const Check& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    bad.insert(bad.end(), e.keys().begin(), e.keys().end());
  }
  if (bad.empty()) return;
  std::vector<std::string> unique;
  std::set<std::string> seen;
  for (auto& k : bad) {
    if (seen.insert(k).second) unique.push_back(std::move(k));
  }
  throw ValidationError(std::move(unique));
}

/// Strict reader over one JSON object. Missing, mistyped and unknown keys are
/// appended to `bad` as dotted paths instead of throwing, so one pass reports
/// every problem.
class Reader {
 public:
  Reader(const nlohmann::json& obj, std::string prefix, std::vector<std::string>& bad)
      : obj_(obj), prefix_(std::move(prefix)), bad_(bad) {
    if (!obj_.is_object()) {
      bad_.push_back(prefix_.empty() ? "<root>" : prefix_.substr(0, prefix_.size() - 1));
    }
  }

  bool has(const char* key) const {
    return obj_.is_object() && obj_.contains(key) && !obj_.at(key).is_null();
  }

  double number(const char* key, double fallback) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key)) {
      bad_.push_back(prefix_ + key);
      return fallback;
    }
    return as_number(key, fallback);
  }

  /// Like number() but a missing key silently yields the fallback.
  double number_or(const char* key, double fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return as_number(key, fallback);
  }

  std::optional<double> optional_number(const char* key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    if (!obj_.at(key).is_number()) {
      bad_.push_back(prefix_ + key);
      return std::nullopt;
    }
    return obj_.at(key).get<double>();
  }

  long long integer_or(const char* key, long long fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) {
      bad_.push_back(prefix_ + key);
      return fallback;
    }
    return v.get<long long>();
  }

  const nlohmann::json& child(const char* key) {
    seen_.insert(key);
    static const nlohmann::json missing;
    if (!obj_.is_object() || !obj_.contains(key)) return missing;
    return obj_.at(key);
  }

  std::string string(const char* key) {
    seen_.insert(key);
    if (!obj_.is_object() || !obj_.contains(key) || !obj_.at(key).is_string()) {
      bad_.push_back(prefix_ + key);
      return {};
    }
    return obj_.at(key).get<std::string>();
  }

  std::string string_or(const char* key, std::string fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_string()) {
      bad_.push_back(prefix_ + key);
      return fallback;
    }
    return obj_.at(key).get<std::string>();
  }

  void reject_unknown() {
    if (!obj_.is_object()) return;
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) bad_.push_back(prefix_ + k);
    }
  }

  const std::string& prefix() const { return prefix_; }
  void flag(const std::string& key) { bad_.push_back(prefix_ + key); }

 private:
  double as_number(const char* key, double fallback) {
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      bad_.push_back(prefix_ + key);
      return fallback;
    }
    return v.get<double>();
  }

  const nlohmann::json& obj_;
  std::string prefix_;
  std::vector<std::string>& bad_;
  std::set<std::string> seen_;
};

}  // namespace vlcsim::detail
