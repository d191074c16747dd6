#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlcsim {

/// Base class for every domain error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two bit streams that must be compared position by position differ in length.
class LengthMismatchError : public Error {
 public:
  LengthMismatchError(std::size_t sent, std::size_t received);

  std::size_t sent_length() const noexcept { return sent_; }
  std::size_t received_length() const noexcept { return received_; }

 private:
  std::size_t sent_;
  std::size_t received_;
};

/// The demodulator could not find the preamble; every payload bit is lost.
class NoLockError : public Error {
 public:
  using Error::Error;
};

/// A configuration failed validation. `keys()` names every offending key.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> keys);
  ValidationError(std::vector<std::string> keys, const std::string& detail);

  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

/// Calibration could not satisfy its target set. `targets()` names the failures.
class CalibrationError : public Error {
 public:
  explicit CalibrationError(std::vector<std::string> targets);

  const std::vector<std::string>& targets() const noexcept { return targets_; }

 private:
  std::vector<std::string> targets_;
};

}  // namespace vlcsim
