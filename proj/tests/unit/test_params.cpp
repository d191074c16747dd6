#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vlcsim/errors.hpp"
#include "vlcsim/params.hpp"

using namespace vlcsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "vlcsim-tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("params") {

TEST_CASE("built-in defaults match the checked-in file") {
  const auto file = load_params(VLCSIM_DEFAULT_PARAMS);
  CHECK(params_to_json(file) == params_to_json(default_params()));
}

TEST_CASE("json round trip") {
  const auto p = default_params();
  CHECK(params_to_json(params_from_json(params_to_json(p))) == params_to_json(p));
  const auto path = scratch("roundtrip.json");
  save_params(path, p);
  CHECK(params_to_json(load_params(path)) == params_to_json(p));
}

TEST_CASE("defaults carry the stated physical constants") {
  const auto p = default_params();
  CHECK(p.ultra_low_power.power_w == kUltraLowPowerSupplyV * kUltraLowPowerCurrentA);
  CHECK(p.integration.power_on_latency_s == 60e-6);
  CHECK(p.high_gain.tia()->rf_ohm > p.low_gain.tia()->rf_ohm);
  CHECK(p.high_gain.tia()->gbp_hz == p.low_gain.tia()->gbp_hz);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("unknown and malformed keys are all reported") {
  auto j = params_to_json(default_params());
  const auto replace = [&](const std::string& from, const std::string& to) {
    const auto at = j.find(from);
    REQUIRE(at != std::string::npos);
    j.replace(at, from.size(), to);
  };
  replace("\"rf_ohm\"", "\"rf_ohms\"");
  replace("\"cutoff_hz\": ", "\"cutoff_hz\": -");
  try {
    params_from_json(j);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string all;
    for (const auto& k : e.keys()) all += k + ";";
    CHECK(all.find("rf_ohms") != std::string::npos);
    CHECK(all.find("cutoff_hz") != std::string::npos);
  }
  CHECK_THROWS_AS(params_from_json("{ not json"), ValidationError);
}

TEST_CASE("parameter path resolution") {
  const auto path = scratch("env.json");
  auto p = default_params();
  p.integration.power_on_latency_s = 70e-6;
  save_params(path, p);

  ::unsetenv(kParamsEnvVar);
  CHECK_FALSE(resolve_params_path(std::nullopt).has_value());
  CHECK(load_resolved_params(std::nullopt).integration.power_on_latency_s == 60e-6);

  ::setenv(kParamsEnvVar, path.c_str(), 1);
  CHECK(resolve_params_path(std::nullopt) == path);
  CHECK(load_resolved_params(std::nullopt).integration.power_on_latency_s == 70e-6);
  // An explicit path beats the environment.
  CHECK(resolve_params_path(fs::path(VLCSIM_DEFAULT_PARAMS)) == fs::path(VLCSIM_DEFAULT_PARAMS));
  ::unsetenv(kParamsEnvVar);
}

TEST_CASE("missing file is an error") {
  CHECK_THROWS(load_params(scratch("does-not-exist.json")));
}

}
