#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "vlcsim/calibration.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/params.hpp"

using namespace vlcsim;

TEST_SUITE("calibration") {

TEST_CASE("target names are stable") {
  CalibrationTarget t{ReceiverKind::HighGain, 25.0, 500e3, Expectation::Decodes};
  CHECK(t.name() == "high_gain@25lx/500kbps:decodes");
}

TEST_CASE("the shipped parameters meet every target, so calibrating them is a no-op") {
  const auto targets = default_targets();
  const auto report = calibrate(default_params(), targets);
  CHECK_FALSE(report.changed);
  CHECK(params_to_json(report.params) == params_to_json(default_params()));
  REQUIRE(report.outcomes.size() == targets.size());
  for (const auto& o : report.outcomes) {
    CAPTURE(o.target.name());
    CHECK(o.met);
  }
  std::ostringstream csv;
  write_calibration_csv(csv, report.outcomes);
  const auto text = csv.str();
  CHECK(text.rfind("target,receiver,lux,bitrate_bps,framing,expect,ber,met\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(targets.size() + 1));
}

TEST_CASE("a target below the noise floor is named before any search") {
  auto targets = default_targets();
  const CalibrationTarget bad{ReceiverKind::UltraLowPower, 1.0, 60e3, Expectation::Decodes};
  targets.push_back(bad);
  CalibrationOptions opt;
  opt.max_evaluations = 1;
  try {
    calibrate(default_params(), targets, opt);
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    REQUIRE(e.targets().size() == 1);
    CHECK(e.targets().front().find(bad.name()) != std::string::npos);
    CHECK(std::string(e.what()).find("noise") != std::string::npos);
  }
}

TEST_CASE("a detuned comparator is pulled back onto its targets") {
  auto start = default_params();
  start.low_gain.thresholder.overdrive_delay_v_s *= 1.5;
  std::vector<CalibrationTarget> lg;
  for (const auto& t : default_targets()) {
    if (t.receiver == ReceiverKind::LowGain) lg.push_back(t);
  }
  const auto before = check_targets(start, lg);
  CHECK(std::any_of(before.begin(), before.end(), [](const TargetOutcome& o) { return !o.met; }));
  const auto report = calibrate(start, lg);
  CHECK(report.changed);
  for (const auto& o : report.outcomes) {
    CAPTURE(o.target.name());
    CHECK(o.met);
  }
}

}
