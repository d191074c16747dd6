#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "vlcsim/calibration.hpp"
#include "vlcsim/reproduce.hpp"
#include "vlcsim/scenario.hpp"
#include "vlcsim/switching.hpp"

using namespace vlcsim;

namespace {

std::string golden(const char* file) {
  std::ifstream in(std::filesystem::path(VLCSIM_GOLDEN_DIR) / file);
  REQUIRE(in.good());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

template <typename Fn>
std::string render(Fn fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

}  // namespace

TEST_SUITE("golden") {

TEST_CASE("run directory files") {
  Scenario s;
  s.name = "golden";
  s.receiver.reset();
  s.tx.bitrate_bps = 100e3;
  LinkMetrics m;
  m.ber = 0.25;
  m.bit_errors = 2;
  m.payload_bits = 8;
  m.packets_lost = 1;
  m.duration_s = 0.5;
  m.throughput_bps = 12;
  m.payload_efficiency = 0.5;
  m.energy_j = 0.001;
  m.sampler_energy_j = 0.0005;
  m.energy_per_bit_j = 0.125;
  m.switch_events = {{1.5, std::nullopt, ReceiverKind::LowGain, 6e-5}};
  m.windowed_ber = {{0.0, 0.25, 0.0, 100}, {0.25, 0.5, std::numeric_limits<double>::quiet_NaN(), 0}};
  m.snr.points = {{0.0, 20.0}, {0.1, kSnrFloorDb}};

  CHECK(render([&](std::ostream& o) { write_metrics_csv(o, s, m); }) == golden("metrics.csv"));
  CHECK(render([&](std::ostream& o) { write_ber_windows_csv(o, m); }) == golden("ber_windows.csv"));
  CHECK(render([&](std::ostream& o) { write_snr_csv(o, m); }) == golden("snr.csv"));

  const SwitchEvent ev[] = {{1.5, std::nullopt, ReceiverKind::LowGain, 6e-5},
                            {2.25, ReceiverKind::LowGain, ReceiverKind::HighGain, 6.002e-5}};
  CHECK(render([&](std::ostream& o) { write_switch_events_csv(o, ev); }) == golden("switch_events.csv"));
}

TEST_CASE("calibration report") {
  const TargetOutcome rows[] = {
      {{ReceiverKind::HighGain, 25.0, 500e3, Expectation::Decodes}, 5e-4, true},
      {{ReceiverKind::LowGain, 925.0, 2179.6e3, Expectation::Fails, Framing::Uart}, 0.5, true},
      {{ReceiverKind::UltraLowPower, 3.0, 10e3, Expectation::Dark}, 1e-3, false},
  };
  CHECK(render([&](std::ostream& o) { write_calibration_csv(o, rows); }) == golden("calibration.csv"));
}

TEST_CASE("figure files") {
  const SweepPoint sweep[] = {{"low_gain/uart amb=0 inc=925", 0, 925, 1.5e6, 0, 1.2e6, 0},
                              {"low_gain amb=210 inc=100", 210, 100, 2e6, 1, 0, 0}};
  CHECK(render([&](std::ostream& o) { write_sweep_csv(o, sweep); }) == golden("sweep.csv"));

  const WindowSeries runs[] = {{"high_gain", {{0.0, 0.25, 1.0, 25000}}, 0, 0, {}},
                               {"switched", {{0.0, 0.25, 4e-4, 25000}}, 0, 0, {}}};
  CHECK(render([&](std::ostream& o) { write_window_series_csv(o, runs); }) == golden("window_series.csv"));

  const SwingPoint swing[] = {{1e3, 0.4}, {1e5, 0.05}};
  CHECK(render([&](std::ostream& o) { write_swing_csv(o, swing); }) == golden("swing.csv"));

  const GainPoint gain[] = {{104e3, 24.75, 3500}, {754e3, 2.5, 220}};
  CHECK(render([&](std::ostream& o) { write_gain_csv(o, gain); }) == golden("gain.csv"));

  const ResponsePoint resp[] = {{50, 0.0165, 6e-5, 0.0215, 100, 0.0169}};
  CHECK(render([&](std::ostream& o) { write_response_csv(o, resp); }) == golden("response.csv"));

  const SensitivityCell cells[] = {{12, ReceiverKind::HighGain, 350e3, 354249.5, 350e3, 2e-4, true},
                                   {12, ReceiverKind::LowGain, std::nullopt, 0, 100e3, 1, true}};
  CHECK(render([&](std::ostream& o) { write_sensitivity_csv(o, cells); }) == golden("sensitivity.csv"));
}

TEST_CASE("headers match the golden files") {
  const auto head = [](const std::string& text) { return text.substr(0, text.find('\n')); };
  CHECK(head(golden("metrics.csv")) == kMetricsCsvHeader);
  CHECK(head(golden("ber_windows.csv")) == kBerWindowsCsvHeader);
  CHECK(head(golden("snr.csv")) == kSnrCsvHeader);
  CHECK(head(golden("sweep.csv")) == kSweepCsvHeader);
  CHECK(head(golden("window_series.csv")) == kWindowSeriesCsvHeader);
  CHECK(head(golden("swing.csv")) == kSwingCsvHeader);
  CHECK(head(golden("gain.csv")) == kGainCsvHeader);
  CHECK(head(golden("response.csv")) == kResponseCsvHeader);
  CHECK(head(golden("sensitivity.csv")) == kSensitivityCsvHeader);
}

}
