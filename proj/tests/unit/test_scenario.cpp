#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vlcsim/errors.hpp"
#include "vlcsim/scenario.hpp"

using namespace vlcsim;
namespace fs = std::filesystem;

namespace {

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::vector<std::string> keys_of(const std::string& text) {
  try {
    scenario_from_json(text);
  } catch (const ValidationError& e) {
    return e.keys();
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& k) {
  return std::find(v.begin(), v.end(), k) != v.end();
}

const char* kMinimal = R"({"name": "mini", "tx": {"bitrate_bps": 100000, "on_lux": 50},
  "receiver": "high_gain", "rounds": 1, "packets_per_round": 4})";

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal scenario parses with protocol defaults") {
  const auto s = scenario_from_json(kMinimal);
  CHECK(s.name == "mini");
  CHECK(s.receiver == ReceiverKind::HighGain);
  CHECK(s.packet_len == 256);
  CHECK(s.samples_per_bit == 16);
  CHECK(scenario_from_json(R"({"name": "x", "tx": {"bitrate_bps": 1e5, "on_lux": 50},
    "receiver": "high_gain"})").rounds == 3);
}

TEST_CASE("every offending key is listed") {
  const auto keys = keys_of(R"({"name": "bad", "tx": {"bitrate_bps": -5, "on_lux": 50, "framing": "manchester"},
    "receiver": "medium_gain", "rounds": 0, "colour": "blue",
    "channel": {"ambient_lux": -3}})");
  CHECK(has(keys, "tx.bitrate_bps"));
  CHECK(has(keys, "tx.framing"));
  CHECK(has(keys, "receiver"));
  CHECK(has(keys, "rounds"));
  CHECK(has(keys, "colour"));
  CHECK(has(keys, "channel.ambient_lux"));
  CHECK(has(keys_of("[1, 2"), "<root>"));
  CHECK(has(keys_of(R"({"tx": {"bitrate_bps": 1e5, "on_lux": 50}, "receiver": "high_gain"})"), "name"));
}

TEST_CASE("incident trace must stay within the transmitter level") {
  const auto keys = keys_of(R"({"name": "t", "tx": {"bitrate_bps": 1e5, "on_lux": 100},
    "receiver": "switched",
    "channel": {"incident_lux": {"points": [[0, 50], [1, 150]]}}})");
  CHECK(has(keys, "channel.incident_lux"));
}

TEST_CASE("json round trip") {
  const auto s = scenario_from_json(R"({"name": "rt", "tx": {"bitrate_bps": 1e5, "on_lux": 1500},
    "receiver": "switched", "policy": {"goal": "energy", "sample_interval_s": 0.05},
    "channel": {"ambient_lux": 10, "flicker": {"freq_hz": 100, "depth": 0.1},
                "incident_lux": {"square": {"lo_lux": 3, "hi_lux": 1500, "transitions": 4, "duration_s": 2}}},
    "duration_s": 2, "seed": 9})");
  CHECK(scenario_to_json(scenario_from_json(scenario_to_json(s))) == scenario_to_json(s));
  const auto back = scenario_from_json(scenario_to_json(s));
  CHECK_FALSE(back.receiver.has_value());
  CHECK(back.policy.goal == SwitchGoal::Energy);
  CHECK(back.seed == 9);
  REQUIRE(back.incident_lux.has_value());
  CHECK(back.incident_lux->points().size() == 6);
}

TEST_CASE("run is deterministic and results land in one directory") {
  const auto s = scenario_from_json(kMinimal);
  const auto params = default_params();
  const auto a = run_scenario(s, params);
  const auto b = run_scenario(s, params);
  CHECK(a.bit_errors == b.bit_errors);
  CHECK(a.ber == b.ber);
  CHECK(a.throughput_bps == b.throughput_bps);

  const auto out = fs::temp_directory_path() / "vlcsim-tests" / "results";
  fs::remove_all(out);
  const auto dir = write_results(out, s, params, a);
  CHECK(dir == out / "mini");
  CHECK(first_line(dir / "metrics.csv") == kMetricsCsvHeader);
  CHECK(first_line(dir / "ber_windows.csv") == kBerWindowsCsvHeader);
  CHECK(first_line(dir / "snr.csv") == kSnrCsvHeader);
  CHECK(first_line(dir / "switch_events.csv") == "time_s,from,to,latency_s");
  CHECK(fs::exists(dir / "config.json"));
  // Nothing but the run directory is left behind.
  CHECK(std::distance(fs::directory_iterator(out), fs::directory_iterator{}) == 1);
}

TEST_CASE("unknown preset") {
  CHECK_THROWS(load_scenario_or_preset("no-such-preset"));
}

}

TEST_SUITE("presets") {

TEST_CASE("presets parse and are named after their files") {
  const auto presets = list_presets();
  REQUIRE(presets.size() >= 10);
  for (const auto& p : presets) {
    CHECK(p.path.stem().string() == p.name);
    CHECK_FALSE(p.description.empty());
  }
  for (const char* id : {"fig3", "fig8", "fig9", "fig10", "fig12", "fig13", "fig14", "fig15", "fig16",
                         "table1"}) {
    const auto hit = std::find_if(presets.begin(), presets.end(), [&](const PresetInfo& p) {
      return p.name.rfind(std::string(id) + "-", 0) == 0;
    });
    CAPTURE(id);
    CHECK(hit != presets.end());
  }
}

TEST_CASE("every preset runs inside a minute") {
  const auto params = default_params();
  for (const auto& p : list_presets()) {
    CAPTURE(p.name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = run_scenario(load_scenario(p.path), params);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 60.0);
    CHECK(m.payload_bits > 0);
  }
}

TEST_CASE("ulp-darkness decodes") {
  const auto s = load_scenario_or_preset("ulp-darkness");
  CHECK(s.tx.bitrate_bps == 60e3);
  CHECK(run_scenario(s, default_params()).ber <= 1e-3);
}

TEST_CASE("fig14-switching keeps every window usable") {
  const auto m = run_scenario(load_scenario_or_preset("fig14-switching"), default_params());
  for (const auto& w : m.windowed_ber) {
    if (w.count > 0) CHECK(w.value <= 1e-2);
  }
  CHECK(m.switch_events.size() == 12);
}

}
