#include "vlcsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "json_reader.hpp"
#include "vlcsim/errors.hpp"

#ifndef VLCSIM_SCENARIO_DIR
#define VLCSIM_SCENARIO_DIR "scenarios"
#endif

namespace vlcsim {

using nlohmann::json;
using detail::Reader;

namespace {

void prefixed(std::vector<std::string>& bad, const std::string& prefix, const auto& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    for (const auto& k : e.keys()) bad.push_back(prefix + k);
  }
}

std::optional<LuxTrace> read_trace(const json& j, const std::string& prefix,
                                   std::vector<std::string>& bad) {
  Reader r(j, prefix, bad);
  if (!j.is_object()) return std::nullopt;
  const std::string interp = r.string_or("interpolation", "hold");
  Interpolation mode = Interpolation::Hold;
  if (interp == "linear") {
    mode = Interpolation::Linear;
  } else if (interp != "hold") {
    r.flag("interpolation");
  }
  std::optional<LuxTrace> out;
  if (r.has("square")) {
    Reader sq(r.child("square"), prefix + "square.", bad);
    const double lo = sq.number("lo_lux", 0.0);
    const double hi = sq.number("hi_lux", 0.0);
    const auto n = sq.integer_or("transitions", -1);
    const double total = sq.number("duration_s", 0.0);
    sq.reject_unknown();
    if (n < 0) sq.flag("transitions");
    if (!(total > 0.0)) sq.flag("duration_s");
    if (!(lo >= 0.0)) sq.flag("lo_lux");
    if (!(hi >= 0.0)) sq.flag("hi_lux");
    if (n >= 0 && total > 0.0 && lo >= 0.0 && hi >= 0.0) {
      out = make_square_trace(lo, hi, static_cast<int>(n), total);
    }
    if (r.has("points")) r.flag("points");
  } else {
    const json& pts = r.child("points");
    std::vector<LuxPoint> points;
    bool ok = pts.is_array() && !pts.empty();
    if (ok) {
      for (const auto& p : pts) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          ok = false;
          break;
        }
        points.push_back({p[0].get<double>(), p[1].get<double>()});
      }
    }
    if (ok) {
      try {
        out = LuxTrace(std::move(points), mode);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) r.flag("points");
  }
  r.reject_unknown();
  return out;
}

json trace_to_json(const LuxTrace& t) {
  json pts = json::array();
  for (const auto& p : t.points()) pts.push_back({p.time_s, p.lux});
  return {{"interpolation", t.interpolation() == Interpolation::Linear ? "linear" : "hold"},
          {"points", pts}};
}

const char* framing_name(Framing f) { return f == Framing::Uart ? "uart" : "raw_ook"; }

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::None: break;
  }
  return "none";
}

std::string receiver_name(const std::optional<ReceiverKind>& k) {
  return k ? std::string(to_string(*k)) : std::string("switched");
}

}  // namespace

void Scenario::validate() const {
  std::vector<std::string> bad;
  if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." || name == "..") {
    bad.emplace_back("name");
  }
  prefixed(bad, "tx.", [&] { tx.validate(); });
  prefixed(bad, "channel.", [&] { channel.validate(); });
  if (incident_lux) {
    if (channel.attenuation) bad.emplace_back("channel.incident_lux");
    for (const auto& p : incident_lux->points()) {
      if (p.lux > tx.on_lux) {
        bad.emplace_back("channel.incident_lux");
        break;
      }
    }
  }
  if (!receiver) prefixed(bad, "policy.", [&] { policy.validate(); });
  if (rounds < 1) bad.emplace_back("rounds");
  if (packets_per_round < 1) bad.emplace_back("packets_per_round");
  if (packet_len < 1) bad.emplace_back("packet_len");
  if (duration_s && !(*duration_s > 0.0)) bad.emplace_back("duration_s");
  if (samples_per_bit < 2) bad.emplace_back("oversampling");
  if (!(ber_window_s > 0.0)) bad.emplace_back("ber_window_s");
  if (!(snr_window_s > 0.0)) bad.emplace_back("snr_window_s");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

Scenario scenario_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({"<root>"}, e.what());
  }
  std::vector<std::string> bad;
  Reader r(root, "", bad);
  Scenario s;
  s.name = r.string("name");
  s.description = r.string_or("description", "");

  Reader tx(r.child("tx"), "tx.", bad);
  s.tx.bitrate_bps = tx.number("bitrate_bps", s.tx.bitrate_bps);
  s.tx.on_lux = tx.number("on_lux", s.tx.on_lux);
  s.tx.off_lux = tx.number_or("off_lux", s.tx.off_lux);
  const std::string framing = tx.string_or("framing", "raw_ook");
  if (framing == "uart") {
    s.tx.framing = Framing::Uart;
  } else if (framing != "raw_ook") {
    tx.flag("framing");
  }
  const std::string parity = tx.string_or("uart_parity", "none");
  if (parity == "even") {
    s.tx.uart_parity = Parity::Even;
  } else if (parity == "odd") {
    s.tx.uart_parity = Parity::Odd;
  } else if (parity != "none") {
    tx.flag("uart_parity");
  }
  s.tx.uart_stop_bits = static_cast<int>(tx.integer_or("uart_stop_bits", 1));
  tx.reject_unknown();

  if (r.has("channel")) {
    Reader ch(r.child("channel"), "channel.", bad);
    s.channel.ambient_lux = ch.number_or("ambient_lux", 0.0);
    if (ch.has("attenuation")) {
      s.channel.attenuation = read_trace(ch.child("attenuation"), "channel.attenuation.", bad);
    }
    if (ch.has("incident_lux")) {
      s.incident_lux = read_trace(ch.child("incident_lux"), "channel.incident_lux.", bad);
    }
    if (ch.has("flicker")) {
      Reader fl(ch.child("flicker"), "channel.flicker.", bad);
      Flicker f;
      f.freq_hz = fl.number_or("freq_hz", f.freq_hz);
      f.depth = fl.number("depth", f.depth);
      fl.reject_unknown();
      s.channel.flicker = f;
    }
    ch.reject_unknown();
  }

  const std::string rx = r.string("receiver");
  if (rx == "switched") {
    s.receiver.reset();
  } else if (auto k = parse_receiver_kind(rx)) {
    s.receiver = *k;
  } else if (!rx.empty()) {
    r.flag("receiver");
  }
  if (r.has("policy")) {
    Reader po(r.child("policy"), "policy.", bad);
    const std::string goal = po.string_or("goal", "throughput");
    if (goal == "energy") {
      s.policy.goal = SwitchGoal::Energy;
    } else if (goal != "throughput") {
      po.flag("goal");
    }
    s.policy.sample_interval_s = po.number_or("sample_interval_s", s.policy.sample_interval_s);
    s.policy.hysteresis_lux = po.number_or("hysteresis_lux", s.policy.hysteresis_lux);
    po.reject_unknown();
  }

  s.rounds = static_cast<int>(r.integer_or("rounds", s.rounds));
  s.packets_per_round = static_cast<int>(r.integer_or("packets_per_round", s.packets_per_round));
  s.packet_len = static_cast<int>(r.integer_or("packet_len", s.packet_len));
  s.duration_s = r.optional_number("duration_s");
  const long long seed = r.integer_or("seed", 1);
  if (seed < 0) r.flag("seed");
  s.seed = static_cast<std::uint64_t>(seed);
  s.samples_per_bit = static_cast<int>(r.integer_or("oversampling", s.samples_per_bit));
  s.ber_window_s = r.number_or("ber_window_s", s.ber_window_s);
  s.snr_window_s = r.number_or("snr_window_s", s.snr_window_s);
  r.reject_unknown();

  detail::finish_validation(bad, [&] { s.validate(); });
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json tx = {{"bitrate_bps", s.tx.bitrate_bps},
             {"on_lux", s.tx.on_lux},
             {"off_lux", s.tx.off_lux},
             {"framing", framing_name(s.tx.framing)},
             {"uart_parity", parity_name(s.tx.uart_parity)},
             {"uart_stop_bits", s.tx.uart_stop_bits}};
  json channel = {{"ambient_lux", s.channel.ambient_lux}};
  if (s.channel.attenuation) channel["attenuation"] = trace_to_json(*s.channel.attenuation);
  if (s.incident_lux) channel["incident_lux"] = trace_to_json(*s.incident_lux);
  if (s.channel.flicker) {
    channel["flicker"] = {{"freq_hz", s.channel.flicker->freq_hz},
                          {"depth", s.channel.flicker->depth}};
  }
  json root = {{"name", s.name},
               {"description", s.description},
               {"tx", tx},
               {"channel", channel},
               {"receiver", receiver_name(s.receiver)},
               {"policy",
                {{"goal", s.policy.goal == SwitchGoal::Energy ? "energy" : "throughput"},
                 {"sample_interval_s", s.policy.sample_interval_s},
                 {"hysteresis_lux", s.policy.hysteresis_lux}}},
               {"rounds", s.rounds},
               {"packets_per_round", s.packets_per_round},
               {"packet_len", s.packet_len},
               {"seed", s.seed},
               {"oversampling", s.samples_per_bit},
               {"ber_window_s", s.ber_window_s},
               {"snr_window_s", s.snr_window_s}};
  if (s.duration_s) root["duration_s"] = *s.duration_s;
  return root.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

LinkSetup link_setup(const Scenario& s, const ModelParams& params) {
  LinkSetup l;
  l.tx = s.tx;
  l.channel = s.channel;
  if (s.incident_lux) l.channel.attenuation = attenuation_from_incident(*s.incident_lux, s.tx.on_lux);
  l.receiver = s.receiver;
  l.policy = s.policy;
  l.params = params;
  l.samples_per_bit = s.samples_per_bit;
  l.seed = s.seed;
  l.rounds = s.rounds;
  l.packets_per_round = s.packets_per_round;
  l.packet_len = s.packet_len;
  l.duration_s = s.duration_s;
  l.ber_window_s = s.ber_window_s;
  l.snr_window_s = s.snr_window_s;
  return l;
}

LinkMetrics run_scenario(const Scenario& s, const ModelParams& params) {
  s.validate();
  return run_link(link_setup(s, params));
}

void write_metrics_csv(std::ostream& out, const Scenario& s, const LinkMetrics& m) {
  out << kMetricsCsvHeader << '\n';
  out << std::setprecision(12);
  out << s.name << ',' << receiver_name(s.receiver) << ',' << s.tx.bitrate_bps << ','
      << framing_name(s.tx.framing) << ',' << m.ber << ',' << m.bit_errors << ','
      << m.payload_bits << ',' << m.packets_lost << ',' << m.framing_errors << ','
      << m.duration_s << ',' << m.throughput_bps << ',' << m.payload_efficiency << ','
      << m.energy_j << ',' << m.sampler_energy_j << ',' << m.energy_per_bit_j << ','
      << m.switch_events.size() << ',' << (m.aborted ? 1 : 0) << '\n';
}

void write_ber_windows_csv(std::ostream& out, const LinkMetrics& m) {
  out << kBerWindowsCsvHeader << '\n' << std::setprecision(12);
  for (const auto& w : m.windowed_ber) {
    out << w.start_s << ',' << w.end_s << ',' << w.value << ',' << w.count << '\n';
  }
}

void write_snr_csv(std::ostream& out, const LinkMetrics& m) {
  out << kSnrCsvHeader << '\n' << std::setprecision(12);
  for (const auto& p : m.snr.points) {
    out << p.time_s << ',';
    if (p.snr_db == kSnrFloorDb) {
      out << "-inf";
    } else {
      out << p.snr_db;
    }
    out << '\n';
  }
}

std::filesystem::path write_results(const std::filesystem::path& out_dir, const Scenario& s,
                                    const ModelParams& params, const LinkMetrics& m) {
  namespace fs = std::filesystem;
  const fs::path final_dir = out_dir / s.name;
  const fs::path tmp_dir = out_dir / ("." + s.name + ".tmp");
  fs::remove_all(tmp_dir);
  fs::create_directories(tmp_dir);

  auto write = [&](const char* file, const auto& body) {
    std::ofstream out(tmp_dir / file, std::ios::trunc);
    if (!out) throw Error("cannot write " + (tmp_dir / file).string());
    body(out);
    if (!out) throw Error("failed writing " + (tmp_dir / file).string());
  };
  write("metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, s, m); });
  write("ber_windows.csv", [&](std::ostream& o) { write_ber_windows_csv(o, m); });
  write("snr.csv", [&](std::ostream& o) { write_snr_csv(o, m); });
  write("switch_events.csv", [&](std::ostream& o) { write_switch_events_csv(o, m.switch_events); });
  write("config.json", [&](std::ostream& o) {
    json snapshot = {{"scenario", json::parse(scenario_to_json(s))},
                     {"params", json::parse(params_to_json(params))}};
    o << snapshot.dump(2) << '\n';
  });

  fs::remove_all(final_dir);
  fs::rename(tmp_dir, final_dir);
  return final_dir;
}

std::filesystem::path default_scenario_dir() {
  if (const char* env = std::getenv("VLCSIM_SCENARIOS"); env != nullptr && *env != '\0') {
    return env;
  }
  return VLCSIM_SCENARIO_DIR;
}

std::vector<PresetInfo> list_presets(const std::optional<std::filesystem::path>& dir) {
  namespace fs = std::filesystem;
  const fs::path root = dir ? *dir : default_scenario_dir();
  std::vector<PresetInfo> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load_scenario(entry.path());
    out.push_back({s.name, s.description, entry.path()});
  }
  std::sort(out.begin(), out.end(),
            [](const PresetInfo& a, const PresetInfo& b) { return a.name < b.name; });
  return out;
}

Scenario load_scenario_or_preset(const std::string& path_or_name,
                                 const std::optional<std::filesystem::path>& dir) {
  namespace fs = std::filesystem;
  if (fs::exists(path_or_name)) return load_scenario(path_or_name);
  const fs::path root = dir ? *dir : default_scenario_dir();
  const fs::path candidate = root / (path_or_name + ".json");
  if (fs::exists(candidate)) return load_scenario(candidate);
  throw Error("no scenario file or preset named '" + path_or_name + "'");
}

}  // namespace vlcsim
