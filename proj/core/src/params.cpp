#include "vlcsim/params.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_reader.hpp"
#include "vlcsim/errors.hpp"

namespace vlcsim {

using nlohmann::json;
using detail::Reader;

ThresholderConfig ThresholderSettings::for_bitrate(double bitrate_bps) const {
  ThresholderConfig c;
  c.rc_time_constant_s = rc_bit_periods / bitrate_bps;
  c.propagation_delay_s = propagation_delay_s;
  c.hysteresis_v = hysteresis_v;
  c.overdrive_delay_v_s = overdrive_delay_v_s;
  c.min_pulse_s = min_pulse_s;
  return c;
}

const ReceiverParams& ModelParams::receiver(ReceiverKind kind) const {
  switch (kind) {
    case ReceiverKind::UltraLowPower: return ultra_low_power;
    case ReceiverKind::HighGain: return high_gain;
    case ReceiverKind::LowGain: return low_gain;
  }
  throw std::invalid_argument("unknown receiver kind");
}

ReceiverParams& ModelParams::receiver(ReceiverKind kind) {
  return const_cast<ReceiverParams&>(std::as_const(*this).receiver(kind));
}

void ModelParams::validate() const {
  std::vector<std::string> bad;
  for (ReceiverKind k : kAllReceivers) {
    const auto& r = receiver(k);
    const std::string prefix = "receivers." + std::string(to_string(k)) + ".";
    if (r.kind != k) bad.push_back(prefix + "kind");
    try {
      if (r.tia()) r.tia()->validate();
      if (r.solar_cell()) r.solar_cell()->validate();
    } catch (const ValidationError& e) {
      for (const auto& key : e.keys()) bad.push_back(prefix + "front_end." + key);
    }
    if (!(r.thresholder.rc_bit_periods > 0.0)) bad.push_back(prefix + "thresholder.rc_bit_periods");
    try {
      r.thresholder.for_bitrate(1.0).validate();
    } catch (const ValidationError& e) {
      for (const auto& key : e.keys()) bad.push_back(prefix + "thresholder." + key);
    }
    if (!(r.power_w >= 0.0)) bad.push_back(prefix + "power_w");
  }
  if ((ultra_low_power.solar_cell() == nullptr)) bad.emplace_back("receivers.ultra_low_power.front_end");
  if ((high_gain.tia() == nullptr)) bad.emplace_back("receivers.high_gain.front_end");
  if ((low_gain.tia() == nullptr)) bad.emplace_back("receivers.low_gain.front_end");
  const auto& in = integration;
  if (!(in.power_on_latency_s >= 0.0)) bad.emplace_back("integration.power_on_latency_s");
  if (!(in.mux_latency_s >= 0.0)) bad.emplace_back("integration.mux_latency_s");
  if (!(in.throughput_sample_interval_s > 0.0)) bad.emplace_back("integration.throughput_sample_interval_s");
  if (!(in.sampler_energy_per_sample_j >= 0.0)) bad.emplace_back("integration.sampler_energy_per_sample_j");
  if (in.mcu_rate_cap_bps && !(*in.mcu_rate_cap_bps > 0.0)) bad.emplace_back("integration.mcu_rate_cap_bps");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

ModelParams default_params() {
  ModelParams p;

  SolarCellModel cell;
  cell.cutoff_hz = 16e3;
  cell.responsivity_v_per_lux = 1e-3;
  cell.noise_floor_lux = 25.0;
  cell.noise_ratio = 0.05;
  p.ultra_low_power.kind = ReceiverKind::UltraLowPower;
  p.ultra_low_power.front_end = cell;
  p.ultra_low_power.thresholder.propagation_delay_s = 2e-6;
  p.ultra_low_power.thresholder.hysteresis_v = 5.75e-3;
  p.ultra_low_power.thresholder.overdrive_delay_v_s = 5e-8;
  p.ultra_low_power.power_w = kUltraLowPowerSupplyV * kUltraLowPowerCurrentA;

  // Both gain settings share one amplifier, so one GBP and one rail.
  TiaModel hg;
  hg.rf_ohm = 754e3;
  hg.gbp_hz = 400e6;
  hg.responsivity_a_per_lux = 3.3 / (754e3 * 220.0);
  hg.noise_sigma_v = 5e-3;
  hg.overdrive_recovery_s = 50e-6;
  p.high_gain.kind = ReceiverKind::HighGain;
  p.high_gain.front_end = hg;
  p.high_gain.thresholder.overdrive_delay_v_s = 1.05e-7;
  p.high_gain.thresholder.min_pulse_s = 1.25e-6;
  p.high_gain.power_w = 25e-3;

  TiaModel lg = hg;
  lg.rf_ohm = 104e3;
  lg.responsivity_a_per_lux = 3.3 / (104e3 * 3500.0);
  lg.noise_sigma_v = 1.5e-3;
  p.low_gain.kind = ReceiverKind::LowGain;
  p.low_gain.front_end = lg;
  p.low_gain.thresholder.hysteresis_v = 5e-3;
  p.low_gain.thresholder.overdrive_delay_v_s = 1.1e-8;
  p.low_gain.thresholder.min_pulse_s = 4.6e-7;
  p.low_gain.power_w = 25e-3;

  return p;
}

// ---------------------------------------------------------------------------

namespace {

json to_json(const ThresholderSettings& t) {
  return {{"rc_bit_periods", t.rc_bit_periods},
          {"propagation_delay_s", t.propagation_delay_s},
          {"hysteresis_v", t.hysteresis_v},
          {"overdrive_delay_v_s", t.overdrive_delay_v_s},
          {"min_pulse_s", t.min_pulse_s}};
}

json to_json(const ReceiverParams& r) {
  json fe;
  if (const auto* c = r.solar_cell()) {
    fe = {{"type", "solar_cell"},
          {"cutoff_hz", c->cutoff_hz},
          {"responsivity_v_per_lux", c->responsivity_v_per_lux},
          {"noise_floor_lux", c->noise_floor_lux},
          {"noise_ratio", c->noise_ratio}};
  } else if (const auto* t = r.tia()) {
    fe = {{"type", "tia"},
          {"rf_ohm", t->rf_ohm},
          {"gbp_hz", t->gbp_hz},
          {"supply_v", t->supply_v},
          {"responsivity_a_per_lux", t->responsivity_a_per_lux},
          {"noise_sigma_v", t->noise_sigma_v},
          {"overdrive_recovery_s", t->overdrive_recovery_s}};
  }
  return {{"front_end", fe}, {"thresholder", to_json(r.thresholder)}, {"power_w", r.power_w}};
}

ThresholderSettings read_thresholder(const json& j, const std::string& prefix,
                                     std::vector<std::string>& bad) {
  Reader r(j, prefix, bad);
  ThresholderSettings t;
  t.rc_bit_periods = r.number("rc_bit_periods", t.rc_bit_periods);
  t.propagation_delay_s = r.number("propagation_delay_s", t.propagation_delay_s);
  t.hysteresis_v = r.number("hysteresis_v", t.hysteresis_v);
  t.overdrive_delay_v_s = r.number("overdrive_delay_v_s", t.overdrive_delay_v_s);
  t.min_pulse_s = r.number("min_pulse_s", t.min_pulse_s);
  r.reject_unknown();
  return t;
}

ReceiverParams read_receiver(const json& j, ReceiverKind kind, std::vector<std::string>& bad) {
  const std::string prefix = "receivers." + std::string(to_string(kind)) + ".";
  Reader r(j, prefix, bad);
  ReceiverParams out;
  out.kind = kind;
  const json& fe = r.child("front_end");
  Reader f(fe, prefix + "front_end.", bad);
  const std::string type = f.string("type");
  if (type == "solar_cell") {
    SolarCellModel c;
    c.cutoff_hz = f.number("cutoff_hz", c.cutoff_hz);
    c.responsivity_v_per_lux = f.number("responsivity_v_per_lux", c.responsivity_v_per_lux);
    c.noise_floor_lux = f.number("noise_floor_lux", c.noise_floor_lux);
    c.noise_ratio = f.number("noise_ratio", c.noise_ratio);
    out.front_end = c;
  } else if (type == "tia") {
    TiaModel t;
    t.rf_ohm = f.number("rf_ohm", t.rf_ohm);
    t.gbp_hz = f.number("gbp_hz", t.gbp_hz);
    t.supply_v = f.number("supply_v", t.supply_v);
    t.responsivity_a_per_lux = f.number("responsivity_a_per_lux", t.responsivity_a_per_lux);
    t.noise_sigma_v = f.number("noise_sigma_v", t.noise_sigma_v);
    t.overdrive_recovery_s = f.number("overdrive_recovery_s", t.overdrive_recovery_s);
    out.front_end = t;
  } else if (!type.empty()) {
    bad.push_back(prefix + "front_end.type");
  }
  f.reject_unknown();
  out.thresholder = read_thresholder(r.child("thresholder"), prefix + "thresholder.", bad);
  out.power_w = r.number("power_w", 0.0);
  r.reject_unknown();
  return out;
}

}  // namespace

std::string params_to_json(const ModelParams& params) {
  json receivers;
  for (ReceiverKind k : kAllReceivers) receivers[std::string(to_string(k))] = to_json(params.receiver(k));
  const auto& in = params.integration;
  json integration = {{"power_on_latency_s", in.power_on_latency_s},
                      {"mux_latency_s", in.mux_latency_s},
                      {"throughput_sample_interval_s", in.throughput_sample_interval_s},
                      {"sampler_energy_per_sample_j", in.sampler_energy_per_sample_j},
                      {"mcu_rate_cap_bps", in.mcu_rate_cap_bps ? json(*in.mcu_rate_cap_bps) : json()}};
  json root = {{"receivers", receivers}, {"integration", integration}};
  return root.dump(2) + "\n";
}

ModelParams params_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({"<root>"}, e.what());
  }
  std::vector<std::string> bad;
  Reader r(root, "", bad);
  ModelParams p;
  const json& receivers = r.child("receivers");
  Reader rr(receivers, "receivers.", bad);
  for (ReceiverKind k : kAllReceivers) {
    p.receiver(k) = read_receiver(rr.child(std::string(to_string(k)).c_str()), k, bad);
  }
  rr.reject_unknown();
  Reader ir(r.child("integration"), "integration.", bad);
  auto& in = p.integration;
  in.power_on_latency_s = ir.number("power_on_latency_s", in.power_on_latency_s);
  in.mux_latency_s = ir.number("mux_latency_s", in.mux_latency_s);
  in.throughput_sample_interval_s = ir.number("throughput_sample_interval_s", in.throughput_sample_interval_s);
  in.sampler_energy_per_sample_j = ir.number("sampler_energy_per_sample_j", in.sampler_energy_per_sample_j);
  in.mcu_rate_cap_bps = ir.optional_number("mcu_rate_cap_bps");
  ir.reject_unknown();
  r.reject_unknown();
  detail::finish_validation(bad, [&] { p.validate(); });
  return p;
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open parameter file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str());
}

void save_params(const std::filesystem::path& path, const ModelParams& params) {
  params.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write parameter file " + tmp.string());
    out << params_to_json(params);
    if (!out) throw Error("failed writing parameter file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::filesystem::path> resolve_params_path(
    const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path) return explicit_path;
  if (const char* env = std::getenv(kParamsEnvVar); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

ModelParams load_resolved_params(const std::optional<std::filesystem::path>& explicit_path) {
  const auto path = resolve_params_path(explicit_path);
  return path ? load_params(*path) : default_params();
}

}  // namespace vlcsim
