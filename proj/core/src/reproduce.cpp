#include "vlcsim/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vlcsim/channel.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/random.hpp"

namespace vlcsim {

namespace {

constexpr double kGridStep = 1.15;

void say(const ExperimentOptions& opt, const std::string& msg) {
  if (opt.log) opt.log(msg);
}

LinkSetup darkness_setup(const ExperimentOptions& opt) {
  LinkSetup s;
  s.params = opt.params;
  s.seed = opt.seed;
  s.samples_per_bit = opt.samples_per_bit;
  s.summary_only = true;
  s.channel.ambient_lux = 0.0;
  s.tx.off_lux = 0.0;
  return s;
}

std::vector<double> grid_between(double lo, double hi) {
  std::vector<double> out;
  for (double r : rate_grid()) {
    if (r >= lo && r <= hi) out.push_back(r);
  }
  return out;
}

double geometric(double a, double b, double w) {
  if (a > 0.0 && b > 0.0) return a * std::pow(b / a, w);
  return a + (b - a) * w;
}

std::string receiver_label(const std::optional<ReceiverKind>& k) {
  return k ? std::string(to_string(*k)) : std::string("switched");
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

}  // namespace

// --- sensitivity table ------------------------------------------------------

std::vector<double> sensitivity_rows() { return {3.0, 12.0, 25.0, 50.0}; }

std::optional<double> sensitivity_entry(double lux, ReceiverKind receiver) {
  for (const auto& range : operating_table()) {
    if (range.receiver != receiver) continue;
    for (const auto& e : range.entries) {
      if (e.lux == lux) return e.max_throughput_bps;
    }
  }
  return std::nullopt;
}

double lowest_stated_rate(ReceiverKind receiver) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& range : operating_table()) {
    if (range.receiver != receiver) continue;
    for (const auto& e : range.entries) lo = std::min(lo, e.max_throughput_bps);
  }
  return lo;
}

std::vector<SensitivityCell> sensitivity_table(const ExperimentOptions& opt) {
  const auto grid = rate_grid();
  std::vector<SensitivityCell> out;
  for (double lux : sensitivity_rows()) {
    for (ReceiverKind k : kAllReceivers) {
      LinkSetup s = darkness_setup(opt);
      s.tx.on_lux = lux;
      SensitivityCell c{lux, k, sensitivity_entry(lux, k), 0.0, 0.0, 0.0, false};
      c.achieved_bps = achievable_throughput(s, k, grid);
      c.probe_bps = c.stated_bps ? *c.stated_bps : lowest_stated_rate(k);
      s.receiver = k;
      s.tx.bitrate_bps = c.probe_bps;
      c.probe_ber = run_link(s).ber;
      if (c.stated_bps) {
        const double ratio = c.achieved_bps / *c.stated_bps;
        c.ok = c.probe_ber <= kTargetBer && ratio > 0.0 &&
               std::abs(std::log(ratio)) <= std::log(kGridStep);
      } else {
        c.ok = c.probe_ber > 1e-2;
      }
      std::ostringstream msg;
      msg << "table1 " << to_string(k) << " @" << lux << " lx: " << c.achieved_bps << " bps";
      say(opt, msg.str());
      out.push_back(c);
    }
  }
  return out;
}

// --- rate sweeps ------------------------------------------------------------

std::vector<SweepPoint> rate_sweep(ReceiverKind receiver, Framing framing,
                                   const std::vector<double>& ambient_lux,
                                   const std::vector<double>& incident_lux,
                                   const std::vector<double>& rates, const ExperimentOptions& opt) {
  std::vector<SweepPoint> out;
  for (double amb : ambient_lux) {
    for (double inc : incident_lux) {
      std::ostringstream series;
      series << to_string(receiver) << (framing == Framing::Uart ? "/uart" : "") << " amb=" << amb
             << " inc=" << inc;
      say(opt, series.str());
      for (double r : rates) {
        LinkSetup s = darkness_setup(opt);
        s.receiver = receiver;
        s.channel.ambient_lux = amb;
        s.tx.on_lux = inc;
        s.tx.bitrate_bps = r;
        s.tx.framing = framing;
        const LinkMetrics m = run_link(s);
        out.push_back({series.str(), amb, inc, r, m.ber, m.throughput_bps, m.framing_errors});
      }
    }
  }
  return out;
}

// --- solar cell response ----------------------------------------------------

std::vector<SwingPoint> solar_cell_swing(const SolarCellModel& cell, double on_lux,
                                         const std::vector<double>& rates) {
  SolarCellModel quiet = cell;
  quiet.noise_ratio = 0.0;
  constexpr int kBits = 400;
  constexpr int kSettleBits = 300;
  constexpr std::size_t kSpb = 64;
  std::vector<SwingPoint> out;
  for (double r : rates) {
    TxConfig tx;
    tx.bitrate_bps = r;
    tx.on_lux = on_lux;
    std::vector<Bit> pattern(kBits);
    for (int i = 0; i < kBits; ++i) pattern[static_cast<std::size_t>(i)] = static_cast<Bit>((i + 1) % 2);
    const BitStream bits(std::move(pattern));
    const Waveform light = ook_modulate(bits, tx, r * static_cast<double>(kSpb));
    const Waveform v = solar_cell_respond(light, quiet, 0);
    const auto tail = v.samples().subspan(static_cast<std::size_t>(kSettleBits) * kSpb);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    out.push_back({r, *hi - *lo});
  }
  return out;
}

// --- gain sweep -------------------------------------------------------------

ReceiverParams interpolate_gain(const ModelParams& params, double rf_ohm) {
  const ReceiverParams& lo = params.low_gain;
  const ReceiverParams& hi = params.high_gain;
  const TiaModel& a = *lo.tia();
  const TiaModel& b = *hi.tia();
  // Past either setting only rf moves; the rest holds at the nearer one.
  const double w =
      std::clamp(std::log(rf_ohm / a.rf_ohm) / std::log(b.rf_ohm / a.rf_ohm), 0.0, 1.0);
  ReceiverParams out = w < 0.5 ? lo : hi;
  TiaModel t = a;
  t.rf_ohm = rf_ohm;
  t.gbp_hz = geometric(a.gbp_hz, b.gbp_hz, w);
  t.supply_v = geometric(a.supply_v, b.supply_v, w);
  t.responsivity_a_per_lux = geometric(a.responsivity_a_per_lux, b.responsivity_a_per_lux, w);
  t.noise_sigma_v = geometric(a.noise_sigma_v, b.noise_sigma_v, w);
  t.overdrive_recovery_s = geometric(a.overdrive_recovery_s, b.overdrive_recovery_s, w);
  out.front_end = t;
  auto& th = out.thresholder;
  th.rc_bit_periods = geometric(lo.thresholder.rc_bit_periods, hi.thresholder.rc_bit_periods, w);
  th.propagation_delay_s =
      geometric(lo.thresholder.propagation_delay_s, hi.thresholder.propagation_delay_s, w);
  th.hysteresis_v = geometric(lo.thresholder.hysteresis_v, hi.thresholder.hysteresis_v, w);
  th.overdrive_delay_v_s =
      geometric(lo.thresholder.overdrive_delay_v_s, hi.thresholder.overdrive_delay_v_s, w);
  th.min_pulse_s = geometric(lo.thresholder.min_pulse_s, hi.thresholder.min_pulse_s, w);
  return out;
}

std::vector<GainPoint> gain_sweep(const std::vector<double>& rf_ohm, double bitrate_bps,
                                  const ExperimentOptions& opt) {
  std::vector<GainPoint> out;
  const LinkSetup base = darkness_setup(opt);
  for (double rf : rf_ohm) {
    ReceiverParams r = interpolate_gain(opt.params, rf);
    // Evaluate through whichever slot the interpolated receiver came from.
    const double lux = min_operating_lux(r, bitrate_bps, base);
    out.push_back({rf, lux, r.tia()->saturation_lux()});
    std::ostringstream msg;
    msg << "fig8 rf=" << rf << " min_lux=" << lux;
    say(opt, msg.str());
  }
  return out;
}

bool tia_saturates(const TiaModel& model, double lux) {
  TiaModel quiet = model;
  quiet.noise_sigma_v = 0.0;
  const Waveform light(std::vector<double>(4096, lux), 1e7);
  const Waveform v = tia_respond(light, quiet, 0);
  const auto s = v.samples();
  return *std::max_element(s.begin(), s.end()) >= quiet.supply_v;
}

// --- switching ----------------------------------------------------------------

std::vector<WindowSeries> square_trace_runs(double lo_lux, double hi_lux, int transitions,
                                            double duration_s, double bitrate_bps,
                                            const std::vector<std::optional<ReceiverKind>>& runs,
                                            const ExperimentOptions& opt) {
  const LuxTrace incident = make_square_trace(lo_lux, hi_lux, transitions, duration_s);
  const double on = std::max(lo_lux, hi_lux);
  std::vector<WindowSeries> out;
  for (const auto& rx : runs) {
    LinkSetup s = darkness_setup(opt);
    s.summary_only = false;
    s.receiver = rx;
    s.tx.on_lux = on;
    s.tx.bitrate_bps = bitrate_bps;
    s.channel.attenuation = attenuation_from_incident(incident, on);
    s.duration_s = duration_s;
    say(opt, "square trace: " + receiver_label(rx));
    const LinkMetrics m = run_link(s);
    out.push_back({receiver_label(rx), m.windowed_ber, m.bit_errors, m.payload_bits,
                   m.switch_events});
  }
  return out;
}

namespace {

constexpr double kStepBrightLux = 800.0;
constexpr double kStepDarkLux = 6.0;
constexpr double kStepBitrate = 100e3;
constexpr double kStepLeadS = 0.05;

double packet_time_s(double bitrate_bps) {
  const double bits = static_cast<double>(default_preamble().size()) + 256.0 * 8.0;
  return bits / bitrate_bps;
}

}  // namespace

std::vector<ResponsePoint> response_times(const std::vector<double>& sample_hz, int trials,
                                          const ExperimentOptions& opt) {
  std::vector<ResponsePoint> out;
  const double packet_s = packet_time_s(kStepBitrate);
  for (double f : sample_hz) {
    Rng rng(derive_seed(opt.seed, {0x5354, static_cast<std::uint64_t>(std::llround(f * 1e3))}));
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int n = 0;
    for (int i = 0; i < trials; ++i) {
      const double period = 1.0 / f;
      // The step lands anywhere relative to both the sampler and the packets.
      const double step = kStepLeadS + rng.uniform() * packet_s;
      LinkSetup s = darkness_setup(opt);
      s.receiver.reset();
      s.policy.goal = SwitchGoal::Energy;
      s.policy.sample_interval_s = period;
      s.sampler_phase_s = rng.uniform() * period;
      s.tx.bitrate_bps = kStepBitrate;
      s.tx.on_lux = kStepBrightLux;
      s.channel.attenuation =
          LuxTrace({{0.0, 1.0}, {step, kStepDarkLux / kStepBrightLux}}, Interpolation::Hold);
      s.duration_s = step + period + 3.0 * packet_s;
      s.seed = derive_seed(opt.seed, {static_cast<std::uint64_t>(i)});
      const double t = response_time(s, step);
      if (!std::isfinite(t)) continue;
      sum += t;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      ++n;
    }
    out.push_back({f, n ? sum / n : std::numeric_limits<double>::infinity(), lo, hi, n,
                   expected_response_s(f, opt.params, kStepBitrate)});
    std::ostringstream msg;
    msg << "fig16 " << f << " Hz: mean " << (n ? sum / n : 0.0) * 1e3 << " ms over " << n;
    say(opt, msg.str());
  }
  return out;
}

double expected_response_s(double sample_hz, const ModelParams& params, double bitrate_bps) {
  const double latency = params.integration.power_on_latency_s + params.integration.mux_latency_s;
  const double packet_s = packet_time_s(bitrate_bps);
  const double preamble_s = static_cast<double>(default_preamble().size()) / bitrate_bps;
  const double period = 1.0 / sample_hz;
  // Midpoint rule over the step position inside a packet and the wait for
  // the next sampler tick. A packet whose preamble arrives before the switch
  // is lost, so the link is back only with the next payload.
  constexpr int kNodes = 400;
  double sum = 0.0;
  for (int i = 0; i < kNodes; ++i) {
    const double phase = (i + 0.5) / kNodes * packet_s;
    for (int j = 0; j < kNodes; ++j) {
      const double wait = (j + 0.5) / kNodes * period;
      const double on_at = phase + wait + latency;
      sum += on_at < packet_s ? wait + latency
                              : std::ceil(on_at / packet_s) * packet_s + preamble_s - phase;
    }
  }
  return sum / (static_cast<double>(kNodes) * kNodes);
}

// --- figure registry ----------------------------------------------------------

std::vector<std::string> figure_ids() {
  return {"fig3", "fig8", "fig9", "fig10", "fig12", "fig13", "fig14", "fig15", "fig16", "table1"};
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> pts) {
  out << kSweepCsvHeader << '\n' << std::setprecision(12);
  for (const auto& p : pts) {
    out << p.series << ',' << p.ambient_lux << ',' << p.incident_lux << ',' << p.bitrate_bps << ','
        << p.ber << ',' << p.throughput_bps << ',' << p.framing_errors << '\n';
  }
}

void write_window_series_csv(std::ostream& out, std::span<const WindowSeries> runs) {
  out << kWindowSeriesCsvHeader << '\n' << std::setprecision(12);
  for (const auto& r : runs) {
    for (const auto& w : r.windows) {
      out << r.series << ',' << w.start_s << ',' << w.end_s << ',' << w.value << ',' << w.count
          << '\n';
    }
  }
}

void write_swing_csv(std::ostream& out, std::span<const SwingPoint> pts) {
  out << kSwingCsvHeader << '\n' << std::setprecision(12);
  for (const auto& p : pts) out << p.bitrate_bps << ',' << p.peak_to_peak_v << '\n';
}

void write_gain_csv(std::ostream& out, std::span<const GainPoint> pts) {
  out << kGainCsvHeader << '\n' << std::setprecision(12);
  for (const auto& p : pts) {
    out << p.rf_ohm << ',' << p.min_operating_lux << ',' << p.saturation_lux << '\n';
  }
}

void write_response_csv(std::ostream& out, std::span<const ResponsePoint> pts) {
  out << kResponseCsvHeader << '\n' << std::setprecision(12);
  for (const auto& p : pts) {
    out << p.sample_hz << ',' << p.mean_s << ',' << p.min_s << ',' << p.max_s << ',' << p.trials
        << ',' << p.expected_s << '\n';
  }
}

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityCell> cells) {
  out << kSensitivityCsvHeader << '\n' << std::setprecision(12);
  for (const auto& c : cells) {
    out << c.lux << ',' << to_string(c.receiver) << ',';
    if (c.stated_bps) out << *c.stated_bps;
    out << ',' << c.achieved_bps << ',' << c.probe_bps << ',' << c.probe_ber << ','
        << (c.ok ? 1 : 0) << '\n';
  }
}

namespace {

using Paths = std::vector<std::filesystem::path>;

Paths sweep_figure(const std::filesystem::path& dir, const std::string& id, ReceiverKind k,
                   const std::vector<double>& ambient, const std::vector<double>& incident,
                   const std::vector<double>& rates, const ExperimentOptions& opt) {
  const auto path = dir / (id + ".csv");
  auto out = open_csv(path);
  write_sweep_csv(out, rate_sweep(k, Framing::RawOok, ambient, incident, rates, opt));
  return {path};
}

Paths square_figure(const std::filesystem::path& dir, const std::string& id, double lo, double hi,
                    int transitions, double duration_s,
                    const std::vector<std::optional<ReceiverKind>>& runs,
                    const ExperimentOptions& opt) {
  const auto runs_out = square_trace_runs(lo, hi, transitions, duration_s, 100e3, runs, opt);
  const auto path = dir / (id + ".csv");
  auto out = open_csv(path);
  write_window_series_csv(out, runs_out);
  Paths written{path};
  for (const auto& r : runs_out) {
    if (r.series != "switched") continue;
    const auto ev = dir / (id + "_switch_events.csv");
    auto e = open_csv(ev);
    write_switch_events_csv(e, r.switch_events);
    written.push_back(ev);
  }
  return written;
}

}  // namespace

std::vector<std::filesystem::path> reproduce(const std::string& id,
                                             const std::filesystem::path& dir,
                                             const ExperimentOptions& opt) {
  const auto ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::string list;
    for (const auto& v : ids) list += (list.empty() ? "" : ", ") + v;
    throw std::invalid_argument("unknown figure id '" + id + "'; valid ids: " + list);
  }
  std::filesystem::create_directories(dir);
  constexpr auto U = ReceiverKind::UltraLowPower;
  constexpr auto H = ReceiverKind::HighGain;
  constexpr auto L = ReceiverKind::LowGain;

  if (id == "fig3") {
    std::vector<double> rates;
    for (double r = 1e3; r <= 200e3; r *= 1.25) rates.push_back(r);
    const auto path = dir / "fig3.csv";
    auto out = open_csv(path);
    write_swing_csv(out, solar_cell_swing(*opt.params.ultra_low_power.solar_cell(), 400.0, rates));
    return {path};
  }
  if (id == "fig8") {
    const double lo = opt.params.low_gain.tia()->rf_ohm;
    const double hi = opt.params.high_gain.tia()->rf_ohm;
    std::vector<double> rf;
    constexpr int kSteps = 7;
    for (int i = 0; i <= kSteps; ++i) rf.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / kSteps));
    const auto path = dir / "fig8.csv";
    auto out = open_csv(path);
    write_gain_csv(out, gain_sweep(rf, 100e3, opt));
    return {path};
  }
  if (id == "fig9") return sweep_figure(dir, id, H, {0.0}, {12, 25, 50, 100}, grid_between(50e3, 1e6), opt);
  if (id == "fig10") {
    return sweep_figure(dir, id, U, {kDarknessLux, kIndoorLux, kNaturalLux}, {50, 100, 400},
                        grid_between(5e3, 100e3), opt);
  }
  if (id == "fig12") {
    return sweep_figure(dir, id, L, {kDarknessLux, kIndoorLux, kNaturalLux}, {100, 400, 925},
                        grid_between(100e3, 2.6e6), opt);
  }
  if (id == "fig13") return square_figure(dir, id, 6.0, 800.0, 6, 56.0, {H, L}, opt);
  if (id == "fig14") return square_figure(dir, id, 3.0, 1500.0, 12, 27.0, {H, L, std::nullopt}, opt);
  if (id == "fig15") {
    const auto rates = grid_between(500e3, 2.6e6);
    auto pts = rate_sweep(L, Framing::Uart, {0.0}, {925.0}, rates, opt);
    const auto raw = rate_sweep(L, Framing::RawOok, {0.0}, {925.0}, rates, opt);
    pts.insert(pts.end(), raw.begin(), raw.end());
    const auto path = dir / "fig15.csv";
    auto out = open_csv(path);
    write_sweep_csv(out, pts);
    return {path};
  }
  if (id == "fig16") {
    const auto path = dir / "fig16.csv";
    auto out = open_csv(path);
    write_response_csv(out, response_times({4, 15, 35, 50}, 100, opt));
    return {path};
  }
  // table1
  const auto path = dir / "table1.csv";
  auto out = open_csv(path);
  write_sensitivity_csv(out, sensitivity_table(opt));
  return {path};
}

}  // namespace vlcsim
