// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any
// failure. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vlcsim/calibration.hpp"
#include "vlcsim/link.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/random.hpp"
#include "vlcsim/reproduce.hpp"
#include "vlcsim/thresholder.hpp"

using namespace vlcsim;

namespace {

constexpr double kGridStep = 1.15;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

bool within_step(double got, double want) {
  return std::abs(std::log(got / want)) <= std::log(kGridStep) + 1e-12;
}

std::vector<double> grid_around(double bps) {
  std::vector<double> out;
  for (double r : rate_grid()) {
    if (r >= bps / 2.0 && r <= bps * 2.0) out.push_back(r);
  }
  return out;
}

LinkSetup darkness(const ModelParams& p, ReceiverKind k, double lux, double rate) {
  LinkSetup s;
  s.params = p;
  s.receiver = k;
  s.tx.on_lux = lux;
  s.tx.bitrate_bps = rate;
  s.summary_only = true;
  return s;
}

ModelParams noiseless(ModelParams p) {
  auto cell = *p.ultra_low_power.solar_cell();
  cell.noise_ratio = 0.0;
  p.ultra_low_power.front_end = cell;
  for (auto k : {ReceiverKind::HighGain, ReceiverKind::LowGain}) {
    auto tia = *p.receiver(k).tia();
    tia.noise_sigma_v = 0.0;
    p.receiver(k).front_end = tia;
  }
  return p;
}

// 1: sensitivity table after calibration.
void table_reproduction(Verdict& v) {
  const auto targets = default_targets();
  const auto report = calibrate(default_params(), targets);
  ExperimentOptions opt;
  opt.params = report.params;
  int ok = 0, total = 0;
  for (const auto& c : sensitivity_table(opt)) {
    ++total;
    ok += c.ok;
    if (!c.ok) {
      std::ostringstream s;
      s << to_string(c.receiver) << "@" << c.lux << "lx";
      v.require(false, s.str());
    }
  }
  v.detail << ok << "/" << total << " cells, calibration " << (report.changed ? "changed" : "no-op");
}

// 2: gain sweep endpoints.
void gain_endpoints(Verdict& v) {
  ExperimentOptions opt;
  const auto pts = gain_sweep({756e3, 104e3}, 100e3, opt);
  const double hg_lux = pts[0].min_operating_lux;
  const double lg_lux = pts[1].min_operating_lux;
  const auto& p = opt.params;
  const double onset = p.high_gain.tia()->saturation_lux();
  v.detail << "min lux 756k=" << hg_lux << " 104k=" << lg_lux << ", high-gain onset=" << onset
           << " lx";
  v.require(hg_lux >= 4.0 * 0.5 && hg_lux <= 4.0 * 1.5, "756k min lux within 4 +-50%");
  v.require(lg_lux >= 25.0 * 0.5 && lg_lux <= 25.0 * 1.5, "104k min lux within 25 +-50%");
  v.require(onset <= 240.0 * 1.25 && onset >= 240.0 * 0.75, "high-gain onset within 240 +-25%");
  v.require(tia_saturates(*p.high_gain.tia(), onset * 1.01), "high gain pinned past onset");
  v.require(!tia_saturates(*p.low_gain.tia(), 2800.0), "low gain unsaturated at 2800 lx");
}

// 3: throughput ceilings on the rate grid.
void ceilings(Verdict& v) {
  const auto p = default_params();
  struct Case {
    ReceiverKind k;
    double lux;
    double stated;
  };
  const Case cases[] = {{ReceiverKind::UltraLowPower, 400.0, 60e3},
                        {ReceiverKind::HighGain, 25.0, 500e3},
                        {ReceiverKind::HighGain, 50.0, 500e3},
                        {ReceiverKind::LowGain, 925.0, 1700e3}};
  for (const auto& c : cases) {
    const auto rates = grid_around(c.stated);
    const double top = achievable_throughput(darkness(p, c.k, c.lux, c.stated), c.k, rates);
    v.detail << to_string(c.k) << "@" << c.lux << "lx top=" << top / 1e3 << "k ";
    v.require(top > 0.0 && within_step(top, c.stated), std::string(to_string(c.k)) + " ceiling");
  }
}

// 4: square trace, fixed receivers against the switched link.
void switching(Verdict& v) {
  ExperimentOptions opt;
  const auto runs = square_trace_runs(3.0, 1500.0, 12, 27.0, 100e3,
                                      {ReceiverKind::HighGain, ReceiverKind::LowGain, std::nullopt}, opt);
  std::size_t min_fixed_errors = SIZE_MAX;
  for (const auto& r : runs) {
    double worst = 0.0;
    int dead = 0;
    for (const auto& w : r.windows) {
      if (w.count == 0) continue;
      worst = std::max(worst, w.value);
      dead += w.value == 1.0;
    }
    v.detail << r.series << ": worst " << worst << ", " << dead << " windows at 1, " << r.bit_errors
             << " errors; ";
    if (r.series == "switched") {
      v.require(worst <= 1e-2, "switched windows <= 1e-2");
      v.require(r.bit_errors < min_fixed_errors, "switched errors below both fixed runs");
    } else {
      v.require(dead >= 3, r.series + " has >= 3 windows at BER 1");
      min_fixed_errors = std::min(min_fixed_errors, r.bit_errors);
    }
  }
}

// 5: response time against the sampling rate.
void response(Verdict& v) {
  ExperimentOptions opt;
  const auto pts = response_times({4, 15, 35, 50}, 100, opt);
  double prev = INFINITY;
  for (const auto& p : pts) {
    v.detail << p.sample_hz << "Hz=" << p.mean_s * 1e3 << "ms(n=" << p.trials << ") ";
    v.require(p.trials >= 100, "100 trials at " + std::to_string(p.sample_hz));
    v.require(p.mean_s <= prev, "monotone at " + std::to_string(p.sample_hz));
    prev = p.mean_s;
  }
  v.require(pts.back().mean_s <= 25e-3, "<= 25 ms at 50 Hz");
}

// 6: UART path against raw OOK at the same line rates.
void uart(Verdict& v) {
  ExperimentOptions opt;
  opt.params = noiseless(default_params());
  std::vector<double> rates;
  for (double r : rate_grid()) {
    if (r >= 500e3 && r <= 2.6e6) rates.push_back(r);
  }
  const auto u = rate_sweep(ReceiverKind::LowGain, Framing::Uart, {0.0}, {925.0}, rates, opt);
  const auto raw = rate_sweep(ReceiverKind::LowGain, Framing::RawOok, {0.0}, {925.0}, rates, opt);
  const double raw_efficiency = 2048.0 / 2056.0;
  double top = 0.0, top_line = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].ber != 0.0 || u[i].framing_errors != 0) continue;
    if (u[i].throughput_bps > top) {
      top = u[i].throughput_bps;
      top_line = u[i].bitrate_bps;
    }
    v.require(u[i].throughput_bps < raw[i].throughput_bps, "uart below raw at " + std::to_string(rates[i]));
    if (raw[i].ber == 0.0) {
      const double ratio = u[i].throughput_bps / raw[i].throughput_bps;
      v.require(std::abs(ratio - 0.8 / raw_efficiency) < 1e-3,
                "throughput ratio is the framing factor at " + std::to_string(rates[i]));
    }
  }
  LinkSetup s = darkness(opt.params, ReceiverKind::LowGain, 925.0, top_line > 0 ? top_line : 1e6);
  s.tx.framing = Framing::Uart;
  const auto m = run_link(s);
  v.detail << "top " << top / 1e3 << "k payload at " << top_line / 1e3 << "k line, efficiency "
           << m.payload_efficiency;
  v.require(top > 0.0 && within_step(top, 1500e3), "uart tops within one step of 1500k");
  v.require(m.payload_efficiency == 0.8, "payload efficiency exactly 0.8");
  v.require(m.framing_errors == 0, "zero framing errors at the top");
}

// 7: property suite.
void properties(Verdict& v) {
  const auto p = default_params();

  // DC offset on the comparator input.
  {
    Rng rng(5);
    std::vector<double> in(16 * 2000);
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = ((i / 16) % 3 ? 0.2 : 0.05) + 0.01 * rng.gaussian();
    bool same = true;
    for (auto k : kAllReceivers) {
      const auto cfg = p.receiver(k).thresholder.for_bitrate(100e3);
      std::vector<Bit> a(in.size()), b(in.size());
      Thresholder(cfg, 1.6e6).process(in, a);
      auto shifted = in;
      for (double& x : shifted) x += 0.75;
      Thresholder(cfg, 1.6e6).process(shifted, b);
      same = same && a == b;
    }
    v.require(same, "dc offset invariance");
  }

  // Noiseless identity at the table operating points.
  {
    const auto quiet = noiseless(p);
    int n = 0;
    int exact = 0;
    std::ostringstream broken;
    for (double lux : sensitivity_rows()) {
      for (auto k : kAllReceivers) {
        if (const auto rate = sensitivity_entry(lux, k)) {
          const auto m = run_link(darkness(quiet, k, lux, *rate));
          ++n;
          if (m.bit_errors == 0) {
            ++exact;
          } else {
            broken << " " << to_string(k) << "@" << lux << "lx=" << m.ber;
          }
        }
      }
    }
    v.require(exact == n, "noiseless identity");
    v.detail << "identity at " << exact << "/" << n << " points";
    if (exact != n) v.detail << " (errors:" << broken.str() << ")";
    v.detail << "; ";
  }

  // BER in lux.
  {
    bool mono = true;
    double prev = 1.0;
    for (double lux : {4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 25.0}) {
      const double b = run_link(darkness(p, ReceiverKind::HighGain, lux, 350e3)).ber;
      mono = mono && b <= prev;
      prev = b;
    }
    v.require(mono, "ber monotone in lux");
  }

  // Determinism.
  {
    auto s = darkness(p, ReceiverKind::HighGain, 9.0, 350e3);
    const auto a = run_link(s);
    const auto b = run_link(s);
    v.require(a.bit_errors == b.bit_errors && a.ber == b.ber && a.throughput_bps == b.throughput_bps,
              "determinism");
  }

  // Ultra-low-power energy per bit.
  {
    const double watts = 2.4 * 220e-9;
    const auto power = power_model(p);
    bool exact = power.ultra_low_power_w == watts;
    for (double rate : {10e3, 30e3, 60e3}) {
      exact = exact && energy_per_bit(ReceiverKind::UltraLowPower, rate, power) == watts / rate;
    }
    v.require(exact, "ultra-low-power energy per bit = 0.528 uW / rate");
    v.detail << "energy/bit at 60k = " << energy_per_bit(ReceiverKind::UltraLowPower, 60e3, power) << " J";
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Verdict&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "sensitivity table", 600.0, table_reproduction},
      {2, "gain sweep endpoints", 120.0, gain_endpoints},
      {3, "throughput ceilings", 0.0, ceilings},
      {4, "switching on a square trace", 0.0, switching},
      {5, "response time", 0.0, response},
      {6, "uart path", 0.0, uart},
      {7, "property suite", 0.0, properties},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  bool all_pass = true;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0) v.require(secs < c.budget_s, "runtime budget");
    all_pass = all_pass && v.pass;
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", secs,
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
