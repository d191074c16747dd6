#include "vlcsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "vlcsim/errors.hpp"
#include "vlcsim/link.hpp"

namespace vlcsim {

namespace {

const char* expectation_name(Expectation e) {
  switch (e) {
    case Expectation::Decodes: return "decodes";
    case Expectation::Fails: return "fails";
    case Expectation::Dark: return "dark";
  }
  return "?";
}

double ber_limit(Expectation e) { return e == Expectation::Dark ? 1e-2 : kTargetBer; }

// Upper tail of the standard normal.
double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// A parameter the search may move, with the range it is allowed to span.
struct Knob {
  std::string name;
  std::function<double&(ReceiverParams&)> ref;
  double lo;
  double hi;
};

std::vector<Knob> knobs_for(ReceiverKind kind) {
  auto thr = [](double ThresholderSettings::*f) {
    return [f](ReceiverParams& r) -> double& { return r.thresholder.*f; };
  };
  auto tia = [](double TiaModel::*f) {
    return [f](ReceiverParams& r) -> double& { return std::get<TiaModel>(r.front_end).*f; };
  };
  auto cell = [](double SolarCellModel::*f) {
    return [f](ReceiverParams& r) -> double& { return std::get<SolarCellModel>(r.front_end).*f; };
  };
  switch (kind) {
    case ReceiverKind::UltraLowPower:
      return {{"thresholder.hysteresis_v", thr(&ThresholderSettings::hysteresis_v), 1e-3, 2e-2},
              {"thresholder.overdrive_delay_v_s", thr(&ThresholderSettings::overdrive_delay_v_s), 1e-8, 3e-7},
              {"front_end.cutoff_hz", cell(&SolarCellModel::cutoff_hz), 5e3, 5e4},
              {"front_end.noise_ratio", cell(&SolarCellModel::noise_ratio), 0.02, 0.2}};
    case ReceiverKind::HighGain:
      return {{"thresholder.min_pulse_s", thr(&ThresholderSettings::min_pulse_s), 5e-7, 3e-6},
              {"thresholder.overdrive_delay_v_s", thr(&ThresholderSettings::overdrive_delay_v_s), 3e-8, 3e-7},
              {"front_end.noise_sigma_v", tia(&TiaModel::noise_sigma_v), 1e-3, 2e-2},
              {"front_end.gbp_hz", tia(&TiaModel::gbp_hz), 1e8, 1e9}};
    case ReceiverKind::LowGain:
      return {{"thresholder.min_pulse_s", thr(&ThresholderSettings::min_pulse_s), 1e-7, 1e-6},
              {"thresholder.overdrive_delay_v_s", thr(&ThresholderSettings::overdrive_delay_v_s), 3e-9, 3e-8},
              {"thresholder.hysteresis_v", thr(&ThresholderSettings::hysteresis_v), 1e-3, 2e-2},
              {"front_end.noise_sigma_v", tia(&TiaModel::noise_sigma_v), 5e-4, 5e-3}};
  }
  return {};
}

double noise_floor_sigma(ReceiverKind kind, const ReceiverParams& r) {
  for (const auto& k : knobs_for(kind)) {
    if (k.name == "front_end.noise_ratio") {
      const auto& c = std::get<SolarCellModel>(r.front_end);
      return k.lo * c.responsivity_v_per_lux * c.noise_floor_lux;
    }
    if (k.name == "front_end.noise_sigma_v") return k.lo;
  }
  return 0.0;
}

/// Why no parameter value inside the knob bounds can meet `t`, or empty.
std::string infeasibility(const CalibrationTarget& t, const ModelParams& params) {
  if (t.expect != Expectation::Decodes) return {};
  const ReceiverParams& r = params.receiver(t.receiver);
  double swing = 0.0;
  if (const auto* tia = r.tia()) {
    if (t.lux >= tia->saturation_lux()) return "above saturation";
    swing = tia->volts_per_lux() * t.lux;
  } else if (const auto* cell = r.solar_cell()) {
    swing = cell->responsivity_v_per_lux * t.lux;
  }
  // Even with the threshold exactly mid-swing, one noisy sample at the bit
  // centre decides the bit.
  const double sigma = noise_floor_sigma(t.receiver, r);
  if (sigma > 0.0 && q_function(swing / (2.0 * sigma)) > kTargetBer) return "below noise floor";
  return {};
}

TargetOutcome evaluate(const ModelParams& params, const CalibrationTarget& t) {
  const auto& cap = params.integration.mcu_rate_cap_bps;
  if (t.framing == Framing::Uart && cap && t.bitrate_bps > *cap) {
    return {t, 1.0, t.expect != Expectation::Decodes};
  }
  LinkSetup s;
  s.params = params;
  s.receiver = t.receiver;
  s.tx.bitrate_bps = t.bitrate_bps;
  s.tx.on_lux = t.lux;
  s.tx.off_lux = 0.0;
  s.tx.framing = t.framing;
  s.summary_only = true;
  const double limit = ber_limit(t.expect);
  const double planned = static_cast<double>(s.rounds * s.packets_per_round * s.packet_len * 8);
  s.error_budget = static_cast<std::size_t>(limit * planned);
  const LinkMetrics m = run_link(s);
  const bool within = !m.aborted && m.ber <= limit;
  const bool met = t.expect == Expectation::Decodes ? within : !within;
  return {t, m.ber, met};
}

double miss_distance(const TargetOutcome& o) {
  if (o.met) return 0.0;
  const double limit = ber_limit(o.target.expect);
  return 1.0 + std::abs(std::log10(std::max(o.ber, 1e-7) / limit));
}

}  // namespace

std::string CalibrationTarget::name() const {
  std::ostringstream s;
  s << to_string(receiver) << '@' << lux << "lx/" << bitrate_bps / 1e3 << "kbps";
  if (framing == Framing::Uart) s << "/uart";
  s << ':' << expectation_name(expect);
  return s.str();
}

std::vector<CalibrationTarget> default_targets() {
  using E = Expectation;
  constexpr auto U = ReceiverKind::UltraLowPower;
  constexpr auto H = ReceiverKind::HighGain;
  constexpr auto L = ReceiverKind::LowGain;
  const auto grid = rate_grid();
  // "Within one step": nothing more than one grid factor above a stated rate
  // may pass, and a stated ceiling must be reached to within one factor.
  const auto above = [&](double bps) {
    return *std::upper_bound(grid.begin(), grid.end(), bps * 1.15);
  };
  const auto reaches = [&](double bps) {
    return *std::lower_bound(grid.begin(), grid.end(), bps / 1.15);
  };
  const double uart_ceiling = 1500e3 / 0.8;
  return {
      {U, 25, 10e3, E::Decodes},          {U, 25, above(10e3), E::Fails},
      {U, 50, 30e3, E::Decodes},          {U, 50, above(30e3), E::Fails},
      {U, 400, reaches(60e3), E::Decodes}, {U, 400, above(60e3), E::Fails},
      {U, 12, 10e3, E::Dark},             {U, 3, 10e3, E::Dark},

      {H, 3, 100e3, E::Decodes},          {H, 3, above(100e3), E::Fails},
      {H, 2, 100e3, E::Fails},
      {H, 12, 350e3, E::Decodes},         {H, 12, above(350e3), E::Fails},
      {H, 25, 500e3, E::Decodes},         {H, 25, above(500e3), E::Fails},
      {H, 50, 600e3, E::Decodes},         {H, 50, above(500e3), E::Fails},
      {H, 200, above(500e3), E::Fails},

      {L, 25, 100e3, E::Decodes},         {L, 25, above(100e3), E::Fails},
      {L, 12.5, 100e3, E::Fails},
      {L, 50, 700e3, E::Decodes},         {L, 50, above(700e3), E::Fails},
      {L, 12, 100e3, E::Dark},            {L, 3, 100e3, E::Dark},
      {L, 925, reaches(1700e3), E::Decodes}, {L, 925, above(1700e3), E::Fails},
      {L, 925, reaches(uart_ceiling), E::Decodes, Framing::Uart},
      {L, 925, above(uart_ceiling), E::Fails, Framing::Uart},
  };
}

std::vector<TargetOutcome> check_targets(const ModelParams& params,
                                         std::span<const CalibrationTarget> targets) {
  std::vector<TargetOutcome> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.push_back(evaluate(params, t));
  return out;
}

CalibrationReport calibrate(const ModelParams& start, std::span<const CalibrationTarget> targets,
                            const CalibrationOptions& options) {
  start.validate();
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  std::vector<std::string> impossible;
  for (const auto& t : targets) {
    if (auto why = infeasibility(t, start); !why.empty()) impossible.push_back(t.name() + " (" + why + ")");
  }
  if (!impossible.empty()) throw CalibrationError(std::move(impossible));

  CalibrationReport report;
  report.params = start;
  report.outcomes = check_targets(start, targets);
  report.evaluations = static_cast<int>(targets.size());
  if (std::all_of(report.outcomes.begin(), report.outcomes.end(),
                  [](const TargetOutcome& o) { return o.met; })) {
    log("all " + std::to_string(targets.size()) + " targets met");
    return report;
  }

  // Receivers are independent, so each is fitted against its own targets.
  std::map<ReceiverKind, std::vector<std::size_t>> by_receiver;
  for (std::size_t i = 0; i < targets.size(); ++i) by_receiver[targets[i].receiver].push_back(i);

  for (const auto& [kind, idx] : by_receiver) {
    std::vector<CalibrationTarget> own;
    for (auto i : idx) own.push_back(targets[i]);
    auto score_of = [&](const ModelParams& p, std::vector<TargetOutcome>& outcomes) {
      outcomes = check_targets(p, own);
      report.evaluations += static_cast<int>(own.size());
      double s = 0.0;
      for (const auto& o : outcomes) s += miss_distance(o);
      return s;
    };
    std::vector<TargetOutcome> best_outcomes;
    for (auto i : idx) best_outcomes.push_back(report.outcomes[i]);
    double best = 0.0;
    for (const auto& o : best_outcomes) best += miss_distance(o);
    if (best == 0.0) continue;
    std::ostringstream msg;
    msg << to_string(kind) << ": fitting, score " << best;
    log(msg.str());

    const auto knobs = knobs_for(kind);
    // Small moves first: the targets sit close to the starting point and large
    // jumps tend to trade one missed target for another.
    for (double step : {1.1, 1.3, 1.03}) {
      bool improved = true;
      while (improved && best > 0.0 && report.evaluations < options.max_evaluations) {
        improved = false;
        for (const auto& knob : knobs) {
          for (double f : {step, 1.0 / step}) {
            if (best == 0.0 || report.evaluations >= options.max_evaluations) break;
            ModelParams trial = report.params;
            double& v = knob.ref(trial.receiver(kind));
            const double next = std::clamp(v * f, knob.lo, knob.hi);
            if (next == v) continue;
            v = next;
            std::vector<TargetOutcome> outcomes;
            const double s = score_of(trial, outcomes);
            if (s < best) {
              best = s;
              best_outcomes = std::move(outcomes);
              report.params = trial;
              report.changed = true;
              improved = true;
              std::ostringstream msg;
              msg << to_string(kind) << ": " << knob.name << " -> " << next << ", score " << best;
              log(msg.str());
            }
          }
        }
      }
    }
    for (std::size_t j = 0; j < idx.size(); ++j) report.outcomes[idx[j]] = best_outcomes[j];
  }

  std::vector<std::string> unmet;
  for (const auto& o : report.outcomes) {
    if (!o.met) unmet.push_back(o.target.name());
  }
  if (!unmet.empty()) throw CalibrationError(std::move(unmet));
  return report;
}

void write_calibration_csv(std::ostream& out, std::span<const TargetOutcome> outcomes) {
  out << "target,receiver,lux,bitrate_bps,framing,expect,ber,met\n" << std::setprecision(12);
  for (const auto& o : outcomes) {
    const auto& t = o.target;
    out << t.name() << ',' << to_string(t.receiver) << ',' << t.lux << ',' << t.bitrate_bps << ','
        << (t.framing == Framing::Uart ? "uart" : "raw_ook") << ',' << expectation_name(t.expect)
        << ',' << o.ber << ',' << (o.met ? 1 : 0) << '\n';
  }
}

}  // namespace vlcsim
