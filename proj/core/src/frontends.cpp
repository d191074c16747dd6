#include "vlcsim/frontends.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

std::string_view to_string(ReceiverKind kind) {
  switch (kind) {
    case ReceiverKind::UltraLowPower: return "ultra_low_power";
    case ReceiverKind::HighGain: return "high_gain";
    case ReceiverKind::LowGain: return "low_gain";
  }
  return "unknown";
}

std::optional<ReceiverKind> parse_receiver_kind(std::string_view text) {
  if (text == "ultra_low_power" || text == "ulp") return ReceiverKind::UltraLowPower;
  if (text == "high_gain" || text == "hg") return ReceiverKind::HighGain;
  if (text == "low_gain" || text == "lg") return ReceiverKind::LowGain;
  return std::nullopt;
}

void SolarCellModel::validate() const {
  std::vector<std::string> bad;
  if (!(cutoff_hz > 0.0)) bad.emplace_back("cutoff_hz");
  if (!(responsivity_v_per_lux > 0.0)) bad.emplace_back("responsivity_v_per_lux");
  if (!(noise_floor_lux > 0.0)) bad.emplace_back("noise_floor_lux");
  if (!(noise_ratio >= 0.0)) bad.emplace_back("noise_ratio");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

void TiaModel::validate() const {
  std::vector<std::string> bad;
  if (!(rf_ohm > 0.0)) bad.emplace_back("rf_ohm");
  if (!(gbp_hz > 0.0)) bad.emplace_back("gbp_hz");
  if (!(supply_v > 0.0)) bad.emplace_back("supply_v");
  if (!(responsivity_a_per_lux > 0.0)) bad.emplace_back("responsivity_a_per_lux");
  if (!(noise_sigma_v >= 0.0)) bad.emplace_back("noise_sigma_v");
  if (!(overdrive_recovery_s >= 0.0)) bad.emplace_back("overdrive_recovery_s");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

// ---------------------------------------------------------------------------

SolarCellFrontEnd::SolarCellFrontEnd(const SolarCellModel& model, double sample_rate_hz,
                                     std::uint64_t noise_seed)
    : responsivity_(model.responsivity_v_per_lux),
      sigma_(model.noise_sigma_v()),
      lpf_(OnePoleLowPass::from_cutoff(model.cutoff_hz, sample_rate_hz)),
      rng_(noise_seed) {
  model.validate();
}

void SolarCellFrontEnd::process(std::span<const double> lux, std::span<double> volts) {
  if (volts.size() != lux.size()) throw std::invalid_argument("solar cell: span size mismatch");
  if (lux.empty()) return;
  if (!primed_) {
    lpf_.reset(responsivity_ * lux[0]);
    primed_ = true;
  }
  if (sigma_ > 0.0) {
    for (std::size_t i = 0; i < lux.size(); ++i) {
      volts[i] = lpf_.step(responsivity_ * lux[i]) + sigma_ * rng_.gaussian();
    }
  } else {
    for (std::size_t i = 0; i < lux.size(); ++i) volts[i] = lpf_.step(responsivity_ * lux[i]);
  }
}

TiaFrontEnd::TiaFrontEnd(const TiaModel& model, double sample_rate_hz, std::uint64_t noise_seed,
                         bool cold_start)
    : gain_(model.volts_per_lux()),
      supply_(model.supply_v),
      sigma_(model.noise_sigma_v),
      recovery_samples_per_overdrive_(model.overdrive_recovery_s * sample_rate_hz),
      lpf_(OnePoleLowPass::from_cutoff(model.bandwidth_hz(), sample_rate_hz)),
      rng_(noise_seed),
      primed_(cold_start) {
  model.validate();
  lpf_.reset(0.0);
}

void TiaFrontEnd::process(std::span<const double> lux, std::span<double> volts) {
  if (volts.size() != lux.size()) throw std::invalid_argument("tia: span size mismatch");
  if (lux.empty()) return;
  if (!primed_) {
    lpf_.reset(std::clamp(gain_ * lux[0], 0.0, supply_));
    primed_ = true;
  }
  for (std::size_t i = 0; i < lux.size(); ++i) {
    const double ideal = gain_ * lux[i];
    double v;
    if (ideal >= supply_) {
      v = supply_;
      const double hold = recovery_samples_per_overdrive_ * (ideal / supply_ - 1.0);
      pinned_samples_left_ = std::max(pinned_samples_left_, hold);
    } else if (pinned_samples_left_ > 0.0) {
      v = supply_;
      pinned_samples_left_ -= 1.0;
    } else {
      v = std::max(ideal, 0.0);
    }
    volts[i] = lpf_.step(v);
  }
  if (sigma_ > 0.0) {
    for (std::size_t i = 0; i < lux.size(); ++i) volts[i] += sigma_ * rng_.gaussian();
  }
}

Waveform solar_cell_respond(const Waveform& in, const SolarCellModel& model,
                            std::uint64_t noise_seed) {
  std::vector<double> out(in.size());
  SolarCellFrontEnd fe(model, in.sample_rate_hz(), noise_seed);
  fe.process(in.samples(), out);
  return Waveform(std::move(out), in.sample_rate_hz());
}

Waveform tia_respond(const Waveform& in, const TiaModel& model, std::uint64_t noise_seed) {
  std::vector<double> out(in.size());
  TiaFrontEnd fe(model, in.sample_rate_hz(), noise_seed);
  fe.process(in.samples(), out);
  return Waveform(std::move(out), in.sample_rate_hz());
}

// ---------------------------------------------------------------------------

double OperatingRange::supported_bps(double lux) const {
  if (saturation_lux && lux > *saturation_lux) return 0.0;
  double best = 0.0;
  for (const auto& e : entries) {
    if (lux >= e.lux) best = std::max(best, e.max_throughput_bps);
  }
  return best;
}

std::vector<OperatingRange> operating_table() {
  // The "<4 lx" row is entered at 3 lx: the high-gain receiver still decodes
  // 100 kbps at the 3 lx floor of the switching trace.
  return {
      {ReceiverKind::HighGain,
       {{3.0, 100e3}, {12.0, 350e3}, {25.0, 500e3}, {50.0, 600e3}},
       3.0,
       240.0},
      {ReceiverKind::LowGain, {{25.0, 100e3}, {50.0, 700e3}}, 25.0, 2800.0},
      {ReceiverKind::UltraLowPower, {{25.0, 10e3}, {50.0, 30e3}}, 25.0, std::nullopt},
  };
}

}  // namespace vlcsim
