#include "vlcsim/thresholder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

void ThresholderConfig::validate() const {
  std::vector<std::string> bad;
  if (!(rc_time_constant_s > 0.0)) bad.emplace_back("rc_time_constant_s");
  if (!(propagation_delay_s >= 0.0)) bad.emplace_back("propagation_delay_s");
  if (!(hysteresis_v >= 0.0)) bad.emplace_back("hysteresis_v");
  if (!(overdrive_delay_v_s >= 0.0)) bad.emplace_back("overdrive_delay_v_s");
  if (!(min_pulse_s >= 0.0)) bad.emplace_back("min_pulse_s");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

double default_tau(double bitrate_bps) {
  if (!(bitrate_bps > 0.0)) throw std::invalid_argument("default_tau: bitrate must be positive");
  return 16.0 / bitrate_bps;
}

Thresholder::Thresholder(const ThresholderConfig& cfg, double sample_rate_hz) {
  cfg.validate();
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("thresholder: bad sample rate");
  const double dt = 1.0 / sample_rate_hz;
  avg_alpha_ = -std::expm1(-dt / cfg.rc_time_constant_s);
  warmup_samples_ =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.rc_time_constant_s * sample_rate_hz)));
  hysteresis_ = cfg.hysteresis_v;
  step_per_volt_ = cfg.overdrive_delay_v_s > 0.0 ? dt / cfg.overdrive_delay_v_s : 0.0;
  min_pulse_samples_ = cfg.min_pulse_s * sample_rate_hz;
  const auto delay = static_cast<std::size_t>(std::lround(cfg.propagation_delay_s * sample_rate_hz));
  delay_line_.assign(delay, 0);
}

inline Bit Thresholder::compare(double x) {
  avg_ += avg_alpha_ * (x - avg_);
  double d = x - avg_;
  d += decision_ ? hysteresis_ : -hysteresis_;

  // Raw comparison and how long (in samples) it has held its current side.
  samples_since_cross_ += 1.0;
  const Bit side = d > 0.0 ? 1 : (d < 0.0 ? 0 : side_);
  if (side != side_) {
    const double at = std::clamp(last_d_ / (last_d_ - d), 0.0, 1.0);
    samples_since_cross_ = 1.0 - at;
    side_ = side;
  }
  last_d_ = d;

  if (step_per_volt_ > 0.0) {
    state_ = std::clamp(state_ + d * step_per_volt_, -1.0, 1.0);
  } else if (d != 0.0) {
    state_ = d > 0.0 ? 1.0 : -1.0;
  }
  if (state_ > 0.0) {
    decision_ = 1;
  } else if (state_ < 0.0) {
    decision_ = 0;
  }
  if (level_ != decision_ && side_ == decision_ && samples_since_cross_ >= min_pulse_samples_) {
    level_ = decision_;
  }
  return level_;
}

void Thresholder::process(std::span<const double> analog, std::span<Bit> digital) {
  if (digital.size() != analog.size()) throw std::invalid_argument("thresholder: span size mismatch");
  if (analog.empty()) return;
  if (!primed_) {
    // Start from the settled average of the opening stretch rather than from
    // zero, as a circuit that has been powered for a while would.
    offset_ = analog[0];
    const std::size_t n = std::min(analog.size(), warmup_samples_);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += analog[i] - offset_;
    avg_ = sum / static_cast<double>(n);
    primed_ = true;
  }
  if (delay_line_.empty()) {
    for (std::size_t i = 0; i < analog.size(); ++i) digital[i] = compare(analog[i] - offset_);
    return;
  }
  const std::size_t len = delay_line_.size();
  for (std::size_t i = 0; i < analog.size(); ++i) {
    const Bit now = compare(analog[i] - offset_);
    digital[i] = delay_line_[delay_pos_];
    delay_line_[delay_pos_] = now;
    if (++delay_pos_ == len) delay_pos_ = 0;
  }
}

DigitalWaveform threshold(const Waveform& analog, const ThresholderConfig& cfg) {
  if (analog.empty()) throw std::invalid_argument("threshold: empty waveform");
  std::vector<Bit> out(analog.size());
  Thresholder t(cfg, analog.sample_rate_hz());
  t.process(analog.samples(), out);
  return DigitalWaveform(std::move(out), analog.sample_rate_hz());
}

}  // namespace vlcsim
