#include "vlcsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

void ChannelConfig::validate() const {
  std::vector<std::string> bad;
  if (!(ambient_lux >= 0.0) || !std::isfinite(ambient_lux)) bad.emplace_back("ambient_lux");
  if (attenuation) {
    for (const auto& p : attenuation->points()) {
      if (p.lux > 1.0) {
        bad.emplace_back("attenuation");
        break;
      }
    }
  }
  if (flicker) {
    if (!(flicker->freq_hz > 0.0)) bad.emplace_back("flicker.freq_hz");
    if (!(flicker->depth >= 0.0 && flicker->depth <= 1.0)) bad.emplace_back("flicker.depth");
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

LuxTrace attenuation_from_incident(const LuxTrace& incident_lux, double on_lux) {
  if (!(on_lux > 0.0)) throw std::invalid_argument("on_lux must be positive");
  std::vector<LuxPoint> pts;
  pts.reserve(incident_lux.points().size());
  for (const auto& p : incident_lux.points()) {
    pts.push_back({p.time_s, std::clamp(p.lux / on_lux, 0.0, 1.0)});
  }
  return LuxTrace(std::move(pts), incident_lux.interpolation());
}

ChannelStream::ChannelStream(const ChannelConfig& cfg, double sample_rate_hz)
    : cfg_(&cfg), dt_(1.0 / sample_rate_hz) {
  if (cfg.attenuation) cursor_.emplace(*cfg.attenuation);
}

double ChannelStream::attenuation_at(double time_s) const {
  return cfg_->attenuation ? cfg_->attenuation->lux_at(time_s) : 1.0;
}

void ChannelStream::process(std::span<const double> tx, double t0_s, std::span<double> out) {
  if (out.size() != tx.size()) throw std::invalid_argument("channel: span size mismatch");
  const double ambient = cfg_->ambient_lux;
  if (!cursor_ && !cfg_->flicker) {
    for (std::size_t i = 0; i < tx.size(); ++i) out[i] = tx[i] + ambient;
    return;
  }
  const double w = cfg_->flicker ? 2.0 * std::numbers::pi * cfg_->flicker->freq_hz : 0.0;
  const double depth = cfg_->flicker ? cfg_->flicker->depth * ambient : 0.0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    const double t = t0_s + static_cast<double>(i) * dt_;
    const double att = cursor_ ? cursor_->lux_at(t) : 1.0;
    double v = tx[i] * att + ambient;
    if (depth != 0.0) v += depth * std::sin(w * t);
    out[i] = v;
  }
}

Waveform apply_channel(const Waveform& tx, const ChannelConfig& cfg) {
  cfg.validate();
  std::vector<double> out(tx.size());
  ChannelStream stream(cfg, tx.sample_rate_hz());
  stream.process(tx.samples(), 0.0, out);
  return Waveform(std::move(out), tx.sample_rate_hz());
}

double snr_db(double swing, double noise_floor_lux) {
  if (!(noise_floor_lux > 0.0)) throw std::invalid_argument("noise floor must be positive");
  if (!(swing > 0.0)) return kSnrFloorDb;
  return 20.0 * std::log10(swing / noise_floor_lux);
}

SnrAccumulator::SnrAccumulator(double window_s, double noise_floor_lux)
    : window_s_(window_s), floor_(noise_floor_lux) {
  if (!(window_s > 0.0)) throw std::invalid_argument("window_s must be positive");
  if (!(noise_floor_lux > 0.0)) throw std::invalid_argument("noise floor must be positive");
}

void SnrAccumulator::add(double time_s, double lux) {
  const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(time_s / window_s_)));
  if (k >= lo_.size()) {
    lo_.resize(k + 1, std::numeric_limits<double>::infinity());
    hi_.resize(k + 1, -std::numeric_limits<double>::infinity());
  }
  lo_[k] = std::min(lo_[k], lux);
  hi_[k] = std::max(hi_[k], lux);
}

void SnrAccumulator::add_block(double t0_s, double dt_s, std::span<const double> lux) {
  std::size_t i = 0;
  while (i < lux.size()) {
    const double t = t0_s + static_cast<double>(i) * dt_s;
    const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / window_s_)));
    // Samples up to the end of this window share one bin.
    const double window_end = static_cast<double>(k + 1) * window_s_;
    std::size_t j = i;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    while (j < lux.size() && t0_s + static_cast<double>(j) * dt_s < window_end) {
      lo = std::min(lo, lux[j]);
      hi = std::max(hi, lux[j]);
      ++j;
    }
    if (j == i) ++j;  // guard against a rounding stall
    add(t, lo);
    add(t, hi);
    i = j;
  }
}

SnrTrace SnrAccumulator::finish() const {
  SnrTrace out;
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!std::isfinite(lo_[k])) continue;
    out.points.push_back({static_cast<double>(k) * window_s_, snr_db(hi_[k] - lo_[k], floor_)});
  }
  return out;
}

SnrTrace snr_trace(const Waveform& received, double window_s, double noise_floor_lux) {
  SnrAccumulator acc(window_s, noise_floor_lux);
  acc.add_block(0.0, received.sample_period_s(), received.samples());
  return acc.finish();
}

LuxTrace make_square_trace(double lo_lux, double hi_lux, int n_transitions, double total_s) {
  if (!(lo_lux < hi_lux)) throw std::invalid_argument("square trace needs lo < hi");
  if (n_transitions < 1) throw std::invalid_argument("square trace needs at least one transition");
  if (!(total_s > 0.0)) throw std::invalid_argument("square trace needs a positive duration");
  const int segments = n_transitions + 1;
  const double seg = total_s / segments;
  std::vector<LuxPoint> pts;
  pts.reserve(static_cast<std::size_t>(segments) + 1);
  for (int k = 0; k < segments; ++k) pts.push_back({k * seg, k % 2 == 0 ? lo_lux : hi_lux});
  pts.push_back({total_s, pts.back().lux});
  return LuxTrace(std::move(pts), Interpolation::Hold);
}

}  // namespace vlcsim
