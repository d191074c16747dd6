#pragma once

#include <cmath>
#include <numbers>

namespace vlcsim {

/// First-order low-pass realised by exponential smoothing (impulse-invariant
/// for step inputs): y += alpha * (x - y), alpha = 1 - exp(-dt / tau).
class OnePoleLowPass {
 public:
  OnePoleLowPass() = default;
  OnePoleLowPass(double time_constant_s, double sample_rate_hz)
      : alpha_(time_constant_s > 0.0 ? -std::expm1(-1.0 / (time_constant_s * sample_rate_hz))
                                     : 1.0) {}

  static OnePoleLowPass from_cutoff(double cutoff_hz, double sample_rate_hz) {
    return OnePoleLowPass(1.0 / (2.0 * std::numbers::pi * cutoff_hz), sample_rate_hz);
  }

  void reset(double state) { state_ = state; }
  double state() const { return state_; }
  double alpha() const { return alpha_; }

  double step(double x) {
    state_ += alpha_ * (x - state_);
    return state_;
  }

 private:
  double alpha_ = 1.0;
  double state_ = 0.0;
};

}  // namespace vlcsim
