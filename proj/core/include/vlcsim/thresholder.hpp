#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vlcsim/signal.hpp"

namespace vlcsim {

struct ThresholderConfig {
  double rc_time_constant_s = 1.6e-4;
  double propagation_delay_s = 0.0;
  double hysteresis_v = 0.0;
  /// Overdrive-delay product of the comparator: an input driven `v` volts
  /// past the reference needs overdrive_delay_v_s / v seconds to flip the
  /// output. 0 models an ideal comparator.
  double overdrive_delay_v_s = 0.0;
  /// Minimum pulse width: a comparison result must persist this long before
  /// the output follows it, so shorter pulses are swallowed and longer ones
  /// pass delayed with their width kept. 0 disables the limit.
  double min_pulse_s = 0.0;

  /// Throws ValidationError naming the offending fields.
  void validate() const;
};

/// Running-average time constant of 16 bit periods.
double default_tau(double bitrate_bps);

/// Streaming comparator against an RC running average of its own input.
///
/// The comparator is an integrator s in [-1, 1] driven by the overdrive
/// (input minus average, shifted by the hysteresis band); its decision is 1
/// while s > 0, 0 while s < 0, and holds on s == 0. The output follows the
/// decision once the raw comparison agrees with it and has held for the
/// minimum pulse width. With no overdrive delay and no pulse limit this
/// reduces to the plain comparison.
class Thresholder {
 public:
  Thresholder(const ThresholderConfig& cfg, double sample_rate_hz);

  /// The running average starts settled on the mean of the first block (up
  /// to one time constant of it); after that the split into blocks does not
  /// change the output.
  void process(std::span<const double> analog, std::span<Bit> digital);

 private:
  Bit compare(double x);

  double avg_alpha_;
  std::size_t warmup_samples_;
  double hysteresis_;
  double step_per_volt_;  // 0 when the comparator is ideal
  double min_pulse_samples_;
  double offset_ = 0.0;  // first input sample; all arithmetic is relative to it
  double avg_ = 0.0;
  double state_ = -1.0;
  Bit decision_ = 0;
  Bit level_ = 0;
  Bit side_ = 0;
  double last_d_ = 0.0;
  double samples_since_cross_ = 0.0;
  bool primed_ = false;
  std::vector<Bit> delay_line_;
  std::size_t delay_pos_ = 0;
};

/// Digitizes a whole waveform.
DigitalWaveform threshold(const Waveform& analog, const ThresholderConfig& cfg);

}  // namespace vlcsim
