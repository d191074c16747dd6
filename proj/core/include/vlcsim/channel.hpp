#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vlcsim/signal.hpp"

namespace vlcsim {

/// Ambient light presets used throughout the evaluation.
inline constexpr double kDarknessLux = 0.0;
inline constexpr double kIndoorLux = 210.0;
inline constexpr double kNaturalLux = 350.0;

struct Flicker {
  double freq_hz = 50.0;
  double depth = 0.0;  // fraction of the ambient level
};

struct ChannelConfig {
  double ambient_lux = 0.0;
  /// Multiplicative attenuation of the transmitted component, values in [0, 1].
  std::optional<LuxTrace> attenuation;
  std::optional<Flicker> flicker;

  /// Throws ValidationError naming the offending fields.
  void validate() const;
};

/// Converts a trace of target incident (ON-level) lux into an attenuation
/// trace relative to the transmitter's on_lux. Levels above on_lux clamp to 1.
LuxTrace attenuation_from_incident(const LuxTrace& incident_lux, double on_lux);

/// out(t) = tx(t) * attenuation(t) + ambient (+ flicker). No noise.
Waveform apply_channel(const Waveform& tx, const ChannelConfig& cfg);

/// Streaming form: `tx` holds samples starting at absolute time t0_s.
class ChannelStream {
 public:
  ChannelStream(const ChannelConfig& cfg, double sample_rate_hz);

  void process(std::span<const double> tx, double t0_s, std::span<double> out);
  /// Attenuation in effect at time t (1 without a trace).
  double attenuation_at(double time_s) const;

 private:
  const ChannelConfig* cfg_;
  double dt_;
  std::optional<LuxTrace::Cursor> cursor_;
};

struct SnrPoint {
  double time_s;  // window start
  double snr_db;
};

struct SnrTrace {
  std::vector<SnrPoint> points;
};

/// Sentinel reported for a window with zero swing.
inline constexpr double kSnrFloorDb = -1.7976931348623157e308;

/// SNR in dB of the peak-to-peak swing in a window against the swing of a
/// noise-floor signal: 20*log10(swing / noise_floor_lux).
double snr_db(double swing, double noise_floor_lux);

/// Per-window SNR of a lux-domain waveform.
SnrTrace snr_trace(const Waveform& received, double window_s, double noise_floor_lux);

/// Streaming peak-to-peak tracker backing snr_trace.
class SnrAccumulator {
 public:
  SnrAccumulator(double window_s, double noise_floor_lux);

  void add(double time_s, double lux);
  void add_block(double t0_s, double dt_s, std::span<const double> lux);
  SnrTrace finish() const;

 private:
  double window_s_;
  double floor_;
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Alternating lo/hi segments of equal length with `n_transitions` level
/// changes over `total_s`, starting at `lo_lux`. Zero-order hold.
LuxTrace make_square_trace(double lo_lux, double hi_lux, int n_transitions, double total_s);

}  // namespace vlcsim
