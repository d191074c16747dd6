#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vlcsim/dsp.hpp"
#include "vlcsim/random.hpp"
#include "vlcsim/signal.hpp"

namespace vlcsim {

enum class ReceiverKind { UltraLowPower, HighGain, LowGain };

inline constexpr ReceiverKind kAllReceivers[] = {ReceiverKind::UltraLowPower,
                                                 ReceiverKind::HighGain, ReceiverKind::LowGain};

std::string_view to_string(ReceiverKind kind);
/// Accepts "ultra_low_power", "high_gain", "low_gain" (and "ulp", "hg", "lg").
std::optional<ReceiverKind> parse_receiver_kind(std::string_view text);

/// Solar cell used directly as the light sensor: first-order low-pass from the
/// cell capacitance, no amplifier.
struct SolarCellModel {
  double cutoff_hz = 10e3;
  double responsivity_v_per_lux = 1e-3;
  double noise_floor_lux = 25.0;
  /// Output noise sigma as a fraction of the DC swing at noise_floor_lux.
  double noise_ratio = 0.1;

  double noise_sigma_v() const { return noise_ratio * responsivity_v_per_lux * noise_floor_lux; }
  void validate() const;
};

/// Photodiode + transimpedance amplifier. The feedback resistor sets the gain
/// and, through the fixed gain-bandwidth product, the bandwidth.
struct TiaModel {
  static constexpr double kReferenceGainOhm = 1e3;

  double rf_ohm = 754e3;
  double gbp_hz = 200e6;  // bandwidth the amplifier would have at kReferenceGainOhm
  double supply_v = 3.3;
  double responsivity_a_per_lux = 2e-8;
  double noise_sigma_v = 0.0;
  /// Time the output stays pinned at the rail per unit of relative overdrive
  /// after the input falls back below the rail.
  double overdrive_recovery_s = 0.0;

  double bandwidth_hz() const { return gbp_hz * kReferenceGainOhm / rf_ohm; }
  double volts_per_lux() const { return rf_ohm * responsivity_a_per_lux; }
  /// Incident lux at which the ideal output reaches the supply rail.
  double saturation_lux() const { return supply_v / volts_per_lux(); }
  void validate() const;
};

/// Streaming solar-cell response.
class SolarCellFrontEnd {
 public:
  SolarCellFrontEnd(const SolarCellModel& model, double sample_rate_hz, std::uint64_t noise_seed);
  void process(std::span<const double> lux, std::span<double> volts);

 private:
  double responsivity_;
  double sigma_;
  OnePoleLowPass lpf_;
  Rng rng_;
  bool primed_ = false;
};

/// Streaming TIA response: gain, rail clipping with overdrive recovery,
/// first-order band limit, additive noise.
class TiaFrontEnd {
 public:
  /// A cold start begins from an unpowered (0 V) output instead of the
  /// steady state of the first input sample.
  TiaFrontEnd(const TiaModel& model, double sample_rate_hz, std::uint64_t noise_seed,
              bool cold_start = false);
  void process(std::span<const double> lux, std::span<double> volts);

 private:
  double gain_;
  double supply_;
  double sigma_;
  double recovery_samples_per_overdrive_;
  OnePoleLowPass lpf_;
  Rng rng_;
  double pinned_samples_left_ = 0.0;
  bool primed_;
};

/// Lux-domain waveform in, solar-cell voltage out.
Waveform solar_cell_respond(const Waveform& in, const SolarCellModel& model,
                            std::uint64_t noise_seed);

/// Lux-domain waveform in, TIA output voltage out.
Waveform tia_respond(const Waveform& in, const TiaModel& model, std::uint64_t noise_seed);

/// One receiver's entry in the sensitivity table: supported rate from a
/// given incident lux upwards, and the lux at which it saturates.
struct OperatingRange {
  struct Entry {
    double lux;
    double max_throughput_bps;
  };
  ReceiverKind receiver;
  std::vector<Entry> entries;  // sorted by lux, throughput nondecreasing
  double min_operating_lux;
  std::optional<double> saturation_lux;

  /// Highest rate supported at `lux`, or 0 below the first entry or above
  /// saturation.
  double supported_bps(double lux) const;
};

/// Measured sensitivity table: the switching logic's knowledge base.
std::vector<OperatingRange> operating_table();

}  // namespace vlcsim
