#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "vlcsim/frontends.hpp"

namespace vlcsim {

enum class SwitchGoal { Throughput, Energy };

struct SwitchPolicy {
  SwitchGoal goal = SwitchGoal::Throughput;
  /// Light sampling interval for the energy goal. The throughput goal samples
  /// at the integration unit's maximum rate instead.
  double sample_interval_s = 0.02;
  /// Extra lux margin a receiver must clear at a range boundary before it is
  /// considered covering (and below saturation by). 0 disables it.
  double hysteresis_lux = 0.0;

  void validate() const;
};

struct SwitchEvent {
  double time_s;
  std::optional<ReceiverKind> from;  // none: link was down
  std::optional<ReceiverKind> to;    // none: no receiver qualifies
  double latency_s;
};

/// Receiver power draw used to rank receivers under the energy goal.
struct PowerModel {
  double ultra_low_power_w;
  double high_speed_w;

  double power_w(ReceiverKind kind) const {
    return kind == ReceiverKind::UltraLowPower ? ultra_low_power_w : high_speed_w;
  }
};

/// Matches the receivers' operating ranges against the current light level.
/// Candidates must support `target_bitrate_bps` at `lux` and be unsaturated
/// there. Throughput goal: highest supported rate, ties to lower power.
/// Energy goal: lowest power, ties to higher supported rate.
std::optional<ReceiverKind> select_receiver(double lux, double target_bitrate_bps,
                                            const SwitchPolicy& policy,
                                            std::span<const OperatingRange> table,
                                            const PowerModel& power);

/// Receiver power over delivered throughput. Throws std::domain_error when the
/// throughput is not positive.
double energy_per_bit(ReceiverKind receiver, double throughput_bps, const PowerModel& power);

/// CSV with header `time_s,from,to,latency_s`; a missing receiver is "none".
void write_switch_events_csv(std::ostream& out, std::span<const SwitchEvent> events);

}  // namespace vlcsim
