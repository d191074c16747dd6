#include "vlcsim/switching.hpp"

#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

void SwitchPolicy::validate() const {
  std::vector<std::string> bad;
  if (!(sample_interval_s > 0.0)) bad.emplace_back("sample_interval_s");
  if (!(hysteresis_lux >= 0.0)) bad.emplace_back("hysteresis_lux");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

std::optional<ReceiverKind> select_receiver(double lux, double target_bitrate_bps,
                                            const SwitchPolicy& policy,
                                            std::span<const OperatingRange> table,
                                            const PowerModel& power) {
  std::optional<ReceiverKind> best;
  double best_rate = 0.0;
  double best_power = std::numeric_limits<double>::infinity();
  const double margin = policy.hysteresis_lux;
  for (const auto& range : table) {
    if (range.saturation_lux && lux > *range.saturation_lux - margin) continue;
    const double rate = range.supported_bps(lux - margin);
    if (rate <= 0.0 || rate < target_bitrate_bps) continue;
    const double p = power.power_w(range.receiver);
    bool better;
    if (!best) {
      better = true;
    } else if (policy.goal == SwitchGoal::Throughput) {
      better = rate > best_rate || (rate == best_rate && p < best_power);
    } else {
      better = p < best_power || (p == best_power && rate > best_rate);
    }
    if (better) {
      best = range.receiver;
      best_rate = rate;
      best_power = p;
    }
  }
  return best;
}

double energy_per_bit(ReceiverKind receiver, double throughput_bps, const PowerModel& power) {
  if (!(throughput_bps > 0.0)) {
    throw std::domain_error("energy per bit is undefined at zero throughput");
  }
  return power.power_w(receiver) / throughput_bps;
}

void write_switch_events_csv(std::ostream& out, std::span<const SwitchEvent> events) {
  const auto name = [](const std::optional<ReceiverKind>& k) {
    return k ? std::string(to_string(*k)) : std::string("none");
  };
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << "time_s,from,to,latency_s\n" << std::setprecision(12);
  for (const auto& e : events) {
    out << e.time_s << ',' << name(e.from) << ',' << name(e.to) << ',' << e.latency_s << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace vlcsim
