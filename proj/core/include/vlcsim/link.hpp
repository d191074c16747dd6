#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vlcsim/channel.hpp"
#include "vlcsim/frontends.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/signal.hpp"
#include "vlcsim/switching.hpp"
#include "vlcsim/thresholder.hpp"
#include "vlcsim/transmitter.hpp"

namespace vlcsim {

/// Front-end followed by its thresholder, processed in blocks.
class ReceiverChain {
 public:
  ReceiverChain(const ReceiverParams& params, double bitrate_bps, double sample_rate_hz,
                std::uint64_t noise_seed, bool cold_start = false);

  void process(std::span<const double> lux, std::span<Bit> digital);

 private:
  std::variant<SolarCellFrontEnd, TiaFrontEnd> front_end_;
  Thresholder thresholder_;
  std::vector<double> volts_;
};

/// Everything needed to simulate one link.
struct LinkSetup {
  TxConfig tx;
  ChannelConfig channel;
  /// Fixed receiver, or none for the switched link.
  std::optional<ReceiverKind> receiver = ReceiverKind::HighGain;
  SwitchPolicy policy;
  ModelParams params = default_params();
  int samples_per_bit = 16;
  std::uint64_t seed = 1;
  int rounds = 3;
  int packets_per_round = 50;
  int packet_len = 256;
  /// When set, a single continuous stream of packets covering this duration
  /// replaces the rounds.
  std::optional<double> duration_s;
  double ber_window_s = 0.25;
  double snr_window_s = 0.1;
  double snr_noise_floor_lux = 25.0;
  /// Offset of the light sampler's tick grid, in seconds.
  double sampler_phase_s = 0.0;
  /// Stop as soon as the error count exceeds this many bits.
  std::optional<std::size_t> error_budget;
  /// Skip the windowed BER and SNR series.
  bool summary_only = false;
  /// Called for every scored payload bit in time order with the receiver
  /// whose output was sampled (none while the link was down).
  std::function<void(double centre_time_s, bool error, std::optional<ReceiverKind> source)>
      on_payload_bit;

  double sample_rate_hz() const { return tx.bitrate_bps * samples_per_bit; }
  /// Throws ValidationError naming every offending key.
  void validate() const;
};

struct LinkMetrics {
  double ber = 0.0;
  std::size_t bit_errors = 0;
  std::size_t payload_bits = 0;
  std::size_t packets_lost = 0;    // raw OOK: preamble not found
  std::size_t framing_errors = 0;  // UART: frames failing a check
  std::vector<WindowPoint> windowed_ber;
  SnrTrace snr;
  double duration_s = 0.0;
  double throughput_bps = 0.0;  // correct payload bits per second
  double payload_efficiency = 0.0;  // payload bits per line bit
  double energy_j = 0.0;            // receivers only
  double sampler_energy_j = 0.0;
  double energy_per_bit_j = 0.0;  // +inf when nothing was delivered
  std::vector<SwitchEvent> switch_events;
  bool aborted = false;
};

/// Simulates the link described by `setup`, fixed or switched.
LinkMetrics run_link(const LinkSetup& setup);

/// Switched link; `setup.receiver` is ignored.
LinkMetrics run_switched_link(const LinkSetup& setup);

PowerModel power_model(const ModelParams& params);

/// Target bitrates 1 kbps * 1.15^n up to 3 Mbps.
std::vector<double> rate_grid(double lowest_bps = 1e3, double highest_bps = 3e6, double step = 1.15);

/// BER threshold defining a usable link.
inline constexpr double kTargetBer = 1e-3;

/// Largest rate in `rates` (ascending) whose full-protocol BER on `receiver`
/// is at most kTargetBer; 0 when none passes. Rates above the MCU cap fail on
/// the UART path.
double achievable_throughput(const LinkSetup& scenario, ReceiverKind receiver,
                             std::span<const double> rates);

/// Whether `receiver` decodes `bitrate_bps` at kTargetBer under `scenario`.
bool link_passes(const LinkSetup& scenario, ReceiverKind receiver, double bitrate_bps);

/// Smallest ON-level lux (darkness) at which the receiver decodes the bitrate
/// at kTargetBer, by bisection in log-lux. Returns +inf when even the
/// saturation limit fails. Throws std::invalid_argument when the bitrate is
/// above twice the front-end bandwidth.
double min_operating_lux(const ReceiverParams& receiver, double bitrate_bps,
                         const LinkSetup& base);

/// Time from a light step to the first bit of a run of 16 correct bits
/// decoded after the step on the receiver selected for the new level.
/// `setup` must describe a switched link over a trace with one step at
/// `step_time_s`. Returns +inf when the link never recovers.
double response_time(const LinkSetup& setup, double step_time_s);

}  // namespace vlcsim
