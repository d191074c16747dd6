#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlcsim/signal.hpp"

namespace vlcsim {

enum class Framing { RawOok, Uart };
enum class Parity { None, Even, Odd };

struct TxConfig {
  double bitrate_bps = 100e3;
  double on_lux = 100.0;   // incident lux at the receiver while the LED is on
  double off_lux = 0.0;    // incident lux while the LED is off
  Framing framing = Framing::RawOok;
  Parity uart_parity = Parity::None;
  int uart_stop_bits = 1;

  /// Throws ValidationError naming the offending fields.
  void validate() const;
};

/// One 0xAA byte ahead of every raw-OOK packet.
const BitStream& default_preamble();

/// Samples per bit at the given sample rate: round(sample_rate / bitrate).
std::size_t samples_per_bit(double bitrate_bps, double sample_rate_hz);

/// Rectangular OOK: bit 1 -> on_lux, bit 0 -> off_lux for samples_per_bit
/// samples each. Throws std::invalid_argument when the sample rate is below
/// twice the bitrate.
Waveform ook_modulate(const BitStream& bits, const TxConfig& cfg, double sample_rate_hz);

/// Writes the modulated samples for `bits` into `out` (which must hold
/// bits.size() * samples_per_bit samples). Used by the streaming link runner.
void ook_modulate_into(std::span<const Bit> bits, const TxConfig& cfg, std::size_t spb,
                       std::span<double> out);

/// UART line bits: start (0), 8 data bits LSB first, optional parity, stop
/// bits (1). Frames are concatenated with no idle time between them.
BitStream uart_encode(std::span<const Byte> bytes, const TxConfig& cfg);

/// Line bits per UART frame for the given configuration.
std::size_t uart_frame_bits(const TxConfig& cfg);

/// Bits on the wire for one packet: preamble + payload (raw OOK) or UART frames.
BitStream packet_line_bits(const Packet& packet, const TxConfig& cfg);

/// Pseudo-random payloads reproducible from `seed`.
std::vector<Packet> build_test_payload(std::uint64_t seed, int n_packets = 50,
                                       int packet_len = 256);

}  // namespace vlcsim
