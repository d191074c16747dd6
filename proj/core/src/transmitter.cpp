#include "vlcsim/transmitter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vlcsim/errors.hpp"
#include "vlcsim/random.hpp"

namespace vlcsim {

void TxConfig::validate() const {
  std::vector<std::string> bad;
  if (!(bitrate_bps > 0.0) || !std::isfinite(bitrate_bps)) bad.emplace_back("bitrate_bps");
  if (!(on_lux > 0.0) || !std::isfinite(on_lux)) bad.emplace_back("on_lux");
  if (!(off_lux >= 0.0) || !(off_lux < on_lux)) bad.emplace_back("off_lux");
  if (uart_stop_bits != 1 && uart_stop_bits != 2) bad.emplace_back("uart_stop_bits");
  if (!bad.empty()) throw ValidationError(std::move(bad));
}

const BitStream& default_preamble() {
  static const BitStream preamble = [] {
    const Byte aa[] = {0xAA};
    return bits_from_bytes(aa);
  }();
  return preamble;
}

std::size_t samples_per_bit(double bitrate_bps, double sample_rate_hz) {
  if (!(bitrate_bps > 0.0)) throw std::invalid_argument("bitrate must be positive");
  if (sample_rate_hz < 2.0 * bitrate_bps) {
    throw std::invalid_argument("sample rate " + std::to_string(sample_rate_hz) +
                                " Hz is below twice the bitrate " + std::to_string(bitrate_bps));
  }
  return static_cast<std::size_t>(std::lround(sample_rate_hz / bitrate_bps));
}

void ook_modulate_into(std::span<const Bit> bits, const TxConfig& cfg, std::size_t spb,
                       std::span<double> out) {
  if (out.size() != bits.size() * spb) {
    throw std::invalid_argument("ook_modulate_into: output span has the wrong length");
  }
  std::size_t k = 0;
  for (Bit b : bits) {
    const double level = b ? cfg.on_lux : cfg.off_lux;
    for (std::size_t j = 0; j < spb; ++j) out[k++] = level;
  }
}

Waveform ook_modulate(const BitStream& bits, const TxConfig& cfg, double sample_rate_hz) {
  const std::size_t spb = samples_per_bit(cfg.bitrate_bps, sample_rate_hz);
  std::vector<double> samples(bits.size() * spb);
  ook_modulate_into(bits.bits(), cfg, spb, samples);
  return Waveform(std::move(samples), sample_rate_hz);
}

std::size_t uart_frame_bits(const TxConfig& cfg) {
  return 1 + 8 + (cfg.uart_parity == Parity::None ? 0 : 1) +
         static_cast<std::size_t>(cfg.uart_stop_bits);
}

BitStream uart_encode(std::span<const Byte> bytes, const TxConfig& cfg) {
  std::vector<Bit> line;
  line.reserve(bytes.size() * uart_frame_bits(cfg));
  for (Byte byte : bytes) {
    line.push_back(0);
    int ones = 0;
    for (int i = 0; i < 8; ++i) {
      const Bit b = static_cast<Bit>((byte >> i) & 1U);
      ones += b;
      line.push_back(b);
    }
    if (cfg.uart_parity == Parity::Even) line.push_back(static_cast<Bit>(ones % 2));
    if (cfg.uart_parity == Parity::Odd) line.push_back(static_cast<Bit>(1 - ones % 2));
    for (int s = 0; s < cfg.uart_stop_bits; ++s) line.push_back(1);
  }
  return BitStream(std::move(line));
}

BitStream packet_line_bits(const Packet& packet, const TxConfig& cfg) {
  if (cfg.framing == Framing::Uart) return uart_encode(packet.payload, cfg);
  std::vector<Bit> line(packet.preamble.bits().begin(), packet.preamble.bits().end());
  const auto payload = bits_from_bytes(packet.payload);
  line.insert(line.end(), payload.bits().begin(), payload.bits().end());
  return BitStream(std::move(line));
}

std::vector<Packet> build_test_payload(std::uint64_t seed, int n_packets, int packet_len) {
  if (n_packets <= 0) throw std::invalid_argument("n_packets must be positive");
  if (packet_len <= 0) throw std::invalid_argument("packet_len must be positive");
  Rng rng(derive_seed(seed, {0x7061796CULL}));
  std::vector<Packet> packets(static_cast<std::size_t>(n_packets));
  for (auto& p : packets) {
    p.preamble = default_preamble();
    p.payload.resize(static_cast<std::size_t>(packet_len));
    for (auto& b : p.payload) b = static_cast<Byte>(rng.next_u64() >> 56);
  }
  return packets;
}

}  // namespace vlcsim
