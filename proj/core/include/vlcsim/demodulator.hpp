#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlcsim/signal.hpp"
#include "vlcsim/transmitter.hpp"

namespace vlcsim {

struct DemodResult {
  BitStream bits;
  std::size_t aligned_at_sample = 0;
  std::size_t framing_errors = 0;  // UART only
  std::vector<Byte> bytes;         // UART only
};

/// Result of a preamble search.
struct PreambleLock {
  std::size_t start_sample;
  std::size_t score;
  std::size_t max_score;
};

/// Correlates the preamble against `levels` for every candidate start in
/// [begin, end). Each preamble bit contributes the number of matching samples
/// in the central half of its cell. Returns the middle of the best-scoring
/// run of candidates, or nothing when the best score is below 75% of a
/// perfect match or the bit centres at that start do not read back the
/// preamble. Candidates whose preamble would run past the buffer are skipped.
std::optional<PreambleLock> find_preamble(std::span<const Bit> levels, std::size_t spb,
                                          std::span<const Bit> preamble, std::size_t begin,
                                          std::size_t end);

/// Reads `out.size()` bits from the cell centres starting at `start`. Cells
/// past the end of `levels` read as 0.
void sample_bit_centres(std::span<const Bit> levels, std::size_t start, std::size_t spb,
                        std::span<Bit> out);

/// Raw-OOK receiver: first rising edge, refined by preamble correlation, then
/// mid-bit sampling of every complete bit after the preamble (or of exactly
/// `payload_bits` bits when given). Throws NoLockError when the preamble is
/// not found.
DemodResult ook_demodulate(const DigitalWaveform& d, double bitrate_bps,
                           const BitStream& preamble,
                           std::optional<std::size_t> payload_bits = std::nullopt);

/// One received UART frame.
struct UartFrame {
  std::size_t start_sample;  // absolute index of the start-bit edge
  Byte byte;
  bool ok;  // start, parity and stop checks all passed
};

/// Streaming UART receiver: waits for a falling edge from idle-high, samples
/// each bit at its centre, checks parity and stop bits.
class UartDecoder {
 public:
  UartDecoder(std::size_t spb, Parity parity, int stop_bits);

  /// `levels` continues the stream; `first_index` is the absolute index of
  /// levels[0]. Completed frames are appended to `frames`.
  void process(std::span<const Bit> levels, std::size_t first_index,
               std::vector<UartFrame>& frames);

 private:
  std::size_t spb_;
  Parity parity_;
  int stop_bits_;
  std::size_t frame_bits_;
  bool in_frame_ = false;
  Bit prev_ = 0;
  bool seen_idle_ = false;
  std::size_t frame_start_ = 0;
  std::size_t bit_index_ = 0;
  std::uint32_t data_ = 0;
  bool ok_ = true;
};

DemodResult uart_decode(const DigitalWaveform& d, double baud_bps, Parity parity, int stop_bits);

}  // namespace vlcsim
