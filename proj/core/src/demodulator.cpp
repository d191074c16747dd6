#include "vlcsim/demodulator.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

std::size_t cell_score(std::span<const Bit> levels, std::size_t from, std::size_t to, Bit want) {
  std::size_t n = 0;
  for (std::size_t i = from; i < to; ++i) n += (levels[i] == want);
  return n;
}

}  // namespace

std::optional<PreambleLock> find_preamble(std::span<const Bit> levels, std::size_t spb,
                                          std::span<const Bit> preamble, std::size_t begin,
                                          std::size_t end) {
  if (spb < 2) throw std::invalid_argument("find_preamble: need at least 2 samples per bit");
  if (preamble.empty()) throw std::invalid_argument("find_preamble: empty preamble");
  const std::size_t lo = spb / 4;
  const std::size_t hi = std::max(lo + 1, (3 * spb) / 4);
  const std::size_t per_cell = hi - lo;
  const std::size_t max_score = per_cell * preamble.size();
  const std::size_t span_len = preamble.size() * spb;
  if (levels.size() < span_len) return std::nullopt;
  end = std::min(end, levels.size() - span_len + 1);

  std::size_t best = 0;
  std::size_t run_start = 0;
  std::size_t run_len = 0;
  bool in_run = false;
  for (std::size_t c = begin; c < end; ++c) {
    std::size_t score = 0;
    for (std::size_t k = 0; k < preamble.size(); ++k) {
      const std::size_t cell = c + k * spb;
      score += cell_score(levels, cell + lo, cell + hi, preamble[k]);
    }
    if (score > best) {
      best = score;
      run_start = c;
      run_len = 1;
      in_run = true;
    } else if (score == best && in_run) {
      ++run_len;
    } else {
      in_run = false;
    }
  }
  if (run_len == 0 || best * 4 < max_score * 3) return std::nullopt;
  const std::size_t start = run_start + (run_len - 1) / 2;
  // The lock must also read the preamble correctly at the bit centres, the
  // way the payload is read.
  for (std::size_t k = 0; k < preamble.size(); ++k) {
    if (levels[start + k * spb + spb / 2] != preamble[k]) return std::nullopt;
  }
  return PreambleLock{start, best, max_score};
}

void sample_bit_centres(std::span<const Bit> levels, std::size_t start, std::size_t spb,
                        std::span<Bit> out) {
  std::size_t pos = start + spb / 2;
  for (auto& b : out) {
    b = pos < levels.size() ? levels[pos] : Bit{0};
    pos += spb;
  }
}

DemodResult ook_demodulate(const DigitalWaveform& d, double bitrate_bps, const BitStream& preamble,
                           std::optional<std::size_t> payload_bits) {
  const std::size_t spb = samples_per_bit(bitrate_bps, d.sample_rate_hz());
  const auto levels = d.levels();
  const auto first = std::find(levels.begin(), levels.end(), Bit{1});
  if (first == levels.end()) throw NoLockError("no rising edge in the digital waveform");
  const auto edge = static_cast<std::size_t>(first - levels.begin());
  const std::size_t begin = edge > spb / 2 ? edge - spb / 2 : 0;
  const auto lock = find_preamble(levels, spb, preamble.bits(), begin, edge + spb / 2 + 1);
  if (!lock) throw NoLockError("preamble not found");

  const std::size_t data_start = lock->start_sample + preamble.size() * spb;
  std::size_t n = 0;
  if (payload_bits) {
    n = *payload_bits;
  } else if (levels.size() > data_start) {
    n = (levels.size() - data_start) / spb;
  }
  std::vector<Bit> bits(n);
  sample_bit_centres(levels, data_start, spb, bits);
  DemodResult r;
  r.bits = BitStream(std::move(bits));
  r.aligned_at_sample = lock->start_sample;
  return r;
}

// ---------------------------------------------------------------------------

UartDecoder::UartDecoder(std::size_t spb, Parity parity, int stop_bits)
    : spb_(spb),
      parity_(parity),
      stop_bits_(stop_bits),
      frame_bits_(1 + 8 + (parity == Parity::None ? 0 : 1) + static_cast<std::size_t>(stop_bits)) {
  if (spb < 2) throw std::invalid_argument("uart: need at least 2 samples per bit");
  if (stop_bits != 1 && stop_bits != 2) throw std::invalid_argument("uart: stop bits must be 1 or 2");
}

void UartDecoder::process(std::span<const Bit> levels, std::size_t first_index,
                          std::vector<UartFrame>& frames) {
  std::size_t i = 0;
  const std::size_t n = levels.size();
  while (i < n) {
    if (!in_frame_) {
      // Hunt for a falling edge, but only after the line has been seen idle.
      for (; i < n; ++i) {
        const Bit b = levels[i];
        if (b) {
          seen_idle_ = true;
        } else if (seen_idle_ && prev_) {
          break;
        }
        prev_ = b;
      }
      if (i == n) return;
      in_frame_ = true;
      frame_start_ = first_index + i;
      bit_index_ = 0;
      data_ = 0;
      ok_ = true;
    }
    // Jump straight to the centre of the next bit.
    const std::size_t centre = frame_start_ + bit_index_ * spb_ + spb_ / 2;
    if (centre >= first_index + n) return;
    i = centre - first_index;
    const Bit b = levels[i];
    if (bit_index_ == 0) {
      if (b != 0) {  // glitch, not a start bit
        in_frame_ = false;
        prev_ = b;
        ++i;
        continue;
      }
    } else if (bit_index_ <= 8) {
      data_ |= static_cast<std::uint32_t>(b) << (bit_index_ - 1);
    } else if (parity_ != Parity::None && bit_index_ == 9) {
      const int ones = std::popcount(data_) + b;
      if ((parity_ == Parity::Even) != (ones % 2 == 0)) ok_ = false;
    } else if (b != 1) {
      ok_ = false;
    }
    ++bit_index_;
    if (bit_index_ == frame_bits_) {
      frames.push_back({frame_start_, static_cast<Byte>(data_), ok_});
      in_frame_ = false;
      prev_ = b;
      seen_idle_ = b == 1;
    }
    ++i;
  }
}

DemodResult uart_decode(const DigitalWaveform& d, double baud_bps, Parity parity, int stop_bits) {
  const std::size_t spb = samples_per_bit(baud_bps, d.sample_rate_hz());
  UartDecoder dec(spb, parity, stop_bits);
  std::vector<UartFrame> frames;
  dec.process(d.levels(), 0, frames);
  DemodResult r;
  for (const auto& f : frames) {
    if (f.ok) {
      r.bytes.push_back(f.byte);
    } else {
      ++r.framing_errors;
    }
  }
  if (!frames.empty()) r.aligned_at_sample = frames.front().start_sample;
  r.bits = bits_from_bytes(r.bytes);
  return r;
}

}  // namespace vlcsim
