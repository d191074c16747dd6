#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace vlcsim {

using Byte = std::uint8_t;
using Bit = std::uint8_t;

/// Uniformly sampled real-valued signal. Units depend on the stage: lux at the
/// channel output, volts after a front-end.
class Waveform {
 public:
  Waveform(std::vector<double> samples, double sample_rate_hz);

  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double sample_period_s() const noexcept { return 1.0 / sample_rate_hz_; }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

/// Comparator output: one {0,1} level per analog sample.
class DigitalWaveform {
 public:
  DigitalWaveform(std::vector<Bit> levels, double sample_rate_hz);

  std::span<const Bit> levels() const noexcept { return levels_; }
  Bit operator[](std::size_t i) const { return levels_[i]; }
  std::size_t size() const noexcept { return levels_.size(); }
  bool empty() const noexcept { return levels_.empty(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }

 private:
  std::vector<Bit> levels_;
  double sample_rate_hz_;
};

class BitStream {
 public:
  BitStream() = default;
  explicit BitStream(std::vector<Bit> bits);

  std::span<const Bit> bits() const noexcept { return bits_; }
  Bit operator[](std::size_t i) const { return bits_[i]; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  friend bool operator==(const BitStream&, const BitStream&) = default;

 private:
  std::vector<Bit> bits_;
};

/// MSB-first expansion, 8 bits per byte.
BitStream bits_from_bytes(std::span<const Byte> bytes);

/// Inverse of bits_from_bytes. Throws std::invalid_argument unless the length
/// is a multiple of 8.
std::vector<Byte> bytes_from_bits(const BitStream& bits);

/// Fraction of differing positions. Throws LengthMismatchError when the
/// streams differ in length.
double ber(const BitStream& sent, const BitStream& received);

/// Number of differing positions; same length contract as ber().
std::size_t bit_errors(std::span<const Bit> sent, std::span<const Bit> received);

struct LuxPoint {
  double time_s;
  double lux;
  friend bool operator==(const LuxPoint&, const LuxPoint&) = default;
};

enum class Interpolation { Hold, Linear };

/// Piecewise illuminance over time. Times strictly increase; lux is never
/// negative. Before the first point the first level applies, after the last
/// point the last level applies.
class LuxTrace {
 public:
  explicit LuxTrace(std::vector<LuxPoint> points,
                    Interpolation interpolation = Interpolation::Hold);

  std::span<const LuxPoint> points() const noexcept { return points_; }
  Interpolation interpolation() const noexcept { return interpolation_; }
  double start_time_s() const noexcept { return points_.front().time_s; }
  double end_time_s() const noexcept { return points_.back().time_s; }

  double lux_at(double time_s) const;

  /// Forward-only cursor for sample loops with nondecreasing time.
  class Cursor {
   public:
    explicit Cursor(const LuxTrace& trace) : trace_(&trace) {}
    double lux_at(double time_s);

   private:
    const LuxTrace* trace_;
    std::size_t index_ = 0;
  };

  friend bool operator==(const LuxTrace&, const LuxTrace&) = default;

 private:
  std::vector<LuxPoint> points_;
  Interpolation interpolation_;
};

/// CSV with header `time_s,lux`, one point per row.
LuxTrace read_lux_trace_csv(std::istream& in,
                            Interpolation interpolation = Interpolation::Hold);
LuxTrace read_lux_trace_csv(const std::filesystem::path& path,
                            Interpolation interpolation = Interpolation::Hold);
void write_lux_trace_csv(std::ostream& out, const LuxTrace& trace);

struct Packet {
  std::vector<Byte> payload;
  BitStream preamble;
};

/// One non-overlapping window of a time series.
struct WindowPoint {
  double start_s;
  double end_s;
  double value;       // mean of the values inside; NaN when count == 0
  std::size_t count;
};

/// Streaming form of windowed_series: values arrive in any time order and are
/// binned into [k*window, (k+1)*window).
class WindowAccumulator {
 public:
  explicit WindowAccumulator(double window_s);

  void add(double time_s, double value);
  void add_many(double time_s, double value, std::size_t count);
  std::vector<WindowPoint> finish(double duration_s) const;
  double window_s() const noexcept { return window_s_; }

 private:
  double window_s_;
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
};

/// Bins (time, value) pairs into non-overlapping windows over [0, duration_s).
/// A window longer than the data yields a single window.
std::vector<WindowPoint> windowed_series(std::span<const double> times_s,
                                         std::span<const double> values,
                                         double duration_s, double window_s);

}  // namespace vlcsim
