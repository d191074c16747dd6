#include "vlcsim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vlcsim/errors.hpp"

namespace vlcsim {

namespace {

void require_rate(double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw std::invalid_argument("sample_rate_hz must be positive and finite");
  }
}

void require_bits(std::span<const Bit> bits) {
  for (Bit b : bits) {
    if (b > 1) throw std::invalid_argument("bit values must be 0 or 1");
  }
}

}  // namespace

Waveform::Waveform(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  require_rate(sample_rate_hz_);
}

DigitalWaveform::DigitalWaveform(std::vector<Bit> levels, double sample_rate_hz)
    : levels_(std::move(levels)), sample_rate_hz_(sample_rate_hz) {
  require_rate(sample_rate_hz_);
  require_bits(levels_);
}

BitStream::BitStream(std::vector<Bit> bits) : bits_(std::move(bits)) { require_bits(bits_); }

BitStream bits_from_bytes(std::span<const Byte> bytes) {
  std::vector<Bit> bits;
  bits.reserve(bytes.size() * 8);
  for (Byte byte : bytes) {
    for (int shift = 7; shift >= 0; --shift) bits.push_back(static_cast<Bit>((byte >> shift) & 1U));
  }
  return BitStream(std::move(bits));
}

std::vector<Byte> bytes_from_bits(const BitStream& bits) {
  if (bits.size() % 8 != 0) {
    throw std::invalid_argument("bit count " + std::to_string(bits.size()) +
                                " is not a multiple of 8");
  }
  std::vector<Byte> bytes(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bytes[i / 8] = static_cast<Byte>(bytes[i / 8] | (bits[i] << (7 - i % 8)));
  }
  return bytes;
}

std::size_t bit_errors(std::span<const Bit> sent, std::span<const Bit> received) {
  if (sent.size() != received.size()) throw LengthMismatchError(sent.size(), received.size());
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) errors += (sent[i] != received[i]);
  return errors;
}

double ber(const BitStream& sent, const BitStream& received) {
  const std::size_t errors = bit_errors(sent.bits(), received.bits());
  if (sent.empty()) return 0.0;
  return static_cast<double>(errors) / static_cast<double>(sent.size());
}

// ---------------------------------------------------------------------------
// LuxTrace

LuxTrace::LuxTrace(std::vector<LuxPoint> points, Interpolation interpolation)
    : points_(std::move(points)), interpolation_(interpolation) {
  if (points_.empty()) throw std::invalid_argument("lux trace needs at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.time_s) || p.time_s < 0.0) {
      throw std::invalid_argument("lux trace time must be finite and nonnegative");
    }
    if (!std::isfinite(p.lux) || p.lux < 0.0) {
      throw std::invalid_argument("lux trace level must be finite and nonnegative");
    }
    if (i > 0 && !(p.time_s > points_[i - 1].time_s)) {
      throw std::invalid_argument("lux trace times must be strictly increasing");
    }
  }
}

namespace {

double interpolate(const LuxPoint& a, const LuxPoint& b, double t, Interpolation mode) {
  if (mode == Interpolation::Hold) return a.lux;
  const double f = (t - a.time_s) / (b.time_s - a.time_s);
  return a.lux + f * (b.lux - a.lux);
}

}  // namespace

double LuxTrace::lux_at(double time_s) const {
  if (time_s <= points_.front().time_s) return points_.front().lux;
  if (time_s >= points_.back().time_s) return points_.back().lux;
  auto it = std::upper_bound(points_.begin(), points_.end(), time_s,
                             [](double t, const LuxPoint& p) { return t < p.time_s; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return interpolate(a, b, time_s, interpolation_);
}

double LuxTrace::Cursor::lux_at(double time_s) {
  const auto& pts = trace_->points_;
  if (time_s <= pts.front().time_s) return pts.front().lux;
  if (time_s >= pts.back().time_s) return pts.back().lux;
  if (index_ >= pts.size() || pts[index_].time_s > time_s) index_ = 0;
  while (index_ + 1 < pts.size() && pts[index_ + 1].time_s <= time_s) ++index_;
  return interpolate(pts[index_], pts[index_ + 1], time_s, trace_->interpolation_);
}

LuxTrace read_lux_trace_csv(std::istream& in, Interpolation interpolation) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("lux trace CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_s,lux") {
    throw std::invalid_argument("lux trace CSV header must be 'time_s,lux', got '" + line + "'");
  }
  std::vector<LuxPoint> points;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("lux trace CSV row " + std::to_string(row) + " has no comma");
    }
    std::istringstream ts(line.substr(0, comma));
    std::istringstream ls(line.substr(comma + 1));
    ts.imbue(std::locale::classic());
    ls.imbue(std::locale::classic());
    LuxPoint p{};
    if (!(ts >> p.time_s) || !(ls >> p.lux)) {
      throw std::invalid_argument("lux trace CSV row " + std::to_string(row) + " is not numeric");
    }
    points.push_back(p);
  }
  return LuxTrace(std::move(points), interpolation);
}

LuxTrace read_lux_trace_csv(const std::filesystem::path& path, Interpolation interpolation) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open lux trace " + path.string());
  return read_lux_trace_csv(in, interpolation);
}

void write_lux_trace_csv(std::ostream& out, const LuxTrace& trace) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf.precision(std::numeric_limits<double>::max_digits10);
  buf << "time_s,lux\n";
  for (const auto& p : trace.points()) buf << p.time_s << ',' << p.lux << '\n';
  out << buf.str();
}

// ---------------------------------------------------------------------------
// Windows

WindowAccumulator::WindowAccumulator(double window_s) : window_s_(window_s) {
  if (!(window_s > 0.0)) throw std::invalid_argument("window_s must be positive");
}

void WindowAccumulator::add(double time_s, double value) { add_many(time_s, value, 1); }

void WindowAccumulator::add_many(double time_s, double value, std::size_t count) {
  if (count == 0) return;
  const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(time_s / window_s_)));
  if (k >= sums_.size()) {
    sums_.resize(k + 1, 0.0);
    counts_.resize(k + 1, 0);
  }
  sums_[k] += value * static_cast<double>(count);
  counts_[k] += count;
}

std::vector<WindowPoint> WindowAccumulator::finish(double duration_s) const {
  // A trailing fragment shorter than 1e-9 of a window is rounding, not data.
  std::size_t n = static_cast<std::size_t>(std::ceil(duration_s / window_s_ - 1e-9));
  n = std::max<std::size_t>(n, 1);
  n = std::max(n, sums_.size());
  std::vector<WindowPoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    WindowPoint w{};
    w.start_s = static_cast<double>(k) * window_s_;
    w.end_s = std::min(static_cast<double>(k + 1) * window_s_, std::max(duration_s, w.start_s));
    if (n == 1) w.end_s = std::max(duration_s, 0.0);
    w.count = k < counts_.size() ? counts_[k] : 0;
    w.value = w.count ? sums_[k] / static_cast<double>(w.count)
                      : std::numeric_limits<double>::quiet_NaN();
    out.push_back(w);
  }
  return out;
}

std::vector<WindowPoint> windowed_series(std::span<const double> times_s,
                                         std::span<const double> values, double duration_s,
                                         double window_s) {
  if (times_s.size() != values.size()) {
    throw std::invalid_argument("windowed_series: times and values differ in length");
  }
  if (!(window_s > 0.0)) throw std::invalid_argument("window_s must be positive");
  // Longer than the trace: a single window spanning everything.
  const double effective = window_s >= duration_s && duration_s > 0.0
                               ? std::nextafter(duration_s, std::numeric_limits<double>::max())
                               : window_s;
  WindowAccumulator acc(effective);
  for (std::size_t i = 0; i < times_s.size(); ++i) acc.add(times_s[i], values[i]);
  auto out = acc.finish(duration_s);
  if (effective != window_s && !out.empty()) out.resize(1);
  return out;
}

}  // namespace vlcsim
