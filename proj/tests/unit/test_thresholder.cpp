#include <doctest.h>

#include <vector>

#include "vlcsim/params.hpp"
#include "vlcsim/random.hpp"
#include "vlcsim/thresholder.hpp"

using namespace vlcsim;

namespace {

constexpr double kRate = 100e3;
constexpr std::size_t kSpb = 16;
constexpr double kFs = kRate * kSpb;

std::vector<double> square(std::size_t bits, double lo, double hi) {
  std::vector<double> v(bits * kSpb);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i / kSpb) % 2 ? lo : hi;
  return v;
}

std::vector<Bit> run(const ThresholderConfig& cfg, const std::vector<double>& analog) {
  Thresholder th(cfg, kFs);
  std::vector<Bit> out(analog.size());
  th.process(analog, out);
  return out;
}

ThresholderConfig ideal() {
  ThresholderConfig cfg;
  cfg.rc_time_constant_s = default_tau(kRate);
  return cfg;
}

}  // namespace

TEST_SUITE("thresholder") {

TEST_CASE("running average time constant") {
  CHECK(default_tau(10e3) == doctest::Approx(1.6e-3));
  CHECK(default_tau(1e6) == doctest::Approx(16e-6));
  CHECK(default_tau(1e6) < default_tau(500e3));
}

TEST_CASE("symmetric square wave comes out at half duty in phase") {
  const auto in = square(400, 0.0, 1.0);
  const auto out = run(ideal(), in);
  // Past the settling of the average every sample matches its input bit.
  const std::size_t from = 200 * kSpb;
  std::size_t ones = 0;
  for (std::size_t i = from; i < in.size(); ++i) {
    CHECK(out[i] == (in[i] > 0.5));
    ones += out[i];
  }
  CHECK(ones * 2 == in.size() - from);
}

TEST_CASE("constant input holds the initial level") {
  auto cfg = ideal();
  for (double h : {0.0, 0.01}) {
    cfg.hysteresis_v = h;
    const auto out = run(cfg, std::vector<double>(4096, 0.7));
    for (Bit b : out) CHECK(b == out.front());
  }
}

TEST_CASE("slow drift under the signal does not change the output") {
  const auto flat = square(400, 0.0, 1.0);
  auto drift = flat;
  // 0.2 V over 400 bits: far slower than the averaging time constant.
  for (std::size_t i = 0; i < drift.size(); ++i) drift[i] += 0.2 * static_cast<double>(i) / drift.size();
  CHECK(run(ideal(), flat) == run(ideal(), drift));
}

TEST_CASE("a DC offset never changes the output") {
  // Every calibrated comparator, with noise on the input.
  const auto params = default_params();
  Rng rng(11);
  auto in = square(600, 0.05, 0.25);
  for (double& v : in) v += 0.01 * rng.gaussian();
  for (auto k : kAllReceivers) {
    const auto cfg = params.receiver(k).thresholder.for_bitrate(kRate);
    const auto base = run(cfg, in);
    for (double offset : {-1.5, 0.3, 2.0, 1000.0}) {
      auto shifted = in;
      for (double& v : shifted) v += offset;
      CHECK(run(cfg, shifted) == base);
    }
  }
}

TEST_CASE("block size does not matter once the first block covers a time constant") {
  auto cfg = default_params().high_gain.thresholder.for_bitrate(kRate);
  const auto in = square(300, 0.0, 0.2);
  const auto whole = run(cfg, in);
  Thresholder th(cfg, kFs);
  std::vector<Bit> pieces(in.size());
  std::size_t at = 0;
  for (std::size_t n : {300u, 1u, 7u, 100u, 1000u}) {
    th.process(std::span(in).subspan(at, n), std::span(pieces).subspan(at, n));
    at += n;
  }
  th.process(std::span(in).subspan(at), std::span(pieces).subspan(at));
  CHECK(pieces == whole);
}

TEST_CASE("minimum pulse width swallows short glitches and keeps long pulses") {
  auto cfg = ideal();
  cfg.min_pulse_s = 4.0 / kFs;
  std::vector<double> in = square(400, 0.0, 1.0);
  // A two-sample spike in the middle of a low bit.
  const std::size_t low_bit = 301 * kSpb;
  in[low_bit + 6] = in[low_bit + 7] = 1.0;
  const auto out = run(cfg, in);
  // The output trails the input by the pulse width, so the low bit shows up
  // four samples late.
  for (std::size_t i = low_bit + 5; i < low_bit + kSpb + 4; ++i) CHECK(out[i] == 0);
  // Full bits keep their width: 16 ones per high bit past settling.
  std::size_t ones = 0;
  for (std::size_t i = 350 * kSpb; i < 352 * kSpb; ++i) ones += out[i];
  CHECK(ones == kSpb);
}

TEST_CASE("config validation") {
  ThresholderConfig cfg;
  cfg.rc_time_constant_s = 0.0;
  cfg.min_pulse_s = -1.0;
  CHECK_THROWS(cfg.validate());
}

}
