#include <doctest.h>

#include <cmath>
#include <vector>

#include "vlcsim/channel.hpp"
#include "vlcsim/errors.hpp"
#include "vlcsim/transmitter.hpp"

using namespace vlcsim;

namespace {

Waveform square_lux(double lo, double hi, std::size_t half_period, std::size_t n, double fs) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i / half_period) % 2 ? lo : hi;
  return Waveform(v, fs);
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("darkness with full transmission is the identity") {
  const auto tx = square_lux(0.0, 100.0, 8, 256, 1e5);
  const auto rx = apply_channel(tx, ChannelConfig{});
  for (std::size_t i = 0; i < tx.size(); ++i) CHECK(rx[i] == tx[i]);
}

TEST_CASE("ambient adds a DC offset") {
  ChannelConfig cfg;
  cfg.ambient_lux = 210.0;
  const auto dark_tx = apply_channel(Waveform(std::vector<double>(64, 0.0), 1e5), cfg);
  for (double v : dark_tx.samples()) CHECK(v == 210.0);

  cfg.ambient_lux = 350.0;
  const auto tx = square_lux(0.0, 100.0, 8, 256, 1e5);
  const auto rx = apply_channel(tx, cfg);
  for (std::size_t i = 0; i < tx.size(); ++i) CHECK(rx[i] == tx[i] + 350.0);
}

TEST_CASE("attenuation scales only the transmitted component") {
  ChannelConfig cfg;
  cfg.ambient_lux = 10.0;
  cfg.attenuation = LuxTrace({{0.0, 0.5}});
  const auto rx = apply_channel(square_lux(0.0, 100.0, 8, 64, 1e5), cfg);
  CHECK(rx[0] == doctest::Approx(60.0));
  CHECK(rx[8] == doctest::Approx(10.0));
}

TEST_CASE("flicker stays within its depth") {
  ChannelConfig cfg;
  cfg.ambient_lux = 200.0;
  cfg.flicker = Flicker{100.0, 0.1};
  const auto rx = apply_channel(Waveform(std::vector<double>(10000, 0.0), 1e5), cfg);
  double lo = 1e9, hi = -1e9;
  for (double v : rx.samples()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 180.0 - 1e-9);
  CHECK(hi <= 220.0 + 1e-9);
  CHECK(hi - lo > 30.0);
}

TEST_CASE("channel validation names keys") {
  ChannelConfig cfg;
  cfg.ambient_lux = -1.0;
  cfg.attenuation = LuxTrace({{0.0, 2.0}});
  try {
    cfg.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.keys().size() == 2);
  }
}

TEST_CASE("snr definition") {
  CHECK(snr_db(25.0, 25.0) == 0.0);
  CHECK(snr_db(250.0, 25.0) == doctest::Approx(20.0));
  CHECK(snr_db(0.0, 25.0) == kSnrFloorDb);
}

TEST_CASE("snr goes negative exactly when the incident swing drops below the floor") {
  // Incident ON level walks through the floor; OFF is dark.
  const double fs = 1e5;
  const double window = 0.01;
  const double levels[] = {100.0, 40.0, 26.0, 24.0, 10.0, 3.0, 30.0};
  std::vector<double> v;
  for (double on : levels) {
    for (int i = 0; i < 1000; ++i) v.push_back((i / 10) % 2 ? 0.0 : on);
  }
  const auto trace = snr_trace(Waveform(v, fs), window, 25.0);
  REQUIRE(trace.points.size() == std::size(levels));
  for (std::size_t i = 0; i < std::size(levels); ++i) {
    CHECK((trace.points[i].snr_db < 0.0) == (levels[i] < 25.0));
  }
}

TEST_CASE("square traces") {
  const auto t = make_square_trace(3.0, 1500.0, 12, 27.0);
  const auto pts = t.points();
  // 13 segment starts plus a closing point at the end of the trace.
  REQUIRE(pts.size() == 14);
  for (std::size_t i = 0; i < 13; ++i) {
    CHECK(pts[i].time_s == doctest::Approx(27.0 / 13.0 * static_cast<double>(i)));
    CHECK(pts[i].lux == (i % 2 ? 1500.0 : 3.0));
  }
  CHECK(pts[13].time_s == 27.0);
  CHECK(pts[13].lux == pts[12].lux);
  const auto step = make_square_trace(1.0, 2.0, 1, 2.0);
  CHECK(step.lux_at(0.999) == 1.0);
  CHECK(step.lux_at(1.0) == 2.0);
  CHECK(step.lux_at(1.999) == 2.0);
  // 6 <-> 800 lx every 8 s.
  const auto mob = make_square_trace(6.0, 800.0, 6, 56.0);
  CHECK(mob.points()[1].time_s == doctest::Approx(8.0));
  CHECK(mob.lux_at(12.0) == 800.0);
}

TEST_CASE("incident trace becomes attenuation") {
  const auto a = attenuation_from_incident(LuxTrace({{0.0, 3.0}, {1.0, 1500.0}, {2.0, 3000.0}}), 1500.0);
  CHECK(a.lux_at(0.0) == doctest::Approx(0.002));
  CHECK(a.lux_at(1.0) == 1.0);
  CHECK(a.lux_at(2.0) == 1.0);
}

}
