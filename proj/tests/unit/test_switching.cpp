#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vlcsim/link.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/switching.hpp"

using namespace vlcsim;

TEST_SUITE("switching") {

TEST_CASE("receiver selection") {
  const auto table = operating_table();
  const auto power = power_model(default_params());
  SwitchPolicy throughput;
  SwitchPolicy energy;
  energy.goal = SwitchGoal::Energy;
  CHECK(select_receiver(12.0, 100e3, throughput, table, power) == ReceiverKind::HighGain);
  CHECK(select_receiver(1500.0, 100e3, throughput, table, power) == ReceiverKind::LowGain);
  CHECK(select_receiver(400.0, 10e3, energy, table, power) == ReceiverKind::UltraLowPower);
  // Nothing decodes 100 kbps at 1 lx.
  CHECK_FALSE(select_receiver(1.0, 100e3, throughput, table, power).has_value());
}

TEST_CASE("ultra-low-power draw and energy per bit") {
  const auto power = power_model(default_params());
  const double watts = kUltraLowPowerSupplyV * kUltraLowPowerCurrentA;
  CHECK(watts == doctest::Approx(0.528e-6).epsilon(1e-12));
  CHECK(power.ultra_low_power_w == watts);
  for (double rate : {10e3, 30e3, 60e3}) {
    CHECK(energy_per_bit(ReceiverKind::UltraLowPower, rate, power) == watts / rate);
  }
  // 0.5 uW over 60 kbps.
  PowerModel half{0.5e-6, 25e-3};
  CHECK(energy_per_bit(ReceiverKind::UltraLowPower, 60e3, half) == doctest::Approx(8.333e-12).epsilon(1e-3));
  CHECK(energy_per_bit(ReceiverKind::HighGain, 200e3, power) ==
        doctest::Approx(energy_per_bit(ReceiverKind::HighGain, 100e3, power) / 2));
  CHECK_THROWS_AS(energy_per_bit(ReceiverKind::LowGain, 0.0, power), std::domain_error);
}

TEST_CASE("steady light under the energy goal never switches") {
  LinkSetup s;
  s.receiver.reset();
  s.policy.goal = SwitchGoal::Energy;
  s.policy.sample_interval_s = 0.25;
  s.tx.bitrate_bps = 10e3;
  s.tx.on_lux = 50.0;
  s.duration_s = 3.0;
  const auto m = run_link(s);
  CHECK(m.switch_events.empty());
  CHECK(m.ber <= kTargetBer);
}

TEST_CASE("one light step causes one switch after the power-on latency") {
  LinkSetup s;
  s.receiver.reset();
  s.tx.bitrate_bps = 100e3;
  s.tx.on_lux = 1500.0;
  s.channel.attenuation = LuxTrace({{0.0, 3.0 / 1500.0}, {0.5, 1.0}});
  s.duration_s = 1.0;
  const auto m = run_link(s);
  REQUIRE(m.switch_events.size() == 1);
  const auto& e = m.switch_events.front();
  CHECK(e.from == ReceiverKind::HighGain);
  CHECK(e.to == ReceiverKind::LowGain);
  CHECK(e.time_s >= 0.5);
  CHECK(e.time_s <= 0.5 + 1e-3 + 1e-9);
  CHECK(e.latency_s == doctest::Approx(60e-6).epsilon(0.01));
}

TEST_CASE("switch event csv") {
  std::ostringstream out;
  const SwitchEvent ev[] = {{1.5, std::nullopt, ReceiverKind::LowGain, 6e-5}};
  write_switch_events_csv(out, ev);
  CHECK(out.str() == "time_s,from,to,latency_s\n1.5,none,low_gain,6e-05\n");
}

}
