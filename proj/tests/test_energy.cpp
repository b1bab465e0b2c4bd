#include <doctest.h>

#include "lorawsn/energy.hpp"
#include "lorawsn/error.hpp"

using namespace lorawsn;
using energy::PowerState;

TEST_CASE("default cycle average current") {
  const energy::EnergyProfile p;
  CHECK(p.current_ma(PowerState::run) == doctest::Approx(10.25));
  CHECK(p.current_ma(PowerState::sleep) == doctest::Approx(0.004));

  const energy::CycleTiming t = energy::default_timing(phy::RadioParams{});
  CHECK(t.airtime_s == doctest::Approx(0.056576));
  const auto trace = energy::nominal_cycle(t);
  CHECK(energy::trace_duration_s(trace) == doctest::Approx(30.0));

  const double sleep_s = 30.0 - 0.05 - 0.056576 - 2 * 0.030;
  const double charge = 0.05 * 10.25 + 0.056576 * 76 + 2 * 0.030 * 11 + sleep_s * 0.004;
  CHECK(energy::cycle_charge_mas(p, trace) == doctest::Approx(charge));
  CHECK(energy::average_current_ua(p, trace) == doctest::Approx(charge / 30.0 * 1000.0));
  CHECK(energy::average_current_ua(p, trace) == doctest::Approx(186.39).epsilon(0.001));
}

TEST_CASE("SF12 cycle") {
  phy::RadioParams r;
  r.sf = 12;
  const double ua = energy::average_current_ua(energy::EnergyProfile{}, energy::nominal_cycle(energy::default_timing(r)));
  CHECK(ua / 1000.0 == doctest::Approx(3.77).epsilon(0.02));
}

TEST_CASE("lifetime") {
  CHECK(energy::lifetime_days(1000, 194) == doctest::Approx(214.8).epsilon(0.0005));
  CHECK(energy::lifetime_days(1000, 194, 0.5) == doctest::Approx(214.776 / 2).epsilon(0.0005));
  CHECK_THROWS_AS(energy::lifetime_days(1000, 0), error);
  CHECK_THROWS_AS(energy::lifetime_days(-1, 194), error);
  CHECK_THROWS_AS(energy::lifetime_days(1000, 194, 1.5), error);
}

TEST_CASE("battery voltage") {
  CHECK(energy::battery_voltage_mv(0, 1000) == 4200);
  CHECK(energy::battery_voltage_mv(1000 * 3600.0, 1000) == 3000);
  CHECK(energy::battery_voltage_mv(500 * 3600.0, 1000) == 3600);
  CHECK(energy::battery_voltage_mv(5000 * 3600.0, 1000) == 3000);
}

TEST_CASE("charge meter") {
  energy::ChargeMeter m(energy::EnergyProfile{}, 0);
  m.switch_to(PowerState::run, 1'000'000);
  m.switch_to(PowerState::tx, 1'050'000);
  m.switch_to(PowerState::sleep, 1'100'000);
  m.close(2'000'000);
  CHECK(m.micros_in(PowerState::sleep) == 1'900'000);
  CHECK(m.micros_in(PowerState::run) == 50'000);
  CHECK(m.micros_in(PowerState::tx) == 50'000);
  CHECK(m.total_seconds() == doctest::Approx(2.0));
  CHECK(m.charge_mas() == doctest::Approx(1.9 * 0.004 + 0.05 * 10.25 + 0.05 * 76));
  CHECK_THROWS_AS(m.switch_to(PowerState::run, 1'000'000), error);
}

TEST_CASE("profile validation") {
  energy::EnergyProfile p;
  p.tx_ma = -1;
  CHECK_THROWS_AS(energy::validate(p), error);
  energy::CycleTiming t;
  t.period_s = 0.1;
  CHECK_THROWS_AS(energy::nominal_cycle(t), error);
}
