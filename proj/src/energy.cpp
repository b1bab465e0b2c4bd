#include "lorawsn/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lorawsn/error.hpp"

namespace lorawsn::energy {

std::string_view to_string(PowerState state) {
  switch (state) {
    case PowerState::sleep: return "sleep";
    case PowerState::run: return "run";
    case PowerState::tx: return "tx";
    case PowerState::rx: return "rx";
  }
  return "?";
}

double EnergyProfile::current_ma(PowerState state) const {
  switch (state) {
    case PowerState::sleep: return sleep_ua * 1e-3;
    case PowerState::run: return mcu_run_ma + analog_ma;
    case PowerState::tx: return tx_ma;
    case PowerState::rx: return rx_ma;
  }
  throw error(error_kind::domain, "unknown power state");
}

void validate(const EnergyProfile& p) {
  if (p.sleep_ua < 0 || p.mcu_run_ma < 0 || p.analog_ma < 0 || p.tx_ma < 0 || p.rx_ma < 0)
    throw error(error_kind::parameter, "energy profile currents must be >= 0");
  const double sleep_ma = p.sleep_ua * 1e-3;
  if (!(sleep_ma < p.mcu_run_ma + p.analog_ma && sleep_ma < p.tx_ma && sleep_ma < p.rx_ma))
    throw error(error_kind::parameter, "sleep current must be below every active-state current");
  if (!(p.supply_v > 0)) throw error(error_kind::parameter, "supply voltage must be > 0");
}

CycleTrace nominal_cycle(const CycleTiming& t) {
  const double active = t.sense_s + t.airtime_s + t.rx_windows * t.rx_window_s;
  if (!(active < t.period_s))
    throw error(error_kind::domain, "active time exceeds the reporting period");
  CycleTrace trace;
  trace.push_back({PowerState::run, t.sense_s});
  trace.push_back({PowerState::tx, t.airtime_s});
  for (int i = 0; i < t.rx_windows; ++i) trace.push_back({PowerState::rx, t.rx_window_s});
  trace.push_back({PowerState::sleep, t.period_s - active});
  return trace;
}

CycleTiming default_timing(const phy::RadioParams& radio, double period_s) {
  CycleTiming t;
  t.period_s = period_s;
  t.airtime_s = phy::to_seconds(phy::time_on_air(radio, 21));
  return t;
}

double trace_duration_s(const CycleTrace& trace) {
  return std::accumulate(trace.begin(), trace.end(), 0.0,
                         [](double acc, const Segment& s) { return acc + s.duration_s; });
}

double cycle_charge_mas(const EnergyProfile& profile, const CycleTrace& trace) {
  double charge = 0.0;
  for (const Segment& s : trace) {
    if (!(s.duration_s > 0.0))
      throw error(error_kind::domain, "trace segment durations must be > 0");
    charge += profile.current_ma(s.state) * s.duration_s;
  }
  return charge;
}

double average_current_ua(const EnergyProfile& profile, const CycleTrace& trace) {
  if (trace.empty()) throw error(error_kind::domain, "empty cycle trace");
  return cycle_charge_mas(profile, trace) / trace_duration_s(trace) * 1e3;
}

double lifetime_days(double battery_mah, double avg_current_ua, double derating) {
  if (!(avg_current_ua > 0.0)) throw error(error_kind::domain, "average current must be > 0");
  if (!(derating > 0.0 && derating <= 1.0))
    throw error(error_kind::domain, "derating must be in (0, 1]");
  if (!(battery_mah > 0.0)) throw error(error_kind::domain, "battery capacity must be > 0");
  return battery_mah * derating * 1000.0 / avg_current_ua / 24.0;
}

std::uint16_t battery_voltage_mv(double consumed_mas, double battery_mah) {
  const double fraction = std::clamp(consumed_mas / (battery_mah * 3600.0), 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(4200.0 - 1200.0 * fraction));
}

void ChargeMeter::switch_to(PowerState state, std::int64_t at_us) {
  if (at_us < since_us_) throw error(error_kind::protocol, "charge meter moved backwards in time");
  time_us_[index(state_)] += at_us - since_us_;
  since_us_ = at_us;
  state_ = state;
}

double ChargeMeter::charge_mas() const {
  double charge = 0.0;
  for (PowerState s : kPowerStates) charge += profile_.current_ma(s) * seconds_in(s);
  return charge;
}

double ChargeMeter::total_seconds() const {
  return static_cast<double>(std::accumulate(time_us_.begin(), time_us_.end(), std::int64_t{0})) * 1e-6;
}

}  // namespace lorawsn::energy
