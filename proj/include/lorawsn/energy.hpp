#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "lorawsn/phy.hpp"

namespace lorawsn::energy {

enum class PowerState : std::uint8_t { sleep, run, tx, rx };

inline constexpr std::array<PowerState, 4> kPowerStates{PowerState::sleep, PowerState::run,
                                                        PowerState::tx, PowerState::rx};

std::string_view to_string(PowerState state);

struct EnergyProfile {
  double sleep_ua = 4.0;
  double mcu_run_ma = 8.25;
  double analog_ma = 2.0;  // active while sensing
  double tx_ma = 76.0;
  double rx_ma = 11.0;
  double supply_v = 3.0;

  // Run covers MCU plus analog front end (the sensing phase).
  double current_ma(PowerState state) const;
};

void validate(const EnergyProfile& profile);

struct Segment {
  PowerState state;
  double duration_s;
};

using CycleTrace = std::vector<Segment>;

// Durations that make up one nominal Class A reporting cycle.
struct CycleTiming {
  double period_s = 30.0;
  double sense_s = 0.050;
  double airtime_s = 0.056576;
  double rx_window_s = 0.030;
  int rx_windows = 2;
};

// Run, Tx, rx_windows x Rx, then Sleep for the remainder of the period.
CycleTrace nominal_cycle(const CycleTiming& timing);

// Nominal cycle for a radio configuration using the 21-byte uplink airtime.
CycleTiming default_timing(const phy::RadioParams& radio, double period_s = 30.0);

double trace_duration_s(const CycleTrace& trace);

// Sum of current x duration, in mA*s.
double cycle_charge_mas(const EnergyProfile& profile, const CycleTrace& trace);

// Average over the trace duration, in uA.
double average_current_ua(const EnergyProfile& profile, const CycleTrace& trace);

// battery_mah * derating * 1000 / avg_ua / 24, in days.
double lifetime_days(double battery_mah, double avg_current_ua, double derating = 1.0);

// Reported battery voltage: linear 4.2 V -> 3.0 V with consumed charge fraction.
std::uint16_t battery_voltage_mv(double consumed_mas, double battery_mah);

// Per-state time and charge accumulator for a simulated node.
class ChargeMeter {
 public:
  explicit ChargeMeter(const EnergyProfile& profile, std::int64_t start_us = 0)
      : profile_(profile), since_us_(start_us) {}

  // Closes the current segment at `at_us` and opens one in `state`.
  void switch_to(PowerState state, std::int64_t at_us);
  void close(std::int64_t at_us) { switch_to(state_, at_us); }

  PowerState state() const { return state_; }
  std::int64_t since_us() const { return since_us_; }
  double seconds_in(PowerState state) const { return static_cast<double>(time_us_[index(state)]) * 1e-6; }
  std::int64_t micros_in(PowerState state) const { return time_us_[index(state)]; }
  double charge_mas() const;
  double total_seconds() const;

 private:
  static std::size_t index(PowerState s) { return static_cast<std::size_t>(s); }

  EnergyProfile profile_;
  PowerState state_ = PowerState::sleep;
  std::int64_t since_us_;
  std::array<std::int64_t, 4> time_us_{};
};

}  // namespace lorawsn::energy
