#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string_view>
#include <variant>
#include <vector>

#include "lorawsn/codec.hpp"
#include "lorawsn/phy.hpp"
#include "lorawsn/rng.hpp"

namespace lorawsn::mac {

// Simulation time: microseconds since scenario start.
using SimTime = std::chrono::microseconds;

inline SimTime seconds_to_sim(double s) { return SimTime{std::llround(s * 1e6)}; }
inline double sim_to_seconds(SimTime t) { return static_cast<double>(t.count()) * 1e-6; }

struct NodeConfig {
  std::uint32_t dev_addr = 0;
  double period_s = 30.0;
  phy::RadioParams radio;
  bool confirmed = true;
  int max_transmissions = 8;
  double rx1_delay_s = 1.0;
  double rx2_delay_s = 2.0;
  double rx_window_s = 0.030;
  double sense_s = 0.050;
  double distance_m = 60.0;
  double wall_penalty_db = 10.0;
  double battery_mah = 1000.0;
  // First wakeup is uniform in [0, jitter_s).
  double jitter_s = 30.0;
  // Each reporting interval is period_s + U[-dither_s, +dither_s].
  double dither_s = 6.0;
  codec::DeviceKey key{};
};

// Throws config_error with a key path rooted at `prefix`.
void validate(const NodeConfig& config, std::string_view prefix = "node");

class DutyBudget {
 public:
  struct Entry {
    SimTime start;
    SimTime airtime;
  };

  explicit DutyBudget(SimTime window = std::chrono::hours{1}, double max_fraction = 0.01);

  SimTime window() const { return window_; }
  double max_fraction() const { return max_fraction_; }
  SimTime limit() const { return limit_; }
  const std::deque<Entry>& ledger() const { return ledger_; }

  // Earliest t >= now at which a transmission of `airtime` keeps the airtime
  // started within (t - window, t] at or below the limit. Does not record.
  SimTime earliest(SimTime airtime, SimTime now) const;

  // Records a grant. Entries that aged out before `start` are pruned.
  void record(SimTime start, SimTime airtime);

 private:
  SimTime window_;
  double max_fraction_;
  SimTime limit_;
  std::deque<Entry> ledger_;
};

// Earliest permitted start; records the grant in the ledger.
SimTime duty_cycle_gate(DutyBudget& budget, SimTime airtime, SimTime now);

// Linear backoff: U[1, 3] * attempt seconds, 1 <= attempt < max_transmissions.
SimTime retransmission_delay(int attempt, int max_transmissions, Rng& rng);

enum class Phase : std::uint8_t { sleep, sense, transmit, wait_rx1, rx1, wait_rx2, rx2, backoff };

std::string_view to_string(Phase phase);

struct SensorSample {
  std::int16_t temp_centi_c = 0;
  std::uint16_t rh_centi_pct = 0;
  std::uint16_t battery_mv = 0;
};

struct NodeState {
  Phase phase = Phase::sleep;
  std::uint16_t fcnt = 0;
  bool has_frame = false;
  int attempt = 1;
  std::uint32_t conflict_counter = 0;
  DutyBudget duty_budget;
  SimTime next_deadline{0};
  SimTime last_wakeup{0};
  SimTime tx_end{0};
  std::uint64_t measurements = 0;
  std::uint64_t missed_wakeups = 0;
  codec::SensorPayload payload;
  codec::FrameBytes frame{};
};

NodeState initial_state(SimTime first_wakeup);

struct TimerFired {
  SimTime at;
  // Only read on the Sleep -> Sense transition.
  SensorSample sample;
};
struct TxDone {
  SimTime at;
};
struct AckReceived {
  SimTime at;
};
struct WindowEmpty {
  SimTime at;
};

using MacEvent = std::variant<TimerFired, TxDone, AckReceived, WindowEmpty>;

struct StartTx {
  codec::FrameBytes frame;
  std::uint16_t fcnt;
  int attempt;
  int channel;
  SimTime at;
  SimTime airtime;
};
struct OpenRxWindow {
  int window;  // 1 or 2
  SimTime at;
  SimTime duration;
};
struct ScheduleTimer {
  SimTime at;
};
struct GiveUp {
  std::uint16_t fcnt;
  codec::SensorPayload measurement;
};
struct DeliverAckToApp {
  std::uint16_t fcnt;
};

using MacAction = std::variant<StartTx, OpenRxWindow, ScheduleTimer, GiveUp, DeliverAckToApp>;

struct Transition {
  NodeState state;
  std::vector<MacAction> actions;
};

// Class A transition function. Deterministic in (state, config, event, rng
// draws). `channels` is the number of uplink channels to hop over. Throws
// error(protocol) when the event is illegal in the current phase. The state
// is taken by value; move it in on hot paths.
Transition advance(NodeState state, const NodeConfig& config, const MacEvent& event,
                   int channels, Rng& rng);

}  // namespace lorawsn::mac
