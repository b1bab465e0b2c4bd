#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "lorawsn/codec.hpp"
#include "lorawsn/energy.hpp"
#include "lorawsn/line_protocol.hpp"
#include "lorawsn/mac.hpp"
#include "lorawsn/phy.hpp"
#include "lorawsn/timefmt.hpp"

namespace lorawsn::sim {

using mac::SimTime;

// Synthetic per-node temperature/humidity: base + diurnal sinusoid + noise.
struct SensorModel {
  double base_c = 22.0;
  double spread_c = 4.0;  // per-node offset, uniform in [-spread, +spread]
  double amplitude_c = 2.5;
  double noise_c = 0.15;
  double rh_base_pct = 40.0;
  double rh_amplitude_pct = 6.0;
  double rh_noise_pct = 0.8;
};

// Deliberate losses used to exercise continuity detection.
struct ForcedLoss {
  std::uint32_t dev_addr;
  std::uint16_t fcnt;
};

// The node restarts (fcnt and conflict counter back to zero) at its first
// wakeup at or after `at_s`.
struct Reboot {
  std::uint32_t dev_addr;
  double at_s;
};

struct Scenario {
  std::vector<mac::NodeConfig> nodes;
  int channels = 8;
  double duration_s = 30.0 * 86400.0;
  std::uint64_t seed = 1;
  double capture_threshold_db = 6.0;
  phy::PathLossModel path_loss;
  SensorModel sensor;
  energy::EnergyProfile energy;
  double battery_derating = 1.0;
  // Receive window in which the gateway answers confirmed uplinks (1 or 2).
  int ack_window = 2;
  bool forward_crc_errors = true;
  UnixMicros start_time = 1546300800LL * 1'000'000;  // 2019-01-01T00:00:00Z
  double duty_window_s = 3600.0;
  double duty_max_fraction = 0.01;
  codec::DeviceKey network_key{};
  std::vector<ForcedLoss> forced_losses;
  std::vector<Reboot> reboots;
};

// Throws config_error (with key path) on the first invalid field.
void validate(const Scenario& scenario);

enum class Outcome : std::uint8_t { delivered, collided, below_sensitivity };

std::string_view to_string(Outcome outcome);

struct TransmissionAttempt {
  std::uint32_t dev_addr = 0;
  std::uint16_t fcnt = 0;
  int attempt_no = 1;
  int channel = 0;
  int sf = 7;
  std::int32_t bw_hz = 125000;
  SimTime start{0};
  SimTime airtime{0};
  double rx_power_dbm = 0.0;

  SimTime end() const { return start + airtime; }
};

inline bool overlaps(const TransmissionAttempt& a, const TransmissionAttempt& b) {
  return a.start < b.end() && b.start < a.end();
}

// Gateway reception rules. Attempts interact only when they overlap in time
// on the same channel with the same SF; within such a group an attempt
// survives iff it is at least capture_threshold_db above every other member.
// Independently, anything under sensitivity(sf, bw) is BelowSensitivity.
std::vector<Outcome> arbitrate(std::span<const TransmissionAttempt> attempts,
                               double capture_threshold_db);

// Pure-ALOHA per-transmission collision probability with uniform channel
// hopping: 1 - (1 - 2 T / (P C))^(n - 1).
double analytic_conflict_ratio(int n_nodes, double period_s, double airtime_s, int channels);

struct NodeStats {
  std::uint32_t dev_addr = 0;
  std::uint64_t measurements = 0;
  std::uint64_t tx_attempts = 0;
  std::uint64_t delivered = 0;
  std::uint64_t given_up = 0;
  std::uint64_t missed_wakeups = 0;
  std::uint32_t conflict_counter = 0;
  double charge_mas = 0.0;
  double elapsed_s = 0.0;
  double battery_remaining_mah = 0.0;
  std::uint16_t battery_mv = 0;
  std::array<double, 4> state_seconds{};  // indexed by energy::PowerState

  double average_current_ua() const { return elapsed_s > 0 ? charge_mas / elapsed_s * 1e3 : 0.0; }
};

struct LostFrame {
  std::uint32_t dev_addr;
  std::uint16_t fcnt;
  SimTime at;
  std::uint64_t measurement;  // 0-based index of the node's measurement
};

struct ScenarioStats {
  std::uint64_t tx_attempts = 0;
  std::uint64_t collided = 0;
  std::uint64_t delivered = 0;
  std::uint64_t below_sensitivity = 0;
  std::uint64_t duplicates_suppressed = 0;
  std::uint64_t given_up = 0;
  std::uint64_t measurements_taken = 0;
  std::uint64_t points_collected = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t missed_wakeups = 0;
  std::uint64_t reboots = 0;
  double duration_s = 0.0;
  std::vector<NodeStats> nodes;
  // Given-up confirmed frames, or undelivered unconfirmed ones.
  std::vector<LostFrame> lost;

  double conflict_ratio() const {
    return tx_attempts == 0 ? 0.0 : static_cast<double>(collided) / static_cast<double>(tx_attempts);
  }
  std::uint64_t continuity_gaps() const { return lost.size(); }
};

struct ScenarioSinks {
  // One line per event; see README for the record grammar.
  std::ostream* event_log = nullptr;
  // Called for every frame the gateway forwards, in arrival order.
  std::function<void(const GatewayLine&)> on_uplink;
};

// Deterministic given the scenario (including seed).
ScenarioStats run_scenario(const Scenario& scenario, const ScenarioSinks& sinks = {});

}  // namespace lorawsn::sim
