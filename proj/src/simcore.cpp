#include "lorawsn/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <ostream>
#include <queue>
#include <set>
#include <string>
#include <unordered_set>

#include "lorawsn/error.hpp"

namespace lorawsn::sim {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::delivered: return "delivered";
    case Outcome::collided: return "collided";
    case Outcome::below_sensitivity: return "below_sensitivity";
  }
  return "?";
}

void validate(const Scenario& s) {
  if (s.nodes.empty()) throw config_error("scenario.nodes", "at least one node is required");
  if (s.channels < 1) throw config_error("scenario.channels", "channels must be >= 1");
  if (!(s.duration_s > 0)) throw config_error("scenario.duration_s", "duration_s must be > 0");
  if (!(s.capture_threshold_db >= 0))
    throw config_error("scenario.capture_threshold_db", "capture threshold must be >= 0");
  if (s.ack_window != 1 && s.ack_window != 2)
    throw config_error("scenario.ack_window", "ack_window must be 1 or 2");
  if (!(s.battery_derating > 0 && s.battery_derating <= 1))
    throw config_error("energy.derating", "derating must be in (0, 1]");
  if (!(s.duty_window_s > 0)) throw config_error("scenario.duty_window_s", "must be > 0");
  if (!(s.duty_max_fraction > 0 && s.duty_max_fraction <= 1))
    throw config_error("scenario.duty_max_fraction", "must be in (0, 1]");
  try {
    phy::validate(s.path_loss);
  } catch (const error& e) {
    throw config_error("path_loss", e.what());
  }
  try {
    energy::validate(s.energy);
  } catch (const error& e) {
    throw config_error("energy", e.what());
  }

  std::unordered_set<std::uint32_t> addrs;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const mac::NodeConfig& n = s.nodes[i];
    const std::string prefix = "node." + std::to_string(i);
    mac::validate(n, prefix);
    if (!addrs.insert(n.dev_addr).second)
      throw config_error(prefix + ".dev_addr", "duplicate dev_addr");
    if (!(n.distance_m >= s.path_loss.d0_m))
      throw config_error(prefix + ".distance_m", "distance is below the path-loss reference distance");
    const auto airtime = phy::time_on_air(n.radio, static_cast<int>(codec::kFrameSize));
    if (airtime.count() > std::llround(s.duty_window_s * s.duty_max_fraction * 1e6))
      throw config_error(prefix + ".radio", "one uplink exceeds the whole duty-cycle budget");
  }
  for (const ForcedLoss& f : s.forced_losses)
    if (!addrs.contains(f.dev_addr)) throw config_error("scenario.force_loss", "unknown dev_addr");
  for (const Reboot& r : s.reboots)
    if (!addrs.contains(r.dev_addr)) throw config_error("scenario.reboot", "unknown dev_addr");
}

std::vector<Outcome> arbitrate(std::span<const TransmissionAttempt> attempts,
                               double capture_threshold_db) {
  std::vector<Outcome> out(attempts.size(), Outcome::delivered);
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    const TransmissionAttempt& a = attempts[i];
    bool captured = true;
    for (std::size_t j = 0; j < attempts.size() && captured; ++j) {
      if (j == i) continue;
      const TransmissionAttempt& b = attempts[j];
      if (a.channel != b.channel || a.sf != b.sf || !overlaps(a, b)) continue;
      if (!(a.rx_power_dbm - b.rx_power_dbm >= capture_threshold_db)) captured = false;
    }
    if (a.rx_power_dbm < phy::sensitivity_dbm(a.sf, a.bw_hz))
      out[i] = Outcome::below_sensitivity;
    else if (!captured)
      out[i] = Outcome::collided;
  }
  return out;
}

double analytic_conflict_ratio(int n_nodes, double period_s, double airtime_s, int channels) {
  if (n_nodes < 1 || !(period_s > 0) || !(airtime_s > 0) || channels < 1)
    throw error(error_kind::domain, "analytic conflict ratio needs positive arguments");
  if (!(airtime_s < period_s)) throw error(error_kind::domain, "airtime must be below the period");
  const double vulnerable = 2.0 * airtime_s / (period_s * channels);
  return 1.0 - std::pow(1.0 - vulnerable, n_nodes - 1);
}

namespace {

enum class EventKind : std::uint8_t { timer, tx_start, tx_end, window_end };

struct Event {
  SimTime at;
  std::uint32_t dev_addr;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t node;
  int window;
};

// Min-heap on (time, dev_addr, sequence number).
struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.at != b.at) return a.at > b.at;
    if (a.dev_addr != b.dev_addr) return a.dev_addr > b.dev_addr;
    return a.seq > b.seq;
  }
};

struct NodeRuntime {
  mac::NodeConfig cfg;
  mac::NodeState state;
  Rng mac_rng;
  Rng sensor_rng;
  energy::ChargeMeter meter;
  double rx_power_dbm = 0.0;
  double temp_offset_c = 0.0;
  double capacity_mas = 0.0;
  std::set<std::uint16_t> forced_losses;
  std::vector<double> reboots_at_s;  // sorted ascending
  std::size_t next_reboot = 0;

  TransmissionAttempt current;
  bool current_delivered = false;
  std::uint64_t last_delivered_measurement = 0;

  NodeStats stats;
};

class Engine {
 public:
  Engine(const Scenario& scenario, const ScenarioSinks& sinks)
      : sc_(scenario), sinks_(sinks), gateway_rng_(make_stream(scenario.seed, 0xFFFFFFFFull)) {
    horizon_ = mac::seconds_to_sim(sc_.duration_s);
    nodes_.reserve(sc_.nodes.size());
    for (std::size_t i = 0; i < sc_.nodes.size(); ++i) init_node(i);
  }

  ScenarioStats run() {
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      // Past the horizon no new measurements start; in-flight cycles drain.
      if (ev.at > horizon_ && ev.kind == EventKind::timer &&
          nodes_[ev.node].state.phase == mac::Phase::sleep)
        continue;
      now_ = ev.at;
      dispatch(ev);
    }
    return finish();
  }

 private:
  void init_node(std::size_t i) {
    const mac::NodeConfig& cfg = sc_.nodes[i];
    Rng phase_rng = make_stream(sc_.seed, 3 * i + 2);
    const SimTime first = mac::seconds_to_sim(cfg.jitter_s > 0 ? uniform(phase_rng, 0.0, cfg.jitter_s) : 0.0);

    NodeRuntime n{
        .cfg = cfg,
        .state = mac::initial_state(first),
        .mac_rng = make_stream(sc_.seed, 3 * i),
        .sensor_rng = make_stream(sc_.seed, 3 * i + 1),
        .meter = energy::ChargeMeter(sc_.energy, 0),
    };
    n.state.duty_budget = mac::DutyBudget(mac::seconds_to_sim(sc_.duty_window_s), sc_.duty_max_fraction);
    phy::PathLossModel model = sc_.path_loss;
    model.wall_penalty_db += cfg.wall_penalty_db;
    n.rx_power_dbm = phy::received_power_dbm(cfg.radio.tx_power_dbm, cfg.distance_m, model);
    n.temp_offset_c = uniform(n.sensor_rng, -sc_.sensor.spread_c, sc_.sensor.spread_c);
    n.capacity_mas = cfg.battery_mah * sc_.battery_derating * 3600.0;
    for (const ForcedLoss& f : sc_.forced_losses)
      if (f.dev_addr == cfg.dev_addr) n.forced_losses.insert(f.fcnt);
    for (const Reboot& r : sc_.reboots)
      if (r.dev_addr == cfg.dev_addr) n.reboots_at_s.push_back(r.at_s);
    std::sort(n.reboots_at_s.begin(), n.reboots_at_s.end());
    n.stats.dev_addr = cfg.dev_addr;
    max_airtime_ = std::max(max_airtime_, phy::time_on_air(cfg.radio, static_cast<int>(codec::kFrameSize)));

    nodes_.push_back(std::move(n));
    push(first, static_cast<std::uint32_t>(i), EventKind::timer);
  }

  void push(SimTime at, std::uint32_t node, EventKind kind, int window = 0) {
    queue_.push(Event{at, nodes_[node].cfg.dev_addr, seq_++, kind, node, window});
  }

  void dispatch(const Event& ev) {
    NodeRuntime& n = nodes_[ev.node];
    switch (ev.kind) {
      case EventKind::timer: on_timer(ev.node, n); break;
      case EventKind::tx_start: on_tx_start(n); break;
      case EventKind::tx_end: on_tx_end(ev.node, n); break;
      case EventKind::window_end: on_window_end(ev.node, n, ev.window); break;
    }
  }

  mac::SensorSample sample(NodeRuntime& n) {
    const double t = sc_.start_time * 1e-6 + mac::sim_to_seconds(now_);
    const double diurnal = std::sin(2.0 * std::numbers::pi * std::fmod(t, 86400.0) / 86400.0);
    const SensorModel& m = sc_.sensor;
    const double temp = m.base_c + n.temp_offset_c + m.amplitude_c * diurnal +
                        m.noise_c * standard_normal(n.sensor_rng);
    const double rh = m.rh_base_pct - m.rh_amplitude_pct * diurnal +
                      m.rh_noise_pct * standard_normal(n.sensor_rng);
    const double consumed = n.meter.charge_mas();
    return mac::SensorSample{
        .temp_centi_c = static_cast<std::int16_t>(std::clamp(std::lround(temp * 100.0), -32768L, 32767L)),
        .rh_centi_pct = static_cast<std::uint16_t>(std::clamp(std::lround(rh * 100.0), 0L, 10000L)),
        .battery_mv = energy::battery_voltage_mv(consumed, n.capacity_mas / 3600.0),
    };
  }

  void on_timer(std::uint32_t idx, NodeRuntime& n) {
    mac::TimerFired fired{now_, {}};
    if (n.state.phase == mac::Phase::sleep) {
      maybe_reboot(n);
      n.meter.switch_to(energy::PowerState::run, now_.count());
      fired.sample = sample(n);
      n.meter.switch_to(energy::PowerState::sleep, (now_ + mac::seconds_to_sim(n.cfg.sense_s)).count());
    }
    apply(idx, n, fired);
  }

  void maybe_reboot(NodeRuntime& n) {
    bool rebooted = false;
    while (n.next_reboot < n.reboots_at_s.size() &&
           mac::seconds_to_sim(n.reboots_at_s[n.next_reboot]) <= now_) {
      ++n.next_reboot;
      rebooted = true;
    }
    if (!rebooted) return;
    mac::NodeState fresh = mac::initial_state(now_);
    fresh.duty_budget = std::move(n.state.duty_budget);
    fresh.last_wakeup = n.state.last_wakeup;
    fresh.measurements = n.state.measurements;
    fresh.missed_wakeups = n.state.missed_wakeups;
    n.state = std::move(fresh);
    ++reboots_;
    log_line("reboot", n.cfg.dev_addr, "");
  }

  void on_tx_start(NodeRuntime& n) { n.meter.switch_to(energy::PowerState::tx, now_.count()); }

  void on_tx_end(std::uint32_t idx, NodeRuntime& n) {
    n.meter.switch_to(energy::PowerState::sleep, now_.count());
    const TransmissionAttempt& cur = n.current;

    while (!air_.empty() && air_.front().start + 2 * max_airtime_ < now_) air_.pop_front();
    std::vector<TransmissionAttempt> group{cur};
    for (const TransmissionAttempt& other : air_) {
      if (other.dev_addr == cur.dev_addr && other.start == cur.start) continue;
      if (overlaps(cur, other)) group.push_back(other);
    }
    Outcome outcome = arbitrate(group, sc_.capture_threshold_db).front();
    if (n.forced_losses.contains(cur.fcnt)) outcome = Outcome::below_sensitivity;

    ++stats_.tx_attempts;
    ++n.stats.tx_attempts;
    if (cur.attempt_no > 1) ++stats_.retransmissions;
    n.current_delivered = outcome == Outcome::delivered;
    switch (outcome) {
      case Outcome::delivered: {
        ++stats_.delivered;
        ++n.stats.delivered;
        if (n.last_delivered_measurement == n.state.measurements) {
          ++stats_.duplicates_suppressed;
        } else {
          n.last_delivered_measurement = n.state.measurements;
          ++stats_.points_collected;
        }
        forward(cur, n.state.frame, true);
        break;
      }
      case Outcome::collided:
        ++stats_.collided;
        if (sc_.forward_crc_errors) {
          codec::FrameBytes garbled = n.state.frame;
          for (std::size_t i = 9; i < garbled.size(); ++i)
            garbled[i] ^= static_cast<std::uint8_t>(gateway_rng_() | 1u);
          forward(cur, garbled, false);
        }
        break;
      case Outcome::below_sensitivity:
        ++stats_.below_sensitivity;
        break;
    }
    if (!n.cfg.confirmed && outcome != Outcome::delivered) {
      ++stats_.given_up;
      ++n.stats.given_up;
      stats_.lost.push_back(LostFrame{n.cfg.dev_addr, cur.fcnt, now_, n.state.measurements - 1});
    }

    if (sinks_.event_log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "fcnt=%u attempt=%d chan=%d sf=%d start=%lld outcome=%s",
                    static_cast<unsigned>(cur.fcnt), cur.attempt_no, cur.channel, cur.sf,
                    static_cast<long long>(cur.start.count()), std::string(to_string(outcome)).c_str());
      log_line("tx", n.cfg.dev_addr, buf);
    }
    apply(idx, n, mac::TxDone{now_});
  }

  void forward(const TransmissionAttempt& a, const codec::FrameBytes& frame, bool crc_ok) {
    if (!sinks_.on_uplink) return;
    GatewayLine line;
    line.ts = sc_.start_time + now_.count();
    line.rssi_dbm = static_cast<int>(std::lround(a.rx_power_dbm));
    line.snr_db = std::round((a.rx_power_dbm - phy::noise_floor_dbm(a.bw_hz)) * 10.0) / 10.0;
    line.channel = a.channel;
    line.sf = a.sf;
    line.frame.assign(frame.begin(), frame.end());
    line.crc_ok = crc_ok;
    sinks_.on_uplink(line);
  }

  void on_window_end(std::uint32_t idx, NodeRuntime& n, int window) {
    n.meter.switch_to(energy::PowerState::sleep, now_.count());
    if (n.cfg.confirmed && n.current_delivered && window == sc_.ack_window)
      apply(idx, n, mac::AckReceived{now_});
    else
      apply(idx, n, mac::WindowEmpty{now_});
  }

  void apply(std::uint32_t idx, NodeRuntime& n, const mac::MacEvent& event) {
    mac::Transition tr = mac::advance(std::move(n.state), n.cfg, event, sc_.channels, n.mac_rng);
    n.state = std::move(tr.state);
    for (const mac::MacAction& action : tr.actions) {
      if (const auto* tx = std::get_if<mac::StartTx>(&action)) {
        n.current = TransmissionAttempt{
            .dev_addr = n.cfg.dev_addr,
            .fcnt = tx->fcnt,
            .attempt_no = tx->attempt,
            .channel = tx->channel,
            .sf = n.cfg.radio.sf,
            .bw_hz = n.cfg.radio.bw_hz,
            .start = tx->at,
            .airtime = tx->airtime,
            .rx_power_dbm = n.rx_power_dbm,
        };
        n.current_delivered = false;
        air_.push_back(n.current);
        push(tx->at, idx, EventKind::tx_start);
        push(tx->at + tx->airtime, idx, EventKind::tx_end);
      } else if (const auto* rx = std::get_if<mac::OpenRxWindow>(&action)) {
        n.meter.switch_to(energy::PowerState::rx, rx->at.count());
        push(rx->at + rx->duration, idx, EventKind::window_end, rx->window);
      } else if (const auto* timer = std::get_if<mac::ScheduleTimer>(&action)) {
        push(timer->at, idx, EventKind::timer);
      } else if (const auto* give_up = std::get_if<mac::GiveUp>(&action)) {
        ++stats_.given_up;
        ++n.stats.given_up;
        stats_.lost.push_back(LostFrame{n.cfg.dev_addr, give_up->fcnt, now_, n.state.measurements - 1});
        log_line("give_up", n.cfg.dev_addr, "fcnt=" + std::to_string(give_up->fcnt));
      }
    }
  }

  void log_line(const char* kind, std::uint32_t dev_addr, const std::string& rest) {
    if (!sinks_.event_log) return;
    char head[64];
    std::snprintf(head, sizeof head, "t=%lld ev=%s dev=%08x", static_cast<long long>(now_.count()),
                  kind, dev_addr);
    *sinks_.event_log << head;
    if (!rest.empty()) *sinks_.event_log << ' ' << rest;
    *sinks_.event_log << '\n';
  }

  ScenarioStats finish() {
    stats_.duration_s = sc_.duration_s;
    stats_.reboots = reboots_;
    for (NodeRuntime& n : nodes_) {
      const std::int64_t end = std::max({horizon_.count(), now_.count(), n.meter.since_us()});
      n.meter.close(end);
      NodeStats ns = n.stats;
      ns.measurements = n.state.measurements;
      ns.missed_wakeups = n.state.missed_wakeups;
      ns.conflict_counter = n.state.conflict_counter;
      ns.charge_mas = n.meter.charge_mas();
      ns.elapsed_s = n.meter.total_seconds();
      ns.battery_remaining_mah = std::max(0.0, (n.capacity_mas - ns.charge_mas) / 3600.0);
      ns.battery_mv = energy::battery_voltage_mv(ns.charge_mas, n.capacity_mas / 3600.0);
      for (energy::PowerState s : energy::kPowerStates)
        ns.state_seconds[static_cast<std::size_t>(s)] = n.meter.seconds_in(s);
      stats_.measurements_taken += ns.measurements;
      stats_.missed_wakeups += ns.missed_wakeups;
      stats_.nodes.push_back(ns);
    }
    return std::move(stats_);
  }

  const Scenario& sc_;
  const ScenarioSinks& sinks_;
  Rng gateway_rng_;
  SimTime horizon_{0};
  SimTime now_{0};
  SimTime max_airtime_{0};
  std::uint64_t seq_ = 0;
  std::uint64_t reboots_ = 0;
  std::vector<NodeRuntime> nodes_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::deque<TransmissionAttempt> air_;
  ScenarioStats stats_;
};

}  // namespace

ScenarioStats run_scenario(const Scenario& scenario, const ScenarioSinks& sinks) {
  validate(scenario);
  return Engine(scenario, sinks).run();
}

}  // namespace lorawsn::sim
