#include "lorawsn/mac.hpp"

#include <string>

#include "lorawsn/error.hpp"

namespace lorawsn::mac {

namespace {

std::string key(std::string_view prefix, const char* field) {
  return std::string(prefix) + "." + field;
}

[[noreturn]] void illegal(Phase phase, const char* event) {
  throw error(error_kind::protocol, std::string("event ") + event + " is illegal in phase " +
                                        std::string(to_string(phase)));
}

SimTime airtime_of(const NodeConfig& config) {
  return phy::time_on_air(config.radio, static_cast<int>(codec::kFrameSize));
}

// Next reporting wakeup after the one at `state.last_wakeup`, skipping any
// that already passed while the node was busy.
SimTime next_wakeup(NodeState& state, const NodeConfig& config, SimTime now, Rng& rng) {
  const SimTime period = seconds_to_sim(config.period_s);
  SimTime dither{0};
  if (config.dither_s > 0.0) dither = seconds_to_sim(uniform(rng, -config.dither_s, config.dither_s));
  SimTime next = state.last_wakeup + period + dither;
  while (next <= now) {
    next += period;
    ++state.missed_wakeups;
  }
  return next;
}

void start_transmission(NodeState& state, const NodeConfig& config, SimTime earliest, int channels,
                        Rng& rng, std::vector<MacAction>& actions) {
  const SimTime airtime = airtime_of(config);
  const SimTime at = duty_cycle_gate(state.duty_budget, airtime, earliest);
  const auto channel = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(channels)));
  state.phase = Phase::transmit;
  state.next_deadline = at + airtime;
  actions.emplace_back(StartTx{state.frame, state.fcnt, state.attempt, channel, at, airtime});
}

void go_to_sleep(NodeState& state, const NodeConfig& config, SimTime now, Rng& rng,
                 std::vector<MacAction>& actions) {
  state.phase = Phase::sleep;
  state.attempt = 1;
  state.next_deadline = next_wakeup(state, config, now, rng);
  actions.emplace_back(ScheduleTimer{state.next_deadline});
}

void open_window(NodeState& state, const NodeConfig& config, int window, SimTime now,
                 std::vector<MacAction>& actions) {
  const SimTime duration = seconds_to_sim(config.rx_window_s);
  state.phase = window == 1 ? Phase::rx1 : Phase::rx2;
  state.next_deadline = now + duration;
  actions.emplace_back(OpenRxWindow{window, now, duration});
}

}  // namespace

void validate(const NodeConfig& c, std::string_view prefix) {
  try {
    phy::validate(c.radio);
  } catch (const error& e) {
    throw config_error(key(prefix, "radio"), e.what());
  }
  if (!(c.period_s > 0)) throw config_error(key(prefix, "period_s"), "period_s must be > 0");
  if (!(c.rx1_delay_s > 0 && c.rx1_delay_s < c.rx2_delay_s))
    throw config_error(key(prefix, "rx1_delay_s"), "need 0 < rx1_delay_s < rx2_delay_s");
  if (c.max_transmissions < 1)
    throw config_error(key(prefix, "max_transmissions"), "max_transmissions must be >= 1");
  if (!(c.rx_window_s > 0 && c.rx_window_s < c.rx2_delay_s - c.rx1_delay_s))
    throw config_error(key(prefix, "rx_window_s"), "rx window must be > 0 and end before RX2");
  if (!(c.sense_s >= 0)) throw config_error(key(prefix, "sense_s"), "sense_s must be >= 0");
  if (!(c.distance_m > 0)) throw config_error(key(prefix, "distance_m"), "distance_m must be > 0");
  if (!(c.battery_mah > 0)) throw config_error(key(prefix, "battery_mah"), "battery_mah must be > 0");
  if (!(c.jitter_s >= 0)) throw config_error(key(prefix, "jitter_s"), "jitter_s must be >= 0");
  if (!(c.dither_s >= 0 && c.dither_s < c.period_s))
    throw config_error(key(prefix, "dither_s"), "dither_s must be in [0, period_s)");
  const double cycle = c.sense_s + phy::to_seconds(airtime_of(c)) + c.rx2_delay_s + c.rx_window_s;
  if (!(cycle < c.period_s - c.dither_s))
    throw config_error(key(prefix, "period_s"),
                       "period_s - dither_s is shorter than one uplink cycle");
}

DutyBudget::DutyBudget(SimTime window, double max_fraction)
    : window_(window),
      max_fraction_(max_fraction),
      limit_(SimTime{std::llround(static_cast<double>(window.count()) * max_fraction)}) {
  if (window.count() <= 0 || !(max_fraction > 0.0 && max_fraction <= 1.0))
    throw config_error("duty_cycle", "duty-cycle window and fraction must be positive");
}

SimTime DutyBudget::earliest(SimTime airtime, SimTime now) const {
  if (airtime > limit_)
    throw config_error("duty_cycle", "a single transmission exceeds the whole duty-cycle budget");
  SimTime total{0};
  auto first = ledger_.begin();
  while (first != ledger_.end() && first->start <= now - window_) ++first;
  for (auto it = first; it != ledger_.end(); ++it) total += it->airtime;

  SimTime t = now;
  for (auto it = first; it != ledger_.end() && total + airtime > limit_; ++it) {
    total -= it->airtime;
    t = std::max(t, it->start + window_);
  }
  return t;
}

void DutyBudget::record(SimTime start, SimTime airtime) {
  while (!ledger_.empty() && ledger_.front().start <= start - window_) ledger_.pop_front();
  if (!ledger_.empty() && start < ledger_.back().start)
    throw error(error_kind::protocol, "duty-cycle grants must be recorded in time order");
  ledger_.push_back({start, airtime});
}

SimTime duty_cycle_gate(DutyBudget& budget, SimTime airtime, SimTime now) {
  const SimTime t = budget.earliest(airtime, now);
  budget.record(t, airtime);
  return t;
}

SimTime retransmission_delay(int attempt, int max_transmissions, Rng& rng) {
  if (attempt < 1 || attempt >= max_transmissions)
    throw error(error_kind::domain, "retransmission attempt " + std::to_string(attempt) +
                                        " outside [1, " + std::to_string(max_transmissions) + ")");
  return seconds_to_sim(uniform(rng, 1.0, 3.0) * attempt);
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::sleep: return "sleep";
    case Phase::sense: return "sense";
    case Phase::transmit: return "transmit";
    case Phase::wait_rx1: return "wait_rx1";
    case Phase::rx1: return "rx1";
    case Phase::wait_rx2: return "wait_rx2";
    case Phase::rx2: return "rx2";
    case Phase::backoff: return "backoff";
  }
  return "?";
}

NodeState initial_state(SimTime first_wakeup) {
  NodeState s;
  s.next_deadline = first_wakeup;
  return s;
}

Transition advance(NodeState state, const NodeConfig& config, const MacEvent& event, int channels,
                   Rng& rng) {
  std::vector<MacAction> actions;
  const Phase phase = state.phase;

  if (const auto* timer = std::get_if<TimerFired>(&event)) {
    const SimTime now = timer->at;
    switch (phase) {
      case Phase::sleep: {
        // Sense: take the sample, build the frame once; retransmissions reuse it.
        state.phase = Phase::sense;
        state.last_wakeup = now;
        state.fcnt = state.has_frame ? static_cast<std::uint16_t>(state.fcnt + 1) : 0;
        state.has_frame = true;
        state.attempt = 1;
        ++state.measurements;
        state.payload = codec::SensorPayload{
            .temp_centi_c = timer->sample.temp_centi_c,
            .rh_centi_pct = timer->sample.rh_centi_pct,
            .battery_mv = timer->sample.battery_mv,
            .conflict_counter = static_cast<std::uint16_t>(state.conflict_counter),
        };
        state.frame = codec::encode_frame(state.payload, config.dev_addr, state.fcnt,
                                          config.confirmed, config.key);
        start_transmission(state, config, now + seconds_to_sim(config.sense_s), channels, rng,
                           actions);
        break;
      }
      case Phase::wait_rx1:
        open_window(state, config, 1, now, actions);
        break;
      case Phase::wait_rx2:
        open_window(state, config, 2, now, actions);
        break;
      case Phase::backoff:
        start_transmission(state, config, now, channels, rng, actions);
        break;
      default:
        illegal(phase, "TimerFired");
    }
  } else if (const auto* done = std::get_if<TxDone>(&event)) {
    if (phase != Phase::transmit) illegal(phase, "TxDone");
    state.phase = Phase::wait_rx1;
    state.tx_end = done->at;
    state.next_deadline = done->at + seconds_to_sim(config.rx1_delay_s);
    actions.emplace_back(ScheduleTimer{state.next_deadline});
  } else if (const auto* ack = std::get_if<AckReceived>(&event)) {
    if (phase != Phase::rx1 && phase != Phase::rx2) illegal(phase, "AckReceived");
    actions.emplace_back(DeliverAckToApp{state.fcnt});
    go_to_sleep(state, config, ack->at, rng, actions);
  } else if (const auto* empty = std::get_if<WindowEmpty>(&event)) {
    const SimTime now = empty->at;
    if (phase == Phase::rx1) {
      state.phase = Phase::wait_rx2;
      state.next_deadline = std::max(now, state.tx_end + seconds_to_sim(config.rx2_delay_s));
      actions.emplace_back(ScheduleTimer{state.next_deadline});
    } else if (phase == Phase::rx2) {
      if (!config.confirmed) {
        go_to_sleep(state, config, now, rng, actions);
      } else if (state.attempt < config.max_transmissions) {
        const SimTime delay = retransmission_delay(state.attempt, config.max_transmissions, rng);
        ++state.conflict_counter;
        ++state.attempt;
        state.phase = Phase::backoff;
        state.next_deadline = now + delay;
        actions.emplace_back(ScheduleTimer{state.next_deadline});
      } else {
        actions.emplace_back(GiveUp{state.fcnt, state.payload});
        go_to_sleep(state, config, now, rng, actions);
      }
    } else {
      illegal(phase, "WindowEmpty");
    }
  }

  return Transition{std::move(state), std::move(actions)};
}

}  // namespace lorawsn::mac
