#include <doctest.h>

#include "lorawsn/error.hpp"
#include "lorawsn/mac.hpp"

using namespace lorawsn;
using namespace lorawsn::mac;
using std::chrono::microseconds;

namespace {

template <typename T>
const T* find_action(const std::vector<MacAction>& actions) {
  for (const MacAction& a : actions)
    if (const auto* p = std::get_if<T>(&a)) return p;
  return nullptr;
}

// Earliest integer t >= now with (sum of grants started in (t - W, t]) + air <= limit.
microseconds brute_gate(const std::vector<DutyBudget::Entry>& grants, microseconds window, microseconds limit,
                        microseconds air, microseconds now) {
  for (microseconds t = now;; ++t) {
    microseconds used{0};
    for (const auto& g : grants)
      if (g.start > t - window && g.start <= t) used += g.airtime;
    // Grants later than t cannot exist: requests arrive in time order.
    if (used + air <= limit) return t;
  }
}

}  // namespace

TEST_CASE("duty-cycle gate agrees with brute force") {
  Rng rng = make_stream(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const microseconds window{1000};
    DutyBudget budget(window, 0.1);
    CHECK(budget.limit() == microseconds{100});
    std::vector<DutyBudget::Entry> grants;
    microseconds now{0};
    for (int i = 0; i < 200; ++i) {
      now += microseconds{static_cast<long>(uniform_index(rng, 60))};
      const microseconds air{1 + static_cast<long>(uniform_index(rng, 100))};
      const microseconds expect = brute_gate(grants, window, budget.limit(), air, now);
      const microseconds got = duty_cycle_gate(budget, air, now);
      REQUIRE(got == expect);
      grants.push_back({got, air});
      now = got;
    }
  }
}

TEST_CASE("duty-cycle defaults") {
  DutyBudget b;
  CHECK(b.window() == std::chrono::hours{1});
  CHECK(b.limit() == microseconds{36'000'000});
  CHECK_THROWS_AS(b.earliest(microseconds{36'000'001}, microseconds{0}), error);
  // 636 SF7 uplinks fit in an hour; the next waits for the first to age out.
  const microseconds air{56576};
  for (int i = 0; i < 636; ++i) CHECK(duty_cycle_gate(b, air, microseconds{i * 1000}) == microseconds{i * 1000});
  CHECK(duty_cycle_gate(b, air, microseconds{700'000}) == std::chrono::hours{1});
}

TEST_CASE("retransmission delay") {
  Rng rng = make_stream(1, 1);
  for (int attempt = 1; attempt < 8; ++attempt)
    for (int i = 0; i < 200; ++i) {
      const auto d = retransmission_delay(attempt, 8, rng);
      CHECK(d >= seconds_to_sim(1.0 * attempt));
      CHECK(d <= seconds_to_sim(3.0 * attempt));
    }
  CHECK_THROWS_AS(retransmission_delay(0, 8, rng), error);
  CHECK_THROWS_AS(retransmission_delay(8, 8, rng), error);
}

namespace {

struct Trace {
  std::vector<Phase> phases;
  std::vector<StartTx> txs;
  std::vector<SimTime> backoffs;
  std::optional<GiveUp> give_up;
  bool acked = false;
  NodeState end;
};

// Drives one measurement through the state machine; `ack_on` is the attempt
// (1-based) whose window `ack_window` carries an ACK, 0 for never.
Trace drive(const NodeConfig& cfg, int ack_on, int ack_window, std::uint64_t seed = 5) {
  Rng rng = make_stream(seed, 0);
  Trace tr;
  NodeState s = initial_state(SimTime{0});
  auto step = [&](const MacEvent& ev) {
    Transition t = advance(std::move(s), cfg, ev, 8, rng);
    s = std::move(t.state);
    tr.phases.push_back(s.phase);
    return t.actions;
  };
  auto actions = step(TimerFired{SimTime{0}, {2500, 4500, 3600}});
  for (int guard = 0; guard < 100; ++guard) {
    if (const auto* tx = find_action<StartTx>(actions)) {
      tr.txs.push_back(*tx);
      actions = step(TxDone{tx->at + tx->airtime});
    } else if (const auto* win = find_action<OpenRxWindow>(actions)) {
      const SimTime end = win->at + win->duration;
      if (win->window == ack_window && static_cast<int>(tr.txs.size()) == ack_on) {
        tr.acked = true;
        actions = step(AckReceived{end});
      } else {
        actions = step(WindowEmpty{end});
      }
    } else if (const auto* g = find_action<GiveUp>(actions)) {
      tr.give_up = *g;
      break;
    } else if (const auto* timer = find_action<ScheduleTimer>(actions)) {
      if (s.phase == Phase::sleep) break;
      if (s.phase == Phase::backoff) tr.backoffs.push_back(timer->at);
      actions = step(TimerFired{timer->at, {}});
    } else {
      break;
    }
  }
  tr.end = std::move(s);
  return tr;
}

}  // namespace

TEST_CASE("confirmed uplink acknowledged in RX2") {
  const NodeConfig cfg;
  const Trace t = drive(cfg, 1, 2);
  REQUIRE(t.txs.size() == 1);
  CHECK(t.txs[0].at == seconds_to_sim(cfg.sense_s));
  CHECK(t.txs[0].airtime == microseconds{56576});
  CHECK(t.txs[0].fcnt == 0);
  CHECK(t.acked);
  CHECK(t.phases == std::vector<Phase>{Phase::transmit, Phase::wait_rx1, Phase::rx1, Phase::wait_rx2, Phase::rx2,
                                       Phase::sleep});
  CHECK(t.end.conflict_counter == 0);
  CHECK(t.end.measurements == 1);
  // Next wakeup is one period later, dithered.
  const double next = sim_to_seconds(t.end.next_deadline);
  CHECK(next >= cfg.period_s - cfg.dither_s);
  CHECK(next <= cfg.period_s + cfg.dither_s);
}

TEST_CASE("ACK in RX1 skips RX2") {
  const Trace t = drive(NodeConfig{}, 1, 1);
  CHECK(t.acked);
  CHECK(t.phases == std::vector<Phase>{Phase::transmit, Phase::wait_rx1, Phase::rx1, Phase::sleep});
}

TEST_CASE("retransmission up to the limit, then give up") {
  NodeConfig cfg;
  const Trace t = drive(cfg, 0, 2);
  REQUIRE(t.txs.size() == 8);
  for (std::size_t i = 0; i < t.txs.size(); ++i) {
    CHECK(t.txs[i].attempt == static_cast<int>(i) + 1);
    CHECK(t.txs[i].fcnt == 0);
    CHECK(t.txs[i].frame == t.txs[0].frame);
  }
  REQUIRE(t.backoffs.size() == 7);
  CHECK(t.give_up.has_value());
  CHECK(t.give_up->fcnt == 0);
  CHECK(t.end.conflict_counter == 7);
  CHECK(t.end.phase == Phase::sleep);
  CHECK(t.end.attempt == 1);
}

TEST_CASE("late ACK stops retransmission") {
  const Trace t = drive(NodeConfig{}, 3, 2);
  CHECK(t.txs.size() == 3);
  CHECK(t.acked);
  CHECK(t.end.conflict_counter == 2);
  CHECK_FALSE(t.give_up.has_value());
}

TEST_CASE("unconfirmed uplinks are sent once") {
  NodeConfig cfg;
  cfg.confirmed = false;
  const Trace t = drive(cfg, 0, 2);
  CHECK(t.txs.size() == 1);
  CHECK(t.txs[0].frame[0] == 0x40);
  CHECK(t.end.phase == Phase::sleep);
  CHECK(t.end.conflict_counter == 0);
}

TEST_CASE("frame counter and conflict counter travel in the frame") {
  NodeConfig cfg;
  Rng rng = make_stream(9, 0);
  NodeState s = initial_state(SimTime{0});
  s.has_frame = true;
  s.fcnt = 0xFFFF;
  s.conflict_counter = 12;
  Transition t = advance(std::move(s), cfg, TimerFired{SimTime{0}, {}}, 8, rng);
  const auto* tx = find_action<StartTx>(t.actions);
  REQUIRE(tx);
  CHECK(tx->fcnt == 0);  // 16-bit wrap
  CHECK(t.state.payload.conflict_counter == 12);
}

TEST_CASE("illegal events are protocol errors") {
  NodeConfig cfg;
  Rng rng = make_stream(9, 0);
  auto kind = [&](Phase p, const MacEvent& ev) {
    NodeState s = initial_state(SimTime{0});
    s.phase = p;
    try {
      advance(std::move(s), cfg, ev, 8, rng);
    } catch (const error& e) {
      return e.kind();
    }
    return error_kind::io;
  };
  CHECK(kind(Phase::sleep, TxDone{SimTime{0}}) == error_kind::protocol);
  CHECK(kind(Phase::sleep, AckReceived{SimTime{0}}) == error_kind::protocol);
  CHECK(kind(Phase::transmit, TimerFired{SimTime{0}, {}}) == error_kind::protocol);
  CHECK(kind(Phase::wait_rx1, WindowEmpty{SimTime{0}}) == error_kind::protocol);
}

TEST_CASE("missed wakeups are skipped and counted") {
  NodeConfig cfg;
  cfg.dither_s = 0;
  Rng rng = make_stream(2, 0);
  NodeState s = initial_state(SimTime{0});
  Transition t = advance(std::move(s), cfg, TimerFired{SimTime{0}, {}}, 8, rng);
  s = std::move(t.state);
  s.phase = Phase::rx2;
  // The cycle ran until 95 s: wakeups at 30, 60 and 90 s have passed.
  t = advance(std::move(s), cfg, AckReceived{seconds_to_sim(95.0)}, 8, rng);
  CHECK(t.state.next_deadline == seconds_to_sim(120.0));
  CHECK(t.state.missed_wakeups == 3);
}

TEST_CASE("node configuration validation") {
  auto key_of = [](NodeConfig c) {
    try {
      validate(c, "node.4");
    } catch (const config_error& e) {
      return e.key();
    }
    return std::string();
  };
  NodeConfig c;
  CHECK(key_of(c).empty());
  c.period_s = 0;
  CHECK(key_of(c) == "node.4.period_s");
  c = {};
  c.radio.sf = 13;
  CHECK(key_of(c) == "node.4.radio");
  c = {};
  c.max_transmissions = 0;
  CHECK(key_of(c) == "node.4.max_transmissions");
  c = {};
  c.dither_s = 30;
  CHECK(key_of(c) == "node.4.dither_s");
  c = {};
  c.radio.sf = 12;
  c.period_s = 3;
  c.dither_s = 0;
  CHECK(key_of(c) == "node.4.period_s");
}
