#include <doctest.h>

#include <set>
#include <sstream>

#include "lorawsn/error.hpp"
#include "lorawsn/replicate.hpp"
#include "lorawsn/scenario_file.hpp"
#include "lorawsn/simcore.hpp"

using namespace lorawsn;
using namespace lorawsn::sim;
using std::chrono::microseconds;

namespace {

TransmissionAttempt att(std::uint32_t dev, long start_us, long air_us, double power, int chan = 0, int sf = 7) {
  TransmissionAttempt a;
  a.dev_addr = dev;
  a.channel = chan;
  a.sf = sf;
  a.start = microseconds{start_us};
  a.airtime = microseconds{air_us};
  a.rx_power_dbm = power;
  return a;
}

Scenario short_scenario(double days, int nodes = 20) {
  Scenario s = default_scenario(nodes);
  s.duration_s = days * 86400.0;
  return s;
}

}  // namespace

TEST_CASE("arbitrate") {
  using O = Outcome;
  // Lone frame.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -80)}, 6) == std::vector{O::delivered});
  // Equal power overlap destroys both.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -80), att(2, 50, 100, -80)}, 6) ==
        std::vector{O::collided, O::collided});
  // Touching but not overlapping.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -80), att(2, 100, 100, -80)}, 6) ==
        std::vector{O::delivered, O::delivered});
  // Different channel or spreading factor does not interfere.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -80), att(2, 50, 100, -80, 1)}, 6) ==
        std::vector{O::delivered, O::delivered});
  CHECK(arbitrate(std::vector{att(1, 0, 100, -80), att(2, 50, 100, -80, 0, 8)}, 6) ==
        std::vector{O::delivered, O::delivered});
  // Capture: 6 dB stronger survives, the weaker one does not.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -74), att(2, 50, 100, -80)}, 6) ==
        std::vector{O::delivered, O::collided});
  CHECK(arbitrate(std::vector{att(1, 0, 100, -75), att(2, 50, 100, -80)}, 6) ==
        std::vector{O::collided, O::collided});
  // Three-way: strongest must beat every other member.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -60), att(2, 50, 100, -70), att(3, 90, 100, -64)}, 6) ==
        std::vector{O::collided, O::collided, O::collided});
  // Under sensitivity regardless of interference.
  CHECK(arbitrate(std::vector{att(1, 0, 100, -130)}, 6) == std::vector{O::below_sensitivity});
}

TEST_CASE("analytic conflict ratio") {
  CHECK(analytic_conflict_ratio(20, 30, 0.056576, 8) == doctest::Approx(0.00892).epsilon(0.001));
  CHECK(analytic_conflict_ratio(20, 30, 0.056576, 1) == doctest::Approx(0.0692).epsilon(0.002));
  CHECK(analytic_conflict_ratio(1, 30, 0.056576, 8) == 0.0);
  CHECK_THROWS_AS(analytic_conflict_ratio(20, 30, 31, 8), error);
  CHECK_THROWS_AS(analytic_conflict_ratio(0, 30, 0.05, 8), error);
}

TEST_CASE("scenario validation") {
  auto key_of = [](Scenario s) {
    try {
      validate(s);
    } catch (const config_error& e) {
      return e.key();
    }
    return std::string();
  };
  Scenario s = default_scenario(3);
  CHECK(key_of(s).empty());
  s.channels = 0;
  CHECK(key_of(s) == "scenario.channels");
  s = default_scenario(3);
  s.nodes[1].dev_addr = s.nodes[0].dev_addr;
  CHECK(key_of(s) == "node.1.dev_addr");
  s = default_scenario(3);
  s.nodes[2].radio.sf = 5;
  CHECK(key_of(s) == "node.2.radio");
  s = default_scenario(0);
  CHECK(key_of(s) == "scenario.nodes");
  s = default_scenario(3);
  s.forced_losses.push_back({0xdead, 1});
  CHECK(key_of(s) == "scenario.force_loss");
}

TEST_CASE("determinism") {
  const Scenario s = short_scenario(0.5);
  std::ostringstream up1, up2, ev1, ev2;
  const auto a = run_scenario(s, {&ev1, [&](const GatewayLine& l) { up1 << format_gateway_line(l) << '\n'; }});
  const auto b = run_scenario(s, {&ev2, [&](const GatewayLine& l) { up2 << format_gateway_line(l) << '\n'; }});
  CHECK(up1.str() == up2.str());
  CHECK(ev1.str() == ev2.str());
  CHECK(a.tx_attempts == b.tx_attempts);
  CHECK(a.collided == b.collided);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i].charge_mas == b.nodes[i].charge_mas);

  Scenario other = s;
  other.seed = 2;
  std::ostringstream up3;
  run_scenario(other, {nullptr, [&](const GatewayLine& l) { up3 << format_gateway_line(l) << '\n'; }});
  CHECK(up3.str() != up1.str());
}

TEST_CASE("conservation identities") {
  const Scenario s = short_scenario(2);
  const ScenarioStats st = run_scenario(s);
  std::uint64_t conflicts = 0, measurements = 0;
  for (const NodeStats& n : st.nodes) {
    conflicts += n.conflict_counter;
    measurements += n.measurements;
  }
  CHECK(measurements == st.measurements_taken);
  CHECK(st.measurements_taken == st.points_collected + st.given_up);
  CHECK(st.tx_attempts == st.measurements_taken + conflicts);
  CHECK(st.tx_attempts == st.delivered + st.collided + st.below_sensitivity);
  CHECK(st.retransmissions == conflicts);
  CHECK(st.lost.size() == st.given_up);
  CHECK(st.below_sensitivity == 0);
  CHECK(st.collided > 0);
}

TEST_CASE("time in each power state follows the cycle structure") {
  const Scenario s = short_scenario(2, 10);
  const ScenarioStats st = run_scenario(s);
  const mac::NodeConfig& cfg = s.nodes.front();
  const double air = phy::to_seconds(phy::time_on_air(cfg.radio, 21));
  for (const NodeStats& n : st.nodes) {
    const double attempts = static_cast<double>(n.tx_attempts);
    const auto sec = [&](energy::PowerState p) { return n.state_seconds[static_cast<std::size_t>(p)]; };
    CHECK(sec(energy::PowerState::run) == doctest::Approx(cfg.sense_s * n.measurements));
    CHECK(sec(energy::PowerState::tx) == doctest::Approx(air * attempts));
    CHECK(sec(energy::PowerState::rx) == doctest::Approx(2 * cfg.rx_window_s * attempts));
    double charge = 0;
    for (energy::PowerState p : energy::kPowerStates) charge += sec(p) * s.energy.current_ma(p);
    CHECK(n.charge_mas == doctest::Approx(charge));
    CHECK(n.elapsed_s >= s.duration_s);
  }
}

TEST_CASE("single node energy matches the nominal cycle") {
  Scenario s = short_scenario(30, 1);
  s.nodes[0].dither_s = 0;
  const ScenarioStats st = run_scenario(s);
  const double nominal = energy::average_current_ua(
      s.energy, energy::nominal_cycle(energy::default_timing(s.nodes[0].radio, s.nodes[0].period_s)));
  CHECK(st.collided == 0);
  CHECK(st.nodes[0].average_current_ua() == doctest::Approx(nominal).epsilon(0.001));

  // Dither changes individual periods but not their mean.
  Scenario d = short_scenario(30, 1);
  CHECK(run_scenario(d).nodes[0].average_current_ua() == doctest::Approx(nominal).epsilon(0.001));
}

TEST_CASE("more channels, fewer conflicts") {
  double prev = 1.0;
  for (int c : {1, 2, 4, 8}) {
    Scenario s = short_scenario(2);
    s.channels = c;
    for (auto& n : s.nodes) n.confirmed = false;
    const double r = run_scenario(s).conflict_ratio();
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("forced losses and reboots") {
  Scenario s = short_scenario(0.2, 3);
  for (auto& n : s.nodes) n.confirmed = false;
  const std::uint32_t dev = s.nodes[1].dev_addr;
  s.forced_losses = {{dev, 10}, {dev, 11}, {dev, 200}};
  const ScenarioStats st = run_scenario(s);
  std::set<std::uint64_t> lost;
  for (const LostFrame& l : st.lost)
    if (l.dev_addr == dev) lost.insert(l.measurement);
  CHECK(lost.contains(10));
  CHECK(lost.contains(11));
  CHECK(lost.contains(200));
  CHECK(st.below_sensitivity == 3);

  // Confirmed: a forced loss repeats on every attempt, so the frame is given up.
  Scenario c = short_scenario(0.2, 3);
  c.forced_losses = {{dev, 10}};
  const ScenarioStats cs = run_scenario(c);
  REQUIRE(cs.lost.size() == 1);
  CHECK(cs.lost[0].fcnt == 10);
  CHECK(cs.nodes[1].conflict_counter >= 7);

  Scenario r = short_scenario(0.2, 3);
  r.reboots = {{dev, 3000.0}};
  std::vector<std::uint16_t> fcnts;
  const ScenarioStats rs = run_scenario(r, {nullptr, [&](const GatewayLine& l) {
                                              if (l.crc_ok && codec::peek_dev_addr(l.frame) == dev)
                                                fcnts.push_back(static_cast<std::uint16_t>(l.frame[6] | l.frame[7] << 8));
                                            }});
  CHECK(rs.reboots == 1);
  int restarts = 0;
  for (std::size_t i = 1; i < fcnts.size(); ++i)
    if (fcnts[i] == 0) ++restarts;
  CHECK(restarts == 1);
}

TEST_CASE("collided receptions are forwarded as corrupt") {
  const Scenario s = short_scenario(1);
  std::uint64_t bad = 0, good = 0;
  const ScenarioStats st = run_scenario(s, {nullptr, [&](const GatewayLine& l) { (l.crc_ok ? good : bad)++; }});
  CHECK(bad == st.collided);
  CHECK(good == st.delivered);
}

TEST_CASE("parallel replications match the serial reference") {
  const Scenario s = short_scenario(0.5);
  const auto par = run_replications(s, 6, 100);
  const auto ser = run_replications_serial(s, 6, 100);
  CHECK(par == ser);
  CHECK(par[0].seed == 100);
  CHECK(par[5].seed == 105);
  const ReplicationSummary sum = summarize(ser);
  CHECK(sum.mean > 0);
  CHECK(sum.stddev > 0);
}

TEST_CASE("scenario file") {
  std::istringstream in(R"(
[scenario]
nodes = 4
channels = 2
seed = 77
force_loss = 0x26011001:5, 26011002:6
reboot = 26011003@120.5

[node]
period_s = 60
sf = 8

[node.2]
distance_m = 10
confirmed = false

[energy]
derating = 0.85
)");
  const Scenario s = parse_scenario(in);
  REQUIRE(s.nodes.size() == 4);
  CHECK(s.channels == 2);
  CHECK(s.seed == 77);
  CHECK(s.nodes[0].period_s == 60);
  CHECK(s.nodes[3].radio.sf == 8);
  CHECK(s.nodes[2].distance_m == 10);
  CHECK_FALSE(s.nodes[2].confirmed);
  CHECK(s.nodes[1].confirmed);
  CHECK(s.nodes[1].dev_addr == 0x26011001u);
  CHECK(s.battery_derating == doctest::Approx(0.85));
  REQUIRE(s.forced_losses.size() == 2);
  CHECK(s.forced_losses[1].dev_addr == 0x26011002u);
  CHECK(s.forced_losses[1].fcnt == 6);
  REQUIRE(s.reboots.size() == 1);
  CHECK(s.reboots[0].at_s == doctest::Approx(120.5));
  CHECK(s.nodes[0].key == codec::derive_device_key(s.network_key, s.nodes[0].dev_addr));

  std::istringstream empty("");
  const Scenario d = parse_scenario(empty);
  CHECK(config_hash(d) == config_hash(default_scenario()));
  CHECK(config_hash(s) != config_hash(d));
  CHECK(canonical_dump(s) == canonical_dump(s));
}

TEST_CASE("scenario file errors carry the key path") {
  auto key_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_scenario(in);
    } catch (const config_error& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("[scenario]\nchanels = 8\n") == "scenario.chanels");
  CHECK(key_of("[node.3]\nsf = x\n") == "node.3.sf");
  CHECK(key_of("[node.30]\nsf = 8\n") == "node.30");
  CHECK(key_of("[bogus]\na = 1\n") == "bogus");
  CHECK(key_of("[scenario]\nforce_loss = nonsense\n") == "scenario.force_loss");
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.scn"), error);
}
