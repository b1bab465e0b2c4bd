#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lorawsn/collector.hpp"
#include "lorawsn/energy.hpp"
#include "lorawsn/error.hpp"
#include "lorawsn/phy.hpp"
#include "lorawsn/scenario_file.hpp"
#include "lorawsn/simcore.hpp"
#include "net.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace lorawsn;

namespace {

enum exit_code { kOk = 0, kOther = 1, kUsage = 2, kConfig = 3, kIo = 4 };

enum class Format { text, csv, structured };

const std::map<std::string, Format> kFormats{
    {"text", Format::text}, {"csv", Format::csv}, {"structured", Format::structured}, {"json", Format::structured}};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string hex32(std::uint32_t v) {
  char buf[12];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Output goes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::trunc);
    if (!file_) throw error(error_kind::io, "cannot write " + path);
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

sim::Scenario scenario_from(const std::string& path) {
  return path.empty() ? sim::default_scenario() : sim::load_scenario(path);
}

UnixMicros parse_time_arg(const std::string& s, const char* flag) {
  if (auto t = parse_iso8601(s)) return *t;
  if (auto t = parse_iso8601(s + "T00:00:00Z")) return *t;
  throw CLI::ValidationError(flag, "expected YYYY-MM-DD or ISO-8601 UTC timestamp");
}

// airtime -------------------------------------------------------------------

struct AirtimeArgs {
  phy::RadioParams radio;
  int payload = 21;
  bool no_crc = false;
  Format format = Format::text;
};

int cmd_airtime(const AirtimeArgs& a) {
  phy::RadioParams r = a.radio;
  r.crc_on = !a.no_crc;
  const phy::AirtimeBreakdown b = phy::airtime_breakdown(r, a.payload);
  const double ms = static_cast<double>(b.total.count()) / 1000.0;
  switch (a.format) {
    case Format::text:
      std::cout << fmt("%.3f", ms) << " ms\n"
                << "  total_us         " << b.total.count() << '\n'
                << "  symbol_us        " << b.symbol.count() << '\n'
                << "  preamble_us      " << b.preamble.count() << '\n'
                << "  payload_symbols  " << b.payload_symbols << '\n'
                << "  low_data_rate    " << (r.low_data_rate_optimize() ? "on" : "off") << '\n';
      break;
    case Format::csv:
      std::cout << "sf,bw_hz,cr,payload,total_us,symbol_us,preamble_us,payload_symbols\n"
                << r.sf << ',' << r.bw_hz << ',' << r.cr << ',' << a.payload << ',' << b.total.count() << ','
                << b.symbol.count() << ',' << b.preamble.count() << ',' << b.payload_symbols << '\n';
      break;
    case Format::structured:
      std::cout << json{{"sf", r.sf},
                        {"bw_hz", r.bw_hz},
                        {"cr", r.cr},
                        {"payload", a.payload},
                        {"total_us", b.total.count()},
                        {"symbol_us", b.symbol.count()},
                        {"preamble_us", b.preamble.count()},
                        {"payload_symbols", b.payload_symbols}}
                       .dump(2)
                << '\n';
  }
  return kOk;
}

// budget --------------------------------------------------------------------

struct BudgetArgs {
  int tx_dbm = phy::kMaxTxPowerDbm;
  int sensitivity_dbm = phy::kDeviceSensitivityDbm;
  int fsk_dbm = phy::kFskSensitivityDbm;
  std::optional<double> distance_m;
  double wall_db = 0.0;
  int sf = 7;
  std::int32_t bw = 125000;
  Format format = Format::text;
};

int cmd_budget(const BudgetArgs& a) {
  const phy::BudgetSummary s = phy::budget_summary(a.tx_dbm, a.sensitivity_dbm, a.fsk_dbm);
  std::optional<double> loss, margin;
  if (a.distance_m) {
    phy::PathLossModel model;
    model.wall_penalty_db = a.wall_db;
    loss = phy::path_loss_db(*a.distance_m, model);
    margin = phy::link_margin_db(a.tx_dbm, *a.distance_m, model, a.sf, a.bw);
  }
  switch (a.format) {
    case Format::text:
      std::cout << "max_coupling_loss      " << s.max_coupling_loss_db << " dB\n"
                << "fsk_sensitivity_delta  " << s.fsk_sensitivity_delta_db << " dB\n";
      if (a.distance_m)
        std::cout << "path_loss              " << fmt("%.1f", *loss) << " dB at " << *a.distance_m << " m\n"
                  << "sensitivity_sf" << a.sf << "        " << fmt("%.1f", phy::sensitivity_dbm(a.sf, a.bw))
                  << " dBm\n"
                  << "link_margin            " << fmt("%.1f", *margin) << " dB\n";
      break;
    case Format::csv:
      std::cout << "max_coupling_loss_db,fsk_sensitivity_delta_db\n"
                << s.max_coupling_loss_db << ',' << s.fsk_sensitivity_delta_db << '\n';
      break;
    case Format::structured: {
      json j{{"max_coupling_loss_db", s.max_coupling_loss_db},
             {"fsk_sensitivity_delta_db", s.fsk_sensitivity_delta_db}};
      if (a.distance_m) {
        j["path_loss_db"] = *loss;
        j["link_margin_db"] = *margin;
      }
      std::cout << j.dump(2) << '\n';
    }
  }
  return kOk;
}

// lifetime ------------------------------------------------------------------

struct LifetimeArgs {
  double battery_mah = 1000.0;
  std::optional<double> avg_ua;
  double derating = 1.0;
  std::string scenario;
  Format format = Format::text;
};

int cmd_lifetime(const LifetimeArgs& a) {
  if (a.avg_ua) {
    const double days = energy::lifetime_days(a.battery_mah, *a.avg_ua, a.derating);
    switch (a.format) {
      case Format::text: std::cout << fmt("%.1f", days) << " days\n"; break;
      case Format::csv: std::cout << "battery_mah,avg_ua,derating,days\n" << a.battery_mah << ',' << *a.avg_ua
                                  << ',' << a.derating << ',' << fmt("%.1f", days) << '\n'; break;
      case Format::structured:
        std::cout << json{{"battery_mah", a.battery_mah}, {"avg_ua", *a.avg_ua}, {"derating", a.derating},
                          {"days", days}}.dump(2) << '\n';
    }
    return kOk;
  }

  // Nominal-cycle table per spreading factor from the scenario's energy profile.
  const sim::Scenario sc = scenario_from(a.scenario);
  const mac::NodeConfig& node = sc.nodes.front();
  const double derating = a.derating != 1.0 ? a.derating : sc.battery_derating;
  json rows = json::array();
  if (a.format == Format::text)
    std::cout << "sf  airtime_ms  avg_ua   days\n";
  else if (a.format == Format::csv)
    std::cout << "sf,airtime_us,avg_ua,days\n";
  for (int sf = phy::kMinSpreadingFactor; sf <= phy::kMaxSpreadingFactor; ++sf) {
    phy::RadioParams radio = node.radio;
    radio.sf = sf;
    energy::CycleTiming t = energy::default_timing(radio, node.period_s);
    t.sense_s = node.sense_s;
    t.rx_window_s = node.rx_window_s;
    const double ua = energy::average_current_ua(sc.energy, energy::nominal_cycle(t));
    const double days = energy::lifetime_days(node.battery_mah, ua, derating);
    const auto air_us = phy::time_on_air(radio, static_cast<int>(codec::kFrameSize)).count();
    char line[96];
    switch (a.format) {
      case Format::text:
        std::snprintf(line, sizeof line, "%2d  %10.3f  %6.1f  %6.1f\n", sf, air_us / 1000.0, ua, days);
        std::cout << line;
        break;
      case Format::csv:
        std::snprintf(line, sizeof line, "%d,%lld,%.3f,%.1f\n", sf, static_cast<long long>(air_us), ua, days);
        std::cout << line;
        break;
      case Format::structured:
        rows.push_back({{"sf", sf}, {"airtime_us", air_us}, {"avg_ua", ua}, {"days", days}});
    }
  }
  if (a.format == Format::structured) std::cout << rows.dump(2) << '\n';
  return kOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::string out_dir;
  std::string stats_path;
  bool event_log = false;
  Format format = Format::text;
};

void write_sim_stats(std::ostream& os, const sim::Scenario& sc, const sim::ScenarioStats& st, Format format) {
  const mac::NodeConfig& n0 = sc.nodes.front();
  const double airtime_s = phy::to_seconds(phy::time_on_air(n0.radio, static_cast<int>(codec::kFrameSize)));
  const double analytic =
      sim::analytic_conflict_ratio(static_cast<int>(sc.nodes.size()), n0.period_s, airtime_s, sc.channels);
  double ua_sum = 0.0, ua_min = 1e300, ua_max = 0.0;
  for (const sim::NodeStats& n : st.nodes) {
    const double ua = n.average_current_ua();
    ua_sum += ua;
    ua_min = std::min(ua_min, ua);
    ua_max = std::max(ua_max, ua);
  }
  const double ua_mean = ua_sum / static_cast<double>(st.nodes.size());
  const double days = energy::lifetime_days(n0.battery_mah, ua_mean, sc.battery_derating);
  const std::string header = "config_hash=" + hex64(sim::config_hash(sc)) + " seed=" + std::to_string(sc.seed);

  if (format == Format::structured) {
    json nodes = json::array();
    for (const sim::NodeStats& n : st.nodes)
      nodes.push_back({{"dev_addr", hex32(n.dev_addr)},
                       {"measurements", n.measurements},
                       {"tx_attempts", n.tx_attempts},
                       {"delivered", n.delivered},
                       {"given_up", n.given_up},
                       {"missed_wakeups", n.missed_wakeups},
                       {"conflict_counter", n.conflict_counter},
                       {"avg_current_ua", n.average_current_ua()},
                       {"battery_mv", n.battery_mv}});
    os << json{{"config_hash", hex64(sim::config_hash(sc))},
               {"seed", sc.seed},
               {"nodes", st.nodes.size()},
               {"duration_s", st.duration_s},
               {"measurements", st.measurements_taken},
               {"tx_attempts", st.tx_attempts},
               {"delivered", st.delivered},
               {"collided", st.collided},
               {"below_sensitivity", st.below_sensitivity},
               {"retransmissions", st.retransmissions},
               {"duplicates_suppressed", st.duplicates_suppressed},
               {"given_up", st.given_up},
               {"points_collected", st.points_collected},
               {"missed_wakeups", st.missed_wakeups},
               {"reboots", st.reboots},
               {"conflict_ratio", st.conflict_ratio()},
               {"analytic_conflict_ratio", analytic},
               {"avg_current_ua", ua_mean},
               {"lifetime_days", days},
               {"per_node", nodes}}
              .dump(2)
       << '\n';
    return;
  }
  if (format == Format::csv) {
    os << "# " << header << '\n'
       << "dev_addr,measurements,tx_attempts,delivered,given_up,missed_wakeups,conflict_counter,avg_current_ua,battery_mv\n";
    for (const sim::NodeStats& n : st.nodes)
      os << hex32(n.dev_addr) << ',' << n.measurements << ',' << n.tx_attempts << ',' << n.delivered << ','
         << n.given_up << ',' << n.missed_wakeups << ',' << n.conflict_counter << ','
         << fmt("%.3f", n.average_current_ua()) << ',' << n.battery_mv << '\n';
    return;
  }
  os << "# lorawsn simulate " << header << '\n'
     << "nodes                  " << st.nodes.size() << '\n'
     << "duration_s             " << fmt("%.0f", st.duration_s) << '\n'
     << "measurements           " << st.measurements_taken << '\n'
     << "tx_attempts            " << st.tx_attempts << '\n'
     << "delivered              " << st.delivered << '\n'
     << "collided               " << st.collided << '\n'
     << "below_sensitivity      " << st.below_sensitivity << '\n'
     << "retransmissions        " << st.retransmissions << '\n'
     << "duplicates_suppressed  " << st.duplicates_suppressed << '\n'
     << "given_up               " << st.given_up << '\n'
     << "points_collected       " << st.points_collected << '\n'
     << "missed_wakeups         " << st.missed_wakeups << '\n'
     << "reboots                " << st.reboots << '\n'
     << "conflict_ratio         " << fmt("%.4f", st.conflict_ratio() * 100) << " %\n"
     << "analytic_ratio         " << fmt("%.4f", analytic * 100) << " %\n"
     << "avg_current_ua         " << fmt("%.2f", ua_mean) << " (min " << fmt("%.2f", ua_min) << ", max "
     << fmt("%.2f", ua_max) << ")\n"
     << "lifetime_days          " << fmt("%.1f", days) << '\n';
}

int cmd_simulate(const SimulateArgs& a) {
  sim::Scenario sc = scenario_from(a.scenario);
  if (a.seed) sc.seed = *a.seed;
  if (a.duration_s) sc.duration_s = *a.duration_s;
  sim::validate(sc);

  std::ofstream uplinks, events;
  collector::KeyStore keys;
  sim::ScenarioSinks sinks;
  if (!a.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw error(error_kind::io, "cannot create " + a.out_dir);
    const fs::path dir(a.out_dir);
    uplinks.open(dir / "uplinks.log", std::ios::trunc);
    if (!uplinks) throw error(error_kind::io, "cannot write " + (dir / "uplinks.log").string());
    sinks.on_uplink = [&uplinks](const GatewayLine& l) { uplinks << format_gateway_line(l) << '\n'; };
    if (a.event_log) {
      events.open(dir / "events.log", std::ios::trunc);
      if (!events) throw error(error_kind::io, "cannot write " + (dir / "events.log").string());
      sinks.event_log = &events;
    }
    for (const mac::NodeConfig& n : sc.nodes) keys.add(n.dev_addr, n.key);
    keys.save(dir / "keys.txt");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const sim::ScenarioStats st = sim::run_scenario(sc, sinks);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (uplinks.is_open() && !uplinks.flush()) throw error(error_kind::io, "failed writing uplinks.log");

  Sink sink(a.stats_path);
  write_sim_stats(sink.os(), sc, st, a.format);
  if (!a.out_dir.empty()) {
    std::ofstream stats_file(fs::path(a.out_dir) / "stats.txt", std::ios::trunc);
    write_sim_stats(stats_file, sc, st, Format::text);
  }
  std::cerr << "simulated " << fmt("%.0f", sc.duration_s) << " s in " << fmt("%.2f", wall) << " s\n";
  return kOk;
}

// serve / replay / report ---------------------------------------------------

struct ServeArgs {
  std::string store;
  std::string keys;
  tool::ServeOptions net;
};

int cmd_serve(const ServeArgs& a) {
  collector::Collector c(collector::KeyStore::load(a.keys), fs::path(a.store));
  tool::serve(c, a.net, std::cerr);
  return kOk;
}

struct ReplayArgs {
  std::string input;
  std::string connect;
  std::string store;
  std::string keys;
};

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--connect", "expected host:port");
  const int port = std::stoi(s.substr(colon + 1));
  if (port <= 0 || port > 65535) throw CLI::ValidationError("--connect", "port out of range");
  return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
}

int cmd_replay(const ReplayArgs& a) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    file.open(a.input);
    if (!file) throw error(error_kind::io, "cannot open " + a.input);
    in = &file;
  }
  if (!a.connect.empty()) {
    const auto [host, port] = split_endpoint(a.connect);
    const std::uint64_t n = tool::send_lines(*in, host, port);
    std::cout << "sent " << n << " lines to " << a.connect << '\n';
    return kOk;
  }
  if (a.store.empty() || a.keys.empty())
    throw CLI::ValidationError("replay", "either --connect or both --store and --keys are required");
  collector::Collector c(collector::KeyStore::load(a.keys), fs::path(a.store));
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(*in, line)) {
    if (line.empty()) continue;
    c.ingest_text(line);
    ++n;
  }
  c.flush();
  const auto counters = c.counters();
  std::cout << "ingested " << n << " lines";
  for (const auto& [kind, count] : counters) std::cout << ' ' << collector::to_string(kind) << '=' << count;
  std::cout << '\n';
  return kOk;
}

struct ReportArgs {
  std::string store;
  std::string from, to;
  std::string csv;
  std::string out;
  bool per_node = false;
  Format format = Format::text;
};

void write_report(std::ostream& os, const collector::StatsReport& r, bool per_node, Format format) {
  const auto pct = [](double v) { return fmt("%.4f", v * 100); };
  if (format == Format::structured) {
    json nodes = json::array();
    for (const collector::NodeSummary& n : r.nodes)
      nodes.push_back({{"dev_addr", hex32(n.dev_addr)},
                       {"records", n.records},
                       {"retransmitted", n.retransmitted},
                       {"first_battery_mv", n.first_battery_mv},
                       {"last_battery_mv", n.last_battery_mv},
                       {"conflict_delta", n.conflict_delta},
                       {"completeness", n.completeness}});
    json gaps = json::array();
    for (const collector::ContinuityEntry& e : r.continuity.nodes)
      for (const collector::Gap& g : e.gaps) gaps.push_back({{"dev_addr", hex32(e.dev_addr)}, {"first", g.first}, {"last", g.last}});
    os << json{{"empty", r.empty},
               {"points_collected", r.points_collected},
               {"duplicates", r.duplicates},
               {"integrity_rejects", r.integrity_rejects},
               {"unknown_device", r.unknown_device},
               {"malformed", r.malformed},
               {"retransmitted_records", r.retransmitted_records},
               {"epoch_resets", r.epoch_resets},
               {"duplicate_ratio", r.duplicate_ratio},
               {"server_conflict_ratio", r.server_conflict_ratio},
               {"node_conflict_ratio", r.node_conflict_ratio},
               {"completeness", r.continuity.completeness()},
               {"expected", r.continuity.expected},
               {"received", r.continuity.received},
               {"gaps", gaps},
               {"nodes", nodes}}
              .dump(2)
       << '\n';
    return;
  }
  if (format == Format::csv) {
    os << "dev_addr,records,retransmitted,first_battery_mv,last_battery_mv,conflict_delta,completeness\n";
    for (const collector::NodeSummary& n : r.nodes)
      os << hex32(n.dev_addr) << ',' << n.records << ',' << n.retransmitted << ',' << n.first_battery_mv << ','
         << n.last_battery_mv << ',' << n.conflict_delta << ',' << fmt("%.6f", n.completeness) << '\n';
    return;
  }
  if (r.empty) os << "empty window\n";
  os << "points_collected       " << r.points_collected << '\n'
     << "duplicates             " << r.duplicates << '\n'
     << "integrity_rejects      " << r.integrity_rejects << '\n'
     << "unknown_device         " << r.unknown_device << '\n'
     << "malformed              " << r.malformed << '\n'
     << "retransmitted_records  " << r.retransmitted_records << '\n'
     << "epoch_resets           " << r.epoch_resets << '\n'
     << "duplicate_ratio        " << pct(r.duplicate_ratio) << " %\n"
     << "conflict_ratio_server  " << pct(r.server_conflict_ratio) << " %\n"
     << "conflict_ratio_node    " << pct(r.node_conflict_ratio) << " %\n"
     << "completeness           " << fmt("%.6f", r.continuity.completeness()) << " (" << r.continuity.received
     << '/' << r.continuity.expected << ")\n"
     << "gaps                   " << r.continuity.gap_count() << '\n';
  for (const collector::ContinuityEntry& e : r.continuity.nodes)
    for (const collector::Gap& g : e.gaps) os << "  gap " << hex32(e.dev_addr) << ' ' << g.first << ".." << g.last << '\n';
  if (!per_node) return;
  os << "dev_addr  records  retx  batt_first  batt_last  conflicts  completeness\n";
  for (const collector::NodeSummary& n : r.nodes) {
    char line[128];
    std::snprintf(line, sizeof line, "%s  %7llu  %4llu  %10u  %9u  %9llu  %.6f\n", hex32(n.dev_addr).c_str(),
                  static_cast<unsigned long long>(n.records), static_cast<unsigned long long>(n.retransmitted),
                  n.first_battery_mv, n.last_battery_mv, static_cast<unsigned long long>(n.conflict_delta),
                  n.completeness);
    os << line;
  }
}

int cmd_report(const ReportArgs& a) {
  if (!fs::is_directory(a.store)) throw error(error_kind::io, "store directory not found: " + a.store);
  collector::Collector c(collector::KeyStore{}, fs::path(a.store));
  collector::Window w;
  if (!a.from.empty()) w.from = parse_time_arg(a.from, "--from");
  if (!a.to.empty()) w.to = parse_time_arg(a.to, "--to");
  const collector::StatsReport r = c.monthly_stats(w);
  Sink sink(a.out);
  write_report(sink.os(), r, a.per_node, a.format);
  if (!a.csv.empty()) {
    const std::size_t rows = collector::export_csv(c.records(w), a.csv);
    std::cerr << "exported " << rows << " rows to " << a.csv << '\n';
  }
  return kOk;
}

void add_format(CLI::App* app, Format& f) {
  app->add_option("--format", f, "text, csv or structured")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoRaWAN sensor network toolkit"};
  app.require_subcommand(1, 1);

  AirtimeArgs air;
  auto* c_air = app.add_subcommand("airtime", "LoRa time-on-air");
  c_air->add_option("--sf", air.radio.sf)->check(CLI::Range(7, 12));
  c_air->add_option("--bw", air.radio.bw_hz);
  c_air->add_option("--cr", air.radio.cr)->check(CLI::Range(1, 4));
  c_air->add_option("--payload", air.payload);
  c_air->add_option("--preamble", air.radio.preamble_symbols);
  c_air->add_flag("--no-crc", air.no_crc);
  add_format(c_air, air.format);

  BudgetArgs bud;
  auto* c_bud = app.add_subcommand("budget", "link budget figures");
  c_bud->add_option("--tx-dbm", bud.tx_dbm);
  c_bud->add_option("--sensitivity-dbm", bud.sensitivity_dbm);
  c_bud->add_option("--fsk-dbm", bud.fsk_dbm);
  c_bud->add_option("--distance", bud.distance_m, "also report path loss and margin at this range (m)");
  c_bud->add_option("--wall-db", bud.wall_db);
  c_bud->add_option("--sf", bud.sf)->check(CLI::Range(7, 12));
  c_bud->add_option("--bw", bud.bw);
  add_format(c_bud, bud.format);

  LifetimeArgs life;
  auto* c_life = app.add_subcommand("lifetime", "battery lifetime");
  c_life->add_option("--battery-mah", life.battery_mah);
  c_life->add_option("--avg-ua", life.avg_ua);
  c_life->add_option("--derating", life.derating);
  c_life->add_option("--scenario", life.scenario)->check(CLI::ExistingFile);
  add_format(c_life, life.format);

  SimulateArgs simu;
  auto* c_sim = app.add_subcommand("simulate", "run a network scenario");
  c_sim->add_option("--scenario", simu.scenario)->check(CLI::ExistingFile);
  c_sim->add_option("--seed", simu.seed);
  c_sim->add_option("--duration", simu.duration_s, "override duration (s)");
  c_sim->add_option("--out", simu.out_dir, "directory for uplinks.log, keys.txt, stats.txt");
  c_sim->add_option("--stats", simu.stats_path, "write stats here instead of stdout");
  c_sim->add_flag("--event-log", simu.event_log, "also write events.log into --out");
  add_format(c_sim, simu.format);

  ServeArgs srv;
  auto* c_srv = app.add_subcommand("serve", "collector service");
  c_srv->add_option("--store", srv.store)->required();
  c_srv->add_option("--keys", srv.keys)->required()->check(CLI::ExistingFile);
  c_srv->add_option("--bind", srv.net.bind);
  c_srv->add_option("--port", srv.net.port);
  c_srv->add_option("--port-file", srv.net.port_file, "write the bound port here once listening");

  ReplayArgs rep;
  auto* c_rep = app.add_subcommand("replay", "feed a gateway line file to a collector");
  c_rep->add_option("input", rep.input, "gateway line file, - for stdin")->required();
  c_rep->add_option("--connect", rep.connect, "host:port of a running serve");
  c_rep->add_option("--store", rep.store);
  c_rep->add_option("--keys", rep.keys)->check(CLI::ExistingFile);

  ReportArgs rpt;
  auto* c_rpt = app.add_subcommand("report", "statistics over a measurement store");
  c_rpt->add_option("--store", rpt.store)->required();
  c_rpt->add_option("--from", rpt.from);
  c_rpt->add_option("--to", rpt.to);
  c_rpt->add_option("--csv", rpt.csv, "export the window's records");
  c_rpt->add_option("--out", rpt.out);
  c_rpt->add_flag("--per-node", rpt.per_node);
  add_format(c_rpt, rpt.format);

  try {
    app.parse(argc, argv);
    if (*c_air) return cmd_airtime(air);
    if (*c_bud) return cmd_budget(bud);
    if (*c_life) return cmd_lifetime(life);
    if (*c_sim) return cmd_simulate(simu);
    if (*c_srv) return cmd_serve(srv);
    if (*c_rep) return cmd_replay(rep);
    if (*c_rpt) return cmd_report(rpt);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout.flush();
    std::cerr << "error: kind=usage message=" << quote(e.what()) << '\n';
    return kUsage;
  } catch (const config_error& e) {
    std::cout.flush();
    std::cerr << "error: kind=config key=" << e.key() << " message=" << quote(e.what()) << '\n';
    return kConfig;
  } catch (const error& e) {
    std::cout.flush();
    std::cerr << "error: kind=" << to_string(e.kind()) << " message=" << quote(e.what()) << '\n';
    return e.kind() == error_kind::io ? kIo : e.kind() == error_kind::parameter ? kUsage : kOther;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal message=" << quote(e.what()) << '\n';
    return kOther;
  }
  return kUsage;
}
