#include "lorawsn/scenario_file.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lorawsn/error.hpp"

namespace lorawsn::sim {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double as_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw config_error(key, "expected a number, got '" + v + "'");
  return out;
}

std::int64_t as_int(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  int base = 10;
  if (v.starts_with("0x") || v.starts_with("0X")) {
    v = v.substr(2);
    base = 16;
  }
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw config_error(key, "expected an integer, got '" + trim(raw) + "'");
  return out;
}

std::uint64_t as_u64(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw config_error(key, "expected an unsigned integer, got '" + v + "'");
  return out;
}

bool as_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw config_error(key, "expected a boolean, got '" + v + "'");
}

std::uint32_t as_dev_addr(const std::string& key, std::string v) {
  v = trim(v);
  if (v.starts_with("0x") || v.starts_with("0X")) v = v.substr(2);
  std::uint32_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, 16);
  if (v.empty() || v.size() > 8 || ec != std::errc{} || ptr != v.data() + v.size())
    throw config_error(key, "expected a hex DevAddr, got '" + v + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : raw) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

using Setter = std::function<void(const std::string& key, const std::string& value)>;

void apply_section(const pt::ptree& section, const std::string& name,
                   const std::map<std::string, Setter>& setters) {
  for (const auto& [k, v] : section) {
    const std::string key = name + "." + k;
    const auto it = setters.find(k);
    if (it == setters.end()) throw config_error(key, "unknown key");
    it->second(key, v.data());
  }
}

std::map<std::string, Setter> node_setters(mac::NodeConfig& n) {
  return {
      {"dev_addr", [&](auto& k, auto& v) { n.dev_addr = as_dev_addr(k, v); }},
      {"period_s", [&](auto& k, auto& v) { n.period_s = as_double(k, v); }},
      {"sf", [&](auto& k, auto& v) { n.radio.sf = static_cast<int>(as_int(k, v)); }},
      {"bw_hz", [&](auto& k, auto& v) { n.radio.bw_hz = static_cast<std::int32_t>(as_int(k, v)); }},
      {"cr", [&](auto& k, auto& v) { n.radio.cr = static_cast<int>(as_int(k, v)); }},
      {"preamble_symbols", [&](auto& k, auto& v) { n.radio.preamble_symbols = static_cast<int>(as_int(k, v)); }},
      {"tx_power_dbm", [&](auto& k, auto& v) { n.radio.tx_power_dbm = as_double(k, v); }},
      {"confirmed", [&](auto& k, auto& v) { n.confirmed = as_bool(k, v); }},
      {"max_transmissions", [&](auto& k, auto& v) { n.max_transmissions = static_cast<int>(as_int(k, v)); }},
      {"rx1_delay_s", [&](auto& k, auto& v) { n.rx1_delay_s = as_double(k, v); }},
      {"rx2_delay_s", [&](auto& k, auto& v) { n.rx2_delay_s = as_double(k, v); }},
      {"rx_window_s", [&](auto& k, auto& v) { n.rx_window_s = as_double(k, v); }},
      {"sense_s", [&](auto& k, auto& v) { n.sense_s = as_double(k, v); }},
      {"distance_m", [&](auto& k, auto& v) { n.distance_m = as_double(k, v); }},
      {"wall_penalty_db", [&](auto& k, auto& v) { n.wall_penalty_db = as_double(k, v); }},
      {"battery_mah", [&](auto& k, auto& v) { n.battery_mah = as_double(k, v); }},
      {"jitter_s", [&](auto& k, auto& v) { n.jitter_s = as_double(k, v); }},
      {"dither_s", [&](auto& k, auto& v) { n.dither_s = as_double(k, v); }},
  };
}

void assign_keys(Scenario& s) {
  for (mac::NodeConfig& n : s.nodes) n.key = codec::derive_device_key(s.network_key, n.dev_addr);
}

codec::DeviceKey default_network_key() {
  codec::DeviceKey key{};
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i);
  return key;
}

}  // namespace

Scenario default_scenario(int node_count) {
  Scenario s;
  s.network_key = default_network_key();
  for (int i = 0; i < node_count; ++i) {
    mac::NodeConfig n;
    n.dev_addr = kDefaultDevAddrBase + static_cast<std::uint32_t>(i);
    s.nodes.push_back(n);
  }
  assign_keys(s);
  return s;
}

Scenario parse_scenario(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error("line " + std::to_string(e.line()), e.message());
  }

  Scenario s = default_scenario(0);
  int node_count = 20;
  std::uint32_t dev_addr_base = kDefaultDevAddrBase;
  mac::NodeConfig node_defaults;

  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw config_error(name, "keys must live inside a [section]");
  }

  if (const auto sec = tree.get_child_optional("scenario")) {
    apply_section(*sec, "scenario", {
        {"nodes", [&](auto& k, auto& v) {
           node_count = static_cast<int>(as_int(k, v));
           if (node_count < 1 || node_count > 100000) throw config_error(k, "nodes must be in 1..100000");
         }},
        {"channels", [&](auto& k, auto& v) { s.channels = static_cast<int>(as_int(k, v)); }},
        {"duration_s", [&](auto& k, auto& v) { s.duration_s = as_double(k, v); }},
        {"seed", [&](auto& k, auto& v) { s.seed = as_u64(k, v); }},
        {"capture_threshold_db", [&](auto& k, auto& v) { s.capture_threshold_db = as_double(k, v); }},
        {"start_time", [&](auto& k, auto& v) {
           const auto t = parse_iso8601(trim(v));
           if (!t) throw config_error(k, "expected YYYY-MM-DDTHH:MM:SSZ");
           s.start_time = *t;
         }},
        {"ack_window", [&](auto& k, auto& v) { s.ack_window = static_cast<int>(as_int(k, v)); }},
        {"forward_crc_errors", [&](auto& k, auto& v) { s.forward_crc_errors = as_bool(k, v); }},
        {"network_key", [&](auto& k, auto& v) {
           const auto bytes = codec::from_hex(trim(v));
           if (!bytes || bytes->size() != 16) throw config_error(k, "expected 32 hex digits");
           std::copy(bytes->begin(), bytes->end(), s.network_key.begin());
         }},
        {"dev_addr_base", [&](auto& k, auto& v) { dev_addr_base = as_dev_addr(k, v); }},
        {"duty_window_s", [&](auto& k, auto& v) { s.duty_window_s = as_double(k, v); }},
        {"duty_max_fraction", [&](auto& k, auto& v) { s.duty_max_fraction = as_double(k, v); }},
        {"force_loss", [&](auto& k, auto& v) {
           for (const std::string& item : split_list(v)) {
             const auto colon = item.find(':');
             if (colon == std::string::npos) throw config_error(k, "expected DEVADDR:FCNT items");
             const auto fcnt = as_int(k, item.substr(colon + 1));
             if (fcnt < 0 || fcnt > 0xFFFF) throw config_error(k, "fcnt must fit in 16 bits");
             s.forced_losses.push_back({as_dev_addr(k, item.substr(0, colon)), static_cast<std::uint16_t>(fcnt)});
           }
         }},
        {"reboot", [&](auto& k, auto& v) {
           for (const std::string& item : split_list(v)) {
             const auto at = item.find('@');
             if (at == std::string::npos) throw config_error(k, "expected DEVADDR@SECONDS items");
             s.reboots.push_back({as_dev_addr(k, item.substr(0, at)), as_double(k, item.substr(at + 1))});
           }
         }},
    });
  }

  if (const auto sec = tree.get_child_optional("node")) apply_section(*sec, "node", node_setters(node_defaults));

  for (int i = 0; i < node_count; ++i) {
    mac::NodeConfig n = node_defaults;
    n.dev_addr = dev_addr_base + static_cast<std::uint32_t>(i);
    s.nodes.push_back(n);
  }

  for (const auto& [name, section] : tree) {
    if (name == "scenario" || name == "node") continue;
    if (name.starts_with("node.")) {
      const std::string idx = name.substr(5);
      const auto i = as_int(name, idx);
      if (i < 0 || i >= node_count) throw config_error(name, "node index out of range");
      apply_section(section, name, node_setters(s.nodes[static_cast<std::size_t>(i)]));
    } else if (name == "path_loss") {
      apply_section(section, name, {
          {"pl0_db", [&](auto& k, auto& v) { s.path_loss.pl0_db = as_double(k, v); }},
          {"d0_m", [&](auto& k, auto& v) { s.path_loss.d0_m = as_double(k, v); }},
          {"exponent", [&](auto& k, auto& v) { s.path_loss.exponent = as_double(k, v); }},
      });
    } else if (name == "energy") {
      apply_section(section, name, {
          {"sleep_ua", [&](auto& k, auto& v) { s.energy.sleep_ua = as_double(k, v); }},
          {"mcu_run_ma", [&](auto& k, auto& v) { s.energy.mcu_run_ma = as_double(k, v); }},
          {"analog_ma", [&](auto& k, auto& v) { s.energy.analog_ma = as_double(k, v); }},
          {"tx_ma", [&](auto& k, auto& v) { s.energy.tx_ma = as_double(k, v); }},
          {"rx_ma", [&](auto& k, auto& v) { s.energy.rx_ma = as_double(k, v); }},
          {"supply_v", [&](auto& k, auto& v) { s.energy.supply_v = as_double(k, v); }},
          {"derating", [&](auto& k, auto& v) { s.battery_derating = as_double(k, v); }},
      });
    } else if (name == "sensor") {
      apply_section(section, name, {
          {"base_c", [&](auto& k, auto& v) { s.sensor.base_c = as_double(k, v); }},
          {"spread_c", [&](auto& k, auto& v) { s.sensor.spread_c = as_double(k, v); }},
          {"amplitude_c", [&](auto& k, auto& v) { s.sensor.amplitude_c = as_double(k, v); }},
          {"noise_c", [&](auto& k, auto& v) { s.sensor.noise_c = as_double(k, v); }},
          {"rh_base_pct", [&](auto& k, auto& v) { s.sensor.rh_base_pct = as_double(k, v); }},
          {"rh_amplitude_pct", [&](auto& k, auto& v) { s.sensor.rh_amplitude_pct = as_double(k, v); }},
          {"rh_noise_pct", [&](auto& k, auto& v) { s.sensor.rh_noise_pct = as_double(k, v); }},
      });
    } else {
      throw config_error(name, "unknown section");
    }
  }

  assign_keys(s);
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(error_kind::io, "cannot open scenario file " + path.string());
  return parse_scenario(in);
}

std::string canonical_dump(const Scenario& s) {
  std::ostringstream out;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "scenario.channels=" << s.channels << '\n'
      << "scenario.duration_s=" << num(s.duration_s) << '\n'
      << "scenario.seed=" << s.seed << '\n'
      << "scenario.capture_threshold_db=" << num(s.capture_threshold_db) << '\n'
      << "scenario.start_time=" << format_iso8601(s.start_time) << '\n'
      << "scenario.ack_window=" << s.ack_window << '\n'
      << "scenario.forward_crc_errors=" << s.forward_crc_errors << '\n'
      << "scenario.network_key=" << codec::to_hex(s.network_key) << '\n'
      << "scenario.duty_window_s=" << num(s.duty_window_s) << '\n'
      << "scenario.duty_max_fraction=" << num(s.duty_max_fraction) << '\n';
  for (const ForcedLoss& f : s.forced_losses) out << "scenario.force_loss=" << f.dev_addr << ':' << f.fcnt << '\n';
  for (const Reboot& r : s.reboots) out << "scenario.reboot=" << r.dev_addr << '@' << num(r.at_s) << '\n';
  out << "path_loss=" << num(s.path_loss.pl0_db) << ',' << num(s.path_loss.d0_m) << ','
      << num(s.path_loss.exponent) << ',' << num(s.path_loss.wall_penalty_db) << '\n';
  const energy::EnergyProfile& e = s.energy;
  out << "energy=" << num(e.sleep_ua) << ',' << num(e.mcu_run_ma) << ',' << num(e.analog_ma) << ','
      << num(e.tx_ma) << ',' << num(e.rx_ma) << ',' << num(e.supply_v) << ',' << num(s.battery_derating) << '\n';
  const SensorModel& m = s.sensor;
  out << "sensor=" << num(m.base_c) << ',' << num(m.spread_c) << ',' << num(m.amplitude_c) << ','
      << num(m.noise_c) << ',' << num(m.rh_base_pct) << ',' << num(m.rh_amplitude_pct) << ','
      << num(m.rh_noise_pct) << '\n';
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const mac::NodeConfig& n = s.nodes[i];
    out << "node." << i << '=' << n.dev_addr << ',' << num(n.period_s) << ',' << n.radio.sf << ','
        << n.radio.bw_hz << ',' << n.radio.cr << ',' << n.radio.preamble_symbols << ','
        << num(n.radio.tx_power_dbm) << ',' << n.confirmed << ',' << n.max_transmissions << ','
        << num(n.rx1_delay_s) << ',' << num(n.rx2_delay_s) << ',' << num(n.rx_window_s) << ','
        << num(n.sense_s) << ',' << num(n.distance_m) << ',' << num(n.wall_penalty_db) << ','
        << num(n.battery_mah) << ',' << num(n.jitter_s) << ',' << num(n.dither_s) << '\n';
  }
  return out.str();
}

std::uint64_t config_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : canonical_dump(s)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace lorawsn::sim
