#include "lorawsn/collector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "lorawsn/error.hpp"

namespace lorawsn::collector {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kWindow = 16384;

template <typename T>
std::optional<T> number(std::string_view s, int base = 10) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string hex32(std::uint32_t v) {
  char buf[12];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

// Fixed-point decimal without going through floating point.
std::string fixed(std::int64_t scaled, int decimals) {
  std::int64_t div = 1;
  for (int i = 0; i < decimals; ++i) div *= 10;
  const bool neg = scaled < 0;
  const std::int64_t mag = neg ? -scaled : scaled;
  std::string frac = std::to_string(mag % div);
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  return (neg ? "-" : "") + std::to_string(mag / div) + "." + frac;
}

std::optional<std::int64_t> parse_fixed(std::string_view s, int decimals) {
  bool neg = false;
  if (!s.empty() && s[0] == '-') {
    neg = true;
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  const std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (frac.size() > static_cast<std::size_t>(decimals)) return std::nullopt;
  const auto w = number<std::int64_t>(whole);
  if (!w) return std::nullopt;
  std::int64_t value = *w;
  for (int i = 0; i < decimals; ++i) {
    value *= 10;
    if (static_cast<std::size_t>(i) < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') return std::nullopt;
      value += frac[i] - '0';
    }
  }
  return neg ? -value : value;
}

std::vector<fs::path> files_with_prefix(const fs::path& dir, std::string_view prefix) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with(prefix) && name.ends_with(".log"))
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<OutcomeKind> outcome_from_string(std::string_view s) {
  for (OutcomeKind k : {OutcomeKind::accepted, OutcomeKind::duplicate, OutcomeKind::integrity_reject,
                        OutcomeKind::unknown_device, OutcomeKind::malformed})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::accepted: return "accepted";
    case OutcomeKind::duplicate: return "duplicate";
    case OutcomeKind::integrity_reject: return "integrity_reject";
    case OutcomeKind::unknown_device: return "unknown_device";
    case OutcomeKind::malformed: return "malformed";
  }
  return "?";
}

OutcomeKind kind_of(const IngestOutcome& outcome) {
  return static_cast<OutcomeKind>(outcome.index());
}

std::optional<codec::DeviceKey> KeyStore::find(std::uint32_t dev_addr) const {
  const auto it = keys_.find(dev_addr);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

KeyStore KeyStore::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw error(error_kind::io, "cannot open key file " + path.string());
  KeyStore store;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const auto addr = fields.size() == 2 ? number<std::uint32_t>(fields[0].first, 16) : std::nullopt;
    const auto key = fields.size() == 2 ? codec::from_hex(fields[1].first) : std::nullopt;
    if (!addr || !key || key->size() != 16)
      throw config_error(path.string() + ":" + std::to_string(lineno), "expected '<devaddr> <32 hex key>'");
    codec::DeviceKey k{};
    std::copy(key->begin(), key->end(), k.begin());
    store.add(*addr, k);
  }
  return store;
}

void KeyStore::save(const fs::path& path) const {
  std::ofstream out(path);
  if (!out) throw error(error_kind::io, "cannot write key file " + path.string());
  for (const auto& [addr, key] : keys_) out << hex32(addr) << ' ' << codec::to_hex(key) << '\n';
  if (!out) throw error(error_kind::io, "failed writing key file " + path.string());
}

CounterTrack::Widened CounterTrack::widen(std::uint16_t fcnt) const {
  if (!seen) return {fcnt, false};
  const auto last16 = static_cast<std::uint16_t>(last_ext & 0xFFFF);
  const std::uint32_t forward = static_cast<std::uint16_t>(fcnt - last16);
  if (forward <= kWindow) return {last_ext + forward, false};
  const std::uint32_t back = 0x10000u - forward;
  if (back <= kWindow && back <= last_ext) return {last_ext - back, false};
  return reset_epoch(fcnt);
}

CounterTrack::Widened CounterTrack::reset_epoch(std::uint16_t fcnt) const {
  const std::uint32_t base = (max_ext / 0x10000u + 1) * 0x10000u;
  return {base + fcnt, true};
}

void CounterTrack::observe(std::uint32_t ext) {
  if (!seen || ext > last_ext) last_ext = ext;
  max_ext = seen ? std::max(max_ext, ext) : ext;
  seen = true;
}

std::uint64_t ContinuityReport::gap_count() const {
  std::uint64_t n = 0;
  for (const ContinuityEntry& e : nodes) n += e.gaps.size();
  return n;
}

std::string format_record(const MeasurementRecord& r, const codec::Mic& mic, bool epoch_reset) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                " dev=%08x fcnt=%u temp=%d rh=%u batt=%u conf=%u rssi=%d snr=%d retx=%d mic=%s reset=%d",
                r.dev_addr, r.extended_fcnt, r.temp_centi_c, r.rh_centi_pct, r.battery_mv,
                r.conflict_counter, r.rssi_dbm, r.snr_tenth_db, r.retransmission ? 1 : 0,
                codec::to_hex(mic).c_str(), epoch_reset ? 1 : 0);
  return "ts=" + format_iso8601(r.ts) + buf;
}

std::optional<ParsedRecord> parse_record(std::string_view line) {
  ParsedRecord p;
  int found = 0;
  for (const auto& [k, v] : split_fields(line)) {
    bool ok = true;
    if (k == "ts") {
      const auto t = parse_iso8601(v);
      ok = t.has_value();
      if (ok) p.record.ts = *t;
    } else if (k == "dev") {
      const auto x = number<std::uint32_t>(v, 16);
      ok = x.has_value();
      if (ok) p.record.dev_addr = *x;
    } else if (k == "fcnt") {
      const auto x = number<std::uint32_t>(v);
      ok = x.has_value();
      if (ok) p.record.extended_fcnt = *x;
    } else if (k == "temp") {
      const auto x = number<std::int16_t>(v);
      ok = x.has_value();
      if (ok) p.record.temp_centi_c = *x;
    } else if (k == "rh") {
      const auto x = number<std::uint16_t>(v);
      ok = x.has_value();
      if (ok) p.record.rh_centi_pct = *x;
    } else if (k == "batt") {
      const auto x = number<std::uint16_t>(v);
      ok = x.has_value();
      if (ok) p.record.battery_mv = *x;
    } else if (k == "conf") {
      const auto x = number<std::uint16_t>(v);
      ok = x.has_value();
      if (ok) p.record.conflict_counter = *x;
    } else if (k == "rssi") {
      const auto x = number<int>(v);
      ok = x.has_value();
      if (ok) p.record.rssi_dbm = *x;
    } else if (k == "snr") {
      const auto x = number<int>(v);
      ok = x.has_value();
      if (ok) p.record.snr_tenth_db = *x;
    } else if (k == "retx") {
      ok = v == "0" || v == "1";
      p.record.retransmission = v == "1";
    } else if (k == "mic") {
      const auto bytes = codec::from_hex(v);
      ok = bytes && bytes->size() == 4;
      if (ok) std::copy(bytes->begin(), bytes->end(), p.mic.begin());
    } else if (k == "reset") {
      ok = v == "0" || v == "1";
      p.epoch_reset = v == "1";
    } else {
      continue;
    }
    if (!ok) return std::nullopt;
    ++found;
  }
  if (found != 12) return std::nullopt;
  return p;
}

Collector::Collector(KeyStore keys, std::optional<fs::path> store_dir)
    : keys_(std::move(keys)), dir_(std::move(store_dir)) {
  if (dir_) {
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec) throw error(error_kind::io, "cannot create store directory " + dir_->string());
    rebuild();
  }
}

Collector::~Collector() {
  try {
    flush();
  } catch (...) {
  }
}

void Collector::rebuild() {
  for (const fs::path& path : files_with_prefix(*dir_, "measurements-")) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto parsed = parse_record(line);
      if (!parsed) throw error(error_kind::io, "corrupt store line in " + path.string());
      NodeIndex& idx = index_[parsed->record.dev_addr];
      idx.track.observe(parsed->record.extended_fcnt);
      idx.mics[parsed->record.extended_fcnt] = parsed->mic;
      if (parsed->epoch_reset) idx.epoch_starts.push_back(parsed->record.extended_fcnt);
      records_.push_back(parsed->record);
      record_resets_.push_back(parsed->epoch_reset);
      ++counters_[OutcomeKind::accepted];
    }
  }
  for (const fs::path& path : files_with_prefix(*dir_, "outcomes-")) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      std::optional<UnixMicros> ts;
      std::optional<OutcomeKind> kind;
      for (const auto& [k, v] : split_fields(line)) {
        if (k == "ts") ts = parse_iso8601(v);
        if (k == "outcome") kind = outcome_from_string(v);
      }
      if (!ts || !kind) continue;
      outcomes_.push_back({*ts, *kind});
      ++counters_[*kind];
    }
  }
}

void Collector::append(const std::string& prefix, UnixMicros ts, const std::string& line) {
  if (!dir_) return;
  const std::string name = prefix + day_stamp(ts) + ".log";
  if (name != open_file_) {
    if (out_.is_open()) out_.close();
    out_.open(*dir_ / name, std::ios::app);
    if (!out_) throw error(error_kind::io, "cannot append to " + (*dir_ / name).string());
    open_file_ = name;
  }
  out_ << line << '\n';
}

void Collector::flush() {
  std::lock_guard lock(mu_);
  if (out_.is_open()) out_.flush();
}

void Collector::record_outcome(UnixMicros ts, OutcomeKind kind, const std::string& detail) {
  ++counters_[kind];
  outcomes_.push_back({ts, kind});
  std::string line = "ts=" + format_iso8601(ts) + " outcome=" + std::string(to_string(kind));
  if (!detail.empty()) line += " " + detail;
  append("outcomes-", ts, line);
}

IngestOutcome Collector::ingest(const GatewayLine& line) {
  std::lock_guard lock(mu_);
  return ingest_locked(line, nullptr);
}

IngestOutcome Collector::ingest_text(std::string_view text) {
  auto parsed = parse_gateway_line(text);
  std::lock_guard lock(mu_);
  if (auto* err = std::get_if<LineParseError>(&parsed)) {
    // No trustworthy timestamp; file it under the newest one seen.
    const UnixMicros ts = records_.empty() ? 0 : records_.back().ts;
    record_outcome(ts, OutcomeKind::malformed, "reason=" + std::string(err->reason.empty() ? "?" : err->reason.substr(0, err->reason.find(' '))));
    return Malformed{err->reason};
  }
  return ingest_locked(std::get<GatewayLine>(parsed), nullptr);
}

IngestOutcome Collector::ingest_locked(const GatewayLine& line, const std::string*) {
  const std::optional<std::uint32_t> addr = codec::peek_dev_addr(line.frame);
  if (!addr) {
    record_outcome(line.ts, OutcomeKind::malformed, "reason=length");
    return Malformed{"frame is not 21 bytes"};
  }
  const std::string dev = "dev=" + hex32(*addr);

  if (!line.crc_ok) {
    // Receptions the gateway flagged as corrupt still identify the sender.
    if (keys_.find(*addr)) ++index_[*addr].pending_failures;
    record_outcome(line.ts, OutcomeKind::integrity_reject, dev + " reason=crc");
    return IntegrityReject{addr};
  }

  codec::UplinkFrame frame;
  try {
    frame = codec::decode_frame(line.frame, [this](std::uint32_t a) { return keys_.find(a); });
  } catch (const error& e) {
    switch (e.kind()) {
      case error_kind::unknown_device:
        record_outcome(line.ts, OutcomeKind::unknown_device, dev);
        return UnknownDevice{*addr};
      case error_kind::integrity:
        if (keys_.find(*addr)) ++index_[*addr].pending_failures;
        record_outcome(line.ts, OutcomeKind::integrity_reject, dev + " reason=mic");
        return IntegrityReject{addr};
      default:
        record_outcome(line.ts, OutcomeKind::malformed, dev + " reason=framing");
        return Malformed{e.what()};
    }
  }

  NodeIndex& idx = index_[frame.dev_addr];
  CounterTrack::Widened w = idx.track.widen(frame.fcnt);
  if (const auto it = idx.mics.find(w.ext); it != idx.mics.end()) {
    if (it->second == frame.mic) {
      record_outcome(line.ts, OutcomeKind::duplicate, dev + " fcnt=" + std::to_string(w.ext));
      return Duplicate{frame.dev_addr, w.ext};
    }
    // Same counter, different content: the device restarted its counter.
    w = idx.track.reset_epoch(frame.fcnt);
  }

  MeasurementRecord r{
      .ts = line.ts,
      .dev_addr = frame.dev_addr,
      .extended_fcnt = w.ext,
      .temp_centi_c = frame.payload.temp_centi_c,
      .rh_centi_pct = frame.payload.rh_centi_pct,
      .battery_mv = frame.payload.battery_mv,
      .conflict_counter = frame.payload.conflict_counter,
      .rssi_dbm = line.rssi_dbm,
      .snr_tenth_db = static_cast<int>(std::lround(line.snr_db * 10.0)),
      .retransmission = idx.pending_failures > 0,
  };
  idx.pending_failures = 0;
  idx.track.observe(w.ext);
  idx.mics[w.ext] = frame.mic;
  if (w.reset) idx.epoch_starts.push_back(w.ext);

  records_.push_back(r);
  record_resets_.push_back(w.reset);
  ++counters_[OutcomeKind::accepted];
  append("measurements-", r.ts, format_record(r, frame.mic, w.reset));
  return Accepted{r, w.reset};
}

std::vector<MeasurementRecord> Collector::records(const Window& window) const {
  std::lock_guard lock(mu_);
  std::vector<MeasurementRecord> out;
  for (const MeasurementRecord& r : records_)
    if (window.contains(r.ts)) out.push_back(r);
  return out;
}

std::map<OutcomeKind, std::uint64_t> Collector::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

ContinuityEntry Collector::detect_gaps(std::uint32_t dev_addr, const Window& window) const {
  std::lock_guard lock(mu_);
  return gaps_locked(dev_addr, window);
}

ContinuityEntry Collector::gaps_locked(std::uint32_t dev_addr, const Window& window) const {
  ContinuityEntry entry;
  entry.dev_addr = dev_addr;
  const auto idx = index_.find(dev_addr);
  std::vector<std::uint32_t> ext;
  for (const MeasurementRecord& r : records_)
    if (r.dev_addr == dev_addr && window.contains(r.ts)) ext.push_back(r.extended_fcnt);
  if (idx == index_.end() || ext.empty()) {
    entry.unknown = true;
    return entry;
  }
  std::sort(ext.begin(), ext.end());
  const std::set<std::uint32_t> epoch_starts(idx->second.epoch_starts.begin(), idx->second.epoch_starts.end());

  std::uint32_t seg_first = ext.front();
  for (std::size_t i = 1; i <= ext.size(); ++i) {
    const bool boundary = i == ext.size() || epoch_starts.contains(ext[i]);
    if (boundary) {
      entry.expected += ext[i - 1] - seg_first + 1;
      if (i < ext.size()) seg_first = ext[i];
      continue;
    }
    if (ext[i] - ext[i - 1] > 1) entry.gaps.push_back(Gap{ext[i - 1] + 1, ext[i] - 1});
  }
  entry.received = ext.size();
  return entry;
}

ContinuityReport Collector::continuity(const Window& window) const {
  std::lock_guard lock(mu_);
  return continuity_locked(window);
}

ContinuityReport Collector::continuity_locked(const Window& window) const {
  std::set<std::uint32_t> devs;
  for (const MeasurementRecord& r : records_)
    if (window.contains(r.ts)) devs.insert(r.dev_addr);
  ContinuityReport report;
  for (std::uint32_t dev : devs) {
    ContinuityEntry e = gaps_locked(dev, window);
    report.expected += e.expected;
    report.received += e.received;
    report.nodes.push_back(std::move(e));
  }
  return report;
}

StatsReport Collector::monthly_stats(const Window& window) const {
  std::lock_guard lock(mu_);
  StatsReport rep;
  rep.window = window;

  std::map<std::uint32_t, std::vector<std::size_t>> per_node;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const MeasurementRecord& r = records_[i];
    if (!window.contains(r.ts)) continue;
    per_node[r.dev_addr].push_back(i);
    ++rep.points_collected;
    if (r.retransmission) ++rep.retransmitted_records;
    if (record_resets_[i]) ++rep.epoch_resets;
  }
  for (const OutcomeEntry& o : outcomes_) {
    if (!window.contains(o.ts)) continue;
    switch (o.kind) {
      case OutcomeKind::duplicate: ++rep.duplicates; break;
      case OutcomeKind::integrity_reject: ++rep.integrity_rejects; break;
      case OutcomeKind::unknown_device: ++rep.unknown_device; break;
      case OutcomeKind::malformed: ++rep.malformed; break;
      case OutcomeKind::accepted: break;
    }
  }
  rep.empty = rep.points_collected == 0 && rep.duplicates == 0 && rep.integrity_rejects == 0 &&
              rep.unknown_device == 0 && rep.malformed == 0;

  rep.continuity = continuity_locked(window);
  std::map<std::uint32_t, double> completeness;
  for (const ContinuityEntry& e : rep.continuity.nodes) completeness[e.dev_addr] = e.completeness();

  for (auto& [dev, rows] : per_node) {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return records_[a].extended_fcnt < records_[b].extended_fcnt;
    });
    NodeSummary s;
    s.dev_addr = dev;
    s.records = rows.size();
    std::size_t first_ts = rows.front(), last_ts = rows.front();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const MeasurementRecord& r = records_[rows[k]];
      if (r.retransmission) ++s.retransmitted;
      if (r.ts < records_[first_ts].ts) first_ts = rows[k];
      if (r.ts >= records_[last_ts].ts) last_ts = rows[k];
      if (k > 0 && !record_resets_[rows[k]])
        s.conflict_delta += static_cast<std::uint16_t>(r.conflict_counter - records_[rows[k - 1]].conflict_counter);
    }
    s.first_battery_mv = records_[first_ts].battery_mv;
    s.last_battery_mv = records_[last_ts].battery_mv;
    s.completeness = completeness[dev];
    rep.conflict_delta += s.conflict_delta;
    rep.nodes.push_back(s);
  }

  const std::uint64_t receptions = rep.points_collected + rep.duplicates + rep.integrity_rejects;
  if (receptions > 0)
    rep.server_conflict_ratio =
        static_cast<double>(rep.integrity_rejects + rep.duplicates) / static_cast<double>(receptions);
  if (rep.points_collected > 0)
    rep.node_conflict_ratio = static_cast<double>(rep.conflict_delta) / static_cast<double>(rep.points_collected);
  if (rep.points_collected + rep.duplicates > 0)
    rep.duplicate_ratio = static_cast<double>(rep.duplicates) /
                          static_cast<double>(rep.points_collected + rep.duplicates);
  return rep;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_row(std::string_view row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const char c = row[i];
    if (quoted) {
      if (c == '"' && i + 1 < row.size() && row[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::size_t export_csv(const std::vector<MeasurementRecord>& records, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw error(error_kind::io, "cannot write " + path.string());
  out << kCsvHeader << "\r\n";
  for (const MeasurementRecord& r : records) {
    const std::string cols[] = {
        format_iso8601(r.ts),         hex32(r.dev_addr),          std::to_string(r.extended_fcnt),
        fixed(r.temp_centi_c, 2),     fixed(r.rh_centi_pct, 2),   std::to_string(r.battery_mv),
        std::to_string(r.conflict_counter), std::to_string(r.rssi_dbm), fixed(r.snr_tenth_db, 1),
        r.retransmission ? "1" : "0",
    };
    for (std::size_t i = 0; i < std::size(cols); ++i) out << (i ? "," : "") << csv_field(cols[i]);
    out << "\r\n";
  }
  out.flush();
  if (!out) throw error(error_kind::io, "failed writing " + path.string());
  return records.size();
}

std::vector<MeasurementRecord> import_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw error(error_kind::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || parse_csv_row(line) != parse_csv_row(kCsvHeader))
    throw error(error_kind::framing, "unexpected CSV header in " + path.string());
  std::vector<MeasurementRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = parse_csv_row(line);
    auto bad = [&] { return error(error_kind::framing, path.string() + ":" + std::to_string(lineno) + ": bad row"); };
    if (f.size() != 10) throw bad();
    const auto ts = parse_iso8601(f[0]);
    const auto dev = number<std::uint32_t>(f[1], 16);
    const auto fcnt = number<std::uint32_t>(f[2]);
    const auto temp = parse_fixed(f[3], 2);
    const auto rh = parse_fixed(f[4], 2);
    const auto batt = number<std::uint16_t>(f[5]);
    const auto conf = number<std::uint16_t>(f[6]);
    const auto rssi = number<int>(f[7]);
    const auto snr = parse_fixed(f[8], 1);
    if (!ts || !dev || !fcnt || !temp || !rh || !batt || !conf || !rssi || !snr ||
        (f[9] != "0" && f[9] != "1"))
      throw bad();
    out.push_back(MeasurementRecord{
        .ts = *ts,
        .dev_addr = *dev,
        .extended_fcnt = *fcnt,
        .temp_centi_c = static_cast<std::int16_t>(*temp),
        .rh_centi_pct = static_cast<std::uint16_t>(*rh),
        .battery_mv = *batt,
        .conflict_counter = *conf,
        .rssi_dbm = *rssi,
        .snr_tenth_db = static_cast<int>(*snr),
        .retransmission = f[9] == "1",
    });
  }
  return out;
}

}  // namespace lorawsn::collector
