#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lorawsn/codec.hpp"
#include "lorawsn/line_protocol.hpp"
#include "lorawsn/timefmt.hpp"

namespace lorawsn::collector {

struct MeasurementRecord {
  UnixMicros ts = 0;
  std::uint32_t dev_addr = 0;
  std::uint32_t extended_fcnt = 0;
  std::int16_t temp_centi_c = 0;
  std::uint16_t rh_centi_pct = 0;
  std::uint16_t battery_mv = 0;
  std::uint16_t conflict_counter = 0;
  int rssi_dbm = 0;
  int snr_tenth_db = 0;
  bool retransmission = false;

  double temp_c() const { return temp_centi_c / 100.0; }
  double rh_pct() const { return rh_centi_pct / 100.0; }
  double snr_db() const { return snr_tenth_db / 10.0; }

  bool operator==(const MeasurementRecord&) const = default;
};

enum class OutcomeKind : std::uint8_t { accepted, duplicate, integrity_reject, unknown_device, malformed };

std::string_view to_string(OutcomeKind kind);

struct Accepted {
  MeasurementRecord record;
  bool epoch_reset = false;
};
struct Duplicate {
  std::uint32_t dev_addr;
  std::uint32_t extended_fcnt;
};
struct IntegrityReject {
  std::optional<std::uint32_t> dev_addr;
};
struct UnknownDevice {
  std::uint32_t dev_addr;
};
struct Malformed {
  std::string reason;
};

using IngestOutcome = std::variant<Accepted, Duplicate, IntegrityReject, UnknownDevice, Malformed>;

OutcomeKind kind_of(const IngestOutcome& outcome);

class KeyStore {
 public:
  void add(std::uint32_t dev_addr, const codec::DeviceKey& key) { keys_[dev_addr] = key; }
  std::optional<codec::DeviceKey> find(std::uint32_t dev_addr) const;
  std::size_t size() const { return keys_.size(); }

  // One "<devaddr hex> <key hex>" pair per line; '#' starts a comment.
  static KeyStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::map<std::uint32_t, codec::DeviceKey> keys_;
};

// 16-bit on-air counter widening. A counter within +16384 of the last seen
// value continues the sequence (crossing 2^16 when needed); one within
// -16384 is a late arrival of the same epoch; anything else starts a new
// epoch (device reset).
struct CounterTrack {
  bool seen = false;
  std::uint32_t last_ext = 0;
  std::uint32_t max_ext = 0;

  struct Widened {
    std::uint32_t ext;
    bool reset;
  };
  Widened widen(std::uint16_t fcnt) const;
  Widened reset_epoch(std::uint16_t fcnt) const;
  void observe(std::uint32_t ext);
};

struct Window {
  UnixMicros from = std::numeric_limits<UnixMicros>::min();  // inclusive
  UnixMicros to = std::numeric_limits<UnixMicros>::max();    // exclusive

  bool contains(UnixMicros t) const { return t >= from && t < to; }
};

struct Gap {
  std::uint32_t first;
  std::uint32_t last;  // inclusive

  bool operator==(const Gap&) const = default;
};

struct ContinuityEntry {
  std::uint32_t dev_addr = 0;
  std::vector<Gap> gaps;
  std::uint64_t expected = 0;
  std::uint64_t received = 0;
  bool unknown = false;  // no records for this node in range

  double completeness() const {
    return expected == 0 ? 0.0 : static_cast<double>(received) / static_cast<double>(expected);
  }
};

struct ContinuityReport {
  std::vector<ContinuityEntry> nodes;
  std::uint64_t expected = 0;
  std::uint64_t received = 0;

  double completeness() const {
    return expected == 0 ? 1.0 : static_cast<double>(received) / static_cast<double>(expected);
  }
  std::uint64_t gap_count() const;
};

struct NodeSummary {
  std::uint32_t dev_addr = 0;
  std::uint64_t records = 0;
  std::uint64_t retransmitted = 0;
  std::uint16_t first_battery_mv = 0;
  std::uint16_t last_battery_mv = 0;
  std::uint64_t conflict_delta = 0;
  double completeness = 0.0;
};

struct StatsReport {
  Window window;
  bool empty = true;
  std::uint64_t points_collected = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t integrity_rejects = 0;
  std::uint64_t unknown_device = 0;
  std::uint64_t malformed = 0;
  std::uint64_t retransmitted_records = 0;
  std::uint64_t epoch_resets = 0;
  std::uint64_t conflict_delta = 0;
  // (rejected + duplicate) / frame-bearing receptions seen by the server
  double server_conflict_ratio = 0.0;
  // node-reported conflict counter increase / frames
  double node_conflict_ratio = 0.0;
  double duplicate_ratio = 0.0;
  ContinuityReport continuity;
  std::vector<NodeSummary> nodes;
};

// Append-only measurement store: one `measurements-YYYYMMDD.log` file per UTC
// day plus `outcomes-YYYYMMDD.log` for non-accepted receptions. The in-memory
// index is rebuilt from those files on open.
class Collector {
 public:
  Collector(KeyStore keys, std::optional<std::filesystem::path> store_dir = std::nullopt);
  ~Collector();

  Collector(const Collector&) = delete;
  Collector& operator=(const Collector&) = delete;

  IngestOutcome ingest(const GatewayLine& line);
  IngestOutcome ingest_text(std::string_view text);

  void flush();

  // Consistent snapshot as of the last completed ingest.
  std::vector<MeasurementRecord> records(const Window& window = {}) const;
  std::map<OutcomeKind, std::uint64_t> counters() const;

  ContinuityEntry detect_gaps(std::uint32_t dev_addr, const Window& window = {}) const;
  ContinuityReport continuity(const Window& window = {}) const;
  StatsReport monthly_stats(const Window& window = {}) const;

 private:
  struct OutcomeEntry {
    UnixMicros ts;
    OutcomeKind kind;
  };
  struct NodeIndex {
    CounterTrack track;
    std::unordered_map<std::uint32_t, codec::Mic> mics;
    std::vector<std::uint32_t> epoch_starts;
    std::uint32_t pending_failures = 0;
  };

  IngestOutcome ingest_locked(const GatewayLine& line, const std::string* raw);
  void record_outcome(UnixMicros ts, OutcomeKind kind, const std::string& detail);
  void append(const std::string& prefix, UnixMicros ts, const std::string& line);
  void rebuild();
  ContinuityEntry gaps_locked(std::uint32_t dev_addr, const Window& window) const;
  ContinuityReport continuity_locked(const Window& window) const;

  KeyStore keys_;
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::vector<MeasurementRecord> records_;
  std::vector<bool> record_resets_;
  std::vector<OutcomeEntry> outcomes_;
  std::unordered_map<std::uint32_t, NodeIndex> index_;
  std::map<OutcomeKind, std::uint64_t> counters_;

  std::string open_file_;
  std::ofstream out_;
};

std::string format_record(const MeasurementRecord& r, const codec::Mic& mic, bool epoch_reset);

struct ParsedRecord {
  MeasurementRecord record;
  codec::Mic mic{};
  bool epoch_reset = false;
};
std::optional<ParsedRecord> parse_record(std::string_view line);

inline constexpr std::string_view kCsvHeader =
    "ts,dev_addr,fcnt,temp_c,rh_pct,battery_mv,conflicts,rssi_dbm,snr_db,retx";

// Header plus one row per record; returns rows written. Throws error(io)
// without touching anything else when the path is not writable.
std::size_t export_csv(const std::vector<MeasurementRecord>& records,
                       const std::filesystem::path& path);
std::vector<MeasurementRecord> import_csv(const std::filesystem::path& path);

// RFC 4180 field quoting.
std::string csv_field(std::string_view value);
std::vector<std::string> parse_csv_row(std::string_view row);

}  // namespace lorawsn::collector
