#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lorawsn/timefmt.hpp"

namespace lorawsn {

// One gateway reception, as forwarded to the collector:
//   ts=<ISO8601> rssi=<int> snr=<float> chan=<int> sf=<int> frame=<base64>
// Keys may appear in any order; unknown keys are ignored. `crc=bad` marks a
// frame the gateway could not demodulate cleanly (forwarded for statistics).
struct GatewayLine {
  UnixMicros ts = 0;
  int rssi_dbm = 0;
  double snr_db = 0.0;
  int channel = 0;
  int sf = 7;
  std::vector<std::uint8_t> frame;
  bool crc_ok = true;

  bool operator==(const GatewayLine&) const = default;
};

std::string format_gateway_line(const GatewayLine& line);

struct LineParseError {
  std::string reason;
};

std::variant<GatewayLine, LineParseError> parse_gateway_line(std::string_view text);

// Splits "k1=v1 k2=v2 ..." on spaces/tabs; tokens without '=' are reported
// with an empty value.
std::vector<std::pair<std::string_view, std::string_view>> split_fields(std::string_view text);

}  // namespace lorawsn
