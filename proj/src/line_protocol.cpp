#include "lorawsn/line_protocol.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

#include "lorawsn/codec.hpp"

namespace lorawsn {

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::vector<std::pair<std::string_view, std::string_view>> split_fields(std::string_view text) {
  std::vector<std::pair<std::string_view, std::string_view>> fields;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r') ++j;
    if (j > i) {
      const std::string_view token = text.substr(i, j - i);
      const std::size_t eq = token.find('=');
      if (eq == std::string_view::npos)
        fields.emplace_back(token, std::string_view{});
      else
        fields.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    i = j;
  }
  return fields;
}

std::string format_gateway_line(const GatewayLine& line) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " rssi=%d snr=%.1f chan=%d sf=%d frame=", line.rssi_dbm,
                line.snr_db, line.channel, line.sf);
  std::string out = "ts=" + format_iso8601(line.ts) + buf + codec::base64_encode(line.frame);
  if (!line.crc_ok) out += " crc=bad";
  return out;
}

std::variant<GatewayLine, LineParseError> parse_gateway_line(std::string_view text) {
  GatewayLine line;
  bool has_ts = false, has_rssi = false, has_snr = false, has_chan = false, has_sf = false,
       has_frame = false;

  for (const auto& [key, value] : split_fields(text)) {
    if (key == "ts") {
      const auto ts = parse_iso8601(value);
      if (!ts) return LineParseError{"bad ts"};
      line.ts = *ts;
      has_ts = true;
    } else if (key == "rssi") {
      const auto v = parse_number<int>(value);
      if (!v) return LineParseError{"bad rssi"};
      line.rssi_dbm = *v;
      has_rssi = true;
    } else if (key == "snr") {
      const auto v = parse_number<double>(value);
      if (!v || !std::isfinite(*v)) return LineParseError{"bad snr"};
      line.snr_db = *v;
      has_snr = true;
    } else if (key == "chan") {
      const auto v = parse_number<int>(value);
      if (!v || *v < 0) return LineParseError{"bad chan"};
      line.channel = *v;
      has_chan = true;
    } else if (key == "sf") {
      const auto v = parse_number<int>(value);
      if (!v || *v < 7 || *v > 12) return LineParseError{"bad sf"};
      line.sf = *v;
      has_sf = true;
    } else if (key == "frame") {
      auto bytes = codec::base64_decode(value);
      if (!bytes) return LineParseError{"bad frame encoding"};
      line.frame = std::move(*bytes);
      has_frame = true;
    } else if (key == "crc") {
      line.crc_ok = value != "bad";
    }
  }

  if (!has_ts) return LineParseError{"missing ts"};
  if (!has_rssi) return LineParseError{"missing rssi"};
  if (!has_snr) return LineParseError{"missing snr"};
  if (!has_chan) return LineParseError{"missing chan"};
  if (!has_sf) return LineParseError{"missing sf"};
  if (!has_frame) return LineParseError{"missing frame"};
  if (line.frame.size() != codec::kFrameSize) return LineParseError{"frame is not 21 bytes"};
  return line;
}

}  // namespace lorawsn
