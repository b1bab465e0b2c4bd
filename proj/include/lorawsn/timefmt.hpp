#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lorawsn {

// Microseconds since the Unix epoch, UTC.
using UnixMicros = std::int64_t;

// "YYYY-MM-DDTHH:MM:SS.ffffffZ"
std::string format_iso8601(UnixMicros t);

// Accepts "YYYY-MM-DDTHH:MM:SS[.f{1,6}]Z" (the trailing Z is required).
std::optional<UnixMicros> parse_iso8601(std::string_view text);

// "YYYYMMDD" of the UTC day containing t.
std::string day_stamp(UnixMicros t);

}  // namespace lorawsn
