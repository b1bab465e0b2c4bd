#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "lorawsn/collector.hpp"

namespace lorawsn::tool {

struct ServeOptions {
  std::string bind = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  std::filesystem::path port_file;
};

// Accepts newline-delimited gateway lines on TCP until SIGINT/SIGTERM. When a
// client half-closes, the server answers "ok <lines>\n" and closes.
void serve(collector::Collector& collector, const ServeOptions& options, std::ostream& log);

// Streams every line of `in` to host:port and waits for the server's
// acknowledgement. Returns the number of lines sent.
std::uint64_t send_lines(std::istream& in, const std::string& host, std::uint16_t port);

}  // namespace lorawsn::tool
