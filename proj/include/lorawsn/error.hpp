#pragma once

#include <stdexcept>
#include <string>

namespace lorawsn {

// Error taxonomy shared by every module. The CLI maps each kind onto a
// distinct exit code and a single-line `error: kind=...` message.
enum class error_kind {
  parameter,   // invalid radio / model parameters
  domain,      // argument outside an operation's domain
  config,      // scenario / configuration validation
  protocol,    // illegal MAC state transition (simulator bug)
  framing,     // wrong wire length or malformed encoding
  integrity,   // MIC mismatch
  unknown_device,
  io,
};

const char* to_string(error_kind kind);

class error : public std::runtime_error {
 public:
  error(error_kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  error_kind kind() const noexcept { return kind_; }

 private:
  error_kind kind_;
};

// Configuration errors carry the offending key path, e.g. "node.3.sf".
class config_error : public error {
 public:
  config_error(std::string key, const std::string& what)
      : error(error_kind::config, what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace lorawsn
