#include "lorawsn/error.hpp"

namespace lorawsn {

const char* to_string(error_kind kind) {
  switch (kind) {
    case error_kind::parameter: return "parameter";
    case error_kind::domain: return "domain";
    case error_kind::config: return "config";
    case error_kind::protocol: return "protocol";
    case error_kind::framing: return "framing";
    case error_kind::integrity: return "integrity";
    case error_kind::unknown_device: return "unknown_device";
    case error_kind::io: return "io";
  }
  return "unknown";
}

}  // namespace lorawsn
