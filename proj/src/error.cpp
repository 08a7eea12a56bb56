#include "volterra/error.hpp"

namespace volterra {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::gate: return "gate";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::domain: return 2;
    case ErrorKind::numerical: return 3;
    case ErrorKind::gate: return 4;
  }
  return 1;
}

}  // namespace volterra
