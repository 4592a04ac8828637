#include "dyadlab/error.hpp"

namespace dyadlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::resource: return "resource";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::shape: return "shape";
    case ErrorKind::domain: return "domain";
    case ErrorKind::format: return "format";
    case ErrorKind::invalid_value: return "invalid-value";
    case ErrorKind::scope: return "scope";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::contract: return "contract";
    case ErrorKind::degenerate: return "degenerate";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + what);
}

}  // namespace dyadlab
