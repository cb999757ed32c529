#include "hqr/error.hpp"

namespace hqr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::IO: return "I/O error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::NotConverged: return "not converged";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Precondition: return "precondition error";
  }
  return "error";
}

}  // namespace hqr
