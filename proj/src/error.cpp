#include "nssapprox/error.hpp"

namespace nssapprox {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_sequence: return "invalid-sequence";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::divergent_constant: return "divergent-constant";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::truncation_unsound: return "truncation-unsound";
    case ErrorKind::schema_violation: return "schema-violation";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nssapprox
