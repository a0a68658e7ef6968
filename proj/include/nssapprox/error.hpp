#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nssapprox {

enum class ErrorKind {
  invalid_argument,
  invalid_sequence,
  out_of_range,
  divergent_constant,
  budget_exceeded,
  truncation_unsound,
  schema_violation,
};

/// Stable, hyphenated name used on the CLI diagnostic stream.
std::string_view error_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace nssapprox
