#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace henon {

enum class ErrorCode {
  invalid_dimension,
  invalid_weight,
  invalid_exponent,
  invalid_argument,
  step_failure,
  no_zero_found,
  degenerate_profile,
  discretization_failure,
  integration_failure,
  truncation_uncertified,
  parity_violation,
  quadrature_failure,
  interpolation_failure,
  no_convergence,
  jacobian_singular,
  immediate_failure,
  io_error,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; code()
// lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace henon
