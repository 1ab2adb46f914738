#include "henon/params.hpp"

#include "henon/error.hpp"

namespace henon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_weight: return "invalid-weight";
    case ErrorCode::invalid_exponent: return "invalid-exponent";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::step_failure: return "step-failure";
    case ErrorCode::no_zero_found: return "no-zero-found";
    case ErrorCode::degenerate_profile: return "degenerate-profile";
    case ErrorCode::discretization_failure: return "discretization-failure";
    case ErrorCode::integration_failure: return "integration-failure";
    case ErrorCode::truncation_uncertified: return "truncation-uncertified";
    case ErrorCode::parity_violation: return "parity-violation";
    case ErrorCode::quadrature_failure: return "quadrature-failure";
    case ErrorCode::interpolation_failure: return "interpolation-failure";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::jacobian_singular: return "jacobian-singular";
    case ErrorCode::immediate_failure: return "immediate-failure";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

double critical_exponent(int N, double alpha) {
  if (N < 3) throw Error(ErrorCode::invalid_dimension, "N must be at least 3, got " + std::to_string(N));
  if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_weight, "alpha must be positive");
  return (N + 2.0 + 2.0 * alpha) / (N - 2.0);
}

HenonParams HenonParams::make(int N, double alpha, double p) {
  HenonParams hp;
  hp.N = N;
  hp.alpha = alpha;
  hp.p = p;
  hp.p_alpha = critical_exponent(N, alpha);
  hp.kappa = (2.0 * (N - 1) + alpha) / (N - 2.0);
  hp.C_alpha = 1.0 / ((N - 2.0) * (N + alpha));
  return hp;
}

std::vector<std::string> HenonParams::warnings() const {
  std::vector<std::string> out;
  if (alpha > 1.0)
    out.emplace_back("alpha > 1: the Morse index is only known to take the values 1 or N+1 for alpha in (0,1]");
  return out;
}

}  // namespace henon
