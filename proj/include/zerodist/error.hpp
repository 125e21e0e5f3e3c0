#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zerodist {

enum class ErrorKind {
  evaluation_overflow,
  domain_error,
  parse_error,
  count_overflow,
  term_budget_exceeded,
  degree_overflow,
  nonconvergence,
  boundary_zero_unresolvable,
  quadrature_nonconvergence,
  count_mismatch,
  degenerate,
  trial_failure_rate,
  window_mismatch,
  window_too_small,
  quadrature_domain_too_small,
  grid_too_coarse,
  invalid_config,
  io_error,
};

std::string_view to_string(ErrorKind kind);

// Every library failure is reported through this type; the CLI serializes
// kind() into its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::evaluation_overflow: return "evaluation-overflow";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::count_overflow: return "count-overflow";
    case ErrorKind::term_budget_exceeded: return "term-budget-exceeded";
    case ErrorKind::degree_overflow: return "degree-overflow";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::boundary_zero_unresolvable: return "boundary-zero-unresolvable";
    case ErrorKind::quadrature_nonconvergence: return "quadrature-nonconvergence";
    case ErrorKind::count_mismatch: return "count-mismatch";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::trial_failure_rate: return "trial-failure-rate";
    case ErrorKind::window_mismatch: return "window-mismatch";
    case ErrorKind::window_too_small: return "window-too-small";
    case ErrorKind::quadrature_domain_too_small: return "quadrature-domain-too-small";
    case ErrorKind::grid_too_coarse: return "grid-too-coarse";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace zerodist
