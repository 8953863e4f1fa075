#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace holocorr {

enum class ErrorCode {
  invalid_argument,
  zero_polynomial,
  no_convergence,
  not_divisible,
  degenerate_resultant,
  singular_point,
  not_on_curve,
  degree_collapse,
  common_factor,
  not_square_free,
  budget_exceeded,
  invalid_bracket,
  non_monotone,
  divergent_everywhere,
  parabolic_basepoint,
  infinite_weight,
  degenerate_fit,
  no_valid_branch,
  not_indifferent,
  wrong_direction,
  not_fixed,
  insufficient_points,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::zero_polynomial: return "zero_polynomial";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::not_divisible: return "not_divisible";
    case ErrorCode::degenerate_resultant: return "degenerate_resultant";
    case ErrorCode::singular_point: return "singular_point";
    case ErrorCode::not_on_curve: return "not_on_curve";
    case ErrorCode::degree_collapse: return "degree_collapse";
    case ErrorCode::common_factor: return "common_factor";
    case ErrorCode::not_square_free: return "not_square_free";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::invalid_bracket: return "invalid_bracket";
    case ErrorCode::non_monotone: return "non_monotone";
    case ErrorCode::divergent_everywhere: return "divergent_everywhere";
    case ErrorCode::parabolic_basepoint: return "parabolic_basepoint";
    case ErrorCode::infinite_weight: return "infinite_weight";
    case ErrorCode::degenerate_fit: return "degenerate_fit";
    case ErrorCode::no_valid_branch: return "no_valid_branch";
    case ErrorCode::not_indifferent: return "not_indifferent";
    case ErrorCode::wrong_direction: return "wrong_direction";
    case ErrorCode::not_fixed: return "not_fixed";
    case ErrorCode::insufficient_points: return "insufficient_points";
  }
  return "unknown";
}

/// Library error. `data` carries the numbers behind the failure
/// (residuals, offending samples) when there are any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<double> data = {})
      : std::runtime_error(message), code_(code), data_(std::move(data)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  ErrorCode code_;
  std::vector<double> data_;
};

}  // namespace holocorr
