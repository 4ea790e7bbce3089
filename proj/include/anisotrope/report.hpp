#pragma once

#include <optional>
#include <string>
#include <vector>

namespace anisotrope {

/// One verified relation: both sides, the residual, and the budget it must
/// stay under.  `tag` names the identity the check instantiates.
struct Check {
  std::string name;
  std::string tag;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Monte Carlo standard error feeding the tolerance, when there is one.
  std::optional<double> std_error;
  std::string note;
};

/// Builds a check with pass = (residual <= tolerance).
Check make_check(std::string name, std::string tag, double lhs, double rhs, double residual, double tolerance);

/// Relative residual |lhs - rhs| / max(|lhs|, |rhs|).
Check relative_check(std::string name, std::string tag, double lhs, double rhs, double tolerance);

/// Absolute residual against an MC budget: tolerance = sigmas * std_error + slack.
Check sigma_check(std::string name, std::string tag, double lhs, double rhs, double std_error, double sigmas = 3.0,
                  double slack = 0.0);

/// Residual max(0, floor - value) against `tolerance`: one-sided inequality.
Check lower_bound_check(std::string name, std::string tag, double value, double floor, double tolerance);

bool all_pass(const std::vector<Check>& checks);

}  // namespace anisotrope
