#include "anisotrope/report.hpp"

#include "anisotrope/common.hpp"

#include <algorithm>
#include <cmath>

namespace anisotrope {

Check make_check(std::string name, std::string tag, double lhs, double rhs, double residual, double tolerance) {
  Check c;
  c.name = std::move(name);
  c.tag = std::move(tag);
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = residual;
  c.tolerance = tolerance;
  c.pass = std::isfinite(residual) && residual <= tolerance;
  return c;
}

Check relative_check(std::string name, std::string tag, double lhs, double rhs, double tolerance) {
  return make_check(std::move(name), std::move(tag), lhs, rhs, relative_difference(lhs, rhs), tolerance);
}

Check sigma_check(std::string name, std::string tag, double lhs, double rhs, double std_error, double sigmas,
                  double slack) {
  Check c = make_check(std::move(name), std::move(tag), lhs, rhs, std::abs(lhs - rhs), sigmas * std_error + slack);
  c.std_error = std_error;
  return c;
}

Check lower_bound_check(std::string name, std::string tag, double value, double floor, double tolerance) {
  return make_check(std::move(name), std::move(tag), value, floor, std::max(0.0, floor - value), tolerance);
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

}  // namespace anisotrope
