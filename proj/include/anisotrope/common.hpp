#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anisotrope {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Scalar function on R^n (gauges, support functions, fields).
using Functional = std::function<double(const Vec&)>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in incompatible dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate where the operation needs it not to be
/// (dependent vectors, rank-deficient differentials, zero norms).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the mathematical input failed (convexity, smoothness,
/// orientation, sample counts).
class DomainError : public Error {
 public:
  using Error::Error;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Axis-aligned box in R^n.
struct Box {
  std::vector<Interval> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  double volume() const;
  bool contains(const Vec& p) const;
  Box expanded(double factor) const;  // about the box centre
  /// Each end moved outwards by `rel` times the larger end magnitude.
  Box padded(double rel) const;
  static Box cube(int dim, double half_width);
};

inline constexpr double kPi = 3.14159265358979323846;

/// Volume of the Euclidean unit ball in R^n.
double unit_ball_volume(int n);

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTolerance = 1e-10;

int numerical_rank(const Mat& a, double rel_tol = kRankTolerance);
bool is_injective(const Mat& a);
bool is_surjective(const Mat& a);

/// Orthonormal basis (columns) of the kernel of `a`.
Mat kernel_basis(const Mat& a);

/// Orthonormal basis (columns) of the orthogonal complement of the column
/// span of `a` in R^{a.rows()}.  `a` must have full column rank.
Mat orthogonal_complement(const Mat& a);

/// |lhs - rhs| / max(|lhs|, |rhs|), zero when both vanish.
double relative_difference(double lhs, double rhs);

}  // namespace anisotrope
