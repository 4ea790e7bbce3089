#pragma once

// Simple k-vectors and k-covectors stored by their spanning vectors.
//
// A simple element sign * (v_1 ^ ... ^ v_k) is kept as the n x k matrix whose
// columns are the v_i together with a +-1 sign.  Expanded Lambda^k coordinates
// are never stored; Grassmann coordinates (k x k minors) are computed on
// demand.

#include "anisotrope/common.hpp"

#include <initializer_list>
#include <map>
#include <span>

namespace anisotrope {

struct PrimalTag {};
struct DualTag {};

using IndexSet = std::vector<int>;
using GrassmannCoords = std::map<IndexSet, double>;

/// Largest-minor threshold, relative to the product of spanning-vector norms,
/// below which a simple element is treated as zero.
inline constexpr double kDegeneracyTolerance = 1e-10;

template <class Tag>
class Simple {
 public:
  Simple() = default;

  /// Columns of `spanning` are the wedge factors.
  explicit Simple(Mat spanning, int sign = +1);

  int degree() const { return static_cast<int>(spanning_.cols()); }
  int ambient_dim() const { return static_cast<int>(spanning_.rows()); }
  int sign() const { return sign_; }
  const Mat& spanning() const { return spanning_; }

  /// Spanning matrix with the sign folded into the first column.
  Mat oriented_spanning() const;

  /// a * xi for any real a (negative a flips the sign).
  Simple scaled(double a) const;
  Simple negated() const { return Simple(spanning_, -sign_); }

  bool is_zero() const;

 private:
  Mat spanning_;
  int sign_ = +1;
};

using SimpleKVector = Simple<PrimalTag>;
using SimpleKCovector = Simple<DualTag>;

/// Top-degree form Omega(e_1 ^ ... ^ e_n) = scale on R^n.
struct VolumeForm {
  int dim = 0;
  double scale = 1.0;

  /// Omega evaluated on the columns of `vectors` (must be n x n).
  double operator()(const Mat& vectors) const;
  double operator()(const SimpleKVector& xi) const;
};

SimpleKVector wedge(std::span<const Vec> vectors);
SimpleKVector wedge(std::initializer_list<Vec> vectors);
SimpleKCovector wedge_covectors(std::span<const Vec> covectors);
SimpleKCovector wedge_covectors(std::initializer_list<Vec> covectors);

/// All k x k minors of the spanning matrix times the sign, keyed by the
/// (0-based, increasing) row index sets.
template <class Tag>
GrassmannCoords grassmann_coords(const Simple<Tag>& xi);

/// Equality of represented elements: Grassmann coordinates agree to
/// `rel_tol` relative to the largest coordinate.
template <class Tag>
bool same_element(const Simple<Tag>& a, const Simple<Tag>& b, double rel_tol = 1e-12);

/// sign * (A v_1 ^ ... ^ A v_k).
SimpleKVector push_forward(const Mat& a, const SimpleKVector& xi);

/// Lambda^k A^*: a covector eta on the codomain of A becomes eta o A.
SimpleKCovector pull_back(const Mat& a, const SimpleKCovector& omega);

/// Pairing <omega, xi> = det(omega_i(v_j)) of equal-degree elements.
double pairing(const SimpleKCovector& omega, const SimpleKVector& xi);

/// The contraction eta -> Omega(eta ^ theta) of a degree-n element of
/// R^{n+m} into a simple m-covector.  Throws on degenerate theta.
SimpleKCovector iota_star(const VolumeForm& omega, const SimpleKVector& theta);

/// Covector components of iota_star for a hyperplane (deg theta = dim - 1):
/// c_i = Omega(e_i ^ w_1 ^ ... ^ w_n), by cofactor expansion.
Vec hyperplane_covector(const VolumeForm& omega, const Mat& w);

/// Inverse of iota_star on the simple cone.
SimpleKVector iota_star_inverse(const VolumeForm& omega, const SimpleKCovector& eta);

/// A basis of covectors together with its dual basis of vectors.
///
/// Columns of `covectors` are the given covectors followed by the completion;
/// columns of `vectors` are the dual basis, so covectors^T * vectors = I.
struct DualBasisPair {
  Mat covectors;
  Mat vectors;
  int given = 0;

  int dim() const { return static_cast<int>(covectors.rows()); }
  Mat given_vectors() const { return vectors.leftCols(given); }
  Mat completion_vectors() const { return vectors.rightCols(dim() - given); }
  Mat completion_covectors() const { return covectors.rightCols(dim() - given); }
};

/// Completes independent covectors (columns) to a basis of the dual of
/// R^dim using the orthogonal complement.  With `positively_oriented` the
/// dual vector basis is made positively oriented by swapping the last two
/// completion covectors (or negating the only one).
DualBasisPair complete_to_basis(const Mat& covectors, int dim, bool positively_oriented);

/// Dual pair for an explicitly chosen completion.
DualBasisPair dual_pair(const Mat& covectors, const Mat& completion);

}  // namespace anisotrope
