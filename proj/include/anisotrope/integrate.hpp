#pragma once

// Integration of densities over parameterised patches and the change of
// variables, fiber integration, area and coarea checks built on it.

#include "anisotrope/densities.hpp"
#include "anisotrope/fields.hpp"
#include "anisotrope/quadrature.hpp"

namespace anisotrope {

/// A density whose value may depend on the base point.
struct DensityField {
  using Evaluator = std::function<double(const Vec& point, const SimpleKVector& xi)>;

  int degree = 0;
  int ambient = 0;
  Evaluator eval;
  bool symmetric = true;
  std::string name;

  DensityField() = default;
  DensityField(int degree, int ambient, Evaluator eval, bool symmetric, std::string name);
  /// The constant field x -> d.
  DensityField(const Density& d);  // NOLINT: implicit on purpose

  double operator()(const Vec& p, const SimpleKVector& xi) const { return eval(p, xi); }
  double operator()(const Vec& p, const Mat& spanning) const { return eval(p, SimpleKVector(spanning)); }
  /// The density at one point, for the pointwise linear algebra.
  Density at(const Vec& p) const;

  /// w(x) d with w positive.
  static DensityField weighted(const Density& d, const ScalarField& w);
};

/// Chart psi: domain -> R^n of a k-dimensional piece.
struct Patch {
  Box domain;
  Map chart;
  /// -1 reverses the orientation given by the coordinate order.
  int orientation = 1;
  /// Quadrature panels per axis, aligned with kinks of the integrands.
  std::vector<int> panels;
  std::string name;

  int dim() const { return domain.dim(); }
  int ambient() const { return chart.out; }
  Vec point(const Vec& s) const { return chart(s); }
  /// d psi columns with the orientation folded into the first one.
  Mat tangents(const Vec& s) const;
};

Patch box_patch(const Box& box);
/// (r, t) -> c + r (cos t, sin t): a planar annular sector.
Patch polar_patch(double r0, double r1, double t0 = 0.0, double t1 = 2.0 * kPi);
/// Counter-clockwise circle, split into four panels at the axes.
Patch circle_patch(double radius, const Vec& center = Vec::Zero(2));
/// t -> (a cos t, b sin t), counter-clockwise.
Patch ellipse_patch(double a, double b);
/// x -> (x, f(x)) for a scalar field of one variable.
Patch graph_patch(const ScalarField& f, Interval range);
/// (theta, phi) -> R (sin theta cos phi, sin theta sin phi, cos theta),
/// oriented so that the normal points outwards.
Patch sphere_patch(double radius);

/// Oriented hypersurface made of patches of dimension ambient - 1.
struct Hypersurface {
  std::vector<Patch> patches;
  bool closed = false;
  std::string name;

  int ambient() const { return patches.empty() ? 0 : patches.front().ambient(); }
};

Hypersurface single_patch_surface(Patch p, bool closed);

/// Per-node integrand on a patch: parameter, point, oriented tangents.
using PatchIntegrand = std::function<std::optional<double>(const Vec& s, const Vec& point, const Mat& tangents)>;

QuadratureResult integrate_patch(const Patch& patch, const PatchIntegrand& f, const QuadratureOptions& opts = {});
/// Sum over the patches of a hypersurface.
QuadratureResult integrate_surface(const Hypersurface& sigma, const PatchIntegrand& f,
                                   const QuadratureOptions& opts = {});

/// Quadrature options carrying the patch's panel layout.
QuadratureOptions patch_options(const Patch& patch, QuadratureOptions base = {});

/// Integral of w F over the patch; asymmetric F sees the oriented tangents.
/// Throws DegenerateError at nodes where the chart differential is rank
/// deficient.
QuadratureResult integrate_density(const Patch& patch, const DensityField& f, const ScalarField* weight = nullptr,
                                   const QuadratureOptions& opts = {});

/// (1 / n) int_Sigma <x, nu> dH for a closed hypersurface in R^n.
double enclosed_volume(const Hypersurface& sigma);

/// Closedness spot-checks: the flux of the constant field e_1 vanishes and
/// the enclosed volume is positive (outward orientation).  Throws
/// DomainError.
void validate_closed(const Hypersurface& sigma, double tol = 1e-8);

/// Winding number of a closed planar curve around p, from a polygon with
/// `samples` vertices per patch.
int winding_number(const Hypersurface& curve, const Vec& p, int samples = 4096);

/// int_{phi(B)} w dG against int_B J(d phi; F, G) (w o phi) dF.  `image`
/// parameterises phi(B) independently of phi.  Throws DomainError when
/// phi reverses orientation at a node.
Check change_of_variables_check(const Map& phi, const Box& b, const DensityField& f, const DensityField& g,
                                const ScalarField& weight, const Patch& image, double tol = 1e-8);

enum class LiftRule {
  /// v~ = (d pi)^+ v.
  MinimalNorm,
  /// Minimal-norm lift plus a fixed combination of fiber tangents.
  Shifted,
};

/// Integral over the fiber pi^{-1}(b) of the retrenchment
/// mu_p(v~_1 ^ ... ^ v~_n ^ w_1 ^ ... ^ w_m), with w the fiber tangents and
/// v~ lifts of the columns of `reference` (fiber-last ordering).  Throws
/// DomainError when the fiber leaves pi^{-1}(b) by more than 1e-8 and
/// DegenerateError when d pi is not surjective.
QuadratureResult fiber_integral(const Map& pi, const DensityField& mu, const Vec& b, const Patch& fiber,
                                const Mat& reference, LiftRule rule = LiftRule::MinimalNorm,
                                const QuadratureOptions& opts = {});

using FiberFamily = std::function<Patch(const Vec& y)>;

/// int_P mu against int_B (pi_* mu)(e_1 ^ ... ^ e_n).
Check fubini_check(const Map& pi, const DensityField& mu, const Patch& total, const Patch& base,
                   const FiberFamily& fibers, double tol = 1e-6);

struct CoareaProblem {
  Map pi;                // R^{n+m} -> R^n
  Patch region;          // top-dimensional chart of A
  DensityField mu;       // top density on R^{n+m}
  DensityField f;        // m-density measuring the level sets
  Density lambda;        // top density on R^n
  Patch base;            // top-dimensional chart of pi(A)
  FiberFamily level_set; // chart of A cap pi^{-1}(y)
  ScalarField g;
};

/// int_A g C(d pi; lambda*, F*_mu) d mu against
/// int_B (int_{pi^{-1}(y)} g dF) d lambda(y).  Level sets are oriented
/// fiber-last when F is asymmetric.
Check coarea_check(const CoareaProblem& problem, double tol = 1e-6);

struct ImagePiece {
  Patch patch;
  int multiplicity = 1;
};

/// int_A J(df; F, G) dF against sum N_i int_{piece_i} dG.  Nodes where df
/// has smallest singular value below 1e-8 are excluded and reported.
Check area_check(const Map& f, const Box& a, const DensityField& fd, const DensityField& gd,
                 const std::vector<ImagePiece>& image, double tol = 1e-6, const QuadratureOptions& opts = {});

inline constexpr double kCriticalSingularValue = 1e-8;

}  // namespace anisotrope
