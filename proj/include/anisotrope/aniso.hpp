#pragma once

// Anisotropic geometry of hypersurfaces: area, Gauss maps, shape operators,
// tubes, Minkowski content, the isoperimetric and Sobolev inequalities and
// the first variation of the anisotropic area.

#include "anisotrope/convex.hpp"
#include "anisotrope/integrate.hpp"

namespace anisotrope {

/// Counter-clockwise boundary of c + r W for a planar support function.
/// Profiles give the exact support chart t -> grad h(u(t)); analytic gauges
/// the radial chart t -> u(t) / gauge(u(t)); otherwise the support chart is
/// differentiated numerically.  Panels sit at multiples of pi / 4.
Patch convex_boundary_patch(const SupportFunction& s, double scale = 1.0, const Vec& center = Vec::Zero(2));
Hypersurface convex_boundary(const SupportFunction& s, double scale = 1.0, const Vec& center = Vec::Zero(2));

struct SurfacePoint {
  int patch = 0;
  Vec param;
};

/// Euclidean unit normal, oriented so that Omega(nu ^ tangents) > 0.
Vec surface_normal(const Hypersurface& sigma, const SurfacePoint& at);

/// int_Sigma h(nu) dH, or int_Sigma h(-nu) dH for the interior area.
QuadratureResult anisotropic_area(const Hypersurface& sigma, const WulffShape& w, bool interior = false,
                                  const QuadratureOptions& opts = {});

/// n(b) = grad h(nu(b)), the point of the boundary of W supported by T_b Sigma.
Vec gauss_map(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at);
/// n^-(b) = grad h(-nu(b)): n^- ^ orient(Sigma) is negatively oriented.
Vec negative_gauss_map(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at);

/// Elementary symmetric polynomials c_0 .. c_n of the eigenvalues of s,
/// read off the characteristic polynomial (Faddeev-LeVerrier).
std::vector<double> elementary_symmetric(const Mat& s);

/// Chart step for differentiating the Gauss map, relative to the domain width.
inline constexpr double kShapeStep = 1e-4;

struct ShapeOperatorSample {
  Vec param;
  Vec point;
  Mat tangents;
  Vec normal;  // n(b), or n^-(b) for the negative operator
  /// S^F in the chart basis of T_b Sigma.
  Mat matrix;
  std::vector<double> c;

  double trace() const { return c.size() > 1 ? c[1] : 0.0; }
  double spectral_radius() const;
};

/// S^F(v) = P_b(d_b n(v)), P_b the projection onto T_b Sigma along n(b).
/// d n by central differences with step halving (Richardson); throws
/// DomainError for non-smooth h or unsettled differences and
/// DegenerateError when n(b) is tangent to Sigma.
ShapeOperatorSample shape_operator(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at,
                                   bool negative = false);

/// Trace of d n projected along nu against the trace projected along n.
struct PalmerSample {
  double trace_orthogonal = 0.0;
  double trace_oblique = 0.0;
  double residual = 0.0;
};
PalmerSample palmer_consistency(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at);
/// Max residual over `points` uniformly random chart points.
Check palmer_check(const Hypersurface& sigma, const WulffShape& w, int points, std::uint64_t seed, double tol = 1e-4);

/// tr {Y -> P^n(dX(Y))} over the chart basis of T_b Sigma.
double anisotropic_divergence(const Hypersurface& sigma, const WulffShape& w, const VectorField& x,
                              const SurfacePoint& at);

/// 0.2 / max spectral radius of S^F (and S^F_- when `both_sides`) over a
/// chart grid: the largest tube radius accepted.
double injectivity_bound(const Hypersurface& sigma, const WulffShape& w, bool both_sides = true);

/// int_Sigma c_k(S^F) dF for k = 0..n; the negative side uses S^F_- and the
/// interior area element h(-nu) dH.
std::vector<double> curvature_integrals(const Hypersurface& sigma, const WulffShape& w, bool negative = false);

/// sum_k eps^{k+1} / (k + 1) * integrals[k].
double tube_polynomial(const std::vector<double>& integrals, double eps);

/// Monte Carlo tube volumes for several radii from one sample: a point counts
/// towards radius eps when min_b F-bar(p - b) <= eps, split by the side of
/// Sigma it lies on.  Planar closed curves with one periodic chart only.
struct TubeCounts {
  std::vector<double> eps;
  std::vector<McEstimate> outer;
  std::vector<McEstimate> inner;
  std::vector<McEstimate> full;
  double box_volume = 0.0;
};
TubeCounts tube_mc(const Hypersurface& sigma, const WulffShape& w, const std::vector<double>& eps,
                   const MCConfig& mc);

enum class TubeSide { Outer, Full, Both };

struct TubeResult {
  double epsilon = 0.0;
  double epsilon_max = 0.0;
  bool full = false;
  double formula = 0.0;
  McEstimate mc;
  double sigma_residual = 0.0;
  Check check;
};

/// One-sided (outer) or full tube: formula against Monte Carlo within 3 sigma.
/// Both sides come from one sample, outer results first.  Throws DomainError
/// when eps exceeds the injectivity bound or Sigma is not closed.
std::vector<TubeResult> tube_volume(const Hypersurface& sigma, const WulffShape& w, const std::vector<double>& eps,
                                    const MCConfig& mc, TubeSide side = TubeSide::Outer);

struct MinkowskiResult {
  std::vector<double> t;
  std::vector<McEstimate> gain;  // vol(B + tW) - vol(B)
  std::vector<double> slope;     // gain / t
  std::vector<double> slope_error;
  double extrapolated = 0.0;
  double extrapolated_error = 0.0;
  double area = 0.0;  // Area_F of the boundary
  Check check;
};

/// Slopes at t0, t0 / 2, t0 / 4, extrapolated to 0 by two Richardson steps,
/// against Area_F(boundary of B).  Convex B: exact Minkowski sums through
/// support functions, membership by star-shaped polygons.
MinkowskiResult minkowski_content(const SupportFunction& body, const WulffShape& w, double t0, const MCConfig& mc,
                                  double tol = 1e-2);
/// Closed planar boundary, membership through the tube Monte Carlo.
MinkowskiResult minkowski_content(const Hypersurface& boundary, const WulffShape& w, double t0, const MCConfig& mc,
                                  double tol = 1e-2);

struct IsoperimetricResult {
  double area = 0.0;
  double volume_body = 0.0;
  double volume_wulff = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double ratio_std_error = 0.0;
  bool near_equality = false;
  Check check;
};

/// Area_F(boundary) against (n + 1) vol(W)^{1/(n+1)} vol(B)^{n/(n+1)};
/// passes when the ratio is at least 1 - 3 sigma.
IsoperimetricResult isoperimetric_check(const Hypersurface& boundary, const McEstimate& body_volume,
                                        const WulffShape& w);
IsoperimetricResult isoperimetric_check(const WulffShape& body, const WulffShape& w);

/// Area_F(boundary of W) = (n + 1) vol(W) within 3 sigma + 1e-6.
Check wulff_area_check(const WulffShape& w);

struct SobolevResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  Check check;
};

/// p = 1: int h(-grad |f|) against (n + 1) vol(W)^{1/(n+1)} ||f||_{(n+1)/n}.
/// 1 < p < n + 1: the Gagliardo-Nirenberg form.  Passes when the ratio is at
/// least 1 - 1e-3.
SobolevResult sobolev_check(const ScalarField& f, const Box& box, const WulffShape& w, double p = 1.0,
                            const QuadratureOptions& opts = {});
/// f(lambda x) on box / lambda leaves the ratio unchanged.
Check sobolev_scaling_probe(const ScalarField& f, const Box& box, const WulffShape& w, double lambda, double p = 1.0,
                            double tol = 1e-6);

/// Time-t flow of X from p by classical RK4, with its differential.
struct FlowStep {
  Vec point;
  Mat differential;
};
FlowStep flow(const VectorField& x, const Vec& p, double t, int steps = 8);

/// Area_F of phi_t(Sigma) with a fixed quadrature of `nodes` per axis.
double varied_area(const Hypersurface& sigma, const WulffShape& w, const VectorField& x, double t, int nodes = 256);

struct FirstVariationResult {
  double finite_difference = 0.0;
  double divergence_integral = 0.0;
  double normal_form = 0.0;  // int psi tr S^F dF
  double scale = 0.0;        // int |X| dF
  bool tangential = false;
  std::vector<Check> checks;
};

/// Central difference of Area_F(phi_t(Sigma)) against int div^F X dF and
/// against int psi tr S^F dF with X = psi n + X^T.  Residuals are relative
/// to max(|lhs|, |rhs|, scale).  Tangential fields must also give a
/// variation below 1e-6 of the scale.
FirstVariationResult first_variation_check(const Hypersurface& sigma, const WulffShape& w, const VectorField& x,
                                           double dt = 1e-3, double tol = 1e-4);

}  // namespace anisotrope
