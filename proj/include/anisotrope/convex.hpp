#pragma once

// Wulff shapes described by their support functions.

#include "anisotrope/densities.hpp"

#include <optional>

namespace anisotrope {

using Gradient = std::function<Vec(const Vec&)>;

/// Planar support function h(r (cos t, sin t)) = r H(t) from a 2 pi-periodic
/// H with its first two derivatives.
struct AngularProfile {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// A convex body W with the origin in its interior, given by h = h_W.
struct SupportFunction {
  int dim = 0;
  Functional h;
  /// Analytic gradient of h; central differences otherwise.
  std::optional<Gradient> gradient;
  /// Analytic gauge of W (the polar of h); sampled duality otherwise.
  std::optional<Functional> gauge;
  std::optional<Gradient> gauge_gradient;
  /// Planar bodies built from an angular profile keep it for exact charts.
  std::optional<AngularProfile> profile;
  bool symmetric = true;
  /// h is C^1 away from 0, so anisotropic normals exist.
  bool differentiable = true;
  /// h is C^2 away from 0, so the anisotropic shape operator exists.
  bool curvature = true;
  std::string name;
};

SupportFunction euclidean_support(int dim);
/// W is the unit ball of the l^p norm, so h is the l^{p/(p-1)} norm.
SupportFunction pnorm_support(int dim, double p);
/// W is the axis-aligned ellipse or ellipsoid with the given semi-axes.
SupportFunction ellipse_support(const std::vector<double>& semi_axes);
/// W = [-1, 1]^n, h the l^1 norm.  Not differentiable.
SupportFunction square_support(int dim);
/// W + c; the origin must stay inside.
SupportFunction translated_support(const SupportFunction& base, const Vec& c);

SupportFunction planar_support(AngularProfile profile, std::string name);

/// H(t) = c0 + sum_k a_k cos kt + b_k sin kt.
AngularProfile trig_profile(double c0, const std::vector<double>& a, const std::vector<double>& b);

/// Periodic cubic spline through values tabulated at t_j = 2 pi j / N.
AngularProfile spline_profile(const std::vector<double>& values);
SupportFunction custom_support(const std::vector<double>& values);

/// Random support function c0 + sum_{k <= 4} a_k cos kt + b_k sin kt,
/// redrawn until min(H'' + H) > 0.05 c0 on a fine grid.
SupportFunction random_planar_body(std::mt19937_64& rng, double c0 = 1.0);

/// min over an angular grid of H'' + H, the planar radius of curvature.
double min_curvature_radius(const AngularProfile& profile, int grid = 4096);

inline constexpr double kGradientStep = 1e-5;
inline constexpr double kGradientAgreement = 1e-6;

class WulffShape {
 public:
  /// Samples convexity and positivity of h, builds the gauge and estimates
  /// vol(W) by Monte Carlo with `mc`.
  WulffShape(SupportFunction support, const MCConfig& mc);

  int dim() const { return s_.dim; }
  const std::string& name() const { return s_.name; }
  bool symmetric() const { return s_.symmetric; }
  bool differentiable() const { return s_.differentiable; }
  bool has_curvature() const { return s_.curvature; }
  const SupportFunction& support_function() const { return s_; }

  double support(const Vec& u) const { return s_.h(u); }
  /// Gradient of h: analytic, or central differences validated by halving.
  /// Throws DomainError for non-differentiable h.
  Vec support_gradient(const Vec& u) const;

  /// The gauge F-bar, whose unit ball is W.
  double gauge(const Vec& v) const;
  /// F-bar*, the support function evaluated on a covector.
  double dual(const Vec& f) const { return s_.h(f); }
  bool contains(const Vec& v) const { return gauge(v) <= 1.0; }

  /// [-h(-e_i), h(e_i)] per axis.
  Box bounding_box() const;
  const McEstimate& volume() const { return volume_; }

  /// Gauge through sampled duality, whatever the analytic gauge is.
  double sampled_gauge(const Vec& v) const;

 private:
  SupportFunction s_;
  std::shared_ptr<const DualFunctional> sampled_;
  McEstimate volume_;
};

/// Euclidean unit normal of the hyperplane spanned by the columns of
/// `tangents`, oriented so that Omega(nu ^ v_1 ^ ... ^ v_n) > 0.
Vec oriented_normal(const Mat& tangents, const VolumeForm& omega);

/// n = grad h(nu), the point of the boundary of W where the hyperplane with
/// outer normal nu supports W.  Checks gauge(n) = 1 to 1e-6 and <nu, n> = h(nu).
Vec anisotropic_normal(const WulffShape& w, const Mat& tangents, const VolumeForm& omega);

/// F(xi) = h(iota*_Omega(xi)) on (dim - 1)-vectors.
Density wulff_integrand(const WulffShape& w, const VolumeForm& omega);

/// | |Omega|(w ^ v_1 ^ ... ^ v_n) - F-bar(w) F(v_1 ^ ... ^ v_n) | / RHS.
double check_multiplication(const WulffShape& w, const VolumeForm& omega, const Vec& vec, const Mat& tangents);

}  // namespace anisotrope
