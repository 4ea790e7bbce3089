#pragma once

// Volume densities on simple k-vectors, codensities on simple k-covectors,
// and the jacobian / cojacobian calculus built on them.

#include "anisotrope/exterior.hpp"
#include "anisotrope/montecarlo.hpp"
#include "anisotrope/report.hpp"
#include "anisotrope/sampling.hpp"

#include <memory>
#include <optional>
#include <random>

namespace anisotrope {

/// Positively homogeneous gauge on R^n, zero only at the origin.
struct Norm {
  int dim = 0;
  Functional gauge;
  bool symmetric = true;
  std::string name;

  double operator()(const Vec& v) const { return gauge(v); }
};

Norm euclidean_norm(int dim);
Norm lp_norm(int dim, double p);
Norm l1_norm(int dim);
Norm linf_norm(int dim);
/// x -> base(M x) for invertible M.
Norm linear_norm(const Mat& m, const Norm& base);

/// Sampled homogeneity and triangle-inequality checks; throws DomainError.
void validate_norm(const Norm& norm, std::uint64_t seed = 7);

enum class DensityKind { Euclidean, Busemann, HolmesThompson, WulffIntegrand, ScaledLebesgue, Custom };

std::string to_string(DensityKind kind);

class Density {
 public:
  using Evaluator = std::function<double(const SimpleKVector&)>;

  Density() = default;
  Density(int degree, int ambient_dim, Evaluator eval, bool symmetric, DensityKind kind, std::string name);

  int degree() const { return degree_; }
  int ambient_dim() const { return ambient_; }
  bool symmetric() const { return symmetric_; }
  DensityKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double operator()(const SimpleKVector& xi) const;
  double operator()(const Mat& spanning) const { return (*this)(SimpleKVector(spanning)); }

  /// For top-degree densities c |det|: the constant c with its Monte Carlo
  /// standard error (zero for exact constructions).
  std::optional<Estimate> constant() const { return constant_; }
  void set_constant(Estimate c) { constant_ = c; }

 private:
  int degree_ = 0;
  int ambient_ = 0;
  Evaluator eval_;
  bool symmetric_ = true;
  DensityKind kind_ = DensityKind::Custom;
  std::string name_;
  std::optional<Estimate> constant_;
};

/// Degree-0 density with value 1 on the empty wedge.
Density unit_density(int ambient_dim);

/// sqrt of the Gram determinant of the spanning vectors.
Density euclidean_density(int k, int n);

/// c |det| on R^n.
Density scaled_lebesgue(int n, double c);

/// |Omega| for a volume form.
Density abs_volume_form(const VolumeForm& omega);

/// Euclidean norm of Lambda^k M (xi); symmetric, invertible M.
Density linear_image_density(int k, const Mat& m);

/// l^p norm of the Grassmann coordinates (p = inf allowed).
Density grassmann_lp_density(int k, int n, double p);

/// Top density eps_n / vol(B) on R^n, the unit-ball volume by Monte Carlo.
Density busemann_density(const Norm& norm, const MCConfig& mc);

/// Top density vol(B*) / eps_n, dual-ball membership via a sampled sup.
Density holmes_thompson_density(const Norm& norm, const MCConfig& mc);

/// Per-axis extent of the unit ball of `norm`: sup of +-x_i over the ball.
Box unit_ball_box(const Norm& norm);
/// Per-axis extent of the dual unit ball: the norm of +-e_i.
Box dual_ball_box(const Norm& norm);

/// J(A; F, G) = G(Lambda A xi) / F(xi) with xi = e_1 ^ ... ^ e_n.  Zero when
/// degrees do not match the domain dimension or A is not injective.
double jacobian(const Mat& a, const Density& f, const Density& g);

/// Jacobian of A restricted to the span of the columns of `basis`
/// (oriented by that basis), with F and G of degree basis.cols().  The map
/// on the null space has jacobian 1.
double jacobian_on_subspace(const Mat& a, const Mat& basis, const Density& f, const Density& g);

/// m-codensity F*_mu on R^{n+m} from an n-density F and a top density mu.
class Codensity {
 public:
  enum class Route { Completion, Hodge };

  /// Completion route: complete the covectors to a dual basis and evaluate
  /// F(w_1 ^ ... ^ w_n) / mu(v_1 ^ ... ^ v_m ^ w_1 ^ ... ^ w_n).
  Codensity(Density f, Density mu, bool oriented);

  /// Hodge route: F o (iota*_Omega)^{-1}, with mu = |Omega|.
  static Codensity via_hodge(Density f, const VolumeForm& omega, bool oriented);

  /// Top-degree codensity mu*(v_1* ^ ... ^ v_m*) = 1 / mu(v_1 ^ ... ^ v_m).
  static Codensity top(Density mu);

  int degree() const { return mu_.degree() - f_.degree(); }
  int ambient_dim() const { return mu_.ambient_dim(); }
  bool oriented() const { return oriented_; }
  Route route() const { return route_; }
  const Density& base() const { return f_; }
  const Density& top_density() const { return mu_; }

  double operator()(const SimpleKCovector& omega) const;
  double operator()(const Mat& covectors) const { return (*this)(SimpleKCovector(covectors)); }

  /// Completion route with an explicitly supplied completion (columns).
  double evaluate_with_completion(const SimpleKCovector& omega, const Mat& completion) const;

 private:
  Codensity() = default;
  Density f_;
  Density mu_;
  bool oriented_ = false;
  Route route_ = Route::Completion;
  std::optional<VolumeForm> omega_;
};

/// C(A; nu*, F*_mu) = nu(e) F*_mu(rows of A).  Zero when the degrees do not
/// match the codomain or A is not surjective.
double cojacobian(const Mat& a, const Density& nu, const Codensity& fmu);
double cojacobian(const Mat& a, const Density& nu, const Density& f, const Density& mu, bool oriented);

/// The explicit formula F(w) nu(A v) / mu(v ^ w) with w a kernel basis and
/// v a right inverse; an independent path for cross-checks.
double cojacobian_explicit(const Mat& a, const Density& nu, const Density& f, const Density& mu);

/// Returns an estimate of vol(B_V) / vol({x : |Ax| <= 1}), which equals
/// eps_n / H_n of that body for the domain's Busemann measure.  Zero for
/// non-injective A.  A supplied box that misses the body is doubled up to
/// 2^10 times before giving up.
Estimate k_jacobian(const Mat& a, const Norm& domain, const Norm& range, const MCConfig& mc);

/// Jacobian of a square map for Busemann densities on both sides, with the
/// combined standard error of the two ball volumes.
Estimate busemann_jacobian(const Mat& a, const Density& domain, const Density& range);

/// The functional dual to a convex gauge g: x -> sup_{g(p) <= 1} <x, p>.
class DualFunctional {
 public:
  DualFunctional(Functional g, int dim, int samples = kLevelSetSamples);

  double operator()(const Vec& x) const { return sampler_->sup(x).value; }
  int dim() const { return sampler_->dim(); }
  const LevelSetSampler& sampler() const { return *sampler_; }

  /// The vector v_f with g*(f) = g(v_f) and f(v_f / g(v_f)) maximal, where
  /// g plays the role of the gauge F-bar.  Throws DomainError when the
  /// maximiser is not unique (g not strictly convex).
  Vec legendre(const Vec& f) const;

 private:
  std::shared_ptr<const LevelSetSampler> sampler_;
};

Functional dual_functional(Functional g, int dim);
Vec legendre(const Vec& f, Functional gauge, int dim);

/// The five jacobian / cojacobian identities on linear maps.  Each returns a
/// relative-residual check; hypothesis violations produce a failed check
/// with a note rather than an exception.
Check identity_a(const Mat& a, const Density& mu, const Density& nu, double tol = 1e-9);
Check identity_b(const Mat& a, const Mat& t, const Density& mu, const Density& g, const Density& h,
                 double tol = 1e-9);
Check identity_c(const Mat& a, const Mat& t, const Codensity& fmu, const Codensity& gnu, const Density& lambda,
                 double tol = 1e-9);
Check identity_d(const Mat& a, const Mat& t, const Codensity& fmu, const Density& nu, const Density& lambda,
                 double tol = 1e-9);
Check identity_e(const Mat& a, const Mat& t, const Density& mu, const Density& nu, const Density& f,
                 const Density& g, const Density& lambda, double tol = 1e-9);

/// Random symmetric exact densities of every kind the identities accept.
Density random_density(int k, int n, std::mt19937_64& rng);
/// Gaussian matrix with condition number below 1e8.
Mat random_matrix(int rows, int cols, std::mt19937_64& rng);

struct IdentitySummary {
  char identity = 'a';
  int instances = 0;
  int failures = 0;
  double max_residual = 0.0;
  Check worst;
};

/// Runs `count` random instances of identity `which` ('a'..'e') with
/// dimensions up to `max_dim`.
IdentitySummary verify_identities(char which, int count, std::uint64_t seed, int max_dim = 5, double tol = 1e-9);

/// Codensities on random inputs: two random completions against the
/// orthogonal one (`which` = 'w'), or the completion route against the Hodge
/// route with mu = |Omega| (`which` = 'h').  Ambient dimensions 2..max_dim.
IdentitySummary verify_codensities(char which, int count, std::uint64_t seed, int max_dim = 5, double tol = 1e-9);

}  // namespace anisotrope
