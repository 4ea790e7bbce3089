#include "anisotrope/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anisotrope {

namespace {

Vec basis_vector(int n, int i, double s = 1.0) {
  Vec e = Vec::Zero(n);
  e[i] = s;
  return e;
}

// sqrt(det V^T V) as |det R| from a QR factorization; the Gram matrix itself
// would square the condition number.
double gram_root(const Mat& v) {
  if (v.cols() == 0) return 1.0;
  if (v.cols() > v.rows()) return 0.0;
  const Eigen::ColPivHouseholderQR<Mat> qr(v);
  return std::abs(qr.matrixR().topRows(v.cols()).diagonal().prod());
}

Mat orthonormal_column_basis(const Mat& a) {
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(a.rows(), a.rows());
  return q.leftCols(a.cols());
}

Density top_constant_density(int n, double c, DensityKind kind, std::string name) {
  Density d(
      n, n, [c](const SimpleKVector& xi) { return c * std::abs(xi.spanning().determinant()); }, true, kind,
      std::move(name));
  return d;
}

}  // namespace

Norm euclidean_norm(int dim) { return {dim, [](const Vec& v) { return v.norm(); }, true, "euclidean"}; }

Norm lp_norm(int dim, double p) {
  if (!(p >= 1.0)) throw DomainError("l^p norm needs p >= 1");
  if (std::isinf(p)) return linf_norm(dim);
  if (p == 1.0) return l1_norm(dim);
  return {dim,
          [p](const Vec& v) {
            const double m = v.cwiseAbs().maxCoeff();
            if (m == 0.0) return 0.0;
            double s = 0.0;
            for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, p);
            return m * std::pow(s, 1.0 / p);
          },
          true, "l" + std::to_string(p)};
}

Norm l1_norm(int dim) { return {dim, [](const Vec& v) { return v.lpNorm<1>(); }, true, "l1"}; }

Norm linf_norm(int dim) {
  return {dim, [](const Vec& v) { return v.lpNorm<Eigen::Infinity>(); }, true, "linf"};
}

Norm linear_norm(const Mat& m, const Norm& base) {
  if (m.rows() != base.dim || m.cols() != base.dim) throw DimensionError("linear_norm: matrix does not act on R^n");
  if (numerical_rank(m) < base.dim) throw DegenerateError("linear_norm: matrix is singular");
  auto g = base.gauge;
  return {base.dim, [m, g](const Vec& v) { return g(m * v); }, base.symmetric, base.name + "(linear)"};
}

void validate_norm(const Norm& norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 200; ++trial) {
    Vec x(norm.dim), y(norm.dim);
    for (int i = 0; i < norm.dim; ++i) {
      x[i] = gauss(rng);
      y[i] = gauss(rng);
    }
    const double gx = norm(x);
    if (!(gx > 0.0) || !std::isfinite(gx)) throw DomainError("norm " + norm.name + " is not positive away from 0");
    for (double a : {0.5, 2.0, 7.0}) {
      if (relative_difference(norm(a * x), a * gx) > 1e-10) {
        throw DomainError("norm " + norm.name + " is not positively homogeneous");
      }
    }
    if (norm(x + y) > (gx + norm(y)) * (1.0 + 1e-12)) {
      throw DomainError("norm " + norm.name + " violates the triangle inequality");
    }
  }
}

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::Euclidean: return "euclidean";
    case DensityKind::Busemann: return "busemann";
    case DensityKind::HolmesThompson: return "holmes-thompson";
    case DensityKind::WulffIntegrand: return "wulff-integrand";
    case DensityKind::ScaledLebesgue: return "scaled-lebesgue";
    case DensityKind::Custom: return "custom";
  }
  return "custom";
}

Density::Density(int degree, int ambient_dim, Evaluator eval, bool symmetric, DensityKind kind, std::string name)
    : degree_(degree), ambient_(ambient_dim), eval_(std::move(eval)), symmetric_(symmetric), kind_(kind),
      name_(std::move(name)) {
  if (degree < 0 || degree > ambient_dim) {
    throw DimensionError("density degree " + std::to_string(degree) + " does not fit R^" + std::to_string(ambient_dim));
  }
}

double Density::operator()(const SimpleKVector& xi) const {
  if (xi.degree() != degree_ || xi.ambient_dim() != ambient_) {
    throw DimensionError("density " + name_ + " of degree " + std::to_string(degree_) + " on R^" +
                         std::to_string(ambient_) + " evaluated on a " + std::to_string(xi.degree()) +
                         "-vector in R^" + std::to_string(xi.ambient_dim()));
  }
  return eval_(xi);
}

Density unit_density(int ambient_dim) {
  return Density(0, ambient_dim, [](const SimpleKVector&) { return 1.0; }, true, DensityKind::Custom, "unit");
}

Density euclidean_density(int k, int n) {
  return Density(k, n, [](const SimpleKVector& xi) { return gram_root(xi.spanning()); }, true, DensityKind::Euclidean,
                 "euclidean");
}

Density scaled_lebesgue(int n, double c) {
  if (!(c > 0.0)) throw DomainError("scaled Lebesgue density needs a positive constant");
  Density d = top_constant_density(n, c, DensityKind::ScaledLebesgue, "lebesgue*" + std::to_string(c));
  d.set_constant({c, 0.0});
  return d;
}

Density abs_volume_form(const VolumeForm& omega) {
  Density d = top_constant_density(omega.dim, std::abs(omega.scale), DensityKind::ScaledLebesgue, "|omega|");
  d.set_constant({std::abs(omega.scale), 0.0});
  return d;
}

Density linear_image_density(int k, const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionError("linear_image_density: square matrix expected");
  if (numerical_rank(m) < m.rows()) throw DegenerateError("linear_image_density: singular matrix");
  return Density(
      k, static_cast<int>(m.rows()), [m](const SimpleKVector& xi) { return gram_root(m * xi.spanning()); }, true,
      DensityKind::Euclidean, "euclidean(linear image)");
}

Density grassmann_lp_density(int k, int n, double p) {
  return Density(
      k, n,
      [p](const SimpleKVector& xi) {
        double s = 0.0;
        double m = 0.0;
        const auto coords = grassmann_coords(xi);
        for (const auto& [key, v] : coords) m = std::max(m, std::abs(v));
        if (std::isinf(p) || m == 0.0) return m;
        for (const auto& [key, v] : coords) s += std::pow(std::abs(v) / m, p);
        return m * std::pow(s, 1.0 / p);
      },
      true, DensityKind::Custom, "grassmann-l" + std::to_string(p));
}

Box unit_ball_box(const Norm& norm) {
  const LevelSetSampler sampler(norm.gauge, norm.dim);
  Box box;
  for (int i = 0; i < norm.dim; ++i) {
    const double hi = sampler.sup(basis_vector(norm.dim, i)).value;
    const double lo = -sampler.sup(basis_vector(norm.dim, i, -1.0)).value;
    box.axes.push_back({lo, hi});
  }
  return box;
}

Box dual_ball_box(const Norm& norm) {
  Box box;
  for (int i = 0; i < norm.dim; ++i) {
    box.axes.push_back({-norm(basis_vector(norm.dim, i, -1.0)), norm(basis_vector(norm.dim, i))});
  }
  return box;
}

namespace {

Box padded(const Box& box) { return box.padded(kBoxPadding); }

Estimate ratio_estimate(double num, double num_err, double den, double den_err) {
  const double v = num / den;
  return {v, std::abs(v) * std::hypot(num_err / num, den_err / den)};
}

}  // namespace

Density busemann_density(const Norm& norm, const MCConfig& mc) {
  const Box box = mc.box ? *mc.box : padded(unit_ball_box(norm));
  const auto vol = mc_volume([&](const Vec& p) { return norm(p) <= 1.0; }, box, mc);
  if (vol.zero_hits) throw DomainError("busemann_density: no sample hit the unit ball of " + norm.name);
  const double eps = unit_ball_volume(norm.dim);
  const Estimate c = ratio_estimate(eps, 0.0, vol.value, vol.std_error);
  Density d = top_constant_density(norm.dim, c.value, DensityKind::Busemann, "busemann(" + norm.name + ")");
  d.set_constant(c);
  return d;
}

Density holmes_thompson_density(const Norm& norm, const MCConfig& mc) {
  const LevelSetSampler sampler(norm.gauge, norm.dim);
  sampler.check_convex();
  const Box box = mc.box ? *mc.box : padded(dual_ball_box(norm));
  const auto vol = mc_volume([&](const Vec& f) { return sampler.sup_at_most(f, 1.0); }, box, mc);
  if (vol.zero_hits) throw DomainError("holmes_thompson_density: no sample hit the dual ball of " + norm.name);
  const double eps = unit_ball_volume(norm.dim);
  const Estimate c{vol.value / eps, vol.std_error / eps};
  Density d = top_constant_density(norm.dim, c.value, DensityKind::HolmesThompson, "holmes-thompson(" + norm.name + ")");
  d.set_constant(c);
  return d;
}

double jacobian(const Mat& a, const Density& f, const Density& g) {
  const int n = static_cast<int>(a.cols());
  if (f.degree() != n || g.degree() != n || f.ambient_dim() != n || g.ambient_dim() != a.rows()) return 0.0;
  if (!is_injective(a)) return 0.0;
  const Mat xi = Mat::Identity(n, n);
  const double fx = f(xi);
  if (!(fx > 0.0)) throw DegenerateError("jacobian: domain density vanishes on e_1 ^ ... ^ e_n");
  return g(Mat(a)) / fx;
}

double jacobian_on_subspace(const Mat& a, const Mat& basis, const Density& f, const Density& g) {
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return 1.0;
  if (f.degree() != k || g.degree() != k || f.ambient_dim() != a.cols() || g.ambient_dim() != a.rows()) return 0.0;
  const Mat image = a * basis;
  if (numerical_rank(image) < k) return 0.0;
  const double fx = f(basis);
  if (!(fx > 0.0)) throw DegenerateError("jacobian_on_subspace: domain density vanishes on the basis");
  return g(image) / fx;
}

Codensity::Codensity(Density f, Density mu, bool oriented) : f_(std::move(f)), mu_(std::move(mu)), oriented_(oriented) {
  if (mu_.degree() != mu_.ambient_dim()) throw DimensionError("codensity: mu must have top degree");
  if (f_.ambient_dim() != mu_.ambient_dim()) throw DimensionError("codensity: F and mu live on different spaces");
  if (f_.degree() >= mu_.degree()) throw DimensionError("codensity: deg F must be below the ambient dimension");
  if (!mu_.symmetric()) throw DomainError("codensity: the top density must be symmetric");
  if (!f_.symmetric() && !oriented_) {
    throw DomainError("codensity: asymmetric density " + f_.name() + " needs oriented mode");
  }
}

Codensity Codensity::via_hodge(Density f, const VolumeForm& omega, bool oriented) {
  if (oriented && !(omega.scale > 0.0)) throw DomainError("codensity: oriented Hodge route needs a positive volume form");
  Codensity c(std::move(f), abs_volume_form(omega), oriented);
  c.route_ = Route::Hodge;
  c.omega_ = omega;
  return c;
}

Codensity Codensity::top(Density mu) {
  const int n = mu.ambient_dim();
  return Codensity(unit_density(n), std::move(mu), false);
}

double Codensity::operator()(const SimpleKCovector& omega) const {
  if (omega.degree() != degree() || omega.ambient_dim() != ambient_dim()) {
    throw DimensionError("codensity of degree " + std::to_string(degree()) + " evaluated on a " +
                         std::to_string(omega.degree()) + "-covector");
  }
  if (route_ == Route::Hodge) {
    if (omega.is_zero()) throw DegenerateError("codensity: dependent covectors");
    if (f_.degree() == 0) {
      const double c = omega.oriented_spanning().determinant() / omega_->scale;
      return std::abs(c) * f_(SimpleKVector(Mat(ambient_dim(), 0), c >= 0.0 ? 1 : -1));
    }
    return f_(iota_star_inverse(*omega_, omega));
  }
  const Mat cov = omega.oriented_spanning();
  const DualBasisPair pair = complete_to_basis(cov, ambient_dim(), oriented_);
  return f_(SimpleKVector(pair.completion_vectors())) / mu_(SimpleKVector(pair.vectors));
}

double Codensity::evaluate_with_completion(const SimpleKCovector& omega, const Mat& completion) const {
  if (omega.degree() != degree() || omega.ambient_dim() != ambient_dim()) {
    throw DimensionError("codensity evaluated on a covector of the wrong degree");
  }
  const Mat cov = omega.oriented_spanning();
  DualBasisPair pair = dual_pair(cov, completion);
  if (oriented_ && pair.vectors.determinant() < 0.0) {
    Mat fixed = completion;
    fixed.col(0) *= -1.0;
    pair = dual_pair(cov, fixed);
  }
  return f_(SimpleKVector(pair.completion_vectors())) / mu_(SimpleKVector(pair.vectors));
}

double cojacobian(const Mat& a, const Density& nu, const Codensity& fmu) {
  const int m = static_cast<int>(a.rows());
  if (nu.degree() != m || fmu.degree() != m || nu.ambient_dim() != m || fmu.ambient_dim() != a.cols()) return 0.0;
  if (!is_surjective(a)) return 0.0;
  const double scale = nu(Mat(Mat::Identity(m, m)));
  return scale * fmu(Mat(a.transpose()));
}

double cojacobian(const Mat& a, const Density& nu, const Density& f, const Density& mu, bool oriented) {
  return cojacobian(a, nu, Codensity(f, mu, oriented));
}

double cojacobian_explicit(const Mat& a, const Density& nu, const Density& f, const Density& mu) {
  const int m = static_cast<int>(a.rows());
  const int total = static_cast<int>(a.cols());
  if (nu.degree() != m || mu.degree() != total || mu.degree() - f.degree() != m) return 0.0;
  if (!is_surjective(a)) return 0.0;
  Mat w = kernel_basis(a);
  const Mat v = a.transpose() * (a * a.transpose()).inverse();
  Mat basis(total, total);
  basis << v, w;
  if (w.cols() > 0 && basis.determinant() < 0.0) {
    w.col(0) *= -1.0;
    basis << v, w;
  }
  return f(w) * nu(Mat(a * v)) / mu(basis);
}

Estimate k_jacobian(const Mat& a, const Norm& domain, const Norm& range, const MCConfig& mc) {
  if (a.cols() != domain.dim || a.rows() != range.dim) throw DimensionError("k_jacobian: map does not match the norms");
  if (!is_injective(a)) return {0.0, 0.0};
  const int n = domain.dim;
  const Mat pinv = (a.transpose() * a).inverse() * a.transpose();
  const LevelSetSampler range_ball(range.gauge, range.dim);
  Box bound;
  for (int i = 0; i < n; ++i) {
    const Vec row = pinv.row(i).transpose();
    bound.axes.push_back({-range_ball.sup(-row).value, range_ball.sup(row).value});
  }
  bound = padded(bound);
  Box box = bound;
  if (mc.box) {
    box = *mc.box;
    auto covers = [&](const Box& b) {
      for (int i = 0; i < n; ++i) {
        if (b.axes[i].lo > bound.axes[i].lo || b.axes[i].hi < bound.axes[i].hi) return false;
      }
      return true;
    };
    int doublings = 0;
    while (!covers(box)) {
      if (++doublings > 10) throw DomainError("k_jacobian: body does not fit in the sampling box after 10 doublings");
      box = box.expanded(2.0);
    }
  }
  const auto body = mc_volume([&](const Vec& x) { return range(a * x) <= 1.0; }, box, mc);
  MCConfig ball_mc = mc.with_seed(derive_seed(mc.seed, 0x4b));
  ball_mc.box.reset();
  const auto ball = mc_volume([&](const Vec& x) { return domain(x) <= 1.0; }, padded(unit_ball_box(domain)), ball_mc);
  if (body.zero_hits || ball.zero_hits) throw DomainError("k_jacobian: no sample hit the body");
  return ratio_estimate(ball.value, ball.std_error, body.value, body.std_error);
}

Estimate busemann_jacobian(const Mat& a, const Density& domain, const Density& range) {
  const double j = jacobian(a, domain, range);
  const auto cv = domain.constant();
  const auto cw = range.constant();
  if (!cv || !cw) return {j, 0.0};
  return {j, j * std::hypot(cv->std_error / cv->value, cw->std_error / cw->value)};
}

DualFunctional::DualFunctional(Functional g, int dim, int samples)
    : sampler_(std::make_shared<const LevelSetSampler>(std::move(g), dim, samples)) {
  sampler_->check_convex();
}

Vec DualFunctional::legendre(const Vec& f) const {
  if (f.norm() == 0.0) throw DomainError("legendre: f must be non-zero");
  if (sampler_->flat_neighbours(f, 1e-12) > 0) {
    throw DomainError("legendre: maximiser is not unique, the gauge is not strictly convex");
  }
  const auto s = sampler_->sup(f);
  return s.value * s.argmax;
}

Functional dual_functional(Functional g, int dim) {
  auto dual = std::make_shared<DualFunctional>(std::move(g), dim);
  return [dual](const Vec& x) { return (*dual)(x); };
}

Vec legendre(const Vec& f, Functional gauge, int dim) { return DualFunctional(std::move(gauge), dim).legendre(f); }

namespace {

Check failed_hypothesis(std::string name, std::string tag, std::string why) {
  Check c = make_check(std::move(name), std::move(tag), 0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0);
  c.note = "hypothesis violated: " + std::move(why);
  return c;
}

bool is_top(const Density& d, int n) { return d.degree() == n && d.ambient_dim() == n; }

}  // namespace

Check identity_a(const Mat& a, const Density& mu, const Density& nu, double tol) {
  const std::string tag = "jacobian equals cojacobian of top densities";
  const int n = static_cast<int>(a.cols());
  if (a.rows() != n || !is_top(mu, n) || !is_top(nu, n)) {
    return failed_hypothesis("identity (a)", tag, "square map with top densities on both sides");
  }
  const double lhs = jacobian(a, mu, nu);
  const double rhs = cojacobian(a, nu, Codensity::top(mu));
  return relative_check("identity (a)", tag, lhs, rhs, tol);
}

Check identity_b(const Mat& a, const Mat& t, const Density& mu, const Density& g, const Density& h, double tol) {
  const std::string tag = "chain rule for jacobians";
  const int n = static_cast<int>(a.cols());
  if (t.cols() != a.rows() || !is_top(mu, n) || g.degree() != n || g.ambient_dim() != a.rows() || h.degree() != n ||
      h.ambient_dim() != t.rows()) {
    return failed_hypothesis("identity (b)", tag, "degrees must equal dim V");
  }
  const double lhs = jacobian(t * a, mu, h);
  double rhs = 0.0;
  if (is_injective(a)) rhs = jacobian(a, mu, g) * jacobian_on_subspace(t, orthonormal_column_basis(a), g, h);
  return relative_check("identity (b)", tag, lhs, rhs, tol);
}

Check identity_c(const Mat& a, const Mat& t, const Codensity& fmu, const Codensity& gnu, const Density& lambda,
                 double tol) {
  const std::string tag = "chain rule for cojacobians";
  const int n = static_cast<int>(t.rows());
  if (t.cols() != a.rows() || fmu.ambient_dim() != a.cols() || gnu.ambient_dim() != a.rows() || fmu.degree() != n ||
      gnu.degree() != n || !is_top(lambda, n)) {
    return failed_hypothesis("identity (c)", tag, "codensity degrees must equal dim Z");
  }
  const double lhs = cojacobian(t * a, lambda, fmu);
  double rhs = 0.0;
  if (is_surjective(t)) {
    const Mat q = orthonormal_column_basis(t.transpose());
    const Mat pulled = a.transpose() * q;
    const double j = numerical_rank(pulled) < n ? 0.0 : fmu(pulled) / gnu(q);
    rhs = cojacobian(t, lambda, gnu) * j;
  }
  return relative_check("identity (c)", tag, lhs, rhs, tol);
}

Check identity_d(const Mat& a, const Mat& t, const Codensity& fmu, const Density& nu, const Density& lambda,
                 double tol) {
  const std::string tag = "cojacobian of a composition with an equidimensional map";
  const int n = static_cast<int>(t.rows());
  if (t.cols() != n || a.rows() != n || fmu.ambient_dim() != a.cols() || fmu.degree() != n || !is_top(nu, n) ||
      !is_top(lambda, n)) {
    return failed_hypothesis("identity (d)", tag, "dim W = dim Z = codensity degree");
  }
  const double lhs = cojacobian(t * a, lambda, fmu);
  const double ca = cojacobian(a, nu, fmu);
  const double r1 = cojacobian(t, lambda, Codensity::top(nu)) * ca;
  const double r2 = jacobian(t, nu, lambda) * ca;
  Check c = make_check("identity (d)", tag, lhs, r1,
                       std::max(relative_difference(lhs, r1), relative_difference(lhs, r2)), tol);
  c.note = "second form J(T) C(A) = " + std::to_string(r2);
  return c;
}

Check identity_e(const Mat& a, const Mat& t, const Density& mu, const Density& nu, const Density& f,
                 const Density& g, const Density& lambda, double tol) {
  const std::string tag = "jacobian on the kernel times cojacobian";
  const int n = static_cast<int>(a.cols());
  const int k = static_cast<int>(t.rows());
  if (a.rows() != n || t.cols() != n || !is_top(mu, n) || !is_top(nu, n) || f.degree() != n - k ||
      g.degree() != n - k || !is_top(lambda, k) || k < 1) {
    return failed_hypothesis("identity (e)", tag, "A square, T onto R^k, F and G of degree n - k");
  }
  if (!is_injective(a) || !is_surjective(t)) {
    return failed_hypothesis("identity (e)", tag, "A must be invertible and T surjective");
  }
  const Mat ta = t * a;
  const Mat kernel = kernel_basis(ta);
  const double jk = kernel.cols() == 0 ? 1.0 : jacobian_on_subspace(a, kernel, f, g);
  const double lhs = jk * cojacobian(ta, lambda, Codensity(f, mu, false));
  const double rhs = cojacobian(t, lambda, Codensity(g, nu, false)) * jacobian(a, mu, nu);
  return relative_check("identity (e)", tag, lhs, rhs, tol);
}

Mat random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  while (true) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    }
    if (rows == 0 || cols == 0) return m;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    if (s[s.size() - 1] > 1e-8 * s[0]) return m;
  }
}

Density random_density(int k, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  std::uniform_int_distribution<int> pick(0, 3);
  // The null-space jacobian is 1 by convention, which pins degree-0 densities to 1.
  if (k == 0) return unit_density(n);
  if (k == n) {
    switch (pick(rng) % 3) {
      case 0: return euclidean_density(n, n);
      case 1: return scaled_lebesgue(n, unit(rng));
      default: {
        // A Busemann density of an ellipsoid norm, whose constant is known exactly.
        const Mat m = random_matrix(n, n, rng);
        const double c = std::abs(m.determinant());
        Density d = top_constant_density(n, c, DensityKind::Busemann, "busemann(ellipsoid)");
        d.set_constant({c, 0.0});
        return d;
      }
    }
  }
  switch (pick(rng)) {
    case 0: return euclidean_density(k, n);
    case 1: return linear_image_density(k, random_matrix(n, n, rng));
    case 2: {
      const double ps[] = {1.0, 3.0, std::numeric_limits<double>::infinity()};
      return grassmann_lp_density(k, n, ps[std::uniform_int_distribution<int>(0, 2)(rng)]);
    }
    default: {
      if (k != n - 1) return linear_image_density(k, random_matrix(n, n, rng));
      // Wulff integrand of an ellipsoid: h(iota*(xi)) with h(u) = |M^T u|.
      const Mat m = random_matrix(n, n, rng);
      const VolumeForm omega{n, 1.0};
      return Density(
          k, n,
          [m, omega](const SimpleKVector& xi) {
            if (xi.is_zero()) return 0.0;
            const Vec u = iota_star(omega, xi).oriented_spanning().col(0);
            return (m.transpose() * u).norm();
          },
          true, DensityKind::WulffIntegrand, "wulff(ellipsoid)");
    }
  }
}

IdentitySummary verify_identities(char which, int count, std::uint64_t seed, int max_dim, double tol) {
  IdentitySummary out;
  out.identity = which;
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(which)));
  auto dim_between = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int i = 0; i < count; ++i) {
    Check c;
    switch (which) {
      case 'a': {
        const int n = dim_between(1, max_dim);
        c = identity_a(random_matrix(n, n, rng), random_density(n, n, rng), random_density(n, n, rng), tol);
        break;
      }
      case 'b': {
        const int n = dim_between(1, max_dim);
        const int p = dim_between(n, max_dim);
        const int q = dim_between(n, max_dim);
        c = identity_b(random_matrix(p, n, rng), random_matrix(q, p, rng), random_density(n, n, rng),
                       random_density(n, p, rng), random_density(n, q, rng), tol);
        break;
      }
      case 'c': {
        const int n = dim_between(1, max_dim);
        const int p = dim_between(n, max_dim);
        const int total = dim_between(p, max_dim);
        const Codensity fmu(random_density(total - n, total, rng), random_density(total, total, rng), false);
        const Codensity gnu(random_density(p - n, p, rng), random_density(p, p, rng), false);
        c = identity_c(random_matrix(p, total, rng), random_matrix(n, p, rng), fmu, gnu, random_density(n, n, rng),
                       tol);
        break;
      }
      case 'd': {
        const int n = dim_between(1, max_dim);
        const int total = dim_between(n, max_dim);
        const Codensity fmu(random_density(total - n, total, rng), random_density(total, total, rng), false);
        c = identity_d(random_matrix(n, total, rng), random_matrix(n, n, rng), fmu, random_density(n, n, rng),
                       random_density(n, n, rng), tol);
        break;
      }
      case 'e': {
        const int n = dim_between(1, max_dim);
        const int k = dim_between(1, n);
        c = identity_e(random_matrix(n, n, rng), random_matrix(k, n, rng), random_density(n, n, rng),
                       random_density(n, n, rng), random_density(n - k, n, rng), random_density(n - k, n, rng),
                       random_density(k, k, rng), tol);
        break;
      }
      default: throw DomainError(std::string("unknown identity '") + which + "'");
    }
    ++out.instances;
    if (!c.pass) ++out.failures;
    if (i == 0 || c.residual > out.max_residual) {
      out.max_residual = c.residual;
      out.worst = c;
    }
  }
  return out;
}

IdentitySummary verify_codensities(char which, int count, std::uint64_t seed, int max_dim, double tol) {
  if (which != 'w' && which != 'h') throw DomainError(std::string("unknown codensity check '") + which + "'");
  if (max_dim < 2) throw DimensionError("codensity checks need ambient dimension >= 2");
  IdentitySummary out;
  out.identity = which;
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(which)));
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  for (int i = 0; i < count; ++i) {
    const int total = std::uniform_int_distribution<int>(2, max_dim)(rng);
    const int n = std::uniform_int_distribution<int>(1, total - 1)(rng);
    const int m = total - n;
    const Density f = random_density(n, total, rng);
    const SimpleKCovector eta(random_matrix(total, m, rng));
    Check c;
    if (which == 'w') {
      const Codensity fmu(f, random_density(total, total, rng), false);
      const double a = fmu.evaluate_with_completion(eta, random_matrix(total, n, rng));
      const double b = fmu.evaluate_with_completion(eta, random_matrix(total, n, rng));
      const double ref = fmu(eta);
      c = make_check("codensity completion independence", "F*_mu(eta) does not depend on the completion", a, ref,
                     std::max(relative_difference(a, ref), relative_difference(b, ref)), tol);
    } else {
      const VolumeForm omega{total, scale(rng)};
      const double a = Codensity(f, abs_volume_form(omega), false)(eta);
      const double b = Codensity::via_hodge(f, omega, false)(eta);
      c = relative_check("codensity Hodge route", "F*_|Omega| = F o (iota*_Omega)^{-1}", a, b, tol);
    }
    ++out.instances;
    if (!c.pass) ++out.failures;
    if (i == 0 || c.residual > out.max_residual) {
      out.max_residual = c.residual;
      out.worst = c;
    }
  }
  return out;
}

}  // namespace anisotrope
