#include "anisotrope/convex.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace anisotrope {

namespace {

Vec polar2(double t) {
  Vec u(2);
  u << std::cos(t), std::sin(t);
  return u;
}

std::string number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

// Normal angle of the boundary point on the ray through v.  The boundary point
// with normal t is x(t) = H u + H' u^perp, and g(t) = x(t) x v changes sign
// from + to - where x(t) crosses the ray, with g' = -(H + H'') <u, v>.  A table
// of polar angles of x(t) brackets the crossing before the Newton steps.
struct RayTable {
  AngularProfile p;
  std::vector<double> t, psi;  // psi unwrapped, increasing, period 2 pi

  explicit RayTable(AngularProfile prof, int n = 256) : p(std::move(prof)) {
    t.resize(n + 1);
    psi.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      t[i] = 2.0 * kPi * i / n;
      const double c = std::cos(t[i]), sn = std::sin(t[i]);
      const double h = p.value(t[i]), h1 = p.d1(t[i]);
      double a = std::atan2(h * sn + h1 * c, h * c - h1 * sn);
      if (i > 0) {
        while (a < psi[i - 1] - kPi) a += 2.0 * kPi;
        while (a > psi[i - 1] + kPi) a -= 2.0 * kPi;
      }
      psi[i] = a;
    }
  }

  double solve(const Vec& v) const {
    double phi = std::atan2(v[1], v[0]);
    while (phi < psi.front()) phi += 2.0 * kPi;
    while (phi >= psi.back()) phi -= 2.0 * kPi;
    const auto k = std::upper_bound(psi.begin(), psi.end(), phi) - psi.begin() - 1;
    double lo = t[k], hi = t[k + 1];
    const double w = psi[k + 1] - psi[k];
    double tt = w > 0.0 ? lo + (hi - lo) * (phi - psi[k]) / w : 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double c = std::cos(tt), s = std::sin(tt);
      const double uv = c * v[0] + s * v[1];
      const double upv = -s * v[0] + c * v[1];
      const double h = p.value(tt), h1 = p.d1(tt);
      const double g = h * upv - h1 * uv;
      if (g == 0.0) return tt;
      if (g > 0.0) {
        lo = tt;
      } else {
        hi = tt;
      }
      const double dg = -(h + p.d2(tt)) * uv;
      const double step = dg < 0.0 ? g / dg : 0.0;
      if (dg < 0.0 && std::abs(step) <= 1e-14) return tt - step;
      double next = dg < 0.0 ? tt - step : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo <= 1e-14) return next;
      tt = next;
    }
    return tt;
  }
};

void set_profile_gauge(SupportFunction& s) {
  const auto table = std::make_shared<const RayTable>(*s.profile);
  s.gauge = [table](const Vec& v) {
    if (v.norm() == 0.0) return 0.0;
    const double t = table->solve(v);
    return (std::cos(t) * v[0] + std::sin(t) * v[1]) / table->p.value(t);
  };
  // Envelope: the maximizing normal u gives grad = u / H.
  s.gauge_gradient = [table](const Vec& v) -> Vec {
    const double t = table->solve(v);
    return polar2(t) / table->p.value(t);
  };
}

}  // namespace

SupportFunction euclidean_support(int dim) {
  SupportFunction s;
  s.dim = dim;
  s.h = [](const Vec& u) { return u.norm(); };
  s.gradient = [](const Vec& u) -> Vec { return u / u.norm(); };
  s.gauge = [](const Vec& v) { return v.norm(); };
  s.gauge_gradient = [](const Vec& v) -> Vec { return v / v.norm(); };
  s.name = "euclidean";
  return s;
}

SupportFunction pnorm_support(int dim, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("pnorm Wulff shape needs 1 < p < inf, got " + number(p));
  const double q = p / (p - 1.0);
  SupportFunction s;
  s.dim = dim;
  s.h = lp_norm(dim, q).gauge;
  s.gradient = [q](const Vec& u) -> Vec {
    const double m = u.cwiseAbs().maxCoeff();
    Vec a = u.cwiseAbs() / m;
    double sum = 0.0;
    for (int i = 0; i < a.size(); ++i) sum += std::pow(a[i], q);
    const double norm = std::pow(sum, 1.0 / q);
    Vec g(u.size());
    for (int i = 0; i < u.size(); ++i) {
      g[i] = (u[i] < 0 ? -1.0 : 1.0) * std::pow(a[i] / norm, q - 1.0);
    }
    return g;
  };
  s.gauge = lp_norm(dim, p).gauge;
  s.gauge_gradient = [p](const Vec& v) -> Vec {
    const double m = v.cwiseAbs().maxCoeff();
    const Vec a = v.cwiseAbs() / m;
    double sum = 0.0;
    for (int i = 0; i < a.size(); ++i) sum += std::pow(a[i], p);
    const double norm = std::pow(sum, 1.0 / p);
    Vec g(v.size());
    for (int i = 0; i < v.size(); ++i) g[i] = (v[i] < 0 ? -1.0 : 1.0) * std::pow(a[i] / norm, p - 1.0);
    return g;
  };
  s.curvature = p == 2.0;
  s.name = "pnorm{" + number(p) + "}";
  return s;
}

SupportFunction ellipse_support(const std::vector<double>& semi_axes) {
  if (semi_axes.size() < 2 || semi_axes.size() > 3) throw DimensionError("ellipse needs 2 or 3 semi-axes");
  Vec a(static_cast<Eigen::Index>(semi_axes.size()));
  for (std::size_t i = 0; i < semi_axes.size(); ++i) {
    if (!(semi_axes[i] > 0.0)) throw DomainError("ellipse semi-axes must be positive");
    a[static_cast<Eigen::Index>(i)] = semi_axes[i];
  }
  const Vec a2 = a.cwiseProduct(a);
  SupportFunction s;
  s.dim = static_cast<int>(a.size());
  s.h = [a](const Vec& u) { return a.cwiseProduct(u).norm(); };
  s.gradient = [a, a2](const Vec& u) -> Vec { return a2.cwiseProduct(u) / a.cwiseProduct(u).norm(); };
  s.gauge = [a](const Vec& v) { return v.cwiseQuotient(a).norm(); };
  s.gauge_gradient = [a, a2](const Vec& v) -> Vec { return v.cwiseQuotient(a2) / v.cwiseQuotient(a).norm(); };
  s.name = "ellipse{";
  for (std::size_t i = 0; i < semi_axes.size(); ++i) s.name += (i ? "," : "") + number(semi_axes[i]);
  s.name += "}";
  return s;
}

SupportFunction square_support(int dim) {
  SupportFunction s;
  s.dim = dim;
  s.h = [](const Vec& u) { return u.lpNorm<1>(); };
  s.gauge = [](const Vec& v) { return v.lpNorm<Eigen::Infinity>(); };
  // Almost everywhere: the sign of the largest coordinate.
  s.gauge_gradient = [](const Vec& v) -> Vec {
    Eigen::Index i = 0;
    v.cwiseAbs().maxCoeff(&i);
    Vec g = Vec::Zero(v.size());
    g[i] = v[i] < 0 ? -1.0 : 1.0;
    return g;
  };
  s.differentiable = false;
  s.curvature = false;
  s.name = "square";
  return s;
}

SupportFunction translated_support(const SupportFunction& base, const Vec& c) {
  if (c.size() != base.dim) throw DimensionError("translation vector has the wrong dimension");
  SupportFunction s = base;
  const Functional h = base.h;
  s.h = [h, c](const Vec& u) { return h(u) + c.dot(u); };
  if (base.gradient) {
    const Gradient g = *base.gradient;
    s.gradient = [g, c](const Vec& u) -> Vec { return g(u) + c; };
  }
  s.gauge.reset();
  s.gauge_gradient.reset();
  if (base.gauge && !base.profile) {
    // Gauge of W + c at v is the root t of G(v - t c) = t, G the gauge of W.
    // G(v - t c) - t is convex and decreasing (-c lies inside W), so Newton
    // from t = 0 climbs monotonically onto the root.
    const Functional g = *base.gauge;
    const std::optional<Gradient> dg = base.gauge_gradient;
    auto solve = [g, dg, c](const Vec& v) {
      if (v.norm() == 0.0) return 0.0;
      double t = 0.0;
      for (int it = 0; it < 200; ++it) {
        const Vec x = v - t * c;
        const double f = g(x) - t;
        double slope;
        if (dg) {
          slope = -(*dg)(x).dot(c) - 1.0;
        } else {
          const double step = 1e-7 * (1.0 + t);
          slope = (g(v - (t + step) * c) - (t + step) - f) / step;
        }
        if (!(slope < 0.0)) throw DomainError("translated gauge: origin is not inside the shifted body");
        const double next = t - f / slope;
        if (std::abs(next - t) <= 1e-14 * (1.0 + next)) return next;
        t = next;
      }
      return t;
    };
    s.gauge = solve;
    if (dg) {
      const Gradient grad = *dg;
      s.gauge_gradient = [solve, grad, c](const Vec& v) -> Vec {
        const Vec d = grad(v - solve(v) * c);
        return d / (1.0 + d.dot(c));
      };
    }
  }
  if (base.profile) {
    // h(u) + <c, u> in angular form: H(t) + c_x cos t + c_y sin t.
    const AngularProfile p = *base.profile;
    const double cx = c[0], cy = c.size() > 1 ? c[1] : 0.0;
    s.profile = AngularProfile{
        [p, cx, cy](double t) { return p.value(t) + cx * std::cos(t) + cy * std::sin(t); },
        [p, cx, cy](double t) { return p.d1(t) - cx * std::sin(t) + cy * std::cos(t); },
        [p, cx, cy](double t) { return p.d2(t) - cx * std::cos(t) - cy * std::sin(t); }};
    set_profile_gauge(s);
  }
  s.symmetric = c.norm() == 0.0 && base.symmetric;
  s.name = base.name + "+shift";
  return s;
}

AngularProfile trig_profile(double c0, const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DimensionError("trig_profile: coefficient lists differ in length");
  // sum_k k^order (a_k cos(kt + order pi/2) + b_k sin(kt + order pi/2)), with
  // cos kt, sin kt by the angle-addition recurrence from one sincos.
  auto series = [a, b](double t, int order) {
    const double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double c = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = c;
      const double kk = static_cast<double>(k + 1);
      switch (order) {
        case 0: sum += a[k] * ck + b[k] * sk; break;
        case 1: sum += kk * (b[k] * ck - a[k] * sk); break;
        default: sum -= kk * kk * (a[k] * ck + b[k] * sk); break;
      }
    }
    return sum;
  };
  AngularProfile p;
  p.value = [series, c0](double t) { return c0 + series(t, 0); };
  p.d1 = [series](double t) { return series(t, 1); };
  p.d2 = [series](double t) { return series(t, 2); };
  return p;
}

AngularProfile spline_profile(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 256) throw DomainError("custom support table needs at least 256 angles, got " + std::to_string(n));
  const double h = 2.0 * kPi / n;
  // Periodic cubic spline: M_{j-1} + 4 M_j + M_{j+1} = 6 (y_{j+1} - 2 y_j + y_{j-1}) / h^2.
  Eigen::SparseMatrix<double> sys(n, n);
  std::vector<Eigen::Triplet<double>> entries;
  Vec rhs(n);
  for (int j = 0; j < n; ++j) {
    const int prev = (j + n - 1) % n;
    const int next = (j + 1) % n;
    entries.emplace_back(j, prev, 1.0);
    entries.emplace_back(j, j, 4.0);
    entries.emplace_back(j, next, 1.0);
    rhs[j] = 6.0 * (values[next] - 2.0 * values[j] + values[prev]) / (h * h);
  }
  sys.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys);
  auto y = std::make_shared<const std::vector<double>>(values);
  auto m = std::make_shared<const Vec>(lu.solve(rhs));

  auto locate = [n, h](double t, int& j, double& s) {
    double u = std::fmod(t, 2.0 * kPi);
    if (u < 0) u += 2.0 * kPi;
    j = std::min(static_cast<int>(u / h), n - 1);
    s = u - j * h;
  };
  AngularProfile p;
  p.value = [=](double t) {
    int j;
    double s;
    locate(t, j, s);
    const int k = (j + 1) % n;
    const double r = h - s;
    return (*m)[j] * r * r * r / (6 * h) + (*m)[k] * s * s * s / (6 * h) + ((*y)[j] - (*m)[j] * h * h / 6) * r / h +
           ((*y)[k] - (*m)[k] * h * h / 6) * s / h;
  };
  p.d1 = [=](double t) {
    int j;
    double s;
    locate(t, j, s);
    const int k = (j + 1) % n;
    const double r = h - s;
    return -(*m)[j] * r * r / (2 * h) + (*m)[k] * s * s / (2 * h) + ((*y)[k] - (*y)[j]) / h -
           ((*m)[k] - (*m)[j]) * h / 6;
  };
  p.d2 = [=](double t) {
    int j;
    double s;
    locate(t, j, s);
    const int k = (j + 1) % n;
    return ((*m)[j] * (h - s) + (*m)[k] * s) / h;
  };
  return p;
}

double min_curvature_radius(const AngularProfile& profile, int grid) {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double t = 2.0 * kPi * (i + 0.5) / grid;
    lo = std::min(lo, profile.d2(t) + profile.value(t));
    const double t0 = 2.0 * kPi * i / grid;
    lo = std::min(lo, profile.d2(t0) + profile.value(t0));
  }
  return lo;
}

SupportFunction planar_support(AngularProfile profile, std::string name) {
  if (!(min_curvature_radius(profile) > 0.0)) {
    throw DomainError("support function " + name + " is not strictly convex: H'' + H <= 0 somewhere");
  }
  SupportFunction s;
  s.dim = 2;
  const auto value = profile.value;
  const auto d1 = profile.d1;
  s.h = [value](const Vec& u) {
    const double r = u.norm();
    if (r == 0.0) return 0.0;
    return r * value(std::atan2(u[1], u[0]));
  };
  s.gradient = [value, d1](const Vec& u) -> Vec {
    const double t = std::atan2(u[1], u[0]);
    Vec along = polar2(t);
    Vec across(2);
    across << -along[1], along[0];
    return value(t) * along + d1(t) * across;
  };
  s.symmetric = false;
  s.profile = std::move(profile);
  set_profile_gauge(s);
  s.name = std::move(name);
  return s;
}

SupportFunction custom_support(const std::vector<double>& values) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("custom support table must be positive and finite");
  }
  return planar_support(spline_profile(values), "custom-support");
}

SupportFunction random_planar_body(std::mt19937_64& rng, double c0) {
  std::uniform_real_distribution<double> coef(-0.25, 0.25);
  while (true) {
    std::vector<double> a(4), b(4);
    for (int k = 0; k < 4; ++k) {
      const double damp = 1.0 / (1.0 + k);
      a[k] = c0 * coef(rng) * damp;
      b[k] = c0 * coef(rng) * damp;
    }
    auto profile = trig_profile(c0, a, b);
    if (min_curvature_radius(profile) > 0.05 * c0) return planar_support(std::move(profile), "trig-body");
  }
}

WulffShape::WulffShape(SupportFunction support, const MCConfig& mc) : s_(std::move(support)) {
  if (s_.dim < 1) throw DimensionError("Wulff shape needs a positive dimension");
  // Convexity and positivity of h are sampled on its unit level set; the same
  // sample then evaluates the gauge by duality.
  sampled_ = std::make_shared<const DualFunctional>(s_.h, s_.dim);
  const Box box = bounding_box().padded(1e-2);
  volume_ = mc_volume([this](const Vec& v) { return contains(v); }, box, mc);
  if (volume_.zero_hits) throw DomainError("Wulff shape " + s_.name + " has no Monte Carlo volume");
}

Vec WulffShape::support_gradient(const Vec& u) const {
  if (s_.gradient) return (*s_.gradient)(u);
  if (!s_.differentiable) throw DomainError("support function " + s_.name + " is not differentiable");
  auto central = [&](double step) {
    Vec g(u.size());
    for (int i = 0; i < u.size(); ++i) {
      Vec a = u, b = u;
      a[i] += step;
      b[i] -= step;
      g[i] = (s_.h(a) - s_.h(b)) / (2.0 * step);
    }
    return g;
  };
  const double step = kGradientStep * u.norm();
  const Vec g1 = central(step);
  const Vec g2 = central(0.5 * step);
  if ((g1 - g2).norm() > kGradientAgreement * std::max(1.0, g2.norm())) {
    throw DomainError("support function " + s_.name + " is not smooth at this direction (step halving disagrees)");
  }
  return g2;
}

double WulffShape::gauge(const Vec& v) const {
  if (s_.gauge) return (*s_.gauge)(v);
  return (*sampled_)(v);
}

double WulffShape::sampled_gauge(const Vec& v) const { return (*sampled_)(v); }

Box WulffShape::bounding_box() const {
  Box box;
  for (int i = 0; i < s_.dim; ++i) {
    Vec e = Vec::Zero(s_.dim);
    e[i] = 1.0;
    box.axes.push_back({-s_.h(-e), s_.h(e)});
  }
  return box;
}

Vec oriented_normal(const Mat& tangents, const VolumeForm& omega) {
  const int dim = static_cast<int>(tangents.rows());
  if (tangents.cols() != dim - 1) throw DimensionError("oriented_normal: need dim - 1 tangent vectors");
  if (numerical_rank(tangents) < dim - 1) throw DegenerateError("oriented_normal: dependent tangent vectors");
  Vec nu = hyperplane_covector(omega, tangents);
  return nu / nu.norm();
}

Vec anisotropic_normal(const WulffShape& w, const Mat& tangents, const VolumeForm& omega) {
  const Vec nu = oriented_normal(tangents, omega);
  const Vec n = w.support_gradient(nu);
  if (std::abs(w.gauge(n) - 1.0) > 1e-6) {
    throw DomainError("anisotropic normal of " + w.name() + " is off the Wulff boundary");
  }
  if (std::abs(nu.dot(n) - w.support(nu)) > 1e-8 * w.support(nu)) {
    throw DomainError("anisotropic normal of " + w.name() + " does not support the Wulff shape");
  }
  return n;
}

Density wulff_integrand(const WulffShape& w, const VolumeForm& omega) {
  const int dim = w.dim();
  const Functional h = w.support_function().h;
  return Density(
      dim - 1, dim, [h, omega](const SimpleKVector& xi) { return h(hyperplane_covector(omega, xi.oriented_spanning())); },
      w.symmetric(), DensityKind::WulffIntegrand, "wulff(" + w.name() + ")");
}

double check_multiplication(const WulffShape& w, const VolumeForm& omega, const Vec& vec, const Mat& tangents) {
  Mat full(tangents.rows(), tangents.cols() + 1);
  full << vec, tangents;
  const double lhs = std::abs(omega(full));
  const double rhs = w.gauge(vec) * wulff_integrand(w, omega)(tangents);
  return std::abs(lhs - rhs) / rhs;
}

}  // namespace anisotrope
