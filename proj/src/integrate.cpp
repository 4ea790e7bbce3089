#include "anisotrope/integrate.hpp"

#include <cmath>
#include <sstream>

namespace anisotrope {

namespace {

double smallest_singular_value(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().minCoeff();
}

Mat pseudo_inverse(const Mat& a) { return a.completeOrthogonalDecomposition().pseudoInverse(); }

std::string describe(const QuadratureResult& q) {
  std::ostringstream out;
  out << q.nodes << " nodes/axis";
  if (!q.converged) out << ", not converged (change " << q.change << ")";
  if (q.excluded_measure > 0) out << ", excluded measure " << q.excluded_measure;
  return out.str();
}

void check_on_fiber(const Map& pi, const Vec& p, const Vec& y) {
  const Vec r = pi(p) - y;
  if (r.norm() > 1e-8 * std::max(1.0, y.norm())) {
    std::ostringstream out;
    out << "fiber chart leaves the level set: |pi(p) - y| = " << r.norm();
    throw DomainError(out.str());
  }
}

}  // namespace

DensityField::DensityField(int degree_, int ambient_, Evaluator eval_, bool symmetric_, std::string name_)
    : degree(degree_), ambient(ambient_), eval(std::move(eval_)), symmetric(symmetric_), name(std::move(name_)) {}

DensityField::DensityField(const Density& d)
    : degree(d.degree()), ambient(d.ambient_dim()), symmetric(d.symmetric()), name(d.name()) {
  eval = [d](const Vec&, const SimpleKVector& xi) { return d(xi); };
}

Density DensityField::at(const Vec& p) const {
  const Evaluator e = eval;
  return Density(degree, ambient, [e, p](const SimpleKVector& xi) { return e(p, xi); }, symmetric,
                 DensityKind::Custom, name);
}

DensityField DensityField::weighted(const Density& d, const ScalarField& w) {
  const Functional wv = w.value;
  return DensityField(
      d.degree(), d.ambient_dim(), [d, wv](const Vec& p, const SimpleKVector& xi) { return wv(p) * d(xi); },
      d.symmetric(), w.name + " * " + d.name());
}

Mat Patch::tangents(const Vec& s) const {
  Mat t = chart.differential(s);
  if (orientation < 0) t.col(0) *= -1.0;
  return t;
}

Patch box_patch(const Box& box) {
  Patch p;
  p.domain = box;
  p.chart = Map::identity(box.dim());
  p.name = "box";
  return p;
}

Patch polar_patch(double r0, double r1, double t0, double t1) {
  if (!(r0 >= 0.0 && r1 > r0)) throw DomainError("polar patch needs 0 <= r0 < r1");
  Patch p;
  p.domain.axes = {{r0, r1}, {t0, t1}};
  p.chart.in = p.chart.out = 2;
  p.chart.value = [](const Vec& s) -> Vec {
    Vec x(2);
    x << s[0] * std::cos(s[1]), s[0] * std::sin(s[1]);
    return x;
  };
  p.chart.jacobian = [](const Vec& s) -> Mat {
    Mat j(2, 2);
    j << std::cos(s[1]), -s[0] * std::sin(s[1]), std::sin(s[1]), s[0] * std::cos(s[1]);
    return j;
  };
  p.chart.name = "polar";
  p.name = "annulus";
  return p;
}

Patch circle_patch(double radius, const Vec& center) {
  Patch p;
  p.domain.axes = {{0.0, 2.0 * kPi}};
  p.chart.in = 1;
  p.chart.out = 2;
  p.chart.value = [radius, center](const Vec& s) -> Vec {
    Vec x(2);
    x << center[0] + radius * std::cos(s[0]), center[1] + radius * std::sin(s[0]);
    return x;
  };
  p.chart.jacobian = [radius](const Vec& s) -> Mat {
    Mat j(2, 1);
    j << -radius * std::sin(s[0]), radius * std::cos(s[0]);
    return j;
  };
  p.chart.name = "circle";
  p.panels = {4};
  p.name = "circle";
  return p;
}

Patch ellipse_patch(double a, double b) {
  Patch p;
  p.domain.axes = {{0.0, 2.0 * kPi}};
  p.chart.in = 1;
  p.chart.out = 2;
  p.chart.value = [a, b](const Vec& s) -> Vec {
    Vec x(2);
    x << a * std::cos(s[0]), b * std::sin(s[0]);
    return x;
  };
  p.chart.jacobian = [a, b](const Vec& s) -> Mat {
    Mat j(2, 1);
    j << -a * std::sin(s[0]), b * std::cos(s[0]);
    return j;
  };
  p.chart.name = "ellipse";
  p.panels = {4};
  p.name = "ellipse";
  return p;
}

Patch graph_patch(const ScalarField& f, Interval range) {
  if (f.dim != 1) throw DimensionError("graph_patch needs a function of one variable");
  Patch p;
  p.domain.axes = {range};
  p.chart.in = 1;
  p.chart.out = 2;
  const Functional v = f.value;
  p.chart.value = [v](const Vec& s) -> Vec {
    Vec x(2);
    x << s[0], v(s);
    return x;
  };
  const ScalarField copy = f;
  p.chart.jacobian = [copy](const Vec& s) -> Mat {
    Mat j(2, 1);
    j << 1.0, copy.grad(s)[0];
    return j;
  };
  p.chart.name = "graph{" + f.name + "}";
  p.name = p.chart.name;
  return p;
}

Patch sphere_patch(double radius) {
  Patch p;
  p.domain.axes = {{0.0, kPi}, {0.0, 2.0 * kPi}};
  p.chart.in = 2;
  p.chart.out = 3;
  p.chart.value = [radius](const Vec& s) -> Vec {
    Vec x(3);
    x << std::sin(s[0]) * std::cos(s[1]), std::sin(s[0]) * std::sin(s[1]), std::cos(s[0]);
    return radius * x;
  };
  p.chart.jacobian = [radius](const Vec& s) -> Mat {
    Mat j(3, 2);
    j << std::cos(s[0]) * std::cos(s[1]), -std::sin(s[0]) * std::sin(s[1]),  //
        std::cos(s[0]) * std::sin(s[1]), std::sin(s[0]) * std::cos(s[1]),     //
        -std::sin(s[0]), 0.0;
    return radius * j;
  };
  p.chart.name = "sphere";
  p.panels = {2, 4};
  p.name = "sphere";
  return p;
}

Hypersurface single_patch_surface(Patch p, bool closed) {
  Hypersurface s;
  s.name = p.name;
  s.patches.push_back(std::move(p));
  s.closed = closed;
  return s;
}

QuadratureOptions patch_options(const Patch& patch, QuadratureOptions base) {
  if (base.panels.empty()) base.panels = patch.panels;
  return base;
}

QuadratureResult integrate_patch(const Patch& patch, const PatchIntegrand& f, const QuadratureOptions& opts) {
  return integrate_box(
      patch.domain,
      [&](const Vec& s) {
        const Vec x = patch.point(s);
        return f(s, x, patch.tangents(s));
      },
      patch_options(patch, opts));
}

QuadratureResult integrate_surface(const Hypersurface& sigma, const PatchIntegrand& f, const QuadratureOptions& opts) {
  QuadratureResult total;
  total.converged = true;
  total.nodes = 0;
  for (const auto& p : sigma.patches) {
    const QuadratureResult q = integrate_patch(p, f, opts);
    total.value += q.value;
    total.change += q.change;
    total.excluded_measure += q.excluded_measure;
    total.converged = total.converged && q.converged;
    total.nodes = std::max(total.nodes, q.nodes);
  }
  return total;
}

QuadratureResult integrate_density(const Patch& patch, const DensityField& f, const ScalarField* weight,
                                   const QuadratureOptions& opts) {
  if (f.degree != patch.dim()) {
    throw DimensionError("integrate_density: density of degree " + std::to_string(f.degree) + " on a " +
                         std::to_string(patch.dim()) + "-dimensional patch");
  }
  return integrate_patch(
      patch,
      [&](const Vec& s, const Vec& x, const Mat& t) -> std::optional<double> {
        if (numerical_rank(t) < t.cols()) {
          std::ostringstream out;
          out << "chart " << patch.name << " has a rank-deficient differential at parameter " << s.transpose();
          throw DegenerateError(out.str());
        }
        const double w = weight ? (*weight)(x) : 1.0;
        return w * f(x, t);
      },
      opts);
}

double enclosed_volume(const Hypersurface& sigma) {
  const int n = sigma.ambient();
  const VolumeForm omega{n, 1.0};
  return integrate_surface(sigma, [&](const Vec&, const Vec& x, const Mat& t) -> std::optional<double> {
           return x.dot(hyperplane_covector(omega, t)) / n;
         }).value;
}

void validate_closed(const Hypersurface& sigma, double tol) {
  if (!sigma.closed) throw DomainError("hypersurface " + sigma.name + " is not closed");
  const int n = sigma.ambient();
  const VolumeForm omega{n, 1.0};
  const double flux = integrate_surface(sigma, [&](const Vec&, const Vec&, const Mat& t) -> std::optional<double> {
                        return hyperplane_covector(omega, t)[0];
                      }).value;
  const double area = integrate_surface(sigma, [&](const Vec&, const Vec&, const Mat& t) -> std::optional<double> {
                        return hyperplane_covector(omega, t).norm();
                      }).value;
  if (std::abs(flux) > tol * std::max(1.0, area)) {
    throw DomainError("hypersurface " + sigma.name + " fails the closed-surface flux test");
  }
  if (!(enclosed_volume(sigma) > 0.0)) {
    throw DomainError("hypersurface " + sigma.name + " is not oriented by the outward normal");
  }
}

int winding_number(const Hypersurface& curve, const Vec& p, int samples) {
  if (curve.ambient() != 2) throw DimensionError("winding_number is defined for planar curves");
  std::vector<Vec> pts;
  for (const auto& patch : curve.patches) {
    const Interval dom = patch.domain.axes[0];
    for (int i = 0; i < samples; ++i) {
      const double t = patch.orientation > 0 ? dom.lo + dom.width() * i / samples : dom.hi - dom.width() * i / samples;
      pts.push_back(patch.point(Vec::Constant(1, t)) - p);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec& a = pts[i];
    const Vec& b = pts[(i + 1) % pts.size()];
    total += std::atan2(a[0] * b[1] - a[1] * b[0], a.dot(b));
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

Check change_of_variables_check(const Map& phi, const Box& b, const DensityField& f, const DensityField& g,
                                const ScalarField& weight, const Patch& image, double tol) {
  const QuadratureResult lhs = integrate_density(image, g, &weight);
  const int n = b.dim();
  const Mat frame = Mat::Identity(n, n);
  const QuadratureResult rhs = integrate_box(b, [&](const Vec& x) -> std::optional<double> {
    const Mat a = phi.differential(x);
    if (a.rows() == a.cols() && a.determinant() < 0.0) {
      throw DomainError("change of variables: phi reverses orientation");
    }
    const Vec y = phi(x);
    return jacobian(a, f.at(x), g.at(y)) * f(x, frame) * weight(y);
  });
  Check c = relative_check("change of variables", "int_phi(B) f dG = int_B J(dphi; F, G) f o phi dF", lhs.value,
                           rhs.value, tol);
  c.note = "image " + describe(lhs) + "; domain " + describe(rhs);
  return c;
}

QuadratureResult fiber_integral(const Map& pi, const DensityField& mu, const Vec& b, const Patch& fiber,
                                const Mat& reference, LiftRule rule, const QuadratureOptions& opts) {
  if (mu.degree != mu.ambient) throw DimensionError("fiber_integral needs a top-degree density");
  if (reference.rows() != pi.out || reference.cols() != pi.out) {
    throw DimensionError("fiber_integral: reference frame must be square in the base dimension");
  }
  if (fiber.dim() + pi.out != pi.in) throw DimensionError("fiber_integral: fiber has the wrong dimension");
  return integrate_patch(
      fiber,
      [&](const Vec&, const Vec& p, const Mat& w) -> std::optional<double> {
        check_on_fiber(pi, p, b);
        const Mat a = pi.differential(p);
        if (!is_surjective(a)) throw DegenerateError("fiber_integral: d pi is not surjective on the fiber");
        Mat lifts = pseudo_inverse(a) * reference;
        if (rule == LiftRule::Shifted) lifts += w * Mat::Constant(w.cols(), lifts.cols(), 0.7);
        Mat frame(pi.in, pi.in);
        frame << lifts, w;
        return mu(p, frame);
      },
      opts);
}

Check fubini_check(const Map& pi, const DensityField& mu, const Patch& total, const Patch& base,
                   const FiberFamily& fibers, double tol) {
  const QuadratureResult lhs = integrate_density(total, mu);
  const QuadratureResult rhs = integrate_patch(base, [&](const Vec&, const Vec& y, const Mat& t) -> std::optional<double> {
    return fiber_integral(pi, mu, y, fibers(y), t).value;
  });
  Check c = relative_check("fiber integration", "int_P mu = int_B pi_* mu", lhs.value, rhs.value, tol);
  c.note = "total " + describe(lhs) + "; base " + describe(rhs);
  return c;
}

Check coarea_check(const CoareaProblem& pr, double tol) {
  const bool oriented = !pr.f.symmetric || !pr.mu.symmetric;
  const QuadratureResult lhs = integrate_patch(pr.region, [&](const Vec&, const Vec& p, const Mat& t) -> std::optional<double> {
    const Mat a = pr.pi.differential(p);
    if (smallest_singular_value(a.transpose()) < kCriticalSingularValue) return std::nullopt;
    const Density mu = pr.mu.at(p);
    return pr.g(p) * cojacobian(a, pr.lambda, pr.f.at(p), mu, oriented) * mu(t);
  });
  const int n = pr.pi.out;
  const QuadratureResult rhs = integrate_patch(pr.base, [&](const Vec&, const Vec& y, const Mat& t) -> std::optional<double> {
    const Patch level = pr.level_set(y);
    const QuadratureResult inner =
        integrate_patch(level, [&](const Vec&, const Vec& p, const Mat& w) -> std::optional<double> {
          check_on_fiber(pr.pi, p, y);
          Mat frame = w;
          if (oriented) {
            // Fiber-last: (lift of the base frame, fiber frame) positive.
            const Mat a = pr.pi.differential(p);
            Mat full(pr.pi.in, pr.pi.in);
            full << pseudo_inverse(a) * Mat::Identity(n, n), w;
            if (full.determinant() < 0.0) frame.col(0) *= -1.0;
          }
          return pr.g(p) * pr.f(p, frame);
        });
    return inner.value * pr.lambda(t);
  });
  Check c = relative_check("coarea", "int_A g C(dpi; lambda*, F*_mu) dmu = int_B int_{pi^-1(y)} g dF dlambda",
                           lhs.value, rhs.value, tol);
  c.note = "region " + describe(lhs) + "; levels " + describe(rhs);
  return c;
}

Check area_check(const Map& f, const Box& a, const DensityField& fd, const DensityField& gd,
                 const std::vector<ImagePiece>& image, double tol, const QuadratureOptions& opts) {
  const int m = a.dim();
  const Mat frame = Mat::Identity(m, m);
  const QuadratureResult lhs = integrate_box(a, [&](const Vec& x) -> std::optional<double> {
    const Mat df = f.differential(x);
    if (smallest_singular_value(df) < kCriticalSingularValue) return std::nullopt;
    return jacobian(df, fd.at(x), gd.at(f(x))) * fd(x, frame);
  }, opts);
  double rhs = 0.0;
  std::string pieces;
  for (const auto& piece : image) {
    const QuadratureResult q = integrate_density(piece.patch, gd);
    rhs += piece.multiplicity * q.value;
    pieces += (pieces.empty() ? "" : ", ") + describe(q);
  }
  Check c = relative_check("area formula", "int_A J(df; F, G) dF = int_f(A) N dG", lhs.value, rhs, tol);
  c.note = "domain " + describe(lhs) + "; image " + pieces;
  return c;
}

}  // namespace anisotrope
