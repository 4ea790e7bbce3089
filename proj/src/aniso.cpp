#include "anisotrope/aniso.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace anisotrope {

namespace {

Vec polar(double t) {
  Vec u(2);
  u << std::cos(t), std::sin(t);
  return u;
}

Vec perp(const Vec& u) {
  Vec v(2);
  v << -u[1], u[0];
  return v;
}

VolumeForm standard_form(int dim) { return VolumeForm{dim, 1.0}; }

struct Frame {
  Vec point;
  Mat tangents;
  Vec covector;  // hyperplane covector: |c| is the area element
  Vec nu;
};

Frame frame_at(const Patch& patch, const Vec& s) {
  Frame f;
  f.point = patch.point(s);
  f.tangents = patch.tangents(s);
  f.covector = hyperplane_covector(standard_form(patch.ambient()), f.tangents);
  const double len = f.covector.norm();
  if (!(len > 0.0)) throw DegenerateError("hypersurface " + patch.name + " has a degenerate normal");
  f.nu = f.covector / len;
  return f;
}

const Patch& patch_of(const Hypersurface& sigma, const SurfacePoint& at) {
  if (at.patch < 0 || at.patch >= static_cast<int>(sigma.patches.size())) {
    throw DimensionError("surface point refers to a missing patch");
  }
  return sigma.patches[at.patch];
}

Vec normal_at(const Patch& patch, const WulffShape& w, const Vec& s, bool negative) {
  const Frame f = frame_at(patch, s);
  return w.support_gradient(negative ? Vec(-f.nu) : f.nu);
}

// Coefficients beta of v = alpha * along + tangents * beta.
Vec split_along(const Vec& along, const Mat& tangents, const Vec& v, double* alpha = nullptr) {
  const int dim = static_cast<int>(tangents.rows());
  Mat m(dim, dim);
  m << along, tangents;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec sv = svd.singularValues();
  if (sv[dim - 1] < 1e-10 * sv[0]) throw DegenerateError("projection direction is tangent to the hypersurface");
  const Vec x = m.colPivHouseholderQr().solve(v);
  if (alpha) *alpha = x[0];
  return x.tail(dim - 1);
}

// d(n o psi) along each chart coordinate, Richardson-combined central
// differences validated by step halving.
Mat gauss_derivative(const Patch& patch, const WulffShape& w, const Vec& s, bool negative) {
  if (!w.has_curvature()) {
    throw DomainError("Wulff shape " + w.name() + " has no C^2 support function; the Gauss map cannot be differentiated");
  }
  const int k = patch.dim();
  Mat d(patch.ambient(), k);
  for (int j = 0; j < k; ++j) {
    const double h = kShapeStep * patch.domain.axes[j].width();
    auto diff = [&](double step) {
      Vec sp = s, sm = s;
      sp[j] += step;
      sm[j] -= step;
      return Vec((normal_at(patch, w, sp, negative) - normal_at(patch, w, sm, negative)) / (2.0 * step));
    };
    const Vec coarse = diff(h);
    const Vec fine = diff(0.5 * h);
    if ((fine - coarse).norm() > 1e-3 * std::max(1.0, fine.norm())) {
      throw DomainError("Gauss map of " + patch.name + " is not smooth enough for finite differences");
    }
    d.col(j) = (4.0 * fine - coarse) / 3.0;
  }
  return d;
}

Box sample_bounds(const std::vector<Vec>& pts, double reach) {
  Box box;
  const int dim = static_cast<int>(pts.front().size());
  for (int a = 0; a < dim; ++a) {
    double lo = pts.front()[a], hi = lo;
    for (const Vec& p : pts) {
      lo = std::min(lo, p[a]);
      hi = std::max(hi, p[a]);
    }
    box.axes.push_back({lo - reach, hi + reach});
  }
  return box.padded(kBoxPadding);
}

double outer_radius(const WulffShape& w) {
  double r = 0.0;
  for (const Vec& u : sphere_directions(w.dim(), 4096)) r = std::max(r, w.support(u));
  return 1.001 * r;
}

// Gradient of h, numerically when no analytic gradient is available.
Vec support_point(const SupportFunction& s, const Vec& u) {
  if (s.gradient) return (*s.gradient)(u);
  const Functional h = s.h;
  return fd_jacobian([&h](const Vec& x) { return Vec::Constant(1, h(x)); }, u).row(0).transpose();
}

// Polygon star-shaped about the origin with vertices in angular order.
class StarPolygon {
 public:
  explicit StarPolygon(const std::vector<Vec>& vertices) {
    const std::size_t n = vertices.size();
    std::size_t start = 0;
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = std::atan2(vertices[i][1], vertices[i][0]);
      if (raw[i] < raw[start]) start = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = (start + i) % n;
      angle_.push_back(raw[k]);
      x_.push_back(vertices[k][0]);
      y_.push_back(vertices[k][1]);
      if (i > 0 && angle_[i] < angle_[i - 1]) {
        throw DomainError("convex body is not star-shaped about the origin");
      }
    }
  }

  bool contains(const Vec& p) const {
    const double a = std::atan2(p[1], p[0]);
    const std::size_t n = angle_.size();
    auto it = std::upper_bound(angle_.begin(), angle_.end(), a);
    const std::size_t k = it == angle_.begin() ? n - 1 : static_cast<std::size_t>(it - angle_.begin()) - 1;
    const std::size_t next = (k + 1) % n;
    const double ex = x_[next] - x_[k], ey = y_[next] - y_[k];
    return ex * (p[1] - y_[k]) - ey * (p[0] - x_[k]) >= 0.0;
  }

 private:
  std::vector<double> angle_, x_, y_;
};

void finish_minkowski(MinkowskiResult& r, double box_volume, double tol) {
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    r.slope.push_back(r.gain[i].value / r.t[i]);
    r.slope_error.push_back(r.gain[i].std_error / r.t[i]);
  }
  // Slopes are t0, t0/2, t0/4; the sequence must move one way.
  const double d1 = r.slope[0] - r.slope[1], d2 = r.slope[1] - r.slope[2];
  const double s1 = 3.0 * std::hypot(r.slope_error[0], r.slope_error[1]);
  const double s2 = 3.0 * std::hypot(r.slope_error[1], r.slope_error[2]);
  if (std::abs(d1) > s1 && std::abs(d2) > s2 && (d1 > 0) != (d2 > 0)) {
    throw DomainError("Minkowski extrapolation is not monotone; choose a smaller t0");
  }
  r.extrapolated = (8.0 * r.slope[2] - 6.0 * r.slope[1] + r.slope[0]) / 3.0;
  // The regions are nested, so each sample lands in exactly one shell and the
  // extrapolated slope is a mean of one multinomial variable.
  const double n = static_cast<double>(r.gain[0].samples);
  const double c1 = 1.0 / (3.0 * r.t[0]), c2 = -2.0 / r.t[1], c4 = 8.0 / (3.0 * r.t[2]);
  const double q1 = (r.gain[0].hits - r.gain[1].hits) / n;
  const double q2 = (r.gain[1].hits - r.gain[2].hits) / n;
  const double q4 = r.gain[2].hits / n;
  const double v1 = c1, v2 = c1 + c2, v4 = c1 + c2 + c4;
  const double mean = v1 * q1 + v2 * q2 + v4 * q4;
  const double var = std::max(0.0, v1 * v1 * q1 + v2 * v2 * q2 + v4 * v4 * q4 - mean * mean);
  r.extrapolated_error = box_volume * std::sqrt(var / n);
  r.check = relative_check("Minkowski content", "lim (vol(B + tW) - vol(B)) / t = int_dB dF", r.extrapolated, r.area,
                           tol);
  r.check.std_error = r.extrapolated_error;
  std::ostringstream note;
  note << "Richardson slope " << r.extrapolated << " +- " << r.extrapolated_error;
  r.check.note = note.str();
}

}  // namespace

Patch convex_boundary_patch(const SupportFunction& s, double scale, const Vec& center) {
  if (s.dim != 2) throw DimensionError("convex_boundary_patch is planar");
  if (!(scale > 0.0)) throw DomainError("convex_boundary_patch needs a positive scale");
  Patch p;
  p.domain.axes = {{-0.25 * kPi, 1.75 * kPi}};
  p.panels = {8};
  p.chart.in = 1;
  p.chart.out = 2;
  const double r = scale;
  const Vec c = center;
  if (s.profile) {
    const AngularProfile prof = *s.profile;
    p.chart.value = [prof, r, c](const Vec& t) -> Vec {
      const Vec u = polar(t[0]);
      return c + r * (prof.value(t[0]) * u + prof.d1(t[0]) * perp(u));
    };
    p.chart.jacobian = [prof, r](const Vec& t) -> Mat {
      return r * (prof.value(t[0]) + prof.d2(t[0])) * perp(polar(t[0]));
    };
  } else if (s.gauge && s.gauge_gradient) {
    const Functional g = *s.gauge;
    const Gradient dg = *s.gauge_gradient;
    p.chart.value = [g, r, c](const Vec& t) -> Vec {
      const Vec u = polar(t[0]);
      return c + r * u / g(u);
    };
    p.chart.jacobian = [g, dg, r](const Vec& t) -> Mat {
      const Vec u = polar(t[0]);
      const Vec v = perp(u);
      const double gu = g(u);
      return r * (v / gu - u * dg(u).dot(v) / (gu * gu));
    };
  } else if (s.gradient) {
    const SupportFunction copy = s;
    p.chart.value = [copy, r, c](const Vec& t) -> Vec { return c + r * support_point(copy, polar(t[0])); };
  } else {
    throw DomainError("no boundary chart for " + s.name + ": needs a profile, an analytic gauge or a gradient");
  }
  p.chart.name = "boundary{" + s.name + "}";
  p.name = p.chart.name;
  return p;
}

Hypersurface convex_boundary(const SupportFunction& s, double scale, const Vec& center) {
  return single_patch_surface(convex_boundary_patch(s, scale, center), true);
}

Vec surface_normal(const Hypersurface& sigma, const SurfacePoint& at) {
  return frame_at(patch_of(sigma, at), at.param).nu;
}

QuadratureResult anisotropic_area(const Hypersurface& sigma, const WulffShape& w, bool interior,
                                  const QuadratureOptions& opts) {
  const VolumeForm omega = standard_form(sigma.ambient());
  return integrate_surface(
      sigma,
      [&](const Vec&, const Vec&, const Mat& t) -> std::optional<double> {
        const Vec c = hyperplane_covector(omega, t);
        return w.support(interior ? Vec(-c) : c);
      },
      opts);
}

Vec gauss_map(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at) {
  const Patch& p = patch_of(sigma, at);
  return anisotropic_normal(w, p.tangents(at.param), standard_form(p.ambient()));
}

Vec negative_gauss_map(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at) {
  const Patch& p = patch_of(sigma, at);
  const Vec n = normal_at(p, w, at.param, true);
  if (std::abs(w.gauge(n) - 1.0) > 1e-6) throw DomainError("negative Gauss map leaves the boundary of W");
  return n;
}

std::vector<double> elementary_symmetric(const Mat& s) {
  const int n = static_cast<int>(s.rows());
  std::vector<double> p(n + 1, 0.0);
  p[0] = 1.0;
  Mat m = Mat::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = s * m + p[k - 1] * Mat::Identity(n, n);
    p[k] = -(s * m).trace() / k;
  }
  std::vector<double> c(n + 1);
  for (int k = 0; k <= n; ++k) c[k] = (k % 2 ? -1.0 : 1.0) * p[k];
  return c;
}

double ShapeOperatorSample::spectral_radius() const {
  if (matrix.size() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(matrix, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ShapeOperatorSample shape_operator(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at,
                                   bool negative) {
  const Patch& patch = patch_of(sigma, at);
  const Frame f = frame_at(patch, at.param);
  ShapeOperatorSample out;
  out.param = at.param;
  out.point = f.point;
  out.tangents = f.tangents;
  out.normal = w.support_gradient(negative ? Vec(-f.nu) : f.nu);
  const Mat dn = gauss_derivative(patch, w, at.param, negative);
  const int k = patch.dim();
  out.matrix.resize(k, k);
  for (int j = 0; j < k; ++j) out.matrix.col(j) = split_along(out.normal, f.tangents, dn.col(j));
  out.c = elementary_symmetric(out.matrix);
  return out;
}

PalmerSample palmer_consistency(const Hypersurface& sigma, const WulffShape& w, const SurfacePoint& at) {
  const Patch& patch = patch_of(sigma, at);
  const Frame f = frame_at(patch, at.param);
  const Vec n = w.support_gradient(f.nu);
  const Mat dn = gauss_derivative(patch, w, at.param, false);
  PalmerSample out;
  for (int j = 0; j < patch.dim(); ++j) {
    out.trace_orthogonal += split_along(f.nu, f.tangents, dn.col(j))[j];
    out.trace_oblique += split_along(n, f.tangents, dn.col(j))[j];
  }
  out.residual = std::abs(out.trace_orthogonal - out.trace_oblique);
  return out;
}

Check palmer_check(const Hypersurface& sigma, const WulffShape& w, int points, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> which(0, static_cast<int>(sigma.patches.size()) - 1);
  double worst = 0.0;
  PalmerSample at_worst;
  for (int i = 0; i < points; ++i) {
    SurfacePoint sp;
    sp.patch = which(rng);
    const Box& dom = sigma.patches[sp.patch].domain;
    sp.param.resize(dom.dim());
    for (int a = 0; a < dom.dim(); ++a) {
      std::uniform_real_distribution<double> u(dom.axes[a].lo, dom.axes[a].hi);
      sp.param[a] = u(rng);
    }
    const PalmerSample s = palmer_consistency(sigma, w, sp);
    if (s.residual >= worst) {
      worst = s.residual;
      at_worst = s;
    }
  }
  Check c = make_check("Palmer trace identity", "tr P^nu(dn) = tr P^n(dn)", at_worst.trace_orthogonal,
                       at_worst.trace_oblique, worst, tol);
  c.note = "max over " + std::to_string(points) + " random points";
  return c;
}

double anisotropic_divergence(const Hypersurface& sigma, const WulffShape& w, const VectorField& x,
                              const SurfacePoint& at) {
  const Patch& patch = patch_of(sigma, at);
  const Frame f = frame_at(patch, at.param);
  const Vec n = w.support_gradient(f.nu);
  const Mat dx = x.differential(f.point);
  double tr = 0.0;
  for (int j = 0; j < patch.dim(); ++j) tr += split_along(n, f.tangents, dx * f.tangents.col(j))[j];
  return tr;
}

double injectivity_bound(const Hypersurface& sigma, const WulffShape& w, bool both_sides) {
  constexpr int kGrid = 64;
  double radius = 0.0;
  for (int i = 0; i < static_cast<int>(sigma.patches.size()); ++i) {
    const Box& dom = sigma.patches[i].domain;
    const int dim = dom.dim();
    std::vector<int> idx(dim, 0);
    while (true) {
      SurfacePoint sp{i, Vec(dim)};
      for (int a = 0; a < dim; ++a) sp.param[a] = dom.axes[a].lo + dom.axes[a].width() * (idx[a] + 0.5) / kGrid;
      radius = std::max(radius, shape_operator(sigma, w, sp).spectral_radius());
      if (both_sides) radius = std::max(radius, shape_operator(sigma, w, sp, true).spectral_radius());
      int a = dim - 1;
      while (a >= 0 && ++idx[a] == kGrid) idx[a--] = 0;
      if (a < 0) break;
    }
  }
  return radius > 0.0 ? 0.2 / radius : std::numeric_limits<double>::infinity();
}

std::vector<double> curvature_integrals(const Hypersurface& sigma, const WulffShape& w, bool negative) {
  const int n = sigma.ambient() - 1;
  const VolumeForm omega = standard_form(sigma.ambient());
  std::vector<double> out(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i < static_cast<int>(sigma.patches.size()); ++i) {
      const Patch& patch = sigma.patches[i];
      out[k] += integrate_patch(patch, [&](const Vec& s, const Vec&, const Mat& t) -> std::optional<double> {
                  const Vec c = hyperplane_covector(omega, t);
                  const double area = w.support(negative ? Vec(-c) : c);
                  if (k == 0) return area;
                  return shape_operator(sigma, w, SurfacePoint{i, s}, negative).c[k] * area;
                }).value;
    }
  }
  return out;
}

double tube_polynomial(const std::vector<double>& integrals, double eps) {
  double v = 0.0;
  for (std::size_t k = 0; k < integrals.size(); ++k) v += std::pow(eps, k + 1) / (k + 1) * integrals[k];
  return v;
}

TubeCounts tube_mc(const Hypersurface& sigma, const WulffShape& w, const std::vector<double>& eps,
                   const MCConfig& mc) {
  if (eps.empty()) throw DomainError("empty grid");
  if (sigma.ambient() != 2 || sigma.patches.size() != 1 || !sigma.closed) {
    throw DomainError("tube Monte Carlo needs a closed planar curve with one periodic chart");
  }
  for (double e : eps) {
    if (!(e > 0.0)) throw DomainError("tube radii must be positive");
  }
  const Patch& patch = sigma.patches.front();
  const Interval dom = patch.domain.axes[0];
  constexpr int kSamples = 1024;
  std::vector<double> param(kSamples);
  std::vector<Vec> pts(kSamples);
  for (int j = 0; j < kSamples; ++j) {
    param[j] = dom.lo + dom.width() * j / kSamples;
    pts[j] = patch.point(Vec::Constant(1, param[j]));
  }
  double gap_max = 0.0, gap_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kSamples; ++j) {
    const double g = (pts[(j + 1) % kSamples] - pts[j]).norm();
    gap_max = std::max(gap_max, g);
    gap_min = std::min(gap_min, g);
  }
  if (!(gap_min > 0.0)) throw DegenerateError("tube Monte Carlo: chart has repeated points");
  const double eps_max = *std::max_element(eps.begin(), eps.end());
  const double reach = eps_max * outer_radius(w) + gap_max;
  const Box box = mc.box.value_or(sample_bounds(pts, reach));

  // Uniform grid of cell size `reach`: any sample within reach of p sits in
  // the 3 x 3 block around p's cell.
  const int nx = std::max(1, static_cast<int>(std::ceil(box.axes[0].width() / reach)));
  const int ny = std::max(1, static_cast<int>(std::ceil(box.axes[1].width() / reach)));
  std::vector<std::vector<int>> cells(static_cast<std::size_t>(nx) * ny);
  auto cell_of = [&](const Vec& p, int& ix, int& iy) {
    ix = std::clamp(static_cast<int>((p[0] - box.axes[0].lo) / reach), 0, nx - 1);
    iy = std::clamp(static_cast<int>((p[1] - box.axes[1].lo) / reach), 0, ny - 1);
  };
  for (int j = 0; j < kSamples; ++j) {
    int ix, iy;
    cell_of(pts[j], ix, iy);
    cells[static_cast<std::size_t>(iy) * nx + ix].push_back(j);
  }
  // Window (in samples) that must contain the F-bar-nearest point.
  const int half = std::min(kSamples / 2, static_cast<int>(std::ceil(2.0 * reach / gap_min)) + 2);
  const int stride = std::max(1, half / 8);
  const double dt = dom.width() / kSamples;
  const int m = static_cast<int>(eps.size());

  auto visit = [&](const Vec& p, std::span<std::int64_t> counters) {
    int ix, iy;
    cell_of(p, ix, iy);
    double best = std::numeric_limits<double>::infinity();
    int nearest = -1;
    for (int cy = std::max(0, iy - 1); cy <= std::min(ny - 1, iy + 1); ++cy) {
      for (int cx = std::max(0, ix - 1); cx <= std::min(nx - 1, ix + 1); ++cx) {
        for (int j : cells[static_cast<std::size_t>(cy) * nx + cx]) {
          const double d = (pts[j] - p).squaredNorm();
          if (d < best) {
            best = d;
            nearest = j;
          }
        }
      }
    }
    if (nearest < 0 || std::sqrt(best) > reach) return;
    // Coarse scan of the window, then golden section around the best sample.
    auto dist = [&](double s) { return w.gauge(p - patch.point(Vec::Constant(1, s))); };
    double best_f = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = -half; k <= half; k += stride) {
      const double f = dist(param[nearest] + k * dt);
      if (f < best_f) {
        best_f = f;
        best_k = k;
      }
    }
    const double centre = param[nearest] + best_k * dt;
    double s_star = centre;
    const double d = -golden_section_max([&](double s) { return -dist(s); }, centre - stride * dt,
                                         centre + stride * dt, 40, &s_star);
    if (d > eps_max) return;
    const Vec s1 = Vec::Constant(1, s_star);
    const Vec c = hyperplane_covector(standard_form(2), patch.tangents(s1));
    const bool outside = (p - patch.point(s1)).dot(c) >= 0.0;
    for (int i = 0; i < m; ++i) {
      if (d <= eps[i]) ++counters[outside ? i : m + i];
    }
  };
  const auto hits = mc_count(box, mc, 2 * m, visit);
  TubeCounts out;
  out.eps = eps;
  out.box_volume = box.volume();
  for (int i = 0; i < m; ++i) {
    out.outer.push_back(estimate_from_hits(hits[i], box.volume(), mc));
    out.inner.push_back(estimate_from_hits(hits[m + i], box.volume(), mc));
    out.full.push_back(estimate_from_hits(hits[i] + hits[m + i], box.volume(), mc));
  }
  return out;
}

std::vector<TubeResult> tube_volume(const Hypersurface& sigma, const WulffShape& w, const std::vector<double>& eps,
                                    const MCConfig& mc, TubeSide side) {
  if (eps.empty()) throw DomainError("empty grid");
  validate_closed(sigma);
  const bool need_inner = side != TubeSide::Outer;
  const double bound = injectivity_bound(sigma, w, need_inner);
  for (double e : eps) {
    if (e > bound) {
      std::ostringstream out;
      out << "tube radius " << e << " exceeds the injectivity bound " << bound;
      throw DomainError(out.str());
    }
  }
  const auto outer = curvature_integrals(sigma, w, false);
  std::vector<double> inner;
  if (need_inner) inner = curvature_integrals(sigma, w, true);
  const TubeCounts counts = tube_mc(sigma, w, eps, mc);
  std::vector<TubeResult> results;
  for (bool full : {false, true}) {
    if ((full && side == TubeSide::Outer) || (!full && side == TubeSide::Full)) continue;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      TubeResult r;
      r.epsilon = eps[i];
      r.epsilon_max = bound;
      r.full = full;
      r.formula = tube_polynomial(outer, eps[i]) + (full ? tube_polynomial(inner, eps[i]) : 0.0);
      r.mc = full ? counts.full[i] : counts.outer[i];
      r.sigma_residual = r.mc.std_error > 0 ? std::abs(r.formula - r.mc.value) / r.mc.std_error : 0.0;
      std::ostringstream name;
      name << (full ? "full tube" : "outer tube") << " eps=" << eps[i];
      r.check = sigma_check(name.str(),
                            full ? "vol(Sigma + eps W) = sum eps^{k+1}/(k+1) int c_k(S) dF + c_k(S_-) dF-"
                                 : "vol T+(eps) = sum eps^{k+1}/(k+1) int c_k(S) dF",
                            r.formula, r.mc.value, r.mc.std_error);
      std::ostringstream note;
      note << "injectivity bound " << bound << ", " << r.sigma_residual << " sigma";
      r.check.note = note.str();
      results.push_back(std::move(r));
    }
  }
  return results;
}

MinkowskiResult minkowski_content(const SupportFunction& body, const WulffShape& w, double t0, const MCConfig& mc,
                                  double tol) {
  if (body.dim != 2 || w.dim() != 2) throw DimensionError("Minkowski content is computed in the plane");
  if (!(t0 > 0.0)) throw DomainError("Minkowski content needs t0 > 0");
  constexpr int kVertices = 8192;
  std::vector<Vec> xb(kVertices), xw(kVertices);
  for (int j = 0; j < kVertices; ++j) {
    const Vec u = polar(2.0 * kPi * j / kVertices);
    if (!(body.h(u) > 0.0)) throw DomainError("Minkowski content: the origin must be interior to B");
    xb[j] = support_point(body, u);
    // Any subgradient of h_W gives a boundary point; kinks become edges.
    xw[j] = w.differentiable() ? w.support_gradient(u) : support_point(w.support_function(), u);
  }
  MinkowskiResult r;
  r.t = {t0, 0.5 * t0, 0.25 * t0};
  std::vector<StarPolygon> sums;
  std::vector<Vec> outer;
  for (double t : r.t) {
    std::vector<Vec> v(kVertices);
    for (int j = 0; j < kVertices; ++j) v[j] = xb[j] + t * xw[j];
    if (outer.empty()) outer = v;
    sums.emplace_back(v);
  }
  const StarPolygon b(xb);
  const Box box = mc.box.value_or(sample_bounds(outer, 0.0));
  const auto hits = mc_count(box, mc, 3, [&](const Vec& p, std::span<std::int64_t> c) {
    if (b.contains(p) || !sums[0].contains(p)) return;
    ++c[0];
    if (!sums[1].contains(p)) return;
    ++c[1];
    if (sums[2].contains(p)) ++c[2];
  });
  for (int i = 0; i < 3; ++i) r.gain.push_back(estimate_from_hits(hits[i], box.volume(), mc));
  r.area = anisotropic_area(convex_boundary(body), w).value;
  finish_minkowski(r, box.volume(), tol);
  return r;
}

MinkowskiResult minkowski_content(const Hypersurface& boundary, const WulffShape& w, double t0, const MCConfig& mc,
                                  double tol) {
  if (!(t0 > 0.0)) throw DomainError("Minkowski content needs t0 > 0");
  validate_closed(boundary);
  const double bound = injectivity_bound(boundary, w, false);
  if (t0 > bound) throw DomainError("Minkowski content: t0 exceeds the injectivity bound");
  MinkowskiResult r;
  r.t = {t0, 0.5 * t0, 0.25 * t0};
  const TubeCounts counts = tube_mc(boundary, w, r.t, mc);
  r.gain = counts.outer;
  r.area = anisotropic_area(boundary, w).value;
  finish_minkowski(r, counts.box_volume, tol);
  return r;
}

namespace {

IsoperimetricResult isoperimetric_impl(const Hypersurface& boundary, const McEstimate& vb, const WulffShape& w,
                                       bool same_body) {
  const int n = boundary.ambient() - 1;
  IsoperimetricResult r;
  r.area = anisotropic_area(boundary, w).value;
  r.volume_body = vb.value;
  r.volume_wulff = w.volume().value;
  const double e = 1.0 / (n + 1);
  r.rhs = (n + 1) * std::pow(r.volume_wulff, e) * std::pow(r.volume_body, 1.0 - e);
  r.ratio = r.area / r.rhs;
  const double rel_w = w.volume().std_error / r.volume_wulff;
  const double rel_b = vb.std_error / r.volume_body;
  // B = W shares one estimate, so the exponents add up.
  r.ratio_std_error = same_body ? r.ratio * rel_w : r.ratio * std::hypot(e * rel_w, (1.0 - e) * rel_b);
  r.near_equality = std::abs(r.ratio - 1.0) <= 3.0 * r.ratio_std_error;
  r.check = lower_bound_check("isoperimetric ratio", "Area_F(dB) >= (n+1) vol(W)^{1/(n+1)} vol(B)^{n/(n+1)}",
                              r.ratio, 1.0, 3.0 * r.ratio_std_error);
  r.check.std_error = r.ratio_std_error;
  std::ostringstream note;
  note << "Area_F " << r.area << ", rhs " << r.rhs << (r.near_equality ? ", equality case" : "");
  r.check.note = note.str();
  return r;
}

}  // namespace

IsoperimetricResult isoperimetric_check(const Hypersurface& boundary, const McEstimate& body_volume,
                                        const WulffShape& w) {
  return isoperimetric_impl(boundary, body_volume, w, false);
}

IsoperimetricResult isoperimetric_check(const WulffShape& body, const WulffShape& w) {
  return isoperimetric_impl(convex_boundary(body.support_function()), body.volume(), w, &body == &w);
}

Check wulff_area_check(const WulffShape& w) {
  const int n = w.dim() - 1;
  const double area = anisotropic_area(convex_boundary(w.support_function()), w).value;
  Check c = sigma_check("Area_F(dW) = (n+1) vol(W)", "Area_F(dW) = (n+1) vol(W)", area, (n + 1) * w.volume().value,
                        (n + 1) * w.volume().std_error, 3.0, 1e-6);
  c.note = w.name();
  return c;
}

SobolevResult sobolev_check(const ScalarField& f, const Box& box, const WulffShape& w, double p,
                            const QuadratureOptions& opts) {
  const int dim = box.dim();
  const int n = dim - 1;
  if (f.dim != dim || w.dim() != dim) throw DimensionError("sobolev_check: field, box and W dimensions differ");
  if (!(p >= 1.0)) throw DomainError("sobolev_check needs p >= 1");
  if (p > 1.0 && p >= n + 1) throw DomainError("Gagliardo-Nirenberg form needs p < n + 1");
  QuadratureOptions o = opts;
  if (o.panels.empty()) o.panels.assign(dim, 4);
  // h(-grad |f|), zero on {f = 0}.
  auto gradient_term = [&](const Vec& x) {
    const double v = f(x);
    if (v == 0.0) return 0.0;
    const Vec g = f.grad(x);
    return w.support(v > 0 ? Vec(-g) : g);
  };
  auto power_integral = [&](auto&& integrand, double q) {
    return integrate_box(box, [&](const Vec& x) -> std::optional<double> { return std::pow(integrand(x), q); }, o)
        .value;
  };
  auto abs_f = [&](const Vec& x) { return std::abs(f(x)); };
  const double vol = w.volume().value;
  SobolevResult r;
  if (p == 1.0) {
    r.lhs = power_integral(gradient_term, 1.0);
    const double q = (n + 1.0) / n;
    r.rhs = (n + 1) * std::pow(vol, 1.0 / (n + 1)) * std::pow(power_integral(abs_f, q), 1.0 / q);
  } else {
    const double pstar = 1.0 / (1.0 / p - 1.0 / (n + 1));
    const double c = p * n / ((n + 1 - p) * (n + 1)) * std::pow(vol, -1.0 / (n + 1));
    r.lhs = c * std::pow(power_integral(gradient_term, p), 1.0 / p);
    r.rhs = std::pow(power_integral(abs_f, pstar), 1.0 / pstar);
  }
  r.ratio = r.lhs / r.rhs;
  r.check = lower_bound_check(p == 1.0 ? "Sobolev ratio" : "Gagliardo-Nirenberg ratio",
                              p == 1.0 ? "int h(-grad|f|) >= (n+1) vol(W)^{1/(n+1)} ||f||_{(n+1)/n}"
                                       : "||f||_{p*} <= C ||h(-grad|f|)||_p",
                              r.ratio, 1.0, 1e-3);
  std::ostringstream note;
  note << f.name << ", p = " << p << ", lhs " << r.lhs << ", rhs " << r.rhs;
  r.check.note = note.str();
  return r;
}

Check sobolev_scaling_probe(const ScalarField& f, const Box& box, const WulffShape& w, double lambda, double p,
                            double tol) {
  if (!(lambda > 0.0)) throw DomainError("scaling probe needs lambda > 0");
  ScalarField scaled;
  scaled.dim = f.dim;
  scaled.value = [f, lambda](const Vec& x) { return f(lambda * x); };
  scaled.gradient = [f, lambda](const Vec& x) -> Vec { return lambda * f.grad(lambda * x); };
  scaled.name = f.name + " scaled";
  Box small = box;
  for (auto& a : small.axes) a = {a.lo / lambda, a.hi / lambda};
  const double r1 = sobolev_check(f, box, w, p).ratio;
  const double r2 = sobolev_check(scaled, small, w, p).ratio;
  Check c = make_check("Sobolev scale invariance", "ratio(f(lambda x)) = ratio(f)", r1, r2, std::abs(r1 - r2), tol);
  std::ostringstream note;
  note << "lambda = " << lambda;
  c.note = note.str();
  return c;
}

FlowStep flow(const VectorField& x, const Vec& p, double t, int steps) {
  const int dim = static_cast<int>(p.size());
  Vec y = p;
  Mat d = Mat::Identity(dim, dim);
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Vec k1 = x(y);
    const Mat j1 = x.differential(y) * d;
    const Vec y2 = y + 0.5 * h * k1;
    const Mat d2 = d + 0.5 * h * j1;
    const Vec k2 = x(y2);
    const Mat j2 = x.differential(y2) * d2;
    const Vec y3 = y + 0.5 * h * k2;
    const Mat d3 = d + 0.5 * h * j2;
    const Vec k3 = x(y3);
    const Mat j3 = x.differential(y3) * d3;
    const Vec y4 = y + h * k3;
    const Mat d4 = d + h * j3;
    const Vec k4 = x(y4);
    const Mat j4 = x.differential(y4) * d4;
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    d += h / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
  }
  return {y, d};
}

double varied_area(const Hypersurface& sigma, const WulffShape& w, const VectorField& x, double t, int nodes) {
  const VolumeForm omega = standard_form(sigma.ambient());
  double total = 0.0;
  for (const auto& patch : sigma.patches) {
    total += integrate_box_fixed(
                 patch.domain,
                 [&](const Vec& s) -> std::optional<double> {
                   const FlowStep f = flow(x, patch.point(s), t);
                   return w.support(hyperplane_covector(omega, f.differential * patch.tangents(s)));
                 },
                 nodes, patch.panels)
                 .value;
  }
  return total;
}

FirstVariationResult first_variation_check(const Hypersurface& sigma, const WulffShape& w, const VectorField& x,
                                           double dt, double tol) {
  if (!sigma.closed) throw DomainError("first variation check needs a closed hypersurface");
  const VolumeForm omega = standard_form(sigma.ambient());
  FirstVariationResult r;
  r.finite_difference = (varied_area(sigma, w, x, dt) - varied_area(sigma, w, x, -dt)) / (2.0 * dt);
  double max_psi = 0.0, max_x = 0.0;
  for (int i = 0; i < static_cast<int>(sigma.patches.size()); ++i) {
    const Patch& patch = sigma.patches[i];
    r.divergence_integral +=
        integrate_patch(patch, [&](const Vec& s, const Vec&, const Mat& t) -> std::optional<double> {
          return anisotropic_divergence(sigma, w, x, SurfacePoint{i, s}) * w.support(hyperplane_covector(omega, t));
        }).value;
    r.normal_form += integrate_patch(patch, [&](const Vec& s, const Vec& b, const Mat& t) -> std::optional<double> {
                       const ShapeOperatorSample so = shape_operator(sigma, w, SurfacePoint{i, s});
                       double psi = 0.0;
                       const Vec xb = x(b);
                       split_along(so.normal, t, xb, &psi);
                       max_psi = std::max(max_psi, std::abs(psi));
                       max_x = std::max(max_x, xb.norm());
                       return psi * so.trace() * w.support(hyperplane_covector(omega, t));
                     }).value;
    r.scale += integrate_patch(patch, [&](const Vec&, const Vec& b, const Mat& t) -> std::optional<double> {
                 return x(b).norm() * w.support(hyperplane_covector(omega, t));
               }).value;
  }
  r.tangential = max_psi <= 1e-9 * max_x;
  auto scaled = [&](std::string name, std::string tag, double lhs, double rhs, double tolerance) {
    const double denom = std::max({std::abs(lhs), std::abs(rhs), r.scale});
    Check c = make_check(std::move(name), std::move(tag), lhs, rhs, denom > 0 ? std::abs(lhs - rhs) / denom : 0.0,
                         tolerance);
    std::ostringstream note;
    note << "scale int |X| dF = " << r.scale << ", dt = " << dt;
    c.note = note.str();
    return c;
  };
  r.checks.push_back(scaled("first variation", "d/dt Area_F(phi_t Sigma) = int div^F X dF", r.finite_difference,
                            r.divergence_integral, tol));
  r.checks.push_back(
      scaled("normal form", "int div^F X dF = int psi tr S^F dF", r.divergence_integral, r.normal_form, tol));
  if (r.tangential) {
    r.checks.push_back(scaled("tangential variation", "tangential fields do not change Area_F", r.finite_difference,
                              0.0, 1e-6));
  }
  return r;
}

}  // namespace anisotrope
