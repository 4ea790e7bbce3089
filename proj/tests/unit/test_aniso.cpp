#include <doctest.h>

#include "anisotrope/aniso.hpp"

#include <cmath>

using namespace anisotrope;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

MCConfig mc_with(std::int64_t samples, std::uint64_t seed = 7) {
  MCConfig mc;
  mc.samples = samples;
  mc.seed = seed;
  return mc;
}

WulffShape shape(SupportFunction s, std::int64_t samples = 400'000) {
  return WulffShape(std::move(s), mc_with(samples, 3));
}

Hypersurface circle(double r) { return single_patch_surface(circle_patch(r), true); }
Hypersurface ellipse(double a, double b) { return single_patch_surface(ellipse_patch(a, b), true); }

SurfacePoint at(double t) { return SurfacePoint{0, Vec::Constant(1, t)}; }

}  // namespace

TEST_CASE("anisotropic area") {
  const WulffShape round = shape(euclidean_support(2));
  const WulffShape square = shape(square_support(2));
  CHECK(relative_difference(anisotropic_area(circle(1.0), round).value, 2 * kPi) <= 1e-10);
  CHECK(relative_difference(anisotropic_area(circle(1.0), square).value, 8.0) <= 1e-10);

  // Independent route: the Wulff integrand on tangent vectors.
  const WulffShape ell = shape(ellipse_support({2.0, 0.5}));
  const Hypersurface curve = ellipse(1.5, 1.0);
  const double direct = anisotropic_area(curve, ell).value;
  const double via_density = integrate_density(curve.patches[0], wulff_integrand(ell, VolumeForm{2, 1.0})).value;
  CHECK(relative_difference(direct, via_density) <= 1e-8);

  // The boundary of W has Area_F = 2 vol(W) = 2 pi a b.
  const double own = anisotropic_area(convex_boundary(ell.support_function()), ell).value;
  CHECK(relative_difference(own, 2 * kPi * 2.0 * 0.5) <= 1e-8);

  // Symmetric W: interior and exterior areas agree.
  CHECK(anisotropic_area(curve, ell, true).value == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("boundary charts") {
  // Profile, radial and numerical-support charts trace the same curve.
  const SupportFunction prof = planar_support(trig_profile(1.0, {0.0, 0.1}, {0.05, 0.0}), "bumpy");
  const Patch exact = convex_boundary_patch(prof, 2.0, v2(0.3, -0.1));
  SupportFunction numeric = prof;
  numeric.profile.reset();
  numeric.gauge.reset();
  numeric.gauge_gradient.reset();
  const Patch approx = convex_boundary_patch(numeric, 2.0, v2(0.3, -0.1));
  for (double t : {0.1, 1.3, 2.9, 4.4}) {
    const Vec s = Vec::Constant(1, t);
    CHECK((exact.point(s) - approx.point(s)).norm() < 1e-8);
    CHECK((exact.tangents(s) - approx.tangents(s)).norm() < 1e-5);
  }
  const Patch radial = convex_boundary_patch(ellipse_support({2.0, 1.0}));
  const Vec p = radial.point(Vec::Constant(1, 0.7));
  CHECK(p[0] * p[0] / 4 + p[1] * p[1] == doctest::Approx(1.0).epsilon(1e-12));
  check_differential(radial.chart, {Vec::Constant(1, 0.7), Vec::Constant(1, 3.0)});
  const Hypersurface w = convex_boundary(ellipse_support({2.0, 1.0}));
  CHECK(winding_number(w, Vec::Zero(2)) == 1);
  CHECK_NOTHROW(validate_closed(w, 1e-8));
}

TEST_CASE("Gauss maps") {
  const WulffShape round = shape(euclidean_support(2));
  const Hypersurface c = circle(3.0);
  const Vec n = gauss_map(c, round, at(0.4));
  CHECK((n - c.patches[0].point(Vec::Constant(1, 0.4)) / 3.0).norm() < 1e-12);
  CHECK((negative_gauss_map(c, round, at(0.4)) + n).norm() < 1e-9);
  CHECK((surface_normal(c, at(0.4)) - n).norm() < 1e-12);

  // Ellipse W: n lies on the boundary of W and <nu, n> = h(nu).
  const WulffShape ell = shape(ellipse_support({2.0, 0.5}));
  const Vec m = gauss_map(c, ell, at(1.1));
  CHECK(ell.gauge(m) == doctest::Approx(1.0).epsilon(1e-9));
  const Vec nu = surface_normal(c, at(1.1));
  CHECK(nu.dot(m) == doctest::Approx(ell.support(nu)).epsilon(1e-9));
}

TEST_CASE("shape operators") {
  const WulffShape round = shape(euclidean_support(2));
  for (double r : {0.5, 1.0, 4.0}) {
    const auto s = shape_operator(circle(r), round, at(0.9));
    CHECK(s.matrix(0, 0) == doctest::Approx(1.0 / r).epsilon(1e-7));
    CHECK(s.trace() == doctest::Approx(1.0 / r).epsilon(1e-7));
  }
  // Ellipse at (a, 0) under the Euclidean W has curvature a / b^2.
  const auto e = shape_operator(ellipse(2.0, 0.8), round, at(0.0));
  CHECK(e.trace() == doctest::Approx(2.0 / 0.64).epsilon(1e-6));

  // The boundary of W has S^F = identity everywhere.
  const WulffShape ell = shape(ellipse_support({2.0, 0.5}));
  const Hypersurface bw = convex_boundary(ell.support_function());
  for (double t : {0.0, 0.8, 2.0, 4.5}) CHECK(shape_operator(bw, ell, at(t)).trace() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(shape_operator(bw, ell, at(0.8), true).trace() == doctest::Approx(-1.0).epsilon(1e-6));

  // Sphere of radius 2: both principal values 1/2.
  const Hypersurface sphere = single_patch_surface(sphere_patch(2.0), true);
  const auto s3 = shape_operator(sphere, shape(euclidean_support(3)), SurfacePoint{0, v2(1.1, 0.4)});
  CHECK(s3.c[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s3.c[2] == doctest::Approx(0.25).epsilon(1e-6));

  CHECK_THROWS_AS(shape_operator(circle(1.0), shape(square_support(2)), at(0.3)), DomainError);
}

TEST_CASE("elementary symmetric polynomials") {
  Mat m(3, 3);
  m << 2, 1, 0, 0, 3, 1, 1, 0, 5;
  const auto c = elementary_symmetric(m);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == doctest::Approx(m.trace()));
  CHECK(c[3] == doctest::Approx(m.determinant()));
  // c_2 = sum of principal 2x2 minors.
  CHECK(c[2] == doctest::Approx(6.0 + 10.0 + 15.0));
}

TEST_CASE("Palmer trace identity and divergence") {
  const WulffShape ell = shape(ellipse_support({2.0, 0.5}));
  const Check p = palmer_check(ellipse(1.5, 1.0), ell, 32, 11);
  CHECK(p.pass);
  CHECK(p.residual <= 1e-4);

  // The position field has div^F = n on any hypersurface.
  const VectorField id = Map::identity(2);
  CHECK(anisotropic_divergence(ellipse(1.5, 1.0), ell, id, at(0.7)) == doctest::Approx(1.0).epsilon(1e-10));
  const VectorField rot = Map::linear((Mat(2, 2) << 0, -1, 1, 0).finished());
  CHECK(std::abs(anisotropic_divergence(circle(1.0), shape(euclidean_support(2)), rot, at(0.7))) < 1e-10);
}

TEST_CASE("tube formula") {
  const WulffShape round = shape(euclidean_support(2));
  const auto ints = curvature_integrals(circle(1.0), round);
  for (double e : {0.05, 0.1, 0.2}) CHECK(tube_polynomial(ints, e) == doctest::Approx(2 * kPi * e + kPi * e * e).epsilon(1e-8));
  const auto inner = curvature_integrals(circle(1.0), round, true);
  CHECK(tube_polynomial(ints, 0.1) + tube_polynomial(inner, 0.1) == doctest::Approx(4 * kPi * 0.1).epsilon(1e-8));

  const WulffShape ell = shape(ellipse_support({1.5, 0.8}));
  const auto own = curvature_integrals(convex_boundary(ell.support_function()), ell);
  CHECK(tube_polynomial(own, 0.15) == doctest::Approx((1.15 * 1.15 - 1) * kPi * 1.2).epsilon(1e-8));

  const auto results = tube_volume(circle(1.0), round, {0.05, 0.1, 0.15}, mc_with(400'000));
  for (const auto& r : results) CHECK_MESSAGE(r.check.pass, r.check.note);
  const auto full = tube_volume(ellipse(1.5, 1.0), ell, {0.1}, mc_with(400'000), TubeSide::Both);
  REQUIRE(full.size() == 2);
  CHECK_FALSE(full.front().full);
  CHECK(full.back().full);
  CHECK_MESSAGE(full.back().check.pass, full.back().check.note);
  CHECK_MESSAGE(full.front().check.pass, full.front().check.note);

  CHECK_THROWS_AS(tube_volume(circle(1.0), round, {0.5}, mc_with(10'000)), DomainError);
  CHECK_THROWS_AS(tube_mc(circle(1.0), round, {}, mc_with(10'000)), DomainError);
}

TEST_CASE("tube Monte Carlo sides match the winding number") {
  const WulffShape ell = shape(ellipse_support({1.5, 0.8}));
  const Hypersurface curve = ellipse(1.5, 1.0);
  // Exact membership oracle: brute-force F-bar distance plus winding number.
  const Patch& p = curve.patches[0];
  const int n = 4000;
  std::vector<Vec> pts(n);
  for (int j = 0; j < n; ++j) pts[j] = p.point(Vec::Constant(1, 2 * kPi * j / n));
  const double eps = 0.15;
  MCConfig mc = mc_with(10'000, 5);
  const Box box{{{-2.0, 2.0}, {-1.5, 1.5}}};
  mc.box = box;
  const auto oracle = mc_count(box, mc, 2, [&](const Vec& x, std::span<std::int64_t> c) {
    double d = std::numeric_limits<double>::infinity();
    for (const Vec& q : pts) d = std::min(d, ell.gauge(x - q));
    if (d > eps) return;
    ++c[winding_number(curve, x, 1024) == 0 ? 0 : 1];
  });
  const auto counts = tube_mc(curve, ell, {eps}, mc);
  CHECK(std::abs(counts.outer[0].hits - oracle[0]) <= 2);
  CHECK(std::abs(counts.inner[0].hits - oracle[1]) <= 2);
}

TEST_CASE("Minkowski content") {
  const WulffShape round = shape(euclidean_support(2));
  const auto disk = minkowski_content(euclidean_support(2), round, 0.2, mc_with(2'000'000));
  CHECK_MESSAGE(disk.check.pass, disk.check.note);
  CHECK(disk.area == doctest::Approx(2 * kPi).epsilon(1e-10));

  const WulffShape ell = shape(ellipse_support({1.5, 0.8}));
  const auto self = minkowski_content(ell.support_function(), ell, 0.2, mc_with(2'000'000));
  CHECK(self.area == doctest::Approx(2 * kPi * 1.2).epsilon(1e-8));
  CHECK_MESSAGE(self.check.pass, self.check.note);

  // Ellipse under the square W: Area_F = int |dx| + |dy| = 4 (a + b).
  const WulffShape square = shape(square_support(2));
  const auto sq = minkowski_content(ellipse_support({1.5, 0.8}), square, 0.2, mc_with(2'000'000));
  CHECK(sq.area == doctest::Approx(4 * 2.3).epsilon(1e-8));
  CHECK_MESSAGE(sq.check.pass, sq.check.note);

  const auto curve = minkowski_content(circle(1.0), round, 0.15, mc_with(1'000'000));
  CHECK_MESSAGE(curve.check.pass, curve.check.note);
}

TEST_CASE("isoperimetric inequality") {
  const WulffShape square = shape(square_support(2));
  const WulffShape round = shape(euclidean_support(2));
  const auto r = isoperimetric_check(circle(1.0), round.volume(), square);
  CHECK(r.check.pass);
  CHECK(r.ratio == doctest::Approx(8.0 / (2 * std::sqrt(4.0 * kPi))).epsilon(1e-2));
  CHECK_FALSE(r.near_equality);

  const WulffShape ell = shape(ellipse_support({1.5, 0.8}));
  const auto eq = isoperimetric_check(ell, ell);
  CHECK(eq.check.pass);
  CHECK(eq.near_equality);
  CHECK(wulff_area_check(ell).pass);
  CHECK(wulff_area_check(square).pass);
}

TEST_CASE("Sobolev inequality") {
  const WulffShape ell = shape(ellipse_support({1.5, 0.8}));
  const Box box{{{-1.0, 1.0}, {-1.0, 1.0}}};
  ScalarField bump;
  bump.dim = 2;
  bump.value = [](const Vec& x) { return std::pow(std::max(0.0, 1.0 - x.squaredNorm()), 2); };
  bump.gradient = [](const Vec& x) -> Vec { return -4.0 * std::max(0.0, 1.0 - x.squaredNorm()) * x; };
  bump.name = "bump";
  const auto s1 = sobolev_check(bump, box, ell);
  CHECK_MESSAGE(s1.check.pass, s1.check.note);
  CHECK(s1.ratio > 1.0);
  const auto s2 = sobolev_check(bump, box, ell, 1.5);
  CHECK_MESSAGE(s2.check.pass, s2.check.note);
  CHECK(sobolev_scaling_probe(bump, box, ell, 2.0).pass);
  CHECK_THROWS_AS(sobolev_check(bump, box, ell, 2.5), DomainError);
}

TEST_CASE("first variation") {
  const WulffShape ell = shape(ellipse_support({1.5, 0.8}));
  const Hypersurface curve = ellipse(1.2, 0.9);
  // Dilation: Area_F(e^t Sigma) = e^t Area_F, so the variation is Area_F.
  const auto dil = first_variation_check(curve, ell, Map::identity(2));
  for (const auto& c : dil.checks) CHECK_MESSAGE(c.pass, std::string(c.name + ": " + c.note));
  CHECK(dil.finite_difference == doctest::Approx(anisotropic_area(curve, ell).value).epsilon(1e-6));

  const auto bent = first_variation_check(curve, ell, Map::from_expressions(2, {"x^2 + y", "sin(x) * y"}));
  for (const auto& c : bent.checks) CHECK_MESSAGE(c.pass, std::string(c.name + ": " + c.note));
  CHECK_FALSE(bent.tangential);

  // Rotation is tangent to a circle.
  const auto rot = first_variation_check(circle(1.0), shape(euclidean_support(2)), Map::from_expressions(2, {"-y", "x"}));
  CHECK(rot.tangential);
  CHECK(rot.checks.size() == 3);
  for (const auto& c : rot.checks) CHECK_MESSAGE(c.pass, std::string(c.name + ": " + c.note));

  Hypersurface open = curve;
  open.closed = false;
  CHECK_THROWS_AS(first_variation_check(open, ell, Map::identity(2)), DomainError);
}
