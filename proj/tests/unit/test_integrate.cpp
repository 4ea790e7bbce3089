#include <doctest.h>

#include "anisotrope/convex.hpp"
#include "anisotrope/integrate.hpp"

#include <cmath>

using namespace anisotrope;

namespace {

// Composite Simpson rule, an oracle independent of the Gauss-Legendre code.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Box box1(double lo, double hi) { return Box{{{lo, hi}}}; }
Box box2(double a, double b, double c, double d) { return Box{{{a, b}, {c, d}}}; }

ScalarField one(int dim) { return ScalarField::constant(dim, 1.0); }

Density square_wulff_integrand() {
  MCConfig mc;
  mc.samples = 10'000;
  return wulff_integrand(WulffShape(square_support(2), mc), VolumeForm{2, 1.0});
}

}  // namespace

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 2, 5, 64, 512}) {
    const auto& r = gauss_legendre(n);
    double w = 0.0, poly = 0.0;
    for (int i = 0; i < n; ++i) {
      w += r.weights[i];
      poly += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(poly == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
  }
  const auto q = integrate_box(box2(0, 1, 0, 2), [](const Vec& x) -> std::optional<double> {
    return std::exp(x[0]) * std::cos(x[1]);
  });
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx((std::exp(1.0) - 1) * std::sin(2.0)).epsilon(1e-12));
  const auto excl = integrate_box(box1(-1, 1), [](const Vec& x) -> std::optional<double> {
    if (x[0] < 0) return std::nullopt;
    return 1.0;
  }, {.panels = {2}});
  CHECK(excl.excluded_measure == doctest::Approx(1.0));
  CHECK(excl.value == doctest::Approx(1.0));
}

TEST_CASE("expressions") {
  const Expression e("x^2 * sin(y) - 3 / (1 + z) + sqrt(abs(x)) + exp(-y) + a * pi", {{"a", 2.0}});
  Vec x(3);
  x << -1.5, 0.7, 0.25;
  const double expect = 2.25 * std::sin(0.7) - 3 / 1.25 + std::sqrt(1.5) + std::exp(-0.7) + 2 * kPi;
  CHECK(e(x) == doctest::Approx(expect).epsilon(1e-14));
  Vec g;
  CHECK(e.evaluate(x, &g) == doctest::Approx(expect).epsilon(1e-14));
  const Mat fd = fd_jacobian([&e](const Vec& p) { return Vec::Constant(1, e(p)); }, x);
  CHECK((g.transpose() - fd).norm() < 1e-8);
  CHECK(e.arity() == 3);
  CHECK(Expression("-2^2")(x) == doctest::Approx(-4.0));
  CHECK(Expression("2^3^2")(x) == doctest::Approx(512.0));
  CHECK(Expression("(1-x^2-y^2)^2")(v2(0.5, 0.5)) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Expression("x + q"), ParseError);
  CHECK_THROWS_AS(Expression("sin x"), ParseError);
  CHECK_THROWS_AS(Expression("(x + 1"), ParseError);
  CHECK_THROWS_AS(Expression("x 1"), ParseError);
  CHECK_THROWS_AS(ScalarField::from_expression(1, "x + y"), ParseError);

  const Map m = Map::from_expressions(2, {"x*cos(y)", "x*sin(y)"});
  check_differential(m, {v2(1.0, 0.3), v2(2.0, -1.0)});
  CHECK(m.differential(v2(2.0, 0.0)).determinant() == doctest::Approx(2.0));
}

TEST_CASE("integrate_density examples") {
  const auto circle = circle_patch(1.0);
  const double length = integrate_density(circle, euclidean_density(1, 2)).value;
  CHECK(relative_difference(length, 2 * kPi) <= 1e-8);

  const double oracle = simpson([](double t) { return std::abs(std::cos(t)) + std::abs(std::sin(t)); }, 0, 2 * kPi);
  const auto wulff = integrate_density(circle, square_wulff_integrand());
  CHECK(wulff.value == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(wulff.value == doctest::Approx(8.0).epsilon(1e-12));

  CHECK(integrate_density(box_patch(box2(0, 1, 0, 1)), scaled_lebesgue(2, 1.0)).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(integrate_density(circle, euclidean_density(2, 2)), DimensionError);

  Patch flat = box_patch(box2(0, 1, 0, 1));
  flat.chart = Map::from_expressions(2, {"x", "0*y"});
  flat.chart.out = 2;
  CHECK_THROWS_AS(integrate_density(flat, scaled_lebesgue(2, 1.0)), DegenerateError);
}

TEST_CASE("integrals are additive and reparameterisation invariant") {
  const DensityField f = DensityField::weighted(euclidean_density(1, 2), ScalarField::from_expression(2, "1 + x^2 + y"));
  Patch whole = ellipse_patch(2.0, 1.0);
  whole.panels = {1};
  Patch left = whole, right = whole;
  left.domain = box1(0, 2.0);
  right.domain = box1(2.0, 2 * kPi);
  const double total = integrate_density(whole, f).value;
  CHECK(relative_difference(total, integrate_density(left, f).value + integrate_density(right, f).value) <= 1e-10);

  // t = u + 0.3 sin u is an orientation-preserving change of chart.
  Patch re = whole;
  const Map base = whole.chart;
  re.chart.value = [base](const Vec& u) { return base(Vec::Constant(1, u[0] + 0.3 * std::sin(u[0]))); };
  re.chart.jacobian = [base](const Vec& u) -> Mat {
    return base.differential(Vec::Constant(1, u[0] + 0.3 * std::sin(u[0]))) * (1 + 0.3 * std::cos(u[0]));
  };
  CHECK(relative_difference(total, integrate_density(re, f).value) <= 1e-8);
}

TEST_CASE("closed surfaces") {
  const auto circle = single_patch_surface(circle_patch(2.0), true);
  CHECK(enclosed_volume(circle) == doctest::Approx(4 * kPi));
  CHECK_NOTHROW(validate_closed(circle));
  CHECK(winding_number(circle, v2(0.5, 0.3)) == 1);
  CHECK(winding_number(circle, v2(2.5, 0.3)) == 0);
  auto reversed = circle;
  reversed.patches[0].orientation = -1;
  CHECK_THROWS_AS(validate_closed(reversed), DomainError);
  CHECK(winding_number(reversed, v2(0.5, 0.3)) == -1);

  const auto sphere = single_patch_surface(sphere_patch(1.5), true);
  CHECK(enclosed_volume(sphere) == doctest::Approx(4 * kPi * 1.5 * 1.5 * 1.5 / 3).epsilon(1e-9));
  CHECK(integrate_density(sphere.patches[0], euclidean_density(2, 3)).value ==
        doctest::Approx(4 * kPi * 2.25).epsilon(1e-9));
  CHECK_NOTHROW(validate_closed(sphere));
}

TEST_CASE("change of variables") {
  const Box b = box2(0.5, 1.5, 0.2, 0.9);
  const auto id = change_of_variables_check(Map::identity(2), b, scaled_lebesgue(2, 1), scaled_lebesgue(2, 1),
                                            one(2), box_patch(b));
  CHECK(id.residual <= 1e-14);

  const double r = 1.0, big = 2.0;
  const Patch annulus = polar_patch(r, big);
  // Equal-area chart of the same annulus: radius sqrt(r^2 + s (R^2 - r^2)).
  Patch image = annulus;
  image.domain = box2(0, 1, 0, 2 * kPi);
  image.chart = Map::from_expressions(2, {"sqrt(1 + 3*x) * cos(y)", "sqrt(1 + 3*x) * sin(y)"});
  const auto lebesgue = scaled_lebesgue(2, 1.0);
  const auto polar = change_of_variables_check(annulus.chart, annulus.domain, lebesgue, lebesgue, one(2), image);
  CHECK(polar.pass);
  CHECK(polar.lhs == doctest::Approx(kPi * (big * big - r * r)).epsilon(1e-10));
  CHECK(polar.residual <= 1e-8);

  MCConfig mc;
  mc.samples = 1'000'000;
  mc.seed = 11;
  const auto ht = holmes_thompson_density(l1_norm(2), mc);
  const auto htc = change_of_variables_check(annulus.chart, annulus.domain, lebesgue, ht, one(2), image);
  CHECK(htc.residual <= 1e-6);
  // Derived: constant times area, with the MC constant against 4 / pi.
  const double c = ht.constant()->value;
  CHECK(std::abs(c - 4 / kPi) <= 3 * ht.constant()->std_error);
  CHECK(htc.lhs == doctest::Approx(c * 3 * kPi).epsilon(1e-10));

  const Map flip = Map::linear((Mat(2, 2) << 0, 1, 1, 0).finished());
  CHECK_THROWS_AS(change_of_variables_check(flip, b, lebesgue, lebesgue, one(2), box_patch(b)), DomainError);
}

TEST_CASE("fiber integrals") {
  const Map pi = Map::from_expressions(2, {"x"});
  auto vertical = [](const Vec& b) {
    Patch p;
    p.domain = box1(0, 1);
    p.chart = Map::from_expressions(1, {"t + 0*x", "x"}, {{"t", b[0]}});
    p.name = "vertical";
    return p;
  };
  const Mat e = Mat::Identity(1, 1);
  const Vec b = Vec::Constant(1, 0.3);
  CHECK(fiber_integral(pi, scaled_lebesgue(2, 1.0), b, vertical(b), e).value == doctest::Approx(1.0));
  CHECK(fiber_integral(pi, scaled_lebesgue(2, 3.0), b, vertical(b), e).value == doctest::Approx(3.0));
  const auto weighted = DensityField::weighted(scaled_lebesgue(2, 1.0), ScalarField::from_expression(2, "1 + x^2"));
  CHECK(fiber_integral(pi, weighted, b, vertical(b), e).value == doctest::Approx(1.09).epsilon(1e-12));

  // Twisted projection pi(x, y) = x - y^2 / 4 with curved fibers.
  const Map twisted = Map::from_expressions(2, {"x - y^2/4"});
  auto curved = [](const Vec& y) {
    Patch p;
    p.domain = box1(0, 1);
    p.chart = Map::from_expressions(1, {"b + x^2/4", "x"}, {{"b", y[0]}});
    return p;
  };
  for (double bb : {0.0, 0.4, 1.0}) {
    const Vec base = Vec::Constant(1, bb);
    const double oracle = simpson([bb](double y) { return 1 + std::pow(bb + y * y / 4, 2); }, 0, 1);
    const double minimal = fiber_integral(twisted, weighted, base, curved(base), e).value;
    const double shifted = fiber_integral(twisted, weighted, base, curved(base), e, LiftRule::Shifted).value;
    CHECK(minimal == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(relative_difference(minimal, shifted) <= 1e-9);
  }
  CHECK_THROWS_AS(fiber_integral(pi, weighted, Vec::Constant(1, 0.5), vertical(b), e), DomainError);

  Patch total;
  total.domain = box2(0, 1, 0, 1);
  total.chart = Map::from_expressions(2, {"x + y^2/4", "y"});
  const auto fub = fubini_check(twisted, weighted, total, box_patch(box1(0, 1)), curved);
  CHECK(fub.pass);
  CHECK(fub.residual <= 1e-6);
  const auto product = fubini_check(pi, weighted, box_patch(box2(0, 1, 0, 1)), box_patch(box1(0, 1)), vertical);
  CHECK(product.lhs == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(product.residual <= 1e-6);
}

TEST_CASE("coarea formula") {
  CoareaProblem unit;
  unit.pi = Map::from_expressions(2, {"x"});
  unit.region = box_patch(box2(0, 1, 0, 1));
  unit.mu = scaled_lebesgue(2, 1.0);
  unit.f = euclidean_density(1, 2);
  unit.lambda = scaled_lebesgue(1, 1.0);
  unit.base = box_patch(box1(0, 1));
  unit.level_set = [](const Vec& y) {
    Patch p;
    p.domain = box1(0, 1);
    p.chart = Map::from_expressions(1, {"t + 0*x", "x"}, {{"t", y[0]}});
    return p;
  };
  unit.g = one(2);
  const auto fubini = coarea_check(unit);
  CHECK(fubini.lhs == doctest::Approx(1.0));
  CHECK(fubini.rhs == doctest::Approx(1.0));

  CoareaProblem radial = unit;
  radial.pi = Map::from_expressions(2, {"x^2 + y^2"});
  radial.region = polar_patch(1.0, 2.0);
  radial.base = box_patch(box1(1.0, 4.0));
  radial.level_set = [](const Vec& y) { return circle_patch(std::sqrt(y[0])); };
  const auto annulus = coarea_check(radial);
  // Both sides: int_1^2 2r * 2 pi r dr = int_1^4 2 pi sqrt(t) dt = 28 pi / 3.
  CHECK(annulus.lhs == doctest::Approx(28 * kPi / 3).epsilon(1e-10));
  CHECK(annulus.residual <= 1e-6);

  CoareaProblem shen = unit;
  shen.f = square_wulff_integrand();
  const auto s = coarea_check(shen);
  // Vertical unit segment: F(e_2) = h(iota*(e_2)) = |(-1, 0)|_1 = 1.
  CHECK(s.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.rhs == doctest::Approx(1.0).epsilon(1e-12));

  CoareaProblem bad = unit;
  bad.level_set = [](const Vec& y) {
    Patch p;
    p.domain = box1(0, 1);
    p.chart = Map::from_expressions(1, {"t + 0.1*x", "x"}, {{"t", y[0]}});
    return p;
  };
  CHECK_THROWS_AS(coarea_check(bad), DomainError);
}

TEST_CASE("area formula") {
  const Map graph = Map::from_expressions(1, {"x", "x^2"});
  const ImagePiece piece{graph_patch(ScalarField::from_expression(1, "x^2"), {0, 1}), 1};
  const auto arc = area_check(graph, box1(0, 1), euclidean_density(1, 1), euclidean_density(1, 2), {piece});
  const double oracle = std::sqrt(5.0) / 2 + std::asinh(2.0) / 4;
  CHECK(arc.lhs == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(arc.residual <= 1e-9);

  const Map cover = Map::from_expressions(1, {"cos(2*x)", "sin(2*x)"});
  const auto twice =
      area_check(cover, box1(0, 2 * kPi), euclidean_density(1, 1), euclidean_density(1, 2), {{circle_patch(1.0), 2}});
  CHECK(twice.lhs == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(twice.pass);

  const auto wulff = area_check(graph, box1(0, 1), euclidean_density(1, 1), square_wulff_integrand(), {piece});
  // h(nu) |t| for t = (1, 2x) is 1 + 2x.
  CHECK(wulff.lhs == doctest::Approx(simpson([](double x) { return 1 + 2 * x; }, 0, 1)).epsilon(1e-10));
  CHECK(wulff.residual <= 1e-6);

  // df vanishes on [-1, 0]: excluded and reported.
  Map flat;
  flat.in = 1;
  flat.out = 2;
  flat.value = [](const Vec& x) { return x[0] > 0 ? v2(x[0] * x[0], x[0] * x[0] * x[0]) : v2(0, 0); };
  flat.jacobian = [](const Vec& x) -> Mat {
    return x[0] > 0 ? Mat(v2(2 * x[0], 3 * x[0] * x[0])) : Mat(Mat::Zero(2, 1));
  };
  Patch image;
  image.domain = box1(0, 1);
  image.chart = flat;
  const auto partial = area_check(flat, box1(-1, 1), euclidean_density(1, 1), euclidean_density(1, 2), {{image, 1}}, 1e-6,
                                    {.panels = {2}});
  INFO(partial.note);
  CHECK(partial.residual <= 1e-6);
  CHECK(partial.note.find("excluded measure 1") != std::string::npos);
}

TEST_CASE("Monte Carlo volumes") {
  MCConfig mc;
  mc.samples = 1'000'000;
  mc.seed = 3;
  const auto disk = mc_volume([](const Vec& p) { return p.squaredNorm() <= 1; }, Box::cube(2, 1.0), mc);
  CHECK(std::abs(disk.value - kPi) <= 3 * disk.std_error);
  const auto empty = mc_volume([](const Vec&) { return false; }, Box::cube(2, 1.0), mc);
  CHECK(empty.value == 0.0);
  CHECK(empty.zero_hits);
  const auto ellipse = mc_volume([](const Vec& p) { return p[0] * p[0] / 4 + p[1] * p[1] <= 1; },
                                 Box{{{-2, 2}, {-1, 1}}}, mc);
  CHECK(std::abs(ellipse.value - 2 * kPi) <= 3 * ellipse.std_error);
}
