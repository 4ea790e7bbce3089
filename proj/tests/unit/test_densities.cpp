#include <doctest.h>

#include "anisotrope/densities.hpp"

#include <cmath>
#include <random>

using namespace anisotrope;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Mat random_mat(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Degree-1 density on R^2 contracted from a planar support function:
// F(v) = h(eta) with eta(x) = x_1 v_2 - x_2 v_1.
Density contracted(Functional h, bool symmetric) {
  return Density(
      1, 2, [h](const SimpleKVector& xi) { return h(v2(xi.oriented_spanning()(1, 0), -xi.oriented_spanning()(0, 0))); },
      symmetric, DensityKind::WulffIntegrand, "contracted");
}

Functional l1() {
  return [](const Vec& u) { return u.lpNorm<1>(); };
}

// Support function of the unit disk shifted by (0.3, 0): asymmetric.
Functional shifted_disk() {
  return [](const Vec& u) { return u.norm() + 0.3 * u[0]; };
}

MCConfig mc_with(std::int64_t samples, std::uint64_t seed) {
  MCConfig mc;
  mc.samples = samples;
  mc.seed = seed;
  return mc;
}

}  // namespace

TEST_CASE("euclidean density") {
  const auto e = euclidean_density(2, 3);
  CHECK(e(wedge({v3(1, 0, 0), v3(0, 1, 0)})) == doctest::Approx(1.0));
  CHECK(e(wedge({v3(2, 0, 0), v3(0, 1, 0)})) == doctest::Approx(2.0));
  // Gram determinant 2 * 2 - 1 * 1.
  CHECK(e(wedge({v3(1, 1, 0), v3(0, 1, 1)})) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("densities are positively homogeneous") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    const int k = 1 + trial % n;
    const Density d = random_density(k, n, rng);
    const SimpleKVector xi(random_mat(n, k, rng));
    for (double a : {0.5, 2.0, 7.0}) CHECK(d(xi.scaled(a)) == doctest::Approx(a * d(xi)).epsilon(1e-10));
    CHECK(d(xi) == doctest::Approx(d(xi.negated())).epsilon(1e-12));
  }
}

TEST_CASE("Busemann and Holmes-Thompson constants") {
  const auto mc = mc_with(200'000, 17);
  const auto be = busemann_density(euclidean_norm(2), mc);
  CHECK(std::abs(be.constant()->value - 1.0) <= 3 * be.constant()->std_error);

  const auto bl = busemann_density(l1_norm(2), mc);
  // The l1 ball is a square of area 2, so eps_2 / 2.
  CHECK(std::abs(bl.constant()->value - kPi / 2) <= 3 * bl.constant()->std_error);
  CHECK(bl(wedge({v2(2, 0), v2(0, 1)})) == doctest::Approx(2 * bl(wedge({v2(1, 0), v2(0, 1)}))));

  const auto he = holmes_thompson_density(euclidean_norm(2), mc);
  CHECK(std::abs(he.constant()->value - 1.0) <= 3 * he.constant()->std_error);
  const auto hl = holmes_thompson_density(l1_norm(2), mc);
  // Dual ball [-1, 1]^2 of area 4.
  CHECK(std::abs(hl.constant()->value - 4 / kPi) <= 3 * hl.constant()->std_error + 1e-12);

  // J_HT(c I) = c^n for the same norm on both sides.
  const double c = 1.7;
  CHECK(jacobian(c * Mat::Identity(2, 2), hl, hl) == doctest::Approx(c * c));
}

TEST_CASE("jacobian") {
  const auto e2 = euclidean_density(2, 2);
  CHECK(jacobian(Mat::Identity(2, 2), e2, e2) == doctest::Approx(1.0));
  Mat a = Mat::Zero(3, 2);
  a(0, 0) = 2;
  a(1, 1) = 3;
  CHECK(jacobian(a, e2, euclidean_density(2, 3)) == doctest::Approx(6.0));
  // Embedded map against sqrt(det A^T A).
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat b = random_mat(4, 2, rng);
    CHECK(jacobian(b, e2, euclidean_density(2, 4)) ==
          doctest::Approx(std::sqrt((b.transpose() * b).determinant())).epsilon(1e-12));
  }
  // Degree mismatch and non-injective maps give zero.
  CHECK(jacobian(a, euclidean_density(1, 2), euclidean_density(2, 3)) == 0.0);
  Mat flat(2, 2);
  flat << 1, 2, 2, 4;
  CHECK(jacobian(flat, e2, e2) == 0.0);

  const auto bl = busemann_density(l1_norm(2), mc_with(200'000, 3));
  const double j = jacobian(Mat::Identity(2, 2), bl, e2);
  CHECK(std::abs(j - 2 / kPi) <= 3 * j * bl.constant()->std_error / bl.constant()->value);
}

TEST_CASE("codensity examples on both routes") {
  const VolumeForm omega{2, 1.0};
  const auto top = Codensity::top(scaled_lebesgue(2, 2.0));
  CHECK(top(wedge_covectors({v2(1, 0), v2(0, 1)})) == doctest::Approx(0.5));
  const auto top_h = Codensity::via_hodge(unit_density(2), VolumeForm{2, 2.0}, false);
  CHECK(top_h(wedge_covectors({v2(1, 0), v2(0, 1)})) == doctest::Approx(0.5));

  const auto leb = abs_volume_form(omega);
  const Codensity ce(euclidean_density(1, 2), leb, false);
  CHECK(ce(wedge_covectors({v2(1, 0)})) == doctest::Approx(1.0));
  CHECK(Codensity::via_hodge(euclidean_density(1, 2), omega, false)(wedge_covectors({v2(1, 0)})) ==
        doctest::Approx(1.0));

  // Square Wulff shape: F*_Omega(e1* + e2*) = h(1, 1) = 2.
  const auto square = contracted(l1(), true);
  CHECK(Codensity(square, leb, true)(wedge_covectors({v2(1, 1)})) == doctest::Approx(2.0));
  CHECK(Codensity::via_hodge(square, omega, true)(wedge_covectors({v2(1, 1)})) == doctest::Approx(2.0));
}

TEST_CASE("asymmetric codensities need orientation and recover h") {
  const VolumeForm omega{2, 1.0};
  const auto f = contracted(shifted_disk(), false);
  CHECK_THROWS_AS(Codensity(f, abs_volume_form(omega), false), DomainError);
  const Codensity c(f, abs_volume_form(omega), true);
  for (const Vec& u : {v2(1, 0), v2(-1, 0), v2(0.3, -2)}) {
    CHECK(c(wedge_covectors({u})) == doctest::Approx(shifted_disk()(u)).epsilon(1e-12));
  }
}

TEST_CASE("codensity does not depend on the completion") {
  std::mt19937_64 rng(9);
  for (int total : {2, 3, 4}) {
    for (int n = 1; n < total; ++n) {
      const int m = total - n;
      for (int trial = 0; trial < 20; ++trial) {
        const Codensity c(random_density(n, total, rng), random_density(total, total, rng), false);
        const SimpleKCovector omega(random_mat(total, m, rng));
        const double a = c.evaluate_with_completion(omega, random_mat(total, n, rng));
        const double b = c.evaluate_with_completion(omega, random_mat(total, n, rng));
        CHECK(relative_difference(a, b) <= 1e-9);
        CHECK(relative_difference(a, c(omega)) <= 1e-9);
      }
    }
  }
  // Oriented asymmetric case in R^2.
  const auto f = contracted(shifted_disk(), false);
  const Codensity c(f, abs_volume_form(VolumeForm{2, 1.0}), true);
  for (int trial = 0; trial < 20; ++trial) {
    const SimpleKCovector omega(random_mat(2, 1, rng));
    CHECK(relative_difference(c.evaluate_with_completion(omega, random_mat(2, 1, rng)), c(omega)) <= 1e-9);
  }
}

TEST_CASE("codensity matches the Hodge route") {
  std::mt19937_64 rng(10);
  for (auto [n, m] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    const int total = n + m;
    const VolumeForm omega{total, 1.3};
    for (int trial = 0; trial < 50; ++trial) {
      const Density f = random_density(n, total, rng);
      const Codensity a(f, abs_volume_form(omega), false);
      const auto b = Codensity::via_hodge(f, omega, false);
      const SimpleKCovector eta(random_mat(total, m, rng));
      CHECK(relative_difference(a(eta), b(eta)) <= 1e-9);
    }
  }
}

TEST_CASE("cojacobian") {
  const auto leb = abs_volume_form(VolumeForm{2, 1.0});
  const auto dt = euclidean_density(1, 1);
  Mat fx(1, 2);
  fx << 1, 0;
  CHECK(cojacobian(fx, dt, euclidean_density(1, 2), leb, false) == doctest::Approx(1.0));
  Mat a(1, 2);
  a << 2, 0;
  CHECK(cojacobian(a, dt, euclidean_density(1, 2), leb, false) == doctest::Approx(2.0));
  // f(x, y) = x + y against the square Wulff integrand: the l1 norm of df.
  Mat sum(1, 2);
  sum << 1, 1;
  CHECK(cojacobian(sum, dt, contracted(l1(), true), leb, true) == doctest::Approx(2.0));
  // Non-surjective and degree mismatch give zero.
  CHECK(cojacobian(Mat::Zero(1, 2), dt, euclidean_density(1, 2), leb, false) == 0.0);

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Mat b = random_mat(2, 4, rng);
    const double expected = std::sqrt((b * b.transpose()).determinant());
    CHECK(cojacobian(b, euclidean_density(2, 2), euclidean_density(2, 4), euclidean_density(4, 4), false) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("cojacobian agrees with the explicit kernel formula") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int total = 2 + trial % 4;
    const int m = 1 + trial % (total - 1);
    const Mat a = random_mat(m, total, rng);
    const Density nu = random_density(m, m, rng);
    const Density f = random_density(total - m, total, rng);
    const Density mu = random_density(total, total, rng);
    CHECK(relative_difference(cojacobian(a, nu, f, mu, false), cojacobian_explicit(a, nu, f, mu)) <= 1e-9);
  }
  // Oriented, asymmetric F.
  const auto f = contracted(shifted_disk(), false);
  const auto leb = abs_volume_form(VolumeForm{2, 1.0});
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = random_mat(1, 2, rng);
    const double c = cojacobian(a, euclidean_density(1, 1), f, leb, true);
    CHECK(relative_difference(c, cojacobian_explicit(a, euclidean_density(1, 1), f, leb)) <= 1e-9);
    // Equals h(df) for this contraction.
    CHECK(c == doctest::Approx(shifted_disk()(a.row(0).transpose())).epsilon(1e-10));
  }
}

TEST_CASE("K-jacobian") {
  const auto mc = mc_with(200'000, 21);
  const auto id = k_jacobian(Mat::Identity(2, 2), euclidean_norm(2), euclidean_norm(2), mc);
  CHECK(std::abs(id.value - 1.0) <= 3 * id.std_error);
  const auto l = k_jacobian(Mat::Identity(2, 2), l1_norm(2), l1_norm(2), mc);
  CHECK(std::abs(l.value - 1.0) <= 3 * l.std_error);
  Mat a(2, 2);
  a << 2, 0, 0, 1;
  // {|Ax| <= 1} is an ellipse of area pi / 2.
  const auto d = k_jacobian(a, euclidean_norm(2), euclidean_norm(2), mc);
  CHECK(std::abs(d.value - 2.0) <= 3 * d.std_error);
  Mat flat(2, 2);
  flat << 1, 2, 2, 4;
  CHECK(k_jacobian(flat, euclidean_norm(2), euclidean_norm(2), mc).value == 0.0);

  // A supplied box that is too small gets doubled.
  MCConfig small = mc;
  small.box = Box::cube(2, 0.1);
  const auto grown = k_jacobian(a, euclidean_norm(2), euclidean_norm(2), small);
  CHECK(std::abs(grown.value - 2.0) <= 3 * grown.std_error);
}

TEST_CASE("dual functionals") {
  const Functional square = [](const Vec& v) { return v.lpNorm<Eigen::Infinity>(); };
  const auto dual = dual_functional(square, 2);
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec f = random_mat(2, 1, rng);
    // Max of a linear functional over the square is attained at a vertex.
    double expected = 0;
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0}) expected = std::max(expected, f[0] * sx + f[1] * sy);
    CHECK(relative_difference(dual(f), expected) <= 1e-3);
  }
  const double a = 2.0, b = 0.5;
  const Functional ellipse = [=](const Vec& v) { return std::sqrt(v[0] * v[0] / (a * a) + v[1] * v[1] / (b * b)); };
  const auto ed = dual_functional(ellipse, 2);
  const auto back = dual_functional(ed, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec f = random_mat(2, 1, rng);
    CHECK(relative_difference(ed(f), std::sqrt(a * a * f[0] * f[0] + b * b * f[1] * f[1])) <= 1e-3);
    CHECK(relative_difference(back(f), ellipse(f)) <= 1e-2);
  }
  const Functional bad = [](const Vec& v) { return std::sqrt(std::abs(v[0] * v[1])) + 0.01 * v.norm(); };
  CHECK_THROWS_AS(dual_functional(bad, 2), DomainError);
}

TEST_CASE("legendre map") {
  const Functional euclid = [](const Vec& v) { return v.norm(); };
  const Vec e1 = legendre(v2(1, 0), euclid, 2);
  CHECK((e1 - v2(1, 0)).norm() < 1e-8);
  const double a = 2.0, b = 0.5;
  const Functional ellipse = [=](const Vec& v) { return std::sqrt(v[0] * v[0] / (a * a) + v[1] * v[1] / (b * b)); };
  const DualFunctional dual(ellipse, 2);
  const Vec va = dual.legendre(v2(1, 0));
  CHECK((va - v2(a * a, 0)).norm() < 1e-6);
  const Vec f = v2(0.3, -1.1);
  const Vec vf = dual.legendre(f);
  CHECK((dual.legendre(2 * f) - 2 * vf).norm() < 1e-6 * vf.norm());
  CHECK(ellipse(vf) == doctest::Approx(dual(f)).epsilon(1e-9));
  const Functional square = [](const Vec& v) { return v.lpNorm<Eigen::Infinity>(); };
  CHECK_THROWS_AS(legendre(v2(1, 0), square, 2), DomainError);
}

TEST_CASE("identity (a) on a diagonal map") {
  Mat a(2, 2);
  a << 2, 0, 0, 3;
  const auto c = identity_a(a, euclidean_density(2, 2), euclidean_density(2, 2));
  CHECK(c.lhs == doctest::Approx(6.0));
  CHECK(c.pass);
}

TEST_CASE("identities on random instances") {
  for (char which : {'a', 'b', 'c', 'd', 'e'}) {
    const auto s = verify_identities(which, 200, 99);
    INFO("identity " << which << " worst residual " << s.max_residual << " " << s.worst.note);
    CHECK(s.failures == 0);
    CHECK(s.max_residual <= 1e-9);
  }
}

TEST_CASE("identity hypotheses are reported, not thrown") {
  const auto c = identity_a(Mat::Identity(2, 3), euclidean_density(3, 3), euclidean_density(2, 2));
  CHECK_FALSE(c.pass);
  CHECK(c.note.find("hypothesis") != std::string::npos);
}

TEST_CASE("codensity checks on random instances") {
  for (char which : {'w', 'h'}) {
    const auto s = verify_codensities(which, 200, 5);
    INFO("check " << which << " worst residual " << s.max_residual);
    CHECK(s.instances == 200);
    CHECK(s.failures == 0);
  }
  CHECK_THROWS_AS(verify_codensities('x', 1, 5), DomainError);
}
