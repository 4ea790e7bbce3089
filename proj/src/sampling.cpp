#include "anisotrope/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace anisotrope {

std::vector<Vec> sphere_directions(int dim, int count) {
  std::vector<Vec> out;
  if (dim == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
    return out;
  }
  out.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * kPi * i / count;
      Vec u(2);
      u << std::cos(t), std::sin(t);
      out.push_back(u);
    }
    return out;
  }
  if (dim == 3) {
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * i;
      Vec u(3);
      u << r * std::cos(phi), r * std::sin(phi), z;
      out.push_back(u);
    }
    return out;
  }
  throw DimensionError("direction sampling is implemented for R^1, R^2 and R^3 only");
}

double golden_section_max(const std::function<double(double)>& f, double a, double b, int steps, double* argmax) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < steps; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (argmax) *argmax = fc > fd ? c : d;
  return std::max(fc, fd);
}

namespace {

void tangent_frame(const Vec& u, Vec& e1, Vec& e2) {
  Vec a = Vec::Zero(3);
  int k = 0;
  u.cwiseAbs().minCoeff(&k);
  a[k] = 1.0;
  e1 = (a - a.dot(u) * u).normalized();
  e2 = Vec(3);
  e2 << u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2], u[0] * e1[1] - u[1] * e1[0];
}

}  // namespace

LevelSetSampler::LevelSetSampler(Functional g, int dim, int count) : g_(std::move(g)), dim_(dim) {
  directions_ = sphere_directions(dim, count);
  points_.reserve(directions_.size());
  inner_radius_ = std::numeric_limits<double>::infinity();
  for (const auto& u : directions_) {
    const double gu = g_(u);
    if (!(gu > 0.0) || !std::isfinite(gu)) {
      throw DomainError("level-set sampling: functional is not positive and finite away from 0");
    }
    points_.push_back(u / gu);
    inner_radius_ = std::min(inner_radius_, 1.0 / gu);
    outer_radius_ = std::max(outer_radius_, 1.0 / gu);
  }
  const auto n = static_cast<double>(directions_.size());
  spacing_ = dim == 2 ? 2.0 * kPi / n : dim == 3 ? 1.2 * std::sqrt(4.0 * kPi / n) : 0.0;
  if (dim == 2) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      max_chord_ = std::max(max_chord_, (points_[(i + 1) % points_.size()] - points_[i]).norm());
    }
  } else {
    max_chord_ = outer_radius_ * (1.0 + outer_radius_ / inner_radius_) * spacing_;
  }
}

Vec LevelSetSampler::level_point(const Vec& u) const {
  const Vec d = u.normalized();
  return d / g_(d);
}

int LevelSetSampler::start_index(const Vec& x) const {
  const int n = static_cast<int>(points_.size());
  double t = std::atan2(x[1], x[0]);
  if (t < 0) t += 2.0 * kPi;
  return static_cast<int>(std::lround(t / (2.0 * kPi) * n)) % n;
}

int LevelSetSampler::hill_climb(const Vec& x) const {
  const int n = static_cast<int>(points_.size());
  int i = start_index(x);
  double best = x.dot(points_[i]);
  for (int dir : {+1, -1}) {
    while (true) {
      const int j = ((i + dir) % n + n) % n;
      const double v = x.dot(points_[j]);
      if (v > best) {
        best = v;
        i = j;
      } else {
        break;
      }
    }
  }
  return i;
}

LevelSetSampler::Sup LevelSetSampler::sampled_sup(const Vec& x) const {
  int best = 0;
  if (dim_ == 2) {
    best = hill_climb(x);
  } else {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double w = x.dot(points_[i]);
      if (w > v) {
        v = w;
        best = static_cast<int>(i);
      }
    }
  }
  return {x.dot(points_[best]), points_[best]};
}

LevelSetSampler::Sup LevelSetSampler::sup(const Vec& x) const {
  Sup s = sampled_sup(x);
  if (dim_ == 1) return s;
  if (dim_ == 2) {
    const double t0 = std::atan2(s.argmax[1], s.argmax[0]);
    auto phi = [&](double t) {
      Vec u(2);
      u << std::cos(t), std::sin(t);
      return x.dot(u / g_(u));
    };
    double t = 0.0;
    const double v = golden_section_max(phi, t0 - spacing_, t0 + spacing_, kRefinementSteps, &t);
    if (v > s.value) {
      Vec u(2);
      u << std::cos(t), std::sin(t);
      s = {v, u / g_(u)};
    }
    return s;
  }
  Vec u = s.argmax.normalized();
  for (int sweep = 0; sweep < 3; ++sweep) {
    Vec e1, e2;
    tangent_frame(u, e1, e2);
    for (const Vec* e : {&e1, &e2}) {
      auto phi = [&](double a) { return x.dot(level_point(u + a * *e)); };
      double a = 0.0;
      const double v = golden_section_max(phi, -spacing_, spacing_, kRefinementSteps, &a);
      if (v > s.value) {
        u = (u + a * *e).normalized();
        s = {v, level_point(u)};
      }
    }
  }
  return s;
}

bool LevelSetSampler::sup_at_most(const Vec& x, double level) const {
  const Sup s = sampled_sup(x);
  if (s.value > level) return false;
  if (s.value < level - 2.0 * x.norm() * max_chord_) return true;
  return sup(x).value <= level;
}

void LevelSetSampler::check_convex() const {
  const int n = static_cast<int>(points_.size());
  auto check_pair = [&](int i, int j) {
    const Vec mid = 0.5 * (points_[i] + points_[j]);
    if (mid.norm() < 1e-12 * outer_radius_) return;
    if (g_(mid) > 1.0 + 1e-9) {
      throw DomainError("functional is not convex: a sampled midpoint of its unit level set lies outside");
    }
  };
  if (dim_ == 1) return;
  if (dim_ == 2) {
    for (int offset : {1, 7, n / 8, n / 4, n / 2 - 1}) {
      for (int i = 0; i < n; ++i) check_pair(i, (i + offset) % n);
    }
    return;
  }
  std::uint64_t state = 0x2545F4914F6CDD1DULL;
  for (int k = 0; k < 4 * n; ++k) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    const int i = static_cast<int>(state % static_cast<std::uint64_t>(n));
    const int j = static_cast<int>((state >> 32) % static_cast<std::uint64_t>(n));
    if (i != j) check_pair(i, j);
  }
}

int LevelSetSampler::flat_neighbours(const Vec& x, double rel_tol) const {
  const Sup s = sampled_sup(x);
  const double top = sup(x).value;
  const double floor = top - rel_tol * std::abs(top);
  int count = 0;
  for (const auto& p : points_) {
    if ((p - s.argmax).norm() == 0.0) continue;
    const double ang = std::acos(std::clamp(p.normalized().dot(s.argmax.normalized()), -1.0, 1.0));
    if (ang <= 3.5 * spacing_ && x.dot(p) >= floor) ++count;
  }
  return count;
}

}  // namespace anisotrope
