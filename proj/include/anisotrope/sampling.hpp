#pragma once

#include "anisotrope/common.hpp"

#include <memory>

namespace anisotrope {

/// Deterministic unit directions: +-1 in R^1, equally spaced angles in R^2,
/// a Fibonacci sphere in R^3.
std::vector<Vec> sphere_directions(int dim, int count);

/// Golden-section maximisation of a unimodal function on [a, b].
/// Returns the best value seen; `argmax` receives its abscissa.
double golden_section_max(const std::function<double(double)>& f, double a, double b, int steps, double* argmax);

/// Number of sampled directions used by every sup-based operation.
inline constexpr int kLevelSetSamples = 4096;
inline constexpr int kRefinementSteps = 20;

/// Samples the level set {g = 1} of a positively 1-homogeneous, convex,
/// positive function g and evaluates sup_{g(p) <= 1} <x, p>, which is the
/// dual functional of g.  Supported in R^1, R^2 and R^3.
class LevelSetSampler {
 public:
  struct Sup {
    double value = 0.0;
    Vec argmax;
  };

  LevelSetSampler(Functional g, int dim, int count = kLevelSetSamples);

  int dim() const { return dim_; }
  const std::vector<Vec>& directions() const { return directions_; }
  const std::vector<Vec>& points() const { return points_; }

  /// Angular spacing of the direction sample.
  double spacing() const { return spacing_; }
  double inner_radius() const { return inner_radius_; }
  double outer_radius() const { return outer_radius_; }

  /// Point of the level set in direction u.
  Vec level_point(const Vec& u) const;

  /// Max over the sampled points only.
  Sup sampled_sup(const Vec& x) const;

  /// Sampled max refined by local golden-section ascent.
  Sup sup(const Vec& x) const;

  /// sup(x) <= level, refining only when the sampled value is ambiguous.
  bool sup_at_most(const Vec& x, double level) const;

  /// Throws DomainError when sampled midpoints of the level set leave the
  /// sublevel set (g is not convex) or g is not positive and finite.
  void check_convex() const;

  /// Two-sided count of sample indices adjacent to the maximiser that reach
  /// the maximum to `rel_tol`; more than one neighbour means a flat face.
  int flat_neighbours(const Vec& x, double rel_tol) const;

 private:
  int start_index(const Vec& x) const;
  int hill_climb(const Vec& x) const;

  Functional g_;
  int dim_ = 0;
  std::vector<Vec> directions_;
  std::vector<Vec> points_;
  double spacing_ = 0.0;
  double inner_radius_ = 0.0;
  double outer_radius_ = 0.0;
  double max_chord_ = 0.0;
};

}  // namespace anisotrope
