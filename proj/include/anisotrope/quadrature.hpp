#pragma once

// Tensor-product Gauss-Legendre quadrature with node doubling.

#include "anisotrope/common.hpp"

#include <optional>

namespace anisotrope {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; cached, so repeated calls are cheap.
const GaussRule& gauss_legendre(int n);

struct QuadratureOptions {
  int start_nodes = 64;
  int max_nodes = 512;
  /// Doubling stops once |I_2n - I_n| < tolerance * max(1, |I_2n|).
  double tolerance = 1e-9;
  /// Equal sub-intervals per axis; nodes are split evenly across them.  Put
  /// kinks of the integrand on panel boundaries.
  std::vector<int> panels;
  /// Fixed node count, no doubling.
  std::optional<int> fixed_nodes;
};

struct QuadratureResult {
  double value = 0.0;
  int nodes = 0;  // per axis, at the final level
  bool converged = false;
  double change = 0.0;  // |I_n - I_{n/2}| at the final level
  /// Parameter measure of nodes the integrand declined (critical points).
  double excluded_measure = 0.0;
};

/// Integrand returning nullopt at points it excludes.
using Integrand = std::function<std::optional<double>(const Vec&)>;

/// Per-axis node counts above this are capped for 3-parameter domains.
inline constexpr int kMaxNodes3d = 128;

/// Integrates over `domain` with `opts.start_nodes` per axis, doubling up to
/// `opts.max_nodes` until successive estimates agree.
QuadratureResult integrate_box(const Box& domain, const Integrand& f, const QuadratureOptions& opts = {});

/// Single evaluation with n nodes per axis.
QuadratureResult integrate_box_fixed(const Box& domain, const Integrand& f, int n, const std::vector<int>& panels);

}  // namespace anisotrope
