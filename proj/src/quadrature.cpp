#include "anisotrope/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace anisotrope {

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // n == 1 leaves p1 = x, p0 = 1.
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  static std::mutex lock;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

QuadratureResult integrate_box_fixed(const Box& domain, const Integrand& f, int n, const std::vector<int>& panels) {
  const int dim = domain.dim();
  if (dim < 1) throw DimensionError("integrate_box: empty domain");
  // Per-axis abscissae and weights across all panels.
  std::vector<std::vector<double>> xs(dim), ws(dim);
  for (int a = 0; a < dim; ++a) {
    const int p = a < static_cast<int>(panels.size()) ? std::max(1, panels[a]) : 1;
    const int per = std::max(1, n / p);
    const GaussRule& rule = gauss_legendre(per);
    const double width = domain.axes[a].width() / p;
    for (int k = 0; k < p; ++k) {
      const double lo = domain.axes[a].lo + k * width;
      for (int i = 0; i < per; ++i) {
        xs[a].push_back(lo + 0.5 * width * (rule.nodes[i] + 1.0));
        ws[a].push_back(0.5 * width * rule.weights[i]);
      }
    }
  }
  QuadratureResult out;
  out.nodes = static_cast<int>(xs[0].size());
  std::vector<std::size_t> idx(dim, 0);
  Vec x(dim);
  double sum = 0.0, excluded = 0.0;
  while (true) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      x[a] = xs[a][idx[a]];
      w *= ws[a][idx[a]];
    }
    const auto v = f(x);
    if (v) {
      sum += w * *v;
    } else {
      excluded += w;
    }
    int a = dim - 1;
    while (a >= 0 && ++idx[a] == xs[a].size()) idx[a--] = 0;
    if (a < 0) break;
  }
  out.value = sum;
  out.excluded_measure = excluded;
  out.converged = true;
  return out;
}

QuadratureResult integrate_box(const Box& domain, const Integrand& f, const QuadratureOptions& opts) {
  if (opts.fixed_nodes) return integrate_box_fixed(domain, f, *opts.fixed_nodes, opts.panels);
  const int cap = domain.dim() >= 3 ? std::min(opts.max_nodes, kMaxNodes3d) : opts.max_nodes;
  int n = std::min(opts.start_nodes, cap);
  QuadratureResult prev = integrate_box_fixed(domain, f, n, opts.panels);
  while (true) {
    if (2 * n > cap) {
      prev.converged = false;
      return prev;
    }
    n *= 2;
    QuadratureResult next = integrate_box_fixed(domain, f, n, opts.panels);
    next.change = std::abs(next.value - prev.value);
    if (next.change < opts.tolerance * std::max(1.0, std::abs(next.value))) {
      next.converged = true;
      return next;
    }
    next.converged = false;
    prev = next;
  }
}

}  // namespace anisotrope
