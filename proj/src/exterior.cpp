#include "anisotrope/exterior.hpp"

#include <algorithm>
#include <cmath>

namespace anisotrope {

namespace {

template <class Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  IndexSet idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double minor_of(const Mat& m, const IndexSet& rows) {
  const int k = static_cast<int>(rows.size());
  Mat sub(k, k);
  for (int i = 0; i < k; ++i) sub.row(i) = m.row(rows[i]);
  return sub.determinant();
}

double largest_minor(const Mat& m) {
  double best = 0.0;
  for_each_combination(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                       [&](const IndexSet& rows) { best = std::max(best, std::abs(minor_of(m, rows))); });
  return best;
}

Mat stack(std::span<const Vec> vectors) {
  if (vectors.empty()) throw DimensionError("wedge of an empty list has no ambient dimension");
  const auto n = vectors.front().size();
  Mat m(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n) throw DimensionError("wedge: vectors have different ambient dimensions");
    m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return m;
}

}  // namespace

template <class Tag>
Simple<Tag>::Simple(Mat spanning, int sign) : spanning_(std::move(spanning)), sign_(sign >= 0 ? +1 : -1) {
  if (!spanning_.allFinite()) throw DomainError("simple element with non-finite entries");
}

template <class Tag>
Mat Simple<Tag>::oriented_spanning() const {
  Mat m = spanning_;
  if (sign_ < 0 && m.cols() > 0) m.col(0) *= -1.0;
  return m;
}

template <class Tag>
Simple<Tag> Simple<Tag>::scaled(double a) const {
  Mat m = spanning_;
  int s = sign_;
  if (a < 0) {
    s = -s;
    a = -a;
  }
  if (m.cols() > 0) m.col(0) *= a;
  return Simple(std::move(m), s);
}

template <class Tag>
bool Simple<Tag>::is_zero() const {
  if (degree() == 0) return false;
  if (degree() > ambient_dim()) return true;
  double norms = 1.0;
  for (int j = 0; j < degree(); ++j) norms *= spanning_.col(j).norm();
  if (norms == 0.0) return true;
  return largest_minor(spanning_) < kDegeneracyTolerance * norms;
}

template class Simple<PrimalTag>;
template class Simple<DualTag>;

double VolumeForm::operator()(const Mat& vectors) const {
  if (vectors.rows() != dim || vectors.cols() != dim) {
    throw DimensionError("volume form needs " + std::to_string(dim) + " vectors in R^" + std::to_string(dim));
  }
  return scale * vectors.determinant();
}

double VolumeForm::operator()(const SimpleKVector& xi) const { return (*this)(xi.oriented_spanning()); }

SimpleKVector wedge(std::span<const Vec> vectors) { return SimpleKVector(stack(vectors)); }
SimpleKVector wedge(std::initializer_list<Vec> vectors) {
  return wedge(std::span<const Vec>(vectors.begin(), vectors.size()));
}
SimpleKCovector wedge_covectors(std::span<const Vec> covectors) { return SimpleKCovector(stack(covectors)); }
SimpleKCovector wedge_covectors(std::initializer_list<Vec> covectors) {
  return wedge_covectors(std::span<const Vec>(covectors.begin(), covectors.size()));
}

template <class Tag>
GrassmannCoords grassmann_coords(const Simple<Tag>& xi) {
  GrassmannCoords out;
  const Mat& m = xi.spanning();
  for_each_combination(xi.ambient_dim(), xi.degree(),
                       [&](const IndexSet& rows) { out[rows] = xi.sign() * minor_of(m, rows); });
  return out;
}

template GrassmannCoords grassmann_coords(const Simple<PrimalTag>&);
template GrassmannCoords grassmann_coords(const Simple<DualTag>&);

template <class Tag>
bool same_element(const Simple<Tag>& a, const Simple<Tag>& b, double rel_tol) {
  if (a.degree() != b.degree() || a.ambient_dim() != b.ambient_dim()) return false;
  const auto ga = grassmann_coords(a);
  const auto gb = grassmann_coords(b);
  double scale = 0.0;
  for (const auto& [k, v] : ga) scale = std::max(scale, std::abs(v));
  for (const auto& [k, v] : gb) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return true;
  for (const auto& [k, v] : ga) {
    if (std::abs(v - gb.at(k)) > rel_tol * scale) return false;
  }
  return true;
}

template bool same_element(const Simple<PrimalTag>&, const Simple<PrimalTag>&, double);
template bool same_element(const Simple<DualTag>&, const Simple<DualTag>&, double);

SimpleKVector push_forward(const Mat& a, const SimpleKVector& xi) {
  if (a.cols() != xi.ambient_dim()) {
    throw DimensionError("push_forward: map has domain dimension " + std::to_string(a.cols()) +
                         " but the k-vector lives in R^" + std::to_string(xi.ambient_dim()));
  }
  return SimpleKVector(a * xi.spanning(), xi.sign());
}

SimpleKCovector pull_back(const Mat& a, const SimpleKCovector& omega) {
  if (a.rows() != omega.ambient_dim()) {
    throw DimensionError("pull_back: map has codomain dimension " + std::to_string(a.rows()) +
                         " but the k-covector lives on R^" + std::to_string(omega.ambient_dim()));
  }
  return SimpleKCovector(a.transpose() * omega.spanning(), omega.sign());
}

double pairing(const SimpleKCovector& omega, const SimpleKVector& xi) {
  if (omega.degree() != xi.degree() || omega.ambient_dim() != xi.ambient_dim()) {
    throw DimensionError("pairing: degree or dimension mismatch");
  }
  if (omega.degree() == 0) return omega.sign() * xi.sign();
  return omega.sign() * xi.sign() * (omega.spanning().transpose() * xi.spanning()).determinant();
}

SimpleKCovector iota_star(const VolumeForm& omega, const SimpleKVector& theta) {
  const int total = theta.ambient_dim();
  const int n = theta.degree();
  const int m = total - n;
  if (omega.dim != total) throw DimensionError("iota_star: volume form and k-vector live in different spaces");
  if (m < 1 || n < 1) throw DimensionError("iota_star: need 1 <= deg theta < ambient dimension");
  if (theta.is_zero()) throw DegenerateError("iota_star: theta is zero");

  const Mat w = theta.oriented_spanning();
  Mat basis(total, total);
  basis.leftCols(m) = orthogonal_complement(w);
  basis.rightCols(n) = w;
  const double d = omega(basis);
  basis.col(0) /= d;  // now Omega(v_1 ^ ... ^ v_m ^ w_1 ^ ... ^ w_n) = 1
  const Mat dual = basis.inverse().transpose();
  return SimpleKCovector(dual.leftCols(m));
}

Vec hyperplane_covector(const VolumeForm& omega, const Mat& w) {
  const int total = static_cast<int>(w.rows());
  if (w.cols() != total - 1 || omega.dim != total) throw DimensionError("hyperplane_covector: need dim - 1 vectors");
  Vec c(total);
  Mat minor(total - 1, total - 1);
  for (int i = 0; i < total; ++i) {
    int r = 0;
    for (int j = 0; j < total; ++j) {
      if (j != i) minor.row(r++) = w.row(j);
    }
    c[i] = omega.scale * (i % 2 == 0 ? 1.0 : -1.0) * (total == 1 ? 1.0 : minor.determinant());
  }
  return c;
}

SimpleKVector iota_star_inverse(const VolumeForm& omega, const SimpleKCovector& eta) {
  const int total = eta.ambient_dim();
  const int m = eta.degree();
  if (omega.dim != total) throw DimensionError("iota_star_inverse: dimension mismatch");
  if (m < 1 || m >= total) throw DimensionError("iota_star_inverse: need 1 <= deg eta < ambient dimension");
  if (eta.is_zero()) throw DegenerateError("iota_star_inverse: eta is zero");

  const Mat cov = eta.oriented_spanning();
  const Mat w = kernel_basis(cov.transpose());
  const SimpleKVector theta0(w);
  const auto image = grassmann_coords(iota_star(omega, theta0));
  const auto target = grassmann_coords(SimpleKCovector(cov));
  IndexSet best;
  double best_abs = -1.0;
  for (const auto& [k, v] : target) {
    if (std::abs(v) > best_abs) {
      best_abs = std::abs(v);
      best = k;
    }
  }
  const double c = image.at(best) / target.at(best);
  return theta0.scaled(1.0 / c);
}

DualBasisPair dual_pair(const Mat& covectors, const Mat& completion) {
  const int dim = static_cast<int>(covectors.rows());
  if (completion.rows() != dim || covectors.cols() + completion.cols() != dim) {
    throw DimensionError("dual_pair: completion does not fill the dual space");
  }
  DualBasisPair out;
  out.given = static_cast<int>(covectors.cols());
  out.covectors.resize(dim, dim);
  out.covectors << covectors, completion;
  if (numerical_rank(out.covectors) < dim) throw DegenerateError("dual_pair: covectors are dependent");
  out.vectors = out.covectors.transpose().inverse();
  return out;
}

DualBasisPair complete_to_basis(const Mat& covectors, int dim, bool positively_oriented) {
  if (covectors.rows() != dim) throw DimensionError("complete_to_basis: covectors are not on R^" + std::to_string(dim));
  if (covectors.cols() > dim) throw DegenerateError("complete_to_basis: more covectors than dimensions");
  if (numerical_rank(covectors) < covectors.cols()) throw DegenerateError("complete_to_basis: dependent covectors");
  Mat completion = orthogonal_complement(covectors);
  DualBasisPair out = dual_pair(covectors, completion);
  if (positively_oriented && out.vectors.determinant() < 0.0 && completion.cols() > 0) {
    const auto c = completion.cols();
    if (c >= 2) {
      completion.col(c - 1).swap(completion.col(c - 2));
    } else {
      completion.col(0) *= -1.0;
    }
    out = dual_pair(covectors, completion);
  }
  return out;
}

}  // namespace anisotrope
