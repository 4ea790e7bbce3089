#include "anisotrope/common.hpp"

#include <algorithm>
#include <cmath>

namespace anisotrope {

double Box::volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.width();
  return v;
}

bool Box::contains(const Vec& p) const {
  for (int i = 0; i < dim(); ++i) {
    if (p[i] < axes[i].lo || p[i] > axes[i].hi) return false;
  }
  return true;
}

Box Box::expanded(double factor) const {
  Box out = *this;
  for (auto& a : out.axes) {
    const double c = a.mid();
    const double h = 0.5 * a.width() * factor;
    a = {c - h, c + h};
  }
  return out;
}

Box Box::padded(double rel) const {
  Box out = *this;
  for (auto& a : out.axes) {
    const double pad = rel * std::max(std::abs(a.lo), std::abs(a.hi));
    a.lo -= pad;
    a.hi += pad;
  }
  return out;
}

Box Box::cube(int dim, double half_width) {
  return Box{std::vector<Interval>(static_cast<std::size_t>(dim), Interval{-half_width, half_width})};
}

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++r;
  }
  return r;
}

bool is_injective(const Mat& a) { return numerical_rank(a) == a.cols(); }
bool is_surjective(const Mat& a) { return numerical_rank(a) == a.rows(); }

Mat kernel_basis(const Mat& a) {
  const int n = static_cast<int>(a.cols());
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const int r = numerical_rank(a);
  return svd.matrixV().rightCols(n - r);
}

Mat orthogonal_complement(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  const int k = static_cast<int>(a.cols());
  if (k == 0) return Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - k);
}

double relative_difference(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (scale == 0.0) return 0.0;
  return std::abs(lhs - rhs) / scale;
}

}  // namespace anisotrope
