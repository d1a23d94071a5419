#pragma once

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace rmcf {

/// Largest ambient dimension supported by the fixed-capacity vector types.
inline constexpr int kMaxDim = 4;

// Dynamic size with a compile-time capacity, so per-vertex math never allocates.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Christoffel symbols Γ^c_{ab}.
class Christoffel {
 public:
  explicit Christoffel(int n = 0) : n_(n) { data_.fill(0.0); }
  int dim() const { return n_; }
  double& operator()(int c, int a, int b) { return data_[(c * kMaxDim + a) * kMaxDim + b]; }
  double operator()(int c, int a, int b) const { return data_[(c * kMaxDim + a) * kMaxDim + b]; }

  /// Γ^c_{ab} u^a v^b
  Vec contract(const Vec& u, const Vec& v) const {
    Vec out = Vec::Zero(n_);
    for (int c = 0; c < n_; ++c)
      for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) out(c) += (*this)(c, a, b) * u(a) * v(b);
    return out;
  }

 private:
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_;
};

/// Fully covariant 4-tensor, used for R_{abcd}.
class Tensor4 {
 public:
  explicit Tensor4(int n = 0) : n_(n) { data_.fill(0.0); }
  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }

 private:
  static int index(int a, int b, int c, int d) {
    return ((a * kMaxDim + b) * kMaxDim + c) * kMaxDim + d;
  }
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> data_;
};

// Small-matrix helpers written out by hand: Eigen's dynamic-size paths route
// through the blocked GEMM and LU kernels, which dominate runtime at n <= 4.
inline double inner(const Mat& g, const Vec& u, const Vec& v) {
  const int n = static_cast<int>(u.size());
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += u(a) * g(a, b) * v(b);
  return s;
}

inline Vec mul(const Mat& m, const Vec& v) {
  const int n = static_cast<int>(m.rows());
  Vec out = Vec::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < static_cast<int>(m.cols()); ++b) out(a) += m(a, b) * v(b);
  return out;
}

inline Mat inverse(const Mat& m) {
  switch (m.rows()) {
    case 1: return Mat::Constant(1, 1, 1.0 / m(0, 0));
    case 2: return Mat(Eigen::Matrix2d(m).inverse());
    case 3: return Mat(Eigen::Matrix3d(m).inverse());
    case 4: return Mat(Eigen::Matrix4d(m).inverse());
    default: return m.inverse();
  }
}
inline double norm(const Mat& g, const Vec& u) { return std::sqrt(inner(g, u, u)); }

}  // namespace rmcf
