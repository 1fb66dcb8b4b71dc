#pragma once

// Shared numeric aliases and small dense-matrix helpers used across the library.
// Everything is complex: the spaces built here are complex-algebraic and all
// two-forms are holomorphic, so "numbers" means std::complex<double> throughout.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

namespace wildcat {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline Mat eye(int n) { return Mat::Identity(n, n); }

inline double fnorm(const Mat& a) { return a.norm(); }

// Frobenius distance, the residual measure used by every verification routine.
inline double dist(const Mat& a, const Mat& b) { return (a - b).norm(); }

inline Cx trace_pair(const Mat& x, const Mat& y) { return (x * y).trace(); }

// Deterministic random source. All sampling in the library goes through this
// type so that a (seed, config) pair reproduces results byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double unit() { return uni_(eng_); }

  // Uniform in the closed complex disk of the given radius.
  Cx disk(double radius) {
    double r = radius * std::sqrt(unit());
    double t = 2.0 * M_PI * unit();
    return Cx(r * std::cos(t), r * std::sin(t));
  }

  Mat mat(int rows, int cols, double radius) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = disk(radius);
    return m;
  }

  // Identity plus a small random perturbation; retries until comfortably
  // invertible so downstream inverses are well conditioned.
  Mat near_identity(int n, double radius) {
    for (int tries = 0; tries < 64; ++tries) {
      Mat g = eye(n) + mat(n, n, radius);
      Eigen::FullPivLU<Mat> lu(g);
      if (lu.isInvertible() && lu.rcond() > 1e-6) return g;
    }
    throw std::runtime_error("near_identity: could not draw invertible matrix");
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

// Singular values of an arbitrary complex matrix.
inline RVec singular_values(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues();
}

// Numerical rank with a relative threshold against the top singular value.
inline int numeric_rank(const Mat& a, double rel_tol = 1e-9) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  RVec s = singular_values(a);
  if (s.size() == 0 || s(0) <= 0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

// Orthonormal basis of the right null space (columns), relative threshold.
inline Mat kernel_basis(const Mat& a, double rel_tol = 1e-9) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  RVec s = svd.singularValues();
  double top = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (top > 0 && s(i) > rel_tol * top) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

// Minimum-norm least-squares solve via SVD (used to lift tangent vectors of a
// conjugacy class back to Lie-algebra generators).
inline Vec pinv_solve(const Mat& a, const Vec& b, double rel_tol = 1e-12) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rel_tol);
  return svd.solve(b);
}

// Column-stacking of a matrix into a vector and back.
inline Vec vec_of(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

inline Mat mat_of(const Vec& v, int rows, int cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

}  // namespace wildcat
