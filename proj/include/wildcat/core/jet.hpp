#pragma once

// First-order jets of matrix-valued expressions: a value together with its
// directional derivative along one tangent vector. Two-forms, moment-map
// derivatives and the tangent maps of all point transformations are obtained
// by propagating these jets through the defining matrix formulas, so every
// "derivative" in the library is exact up to rounding (no differencing).

#include "wildcat/core/num.hpp"

namespace wildcat {

struct JMat {
  Mat v;  // value
  Mat d;  // derivative along the chosen tangent

  JMat() = default;
  JMat(Mat value, Mat deriv) : v(std::move(value)), d(std::move(deriv)) {}

  // Constant (derivative zero).
  static JMat constant(const Mat& value) {
    return JMat(value, Mat::Zero(value.rows(), value.cols()));
  }

  JMat inverse() const {
    Mat vi = v.inverse();
    return JMat(vi, -vi * d * vi);
  }
};

inline JMat operator*(const JMat& a, const JMat& b) {
  return JMat(a.v * b.v, a.d * b.v + a.v * b.d);
}

inline JMat operator*(const Mat& a, const JMat& b) {
  return JMat(a * b.v, a * b.d);
}

inline JMat operator*(const JMat& a, const Mat& b) {
  return JMat(a.v * b, a.d * b);
}

inline JMat operator+(const JMat& a, const JMat& b) {
  return JMat(a.v + b.v, a.d + b.d);
}

inline JMat operator-(const JMat& a, const JMat& b) {
  return JMat(a.v - b.v, a.d - b.d);
}

// Left Maurer-Cartan value along the jet: g^{-1} dg.
inline Mat mc_left(const JMat& g) { return g.v.inverse() * g.d; }

// Right Maurer-Cartan value along the jet: (dg) g^{-1}.
inline Mat mc_right(const JMat& g) { return g.d * g.v.inverse(); }

}  // namespace wildcat
