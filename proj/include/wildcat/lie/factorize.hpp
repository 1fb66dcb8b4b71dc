#pragma once

// Unique factorization of a unipotent matrix across an ordered list of
// disjoint patterns whose union is closed: u = F_1 F_2 ... F_k with F_m
// supported on patterns[m]. Entries are solved by increasing height inside
// the union pattern; at each height the product of the partial factors
// already matches u on every lower root, and the height-h entry of the
// product depends linearly on exactly one unknown, so peeling is exact.
//
// The jet variant factorizes value and directional derivative together,
// which gives the exact tangent map of refactorization for free.

#include <map>

#include "wildcat/core/jet.hpp"
#include "wildcat/lie/pattern.hpp"

namespace wildcat::lie {

inline std::vector<JMat> direct_span_factorize_jet(const JMat& u,
                                                   const std::vector<UnipotentPattern>& patterns,
                                                   double support_tol = 1e-9) {
  if (patterns.empty()) throw std::invalid_argument("factorize: no patterns");
  const int n = patterns[0].n;
  if (u.v.rows() != n || u.v.cols() != n)
    throw std::invalid_argument("factorize: size mismatch");

  UnipotentPattern uni;
  uni.n = n;
  std::map<Root, int> owner;
  for (int m = 0; m < static_cast<int>(patterns.size()); ++m) {
    if (patterns[m].n != n) throw std::invalid_argument("factorize: size mismatch");
    for (auto r : patterns[m].roots) {
      if (owner.count(r)) throw std::invalid_argument("factorize: patterns overlap");
      owner[r] = m;
      uni.roots.insert(r);
    }
  }
  validate_pattern(uni);

  double scale = 1.0 + u.v.norm();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Cx expect = (i == j) ? Cx(1, 0) : Cx(0, 0);
      if (i != j && uni.contains(i, j)) continue;
      if (std::abs(u.v(i, j) - expect) > support_tol * scale)
        throw std::invalid_argument("factorize: u has support outside the union");
    }

  auto heights = root_heights(uni);
  std::vector<JMat> f(patterns.size(), JMat::constant(eye(n)));

  auto product = [&]() {
    JMat p = f[0];
    for (size_t m = 1; m < f.size(); ++m) p = p * f[m];
    return p;
  };

  size_t pos = 0;
  while (pos < heights.size()) {
    int h = heights[pos].second;
    JMat p = product();
    for (; pos < heights.size() && heights[pos].second == h; ++pos) {
      auto [i, j] = heights[pos].first;
      int m = owner.at({i, j});
      f[m].v(i, j) += u.v(i, j) - p.v(i, j);
      f[m].d(i, j) += u.d(i, j) - p.d(i, j);
    }
  }

  if ((product().v - u.v).norm() > 1e-9 * scale)
    throw std::runtime_error("factorize: residual check failed");
  return f;
}

inline std::vector<Mat> direct_span_factorize(const Mat& u,
                                              const std::vector<UnipotentPattern>& patterns,
                                              double support_tol = 1e-9) {
  auto jets = direct_span_factorize_jet(JMat::constant(u), patterns, support_tol);
  std::vector<Mat> out;
  out.reserve(jets.size());
  for (auto& j : jets) out.push_back(std::move(j.v));
  return out;
}

}  // namespace wildcat::lie
