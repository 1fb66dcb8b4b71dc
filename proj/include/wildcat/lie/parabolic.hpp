#pragma once

// Invariant pairing on gl_n and parabolic data attached to a real diagonal
// cocharacter: the subgroup whose roots pair positively (its unipotent
// radical pattern), the Levi given by the level sets, and a permutation
// witness that sorts the weights so blocks become contiguous.

#include <numeric>

#include "wildcat/lie/pattern.hpp"

namespace wildcat::lie {

// The nondegenerate invariant form used everywhere: (X, Y) = tr(XY).
inline Cx trace_form(const Mat& x, const Mat& y) { return (x * y).trace(); }

struct ParabolicData {
  UnipotentPattern radical;        // roots alpha with alpha(lambda) > 0
  UnipotentPattern opposite_radical;
  Partition levi;                  // level sets of lambda, in descending value order
  std::vector<int> permutation;    // index order sorting lambda descending (stable)
};

inline ParabolicData parabolic_from_cocharacter(const std::vector<double>& lambda,
                                                double tol = 1e-12) {
  const int n = static_cast<int>(lambda.size());
  ParabolicData out;
  out.radical.n = n;
  out.opposite_radical.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (lambda[i] - lambda[j] > tol) out.radical.roots.insert({i, j});
      if (lambda[j] - lambda[i] > tol) out.opposite_radical.roots.insert({i, j});
    }

  out.permutation.resize(n);
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  std::stable_sort(out.permutation.begin(), out.permutation.end(),
                   [&](int a, int b) { return lambda[a] > lambda[b] + tol; });

  // Level sets in the sorted order.
  for (int i : out.permutation) {
    if (!out.levi.empty() && std::abs(lambda[out.levi.back().front()] - lambda[i]) <= tol)
      out.levi.back().push_back(i);
    else
      out.levi.push_back({i});
  }
  return out;
}

}  // namespace wildcat::lie
