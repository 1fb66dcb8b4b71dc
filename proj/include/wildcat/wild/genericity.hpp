#pragma once

// Genericity of a tuple of conjugacy classes: the product of all prescribed
// eigenvalues must be 1, and no proper selection (k eigenvalues from every
// point, 0 < k < n) may multiply to 1. Generic classes force every solution
// of the relation to be stable.

#include "wildcat/wild/curve.hpp"

namespace wildcat::wild {

struct GenericityReport {
  bool generic = false;
  bool determinant_ok = false;         // product of every eigenvalue equals 1
  bool exhaustive = true;              // full selection sweep (small n, m)
  std::vector<std::vector<int>> witness;  // violating selection, per point
  Cx witness_product = 0.0;

  explicit operator bool() const { return generic; }
};

namespace detail {

inline void k_subsets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// Exhaustive sweep when every point has at most `max_exhaustive` selections
// to combine; otherwise a seeded randomized sweep with the incompleteness
// recorded in the report.
inline GenericityReport is_generic(const IrregularCurve& curve, const ClassList& classes,
                                   double tol = 1e-9, long max_combinations = 2000000,
                                   unsigned seed = 7) {
  validate_classes(curve, classes);
  const int n = curve.n();
  const int m = curve.marked_count();
  GenericityReport rep;
  for (const auto& c : classes)
    if (!c) throw std::invalid_argument("is_generic: every point needs a class");

  Cx total = 1.0;
  for (const auto& c : classes)
    for (const auto& e : c->eigenvalues) total *= e;
  rep.determinant_ok = std::abs(total - 1.0) <= tol;
  if (!rep.determinant_ok) {
    rep.generic = false;
    return rep;
  }

  for (int k = 1; k < n; ++k) {
    std::vector<std::vector<int>> subsets;
    detail::k_subsets(n, k, subsets);
    std::vector<Cx> products(subsets.size());
    long combos = 1;
    for (int i = 0; i < m; ++i) combos *= static_cast<long>(subsets.size());

    auto product_of = [&](int point, const std::vector<int>& sel) {
      Cx p = 1.0;
      for (int idx : sel) p *= classes[point]->eigenvalues[idx];
      return p;
    };

    if (combos <= max_combinations) {
      std::vector<int> choice(m, 0);
      while (true) {
        Cx p = 1.0;
        for (int i = 0; i < m; ++i) p *= product_of(i, subsets[choice[i]]);
        if (std::abs(p - 1.0) <= tol) {
          rep.generic = false;
          rep.witness.clear();
          for (int i = 0; i < m; ++i) rep.witness.push_back(subsets[choice[i]]);
          rep.witness_product = p;
          return rep;
        }
        int i = m - 1;
        while (i >= 0 && choice[i] + 1 == static_cast<int>(subsets.size())) --i;
        if (i < 0) break;
        ++choice[i];
        for (int j = i + 1; j < m; ++j) choice[j] = 0;
      }
    } else {
      rep.exhaustive = false;
      Rng rng(seed);
      for (long t = 0; t < max_combinations; ++t) {
        std::vector<int> choice(m);
        Cx p = 1.0;
        for (int i = 0; i < m; ++i) {
          choice[i] = static_cast<int>(rng.unit() * subsets.size()) %
                      static_cast<int>(subsets.size());
          p *= product_of(i, subsets[choice[i]]);
        }
        if (std::abs(p - 1.0) <= tol) {
          rep.generic = false;
          rep.witness.clear();
          for (int i = 0; i < m; ++i) rep.witness.push_back(subsets[choice[i]]);
          rep.witness_product = p;
          return rep;
        }
      }
    }
  }
  rep.generic = true;
  return rep;
}

}  // namespace wildcat::wild
