#pragma once

// Irregular types for GL_n: a finite polar tail Q = A_r / z^{k_r} + ... +
// A_1 / z^{k_1} with 0 < k_1 < ... < k_r and each A_i diagonal. Per root
// alpha = e_i - e_j the scalar function q_alpha = alpha(Q) drives everything
// downstream: its pole degree, its leading coefficient, and the chain of
// stabilizer Levis cut out by the leading terms.

#include <numeric>

#include <json.hpp>

#include "wildcat/lie/pattern.hpp"

namespace wildcat::irr {

using lie::Partition;
using lie::Root;

struct IrregularType {
  int n = 0;
  std::vector<int> ks;    // pole orders, strictly increasing, all >= 1
  std::vector<Vec> As;    // diagonal of the coefficient at 1/z^{ks[t]}

  int levels() const { return static_cast<int>(ks.size()); }
  int max_order() const { return ks.empty() ? 0 : ks.back(); }
};

inline void validate(const IrregularType& q) {
  if (q.n <= 0) throw std::invalid_argument("irregular type: n must be positive");
  if (q.ks.size() != q.As.size())
    throw std::invalid_argument("irregular type: ks/As length mismatch");
  for (size_t t = 0; t < q.ks.size(); ++t) {
    if (q.ks[t] < 1) throw std::invalid_argument("irregular type: pole order must be >= 1");
    if (t > 0 && q.ks[t] <= q.ks[t - 1])
      throw std::invalid_argument("irregular type: pole orders must increase");
    if (q.As[t].size() != q.n)
      throw std::invalid_argument("irregular type: coefficient size mismatch");
  }
}

// Scalar tail q_alpha: coefficient per stored pole order, plus its honest
// degree after discarding numerically zero leading coefficients.
struct RootTail {
  std::vector<std::pair<int, Cx>> coeffs;  // (pole order, coefficient), ascending
  int degree = 0;                          // 0 means q_alpha = 0 (tame root)
  Cx leading = 0.0;
};

inline double coeff_tol(const IrregularType& q) {
  double scale = 0.0;
  for (const auto& a : q.As) scale = std::max(scale, a.cwiseAbs().maxCoeff());
  return 1e-12 * (1.0 + scale);
}

inline RootTail q_alpha(const IrregularType& q, const Root& r) {
  RootTail tail;
  const double tol = coeff_tol(q);
  for (int t = 0; t < q.levels(); ++t) {
    Cx c = q.As[t](r.first) - q.As[t](r.second);
    tail.coeffs.push_back({q.ks[t], c});
    if (std::abs(c) > tol) {
      tail.degree = q.ks[t];
      tail.leading = c;
    }
  }
  return tail;
}

// Centralizer of the whole tail: indices are grouped together exactly when
// all coefficient entries agree. This is the Levi H with Lie algebra the
// kernel of every ad(A_i).
inline Partition centralizer(const IrregularType& q) {
  const double tol = coeff_tol(q);
  Partition parts;
  for (int i = 0; i < q.n; ++i) {
    bool placed = false;
    for (auto& part : parts) {
      int rep = part.front();
      bool same = true;
      for (const auto& a : q.As)
        if (std::abs(a(i) - a(rep)) > tol) {
          same = false;
          break;
        }
      if (same) {
        part.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) parts.push_back({i});
  }
  return parts;
}

// Chain of stabilizers of the top coefficients: levels[t] is the partition of
// the Levi stabilizing A_r, ..., A_{t+1} down to A_{t+1}; levels.front() is
// the full centralizer H and the implicit top of the chain is GL_n itself.
// complements[t] lists the roots whose tail degree equals ks[t]; these span
// the pairing-orthogonal complement of one Levi inside the next.
struct LeviChain {
  std::vector<Partition> levels;            // size r: H_1 = H, H_2, ..., H_r
  std::vector<std::vector<Root>> complements;  // size r: roots of degree ks[t]
};

inline LeviChain levi_chain(const IrregularType& q) {
  LeviChain chain;
  const double tol = coeff_tol(q);
  const int r = q.levels();
  for (int t = 0; t < r; ++t) {
    // Stabilizer of A_r, ..., A_{t+1} (levels above t, inclusive).
    Partition parts;
    for (int i = 0; i < q.n; ++i) {
      bool placed = false;
      for (auto& part : parts) {
        int rep = part.front();
        bool same = true;
        for (int s = t; s < r; ++s)
          if (std::abs(q.As[s](i) - q.As[s](rep)) > tol) {
            same = false;
            break;
          }
        if (same) {
          part.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) parts.push_back({i});
    }
    chain.levels.push_back(parts);

    std::vector<Root> comp;
    for (auto root : lie::all_roots(q.n))
      if (q_alpha(q, root).degree == q.ks[t]) comp.push_back(root);
    chain.complements.push_back(comp);
  }
  return chain;
}

// Admissibility comparison: same root-by-root pole degrees.
inline bool same_pole_degrees(const IrregularType& a, const IrregularType& b) {
  if (a.n != b.n) return false;
  for (auto root : lie::all_roots(a.n))
    if (q_alpha(a, root).degree != q_alpha(b, root).degree) return false;
  return true;
}

// Sum over all roots of deg(q_alpha); the Stokes-space dimension count.
inline int total_degree(const IrregularType& q) {
  int total = 0;
  for (auto root : lie::all_roots(q.n)) total += q_alpha(q, root).degree;
  return total;
}

// ---- JSON ----------------------------------------------------------------
// {"n": 3, "terms": [{"k": 1, "A": [[re,im], [re,im], [re,im]]}, ...]}

inline Cx cx_from_json(const nlohmann::json& j, const char* where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(std::string("expected [re, im] pair in ") + where);
  return Cx(j[0].get<double>(), j[1].get<double>());
}

inline nlohmann::json cx_to_json(const Cx& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

inline IrregularType irregular_from_json(const nlohmann::json& j) {
  if (!j.contains("n")) throw std::invalid_argument("irregular type: missing field \"n\"");
  // A typo here would otherwise silently read as a tame point.
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "n" && it.key() != "terms")
      throw std::invalid_argument("irregular type: unknown field \"" + it.key() + "\"");
  IrregularType q;
  q.n = j.at("n").get<int>();
  if (j.contains("terms")) {
    for (const auto& term : j.at("terms")) {
      if (!term.contains("k")) throw std::invalid_argument("irregular term: missing field \"k\"");
      if (!term.contains("A")) throw std::invalid_argument("irregular term: missing field \"A\"");
      for (auto it = term.begin(); it != term.end(); ++it)
        if (it.key() != "k" && it.key() != "A")
          throw std::invalid_argument("irregular term: unknown field \"" + it.key() + "\"");
      q.ks.push_back(term.at("k").get<int>());
      const auto& arr = term.at("A");
      if (!arr.is_array() || static_cast<int>(arr.size()) != q.n)
        throw std::invalid_argument("irregular term: \"A\" must list n diagonal entries");
      Vec a(q.n);
      for (int i = 0; i < q.n; ++i) a(i) = cx_from_json(arr[i], "\"A\"");
      q.As.push_back(a);
    }
  }
  // Accept terms in any order; store sorted by pole order.
  std::vector<int> idx(q.ks.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return q.ks[a] < q.ks[b]; });
  IrregularType sorted;
  sorted.n = q.n;
  for (int t : idx) {
    sorted.ks.push_back(q.ks[t]);
    sorted.As.push_back(q.As[t]);
  }
  validate(sorted);
  return sorted;
}

inline nlohmann::json irregular_to_json(const IrregularType& q) {
  nlohmann::json terms = nlohmann::json::array();
  for (int t = 0; t < q.levels(); ++t) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < q.n; ++i) a.push_back(cx_to_json(q.As[t](i)));
    terms.push_back({{"k", q.ks[t]}, {"A", a}});
  }
  return {{"n", q.n}, {"terms", terms}};
}

// Convenience builder used all over the tests.
inline IrregularType make_irregular(int n, std::vector<std::pair<int, std::vector<Cx>>> terms) {
  IrregularType q;
  q.n = n;
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [k, diag] : terms) {
    q.ks.push_back(k);
    Vec a(n);
    for (int i = 0; i < n; ++i) a(i) = diag[i];
    q.As.push_back(a);
  }
  validate(q);
  return q;
}

}  // namespace wildcat::irr
