#pragma once

// Root-pattern combinatorics for GL_n. A root is an ordered index pair (i, j)
// standing for e_i - e_j; a unipotent pattern is a closed, cycle-free set of
// roots and describes the subgroup of matrices that are the identity plus
// entries supported on the pattern. Levi subgroups are stored as partitions
// of the index set, so non-contiguous block structures are first class.

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wildcat/core/num.hpp"

namespace wildcat::lie {

using Root = std::pair<int, int>;

// Partition of {0, .., n-1} into Levi blocks. Order of parts and of members
// carries no meaning beyond reporting.
using Partition = std::vector<std::vector<int>>;

inline Partition full_partition(int n) {
  Partition p(1);
  for (int i = 0; i < n; ++i) p[0].push_back(i);
  return p;
}

inline Partition finest_partition(int n) {
  Partition p;
  for (int i = 0; i < n; ++i) p.push_back({i});
  return p;
}

// Map index -> part id.
inline std::vector<int> part_of(const Partition& p, int n) {
  std::vector<int> owner(n, -1);
  for (int b = 0; b < static_cast<int>(p.size()); ++b)
    for (int i : p[b]) {
      if (i < 0 || i >= n || owner[i] != -1)
        throw std::invalid_argument("partition: invalid or repeated index");
      owner[i] = b;
    }
  for (int i = 0; i < n; ++i)
    if (owner[i] == -1) throw std::invalid_argument("partition: missing index");
  return owner;
}

inline int partition_dim(const Partition& p) {
  int d = 0;
  for (const auto& part : p) d += static_cast<int>(part.size()) * static_cast<int>(part.size());
  return d;
}

// True when p refines q (every part of p sits inside one part of q).
inline bool refines(const Partition& p, const Partition& q, int n) {
  auto po = part_of(p, n);
  auto qo = part_of(q, n);
  for (const auto& part : p) {
    for (size_t k = 1; k < part.size(); ++k)
      if (qo[part[k]] != qo[part[0]]) return false;
    (void)po;
  }
  return true;
}

struct UnipotentPattern {
  int n = 0;
  std::set<Root> roots;

  bool contains(int i, int j) const { return roots.count({i, j}) > 0; }
  int size() const { return static_cast<int>(roots.size()); }
  bool empty() const { return roots.empty(); }
};

inline UnipotentPattern make_pattern(int n, std::vector<Root> rs) {
  UnipotentPattern p;
  p.n = n;
  for (auto [i, j] : rs) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("pattern root out of range");
    p.roots.insert({i, j});
  }
  return p;
}

// No directed cycle through pattern edges; guarantees the pattern group is
// unipotent (in some ordering the matrices are strictly triangular).
inline bool is_acyclic(const UnipotentPattern& p) {
  std::vector<int> indeg(p.n, 0);
  for (auto [i, j] : p.roots) indeg[j]++;
  std::vector<int> queue;
  for (int i = 0; i < p.n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  int seen = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    ++seen;
    for (auto [i, j] : p.roots)
      if (i == v && --indeg[j] == 0) queue.push_back(j);
  }
  return seen == p.n;
}

// Closed under root addition: (i,j) and (j,k) in the pattern force (i,k).
inline bool is_closed(const UnipotentPattern& p) {
  for (auto [i, j] : p.roots)
    for (auto [k, l] : p.roots)
      if (j == k && i != l && !p.contains(i, l)) return false;
  return true;
}

inline void validate_pattern(const UnipotentPattern& p) {
  if (!is_acyclic(p)) throw std::invalid_argument("pattern has a directed cycle");
  if (!is_closed(p)) throw std::invalid_argument("pattern is not closed under addition");
}

inline UnipotentPattern opposite(const UnipotentPattern& p) {
  UnipotentPattern q;
  q.n = p.n;
  for (auto [i, j] : p.roots) q.roots.insert({j, i});
  return q;
}

inline UnipotentPattern pattern_union(const UnipotentPattern& a, const UnipotentPattern& b) {
  if (a.n != b.n) throw std::invalid_argument("pattern_union: size mismatch");
  UnipotentPattern u = a;
  for (auto r : b.roots) u.roots.insert(r);
  return u;
}

inline bool disjoint(const UnipotentPattern& a, const UnipotentPattern& b) {
  for (auto r : a.roots)
    if (b.roots.count(r)) return false;
  return true;
}

// Height of each root inside a closed pattern: the longest way to write it as
// an ordered sum of pattern roots (longest path from i to j using pattern
// edges). Height-1 roots are the indecomposable ones.
inline std::vector<std::pair<Root, int>> root_heights(const UnipotentPattern& p) {
  // Longest path in the DAG of pattern edges between every pair of indices.
  const int n = p.n;
  std::vector<std::vector<int>> len(n, std::vector<int>(n, -1));
  for (auto [i, j] : p.roots) len[i][j] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto [i, j] : p.roots)
      for (int k = 0; k < n; ++k)
        if (len[j][k] >= 1 && p.contains(i, k) && len[i][k] < 1 + len[j][k]) {
          len[i][k] = 1 + len[j][k];
          changed = true;
        }
  }
  std::vector<std::pair<Root, int>> out;
  for (auto r : p.roots) out.push_back({r, len[r.first][r.second]});
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

// Matrices supported on the pattern (identity diagonal).
inline bool in_pattern_group(const Mat& u, const UnipotentPattern& p, double tol = 1e-9) {
  if (u.rows() != p.n || u.cols() != p.n) return false;
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) {
      Cx expect = (i == j) ? Cx(1, 0) : Cx(0, 0);
      if (p.contains(i, j)) continue;
      if (std::abs(u(i, j) - expect) > tol) return false;
    }
  return true;
}

inline bool in_levi(const Mat& g, const Partition& p, double tol = 1e-9) {
  const int n = static_cast<int>(g.rows());
  auto owner = part_of(p, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (owner[i] != owner[j] && std::abs(g(i, j)) > tol) return false;
  return true;
}

// Project a square matrix onto the Levi (resp. pattern) support.
inline Mat levi_project(const Mat& x, const Partition& p) {
  const int n = static_cast<int>(x.rows());
  auto owner = part_of(p, n);
  Mat y = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (owner[i] == owner[j]) y(i, j) = x(i, j);
  return y;
}

inline Mat pattern_project(const Mat& x, const UnipotentPattern& p) {
  Mat y = Mat::Zero(p.n, p.n);
  for (auto [i, j] : p.roots) y(i, j) = x(i, j);
  return y;
}

inline Mat rand_unipotent(Rng& rng, const UnipotentPattern& p, double radius = 0.5) {
  Mat u = eye(p.n);
  for (auto [i, j] : p.roots) u(i, j) = rng.disk(radius);
  return u;
}

inline Mat rand_levi(Rng& rng, const Partition& p, int n, double radius = 0.5) {
  auto owner = part_of(p, n);
  for (int tries = 0; tries < 64; ++tries) {
    Mat g = eye(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (owner[i] == owner[j]) g(i, j) += rng.disk(radius);
    Eigen::FullPivLU<Mat> lu(g);
    if (lu.isInvertible() && lu.rcond() > 1e-6) return g;
  }
  throw std::runtime_error("rand_levi: could not draw invertible element");
}

// All roots of gl_n.
inline std::vector<Root> all_roots(int n) {
  std::vector<Root> rs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) rs.push_back({i, j});
  return rs;
}

// Roots living inside the blocks of a partition.
inline std::vector<Root> levi_roots(const Partition& p, int n) {
  auto owner = part_of(p, n);
  std::vector<Root> rs;
  for (auto [i, j] : all_roots(n))
    if (owner[i] == owner[j]) rs.push_back({i, j});
  return rs;
}

inline std::string root_str(const Root& r) {
  // 1-based in human-readable output.
  return "e" + std::to_string(r.first + 1) + "-e" + std::to_string(r.second + 1);
}

}  // namespace wildcat::lie
