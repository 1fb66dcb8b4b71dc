#pragma once

// Level decomposition of the unipotent factors attached to an irregular
// class with several pole orders. Each factor S_i splits uniquely into
// per-level pieces S_i = S_i^1 .. S_i^r (levels ascending), and the twisted
// multipliers B_i^j, obtained by conjugating S_i^j with the lower-level
// pieces of the preceding directions, regroup the interleaved product into
// one block per level:
//   h S_s .. S_1 = h (B^1_s .. B^1_1) (B^2_s .. B^2_1) .. (B^r_s .. B^r_1).
// The twist is triangular in the level filtration, so it is invertible; the
// per-level tuples are points of the fission space of the adjacent pair of
// stabilizer groups in the Levi chain.

#include "wildcat/irregular/directions.hpp"
#include "wildcat/qh/space.hpp"

namespace wildcat::morph {

using irr::StokesStructure;
using qh::ChainSpace;

struct LevelSplit {
  // pieces[i][t]: level-t piece of the factor at direction i (t ascending in
  // pole order, one entry per level of the class, identity when the
  // direction does not support that level).
  std::vector<std::vector<Mat>> pieces;
  // twisted[i][t]: the multiplier B_i^t.
  std::vector<std::vector<Mat>> twisted;
};

namespace detail {

inline std::vector<lie::UnipotentPattern> level_patterns(const StokesStructure& st, int i) {
  std::vector<lie::UnipotentPattern> pats;
  for (int k : st.q.ks) pats.push_back(st.dirs[i].level_pattern(st.q.n, k));
  return pats;
}

// Product of the levels strictly below t at direction i, ascending.
inline Mat below(const std::vector<std::vector<Mat>>& pieces, int i, int t, int n) {
  Mat m = eye(n);
  for (int u = 0; u < t; ++u) m = m * pieces[i][u];
  return m;
}

// rho_i^t = Shat_{i-1} .. Shat_1 with Shat_k the below-t product at k.
inline Mat rho(const std::vector<std::vector<Mat>>& pieces, int i, int t, int n) {
  Mat m = eye(n);
  for (int k = i - 1; k >= 0; --k) m = m * below(pieces, k, t, n);
  return m;
}

}  // namespace detail

inline LevelSplit level_split(const StokesStructure& st, const std::vector<Mat>& factors) {
  const int s = st.count();
  const int r = st.q.levels();
  const int n = st.q.n;
  if (static_cast<int>(factors.size()) != s)
    throw std::invalid_argument("level_split: one factor per direction required");

  LevelSplit out;
  for (int i = 0; i < s; ++i) {
    auto fs = lie::direct_span_factorize(factors[i], detail::level_patterns(st, i));
    out.pieces.push_back(fs);
  }
  for (int i = 0; i < s; ++i) {
    std::vector<Mat> row;
    for (int t = 0; t < r; ++t) {
      Mat p = detail::rho(out.pieces, i, t, n);
      row.push_back(p.inverse() * out.pieces[i][t] * p);
    }
    out.twisted.push_back(row);
  }
  return out;
}

// Inverse of the twist: reconstruct the factors from the multipliers. Levels
// are recovered ascending, since rho at level t only needs levels below t.
inline std::vector<Mat> level_join(const StokesStructure& st,
                                   const std::vector<std::vector<Mat>>& twisted) {
  const int s = st.count();
  const int r = st.q.levels();
  const int n = st.q.n;
  std::vector<std::vector<Mat>> pieces(s, std::vector<Mat>(r));
  for (int t = 0; t < r; ++t)
    for (int i = 0; i < s; ++i) {
      Mat p = detail::rho(pieces, i, t, n);
      pieces[i][t] = p * twisted[i][t] * p.inverse();
    }
  std::vector<Mat> factors;
  for (int i = 0; i < s; ++i) {
    Mat m = eye(n);
    for (int t = 0; t < r; ++t) m = m * pieces[i][t];
    factors.push_back(m);
  }
  return factors;
}

// Grouped product h (B^1_s .. B^1_1) .. (B^r_s .. B^r_1); equals
// h S_s .. S_1 by the telescoping property of the twist.
inline Mat grouped_monodromy(const StokesStructure& st, const Mat& h,
                             const LevelSplit& split) {
  const int s = st.count();
  const int r = st.q.levels();
  Mat m = h;
  for (int t = 0; t < r; ++t)
    for (int i = s - 1; i >= 0; --i) m = m * split.twisted[i][t];
  return m;
}

// The space of one level: a chain space for the adjacent stabilizer pair
// (H_{t+1}, H_t) of the Levi chain, with the framing slot present only at
// the deepest level. Points are (C or 1, h_t, B^t_1 .. B^t_s) with
// h_t = h (B^1 block) .. (B^{t-1} block).
inline std::shared_ptr<ChainSpace> level_space(const StokesStructure& st, int t) {
  const int r = st.q.levels();
  const int n = st.q.n;
  auto chain = irr::levi_chain(st.q);
  lie::Partition g_part =
      (t == r - 1) ? lie::full_partition(n) : chain.levels[t + 1];
  lie::Partition h_part = chain.levels[t];
  std::vector<lie::UnipotentPattern> pats;
  for (int i = 0; i < st.count(); ++i)
    pats.push_back(st.dirs[i].level_pattern(n, st.q.ks[t]));
  return std::make_shared<ChainSpace>(n, g_part, h_part, pats,
                                      "level(" + std::to_string(st.q.ks[t]) + ")");
}

inline qh::Point level_point(const StokesStructure& st, int t, const Mat& framing,
                             const Mat& h, const LevelSplit& split) {
  const int s = st.count();
  const int r = st.q.levels();
  const int n = st.q.n;
  Mat ht = h;
  for (int u = 0; u < t; ++u)
    for (int i = s - 1; i >= 0; --i) ht = ht * split.twisted[i][u];
  qh::Point p;
  p.f.push_back(t == r - 1 ? framing : eye(n));
  p.f.push_back(ht);
  for (int i = 0; i < s; ++i) p.f.push_back(split.twisted[i][t]);
  return p;
}

}  // namespace wildcat::morph
