#pragma once

// Correspondence between the rectangular pair space on (V, W) and the depth
// two chain space of GL(V + W) blocked as GL(V) x GL(W), on the slice where
// the framing is trivial and the group-valued moment equals 1. A pair (a, b)
// with det(1 + ab) != 0 determines
//   S_1 = 1 + a,  S_2 = 1 + b,  S_3 = 1 - x^{-1} a,  S_4 = 1 - (1 + ba) b,
//   h = diag(x, y),  x = 1 + ab,  y = (1 + ba)^{-1}
// (rectangles embedded in the off-diagonal blocks), satisfying the relation
// h S_4 S_3 S_2 S_1 = 1, with h^{-1} reproducing the pair moment blockwise.
// Rotating one factor past the slice and renormalizing the framing realizes
// the reversal (a, b) -> (b, -(1 + ab)^{-1} a) on pairs.

#include "wildcat/morphisms/chain_maps.hpp"
#include "wildcat/qh/space.hpp"

namespace wildcat::morph {

using qh::ChainSpace;
using qh::PairSpace;
using qh::Point;
using qh::Tangent;

inline lie::UnipotentPattern block_upper(int nv, int nw) {
  lie::UnipotentPattern p;
  p.n = nv + nw;
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nw; ++j) p.roots.insert({i, nv + j});
  return p;
}

inline lie::UnipotentPattern block_lower(int nv, int nw) {
  lie::UnipotentPattern p;
  p.n = nv + nw;
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nw; ++j) p.roots.insert({nv + j, i});
  return p;
}

inline std::shared_ptr<ChainSpace> make_pair_chain_space(int nv, int nw) {
  const int n = nv + nw;
  lie::Partition blocks(2);
  for (int i = 0; i < nv; ++i) blocks[0].push_back(i);
  for (int j = 0; j < nw; ++j) blocks[1].push_back(nv + j);
  std::vector<lie::UnipotentPattern> pats{block_upper(nv, nw), block_lower(nv, nw),
                                          block_upper(nv, nw), block_lower(nv, nw)};
  return std::make_shared<ChainSpace>(n, lie::full_partition(n), blocks, pats,
                                      "pair-chain(" + std::to_string(nv) + "," +
                                          std::to_string(nw) + ")");
}

namespace detail {

inline JMat embed12(const JMat& a, int nv, int nw) {
  int n = nv + nw;
  Mat v = eye(n), d = Mat::Zero(n, n);
  v.block(0, nv, nv, nw) = a.v;
  d.block(0, nv, nv, nw) = a.d;
  return {v, d};
}

inline JMat embed21(const JMat& b, int nv, int nw) {
  int n = nv + nw;
  Mat v = eye(n), d = Mat::Zero(n, n);
  v.block(nv, 0, nw, nv) = b.v;
  d.block(nv, 0, nw, nv) = b.d;
  return {v, d};
}

inline JMat embed_diag(const JMat& x, const JMat& y, int nv, int nw) {
  int n = nv + nw;
  Mat v = Mat::Zero(n, n), d = Mat::Zero(n, n);
  v.block(0, 0, nv, nv) = x.v;
  v.block(nv, nv, nw, nw) = y.v;
  d.block(0, 0, nv, nv) = x.d;
  d.block(nv, nv, nw, nw) = y.d;
  return {v, d};
}

}  // namespace detail

// Map a pair-space point (with tangent) to the slice point of the chain
// space. Input tangents are plain deltas on a and b.
inline MappedPoint pair_to_chain(const PairSpace& pairs, const Point& p, const Tangent& u) {
  const int nv = static_cast<int>(p.f[0].rows());
  const int nw = static_cast<int>(p.f[0].cols());
  JMat a(p.f[0], u.xi[0]), b(p.f[1], u.xi[1]);
  JMat one_v = JMat::constant(eye(nv)), one_w = JMat::constant(eye(nw));
  JMat x = one_v + a * b;
  JMat y = (one_w + b * a).inverse();
  JMat c = JMat::constant(-eye(nv)) * x.inverse() * a;
  JMat f = JMat::constant(-eye(nw)) * (one_w + b * a) * b;

  std::vector<JMat> out;
  out.push_back(JMat::constant(eye(nv + nw)));  // framing C = 1
  out.push_back(detail::embed_diag(x, y, nv, nw));
  out.push_back(detail::embed12(a, nv, nw));
  out.push_back(detail::embed21(b, nv, nw));
  out.push_back(detail::embed12(c, nv, nw));
  out.push_back(detail::embed21(f, nv, nw));

  MappedPoint res;
  res.space = make_pair_chain_space(nv, nw);
  res.point = qh::jet_values(out);
  res.tangent = qh::jet_tangents(*res.space, out);
  return res;
}

// Extract the pair from a slice point: a from S_1, b from S_2.
inline std::pair<Mat, Mat> chain_to_pair(const Point& p, int nv, int nw) {
  Mat a = p.f[2].block(0, nv, nv, nw);
  Mat b = p.f[3].block(nv, 0, nw, nv);
  return {a, b};
}

// Reversal on pairs induced by rotating the chain slice once and moving the
// framing back to 1 with the block-group action: (a, b) over (V, W) becomes
// (b, -(1 + ab)^{-1} a) over (W, V).
inline std::pair<Mat, Mat> pair_reversal(const Mat& a, const Mat& b) {
  const int nv = static_cast<int>(a.rows());
  const int nw = static_cast<int>(a.cols());
  PairSpace ps(nv, nw);
  Point p{{a, b}};
  Tangent zero = qh::zero_tangent_like(p);
  auto slice = pair_to_chain(ps, p, zero);
  auto rot = rotate(*slice.space, slice.point, slice.tangent);
  // The framing is now S_1; push it back to 1 with the (g, k) = (S_1, 1)
  // action, which leaves every other factor alone.
  qh::GroupTuple g{rot.point.f[0], eye(nv + nw)};
  Point fixed = rot.space->act(rot.point, g);
  // In the rotated space the first two factors live in the swapped blocks.
  Mat a2 = fixed.f[2].block(nv, 0, nw, nv);
  Mat b2 = fixed.f[3].block(0, nv, nv, nw);
  return {a2, b2};
}

}  // namespace wildcat::morph
