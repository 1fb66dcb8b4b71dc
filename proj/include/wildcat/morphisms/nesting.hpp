#pragma once

// Nesting of chain spaces along a flag of block groups G > K > H: a point of
// the inner space (over (K, H)) and one of the outer space (over (G, K)),
// linked by the requirement that the outer framing k equals the inner
// monodromy h A_m .. A_1 at inner framing D = 1, compose to a point of the
// total space over (G, H) via S_i = D_i B_i D_{i-1}^{-1}, D_i = A_i .. A_1.
// The composite moment map agrees with the outer one on the nose, and the
// pulled-back two-form is the fused product form restricted to the slice.

#include "wildcat/qh/space.hpp"

namespace wildcat::morph {

using qh::ChainSpace;
using qh::Point;
using qh::Tangent;

struct NestedPoint {
  Point point;      // in the total space over (G, H)
  Tangent tangent;  // image of the two input tangents
  Point outer;      // outer input with the induced framing k filled in
  Tangent outer_tangent;
};

// inner: space over (K, H) whose points are (D, h, A_1..A_m); the map uses
//   the slice D = 1, and inner tangents must have zero D-component.
// outer: space over (G, K) whose points are (C, k, B_1..B_m); the framing k
//   and its tangent are overwritten by the constraint k = h A_m .. A_1.
inline NestedPoint nest(const ChainSpace& inner, const Point& pi, const Tangent& ui,
                        const ChainSpace& outer, const Point& po, const Tangent& uo,
                        const ChainSpace& total) {
  const int m = inner.unipotent_count();
  if (outer.unipotent_count() != m || total.unipotent_count() != m)
    throw std::invalid_argument("nest: factor counts disagree");
  const int n = inner.n();
  if (dist(pi.f[0], eye(n)) > 1e-12)
    throw std::invalid_argument("nest: inner framing must be 1");
  if (ui.xi[0].norm() > 1e-12)
    throw std::invalid_argument("nest: inner framing tangent must vanish");

  auto fi = qh::point_jets(inner, pi, ui);
  auto fo = qh::point_jets(outer, po, uo);

  // Constraint: k = h A_m .. A_1 (the inner monodromy at D = 1).
  JMat k = fi[1];
  for (int i = m; i >= 1; --i) k = k * fi[1 + i];

  // Partial products D_i = A_i .. A_1, with D_0 = 1.
  std::vector<JMat> d{JMat::constant(eye(n))};
  for (int i = 1; i <= m; ++i) d.push_back(fi[1 + i] * d[i - 1]);

  std::vector<JMat> out;
  out.push_back(fo[0]);  // C
  out.push_back(fi[1]);  // h
  for (int i = 1; i <= m; ++i) out.push_back(d[i] * fo[1 + i] * d[i - 1].inverse());

  NestedPoint res;
  res.point = qh::jet_values(out);
  res.tangent = qh::jet_tangents(total, out);
  std::vector<JMat> outer_filled = fo;
  outer_filled[1] = k;
  res.outer = qh::jet_values(outer_filled);
  res.outer_tangent = qh::jet_tangents(outer, outer_filled);
  if (!total.contains(res.point, 1e-8))
    throw std::runtime_error("nest: composite point left the total space");
  return res;
}

}  // namespace wildcat::morph
