#pragma once

// Structure-preserving maps between chain spaces: the rotation taking one
// unipotent factor past the formal monodromy, the inversion anti-isomorphism,
// the two monodromy twists, and refactorization of a block of consecutive
// unipotent factors across a different direct-spanning decomposition. Every
// map is defined once on jets, so its exact tangent map comes along for free.

#include "wildcat/qh/space.hpp"

namespace wildcat::morph {

using qh::ChainSpace;
using qh::Point;
using qh::Tangent;
using lie::UnipotentPattern;

struct MappedPoint {
  std::shared_ptr<const ChainSpace> space;
  Point point;
  Tangent tangent;
};

namespace detail {

inline MappedPoint assemble(std::shared_ptr<const ChainSpace> target,
                            const std::vector<JMat>& js) {
  MappedPoint out;
  out.point = qh::jet_values(js);
  out.tangent = qh::jet_tangents(*target, js);
  out.space = std::move(target);
  return out;
}

}  // namespace detail

// Rotation: (C, h, S_1, .., S_m) -> (S_1 C, h, S_2, .., S_m, h^{-1} S_1 h).
// The moment map is preserved on the nose; patterns rotate accordingly.
inline std::shared_ptr<const ChainSpace> rotated_space(const ChainSpace& sp) {
  auto pats = sp.patterns();
  if (!pats.empty()) {
    std::rotate(pats.begin(), pats.begin() + 1, pats.end());
  }
  return std::make_shared<ChainSpace>(sp.n(), sp.g_levi(), sp.h_levi(), pats, sp.name());
}

inline MappedPoint rotate(const ChainSpace& sp, const Point& p, const Tangent& u) {
  const int m = sp.unipotent_count();
  auto f = qh::point_jets(sp, p, u);
  std::vector<JMat> out;
  if (m == 0) {
    out = f;
  } else {
    out.push_back(f[2] * f[0]);
    out.push_back(f[1]);
    for (int i = 1; i < m; ++i) out.push_back(f[2 + i]);
    out.push_back(f[1].inverse() * f[2] * f[1]);
  }
  return detail::assemble(rotated_space(sp), out);
}

inline MappedPoint rotate_n(const ChainSpace& sp, const Point& p, const Tangent& u,
                            int times) {
  MappedPoint cur{std::make_shared<ChainSpace>(sp), p, u};
  for (int i = 0; i < times; ++i) cur = rotate(*cur.space, cur.point, cur.tangent);
  return cur;
}

// Inverse rotation: (C, h, S_1, .., S_m) -> (T^{-1} C, h, T, S_1, .., S_{m-1})
// with T = h S_m h^{-1}. Undoes rotate exactly; patterns rotate right.
inline std::shared_ptr<const ChainSpace> rotated_back_space(const ChainSpace& sp) {
  auto pats = sp.patterns();
  if (!pats.empty()) {
    std::rotate(pats.begin(), pats.end() - 1, pats.end());
  }
  return std::make_shared<ChainSpace>(sp.n(), sp.g_levi(), sp.h_levi(), pats, sp.name());
}

inline MappedPoint rotate_back(const ChainSpace& sp, const Point& p, const Tangent& u) {
  const int m = sp.unipotent_count();
  auto f = qh::point_jets(sp, p, u);
  std::vector<JMat> out;
  if (m == 0) {
    out = f;
  } else {
    JMat t = f[1] * f[1 + m] * f[1].inverse();
    out.push_back(t.inverse() * f[0]);
    out.push_back(f[1]);
    out.push_back(t);
    for (int i = 1; i < m; ++i) out.push_back(f[1 + i]);
  }
  return detail::assemble(rotated_back_space(sp), out);
}

// Inversion: (C, h, S_1, .., S_m) -> (C, h^{-1}, T_1, .., T_m) with
// T_i = h S_{m+1-i}^{-1} h^{-1}. Anti-isomorphism: negates the two-form and
// inverts both moment components; applying it twice is the identity.
inline std::shared_ptr<const ChainSpace> inverted_space(const ChainSpace& sp) {
  auto pats = sp.patterns();
  std::reverse(pats.begin(), pats.end());
  return std::make_shared<ChainSpace>(sp.n(), sp.g_levi(), sp.h_levi(), pats, sp.name());
}

inline MappedPoint invert(const ChainSpace& sp, const Point& p, const Tangent& u) {
  const int m = sp.unipotent_count();
  auto f = qh::point_jets(sp, p, u);
  std::vector<JMat> out;
  out.push_back(f[0]);
  out.push_back(f[1].inverse());
  for (int i = 1; i <= m; ++i)
    out.push_back(f[1] * f[1 + (m + 1 - i)].inverse() * f[1].inverse());
  return detail::assemble(inverted_space(sp), out);
}

// Inner twist: (C, h, S) -> (h C, h, h S h^{-1}). Outer twist:
// (C, h, S) -> (b^{-1} C, h, S) with b = h S_m .. S_1. Both preserve the
// moment map and the two-form; they generate the monodromy of the family.
inline MappedPoint twist_inner(const ChainSpace& sp, const Point& p, const Tangent& u) {
  const int m = sp.unipotent_count();
  auto f = qh::point_jets(sp, p, u);
  std::vector<JMat> out;
  out.push_back(f[1] * f[0]);
  out.push_back(f[1]);
  for (int i = 0; i < m; ++i) out.push_back(f[1] * f[2 + i] * f[1].inverse());
  return detail::assemble(std::make_shared<ChainSpace>(sp), out);
}

inline MappedPoint twist_outer(const ChainSpace& sp, const Point& p, const Tangent& u) {
  const int m = sp.unipotent_count();
  auto f = qh::point_jets(sp, p, u);
  JMat b = f[1];
  for (int i = m; i >= 1; --i) b = b * f[1 + i];
  std::vector<JMat> out;
  out.push_back(b.inverse() * f[0]);
  out.push_back(f[1]);
  for (int i = 0; i < m; ++i) out.push_back(f[2 + i]);
  return detail::assemble(std::make_shared<ChainSpace>(sp), out);
}

// Refactorization of the consecutive unipotent factors S_{first+1}, ..,
// S_{first+count} (1-based slots first+1 .. first+count, 0-based list index
// first .. first+count-1) across a different direct-spanning set of
// patterns. `new_patterns` is given in slot order (lowest slot first); the
// slot product S_{hi} .. S_{lo} is preserved exactly, so the moment map is
// unchanged, and the two-form is preserved because both decompositions span
// the same group directly.
inline MappedPoint refactor_segment(const ChainSpace& sp, const Point& p, const Tangent& u,
                                    int first, int count,
                                    const std::vector<UnipotentPattern>& new_patterns) {
  const int m = sp.unipotent_count();
  if (first < 0 || count < 1 || first + count > m)
    throw std::invalid_argument("refactor_segment: slot range out of bounds");
  auto f = qh::point_jets(sp, p, u);

  // Product over the segment in multiplication order (descending slot).
  JMat prod = f[2 + first + count - 1];
  for (int i = first + count - 2; i >= first; --i) prod = prod * f[2 + i];

  // Factorize in multiplication order, i.e. reversed slot order.
  std::vector<UnipotentPattern> mult_order(new_patterns.rbegin(), new_patterns.rend());
  auto fs = lie::direct_span_factorize_jet(prod, mult_order);

  std::vector<UnipotentPattern> pats;
  std::vector<JMat> out;
  out.push_back(f[0]);
  out.push_back(f[1]);
  for (int i = 0; i < first; ++i) {
    out.push_back(f[2 + i]);
    pats.push_back(sp.patterns()[i]);
  }
  const int k = static_cast<int>(new_patterns.size());
  for (int j = 0; j < k; ++j) {
    out.push_back(fs[k - 1 - j]);  // slot order back from multiplication order
    pats.push_back(new_patterns[j]);
  }
  for (int i = first + count; i < m; ++i) {
    out.push_back(f[2 + i]);
    pats.push_back(sp.patterns()[i]);
  }
  auto target = std::make_shared<ChainSpace>(sp.n(), sp.g_levi(), sp.h_levi(), pats,
                                             sp.name());
  return detail::assemble(std::move(target), out);
}

}  // namespace wildcat::morph
