#pragma once

// Points of the global space attached to a curve with marked points: handle
// pairs for the genus part and, per marked point, a connector, a formal
// monodromy and the ordered Stokes multipliers. The defining relation
// multiplies commutators of the handles against the per-point clockwise
// monodromies. build_space assembles the same data as one fused
// quasi-Hamiltonian space, so the structural verifier and the numeric
// dimension counts run on the genuine global object.

#include "wildcat/wild/curve.hpp"

namespace wildcat::wild {

using qh::Chart;
using qh::GroupTuple;
using qh::LieTuple;
using qh::Point;
using qh::Space;
using qh::SpacePtr;
using qh::Tangent;

struct PointMonodromy {
  Mat C;               // connector; the first one is pinned to 1
  Mat h;               // formal monodromy, block-diagonal in H_i
  std::vector<Mat> S;  // Stokes multipliers, one per singular direction
};

struct StokesRep {
  int n = 0;
  std::vector<Mat> handles;  // a_1, b_1, a_2, b_2, ...
  std::vector<PointMonodromy> points;

  int genus() const { return static_cast<int>(handles.size()) / 2; }
};

// h S_s ... S_1 read off the directions in cut order.
inline Mat interior_monodromy(const PointMonodromy& p) {
  Mat b = p.h;
  for (int i = static_cast<int>(p.S.size()) - 1; i >= 0; --i) b = b * p.S[i];
  return b;
}

inline Mat point_monodromy(const PointMonodromy& p) {
  return p.C.inverse() * interior_monodromy(p) * p.C;
}

inline Mat relation_lhs(const StokesRep& rep) {
  Mat m = eye(rep.n);
  for (int k = 0; k < rep.genus(); ++k) {
    const Mat& a = rep.handles[2 * k];
    const Mat& b = rep.handles[2 * k + 1];
    m = m * a * b * a.inverse() * b.inverse();
  }
  for (const auto& p : rep.points) m = m * point_monodromy(p);
  return m;
}

inline double check_relation(const StokesRep& rep) {
  return (relation_lhs(rep) - eye(rep.n)).cwiseAbs().maxCoeff();
}

// Residual action after pinning the first connector: k_i per marked point,
// with k_1 conjugating the handles and the first point's interior data.
inline StokesRep act_on_rep(const StokesRep& rep, const std::vector<Mat>& ks) {
  if (ks.size() != rep.points.size())
    throw std::invalid_argument("act_on_rep: one group element per marked point");
  StokesRep out = rep;
  Mat k1i = ks[0].inverse();
  for (auto& hnd : out.handles) hnd = ks[0] * hnd * k1i;
  for (size_t i = 0; i < out.points.size(); ++i) {
    Mat ki = ks[i].inverse();
    out.points[i].C = ks[i] * rep.points[i].C * k1i;
    out.points[i].h = ks[i] * rep.points[i].h * ki;
    for (auto& s : out.points[i].S) s = ks[i] * s * ki;
  }
  return out;
}

// ---- the global space -------------------------------------------------------

// The product of one fused double per handle and one marked-point space per
// puncture, with all group slots fused left to right. Slot 0 carries the
// relation product; slots 1..m are the per-point stabilizer groups.
struct CurveSpace {
  SpacePtr space;
  std::vector<std::shared_ptr<qh::ChainSpace>> point_spaces;
  std::vector<irr::StokesStructure> structures;
  int genus = 0;

  // Chart dimension of the reduced space: kill the relation (dim G) and the
  // pinned connector (dim G).
  int reduced_dim() const {
    int n = point_spaces.empty() ? 0 : point_spaces[0]->n();
    return space->tangent_dim() - 2 * n * n;
  }
};

inline CurveSpace build_space(const IrregularCurve& curve) {
  validate(curve);
  CurveSpace out;
  out.genus = curve.genus;
  const int g = curve.genus;
  const int m = curve.marked_count();
  std::vector<SpacePtr> children;
  for (int k = 0; k < g; ++k)
    children.push_back(std::make_shared<qh::FusedDoubleSpace>(
        curve.n(), "handle(" + std::to_string(k) + ")"));
  for (int i = 0; i < m; ++i) {
    out.structures.push_back(structure_at(curve, i));
    out.point_spaces.push_back(
        qh::make_stokes_space(out.structures.back(), "point(" + std::to_string(i) + ")"));
    children.push_back(out.point_spaces.back());
  }
  SpacePtr sp = qh::product(std::move(children));
  // Group-slot indices in the flat product: handles first, then every
  // marked-point space contributes (G, H_i).
  std::vector<int> gs;
  for (int k = 0; k < g; ++k) gs.push_back(k);
  for (int i = 0; i < m; ++i) gs.push_back(g + 2 * i);
  while (gs.size() > 1) {
    sp = qh::fuse(sp, gs[0], gs[1]);
    int dropped = gs[1];
    gs.erase(gs.begin() + 1);
    for (auto& v : gs)
      if (v > dropped) --v;
  }
  out.space = sp;
  return out;
}

// Formula count for the reduced chart dimension: (2g-2) dim G plus the
// dimension of each marked-point space.
inline int reduced_dim_formula(const IrregularCurve& curve) {
  int n = curve.n();
  int d = (2 * curve.genus - 2) * n * n;
  for (const auto& q : curve.types) d += qh::expected_stokes_dim(q);
  return d;
}

inline Point to_point(const CurveSpace& cs, const StokesRep& rep) {
  Point p;
  for (const auto& hnd : rep.handles) p.f.push_back(hnd);
  for (const auto& pt : rep.points) {
    p.f.push_back(pt.C);
    p.f.push_back(pt.h);
    for (const auto& s : pt.S) p.f.push_back(s);
  }
  return p;
}

inline StokesRep from_point(const CurveSpace& cs, const Point& p) {
  StokesRep rep;
  rep.n = cs.point_spaces.empty() ? 0 : cs.point_spaces[0]->n();
  size_t at = 0;
  for (int k = 0; k < 2 * cs.genus; ++k) rep.handles.push_back(p.f[at++]);
  for (const auto& ps : cs.point_spaces) {
    PointMonodromy pt;
    pt.C = p.f[at++];
    pt.h = p.f[at++];
    for (int j = 0; j < ps->unipotent_count(); ++j) pt.S.push_back(p.f[at++]);
    rep.points.push_back(std::move(pt));
  }
  if (at != p.f.size()) throw std::logic_error("from_point: factor count mismatch");
  return rep;
}

}  // namespace wildcat::wild
