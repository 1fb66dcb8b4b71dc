#pragma once

// Dimension bookkeeping for moment-map fibers over prescribed classes: the
// closed-form count from the curve data, and an honest numeric count at a
// sampled point via ranks of the constraint derivative and the orbit map.

#include "wildcat/wild/representation.hpp"

namespace wildcat::wild {

// Orbit dimension of the class inside the block group H: semisimple part
// with the given eigenvalue layout, optionally thickened by a regular
// unipotent inside each equal-eigenvalue run.
inline int class_dim(const IrregularType& q, const ClassSpec& spec, double tol = 1e-9) {
  const int n = q.n;
  auto levi = irr::centralizer(q);
  int dim_h = lie::partition_dim(levi);
  int stab = 0;
  for (const auto& part : levi) {
    // Equal-eigenvalue runs within this block.
    std::vector<std::pair<Cx, int>> runs;
    for (int i : part) {
      bool found = false;
      for (auto& r : runs)
        if (std::abs(r.first - spec.eigenvalues[i]) <= tol) {
          ++r.second;
          found = true;
          break;
        }
      if (!found) runs.push_back({spec.eigenvalues[i], 1});
    }
    for (const auto& r : runs) stab += spec.regular_unipotent ? r.second : r.second * r.second;
  }
  return dim_h - stab;
}

// Closed-form dimension of the fiber-over-classes quotient:
//   reduced chart dim + sum of class dims - 2 (sum dim H_i - dim center).
inline int expected_dim(const IrregularCurve& curve, const ClassList& classes) {
  validate(curve);
  validate_classes(curve, classes);
  int d = reduced_dim_formula(curve);
  int dim_symmetry = 0;
  for (size_t i = 0; i < curve.types.size(); ++i) {
    if (!classes[i]) throw std::invalid_argument("expected_dim: every point needs a class");
    d += class_dim(curve.types[i], *classes[i]);
    dim_symmetry += lie::partition_dim(irr::centralizer(curve.types[i]));
  }
  return d - 2 * (dim_symmetry - 1);
}

struct NumericDimReport {
  int chart_dim = 0;
  int constraint_rank = 0;  // relation derivative stacked with class-transverse rows
  int orbit_rank = 0;       // span of the fundamental fields
  int full_orbit_rank = 0;  // dim of the acting group minus its scalar center
  int measured = 0;
  bool orbit_deficient = false;
};

namespace detail {

inline Vec flatten_tangent(const Tangent& t) {
  int total = 0;
  for (const auto& m : t.xi) total += static_cast<int>(m.size());
  Vec out(total);
  int at = 0;
  for (const auto& m : t.xi) {
    out.segment(at, m.size()) = vec_of(m);
    at += static_cast<int>(m.size());
  }
  return out;
}

// Orthonormal column basis of the conjugation-orbit directions through mu,
// left-trivialized: span of mu^{-1} X mu - X over the block Lie algebra.
inline Mat orbit_projector(const Mat& mu, const Partition& levi, double rel_tol = 1e-9) {
  const int n = static_cast<int>(mu.rows());
  auto pairs = qh::detail::levi_pairs(levi, n);
  Mat cols(n * n, pairs.size());
  Mat mui = mu.inverse();
  for (size_t a = 0; a < pairs.size(); ++a) {
    Mat e = Mat::Zero(n, n);
    e(pairs[a].first, pairs[a].second) = 1.0;
    cols.col(a) = vec_of(Mat(mui * e * mu - e));
  }
  Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
  RVec s = svd.singularValues();
  // Absolute threshold against the operator bound of X -> mu^{-1} X mu - X:
  // when mu is central or H is a torus every column is a pure rounding
  // residue, and a top-relative cutoff would hallucinate orbit directions.
  double scale = 1.0 + mu.norm() * mui.norm();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * scale) ++rank;
  Mat basis = svd.matrixU().leftCols(rank);
  return Mat(eye(n * n) - basis * basis.adjoint());
}

}  // namespace detail

// Rank count at a point satisfying the relation: chart dimension minus the
// rank of [relation derivative; class-transverse moment rows] minus the
// orbit rank. The orbit-deficiency flag marks points whose stabilizer
// exceeds the scalar center, where the quotient count is not meaningful.
inline NumericDimReport numeric_dim_check(const IrregularCurve& curve, const StokesRep& rep,
                                          double rel_tol = 1e-9) {
  auto cs = build_space(curve);
  Point p = to_point(cs, rep);
  if (!cs.space->contains(p, 1e-6))
    throw std::invalid_argument("numeric_dim_check: point not in the space");
  const int n = curve.n();
  const auto& slots = cs.space->slots();
  const int m = curve.marked_count();

  Chart chart(*cs.space, p);
  NumericDimReport out;
  out.chart_dim = chart.dim();
  Vec x0 = Vec::Zero(chart.dim());

  std::vector<Mat> projectors;  // onto the class-transverse directions per point
  auto mu = cs.space->moment(p);
  for (int k = 0; k < m; ++k)
    projectors.push_back(detail::orbit_projector(mu[k + 1], slots[k + 1].levi, rel_tol));

  Mat constraints(n * n * (1 + m), chart.dim());
  for (int a = 0; a < chart.dim(); ++a) {
    Tangent u = chart.frame(x0, a);
    auto th = cs.space->moment_mc(p, u);
    constraints.block(0, a, n * n, 1) = vec_of(th[0]);
    for (int k = 0; k < m; ++k)
      constraints.block(n * n * (1 + k), a, n * n, 1) = projectors[k] * vec_of(th[k + 1]);
  }
  out.constraint_rank = numeric_rank(constraints, rel_tol);

  int lie_dim = 0;
  for (const auto& s : slots) lie_dim += s.dim();
  const int flat_rows = static_cast<int>(detail::flatten_tangent(qh::zero_tangent_like(p)).size());
  Mat orbit(flat_rows, lie_dim);
  int col = 0;
  for (size_t k = 0; k < slots.size(); ++k) {
    auto pairs = qh::detail::levi_pairs(slots[k].levi, slots[k].n);
    for (const auto& pr : pairs) {
      LieTuple x;
      for (const auto& s : slots) x.push_back(Mat::Zero(s.n, s.n));
      x[k](pr.first, pr.second) = 1.0;
      orbit.col(col++) = detail::flatten_tangent(cs.space->fundamental(p, x));
    }
  }
  out.orbit_rank = numeric_rank(orbit, rel_tol);
  out.full_orbit_rank = lie_dim - 1;
  out.orbit_deficient = out.orbit_rank < out.full_orbit_rank;
  out.measured = out.chart_dim - out.constraint_rank - out.orbit_rank;
  return out;
}

}  // namespace wildcat::wild
