#pragma once

// Numerical verification of the structural axioms of a group-valued
// moment-map space:
//   V1  d omega = pullback of the canonical closed bi-invariant three-form
//       (with its 1/6 weight) under the moment map;
//   V2  omega(v_X, .) = (1/2) (mu^*(theta + theta-bar), X);
//   V3  ker omega_p intersect ker d mu_p = {0}, and ker omega_p is spanned
//       by the fundamental fields of the anti-fixed directions
//       { X : Ad_{mu(p)} X = -X }.
// V2, V3 and the equivariance checks are exact up to roundoff; V1 needs one
// numerical exterior derivative, done by central differences in an affine
// chart with exact closed-form frames.

#include <json.hpp>

#include "wildcat/qh/space.hpp"

namespace wildcat::qh {

// Global calibration between the exterior derivative of the two-form and the
// pulled-back three-form. The conventions in this library need no correction,
// so the factor is exactly one; it is kept explicit (and reported) so any
// alternative convention shows up as a single number rather than scattered
// signs.
inline constexpr double kThreeFormScale = 1.0;

struct Qh1Report {
  double residual = 0.0;  // best |LHS - RHS| over sampled triples and steps
  double step = 0.0;      // step size achieving it
  double at_base_step = 0.0;
};

struct Qh2Report {
  double residual = 0.0;
};

struct Qh3Report {
  bool full_rank = false;    // stacked [omega; d mu] has full column rank
  double rank_gap = 0.0;     // smallest/largest singular value of the stack
  int kernel_dim = 0;        // dim ker omega
  int antifixed_dim = 0;     // dim span of fundamental fields of anti-fixed X
  double span_residual = 0.0;  // mutual containment defect of the two spans
};

struct EquivarianceReport {
  double moment = 0.0;   // mu(g p) vs g mu(p) g^{-1}
  double omega = 0.0;    // omega invariance under push
  double flow = 0.0;     // v_X vs minus the action flow derivative
};

struct SpaceReport {
  std::string space;
  std::uint64_t seed = 0;
  int dim = 0;
  Qh1Report qh1;
  Qh2Report qh2;
  Qh3Report qh3;
  EquivarianceReport equivariance;

  bool pass(double tol1 = 1e-5, double tol2 = 1e-10, double tol_eq = 1e-9) const {
    return qh1.residual <= tol1 && qh2.residual <= tol2 && qh3.full_rank &&
           qh3.span_residual <= 1e-6 && equivariance.moment <= tol_eq &&
           equivariance.omega <= tol_eq && equivariance.flow <= 1e-6;
  }

  nlohmann::json to_json() const {
    return {
        {"space", space},
        {"point_seed", seed},
        {"dim", dim},
        {"three_form_scale", kThreeFormScale},
        {"qh1", {{"residual", qh1.residual}, {"step", qh1.step}}},
        {"qh2", {{"residual", qh2.residual}}},
        {"qh3",
         {{"full_rank", qh3.full_rank},
          {"rank_gap", qh3.rank_gap},
          {"kernel_dim", qh3.kernel_dim},
          {"antifixed_dim", qh3.antifixed_dim},
          {"span_residual", qh3.span_residual}}},
        {"equivariance",
         {{"moment", equivariance.moment},
          {"omega", equivariance.omega},
          {"flow", equivariance.flow}}},
    };
  }
};

namespace detail {

// (theta^3)(u, v, w) with the no-factorial wedge weight: half the signed sum
// over all permutations of (theta(u1), [theta(u2), theta(u3)]).
inline Cx theta_cubed(const Mat& a, const Mat& b, const Mat& c) {
  auto term = [](const Mat& x, const Mat& y, const Mat& z) {
    return lie::trace_form(x, y * z - z * y);
  };
  return 0.5 * (term(a, b, c) - term(a, c, b) + term(b, c, a) - term(b, a, c) +
                term(c, a, b) - term(c, b, a));
}

inline int flat_dim(const Point& p) {
  int d = 0;
  for (const auto& m : p.f) d += static_cast<int>(m.size());
  return d;
}

inline Vec flatten(const Tangent& t) {
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

}  // namespace detail

// V1 at a random base point. Samples `triples` random direction triples in
// the chart; the exterior derivative uses central differences at `step`,
// then `halvings` halved steps, keeping the best residual.
inline Qh1Report check_qh1(const Space& sp, const Point& base, Rng& rng, int triples = 4,
                           double step = 1e-4, int halvings = 2) {
  Chart chart(sp, base);
  const int d = chart.dim();
  Qh1Report rep;
  rep.step = step;
  for (int t = 0; t < triples; ++t) {
    std::vector<Vec> c(3);
    for (auto& v : c) {
      v = Vec(d);
      for (int i = 0; i < d; ++i) v(i) = rng.disk(1.0);
    }
    // RHS: sum over slots of (theta_k^3)/6 on the moment images.
    Vec x0 = Vec::Zero(d);
    Point p = chart.at(x0);
    std::vector<Tangent> dirs;
    for (int i = 0; i < 3; ++i) dirs.push_back(chart.tangent(x0, c[i]));
    Cx rhs = 0.0;
    {
      std::vector<std::vector<Mat>> th;
      for (int i = 0; i < 3; ++i) th.push_back(sp.moment_mc(p, dirs[i]));
      for (size_t k = 0; k < sp.slots().size(); ++k)
        rhs += detail::theta_cubed(th[0][k], th[1][k], th[2][k]) / 6.0;
      rhs *= kThreeFormScale;
    }
    // LHS: d omega on the three commuting coordinate-combination fields.
    double h = step;
    double best = -1.0, best_h = step, base_res = -1.0;
    for (int hv = 0; hv <= halvings; ++hv, h *= 0.5) {
      auto omega_at = [&](const Vec& x, int skip) {
        int a = skip == 0 ? 1 : 0;
        int b = skip == 2 ? 1 : 2;
        return sp.omega(chart.at(x), chart.tangent(x, c[a]), chart.tangent(x, c[b]));
      };
      Cx lhs = 0.0;
      for (int i = 0; i < 3; ++i) {
        Cx plus = omega_at(x0 + h * c[i], i);
        Cx minus = omega_at(x0 - h * c[i], i);
        Cx deriv = (plus - minus) / (2.0 * h);
        lhs += (i == 1 ? -1.0 : 1.0) * deriv;
      }
      double res = std::abs(lhs - rhs);
      if (hv == 0) base_res = res;
      if (best < 0 || res < best) {
        best = res;
        best_h = h;
      }
    }
    if (best > rep.residual) {
      rep.residual = best;
      rep.step = best_h;
    }
    rep.at_base_step = std::max(rep.at_base_step, base_res);
  }
  return rep;
}

inline Qh2Report check_qh2(const Space& sp, const Point& p, Rng& rng, int samples = 6) {
  Qh2Report rep;
  auto mu = sp.moment(p);
  for (int s = 0; s < samples; ++s) {
    LieTuple x = sp.random_lie(rng);
    Tangent vx = sp.fundamental(p, x);
    Tangent u = sp.random_tangent(rng, p);
    auto th = sp.moment_mc(p, u);
    Cx rhs = 0.0;
    for (size_t k = 0; k < th.size(); ++k) {
      Mat theta_bar = mu[k] * th[k] * mu[k].inverse();
      rhs += 0.5 * lie::trace_form(th[k] + theta_bar, x[k]);
    }
    Cx lhs = sp.omega(p, vx, u);
    rep.residual = std::max(rep.residual, std::abs(lhs - rhs));
  }
  return rep;
}

inline Qh3Report check_qh3(const Space& sp, const Point& p) {
  Qh3Report rep;
  Chart chart(sp, p);
  const int d = chart.dim();
  Vec x0 = Vec::Zero(d);
  std::vector<Tangent> frame;
  for (int a = 0; a < d; ++a) frame.push_back(chart.frame(x0, a));

  Mat omega_mat(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      omega_mat(a, b) = a == b ? Cx(0) : sp.omega(p, frame[a], frame[b]);

  int mu_rows = 0;
  for (const auto& s : sp.slots()) mu_rows += s.n * s.n;
  Mat dmu(mu_rows, d);
  for (int a = 0; a < d; ++a) {
    auto th = sp.moment_mc(p, frame[a]);
    int at = 0;
    for (const auto& m : th) {
      dmu.col(a).segment(at, m.size()) = vec_of(m);
      at += static_cast<int>(m.size());
    }
  }

  Mat stacked(d + mu_rows, d);
  stacked.topRows(d) = omega_mat;
  stacked.bottomRows(mu_rows) = dmu;
  auto sv = singular_values(stacked);
  rep.rank_gap = sv(sv.size() - 1) / std::max(sv(0), 1e-300);
  rep.full_rank = numeric_rank(stacked) == d;

  // Kernel of omega in frame coordinates.
  Mat ker = kernel_basis(omega_mat);
  rep.kernel_dim = static_cast<int>(ker.cols());

  // Anti-fixed directions per slot: (Ad_{mu_k} + 1) X_k = 0 on the slot's
  // block support; their fundamental fields must span ker omega exactly.
  auto mu = sp.moment(p);
  std::vector<std::vector<Mat>> slot_kernels;
  for (size_t k = 0; k < sp.slots().size(); ++k) {
    const auto& s = sp.slots()[k];
    auto pairs = detail::levi_pairs(s.levi, s.n);
    Mat op(s.n * s.n, pairs.size());
    Mat mi = mu[k].inverse();
    for (size_t a = 0; a < pairs.size(); ++a) {
      Mat e = Mat::Zero(s.n, s.n);
      e(pairs[a].first, pairs[a].second) = 1.0;
      op.col(a) = vec_of(mu[k] * e * mi + e);
    }
    Mat kb = kernel_basis(op);
    std::vector<Mat> xs;
    for (int c = 0; c < kb.cols(); ++c) {
      Mat x = Mat::Zero(s.n, s.n);
      for (size_t a = 0; a < pairs.size(); ++a)
        x(pairs[a].first, pairs[a].second) = kb(a, c);
      xs.push_back(x);
    }
    slot_kernels.push_back(std::move(xs));
  }

  // Fundamental fields of a basis of the anti-fixed set (zero in all other
  // slots), expressed in frame coordinates.
  Mat frame_flat(detail::flat_dim(p), d);
  for (int a = 0; a < d; ++a) frame_flat.col(a) = detail::flatten(frame[a]);
  std::vector<Vec> anti_coords;
  double lift_defect = 0.0;
  for (size_t k = 0; k < slot_kernels.size(); ++k) {
    for (const auto& x : slot_kernels[k]) {
      LieTuple tup;
      for (size_t j = 0; j < sp.slots().size(); ++j)
        tup.push_back(j == k ? x : Mat::Zero(sp.slots()[j].n, sp.slots()[j].n));
      Vec flat = detail::flatten(sp.fundamental(p, tup));
      Vec coef = pinv_solve(frame_flat, flat);
      lift_defect = std::max(lift_defect, (frame_flat * coef - flat).norm());
      anti_coords.push_back(coef);
    }
  }
  Mat anti(d, anti_coords.size());
  for (size_t c = 0; c < anti_coords.size(); ++c) anti.col(c) = anti_coords[c];
  rep.antifixed_dim = anti_coords.empty() ? 0 : numeric_rank(anti);

  // Span comparison: every anti-fixed field is in ker omega and vice versa.
  double defect = lift_defect;
  for (int c = 0; c < anti.cols(); ++c) {
    double nrm = anti.col(c).norm();
    if (nrm < 1e-12) continue;  // X acts trivially at p
    defect = std::max(defect, (omega_mat * anti.col(c)).norm() / nrm);
  }
  if (rep.kernel_dim > 0) {
    if (anti.cols() == 0) {
      defect = std::max(defect, 1.0);
    } else {
      for (int c = 0; c < ker.cols(); ++c) {
        Vec coef = pinv_solve(anti, ker.col(c));
        defect = std::max(defect, (anti * coef - ker.col(c)).norm());
      }
    }
  }
  rep.span_residual = defect;
  return rep;
}

inline EquivarianceReport check_equivariance(const Space& sp, const Point& p, Rng& rng) {
  EquivarianceReport rep;
  GroupTuple g = sp.random_group(rng);
  Point q = sp.act(p, g);
  auto mu_p = sp.moment(p);
  auto mu_q = sp.moment(q);
  for (size_t k = 0; k < mu_p.size(); ++k)
    rep.moment = std::max(rep.moment, dist(mu_q[k], g[k] * mu_p[k] * g[k].inverse()));

  Tangent u = sp.random_tangent(rng, p);
  Tangent v = sp.random_tangent(rng, p);
  Cx before = sp.omega(p, u, v);
  Cx after = sp.omega(q, sp.push(p, g, u), sp.push(p, g, v));
  rep.omega = std::abs(after - before);

  // Fundamental field against the flow: v_X is minus d/dt act(exp(tX)) at 0.
  LieTuple x = sp.random_lie(rng);
  Tangent vx = sp.fundamental(p, x);
  const double h = 1e-6;
  GroupTuple plus, minus;
  for (size_t k = 0; k < x.size(); ++k) {
    Mat e = (h * x[k]).exp();
    plus.push_back(e.inverse());
    minus.push_back(e);
  }
  Point pp = sp.act(p, plus);
  Point pm = sp.act(p, minus);
  for (size_t i = 0; i < p.f.size(); ++i) {
    Mat delta = (pp.f[i] - pm.f[i]) / (2.0 * h);
    Mat xi = sp.factors()[i].kind == FactorKind::Rect ? delta : Mat(p.f[i].inverse() * delta);
    rep.flow = std::max(rep.flow, dist(xi, vx.xi[i]));
  }
  return rep;
}

inline SpaceReport verify_space(const Space& sp, std::uint64_t seed, int qh1_triples = 4) {
  Rng rng(seed);
  Point p = sp.random_point(rng);
  SpaceReport rep;
  rep.space = sp.name();
  rep.seed = seed;
  rep.dim = sp.tangent_dim();
  rep.qh1 = check_qh1(sp, p, rng, qh1_triples);
  rep.qh2 = check_qh2(sp, p, rng);
  rep.qh3 = check_qh3(sp, p);
  rep.equivariance = check_equivariance(sp, p, rng);
  return rep;
}

}  // namespace wildcat::qh
