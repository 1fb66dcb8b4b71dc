#pragma once

// Seeded sampling of relation solutions with prescribed classes. Everything
// is drawn at random except one designated repair slot solved from the
// relation:
//   - a usable class-free point absorbs the full deficit exactly;
//   - with handles present, the last pair is solved from the commutator
//     equation through the eigenbasis of the target (cyclic permutation
//     against a diagonal, available exactly when the determinant matches);
//   - with genus zero and every class prescribed, rank-two configurations
//     are repaired through one affine trace parameter in a Stokes product
//     plus a conjugation adjustment (or, all points tame, a rank-one
//     projector deformation of the next-to-last class).
// Degenerate draws are rejected and retried; genuinely obstructed inputs
// fail with the obstruction in the message.

#include "wildcat/wild/representation.hpp"

namespace wildcat::wild {

struct SampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct RetryDraw {
  std::string why;
};

inline Mat class_representative(const IrregularType& q, const ClassSpec& spec,
                                double tol = 1e-9) {
  const int n = q.n;
  Mat t = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = spec.eigenvalues[i];
  Mat u = eye(n);
  if (spec.regular_unipotent) {
    for (const auto& part : irr::centralizer(q)) {
      // Chain the equal-eigenvalue runs inside this block.
      std::vector<std::vector<int>> runs;
      for (int i : part) {
        bool found = false;
        for (auto& r : runs)
          if (std::abs(spec.eigenvalues[r.front()] - spec.eigenvalues[i]) <= tol) {
            r.push_back(i);
            found = true;
            break;
          }
        if (!found) runs.push_back({i});
      }
      for (const auto& r : runs)
        for (size_t a = 0; a + 1 < r.size(); ++a) u(r[a], r[a + 1]) = 1.0;
    }
  }
  return t * u;
}

inline Mat random_class_element(Rng& rng, const IrregularType& q, const ClassSpec& spec) {
  Mat rep = class_representative(q, spec);
  Mat k = lie::rand_levi(rng, irr::centralizer(q), q.n, 0.5);
  return k * rep * k.inverse();
}

struct EigenSplit {
  Vec values;
  Mat vectors;
};

inline EigenSplit sorted_eigs(const Mat& m, double min_gap) {
  Eigen::ComplexEigenSolver<Mat> eig(m);
  if (eig.info() != Eigen::Success) throw RetryDraw{"eigensolver failed"};
  const int n = static_cast<int>(m.rows());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    Cx x = eig.eigenvalues()(a), y = eig.eigenvalues()(b);
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  EigenSplit out;
  out.values = Vec(n);
  out.vectors = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = eig.eigenvalues()(idx[i]);
    out.vectors.col(i) = eig.eigenvectors().col(idx[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(out.values(i) - out.values(j)) < min_gap)
        throw RetryDraw{"nearly repeated eigenvalues"};
  return out;
}

// C with C^{-1} B C = W, both sides diagonalizable with matching spectra.
inline Mat conjugator_to(const Mat& B, const Mat& W, double min_gap = 1e-8) {
  auto eb = sorted_eigs(B, min_gap);
  auto ew = sorted_eigs(W, min_gap);
  double scale = eb.values.cwiseAbs().maxCoeff() + 1.0;
  if ((eb.values - ew.values).cwiseAbs().maxCoeff() > 1e-6 * scale)
    throw RetryDraw{"spectra do not match"};
  return eb.vectors * ew.vectors.inverse();
}

// (a, b) with a b a^{-1} b^{-1} = M. In the eigenbasis of M take a cyclic
// permutation against a diagonal: the commutator of the two is the diagonal
// of consecutive ratios, solvable exactly when det M = 1.
inline std::pair<Mat, Mat> solve_commutator(const Mat& M, double det_tol = 1e-8) {
  const int n = static_cast<int>(M.rows());
  if (std::abs(M.determinant() - 1.0) > det_tol)
    throw SampleError(
        "no sample found: determinant obstruction, the relation forces the product of all "
        "prescribed eigenvalues to be 1");
  if ((M - eye(n)).cwiseAbs().maxCoeff() < 1e-14) return {eye(n), eye(n)};
  {
    // Scalar target: cyclic permutation against powers of the scalar.
    Cx z = M(0, 0);
    if ((M - z * eye(n)).cwiseAbs().maxCoeff() < 1e-12) {
      Mat perm = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) perm((i + 1) % n, i) = 1.0;
      Mat diag = Mat::Zero(n, n);
      Cx p = 1.0;
      for (int i = 0; i < n; ++i, p /= z) diag(i, i) = p;
      return {perm, diag};
    }
  }
  auto em = sorted_eigs(M, 1e-8);
  Mat perm = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) perm((i + 1) % n, i) = 1.0;
  Vec beta(n);
  beta(0) = 1.0;
  for (int j = 1; j < n; ++j) beta(j) = beta(j - 1) / em.values(j);
  Mat diag = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) diag(i, i) = beta(i);
  Mat v = em.vectors;
  Mat vi = v.inverse();
  return {v * perm * vi, v * diag * vi};
}

}  // namespace detail

// One seeded attempt-and-retry sampler. `classes` may leave points free.
inline StokesRep sample_point(const IrregularCurve& curve, const ClassList& classes,
                              std::uint64_t seed, int max_retries = 100,
                              double tol = 1e-10) {
  using detail::RetryDraw;
  validate(curve);
  validate_classes(curve, classes);
  const int n = curve.n();
  const int m = curve.marked_count();
  const int g = curve.genus;
  Rng rng(seed);

  std::vector<irr::StokesStructure> sts;
  std::vector<Partition> levis;
  std::vector<bool> tame;  // no singular directions at all
  for (int i = 0; i < m; ++i) {
    sts.push_back(structure_at(curve, i));
    levis.push_back(irr::centralizer(curve.types[i]));
    tame.push_back(sts.back().dirs.empty());
  }

  // Pick the repair strategy once; it only depends on the configuration. A
  // free point can absorb the deficit if it is tame (its monodromy ranges
  // over all of G) or if its connector is not the pinned one.
  int free_q = -1;
  for (int i = m - 1; i >= 0; --i)
    if (!classes[i] && (tame[i] || i >= 1 || (m == 1 && g == 0))) {
      free_q = i;
      break;
    }
  bool all_prescribed = true;
  for (const auto& c : classes)
    if (!c) all_prescribed = false;

  if (all_prescribed) {
    Cx total = 1.0;
    for (const auto& c : classes)
      for (const auto& e : c->eigenvalues) total *= e;
    if (std::abs(total - 1.0) > 1e-8)
      throw SampleError(
          "no sample found: determinant obstruction, the product of all prescribed "
          "eigenvalues is " +
          std::to_string(std::abs(total)) + " away from closing the relation");
  }

  std::string last_why = "no attempt";
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    try {
      StokesRep rep;
      rep.n = n;
      for (int k = 0; k < 2 * g; ++k) rep.handles.push_back(rng.near_identity(n, 0.5));
      for (int i = 0; i < m; ++i) {
        PointMonodromy pt;
        pt.C = (i == 0) ? eye(n) : rng.near_identity(n, 0.6);
        pt.h = classes[i] ? detail::random_class_element(rng, curve.types[i], *classes[i])
                          : lie::rand_levi(rng, levis[i], n, 0.5);
        for (const auto& d : sts[i].dirs)
          pt.S.push_back(lie::rand_unipotent(rng, d.pattern(n), 0.6));
        rep.points.push_back(std::move(pt));
      }

      auto commutator_product = [&]() {
        Mat l = eye(n);
        for (int k = 0; k < g; ++k) {
          const Mat& a = rep.handles[2 * k];
          const Mat& b = rep.handles[2 * k + 1];
          l = l * a * b * a.inverse() * b.inverse();
        }
        return l;
      };
      auto monodromy_product = [&](int first, int last) {  // mu_first ... mu_last
        Mat p = eye(n);
        for (int i = first; i <= last; ++i) p = p * point_monodromy(rep.points[i]);
        return p;
      };

      if (free_q >= 0) {
        // Absorb the deficit at the free point.
        Mat prefix = commutator_product() * monodromy_product(0, free_q - 1);
        Mat suffix = monodromy_product(free_q + 1, m - 1);
        Mat w = prefix.inverse() * suffix.inverse();
        auto& pt = rep.points[free_q];
        if (tame[free_q]) {
          pt.h = pt.C * w * pt.C.inverse();
        } else if (free_q == 0) {
          // Only reachable with m = 1 and no handles, where w = 1 exactly.
          if ((w - eye(n)).cwiseAbs().maxCoeff() > 1e-12)
            throw RetryDraw{"pinned connector cannot absorb a nontrivial deficit"};
          pt.h = eye(n);
          for (auto& s : pt.S) s = eye(n);
        } else {
          auto ew = detail::sorted_eigs(w, 1e-8);
          pt.h = Mat::Zero(n, n);
          for (int i = 0; i < n; ++i) pt.h(i, i) = ew.values(i);
          for (auto& s : pt.S) s = eye(n);
          pt.C = ew.vectors.inverse();
        }
      } else if (g >= 1) {
        // Solve the last handle pair from the commutator equation. If some
        // class is free, first rescale one free formal monodromy so the
        // target lands in the determinant-one locus.
        Mat r = monodromy_product(0, m - 1);
        int fj = -1;
        for (int i = 0; i < m; ++i)
          if (!classes[i]) fj = i;
        if (fj >= 0) {
          Cx c = std::exp(-std::log(r.determinant()) / static_cast<double>(n));
          rep.points[fj].h *= c;
          r = monodromy_product(0, m - 1);
        }
        Mat l = eye(n);
        for (int k = 0; k < g - 1; ++k) {
          const Mat& a = rep.handles[2 * k];
          const Mat& b = rep.handles[2 * k + 1];
          l = l * a * b * a.inverse() * b.inverse();
        }
        auto [a, b] = detail::solve_commutator(l.inverse() * r.inverse());
        rep.handles[2 * g - 2] = a;
        rep.handles[2 * g - 1] = b;
      } else if (m == 1) {
        // mu_1 = 1 with the connector pinned: only the trivial class works.
        auto& pt = rep.points[0];
        Mat target = detail::class_representative(curve.types[0], *classes[0]);
        if ((target - eye(n)).cwiseAbs().maxCoeff() > 1e-9)
          throw SampleError(
              "no sample found: a single marked point with pinned connector forces the "
              "trivial class");
        pt.h = eye(n);
        for (auto& s : pt.S) s = eye(n);
      } else if (m == 2 && tame[0] && tame[1]) {
        // Two tame points: mu_2 = mu_1^{-1}, so the classes must be mutually
        // inverse; when they are, the second point absorbs the first exactly.
        std::vector<bool> used(n, false);
        for (const auto& lam : classes[0]->eigenvalues) {
          bool hit = false;
          for (int i = 0; i < n; ++i)
            if (!used[i] && std::abs(classes[1]->eigenvalues[i] - 1.0 / lam) <= 1e-8) {
              used[i] = true;
              hit = true;
              break;
            }
          if (!hit)
            throw SampleError(
                "no sample found: two tame marked points force mutually inverse classes");
        }
        Mat w = point_monodromy(rep.points[0]).inverse();
        auto& pt = rep.points[1];
        pt.h = pt.C * w * pt.C.inverse();
      } else if (n == 2) {
        // Rank-two repair with every class prescribed.
        int q = -1;
        for (int i = 0; i < m; ++i)
          if (sts[i].dirs.size() >= 2) {
            q = i;
            break;
          }
        auto solve_conjugation_point = [&](int r, const Mat& w) {
          auto& pt = rep.points[r];
          if (tame[r]) {
            pt.h = pt.C * w * pt.C.inverse();
          } else {
            pt.C = detail::conjugator_to(interior_monodromy(pt), w);
          }
        };
        if (q >= 0) {
          int r = -1;  // conjugation point: tame anywhere, irregular needs a free connector
          for (int i = m - 1; i >= 0; --i)
            if (i != q && (tame[i] || i >= 1)) {
              r = i;
              break;
            }
          if (r < 0)
            throw SampleError("no sample found: no point can take the conjugation repair");
          // One affine parameter in the Stokes product at q: slots 0 and 1
          // carry opposite patterns, and s = (entry of slot 0) * (entry of
          // slot 1) moves every monodromy entry affinely.
          auto& ptq = rep.points[q];
          ptq.h = detail::class_representative(curve.types[q], *classes[q]);
          auto roots0 = sts[q].dirs[0].pattern(n).roots;
          auto roots1 = sts[q].dirs[1].pattern(n).roots;
          if (roots0.size() != 1 || roots1.size() != 1 || *roots0.begin() == *roots1.begin())
            throw RetryDraw{"unexpected direction patterns for the rank-two repair"};
          lie::Root r0 = *roots0.begin();
          lie::Root r1 = *roots1.begin();
          Cx x = rng.disk(1.0) + Cx(1.5, 0.0);
          auto set_param = [&](Cx s) {
            ptq.S[0] = eye(n);
            ptq.S[0](r0.first, r0.second) = x;
            ptq.S[1] = eye(n);
            ptq.S[1](r1.first, r1.second) = s / x;
          };
          auto trace_at = [&](Cx s) {
            set_param(s);
            Mat z = monodromy_product(r + 1, m - 1) * commutator_product() *
                    monodromy_product(0, r - 1);
            return z.inverse().trace();
          };
          Cx target;
          if (tame[r]) {
            target = 0.0;
            for (const auto& e : classes[r]->eigenvalues) target += e;
          } else {
            target = interior_monodromy(rep.points[r]).trace();
          }
          Cx alpha = trace_at(0.0);
          Cx slope = trace_at(1.0) - alpha;
          if (std::abs(slope) < 1e-10) throw RetryDraw{"degenerate trace parameter"};
          Cx s_star = (target - alpha) / slope;
          if (std::abs(s_star) > 1e8) throw RetryDraw{"trace parameter out of range"};
          set_param(s_star);
          Mat prefix = commutator_product() * monodromy_product(0, r - 1);
          Mat suffix = monodromy_product(r + 1, m - 1);
          solve_conjugation_point(r, prefix.inverse() * suffix.inverse());
        } else {
          // Every point tame: rank-one projector deformation of the class at
          // m-2 so that the leftover at m-1 lands in its class.
          const auto& ca = classes[m - 2]->eigenvalues;
          const auto& cb = classes[m - 1]->eigenvalues;
          Cx a1 = ca[0], a2 = ca[1];
          if (std::abs(a1 - a2) < 1e-8 || std::abs(cb[0] - cb[1]) < 1e-8)
            throw RetryDraw{"repeated class eigenvalues"};
          Mat v_mat = monodromy_product(0, m - 3).inverse();
          Cx tau = cb[0] + cb[1];
          Cx kappa = (tau - v_mat.trace() / a1) / (1.0 / a2 - 1.0 / a1);
          Mat x;
          for (int tries = 0;; ++tries) {
            if (tries >= 16) throw RetryDraw{"projector construction degenerate"};
            Vec v(2);
            v << rng.disk(1.0) + Cx(1.0, 0), rng.disk(1.0);
            Vec z = v_mat * v - kappa * v;
            Vec w(2);
            w << -z(1), z(0);
            Cx denom = (w.transpose() * v)(0, 0);
            if (std::abs(denom) < 1e-8) continue;
            Mat proj = (v * w.transpose()) / denom;
            x = a1 * eye(2) + (a2 - a1) * proj;
            break;
          }
          auto& pa = rep.points[m - 2];
          pa.h = pa.C * x * pa.C.inverse();
          Mat y = x.inverse() * v_mat;
          auto& pb = rep.points[m - 1];
          pb.h = pb.C * y * pb.C.inverse();
        }
      } else {
        throw SampleError(
            "no sample found: genus-zero sampling with every class prescribed is "
            "implemented for rank two only");
      }

      double res = check_relation(rep);
      if (res > tol) throw detail::RetryDraw{"relation residual " + std::to_string(res)};
      return rep;
    } catch (const detail::RetryDraw& r) {
      last_why = r.why;
    }
  }
  throw SampleError("no sample found after " + std::to_string(max_retries) +
                    " attempts; last failure: " + last_why);
}

}  // namespace wildcat::wild
