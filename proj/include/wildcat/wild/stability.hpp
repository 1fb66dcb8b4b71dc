#pragma once

// Stability of a global point: no proper invariant collection of compatible
// subspaces, tested for GL_n through the generated associative algebra. The
// generator list follows the local systems on the punctured curve: handles,
// conjugated formal monodromies and Stokes multipliers, and the connected
// center of each stabilizer group pulled back through the connectors. A
// randomized common-invariant-subspace search backs the algebra count on
// small cases, and the torus generated by the exponentials of the marked
// point's coefficients gives an independent replacement for the centers.

#include "wildcat/wild/representation.hpp"

namespace wildcat::wild {

namespace detail {

// Incremental orthonormal span of flattened matrices.
class MatSpan {
 public:
  explicit MatSpan(double rel_tol = 1e-9) : tol_(rel_tol) {}

  bool add(const Mat& m) {
    Vec v = vec_of(m);
    double scale = v.norm();
    if (scale < 1e-300) return false;
    for (const auto& r : rows_) v -= r.dot(v) * r;
    if (v.norm() <= tol_ * scale) return false;
    rows_.push_back(v / v.norm());
    return true;
  }

  int dim() const { return static_cast<int>(rows_.size()); }

 private:
  double tol_;
  std::vector<Vec> rows_;
};

}  // namespace detail

// Dimension of the associative algebra generated by `gens` (with 1), via
// span closure under left multiplication by the generators.
inline int algebra_dim(const std::vector<Mat>& gens, int n, double rel_tol = 1e-9) {
  detail::MatSpan span(rel_tol);
  std::vector<Mat> basis;
  auto push = [&](const Mat& m) {
    if (span.add(m)) {
      basis.push_back(m);
      return true;
    }
    return false;
  };
  push(eye(n));
  for (const auto& g : gens) push(g);
  for (size_t next = 0; next < basis.size() && span.dim() < n * n; ++next)
    for (const auto& g : gens) {
      push(g * basis[next]);
      if (span.dim() == n * n) break;
    }
  return span.dim();
}

// Generators of the connected center of the block group: one element per
// block, scaling that block by 2.
inline std::vector<Mat> center_generators(const Partition& levi, int n) {
  std::vector<Mat> out;
  for (const auto& part : levi) {
    Mat z = eye(n);
    for (int i : part) z(i, i) = 2.0;
    out.push_back(z);
  }
  return out;
}

// Monodromy-style generator list of a representation: handles, then per
// point the conjugated formal monodromy and Stokes multipliers, then the
// conjugated center elements produced by `center_at`.
template <typename CenterFn>
inline std::vector<Mat> generator_list(const IrregularCurve& curve, const StokesRep& rep,
                                       CenterFn&& center_at) {
  std::vector<Mat> gens;
  for (const auto& hnd : rep.handles) gens.push_back(hnd);
  for (size_t i = 0; i < rep.points.size(); ++i) {
    const auto& pt = rep.points[i];
    Mat ci = pt.C.inverse();
    gens.push_back(ci * pt.h * pt.C);
    for (const auto& s : pt.S) gens.push_back(ci * s * pt.C);
    for (const auto& z : center_at(static_cast<int>(i)))
      gens.push_back(ci * z * pt.C);
  }
  return gens;
}

inline std::vector<Mat> stability_generators(const IrregularCurve& curve,
                                             const StokesRep& rep) {
  return generator_list(curve, rep, [&](int i) {
    return center_generators(irr::centralizer(curve.types[i]), curve.n());
  });
}

inline bool is_stable(const IrregularCurve& curve, const StokesRep& rep,
                      double rel_tol = 1e-9) {
  int n = curve.n();
  return algebra_dim(stability_generators(curve, rep), n, rel_tol) == n * n;
}

// Randomized cross-check: hunt for a common invariant proper subspace by
// growing the orbit of an eigenvector of a generic algebra element. Returns
// a basis of an invariant proper subspace if one is found.
inline std::optional<std::vector<Vec>> invariant_subspace_witness(
    const std::vector<Mat>& gens, int n, Rng& rng, int attempts = 4, double rel_tol = 1e-9) {
  if (gens.empty()) {
    std::vector<Vec> line{Vec::Unit(n, 0)};
    return n > 1 ? std::optional(line) : std::nullopt;
  }
  for (int a = 0; a < attempts; ++a) {
    Mat r = Mat::Zero(n, n);
    for (const auto& g : gens) r += rng.disk(1.0) * g;
    Eigen::ComplexEigenSolver<Mat> eig(r);
    for (int e = 0; e < n; ++e) {
      detail::MatSpan span(rel_tol);
      std::vector<Vec> basis;
      auto push = [&](const Vec& v) {
        if (span.add(v)) {
          basis.push_back(v / v.norm());
          return true;
        }
        return false;
      };
      push(eig.eigenvectors().col(e));
      for (size_t next = 0; next < basis.size() && span.dim() < n; ++next)
        for (const auto& g : gens) push(g * basis[next]);
      if (span.dim() < n) return basis;
    }
  }
  return std::nullopt;
}

// ---- exponential torus ------------------------------------------------------

struct ExponentialTorus {
  std::vector<Vec> lie_basis;    // orthonormal basis of the span of the coefficients
  std::vector<Mat> generators;   // group elements exp(s A_k), two scales per level
};

inline ExponentialTorus exponential_torus(const IrregularType& q) {
  irr::validate(q);
  const int n = q.n;
  auto levi = irr::centralizer(q);
  auto owner = lie::part_of(levi, n);
  // The coefficients are constant on the stabilizer blocks and separate any
  // two distinct blocks; both facts are forced by the block definition, and
  // both are what make the centralizer of this torus equal to H.
  double tol = irr::coeff_tol(q);
  for (const auto& a : q.As)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (owner[i] == owner[j] && std::abs(a(i) - a(j)) > tol)
          throw std::logic_error("exponential torus: coefficient not block-constant");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (owner[i] != owner[j]) {
        bool separated = false;
        for (const auto& a : q.As)
          if (std::abs(a(i) - a(j)) > tol) separated = true;
        if (!separated)
          throw std::logic_error("exponential torus: blocks not separated");
      }

  ExponentialTorus out;
  if (q.levels() > 0) {
    Eigen::MatrixXcd rows(q.levels(), n);
    for (int t = 0; t < q.levels(); ++t) rows.row(t) = q.As[t].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
    double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) > 1e-12 * (1.0 + top))
        out.lie_basis.push_back(svd.matrixV().col(k));
  }
  const double phi = 1.6180339887498949;
  for (const auto& a : q.As) {
    for (double s : {1.0, phi}) {
      Mat g = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) g(i, i) = std::exp(s * a(i));
      out.generators.push_back(g);
    }
  }
  return out;
}

// Same stability test with the exponential-torus generators standing in for
// the center elements at every marked point.
inline bool is_stable_torus(const IrregularCurve& curve, const StokesRep& rep,
                            double rel_tol = 1e-9) {
  std::vector<std::vector<Mat>> torus_gens;
  for (const auto& q : curve.types) torus_gens.push_back(exponential_torus(q).generators);
  auto gens = generator_list(curve, rep, [&](int i) { return torus_gens[i]; });
  int n = curve.n();
  return algebra_dim(gens, n, rel_tol) == n * n;
}

// The two generator recipes must agree: the torus sits inside the connected
// center and has the same centralizer.
inline bool galois_crosscheck(const IrregularCurve& curve, const StokesRep& rep,
                              double rel_tol = 1e-9) {
  return is_stable(curve, rep, rel_tol) == is_stable_torus(curve, rep, rel_tol);
}

}  // namespace wildcat::wild
