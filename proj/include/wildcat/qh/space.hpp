#pragma once

// Group-valued moment-map spaces. A Space is a product of matrix factors
// (invertible block matrices, pattern unipotents, or plain rectangular
// blocks) carrying an action of a product of block groups ("slots"), an
// invariant two-form, and one group-valued moment component per slot.
//
// Sign conventions used consistently everywhere:
//   * fundamental vector fields are MINUS the flow derivative of the action;
//   * pairings use the trace form (X, Y) = tr(XY);
//   * a wedge of two matrix-valued one-forms has no factorial weight:
//     (A, B)(u, v) = (A(u), B(v)) - (A(v), B(u)).
//
// Tangent vectors are stored left-trivialized (delta g = g xi) on group and
// unipotent factors and as plain deltas on rectangular factors. All
// derivatives of composite expressions are propagated with exact jets.

#include <memory>
#include <optional>

#include "wildcat/core/jet.hpp"
#include "wildcat/lie/factorize.hpp"
#include "wildcat/lie/parabolic.hpp"

namespace wildcat::qh {

using lie::Partition;
using lie::UnipotentPattern;

enum class FactorKind { Group, Unipotent, Rect };

struct FactorSpec {
  FactorKind kind = FactorKind::Group;
  int rows = 0, cols = 0;
  Partition levi;             // Group: support partition
  UnipotentPattern pattern;   // Unipotent: root support
  std::string name;

  int dim() const {
    switch (kind) {
      case FactorKind::Group: return lie::partition_dim(levi);
      case FactorKind::Unipotent: return pattern.size();
      case FactorKind::Rect: return rows * cols;
    }
    return 0;
  }
};

struct SlotSpec {
  int n = 0;
  Partition levi;
  std::string name;
  int dim() const { return lie::partition_dim(levi); }
};

struct Point {
  std::vector<Mat> f;
};

struct Tangent {
  std::vector<Mat> xi;
};

using GroupTuple = std::vector<Mat>;
using LieTuple = std::vector<Mat>;

inline Tangent zero_tangent_like(const Point& p) {
  Tangent t;
  for (const auto& m : p.f) t.xi.push_back(Mat::Zero(m.rows(), m.cols()));
  return t;
}

inline Tangent add(const Tangent& a, const Tangent& b) {
  Tangent c = a;
  for (size_t i = 0; i < c.xi.size(); ++i) c.xi[i] += b.xi[i];
  return c;
}

inline Tangent scale(const Tangent& a, Cx s) {
  Tangent c = a;
  for (auto& m : c.xi) m *= s;
  return c;
}

struct FactorSpec;
class Space;

// Jets of every factor of a point along one tangent, in the factor's own
// convention (group-like factors carry delta g = g xi, rectangular ones a
// plain delta). Point maps defined on jets get their exact tangent maps for
// free.
std::vector<JMat> point_jets(const Space& sp, const Point& p, const Tangent& u);
Point jet_values(const std::vector<JMat>& js);
Tangent jet_tangents(const Space& target, const std::vector<JMat>& js);

// Per-factor coordinate chart around a base value. Charts are affine in the
// coordinates wherever the factor is an open piece of a linear space, so
// coordinate frames at displaced points are exact closed forms; that is what
// makes the finite-difference exterior derivative in the verifier honest.
class FactorChart {
 public:
  virtual ~FactorChart() = default;
  virtual int dim() const = 0;
  virtual Mat at(const Vec& x) const = 0;
  // Tangent (in the factor's tangent convention) at coords x of the
  // direction with coordinate coefficients c.
  virtual Mat tangent(const Vec& x, const Vec& c) const = 0;
};

namespace detail {

// Basis of index pairs for a Levi-supported square factor.
inline std::vector<std::pair<int, int>> levi_pairs(const Partition& p, int n) {
  auto owner = lie::part_of(p, n);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (owner[i] == owner[j]) out.push_back({i, j});
  return out;
}

class GroupChart final : public FactorChart {
 public:
  GroupChart(Mat base, const Partition& levi)
      : base_(std::move(base)), pairs_(levi_pairs(levi, static_cast<int>(base_.rows()))) {}

  int dim() const override { return static_cast<int>(pairs_.size()); }

  Mat pack(const Vec& x) const {
    Mat m = Mat::Zero(base_.rows(), base_.cols());
    for (size_t a = 0; a < pairs_.size(); ++a) m(pairs_[a].first, pairs_[a].second) = x(a);
    return m;
  }

  // g(x) = g0 (1 + M(x)); affine, so the frame in the ambient space is the
  // constant g0 E_a and the left-trivialized tangent is (1+M)^{-1} M(c).
  Mat at(const Vec& x) const override { return base_ * (eye(static_cast<int>(base_.rows())) + pack(x)); }

  Mat tangent(const Vec& x, const Vec& c) const override {
    Mat one_m = eye(static_cast<int>(base_.rows())) + pack(x);
    return one_m.inverse() * pack(c);
  }

 private:
  Mat base_;
  std::vector<std::pair<int, int>> pairs_;
};

class UnipotentChart final : public FactorChart {
 public:
  UnipotentChart(Mat base, const UnipotentPattern& pat) : base_(std::move(base)), pat_(pat) {
    for (auto r : pat_.roots) roots_.push_back(r);
  }

  int dim() const override { return static_cast<int>(roots_.size()); }

  Mat pack(const Vec& x) const {
    Mat m = Mat::Zero(pat_.n, pat_.n);
    for (size_t a = 0; a < roots_.size(); ++a) m(roots_[a].first, roots_[a].second) = x(a);
    return m;
  }

  Mat at(const Vec& x) const override { return base_ + pack(x); }

  Mat tangent(const Vec& x, const Vec& c) const override { return at(x).inverse() * pack(c); }

 private:
  Mat base_;
  UnipotentPattern pat_;
  std::vector<lie::Root> roots_;
};

class RectChart final : public FactorChart {
 public:
  explicit RectChart(Mat base) : base_(std::move(base)) {}
  int dim() const override { return static_cast<int>(base_.size()); }
  Mat at(const Vec& x) const override {
    return base_ + mat_of(x, static_cast<int>(base_.rows()), static_cast<int>(base_.cols()));
  }
  Mat tangent(const Vec& /*x*/, const Vec& c) const override {
    return mat_of(c, static_cast<int>(base_.rows()), static_cast<int>(base_.cols()));
  }

 private:
  Mat base_;
};

}  // namespace detail

class Space {
 public:
  virtual ~Space() = default;

  const std::vector<FactorSpec>& factors() const { return factors_; }
  const std::vector<SlotSpec>& slots() const { return slots_; }
  const std::string& name() const { return name_; }

  int tangent_dim() const {
    int d = 0;
    for (const auto& f : factors_) d += f.dim();
    return d;
  }

  int slot_dim() const {
    int d = 0;
    for (const auto& s : slots_) d += s.dim();
    return d;
  }

  virtual std::vector<Mat> moment(const Point& p) const = 0;
  // Left-trivialized moment derivative per slot: mu_k^{-1} d mu_k (u).
  virtual std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const = 0;
  virtual Cx omega(const Point& p, const Tangent& u, const Tangent& v) const = 0;
  virtual Point act(const Point& p, const GroupTuple& g) const = 0;
  virtual Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const = 0;
  virtual Tangent fundamental(const Point& p, const LieTuple& x) const = 0;

  virtual Point random_point(Rng& rng) const {
    Point p;
    for (const auto& f : factors_) p.f.push_back(random_factor(rng, f));
    return p;
  }

  virtual Tangent random_tangent(Rng& rng, const Point& p) const {
    Tangent t;
    (void)p;
    for (const auto& f : factors_) t.xi.push_back(random_factor_tangent(rng, f));
    return t;
  }

  virtual bool contains(const Point& p, double tol = 1e-8) const {
    if (p.f.size() != factors_.size()) return false;
    for (size_t i = 0; i < factors_.size(); ++i) {
      const auto& f = factors_[i];
      const Mat& m = p.f[i];
      if (m.rows() != f.rows || m.cols() != f.cols) return false;
      if (f.kind == FactorKind::Group && !lie::in_levi(m, f.levi, tol)) return false;
      if (f.kind == FactorKind::Unipotent && !lie::in_pattern_group(m, f.pattern, tol)) return false;
    }
    return true;
  }

  virtual std::unique_ptr<FactorChart> factor_chart(int idx, const Mat& base) const {
    const auto& f = factors_[idx];
    switch (f.kind) {
      case FactorKind::Group: return std::make_unique<detail::GroupChart>(base, f.levi);
      case FactorKind::Unipotent: return std::make_unique<detail::UnipotentChart>(base, f.pattern);
      case FactorKind::Rect: return std::make_unique<detail::RectChart>(base);
    }
    throw std::logic_error("unknown factor kind");
  }

  // Random Lie-algebra tuple for the acting group, one entry per slot.
  LieTuple random_lie(Rng& rng, double radius = 0.5) const {
    LieTuple x;
    for (const auto& s : slots_) {
      Mat m = Mat::Zero(s.n, s.n);
      auto owner = lie::part_of(s.levi, s.n);
      for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j)
          if (owner[i] == owner[j]) m(i, j) = rng.disk(radius);
      x.push_back(m);
    }
    return x;
  }

  GroupTuple random_group(Rng& rng, double radius = 0.5) const {
    GroupTuple g;
    for (const auto& s : slots_) g.push_back(lie::rand_levi(rng, s.levi, s.n, radius));
    return g;
  }

 protected:
  static Mat random_factor(Rng& rng, const FactorSpec& f, double radius = 0.5) {
    switch (f.kind) {
      case FactorKind::Group: return lie::rand_levi(rng, f.levi, f.rows, radius);
      case FactorKind::Unipotent: return lie::rand_unipotent(rng, f.pattern, radius);
      case FactorKind::Rect: return rng.mat(f.rows, f.cols, radius);
    }
    throw std::logic_error("unknown factor kind");
  }

  static Mat random_factor_tangent(Rng& rng, const FactorSpec& f, double radius = 0.5) {
    switch (f.kind) {
      case FactorKind::Group: {
        Mat m = Mat::Zero(f.rows, f.cols);
        auto owner = lie::part_of(f.levi, f.rows);
        for (int i = 0; i < f.rows; ++i)
          for (int j = 0; j < f.cols; ++j)
            if (owner[i] == owner[j]) m(i, j) = rng.disk(radius);
        return m;
      }
      case FactorKind::Unipotent: {
        Mat m = Mat::Zero(f.rows, f.cols);
        for (auto [i, j] : f.pattern.roots) m(i, j) = rng.disk(radius);
        return m;
      }
      case FactorKind::Rect: return rng.mat(f.rows, f.cols, radius);
    }
    throw std::logic_error("unknown factor kind");
  }

  std::vector<FactorSpec> factors_;
  std::vector<SlotSpec> slots_;
  std::string name_;
};

using SpacePtr = std::shared_ptr<const Space>;

// Whole-space chart: the concatenation of factor charts around a base point.
class Chart {
 public:
  Chart(const Space& sp, const Point& base) : space_(sp), base_(base) {
    for (size_t i = 0; i < sp.factors().size(); ++i) {
      charts_.push_back(sp.factor_chart(static_cast<int>(i), base.f[i]));
      offsets_.push_back(total_);
      total_ += charts_.back()->dim();
    }
  }

  int dim() const { return total_; }

  Point at(const Vec& x) const {
    Point p;
    for (size_t i = 0; i < charts_.size(); ++i)
      p.f.push_back(charts_[i]->at(x.segment(offsets_[i], charts_[i]->dim())));
    return p;
  }

  // Tangent at coords x of the direction with coefficient vector c.
  Tangent tangent(const Vec& x, const Vec& c) const {
    Tangent t;
    for (size_t i = 0; i < charts_.size(); ++i)
      t.xi.push_back(charts_[i]->tangent(x.segment(offsets_[i], charts_[i]->dim()),
                                         c.segment(offsets_[i], charts_[i]->dim())));
    return t;
  }

  Tangent frame(const Vec& x, int a) const {
    Vec c = Vec::Zero(total_);
    c(a) = 1.0;
    return tangent(x, c);
  }

 private:
  const Space& space_;
  Point base_;
  std::vector<std::unique_ptr<FactorChart>> charts_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// ---------------------------------------------------------------------------
// Chain spaces: C in G, h in H, and an ordered list of unipotent factors.
// Point (C, h, S_1, .., S_m); action (g, k): C -> k C g^{-1}, h -> k h k^{-1},
// S_i -> k S_i k^{-1}; moment to G x H is (C^{-1} b C, h^{-1}) with
// b = h S_m ... S_1. With m = 0 and H = G this is the double; with patterns
// alternating between a parabolic radical and its opposite it is the fission
// space; with the per-direction Stokes patterns it is the space attached to
// an irregular class at one marked point.
// ---------------------------------------------------------------------------

class ChainSpace final : public Space {
 public:
  ChainSpace(int n, Partition g_levi, Partition h_levi,
             std::vector<UnipotentPattern> patterns, std::string label = "chain")
      : n_(n), g_levi_(std::move(g_levi)), h_levi_(std::move(h_levi)),
        patterns_(std::move(patterns)) {
    name_ = std::move(label);
    if (!lie::refines(h_levi_, g_levi_, n_))
      throw std::invalid_argument("chain space: H must sit inside G");
    auto gowner = lie::part_of(g_levi_, n_);
    auto howner = lie::part_of(h_levi_, n_);
    for (const auto& p : patterns_) {
      if (p.n != n_) throw std::invalid_argument("chain space: pattern size mismatch");
      lie::validate_pattern(p);
      for (auto [i, j] : p.roots) {
        if (gowner[i] != gowner[j])
          throw std::invalid_argument("chain space: pattern leaves the group support");
        // H-stability: patterns must be unions of H-block rectangles so the
        // H-conjugation action preserves each factor.
        for (int i2 = 0; i2 < n_; ++i2)
          for (int j2 = 0; j2 < n_; ++j2)
            if (howner[i2] == howner[i] && howner[j2] == howner[j] && i2 != j2 &&
                !p.contains(i2, j2))
              throw std::invalid_argument("chain space: pattern is not H-stable");
      }
    }
    factors_.push_back({FactorKind::Group, n_, n_, g_levi_, {}, "C"});
    factors_.push_back({FactorKind::Group, n_, n_, h_levi_, {}, "h"});
    for (size_t i = 0; i < patterns_.size(); ++i)
      factors_.push_back({FactorKind::Unipotent, n_, n_, {}, patterns_[i],
                          "S" + std::to_string(i + 1)});
    slots_.push_back({n_, g_levi_, "G"});
    slots_.push_back({n_, h_levi_, "H"});
  }

  int n() const { return n_; }
  int unipotent_count() const { return static_cast<int>(patterns_.size()); }
  const std::vector<UnipotentPattern>& patterns() const { return patterns_; }
  const Partition& g_levi() const { return g_levi_; }
  const Partition& h_levi() const { return h_levi_; }

  // b = h S_m ... S_1 evaluated as a jet along the tangent u.
  JMat b_jet(const Point& p, const Tangent& u) const {
    JMat b(p.f[1], p.f[1] * u.xi[1]);
    for (int i = unipotent_count(); i >= 1; --i)
      b = b * JMat(p.f[1 + i], p.f[1 + i] * u.xi[1 + i]);
    return b;
  }

  Mat b_value(const Point& p) const {
    Mat b = p.f[1];
    for (int i = unipotent_count(); i >= 1; --i) b = b * p.f[1 + i];
    return b;
  }

  std::vector<Mat> moment(const Point& p) const override {
    Mat c = p.f[0];
    return {c.inverse() * b_value(p) * c, p.f[1].inverse()};
  }

  std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const override {
    JMat c(p.f[0], p.f[0] * u.xi[0]);
    JMat mu_g = c.inverse() * b_jet(p, u) * c;
    JMat h(p.f[1], p.f[1] * u.xi[1]);
    return {mc_left(mu_g), mc_left(h.inverse())};
  }

  Cx omega(const Point& p, const Tangent& u, const Tangent& v) const override {
    const int m = unipotent_count();
    // One-form values along a single tangent.
    struct Forms {
      std::vector<Mat> gamma;  // gamma_i = C_i^* theta, i = 0..m
      Mat gbar0, gbarm, eta, bbar;
    };
    auto eval = [&](const Tangent& t) {
      Forms f;
      JMat ci(p.f[0], p.f[0] * t.xi[0]);
      f.gamma.push_back(mc_left(ci));
      f.gbar0 = mc_right(ci);
      for (int i = 1; i <= m; ++i) {
        ci = JMat(p.f[1 + i], p.f[1 + i] * t.xi[1 + i]) * ci;
        f.gamma.push_back(mc_left(ci));
      }
      f.gbarm = mc_right(ci);
      f.eta = t.xi[1];
      f.bbar = mc_right(b_jet(p, t));
      return f;
    };
    Forms fu = eval(u), fv = eval(v);
    Mat b = b_value(p);
    Mat bi = b.inverse();

    auto wedge = [](const Mat& au, const Mat& av, const Mat& bu, const Mat& bv) {
      return lie::trace_form(au, bv) - lie::trace_form(av, bu);
    };

    Cx two_omega = wedge(fu.gbar0, fv.gbar0, b * fu.gbar0 * bi, b * fv.gbar0 * bi) +
                   wedge(fu.gbar0, fv.gbar0, fu.bbar, fv.bbar) +
                   wedge(fu.gbarm, fv.gbarm, fu.eta, fv.eta);
    for (int i = 1; i <= m; ++i)
      two_omega -= wedge(fu.gamma[i], fv.gamma[i], fu.gamma[i - 1], fv.gamma[i - 1]);
    return 0.5 * two_omega;
  }

  Point act(const Point& p, const GroupTuple& g) const override {
    const Mat& gg = g[0];
    const Mat& k = g[1];
    Point q;
    q.f.push_back(k * p.f[0] * gg.inverse());
    q.f.push_back(k * p.f[1] * k.inverse());
    for (int i = 0; i < unipotent_count(); ++i) q.f.push_back(k * p.f[2 + i] * k.inverse());
    return q;
  }

  Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const override {
    (void)p;
    const Mat& gg = g[0];
    const Mat& k = g[1];
    Tangent t;
    t.xi.push_back(gg * u.xi[0] * gg.inverse());
    t.xi.push_back(k * u.xi[1] * k.inverse());
    for (int i = 0; i < unipotent_count(); ++i) t.xi.push_back(k * u.xi[2 + i] * k.inverse());
    return t;
  }

  Tangent fundamental(const Point& p, const LieTuple& x) const override {
    const Mat& xg = x[0];
    const Mat& xh = x[1];
    Tangent t;
    Mat ci = p.f[0].inverse();
    t.xi.push_back(xg - ci * xh * p.f[0]);
    Mat hi = p.f[1].inverse();
    t.xi.push_back(xh - hi * xh * p.f[1]);
    for (int i = 0; i < unipotent_count(); ++i) {
      const Mat& s = p.f[2 + i];
      t.xi.push_back(xh - s.inverse() * xh * s);
    }
    return t;
  }

 private:
  int n_;
  Partition g_levi_, h_levi_;
  std::vector<UnipotentPattern> patterns_;
};

// ---------------------------------------------------------------------------
// Conjugacy class of a representative inside a (possibly proper) block group.
// Point: a single matrix in the class; moment is the inclusion.
// ---------------------------------------------------------------------------

class ConjugacyClassSpace final : public Space {
 public:
  explicit ConjugacyClassSpace(Mat rep, std::optional<Partition> levi = std::nullopt,
                               std::string label = "class")
      : rep_(std::move(rep)),
        levi_(levi ? *levi : lie::full_partition(static_cast<int>(rep_.rows()))) {
    name_ = std::move(label);
    const int n = static_cast<int>(rep_.rows());
    factors_.push_back({FactorKind::Group, n, n, levi_, {}, "g"});
    slots_.push_back({n, levi_, "G"});
  }

  const Mat& rep() const { return rep_; }

  std::vector<Mat> moment(const Point& p) const override { return {p.f[0]}; }

  std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const override {
    (void)p;
    return {u.xi[0]};
  }

  // Lift a tangent xi = X - Ad_{g^{-1}} X back to a generator X (least-norm
  // choice; omega does not depend on the lift).
  Mat lift(const Point& p, const Tangent& u) const {
    const Mat& g = p.f[0];
    const int n = static_cast<int>(g.rows());
    auto pairs = detail::levi_pairs(levi_, n);
    Mat op(n * n, pairs.size());
    for (size_t a = 0; a < pairs.size(); ++a) {
      Mat e = Mat::Zero(n, n);
      e(pairs[a].first, pairs[a].second) = 1.0;
      op.col(a) = vec_of(e - g.inverse() * e * g);
    }
    Vec coef = pinv_solve(op, vec_of(u.xi[0]));
    Mat x = Mat::Zero(n, n);
    for (size_t a = 0; a < pairs.size(); ++a)
      x(pairs[a].first, pairs[a].second) = coef(a);
    return x;
  }

  Cx omega(const Point& p, const Tangent& u, const Tangent& v) const override {
    const Mat& g = p.f[0];
    Mat x = lift(p, u), y = lift(p, v);
    Mat gi = g.inverse();
    return 0.5 * (lie::trace_form(x, g * y * gi) - lie::trace_form(y, g * x * gi));
  }

  Point act(const Point& p, const GroupTuple& g) const override {
    return {{g[0] * p.f[0] * g[0].inverse()}};
  }

  Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const override {
    (void)p;
    return {{g[0] * u.xi[0] * g[0].inverse()}};
  }

  Tangent fundamental(const Point& p, const LieTuple& x) const override {
    const Mat& g = p.f[0];
    return {{x[0] - g.inverse() * x[0] * g}};
  }

  Point random_point(Rng& rng) const override {
    Mat k = lie::rand_levi(rng, levi_, static_cast<int>(rep_.rows()));
    return {{k * rep_ * k.inverse()}};
  }

  Tangent random_tangent(Rng& rng, const Point& p) const override {
    LieTuple x = random_lie(rng);
    return fundamental(p, x);
  }

  bool contains(const Point& p, double tol = 1e-8) const override {
    // Same characteristic polynomial and, for the semisimple reps used here,
    // the same eigenvalue multiset.
    if (!lie::in_levi(p.f[0], levi_, tol)) return false;
    Eigen::ComplexEigenSolver<Mat> a(p.f[0]), b(rep_);
    std::vector<Cx> ea, eb;
    for (int i = 0; i < p.f[0].rows(); ++i) {
      ea.push_back(a.eigenvalues()(i));
      eb.push_back(b.eigenvalues()(i));
    }
    auto keyless = [](const Cx& x, const Cx& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    };
    std::sort(ea.begin(), ea.end(), keyless);
    std::sort(eb.begin(), eb.end(), keyless);
    for (size_t i = 0; i < ea.size(); ++i)
      if (std::abs(ea[i] - eb[i]) > 1e-6) return false;
    return true;
  }

  std::unique_ptr<FactorChart> factor_chart(int idx, const Mat& base) const override;

 private:
  Mat rep_;
  Partition levi_;
};

namespace detail {

// Chart on a conjugacy class: g(x) = q^{-1} g0 q with q = 1 + sum x_a X_a,
// where {X_a} spans a complement of the centralizer of g0. Conjugation keeps
// the point exactly on the class, and the frame has the closed form
// dg = q^{-1} (g0 X_a - X_a g).
class ConjChart final : public FactorChart {
 public:
  ConjChart(Mat base, const Partition& levi) : base_(std::move(base)) {
    const int n = static_cast<int>(base_.rows());
    auto pairs = levi_pairs(levi, n);
    Mat op(n * n, pairs.size());
    for (size_t a = 0; a < pairs.size(); ++a) {
      Mat e = Mat::Zero(n, n);
      e(pairs[a].first, pairs[a].second) = 1.0;
      op.col(a) = vec_of(base_ * e - e * base_);  // ad-action of the basis
    }
    // Complement of the centralizer: coefficient vectors of the right
    // singular space with nonzero singular value.
    Eigen::JacobiSVD<Mat> svd(op, Eigen::ComputeFullV);
    RVec s = svd.singularValues();
    double top = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (top > 0 && s(i) > 1e-9 * top) ++rank;
    for (int a = 0; a < rank; ++a) {
      Vec coef = svd.matrixV().col(a);
      Mat x = Mat::Zero(n, n);
      for (size_t b = 0; b < pairs.size(); ++b)
        x(pairs[b].first, pairs[b].second) = coef(b);
      basis_.push_back(x);
    }
  }

  int dim() const override { return static_cast<int>(basis_.size()); }

  Mat pack(const Vec& x) const {
    Mat m = Mat::Zero(base_.rows(), base_.cols());
    for (int a = 0; a < dim(); ++a) m += x(a) * basis_[a];
    return m;
  }

  Mat at(const Vec& x) const override {
    Mat q = eye(static_cast<int>(base_.rows())) + pack(x);
    return q.inverse() * base_ * q;
  }

  Mat tangent(const Vec& x, const Vec& c) const override {
    Mat q = eye(static_cast<int>(base_.rows())) + pack(x);
    Mat qi = q.inverse();
    Mat g = qi * base_ * q;
    Mat dm = pack(c);
    Mat dg = qi * (base_ * dm - dm * g);
    return g.inverse() * dg;  // left-trivialized
  }

 private:
  Mat base_;
  std::vector<Mat> basis_;
};

}  // namespace detail

inline std::unique_ptr<FactorChart> ConjugacyClassSpace::factor_chart(int idx,
                                                                      const Mat& base) const {
  (void)idx;
  return std::make_unique<detail::ConjChart>(base, levi_);
}

// ---------------------------------------------------------------------------
// Internally fused double: (a, b) with diagonal conjugation and commutator
// moment a b a^{-1} b^{-1}.
// ---------------------------------------------------------------------------

class FusedDoubleSpace final : public Space {
 public:
  explicit FusedDoubleSpace(int n, std::string label = "fused-double") : n_(n) {
    name_ = std::move(label);
    auto full = lie::full_partition(n_);
    factors_.push_back({FactorKind::Group, n_, n_, full, {}, "a"});
    factors_.push_back({FactorKind::Group, n_, n_, full, {}, "b"});
    slots_.push_back({n_, full, "G"});
  }

  std::vector<Mat> moment(const Point& p) const override {
    const Mat& a = p.f[0];
    const Mat& b = p.f[1];
    return {a * b * a.inverse() * b.inverse()};
  }

  std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const override {
    JMat a(p.f[0], p.f[0] * u.xi[0]);
    JMat b(p.f[1], p.f[1] * u.xi[1]);
    return {mc_left(a * b * a.inverse() * b.inverse())};
  }

  Cx omega(const Point& p, const Tangent& u, const Tangent& v) const override {
    struct Forms {
      Mat atheta, atheta_bar, btheta, btheta_bar, ab_theta, iaib_theta_bar;
    };
    auto eval = [&](const Tangent& t) {
      JMat a(p.f[0], p.f[0] * t.xi[0]);
      JMat b(p.f[1], p.f[1] * t.xi[1]);
      Forms f;
      f.atheta = mc_left(a);
      f.atheta_bar = mc_right(a);
      f.btheta = mc_left(b);
      f.btheta_bar = mc_right(b);
      f.ab_theta = mc_left(a * b);
      f.iaib_theta_bar = mc_right(a.inverse() * b.inverse());
      return f;
    };
    Forms fu = eval(u), fv = eval(v);
    auto wedge = [](const Mat& au, const Mat& av, const Mat& bu, const Mat& bv) {
      return lie::trace_form(au, bv) - lie::trace_form(av, bu);
    };
    Cx total = wedge(fu.atheta, fv.atheta, fu.btheta_bar, fv.btheta_bar) +
               wedge(fu.atheta_bar, fv.atheta_bar, fu.btheta, fv.btheta) +
               wedge(fu.ab_theta, fv.ab_theta, fu.iaib_theta_bar, fv.iaib_theta_bar);
    return -0.5 * total;
  }

  Point act(const Point& p, const GroupTuple& g) const override {
    Mat gi = g[0].inverse();
    return {{g[0] * p.f[0] * gi, g[0] * p.f[1] * gi}};
  }

  Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const override {
    (void)p;
    Mat gi = g[0].inverse();
    return {{g[0] * u.xi[0] * gi, g[0] * u.xi[1] * gi}};
  }

  Tangent fundamental(const Point& p, const LieTuple& x) const override {
    Tangent t;
    for (int i = 0; i < 2; ++i) {
      const Mat& a = p.f[i];
      t.xi.push_back(x[0] - a.inverse() * x[0] * a);
    }
    return t;
  }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// The pair space on (V, W): a in Hom(W, V), b in Hom(V, W), det(1 + ab) != 0,
// with moment ((1+ab)^{-1}, 1+ba) to GL(V) x GL(W).
// ---------------------------------------------------------------------------

class PairSpace final : public Space {
 public:
  PairSpace(int dim_v, int dim_w, std::string label = "pair")
      : nv_(dim_v), nw_(dim_w) {
    name_ = std::move(label);
    factors_.push_back({FactorKind::Rect, nv_, nw_, {}, {}, "a"});
    factors_.push_back({FactorKind::Rect, nw_, nv_, {}, {}, "b"});
    slots_.push_back({nv_, lie::full_partition(nv_), "GL(V)"});
    slots_.push_back({nw_, lie::full_partition(nw_), "GL(W)"});
  }

  std::vector<Mat> moment(const Point& p) const override {
    const Mat& a = p.f[0];
    const Mat& b = p.f[1];
    Mat mv = (eye(nv_) + a * b).inverse();
    Mat mw = eye(nw_) + b * a;
    return {mv, mw};
  }

  std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const override {
    JMat a(p.f[0], u.xi[0]);
    JMat b(p.f[1], u.xi[1]);
    JMat mv = (JMat::constant(eye(nv_)) + a * b).inverse();
    JMat mw = JMat::constant(eye(nw_)) + b * a;
    return {mc_left(mv), mc_left(mw)};
  }

  Cx omega(const Point& p, const Tangent& u, const Tangent& v) const override {
    const Mat& a = p.f[0];
    const Mat& b = p.f[1];
    Mat inv_v = (eye(nv_) + a * b).inverse();
    Mat inv_w = (eye(nw_) + b * a).inverse();
    Mat dadb = u.xi[0] * v.xi[1] - v.xi[0] * u.xi[1];  // da wedge db, V-valued
    Mat dbda = u.xi[1] * v.xi[0] - v.xi[1] * u.xi[0];  // db wedge da, W-valued
    return 0.5 * ((inv_v * dadb).trace() - (inv_w * dbda).trace());
  }

  Point act(const Point& p, const GroupTuple& g) const override {
    return {{g[0] * p.f[0] * g[1].inverse(), g[1] * p.f[1] * g[0].inverse()}};
  }

  Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const override {
    (void)p;
    return {{g[0] * u.xi[0] * g[1].inverse(), g[1] * u.xi[1] * g[0].inverse()}};
  }

  Tangent fundamental(const Point& p, const LieTuple& x) const override {
    const Mat& a = p.f[0];
    const Mat& b = p.f[1];
    return {{a * x[1] - x[0] * a, b * x[0] - x[1] * b}};
  }

  bool contains(const Point& p, double tol = 1e-8) const override {
    if (!Space::contains(p, tol)) return false;
    Eigen::FullPivLU<Mat> lu(eye(nv_) + p.f[0] * p.f[1]);
    return lu.isInvertible();
  }

 private:
  int nv_, nw_;
};

// ---------------------------------------------------------------------------
// A point with a group attached: no factors, moment identically 1. Fusing
// with it must leave a space unchanged; reducing it away is a no-op.
// ---------------------------------------------------------------------------

class TrivialSpace final : public Space {
 public:
  explicit TrivialSpace(int n, std::optional<Partition> levi = std::nullopt)
      : n_(n) {
    name_ = "trivial";
    slots_.push_back({n_, levi ? *levi : lie::full_partition(n_), "G"});
  }

  std::vector<Mat> moment(const Point&) const override { return {eye(n_)}; }
  std::vector<Mat> moment_mc(const Point&, const Tangent&) const override {
    return {Mat::Zero(n_, n_)};
  }
  Cx omega(const Point&, const Tangent&, const Tangent&) const override { return 0.0; }
  Point act(const Point& p, const GroupTuple&) const override { return p; }
  Tangent push(const Point&, const GroupTuple&, const Tangent& u) const override { return u; }
  Tangent fundamental(const Point& p, const LieTuple&) const override {
    return zero_tangent_like(p);
  }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// Product of spaces (disjoint factors, disjoint slots, omega additive).
// ---------------------------------------------------------------------------

class ProductSpace final : public Space {
 public:
  explicit ProductSpace(std::vector<SpacePtr> children) : children_(std::move(children)) {
    name_ = "product";
    for (const auto& c : children_) {
      factor_offset_.push_back(total_factors_);
      slot_offset_.push_back(total_slots_);
      for (const auto& f : c->factors()) factors_.push_back(f);
      for (const auto& s : c->slots()) slots_.push_back(s);
      total_factors_ += static_cast<int>(c->factors().size());
      total_slots_ += static_cast<int>(c->slots().size());
    }
  }

  const std::vector<SpacePtr>& children() const { return children_; }

  template <typename T>
  std::vector<T> slice_factors(const std::vector<T>& all, int child) const {
    auto begin = all.begin() + factor_offset_[child];
    int count = static_cast<int>(children_[child]->factors().size());
    return std::vector<T>(begin, begin + count);
  }

  std::vector<Mat> moment(const Point& p) const override {
    std::vector<Mat> out;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      for (auto& m : children_[c]->moment(sub)) out.push_back(std::move(m));
    }
    return out;
  }

  std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const override {
    std::vector<Mat> out;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      Tangent tu{slice_factors(u.xi, static_cast<int>(c))};
      for (auto& m : children_[c]->moment_mc(sub, tu)) out.push_back(std::move(m));
    }
    return out;
  }

  Cx omega(const Point& p, const Tangent& u, const Tangent& v) const override {
    Cx total = 0.0;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      Tangent tu{slice_factors(u.xi, static_cast<int>(c))};
      Tangent tv{slice_factors(v.xi, static_cast<int>(c))};
      total += children_[c]->omega(sub, tu, tv);
    }
    return total;
  }

  Point act(const Point& p, const GroupTuple& g) const override {
    Point out;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      GroupTuple gs(g.begin() + slot_offset_[c],
                    g.begin() + slot_offset_[c] + children_[c]->slots().size());
      for (auto& m : children_[c]->act(sub, gs).f) out.f.push_back(std::move(m));
    }
    return out;
  }

  Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const override {
    Tangent out;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      Tangent tu{slice_factors(u.xi, static_cast<int>(c))};
      GroupTuple gs(g.begin() + slot_offset_[c],
                    g.begin() + slot_offset_[c] + children_[c]->slots().size());
      for (auto& m : children_[c]->push(sub, gs, tu).xi) out.xi.push_back(std::move(m));
    }
    return out;
  }

  Tangent fundamental(const Point& p, const LieTuple& x) const override {
    Tangent out;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      LieTuple xs(x.begin() + slot_offset_[c],
                  x.begin() + slot_offset_[c] + children_[c]->slots().size());
      for (auto& m : children_[c]->fundamental(sub, xs).xi) out.xi.push_back(std::move(m));
    }
    return out;
  }

  Point random_point(Rng& rng) const override {
    Point out;
    for (const auto& c : children_)
      for (auto& m : c->random_point(rng).f) out.f.push_back(std::move(m));
    return out;
  }

  Tangent random_tangent(Rng& rng, const Point& p) const override {
    Tangent out;
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      for (auto& m : children_[c]->random_tangent(rng, sub).xi) out.xi.push_back(std::move(m));
    }
    return out;
  }

  bool contains(const Point& p, double tol = 1e-8) const override {
    for (size_t c = 0; c < children_.size(); ++c) {
      Point sub{slice_factors(p.f, static_cast<int>(c))};
      if (!children_[c]->contains(sub, tol)) return false;
    }
    return true;
  }

  std::unique_ptr<FactorChart> factor_chart(int idx, const Mat& base) const override {
    for (size_t c = 0; c < children_.size(); ++c) {
      int count = static_cast<int>(children_[c]->factors().size());
      if (idx < factor_offset_[c] + count)
        return children_[c]->factor_chart(idx - factor_offset_[c], base);
    }
    throw std::out_of_range("factor_chart: bad index");
  }

 private:
  std::vector<SpacePtr> children_;
  std::vector<int> factor_offset_, slot_offset_;
  int total_factors_ = 0, total_slots_ = 0;
};

// ---------------------------------------------------------------------------
// Fusion: merge two slots carrying the same group into one diagonal slot.
// Moment components multiply (mu_i mu_j) and the two-form picks up the
// correction -(1/2)(mu_i^* theta, mu_j^* theta-bar).
// ---------------------------------------------------------------------------

class FusedSpace final : public Space {
 public:
  FusedSpace(SpacePtr parent, int slot_i, int slot_j)
      : parent_(std::move(parent)), i_(slot_i), j_(slot_j) {
    const auto& ps = parent_->slots();
    if (i_ == j_ || i_ < 0 || j_ < 0 || i_ >= static_cast<int>(ps.size()) ||
        j_ >= static_cast<int>(ps.size()))
      throw std::invalid_argument("fuse: bad slot indices");
    if (ps[i_].n != ps[j_].n || lie::part_of(ps[i_].levi, ps[i_].n) !=
                                    lie::part_of(ps[j_].levi, ps[j_].n))
      throw std::invalid_argument("fuse: slots carry different groups");
    name_ = "fused(" + parent_->name() + ")";
    factors_ = parent_->factors();
    for (int s = 0; s < static_cast<int>(ps.size()); ++s)
      if (s != j_) slots_.push_back(ps[s]);
  }

  SpacePtr parent() const { return parent_; }
  int fused_into() const { return i_ < j_ ? i_ : i_ - 1; }

  GroupTuple expand(const GroupTuple& g) const {
    GroupTuple out;
    int mine = 0;
    for (int s = 0; s < static_cast<int>(parent_->slots().size()); ++s) {
      if (s == j_) {
        out.push_back(Mat());  // fill below once i's element is known
        continue;
      }
      out.push_back(g[mine++]);
    }
    out[j_] = out[i_];
    return out;
  }

  std::vector<Mat> moment(const Point& p) const override {
    auto mu = parent_->moment(p);
    std::vector<Mat> out;
    for (int s = 0; s < static_cast<int>(mu.size()); ++s) {
      if (s == j_) continue;
      if (s == i_)
        out.push_back(mu[i_] * mu[j_]);
      else
        out.push_back(mu[s]);
    }
    return out;
  }

  std::vector<Mat> moment_mc(const Point& p, const Tangent& u) const override {
    auto mu = parent_->moment(p);
    auto th = parent_->moment_mc(p, u);
    std::vector<Mat> out;
    for (int s = 0; s < static_cast<int>(mu.size()); ++s) {
      if (s == j_) continue;
      if (s == i_) {
        Mat mj_inv = mu[j_].inverse();
        out.push_back(mj_inv * th[i_] * mu[j_] + th[j_]);
      } else {
        out.push_back(th[s]);
      }
    }
    return out;
  }

  Cx omega(const Point& p, const Tangent& u, const Tangent& v) const override {
    auto mu = parent_->moment(p);
    auto tu = parent_->moment_mc(p, u);
    auto tv = parent_->moment_mc(p, v);
    Mat mj = mu[j_];
    Mat mj_inv = mj.inverse();
    // theta-bar of the j-component: Ad_{mu_j} theta_j.
    Mat bju = mj * tu[j_] * mj_inv;
    Mat bjv = mj * tv[j_] * mj_inv;
    Cx fusion = lie::trace_form(tu[i_], bjv) - lie::trace_form(tv[i_], bju);
    return parent_->omega(p, u, v) - 0.5 * fusion;
  }

  Point act(const Point& p, const GroupTuple& g) const override {
    return parent_->act(p, expand(g));
  }

  Tangent push(const Point& p, const GroupTuple& g, const Tangent& u) const override {
    return parent_->push(p, expand(g), u);
  }

  Tangent fundamental(const Point& p, const LieTuple& x) const override {
    LieTuple ex;
    int mine = 0;
    for (int s = 0; s < static_cast<int>(parent_->slots().size()); ++s) {
      if (s == j_) {
        ex.push_back(Mat());
        continue;
      }
      ex.push_back(x[mine++]);
    }
    ex[j_] = ex[i_];
    return parent_->fundamental(p, ex);
  }

  Point random_point(Rng& rng) const override { return parent_->random_point(rng); }
  Tangent random_tangent(Rng& rng, const Point& p) const override {
    return parent_->random_tangent(rng, p);
  }
  bool contains(const Point& p, double tol = 1e-8) const override {
    return parent_->contains(p, tol);
  }
  std::unique_ptr<FactorChart> factor_chart(int idx, const Mat& base) const override {
    return parent_->factor_chart(idx, base);
  }

 private:
  SpacePtr parent_;
  int i_, j_;
};

inline std::vector<JMat> point_jets(const Space& sp, const Point& p, const Tangent& u) {
  std::vector<JMat> js;
  for (size_t i = 0; i < p.f.size(); ++i) {
    if (sp.factors()[i].kind == FactorKind::Rect)
      js.emplace_back(p.f[i], u.xi[i]);
    else
      js.emplace_back(p.f[i], p.f[i] * u.xi[i]);
  }
  return js;
}

inline Point jet_values(const std::vector<JMat>& js) {
  Point p;
  for (const auto& j : js) p.f.push_back(j.v);
  return p;
}

inline Tangent jet_tangents(const Space& target, const std::vector<JMat>& js) {
  Tangent t;
  for (size_t i = 0; i < js.size(); ++i) {
    if (target.factors()[i].kind == FactorKind::Rect)
      t.xi.push_back(js[i].d);
    else
      t.xi.push_back(js[i].v.inverse() * js[i].d);
  }
  return t;
}

inline SpacePtr product(std::vector<SpacePtr> children) {
  return std::make_shared<ProductSpace>(std::move(children));
}

inline SpacePtr fuse(SpacePtr space, int slot_i, int slot_j) {
  return std::make_shared<FusedSpace>(std::move(space), slot_i, slot_j);
}

// Fuse two separate spaces along one slot of each: product then fuse.
inline SpacePtr fuse_spaces(SpacePtr left, int slot_left, SpacePtr right, int slot_right) {
  int offset = static_cast<int>(left->slots().size());
  return fuse(product({left, right}), slot_left, offset + slot_right);
}

}  // namespace wildcat::qh
