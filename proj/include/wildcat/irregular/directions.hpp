#pragma once

// Singular directions of an irregular type and the combinatorics attached to
// them. A root alpha of tail degree k contributes k rays, the directions of
// maximal decay of exp(-q_alpha); rays from different roots that agree within
// tolerance are merged into one singular direction carrying the combined
// support, recorded per pole level. Directions are ordered positively
// starting from a cut ray p, which by default sits in the gap just below the
// first direction.

#include <cmath>
#include <map>

#include "wildcat/irregular/type.hpp"
#include "wildcat/lie/parabolic.hpp"

namespace wildcat::irr {

using lie::UnipotentPattern;

inline double mod_2pi(double a) {
  double two_pi = 2.0 * M_PI;
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  // Guard against -0.0 and values rounding up to 2*pi.
  if (r >= two_pi) r -= two_pi;
  return r;
}

constexpr double kDirectionMergeTol = 1e-9;  // radians

// Closed form for the rays supported by one root: q_alpha has leading term
// c / z^k, and c e^{-ik theta} is real negative exactly at
// theta = (arg c - pi + 2 pi j) / k for j = 0, .., k-1.
inline std::vector<double> root_direction_angles(const RootTail& tail) {
  std::vector<double> out;
  if (tail.degree == 0) return out;
  const int k = tail.degree;
  const double base = std::arg(tail.leading) - M_PI;
  for (int j = 0; j < k; ++j) out.push_back(mod_2pi((base + 2.0 * M_PI * j) / k));
  return out;
}

struct SingularDirection {
  double angle = 0.0;     // absolute angle in [0, 2 pi)
  double from_cut = 0.0;  // angle measured positively from the cut, in (0, 2 pi)
  std::vector<Root> support;                 // all roots supported here
  std::map<int, std::vector<Root>> by_level;  // pole level -> roots of that level

  bool multi_level() const { return by_level.size() > 1; }

  UnipotentPattern pattern(int n) const {
    UnipotentPattern p;
    p.n = n;
    for (auto r : support) p.roots.insert(r);
    return p;
  }

  UnipotentPattern level_pattern(int n, int k) const {
    UnipotentPattern p;
    p.n = n;
    auto it = by_level.find(k);
    if (it != by_level.end())
      for (auto r : it->second) p.roots.insert(r);
    return p;
  }
};

struct StokesStructure {
  IrregularType q;
  lie::Partition levi;  // the stabilizer H of Q
  double cut = 0.0;
  std::vector<SingularDirection> dirs;  // sorted by from_cut, i.e. d_1, .., d_s

  int count() const { return static_cast<int>(dirs.size()); }
  int total_support() const {
    int t = 0;
    for (const auto& d : dirs) t += static_cast<int>(d.support.size());
    return t;
  }
};

inline StokesStructure singular_directions(const IrregularType& q,
                                           std::optional<double> cut = std::nullopt) {
  validate(q);
  StokesStructure st;
  st.q = q;
  st.levi = centralizer(q);

  // Collect (angle, root, level) triples.
  struct Ray {
    double angle;
    Root root;
    int level;
  };
  std::vector<Ray> rays;
  for (auto root : lie::all_roots(q.n)) {
    RootTail tail = q_alpha(q, root);
    for (double a : root_direction_angles(tail)) rays.push_back({a, root, tail.degree});
  }
  std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) {
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.root < b.root;
  });

  // Cluster by angle, then possibly merge the first and last cluster across
  // the 0 / 2 pi seam.
  std::vector<SingularDirection> dirs;
  for (const auto& ray : rays) {
    if (!dirs.empty() && ray.angle - dirs.back().angle <= kDirectionMergeTol) {
      dirs.back().support.push_back(ray.root);
      dirs.back().by_level[ray.level].push_back(ray.root);
    } else {
      SingularDirection d;
      d.angle = ray.angle;
      d.support = {ray.root};
      d.by_level[ray.level] = {ray.root};
      dirs.push_back(d);
    }
  }
  if (dirs.size() >= 2) {
    double wrap_gap = dirs.front().angle + 2.0 * M_PI - dirs.back().angle;
    if (wrap_gap <= kDirectionMergeTol) {
      for (auto r : dirs.back().support) dirs.front().support.push_back(r);
      for (auto& [k, rs] : dirs.back().by_level)
        for (auto r : rs) dirs.front().by_level[k].push_back(r);
      dirs.pop_back();
    }
  }

  // Default cut: midpoint of the circular gap that ends at the first (lowest
  // absolute angle) direction, i.e. just below d_1.
  if (cut) {
    st.cut = mod_2pi(*cut);
  } else if (dirs.empty()) {
    st.cut = 0.0;
  } else if (dirs.size() == 1) {
    st.cut = mod_2pi(dirs.front().angle - M_PI);
  } else {
    double prev = dirs.back().angle - 2.0 * M_PI;  // predecessor of dirs.front()
    st.cut = mod_2pi(0.5 * (prev + dirs.front().angle));
  }

  for (auto& d : dirs) {
    d.from_cut = mod_2pi(d.angle - st.cut);
    if (d.from_cut == 0.0) d.from_cut = 2.0 * M_PI;  // cut itself is never singular
    std::sort(d.support.begin(), d.support.end());
    for (auto& [k, rs] : d.by_level) std::sort(rs.begin(), rs.end());
  }
  std::sort(dirs.begin(), dirs.end(),
            [](const SingularDirection& a, const SingularDirection& b) {
              return a.from_cut < b.from_cut;
            });
  st.dirs = std::move(dirs);
  return st;
}

// ---- Appendix-style positivity certificate --------------------------------

inline double root_pairing(const std::vector<double>& lambda, const Root& r) {
  return lambda[r.first] - lambda[r.second];
}

// Cocharacter lambda with alpha(lambda) > 0 for every root supported at the
// chosen direction. Built from the real parts R_t = -Re(A_t e^{-i k_t d})
// starting at the top level and folding lower levels in with an adaptively
// doubled weight.
inline std::vector<double> positivity_cocharacter(const StokesStructure& st, int dir_index) {
  if (dir_index < 0 || dir_index >= st.count())
    throw std::invalid_argument("positivity_cocharacter: direction index out of range");
  const auto& d = st.dirs[dir_index];
  const IrregularType& q = st.q;
  const int r = q.levels();
  if (r == 0) throw std::invalid_argument("positivity_cocharacter: tame type has no directions");

  auto real_part = [&](int t) {
    std::vector<double> R(q.n);
    Cx rot = std::exp(Cx(0, -q.ks[t] * d.angle));
    for (int i = 0; i < q.n; ++i) R[i] = -(q.As[t](i) * rot).real();
    return R;
  };

  // Roots that must stay positive once level ks[t] has been folded in.
  auto must_be_positive = [&](int t) {
    std::vector<Root> roots;
    for (const auto& [k, rs] : d.by_level)
      if (k >= q.ks[t])
        for (auto root : rs) roots.push_back(root);
    return roots;
  };

  std::vector<double> lambda = real_part(r - 1);
  for (int t = r - 2; t >= 0; --t) {
    std::vector<double> R = real_part(t);
    auto targets = must_be_positive(t);
    double N = 2.0;
    for (int tries = 0; tries < 64; ++tries, N *= 2.0) {
      std::vector<double> cand(q.n);
      double scale = 0.0;
      for (int i = 0; i < q.n; ++i) {
        cand[i] = N * lambda[i] + R[i];
        scale = std::max(scale, std::abs(cand[i]));
      }
      bool ok = true;
      for (auto root : targets)
        if (root_pairing(cand, root) <= 1e-9 * (1.0 + scale)) {
          ok = false;
          break;
        }
      if (ok) {
        lambda = cand;
        break;
      }
      if (tries == 63)
        throw std::runtime_error("positivity_cocharacter: weight did not stabilize");
    }
  }

  for (auto root : d.support)
    if (root_pairing(lambda, root) <= 0)
      throw std::runtime_error("positivity_cocharacter: positivity check failed");
  return lambda;
}

// ---- Half-period parabolic -------------------------------------------------

struct HalfPeriodResult {
  UnipotentPattern union_pattern;  // supports of l consecutive directions
  std::vector<double> lambda;      // -Re Q on the bisecting ray
  lie::ParabolicData parabolic;
  double bisector = 0.0;
  bool matches = false;  // union equals the radical pattern of lambda
};

// For a one-level type of pole order k with s directions, any l = s / (2k)
// consecutive directions make up a half-period; the union of their supports
// is the unipotent radical of the parabolic defined by -Re Q on the
// bisecting ray, and shifting by l gives the opposite parabolic.
inline HalfPeriodResult half_period_parabolic(const StokesStructure& st, int start_index) {
  const IrregularType& q = st.q;
  if (q.levels() != 1)
    throw std::invalid_argument("half_period_parabolic: Q must have a single level");
  const int k = q.ks[0];
  const int s = st.count();
  if (s == 0 || s % (2 * k) != 0)
    throw std::invalid_argument("half_period_parabolic: direction count not divisible by 2k");
  const int l = s / (2 * k);

  HalfPeriodResult out;
  out.union_pattern.n = q.n;
  double first = 0.0, last = 0.0;
  for (int i = 0; i < l; ++i) {
    const auto& d = st.dirs[(start_index + i) % s];
    for (auto r : d.support) out.union_pattern.roots.insert(r);
    // Lift angles to a contiguous arc starting at the first direction.
    double lifted = d.from_cut;
    if (i == 0) {
      first = lifted;
    } else {
      while (lifted < first) lifted += 2.0 * M_PI;
    }
    last = lifted;
  }
  out.bisector = mod_2pi(st.cut + 0.5 * (first + last));

  out.lambda.resize(q.n);
  Cx rot = std::exp(Cx(0, -k * out.bisector));
  for (int i = 0; i < q.n; ++i) out.lambda[i] = -(q.As[0](i) * rot).real();
  out.parabolic = lie::parabolic_from_cocharacter(out.lambda, 1e-9);
  out.matches = (out.union_pattern.roots == out.parabolic.radical.roots);
  return out;
}

}  // namespace wildcat::irr
