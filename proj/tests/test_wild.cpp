#include <catch_amalgamated.hpp>

#include <numeric>

#include "wildcat/wild/dimension.hpp"
#include "wildcat/wild/genericity.hpp"
#include "wildcat/wild/sampler.hpp"
#include "wildcat/wild/stability.hpp"

using namespace wildcat;
using namespace wildcat::wild;

namespace {

irr::IrregularType tame(int n) { return irr::make_irregular(n, {}); }

irr::IrregularType gl2_order(int k) {
  return irr::make_irregular(2, {{k, {Cx(1), Cx(-1)}}});
}

irr::IrregularType two_level3() {
  return irr::make_irregular(3, {{2, {Cx(1), Cx(1), Cx(-2)}}, {1, {Cx(0), Cx(1), Cx(3)}}});
}

const Cx kQ = std::exp(Cx(0, 0.7));

Cx qpow(int e) { return std::pow(kQ, e); }

ClassSpec pair_class(Cx lambda) { return ClassSpec{{lambda, 1.0 / lambda}, false}; }

IrregularCurve make_curve(std::vector<irr::IrregularType> ts, int genus = 0) {
  IrregularCurve c;
  c.genus = genus;
  c.types = std::move(ts);
  return c;
}

// The five rank-two pole configurations with the same two-dimensional
// quotient, as (curve, classes) pairs with generic eigenvalue choices.
struct Config {
  IrregularCurve curve;
  ClassList classes;
};

Config painleve_vi() {
  Config c;
  c.curve = make_curve({tame(2), tame(2), tame(2), tame(2)});
  c.classes = {pair_class(qpow(1)), pair_class(qpow(2)), pair_class(qpow(4)),
               pair_class(qpow(8))};
  return c;
}

Config config_3_1() {
  Config c;
  c.curve = make_curve({gl2_order(1), tame(2), tame(2)});
  c.classes = {pair_class(qpow(1)), pair_class(qpow(2)), pair_class(qpow(4))};
  return c;
}

Config config_2_1_1() {
  Config c;
  c.curve = make_curve({gl2_order(1), gl2_order(1)});
  c.classes = {pair_class(qpow(1)), pair_class(qpow(2))};
  return c;
}

Config config_2_2() {
  Config c;
  c.curve = make_curve({gl2_order(2), tame(2)});
  c.classes = {pair_class(qpow(1)), pair_class(qpow(2))};
  return c;
}

Config config_1_3() {
  Config c;
  c.curve = make_curve({gl2_order(3)});
  c.classes = {pair_class(qpow(1))};
  return c;
}

std::vector<Cx> sorted_eigenvalues(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> eig(m);
  std::vector<Cx> v(eig.eigenvalues().data(),
                    eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(v.begin(), v.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

// Best matching over orderings; the eigenvalue pairs here can tie in their
// real parts, which makes any fixed sort unstable under rounding.
double class_mismatch(const Mat& h, const ClassSpec& spec) {
  auto have = sorted_eigenvalues(h);
  std::vector<int> perm(have.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double d = 0;
    for (size_t i = 0; i < have.size(); ++i)
      d = std::max(d, std::abs(have[i] - spec.eigenvalues[perm[i]]));
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

StokesRep reducible_diag_rep() {
  StokesRep rep;
  rep.n = 2;
  PointMonodromy p0, p1;
  p0.C = eye(2);
  p0.h = Mat::Zero(2, 2);
  p0.h(0, 0) = 2.0;
  p0.h(1, 1) = 3.0;
  p1.C = eye(2);
  p1.h = p0.h.inverse();
  rep.points = {p0, p1};
  return rep;
}

}  // namespace

TEST_CASE("global space: fused moment carries the relation product") {
  for (int genus : {0, 1}) {
    IrregularCurve curve = make_curve({gl2_order(1), tame(2)}, genus);
    auto cs = build_space(curve);
    CHECK(cs.reduced_dim() == reduced_dim_formula(curve));

    Rng rng(41 + genus);
    Point p = cs.space->random_point(rng);
    StokesRep rep = from_point(cs, p);
    REQUIRE(rep.genus() == genus);

    auto mu = cs.space->moment(p);
    REQUIRE(mu.size() == 1 + curve.types.size());
    CHECK(dist(mu[0], relation_lhs(rep)) <= 1e-12);
    for (size_t i = 0; i < rep.points.size(); ++i)
      CHECK(dist(mu[1 + i], rep.points[i].h.inverse()) <= 1e-12);

    Point back = to_point(cs, rep);
    REQUIRE(back.f.size() == p.f.size());
    for (size_t i = 0; i < p.f.size(); ++i) CHECK(dist(back.f[i], p.f[i]) == 0.0);
  }

  IrregularCurve c3 = make_curve({two_level3(), tame(3)});
  auto cs3 = build_space(c3);
  // dim of each marked-point space plus (2g-2) dim G.
  CHECK(reduced_dim_formula(c3) == -18 + 22 + 18);
  CHECK(cs3.reduced_dim() == reduced_dim_formula(c3));
}

TEST_CASE("sampling: a free point absorbs the deficit exactly") {
  // One tame point on a genus-one curve, class left free.
  IrregularCurve torus_curve = make_curve({tame(2)}, 1);
  ClassList free_class = {std::nullopt};
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    StokesRep rep = sample_point(torus_curve, free_class, seed);
    CHECK(check_relation(rep) <= 1e-10);
  }

  // Irregular point plus a free tame partner.
  IrregularCurve c3 = make_curve({two_level3(), tame(3)});
  ClassList free3 = {std::nullopt, std::nullopt};
  auto cs3 = build_space(c3);
  for (std::uint64_t seed : {11, 12, 13}) {
    StokesRep rep = sample_point(c3, free3, seed);
    CHECK(check_relation(rep) <= 1e-10);
    CHECK(cs3.space->contains(to_point(cs3, rep), 1e-8));
  }
}

TEST_CASE("sampling: prescribed classes across the rank-two configurations") {
  auto check_config = [](const Config& cfg, std::uint64_t seed) {
    StokesRep rep = sample_point(cfg.curve, cfg.classes, seed);
    CHECK(check_relation(rep) <= 1e-10);
    for (size_t i = 0; i < rep.points.size(); ++i)
      CHECK(class_mismatch(rep.points[i].h, *cfg.classes[i]) <= 1e-8);
    auto cs = build_space(cfg.curve);
    CHECK(cs.space->contains(to_point(cs, rep), 1e-8));
  };
  for (std::uint64_t seed : {1, 2, 3}) {
    check_config(painleve_vi(), seed);
    check_config(config_3_1(), seed);
    check_config(config_2_1_1(), seed);
    check_config(config_2_2(), seed);
  }

  // Central class on a genus-one curve: the commutator equation against a
  // scalar target.
  IrregularCurve torus_curve = make_curve({tame(2)}, 1);
  ClassList central = {ClassSpec{{Cx(-1), Cx(-1)}, false}};
  StokesRep rep = sample_point(torus_curve, central, 9);
  CHECK(check_relation(rep) <= 1e-10);
  CHECK(class_mismatch(rep.points[0].h, *central[0]) <= 1e-10);

  // Determinant obstruction reported honestly.
  auto bad = painleve_vi();
  bad.classes[3] = ClassSpec{{2.0 * qpow(8), 1.0 / qpow(8)}, false};
  CHECK_THROWS_WITH(sample_point(bad.curve, bad.classes, 1),
                    Catch::Matchers::ContainsSubstring("determinant"));

  // A rigid mix: one irregular and one tame point, both prescribed.
  IrregularCurve mixed = make_curve({gl2_order(1), tame(2)});
  ClassList mixed_classes = {pair_class(qpow(1)), pair_class(qpow(2))};
  for (std::uint64_t seed : {1, 2, 3}) {
    StokesRep r = sample_point(mixed, mixed_classes, seed);
    CHECK(check_relation(r) <= 1e-10);
    CHECK(class_mismatch(r.points[0].h, *mixed_classes[0]) <= 1e-8);
    CHECK(class_mismatch(r.points[1].h, *mixed_classes[1]) <= 1e-8);
  }
  CHECK(expected_dim(mixed, mixed_classes) == 0);

  // Two tame points force mutually inverse classes, in any rank.
  IrregularCurve two_tame3 = make_curve({tame(3), tame(3)});
  ClassList inv3 = {ClassSpec{{Cx(2), Cx(3), Cx(5)}, false},
                    ClassSpec{{Cx(0.2), Cx(1.0 / 3), Cx(0.5)}, false}};
  StokesRep r3 = sample_point(two_tame3, inv3, 4);
  CHECK(check_relation(r3) <= 1e-10);
  CHECK(class_mismatch(r3.points[0].h, *inv3[0]) <= 1e-8);
  CHECK(class_mismatch(r3.points[1].h, *inv3[1]) <= 1e-8);
  ClassList notinv = {ClassSpec{{Cx(2), Cx(3), Cx(5)}, false},
                      ClassSpec{{Cx(0.1), Cx(2.0 / 3), Cx(0.5)}, false}};
  CHECK_THROWS_WITH(sample_point(two_tame3, notinv, 4),
                    Catch::Matchers::ContainsSubstring("mutually inverse"));
}

TEST_CASE("relation residual scales with a planted defect") {
  auto cfg = painleve_vi();
  StokesRep rep = sample_point(cfg.curve, cfg.classes, 17);
  REQUIRE(check_relation(rep) <= 1e-10);
  double eps = 1e-6;
  rep.points[2].h *= (1.0 + eps);
  double res = check_relation(rep);
  CHECK(res >= 1e-2 * eps);
  CHECK(res <= 1e2 * eps);
}

TEST_CASE("stability: algebra closure, controls and symmetry invariance") {
  // Two opposite Stokes multipliers already generate everything.
  IrregularCurve disk = make_curve({gl2_order(1)});
  CHECK(is_exceptional(disk));
  StokesRep rep;
  rep.n = 2;
  PointMonodromy pt;
  pt.C = eye(2);
  pt.h = Mat::Zero(2, 2);
  pt.h(0, 0) = 2.0;
  pt.h(1, 1) = 3.0;
  Mat s1 = eye(2), s2 = eye(2);
  s1(0, 1) = 1.0;
  s2(1, 0) = 1.0;
  pt.S = {s1, s2};
  rep.points = {pt};
  CHECK(is_stable(disk, rep));

  // Scalar data generates nothing.
  StokesRep triv = rep;
  triv.points[0].h = eye(2);
  triv.points[0].S = {eye(2), eye(2)};
  CHECK_FALSE(is_stable(disk, triv));

  // Common diagonal blocks are caught, and the witness really is invariant.
  IrregularCurve two_tame = make_curve({tame(2), tame(2)});
  CHECK_FALSE(is_exceptional(two_tame));
  StokesRep red = reducible_diag_rep();
  REQUIRE(check_relation(red) <= 1e-12);
  CHECK_FALSE(is_stable(two_tame, red));
  auto gens = stability_generators(two_tame, red);
  Rng rng(7);
  auto witness = invariant_subspace_witness(gens, 2, rng);
  REQUIRE(witness.has_value());
  REQUIRE(witness->size() == 1);
  for (const auto& g : *witness) {
    for (const auto& gen : gens) {
      Vec image = gen * g;
      // Residual of the image against the witness span.
      Vec res = image;
      for (const auto& b : *witness) res -= b.dot(res) * b;
      CHECK(res.norm() <= 1e-8 * (1.0 + image.norm()));
    }
  }

  // A stable sample has no invariant subspace and stays stable under the
  // residual symmetry action.
  auto cfg = painleve_vi();
  StokesRep sampled = sample_point(cfg.curve, cfg.classes, 23);
  REQUIRE(is_stable(cfg.curve, sampled));
  Rng rng2(8);
  auto none = invariant_subspace_witness(stability_generators(cfg.curve, sampled), 2, rng2);
  CHECK_FALSE(none.has_value());

  std::vector<Mat> ks;
  for (size_t i = 0; i < sampled.points.size(); ++i) ks.push_back(rng2.near_identity(2, 0.4));
  StokesRep moved = act_on_rep(sampled, ks);
  CHECK(check_relation(moved) <= 1e-9);
  CHECK(is_stable(cfg.curve, moved) == is_stable(cfg.curve, sampled));
}

TEST_CASE("genericity: kernel conditions and witnesses") {
  // Three tame points with geometric eigenvalue spreads pass both conditions.
  IrregularCurve c = make_curve({tame(2), tame(2), tame(2)});
  ClassList good = {pair_class(qpow(1)), pair_class(qpow(2)), pair_class(qpow(4))};
  auto rep = is_generic(c, good);
  CHECK(rep.generic);
  CHECK(rep.determinant_ok);
  CHECK(rep.exhaustive);

  // Identity classes satisfy the determinant condition but fail a selection.
  ClassList ones = {ClassSpec{{Cx(1), Cx(1)}, false}, ClassSpec{{Cx(1), Cx(1)}, false},
                    ClassSpec{{Cx(1), Cx(1)}, false}};
  auto bad = is_generic(c, ones);
  CHECK_FALSE(bad.generic);
  CHECK(bad.determinant_ok);
  REQUIRE(bad.witness.size() == 3);
  CHECK(std::abs(bad.witness_product - 1.0) <= 1e-9);

  // A crossing pair is found and reported with the violating selection.
  IrregularCurve c2 = make_curve({tame(2), tame(2)});
  ClassList crossing = {ClassSpec{{Cx(2), Cx(0.5)}, false},
                        ClassSpec{{Cx(0.5), Cx(2)}, false}};
  auto cross = is_generic(c2, crossing);
  CHECK_FALSE(cross.generic);
  REQUIRE(cross.witness.size() == 2);
  Cx prod = 1.0;
  for (size_t i = 0; i < cross.witness.size(); ++i)
    for (int idx : cross.witness[i]) prod *= crossing[i]->eigenvalues[idx];
  CHECK(std::abs(prod - 1.0) <= 1e-9);

  // Breaking the total determinant is reported as such.
  ClassList off = {ClassSpec{{Cx(2), Cx(0.5)}, false}, ClassSpec{{Cx(3), Cx(0.5)}, false}};
  auto detrep = is_generic(c2, off);
  CHECK_FALSE(detrep.generic);
  CHECK_FALSE(detrep.determinant_ok);
}

TEST_CASE("generic classes force stability on samples") {
  for (const auto& cfg : {painleve_vi(), config_3_1(), config_2_1_1()}) {
    REQUIRE(is_generic(cfg.curve, cfg.classes).generic);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      StokesRep rep = sample_point(cfg.curve, cfg.classes, seed);
      CHECK(is_stable(cfg.curve, rep));
    }
  }
  // Control: a reducible solution of the relation is caught.
  CHECK_FALSE(is_stable(make_curve({tame(2), tame(2)}), reducible_diag_rep()));
}

TEST_CASE("exponential torus agrees with the center recipe") {
  auto torus = exponential_torus(two_level3());
  CHECK(torus.lie_basis.size() == 2);
  CHECK(torus.generators.size() == 4);
  for (const auto& g : torus.generators) {
    CHECK(dist(g, Mat(g.diagonal().asDiagonal())) <= 1e-14);
  }

  // Crosscheck across irregular and mixed configurations, stable or not.
  IrregularCurve c3 = make_curve({two_level3(), tame(3)});
  ClassList free3 = {std::nullopt, std::nullopt};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    StokesRep rep = sample_point(c3, free3, seed);
    CHECK(galois_crosscheck(c3, rep));
  }
  auto cfg = config_2_1_1();
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    StokesRep rep = sample_point(cfg.curve, cfg.classes, seed);
    CHECK(galois_crosscheck(cfg.curve, rep));
  }
  CHECK(galois_crosscheck(make_curve({tame(2), tame(2)}), reducible_diag_rep()));
}

TEST_CASE("class dimensions and the closed-form quotient dimension") {
  // Diagonal torus classes are points; full regular classes are dense orbits.
  CHECK(class_dim(gl2_order(1), pair_class(qpow(1))) == 0);
  CHECK(class_dim(tame(2), pair_class(qpow(1))) == 2);
  CHECK(class_dim(tame(3), ClassSpec{{Cx(1), Cx(2), Cx(3)}, false}) == 6);
  CHECK(class_dim(tame(3), ClassSpec{{Cx(2), Cx(2), Cx(3)}, false}) == 4);
  CHECK(class_dim(tame(3), ClassSpec{{Cx(2), Cx(2), Cx(3)}, true}) == 6);

  // The five rank-two configurations all land on a surface.
  CHECK(expected_dim(painleve_vi().curve, painleve_vi().classes) == 2);
  CHECK(expected_dim(config_3_1().curve, config_3_1().classes) == 2);
  CHECK(expected_dim(config_2_1_1().curve, config_2_1_1().classes) == 2);
  CHECK(expected_dim(config_2_2().curve, config_2_2().classes) == 2);
  CHECK(expected_dim(config_1_3().curve, config_1_3().classes) == 2);

  // Central class on the one-handle curve.
  IrregularCurve torus_curve = make_curve({tame(2)}, 1);
  ClassList central = {ClassSpec{{Cx(-1), Cx(-1)}, false}};
  CHECK(expected_dim(torus_curve, central) == 2);

  // A rank-three mixed configuration, counted by hand, and still even.
  IrregularCurve c3 = make_curve({two_level3(), tame(3)});
  ClassList cls3 = {ClassSpec{{Cx(2), Cx(3), Cx(5)}, false},
                    ClassSpec{{Cx(7), Cx(11), Cx(13)}, false}};
  CHECK(expected_dim(c3, cls3) == 6);
  CHECK(expected_dim(c3, cls3) % 2 == 0);
}

TEST_CASE("numeric dimension count at sampled points") {
  auto vi = painleve_vi();
  StokesRep rep = sample_point(vi.curve, vi.classes, 31);
  auto nd = numeric_dim_check(vi.curve, rep);
  CHECK(nd.chart_dim == 32);
  CHECK_FALSE(nd.orbit_deficient);
  CHECK(nd.measured == expected_dim(vi.curve, vi.classes));

  auto c211 = config_2_1_1();
  StokesRep rep2 = sample_point(c211.curve, c211.classes, 32);
  auto nd2 = numeric_dim_check(c211.curve, rep2);
  CHECK(nd2.chart_dim == 16);
  CHECK_FALSE(nd2.orbit_deficient);
  CHECK(nd2.measured == 2);

  IrregularCurve torus_curve = make_curve({tame(2)}, 1);
  ClassList central = {ClassSpec{{Cx(-1), Cx(-1)}, false}};
  StokesRep rep3 = sample_point(torus_curve, central, 33);
  auto nd3 = numeric_dim_check(torus_curve, rep3);
  CHECK_FALSE(nd3.orbit_deficient);
  CHECK(nd3.measured == 2);

  // Non-stable points are flagged instead of silently counted.
  auto nd4 = numeric_dim_check(make_curve({tame(2), tame(2)}), reducible_diag_rep());
  CHECK(nd4.orbit_deficient);
}
