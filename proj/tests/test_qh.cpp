#include <catch_amalgamated.hpp>

#include "wildcat/qh/builders.hpp"
#include "wildcat/qh/verify.hpp"

using namespace wildcat;
using namespace wildcat::qh;

namespace {

Mat regular_rep3() {
  Mat r = Mat::Zero(3, 3);
  r(0, 0) = Cx(1.3, 0.0);
  r(1, 1) = Cx(0.4, 0.9);
  r(2, 2) = Cx(-0.5, 1.2);
  return r;
}

irr::IrregularType two_level3() {
  return irr::make_irregular(
      3, {{2, {Cx(1), Cx(1), Cx(-2)}}, {1, {Cx(0), Cx(1), Cx(3)}}});
}

void expect_axioms(const Space& sp, std::uint64_t seed) {
  auto rep = verify_space(sp, seed);
  INFO(sp.name() << " seed " << seed << ": " << rep.to_json().dump(2));
  CHECK(rep.qh1.residual <= 1e-5);
  CHECK(rep.qh2.residual <= 1e-10);
  CHECK(rep.qh3.full_rank);
  CHECK(rep.qh3.span_residual <= 1e-6);
  CHECK(rep.equivariance.moment <= 1e-9);
  CHECK(rep.equivariance.omega <= 1e-9);
  CHECK(rep.equivariance.flow <= 1e-6);
}

}  // namespace

TEST_CASE("axioms: double") {
  expect_axioms(*make_double(2), 11);
  expect_axioms(*make_double(3), 12);
}

TEST_CASE("axioms: conjugacy class") {
  ConjugacyClassSpace cls(regular_rep3());
  expect_axioms(cls, 21);
}

TEST_CASE("axioms: internally fused double") {
  expect_axioms(FusedDoubleSpace(2), 31);
  expect_axioms(FusedDoubleSpace(3), 32);
}

TEST_CASE("axioms: fission spaces over gradings") {
  for (int r = 1; r <= 3; ++r) {
    expect_axioms(*make_fission(2, {{0}, {1}}, r), 40 + r);
    expect_axioms(*make_fission(3, {{0, 1}, {2}}, r), 50 + r);
  }
}

TEST_CASE("axioms: pair spaces") {
  expect_axioms(PairSpace(1, 1), 61);
  expect_axioms(PairSpace(2, 1), 62);
  expect_axioms(PairSpace(2, 2), 63);
}

TEST_CASE("axioms: one-point space of an irregular class") {
  auto st = irr::singular_directions(two_level3());
  auto sp = make_stokes_space(st);
  REQUIRE(sp->tangent_dim() == 22);
  REQUIRE(sp->tangent_dim() == expected_stokes_dim(two_level3()));
  expect_axioms(*sp, 71);
}

TEST_CASE("axioms: fusion of two doubles") {
  auto d2 = make_double(2);
  // Fuse the two H slots (index 1 of each child).
  auto fused = fuse_spaces(d2, 1, d2, 1);
  REQUIRE(fused->slots().size() == 3);
  expect_axioms(*fused, 81);
}

TEST_CASE("pair space two-form in rank one is the known scalar") {
  PairSpace b11(1, 1);
  Rng rng(7);
  Point p = b11.random_point(rng);
  Cx a = p.f[0](0, 0), b = p.f[1](0, 0);
  Tangent da = zero_tangent_like(p), db = zero_tangent_like(p);
  da.xi[0](0, 0) = 1.0;
  db.xi[1](0, 0) = 1.0;
  Cx want = 0.5 * (1.0 / (1.0 + a * b) + 1.0 / (1.0 + b * a));
  REQUIRE(std::abs(b11.omega(p, da, db) - want) < 1e-12);
}

TEST_CASE("fusing the double internally gives the commutator space") {
  auto d3 = make_double(3);
  auto fd = fuse(d3, 0, 1);  // moment becomes mu_G mu_H = C^{-1} h C h^{-1}
  FusedDoubleSpace direct(3);
  Rng rng(17);
  Point p = d3->random_point(rng);  // (C, h)
  const Mat& c = p.f[0];
  const Mat& h = p.f[1];
  Point q{{c.inverse(), h}};  // (a, b) = (C^{-1}, h)

  REQUIRE(dist(fd->moment(p)[0], direct.moment(q)[0]) < 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    Tangent u = d3->random_tangent(rng, p);
    Tangent v = d3->random_tangent(rng, p);
    auto map = [&](const Tangent& t) {
      Tangent s = zero_tangent_like(q);
      s.xi[0] = -c * t.xi[0] * c.inverse();  // a = C^{-1}
      s.xi[1] = t.xi[1];
      return s;
    };
    Cx lhs = fd->omega(p, u, v);
    Cx rhs = direct.omega(q, map(u), map(v));
    REQUIRE(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("fusing with the trivial space changes nothing") {
  auto d2 = make_double(2);
  auto triv = std::make_shared<TrivialSpace>(2);
  auto fused = fuse_spaces(d2, 0, triv, 0);
  Rng rng(23);
  Point p = d2->random_point(rng);
  REQUIRE(dist(fused->moment(p)[0], d2->moment(p)[0]) < 1e-14);
  for (int trial = 0; trial < 3; ++trial) {
    Tangent u = d2->random_tangent(rng, p);
    Tangent v = d2->random_tangent(rng, p);
    REQUIRE(std::abs(fused->omega(p, u, v) - d2->omega(p, u, v)) < 1e-13);
  }
}

TEST_CASE("charts stay inside the space") {
  auto st = irr::singular_directions(two_level3());
  auto sp = make_stokes_space(st);
  Rng rng(29);
  Point p = sp->random_point(rng);
  REQUIRE(sp->contains(p));
  Chart chart(*sp, p);
  Vec x(chart.dim());
  for (int i = 0; i < x.size(); ++i) x(i) = rng.disk(0.05);
  REQUIRE(sp->contains(chart.at(x)));

  ConjugacyClassSpace cls(regular_rep3());
  Point g = cls.random_point(rng);
  REQUIRE(cls.contains(g));
  Chart cchart(cls, g);
  REQUIRE(cchart.dim() == 6);
  Vec y(cchart.dim());
  for (int i = 0; i < y.size(); ++i) y(i) = rng.disk(0.05);
  REQUIRE(cls.contains(cchart.at(y)));
}

TEST_CASE("chain space validates its inputs") {
  using lie::make_pattern;
  // Pattern outside the G support.
  REQUIRE_THROWS_AS(
      ChainSpace(3, {{0, 1}, {2}}, {{0, 1}, {2}}, {make_pattern(3, {{0, 2}})}),
      std::invalid_argument);
  // Pattern not H-stable: root inside an H block rectangle is missing.
  REQUIRE_THROWS_AS(
      ChainSpace(3, {{0, 1, 2}}, {{0, 1}, {2}}, {make_pattern(3, {{0, 2}})}),
      std::invalid_argument);
  // H must refine G.
  REQUIRE_THROWS_AS(ChainSpace(3, {{0, 1}, {2}}, {{0, 1, 2}}, {}),
                    std::invalid_argument);
  // A valid H-stable pattern is accepted.
  REQUIRE_NOTHROW(
      ChainSpace(3, {{0, 1, 2}}, {{0, 1}, {2}}, {make_pattern(3, {{0, 2}, {1, 2}})}));
}

TEST_CASE("determinism: same seed, same report") {
  auto sp = make_fission(2, {{0}, {1}}, 2);
  auto a = verify_space(*sp, 777);
  auto b = verify_space(*sp, 777);
  REQUIRE(a.to_json().dump() == b.to_json().dump());
}
