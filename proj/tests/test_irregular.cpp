#include <catch_amalgamated.hpp>

#include "wildcat/irregular/directions.hpp"

using namespace wildcat;
using namespace wildcat::irr;
using lie::Root;

namespace {

const double PI = std::acos(-1.0);

IrregularType gl2_simple() {
  // diag(1,-1)/z
  return make_irregular(2, {{1, {Cx(1), Cx(-1)}}});
}

IrregularType gl2_order2() {
  // diag(1,-1)/z^2
  return make_irregular(2, {{2, {Cx(1), Cx(-1)}}});
}

IrregularType gl3_corank() {
  // diag(0,0,1)/z
  return make_irregular(3, {{1, {Cx(0), Cx(0), Cx(1)}}});
}

IrregularType gl3_two_level() {
  // diag(1,1,-2)/z^2 + diag(0,1,3)/z
  return make_irregular(3, {{2, {Cx(1), Cx(1), Cx(-2)}}, {1, {Cx(0), Cx(1), Cx(3)}}});
}

IrregularType gl3_full_simple() {
  // diag(0,1,2)/z
  return make_irregular(3, {{1, {Cx(0), Cx(1), Cx(2)}}});
}

}  // namespace

TEST_CASE("root tails and centralizers") {
  auto q = gl3_two_level();
  auto t01 = q_alpha(q, {0, 1});
  REQUIRE(t01.degree == 1);
  REQUIRE(std::abs(t01.leading - Cx(-1)) < 1e-14);
  auto t02 = q_alpha(q, {0, 2});
  REQUIRE(t02.degree == 2);
  REQUIRE(std::abs(t02.leading - Cx(3)) < 1e-14);
  REQUIRE(total_degree(q) == 10);

  REQUIRE(centralizer(q) == lie::Partition({{0}, {1}, {2}}));
  REQUIRE(centralizer(gl3_corank()) == lie::Partition({{0, 1}, {2}}));

  auto chain = levi_chain(q);
  REQUIRE(chain.levels.size() == 2);
  REQUIRE(chain.levels[0] == lie::Partition({{0}, {1}, {2}}));
  REQUIRE(chain.levels[1] == lie::Partition({{0, 1}, {2}}));
  REQUIRE(chain.complements[0] == std::vector<Root>({{0, 1}, {1, 0}}));
  REQUIRE(chain.complements[1] ==
          std::vector<Root>({{0, 2}, {1, 2}, {2, 0}, {2, 1}}));
}

TEST_CASE("singular directions of the rank-two example") {
  auto st = singular_directions(gl2_simple());
  REQUIRE(st.count() == 2);
  REQUIRE(std::abs(st.dirs[0].angle - 0.0) < 1e-12);
  REQUIRE(std::abs(st.dirs[1].angle - PI) < 1e-12);
  REQUIRE(st.dirs[0].support == std::vector<Root>({{1, 0}}));
  REQUIRE(st.dirs[1].support == std::vector<Root>({{0, 1}}));
  // Default cut sits in the gap before the first direction.
  REQUIRE(std::abs(st.cut - 1.5 * PI) < 1e-12);
}

TEST_CASE("degenerate eigenvalues merge supports") {
  auto st = singular_directions(gl3_corank());
  REQUIRE(st.count() == 2);
  REQUIRE(st.dirs[0].support == std::vector<Root>({{0, 2}, {1, 2}}));
  REQUIRE(st.dirs[1].support == std::vector<Root>({{2, 0}, {2, 1}}));
  for (const auto& d : st.dirs) REQUIRE_FALSE(d.multi_level());
}

TEST_CASE("two-level example: counts, supports, closedness") {
  auto st = singular_directions(gl3_two_level());
  REQUIRE(st.count() == 4);
  std::vector<double> want_angles{0.0, 0.5 * PI, PI, 1.5 * PI};
  // Directions are listed from the cut; collect by absolute angle.
  std::vector<std::vector<Root>> by_angle(4);
  for (const auto& d : st.dirs) {
    for (int i = 0; i < 4; ++i)
      if (std::abs(d.angle - want_angles[i]) < 1e-9) by_angle[i] = d.support;
  }
  REQUIRE(by_angle[0] == std::vector<Root>({{0, 1}, {2, 0}, {2, 1}}));
  REQUIRE(by_angle[1] == std::vector<Root>({{0, 2}, {1, 2}}));
  REQUIRE(by_angle[2] == std::vector<Root>({{1, 0}, {2, 0}, {2, 1}}));
  REQUIRE(by_angle[3] == std::vector<Root>({{0, 2}, {1, 2}}));

  REQUIRE(st.total_support() == total_degree(st.q));

  int multi = 0;
  for (const auto& d : st.dirs) {
    REQUIRE(lie::is_closed(d.pattern(3)));
    REQUIRE(lie::is_acyclic(d.pattern(3)));
    if (d.multi_level()) ++multi;
  }
  REQUIRE(multi == 2);  // the directions at 0 and pi mix pole orders

  // Per-level slices of the direction at angle 0.
  for (const auto& d : st.dirs) {
    if (std::abs(d.angle) < 1e-9) {
      REQUIRE(d.by_level.at(1) == std::vector<Root>({{0, 1}}));
      REQUIRE(d.by_level.at(2) == std::vector<Root>({{2, 0}, {2, 1}}));
    }
  }
}

TEST_CASE("direction count identity on random diagonal types") {
  Rng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng.unit() * 3);
    std::vector<std::pair<int, std::vector<Cx>>> terms;
    int depth = 1 + static_cast<int>(rng.unit() * 2);
    for (int k = depth; k >= 1; --k) {
      std::vector<Cx> a;
      for (int i = 0; i < n; ++i) a.push_back(rng.disk(2.0));
      terms.push_back({k, a});
    }
    auto q = make_irregular(n, terms);
    auto st = singular_directions(q);
    REQUIRE(st.total_support() == total_degree(q));
    for (const auto& d : st.dirs) {
      REQUIRE(lie::is_closed(d.pattern(n)));
      REQUIRE(lie::is_acyclic(d.pattern(n)));
    }
  }
}

TEST_CASE("one-level directions are evenly spaced by pi/k") {
  auto st = singular_directions(gl2_order2());
  REQUIRE(st.count() == 4);
  for (int i = 0; i + 1 < st.count(); ++i) {
    double gap = st.dirs[i + 1].from_cut - st.dirs[i].from_cut;
    REQUIRE(std::abs(gap - 0.5 * PI) < 1e-9);
  }
}

TEST_CASE("half-period supports are parabolic radicals") {
  SECTION("rank two, order one") {
    auto st = singular_directions(gl2_simple());
    for (int start = 0; start < st.count(); ++start) {
      auto hp = half_period_parabolic(st, start);
      REQUIRE(hp.matches);
    }
    auto hp = half_period_parabolic(st, 0);
    REQUIRE(hp.union_pattern.roots == st.dirs[0].pattern(2).roots);
  }
  SECTION("rank two, order two") {
    auto st = singular_directions(gl2_order2());
    for (int start = 0; start < st.count(); ++start)
      REQUIRE(half_period_parabolic(st, start).matches);
  }
  SECTION("rank three full flag") {
    auto st = singular_directions(gl3_full_simple());
    REQUIRE(st.count() == 2);
    for (int start = 0; start < st.count(); ++start) {
      auto hp = half_period_parabolic(st, start);
      REQUIRE(hp.matches);
      REQUIRE(hp.union_pattern.size() == 3);
    }
  }
  SECTION("multi-level input is refused") {
    auto st = singular_directions(gl3_two_level());
    REQUIRE_THROWS_AS(half_period_parabolic(st, 0), std::invalid_argument);
  }
}

TEST_CASE("positivity cocharacter dominates the support") {
  auto check = [](const StokesStructure& st) {
    for (int d = 0; d < st.count(); ++d) {
      auto lambda = positivity_cocharacter(st, d);
      for (const auto& r : st.dirs[d].support)
        REQUIRE(root_pairing(lambda, r) > 0.0);
    }
  };
  check(singular_directions(gl2_simple()));
  check(singular_directions(gl2_order2()));
  check(singular_directions(gl3_corank()));
  check(singular_directions(gl3_two_level()));
  check(singular_directions(gl3_full_simple()));
}

TEST_CASE("json roundtrip") {
  auto q = gl3_two_level();
  auto j = irregular_to_json(q);
  auto q2 = irregular_from_json(j);
  REQUIRE(q2.n == q.n);
  REQUIRE(q2.ks == q.ks);
  for (size_t t = 0; t < q.As.size(); ++t)
    REQUIRE((q2.As[t] - q.As[t]).norm() < 1e-15);

  REQUIRE_THROWS(irregular_from_json(nlohmann::json{{"terms", nlohmann::json::array()}}));
  auto bad = j;
  bad["terms"][0]["k"] = 0;
  REQUIRE_THROWS(irregular_from_json(bad));
  // Unknown keys are rejected; a typo must not silently read as a tame point.
  REQUIRE_THROWS(irregular_from_json(nlohmann::json{{"n", 2}, {"term", nlohmann::json::array()}}));
  auto extra = j;
  extra["terms"][0]["coefficients"] = 1;
  REQUIRE_THROWS(irregular_from_json(extra));
  // A type with no terms is legitimately tame.
  auto tame = irregular_from_json(nlohmann::json{{"n", 2}});
  REQUIRE(tame.levels() == 0);
  REQUIRE(total_degree(tame) == 0);
}

TEST_CASE("explicit cut override") {
  auto st = singular_directions(gl2_simple(), 0.25 * PI);
  REQUIRE(std::abs(st.cut - 0.25 * PI) < 1e-15);
  // From the cut at pi/4 the first direction met is pi.
  REQUIRE(std::abs(st.dirs[0].angle - PI) < 1e-12);
  REQUIRE(std::abs(st.dirs[0].from_cut - 0.75 * PI) < 1e-12);
  REQUIRE(std::abs(st.dirs[1].angle - 0.0) < 1e-12);
  REQUIRE(std::abs(st.dirs[1].from_cut - 1.75 * PI) < 1e-12);
}
