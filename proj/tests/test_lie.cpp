#include <catch_amalgamated.hpp>

#include "wildcat/lie/factorize.hpp"
#include "wildcat/lie/parabolic.hpp"

using namespace wildcat;
using namespace wildcat::lie;

TEST_CASE("partitions") {
  auto full = full_partition(4);
  REQUIRE(full.size() == 1);
  REQUIRE(partition_dim(full) == 16);
  auto fine = finest_partition(3);
  REQUIRE(fine.size() == 3);
  REQUIRE(partition_dim(fine) == 3);
  Partition two{{0, 1}, {2}};
  REQUIRE(partition_dim(two) == 5);
  REQUIRE(refines(fine, two, 3));
  REQUIRE(refines(two, full_partition(3), 3));
  REQUIRE_FALSE(refines(two, fine, 3));
  auto owner = part_of(two, 3);
  REQUIRE(owner == std::vector<int>({0, 0, 1}));
}

TEST_CASE("pattern validation") {
  auto tri = make_pattern(3, {{0, 1}, {0, 2}, {1, 2}});
  REQUIRE(is_acyclic(tri));
  REQUIRE(is_closed(tri));
  REQUIRE_NOTHROW(validate_pattern(tri));

  auto cyc = make_pattern(2, {{0, 1}, {1, 0}});
  REQUIRE_FALSE(is_acyclic(cyc));
  REQUIRE_THROWS_AS(validate_pattern(cyc), std::invalid_argument);

  auto open = make_pattern(3, {{0, 1}, {1, 2}});
  REQUIRE(is_acyclic(open));
  REQUIRE_FALSE(is_closed(open));
  REQUIRE_THROWS_AS(validate_pattern(open), std::invalid_argument);

  auto opp = opposite(tri);
  REQUIRE(opp.contains(1, 0));
  REQUIRE(opp.contains(2, 0));
  REQUIRE(opp.contains(2, 1));
  REQUIRE(disjoint(tri, opp));
  REQUIRE(pattern_union(tri, opp).size() == 6);
}

TEST_CASE("root heights order composite roots later") {
  auto tri = make_pattern(3, {{0, 1}, {0, 2}, {1, 2}});
  auto hs = root_heights(tri);
  REQUIRE(hs.size() == 3);
  // (0,2) = (0,1) + (1,2) must come strictly after the simple roots.
  REQUIRE(hs.back().first == Root(0, 2));
}

TEST_CASE("pattern and levi membership") {
  auto tri = make_pattern(3, {{0, 1}, {0, 2}, {1, 2}});
  Rng rng(7);
  Mat u = rand_unipotent(rng, tri);
  REQUIRE(in_pattern_group(u, tri));
  REQUIRE_FALSE(in_pattern_group(u.transpose(), tri));
  Partition two{{0, 1}, {2}};
  Mat g = rand_levi(rng, two, 3);
  REQUIRE(in_levi(g, two, 1e-12));
  REQUIRE(std::abs(g(0, 2)) == 0.0);
}

TEST_CASE("parabolic from cocharacter") {
  auto par = parabolic_from_cocharacter({1.0, 1.0, 0.0});
  REQUIRE(par.levi == Partition({{0, 1}, {2}}));
  REQUIRE(par.radical.roots == std::set<Root>({{0, 2}, {1, 2}}));
  REQUIRE(par.opposite_radical.roots == std::set<Root>({{2, 0}, {2, 1}}));

  // Unordered weights get sorted descending; the permutation records it.
  auto mixed = parabolic_from_cocharacter({0.0, 2.0, 1.0});
  REQUIRE(mixed.levi == Partition({{1}, {2}, {0}}));
  REQUIRE(mixed.radical.contains(1, 2));
  REQUIRE(mixed.radical.contains(1, 0));
  REQUIRE(mixed.radical.contains(2, 0));
  REQUIRE(mixed.radical.size() == 3);
}

namespace {

Mat elem3(int i, int j, Cx v) {
  Mat m = eye(3);
  m(i, j) = v;
  return m;
}

}  // namespace

TEST_CASE("triangle factorization, frozen by hand") {
  // u = (1 + x e12)(1 + y e23) = 1 + x e12 + y e23 + xy e13.
  Cx x(0.37, -1.2), y(0.81, 0.44);
  Mat u = elem3(0, 1, x) * elem3(1, 2, y);
  auto p12 = make_pattern(3, {{0, 1}});
  auto p13 = make_pattern(3, {{0, 2}});
  auto p23 = make_pattern(3, {{1, 2}});

  SECTION("descending order isolates +xy") {
    auto fs = direct_span_factorize(u, {p23, p13, p12});
    REQUIRE(fs.size() == 3);
    REQUIRE(std::abs(fs[0](1, 2) - y) < 1e-14);
    REQUIRE(std::abs(fs[1](0, 2) - x * y) < 1e-14);
    REQUIRE(std::abs(fs[2](0, 1) - x) < 1e-14);
    REQUIRE(dist(fs[0] * fs[1] * fs[2], u) < 1e-14);
  }

  SECTION("opposite rotation isolates -xy") {
    Mat u2 = elem3(1, 2, y) * elem3(0, 1, x);
    auto fs = direct_span_factorize(u2, {p12, p13, p23});
    REQUIRE(std::abs(fs[0](0, 1) - x) < 1e-14);
    REQUIRE(std::abs(fs[1](0, 2) + x * y) < 1e-14);
    REQUIRE(std::abs(fs[2](1, 2) - y) < 1e-14);
    REQUIRE(dist(fs[0] * fs[1] * fs[2], u2) < 1e-14);
  }
}

TEST_CASE("factorization roundtrip on random products") {
  Rng rng(2024);
  // Columns of the upper triangle of gl_4: each is closed, union is the
  // full triangle.
  std::vector<UnipotentPattern> cols;
  for (int j = 1; j < 4; ++j) {
    std::vector<Root> roots;
    for (int i = 0; i < j; ++i) roots.push_back({i, j});
    cols.push_back(make_pattern(4, roots));
  }
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Mat> fs;
    Mat u = eye(4);
    for (const auto& p : cols) {
      fs.push_back(rand_unipotent(rng, p, 1.0));
      u = u * fs.back();
    }
    auto got = direct_span_factorize(u, cols);
    for (size_t i = 0; i < fs.size(); ++i) REQUIRE(dist(got[i], fs[i]) < 1e-12);
  }
}

TEST_CASE("factorization with jets propagates derivatives") {
  Rng rng(99);
  auto p12 = make_pattern(3, {{0, 1}});
  auto p13 = make_pattern(3, {{0, 2}});
  auto p23 = make_pattern(3, {{1, 2}});
  std::vector<UnipotentPattern> order{p23, p13, p12};

  // u(t) = (1 + (x+t dx) e12)(1 + (y+t dy) e23); compare the jet of each
  // factor against a central difference.
  Cx x(0.3, 0.2), y(-0.7, 0.5), dx(1.1, -0.4), dy(0.25, 0.9);
  auto u_at = [&](double t) {
    return Mat(elem3(0, 1, x + t * dx) * elem3(1, 2, y + t * dy));
  };
  const double h = 1e-6;
  Mat du = (u_at(h) - u_at(-h)) / (2 * h);
  JMat u{u_at(0.0), du};
  auto fs = direct_span_factorize_jet(u, order);
  auto f0 = direct_span_factorize(u_at(h), order);
  auto f1 = direct_span_factorize(u_at(-h), order);
  for (size_t i = 0; i < fs.size(); ++i) {
    REQUIRE(dist(fs[i].v, direct_span_factorize(u_at(0.0), order)[i]) < 1e-12);
    REQUIRE(dist(fs[i].d, (f0[i] - f1[i]) / (2 * h)) < 1e-8);
  }
}

TEST_CASE("factorization rejects bad inputs") {
  auto p12 = make_pattern(3, {{0, 1}});
  auto p13 = make_pattern(3, {{0, 2}});
  auto p23 = make_pattern(3, {{1, 2}});
  Mat u = eye(3);
  u(2, 0) = 1.0;  // support outside the union
  REQUIRE_THROWS_AS(direct_span_factorize(u, {p12, p13, p23}), std::invalid_argument);

  // Union must be closed under addition of roots.
  Mat w = eye(3);
  w(0, 1) = 0.5;
  REQUIRE_THROWS_AS(direct_span_factorize(w, {p12, p23}), std::invalid_argument);

  // Union with a cycle is rejected even if each piece is fine.
  auto p21 = make_pattern(3, {{1, 0}});
  Mat v = eye(3);
  v(0, 1) = 0.5;
  REQUIRE_THROWS_AS(direct_span_factorize(v, {p12, p21}), std::invalid_argument);

  // Overlapping patterns are rejected.
  REQUIRE_THROWS_AS(direct_span_factorize(v, {p12, p12}), std::invalid_argument);
}
