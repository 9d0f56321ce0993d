#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "d2dsim/scenario.hpp"

using namespace d2dsim;

TEST_CASE("distance") {
  CHECK(distance({0, 0}, {0, 0}) == 0.0);
  CHECK(distance({0, 0}, {3, 4}) == 5.0);
  CHECK(distance({10, 0}, {10, 20}) == 20.0);
}

TEST_CASE("sector geometry validation and membership") {
  SectorGeometry s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.contains({100, 0}));
  CHECK(s.contains({100, 150}));   // 56 degrees
  CHECK_FALSE(s.contains({100, 200}));  // 63 degrees
  CHECK_FALSE(s.contains({600, 0}));
  CHECK_FALSE(s.contains({-10, 0}));

  SectorGeometry bad = s;
  bad.radius_m = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.arc_deg = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.arc_deg = 361;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("tri-sector cell covers three disjoint 120 degree sectors") {
  const auto cell = tri_sector_cell(500.0);
  for (int deg = 1; deg < 360; deg += 7) {
    const double a = deg * std::numbers::pi / 180.0;
    const Point p{300 * std::cos(a), 300 * std::sin(a)};
    int hits = 0;
    for (const auto& s : cell) hits += s.contains(p);
    CHECK(hits == 1);
  }
}

TEST_CASE("deploy_users") {
  SectorGeometry s;
  Rng rng(1);
  CHECK(deploy_users(s, 0, rng).empty());

  Rng a(42), b(42);
  const auto pa = deploy_users(s, 200, a);
  const auto pb = deploy_users(s, 200, b);
  CHECK(pa == pb);
  for (const auto& p : pa) CHECK(s.contains(p));
}

TEST_CASE("deploy_users is uniform over the area: mean radius is 2R/3") {
  SectorGeometry s;
  Rng rng(7);
  const auto pts = deploy_users(s, 10000, rng);
  double sum = 0;
  for (const auto& p : pts) sum += distance(p, s.apex);
  CHECK(sum / pts.size() == doctest::Approx(2.0 * 500.0 / 3.0).epsilon(0.015));
}

TEST_CASE("form_pairs follows the greedy scan") {
  SUBCASE("two users 10 m apart") {
    const std::vector<Point> u{{0, 0}, {10, 0}};
    const auto dep = form_pairs(u, 20.0);
    CHECK(dep.d() == 1);
    CHECK(dep.c() == 0);
    CHECK(dep.pairs[0].tx == u[0]);
    CHECK(dep.pairs[0].rx == u[1]);
  }
  SUBCASE("threshold is inclusive") {
    const std::vector<Point> u{{0, 0}, {20, 0}};
    CHECK(form_pairs(u, 20.0).d() == 1);
  }
  SUBCASE("three collinear users at 0, 15 and 25 m") {
    const std::vector<Point> u{{0, 0}, {15, 0}, {25, 0}};
    const auto dep = form_pairs(u, 20.0);
    CHECK(dep.d() == 1);
    CHECK(dep.c() == 1);
    CHECK(dep.cellular[0].location == u[2]);
  }
  SUBCASE("co-located users are not paired") {
    const std::vector<Point> u{{5, 5}, {5, 5}};
    const auto dep = form_pairs(u, 20.0);
    CHECK(dep.d() == 0);
    CHECK(dep.c() == 2);
  }
  SUBCASE("first qualifying later user wins, not the nearest") {
    const std::vector<Point> u{{0, 0}, {19, 0}, {1, 0}};
    const auto dep = form_pairs(u, 20.0);
    REQUIRE(dep.d() == 1);
    CHECK(dep.pairs[0].rx == u[1]);
    CHECK(dep.cellular[0].location == u[2]);
  }
}

TEST_CASE("form_pairs invariants over random drops") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    SectorGeometry s;
    s.radius_m = 100.0 + 10.0 * static_cast<double>(seed % 50);
    const std::size_t n = seed % 60;
    const auto users = deploy_users(s, n, rng);
    const auto dep = form_pairs(users, 20.0, s, 2);
    REQUIRE(2 * dep.d() + dep.c() == n);
    CHECK(dep.n_total == n);
    std::set<std::pair<double, double>> used;
    for (std::size_t j = 0; j < dep.d(); ++j) {
      const auto& p = dep.pairs[j];
      CHECK(p.id == j);
      CHECK(p.sector == 2);
      const double dist = distance(p.tx, p.rx);
      CHECK(dist > 0.0);
      CHECK(dist <= 20.0);
      CHECK(used.insert({p.tx.x, p.tx.y}).second);
      CHECK(used.insert({p.rx.x, p.rx.y}).second);
    }
    for (std::size_t i = 0; i < dep.c(); ++i) {
      CHECK(dep.cellular[i].id == i);
      CHECK(used.insert({dep.cellular[i].location.x, dep.cellular[i].location.y}).second);
    }
  }
}
