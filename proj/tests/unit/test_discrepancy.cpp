#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "l2disc/discrepancy.hpp"
#include "l2disc/errors.hpp"
#include "oracles.hpp"

using namespace l2disc;

namespace {

Rational q(long p, long d) { return Rational(p, d); }

PointSet set_of(std::initializer_list<std::pair<Rational, Rational>> pts) {
  std::vector<Point2> v;
  for (const auto& [x, y] : pts) v.push_back({Coord(x), Coord(y)});
  return PointSet(v);
}

}  // namespace

TEST_CASE("discrepancy_at small cases") {
  const PointSet origin = set_of({{0, 0}});
  auto d = discrepancy_at(origin, Corner{Coord(Rational(1)), Coord(Rational(1))});
  REQUIRE(d.exact);
  CHECK(*d.exact == 0);
  d = discrepancy_at(origin, Corner{Coord(q(1, 2)), Coord(q(1, 2))});
  CHECK(*d.exact == q(3, 4));

  // hammersley(2) = (0,0), (1/4,1/2), (1/2,1/4), (3/4,3/4): only the origin is
  // strictly below (1/2, 1/2), so the value is 1 - 4/4 = 0.
  const PointSet h2 = hammersley(2);
  const auto pts = oracle::coords(h2);
  d = discrepancy_at(h2, Corner{Coord(q(1, 2)), Coord(q(1, 2))});
  CHECK(*d.exact == 0);
  CHECK(oracle::discrepancy(pts, 0.5, 0.5) == 0.0);

  CHECK_THROWS_AS(discrepancy_at(origin, Corner{Coord(1.5), Coord(0.5)}), DomainError);
  CHECK_THROWS_AS(discrepancy_at(origin, Corner{Coord(0.5), Coord(-0.1)}), DomainError);

  // Float corners on float points give no exact value.
  const PointSet f({{0.1, 0.2}});
  d = discrepancy_at(f, Corner{Coord(0.5), Coord(0.5)});
  CHECK_FALSE(d.exact);
  CHECK(d.value == doctest::Approx(0.75));
}

TEST_CASE("discrepancy_at matches a direct count") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const PointSet s = random_uniform(1 + rng() % 30, rng());
    const auto pts = oracle::coords(s);
    const double x1 = u(rng);
    const double x2 = u(rng);
    CHECK(discrepancy_at(s, Corner{Coord(x1), Coord(x2)}).value ==
          doctest::Approx(oracle::discrepancy(pts, x1, x2)).epsilon(1e-14));
  }
}

TEST_CASE("l2_squared closed values") {
  CHECK(l2_squared_exact(set_of({{0, 0}})) == q(11, 18));
  CHECK(l2_squared(set_of({{0, 0}})) == doctest::Approx(11.0 / 18.0).epsilon(1e-15));
  const PointSet centre = set_of({{q(1, 2), q(1, 2)}});
  CHECK(l2_squared_exact(centre) == q(23, 288));
  CHECK(oracle::l2_squared(oracle::coords(centre)) == doctest::Approx(23.0 / 288.0).epsilon(1e-13));
}

TEST_CASE("l2_squared agrees with piecewise quadrature") {
  std::mt19937_64 rng(5);
  std::vector<PointSet> sets{hammersley(3), hammersley(5), fibonacci_lattice(8, true),
                             set_of({{q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}})};
  for (int t = 0; t < 20; ++t) sets.push_back(random_uniform(1 + rng() % 40, rng()));
  for (const auto& s : sets) {
    const double expected = oracle::l2_squared(oracle::coords(s));
    CHECK(l2_squared(s) == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("exact and float paths agree") {
  for (int n = 0; n <= 9; ++n) {
    const PointSet s = hammersley(n);
    const double e = l2_squared_exact(s).get_d();
    CHECK(std::abs(l2_squared(s) - e) <= 1e-12 * e);
  }
  for (int k = 3; k <= 14; ++k) {
    const PointSet s = fibonacci_lattice(k, true);
    const double e = l2_squared_exact(s).get_d();
    CHECK(std::abs(l2_squared(s) - e) <= 1e-12 * e);
  }
  // Float input goes through the exact path as the rationals it represents.
  const PointSet r = random_uniform(30, 9);
  std::vector<Point2> floats;
  for (const auto& p : r) floats.push_back({p.x.value(), p.y.value()});
  CHECK(l2_squared_exact(PointSet(floats)) == l2_squared_exact(r));
}

TEST_CASE("exact value is permutation invariant") {
  const PointSet s = fibonacci_lattice(9, true);
  std::vector<Point2> pts(s.begin(), s.end());
  const Rational base = l2_squared_exact(s);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    std::shuffle(pts.begin(), pts.end(), rng);
    CHECK(l2_squared_exact(PointSet(pts)) == base);
  }
}

TEST_CASE("Monte Carlo oracle") {
  const PointSet origin = set_of({{0, 0}});
  auto est = l2_oracle(origin, 1000000, 1);
  CHECK(est.samples == 1000000);
  CHECK(std::abs(est.mean - 11.0 / 18.0) <= 3.0 * est.std_error);

  const PointSet h3 = hammersley(3);
  est = l2_oracle(h3, 1000000, 2);
  CHECK(std::abs(est.mean - l2_squared(h3)) <= 3.0 * est.std_error);

  const PointSet dup = set_of({{q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}});
  est = l2_oracle(dup, 1000000, 3);
  CHECK(std::abs(est.mean - l2_squared(dup)) <= 3.0 * est.std_error);

  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const PointSet s = random_uniform(1 + rng() % 64, rng());
    est = l2_oracle(s, 100000, rng());
    CHECK(std::abs(est.mean - l2_squared(s)) <= 4.0 * est.std_error);
  }

  const auto a = l2_oracle(h3, 1000, 5);
  const auto b = l2_oracle(h3, 1000, 5);
  CHECK(a.mean == b.mean);
  CHECK_THROWS_AS(l2_oracle(h3, 0, 5), DomainError);
}

TEST_CASE("normalized ratio") {
  CHECK_THROWS_AS(normalized_ratio(set_of({{0, 0}})), DomainError);
  // Two points at the origin: sum 4 - 2 + 4/9 = 22/9.
  const PointSet two = set_of({{0, 0}, {0, 0}});
  CHECK(l2_squared_exact(two) == q(22, 9));
  CHECK(normalized_ratio(two) == doctest::Approx(std::sqrt(22.0 / 9.0 / std::log(2.0))));
  CHECK(normalized_ratio(two) > 0.5);

  const double fib = normalized_ratio(fibonacci_lattice(20, true));
  MESSAGE("symmetrized Fibonacci k = 20: ratio " << fib);
  CHECK(fib > 0.0515599);
  CHECK(fib < 1.0);
}
