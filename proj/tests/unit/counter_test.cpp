#include <gtest/gtest.h>

#include "dioph/counter.hpp"
#include "dioph/errors.hpp"

using namespace dioph;

namespace {

std::uint64_t both(const MongeMap& map, const ApproxFunction& psi, const Shift& theta, std::int64_t q) {
  const auto exact = count_A_exact(map, psi, theta, q);
  const auto pruned = count_A_pruned(map, psi, theta, q);
  EXPECT_EQ(exact.A, pruned.A);
  EXPECT_EQ(exact.borderline, pruned.borderline);
  return exact.A;
}

}  // namespace

TEST(IndexSet, Sizes) {
  EXPECT_EQ(IndexSet(2, std::vector<Rational>{Rational(0)}).size(), 3u);
  EXPECT_EQ(IndexSet(2, std::vector<Rational>{Rational(1, 2)}).size(), 2u);
  EXPECT_EQ(IndexSet(3, std::vector<Rational>{Rational(0), Rational(1, 5)}).size(), 12u);
}

TEST(Counter, HandEnumeratedParabola) {
  const auto parabola = presets::parabola();
  EXPECT_EQ(both(parabola, parse_psi("table:{2:2/5}"), Shift::zero(1, 1), 2), 2u);
  const auto five = count_A_exact(parabola, parse_psi("table:{5:1/5}"), Shift::zero(1, 1), 5);
  EXPECT_EQ(five.A, 2u);
  EXPECT_EQ(five.borderline, 4u);
  EXPECT_EQ(both(parabola, parse_psi("const:1/5"), parse_shift("1/2,0", 1, 1), 2), 2u);
}

TEST(Counter, RationalArithmeticAgrees) {
  const auto parabola = presets::parabola();
  CountOptions exact;
  exact.arithmetic = Arithmetic::rational;
  const auto psi = parse_psi("powlog:1/3:2/3");
  for (std::int64_t q : {7, 50, 97}) {
    EXPECT_EQ(count_A_exact(parabola, psi, Shift::zero(1, 1), q, exact).A,
              count_A_exact(parabola, psi, Shift::zero(1, 1), q).A);
  }
}

// tests/oracle/oracle.py, integer enumeration with a 60-digit ψ.
TEST(Counter, OracleParabolaThousand) {
  const auto psi = parse_psi("powlog:1/3:2/3");
  EXPECT_EQ(both(presets::parabola(), psi, Shift::zero(1, 1), 1000), 715u);
  EXPECT_EQ(both(presets::parabola(), psi, parse_shift("1/3,2/7", 1, 1), 1000), 721u);
}

TEST(Counter, OracleNAtFiveHundred) {
  const auto n = count_N(presets::parabola(), parse_psi("powlog:1/3:2/3"), Shift::zero(1, 1), 500);
  EXPECT_EQ(n.N, 292287u);
  EXPECT_EQ(n.rows.size(), 500u);
}

TEST(Counter, NOnSparseSupport) {
  const auto psi = parse_psi("const:2/5", "set:{1,2}");
  EXPECT_EQ(count_N(presets::parabola(), psi, Shift::zero(1, 1), 1).N, 2u);
  EXPECT_EQ(count_N(presets::parabola(), psi, Shift::zero(1, 1), 3).N, 0u);
}

TEST(Counter, PrunedParaboloidVisitsLessThanHalf) {
  const auto map = presets::paraboloid(2);
  const auto psi = parse_psi("const:1/10");
  const auto pruned = count_A_pruned(map, psi, Shift::zero(2, 1), 300);
  EXPECT_EQ(pruned.A, 18177u);
  EXPECT_LT(static_cast<double>(pruned.visited), 0.5 * 301.0 * 301.0);
}

TEST(Counter, Heuristic) {
  EXPECT_DOUBLE_EQ(heuristic_estimate(0.2, 100, 1, 1), 20.0);
  EXPECT_DOUBLE_EQ(heuristic_estimate(0.5, 10, 2, 1), 50.0);
  EXPECT_NEAR(heuristic_estimate(0.1, 10, 3, 2), 10.0, 1e-12);
}

TEST(Counter, EdgeCases) {
  const auto parabola = presets::parabola();
  const auto miss = count_A_exact(parabola, parse_psi("table:{5:1/5}"), Shift::zero(1, 1), 6);
  EXPECT_TRUE(miss.support_miss);
  EXPECT_EQ(miss.A, 0u);
  EXPECT_THROW(count_A_exact(parabola, parse_psi("const:1"), Shift::zero(1, 1), 3), InputError);
  const auto wide = count_A_exact(parabola, parse_psi("const:3/4"), Shift::zero(1, 1), 4);
  EXPECT_TRUE(wide.psi_above_half);
  EXPECT_EQ(wide.A, 5u);
}

TEST(Counter, ThreadCountDoesNotChangeResults) {
  const auto map = presets::paraboloid(2);
  const auto psi = parse_psi("pow:1/2");
  CountOptions one;
  one.threads = 1;
  CountOptions many;
  many.threads = 7;
  const auto a = count_A_pruned(map, psi, parse_shift("1/3,1/5,1/7", 2, 1), 200, one);
  const auto b = count_A_pruned(map, psi, parse_shift("1/3,1/5,1/7", 2, 1), 200, many);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.visited, b.visited);
}
