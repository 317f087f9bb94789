#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dioph/counter.hpp"
#include "dioph/errors.hpp"
#include "dioph/expsum.hpp"
#include "dioph/rng.hpp"

using namespace dioph;

TEST(BlockParams, Formulae) {
  const auto a = block_params(100, 0.2, 1.0);
  EXPECT_EQ(a.regime, Regime::main);
  EXPECT_DOUBLE_EQ(a.delta, 1.0);
  EXPECT_EQ(a.r, 4);
  EXPECT_EQ(a.H, 2);
  EXPECT_EQ(a.s_blocks, 25);
  const auto b = block_params(1000, 0.1, 2.0);
  EXPECT_EQ(b.r, 7);
  EXPECT_EQ(b.H, 5);
  EXPECT_EQ(b.s_blocks, 142);
  EXPECT_EQ(block_params(10, 0.01, 10.0).regime, Regime::trivial);
  EXPECT_EQ(block_params(100, 0.2, 1.0, FejerWindow::half).H, 1);
  EXPECT_THROW(block_params(10, 0.6, 1.0), InputError);
}

TEST(BlockParams, Decompose) {
  const std::vector<std::int64_t> a{13};
  EXPECT_EQ(decompose(a, 4).u, (std::vector<std::int64_t>{3}));
  EXPECT_EQ(decompose(a, 4).v, (std::vector<std::int64_t>{1}));
  const std::vector<std::int64_t> b{0, 7};
  EXPECT_EQ(decompose(b, 4).u, (std::vector<std::int64_t>{0, 1}));
  EXPECT_EQ(decompose(b, 4).v, (std::vector<std::int64_t>{0, 3}));
  const std::vector<std::int64_t> c{8};
  EXPECT_EQ(decompose(c, 4).v, (std::vector<std::int64_t>{0}));
}

TEST(Blocks, PartitionAndInclusionOnParabola) {
  const auto map = presets::parabola();
  const auto psi = PsiValue::from_rational(Rational(1, 4));
  const auto params = block_params(64, 0.25, 2.0);
  ASSERT_EQ(params.r, 2);
  std::uint64_t total = 0;
  for (std::int64_t u = 0; u <= params.s_blocks; ++u) {
    const std::vector<std::int64_t> uu{u};
    const auto A = count_A_u(map, psi, Shift::zero(1, 1), params, uu);
    EXPECT_LE(A, count_B_u(map, psi, Shift::zero(1, 1), params, uu)) << u;
    total += A;
  }
  EXPECT_EQ(total, count_A_exact(map, parse_psi("const:1/4"), Shift::zero(1, 1), 64).A);
  const std::vector<std::int64_t> outside{params.s_blocks + 1};
  EXPECT_EQ(count_A_u(map, psi, Shift::zero(1, 1), params, outside), 0u);
  EXPECT_EQ(count_A_u(map, PsiValue::from_rational(Rational(0)), Shift::zero(1, 1), params,
                      std::vector<std::int64_t>{0}),
            0u);
}

TEST(Blocks, SaturatedBCountsEveryV) {
  const auto map = presets::paraboloid(2);
  const auto params = block_params(400, 0.5, 2.0);
  const std::vector<std::int64_t> u{3, 5};
  EXPECT_EQ(count_B_u(map, PsiValue::from_rational(Rational(1, 2)), Shift::zero(2, 1), params, u),
            static_cast<std::uint64_t>(params.r * params.r));
}

TEST(BStar, SingleTermWindow) {
  // ψ = 1/2 gives H = 1, and δqψ = 2 makes r = 1.
  const auto params = block_params(40, 0.5, 10.0);
  ASSERT_EQ(params.H, 1);
  ASSERT_EQ(params.r, 1);
  const auto b = eval_B_star_u(presets::parabola(), parse_shift("1/3,1/7", 1, 1), params, std::vector<std::int64_t>{9});
  EXPECT_NEAR(b.value, 1.0, 1e-14);
}

// tests/oracle/oracle.py: direct 60-digit evaluation of both orders.
TEST(BStar, OracleParabolaBlockFive) {
  const auto params = block_params(64, 0.25, 2.0);
  const auto b = eval_B_star_u(presets::parabola(), Shift::zero(1, 1), params, std::vector<std::int64_t>{5});
  EXPECT_NEAR(b.value, 0.89161362433763038414, 1e-10 * 0.8916);
  EXPECT_NEAR(b.fejer_product, b.value, 1e-10 * b.value);
  EXPECT_LT(b.imag_residue, 1e-9 * (1.0 + b.value));
}

TEST(BStar, NonNegativeWithSmallResidue) {
  const auto map = presets::paraboloid(2);
  const auto params = block_params(256, 0.125, 8.8);
  ASSERT_EQ(params.regime, Regime::main);
  const Shift theta = parse_shift("1/3,2/5,1/7", 2, 1);
  for (std::int64_t u0 = 0; u0 <= params.s_blocks; u0 += 7) {
    const std::vector<std::int64_t> u{u0, params.s_blocks - u0};
    const auto b = eval_B_star_u(map, theta, params, u);
    EXPECT_GE(b.value, -1e-12);
    EXPECT_LT(b.imag_residue, 1e-9 * (1.0 + b.value));
    EXPECT_NEAR(b.value, b.fejer_product, 1e-10 * (1.0 + b.value));
    EXPECT_LE(b.value, b.majorant * (1.0 + 1e-12));
  }
}

TEST(BStar, BudgetIsEnforced) {
  const auto params = block_params(100000, 0.001, 2.0);
  EXPECT_THROW(eval_B_star_u(presets::paraboloid(2), Shift::zero(2, 1), params, std::vector<std::int64_t>{0, 0}, 1e4),
               BudgetError);
}

TEST(Fejer, KernelValues) {
  EXPECT_EQ(fejer_kernel(0.0, 7), 1.0);
  EXPECT_EQ(fejer_kernel(3.0, 7), 1.0);
  EXPECT_NEAR(fejer_kernel(0.25, 2), 0.5, 1e-15);
  EXPECT_NEAR(fejer_kernel(1.0 / 3.0, 3), 0.0, 1e-15);
  EXPECT_GE(fejer_kernel(0.25, 2), 4.0 / (std::numbers::pi * std::numbers::pi));
}

TEST(Fejer, LowerBoundOnTheHalfWindow) {
  const CounterRng rng(5);
  const double floor = 4.0 / (std::numbers::pi * std::numbers::pi);
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const auto H = static_cast<std::int64_t>(1 + rng.bits(2 * k) % 50);
    const double x = (2.0 * rng.uniform(2 * k + 1) - 1.0) / (2.0 * static_cast<double>(H));
    ASSERT_GE(fejer_kernel(x, H), floor - 1e-12) << x << ' ' << H;
  }
}

TEST(Fejer, LowerBoundFailsBeyondTheHalfWindow) {
  // At ‖x‖ = 1/H the kernel vanishes for every H >= 2.
  for (std::int64_t H = 2; H <= 50; ++H) EXPECT_LT(fejer_kernel(1.0 / static_cast<double>(H), H), 1e-20);
}

TEST(Geometric, Values) {
  EXPECT_EQ(geometric_sum_magnitude(0.0, 7), 7.0);
  EXPECT_NEAR(geometric_sum_magnitude(0.5, 2), 0.0, 1e-15);
  EXPECT_NEAR(geometric_sum_magnitude(0.25, 4), 0.0, 1e-15);
  const CounterRng rng(9);
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const auto r = static_cast<std::int64_t>(1 + rng.bits(2 * k) % 300);
    const double rho = 20.0 * rng.uniform(2 * k + 1) - 10.0;
    const double dist = std::abs(rho - std::nearbyint(rho));
    const double bound = std::min(static_cast<double>(r), 1.0 / (2.0 * dist));
    ASSERT_LE(geometric_sum_magnitude(rho, r), bound * (1.0 + 1e-12));
  }
}

TEST(TheoremBounds, Formulae) {
  EXPECT_NEAR(bound_thm11(100, 0.2, 1, 1), 20.0 + 100.0 / std::sqrt(20.0) * std::log(20.0), 1e-9);
  EXPECT_NEAR(bound_thm11(100, 0.2, 1, 1), 86.99, 0.01);
  EXPECT_NEAR(bound_thm14(100, 0.2, 2), 6487.0, 0.5);
  EXPECT_NEAR(bound_thm11(10, 0.05, 1, 1), 14.64, 0.01);
}

TEST(Chain, ParabolaFullWindowReportsFejerFailures) {
  ChainOptions o;
  o.window = FejerWindow::full;
  const auto s = run_chain(presets::parabola(), PsiValue::from_rational(Rational(1, 4)), Shift::zero(1, 1), 64, 2.0, o);
  EXPECT_TRUE(s.mvt_ok);
  EXPECT_TRUE(s.partition_ok());
  EXPECT_EQ(s.inclusion_violations, 0u);
  EXPECT_EQ(s.residue_violations, 0u);
  EXPECT_EQ(s.majorant_violations, 0u);
  // H = ⌊1/(2ψ)⌋ lets 2ψ reach 1/H, where the Fejér kernel vanishes.
  EXPECT_EQ(s.fejer_violations, 10u);
}

TEST(Chain, HalfWindowHolds) {
  ChainOptions o;
  o.window = FejerWindow::half;
  for (std::int64_t q : {64, 128, 256}) {
    const auto s = run_chain(presets::paraboloid(2), PsiValue::from_rational(Rational(1, 8)),
                             parse_shift("1/5,1/3,1/2", 2, 1), q, 8.8, o);
    EXPECT_TRUE(s.all_ok()) << q;
  }
}

TEST(Chain, TrivialRegimeHasNoRows) {
  const auto s = run_chain(presets::parabola(), PsiValue::from_rational(Rational(1, 4)), Shift::zero(1, 1), 5, 2.0);
  EXPECT_EQ(s.params.regime, Regime::trivial);
  EXPECT_TRUE(s.rows.empty());
  EXPECT_TRUE(s.all_ok());
}
