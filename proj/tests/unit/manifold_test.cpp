#include <gtest/gtest.h>

#include "dioph/errors.hpp"
#include "dioph/manifold.hpp"
#include "dioph/rng.hpp"

using namespace dioph;

namespace {

std::vector<Rational> point(std::initializer_list<Rational> xs) { return xs; }

}  // namespace

TEST(Manifold, EvaluatesPresets) {
  const auto a = point({Rational(1, 2)});
  EXPECT_EQ(evaluate(presets::parabola(), a)[0], Rational(1, 4));
  const auto b = point({Rational(0), Rational(1)});
  EXPECT_EQ(evaluate(presets::paraboloid(2), b)[0], Rational(1));

  Polynomial x2(2), xy(2), y2(2);
  x2.add_term(std::vector<int>{2, 0}, Rational(1));
  xy.add_term(std::vector<int>{1, 1}, Rational(1));
  y2.add_term(std::vector<int>{0, 2}, Rational(1));
  const MongeMap veronese(2, {x2, xy, y2});
  const auto c = point({Rational(1, 2), Rational(1, 3)});
  const auto v = evaluate(veronese, c);
  EXPECT_EQ(v, (std::vector<Rational>{Rational(1, 4), Rational(1, 6), Rational(1, 9)}));
}

TEST(Manifold, RejectsPointsOutsideTheUnitCube) {
  const auto a = point({Rational(3, 2)});
  EXPECT_THROW(evaluate(presets::parabola(), a), InputError);
}

TEST(Manifold, JacobianCondition) {
  const auto a = point({Rational(1, 3)});
  EXPECT_EQ(jacobian_condition_value(presets::parabola(), a), Rational(2));
  const auto b = point({Rational(1, 5), Rational(4, 5)});
  EXPECT_EQ(jacobian_condition_value(presets::paraboloid(2), b), Rational(2));
  const auto surface = presets::veronese_counterexample(1);
  const auto c = point({Rational(1, 7), Rational(2, 9), Rational(5, 11)});
  EXPECT_EQ(jacobian_condition_value(surface, c), Rational(0));
  EXPECT_THROW(jacobian_condition_value(presets::moment_curve(3), point({Rational(1, 2)})), ShapeError);
}

TEST(Manifold, HessianCondition) {
  EXPECT_EQ(hessian_condition_value(presets::paraboloid(2), point({Rational(1, 3), Rational(1, 9)})), Rational(4));
  EXPECT_EQ(hessian_condition_value(presets::paraboloid(3), point({Rational(0), Rational(1), Rational(1, 2)})),
            Rational(8));
  Polynomial cyl(2);
  cyl.add_term(std::vector<int>{2, 0}, Rational(1));
  EXPECT_EQ(hessian_condition_value(MongeMap(2, {cyl}), point({Rational(1, 2), Rational(1, 2)})), Rational(0));
  EXPECT_THROW(hessian_condition_value(presets::moment_curve(3), point({Rational(1, 2)})), ShapeError);
}

TEST(Manifold, NonDegeneracy) {
  EXPECT_TRUE(nondegeneracy_check(presets::parabola(), point({Rational(1, 4)}), 2));
  const auto surface = presets::veronese_counterexample(1);
  EXPECT_TRUE(nondegeneracy_check(surface, point({Rational(1, 2), Rational(1, 3), Rational(0)}), 2));
  Polynomial linear(2);
  linear.add_term(std::vector<int>{1, 0}, Rational(1));
  EXPECT_FALSE(nondegeneracy_check(MongeMap(2, {linear}), point({Rational(1, 2), Rational(1, 2)}), 4));
  const std::vector<double> x{0.3, 0.6, 0.9};
  EXPECT_TRUE(nondegeneracy_check(surface, std::span<const double>(x), 2));
}

TEST(Manifold, EstimatedConstants) {
  const auto parabola = estimate_constants(presets::parabola(), 32, 1.0);
  EXPECT_DOUBLE_EQ(parabola.C1, 2.0);
  EXPECT_DOUBLE_EQ(parabola.c1, 2.0);
  EXPECT_DOUBLE_EQ(parabola.eta_estimate, 2.0);
  EXPECT_DOUBLE_EQ(estimate_constants(presets::paraboloid(2), 16, 1.0).C1, 8.0);
  for (int res : {4, 16, 64}) {
    EXPECT_EQ(estimate_constants(presets::veronese_counterexample(1), res).eta_estimate, 0.0);
  }
}

TEST(Manifold, CertifiedBounds) {
  EXPECT_GT(certify_eta(presets::parabola(), ConditionKind::jacobian_mm), 1.9);
  EXPECT_EQ(certify_eta(presets::veronese_counterexample(1), ConditionKind::jacobian_mm), 0.0);
  EXPECT_NEAR(certify_second_derivative_bound(presets::paraboloid(2)), 8.0, 1e-9);
}

TEST(Manifold, PresetNames) {
  EXPECT_EQ(presets::by_name("moment_curve(4)").m(), 3);
  EXPECT_EQ(presets::by_name("paraboloid:3").d(), 3);
  EXPECT_EQ(presets::by_name("veronese_counterexample(2)").d(), 4);
  EXPECT_THROW(presets::by_name("torus"), InputError);
  EXPECT_TRUE(presets::satisfies_jacobian_condition(presets::parabola()));
  EXPECT_FALSE(presets::satisfies_jacobian_condition(presets::veronese_counterexample(1)));
}

TEST(Manifold, RelabelMovesCoordinates) {
  Polynomial p(2);
  p.add_term(std::vector<int>{0, 2}, Rational(1));
  const MongeMap flat(2, {p});
  EXPECT_EQ(jacobian_condition_value(flat, point({Rational(1, 2), Rational(1, 2)})), Rational(0));
  const std::vector<int> perm{1, 0};
  EXPECT_EQ(jacobian_condition_value(relabel(flat, perm), point({Rational(1, 2), Rational(1, 2)})), Rational(2));
}
