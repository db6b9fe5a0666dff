#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nspcert/errors.hpp"
#include "nspcert/sparsity_function.hpp"

using namespace nspcert;

namespace {

// (x^p2 - x^p1) / ((p2 - p1) ln x): the uniform mixed norm in closed form.
double uniform_mixed_oracle(double x, double p1, double p2) {
  if (x == 1.0) return 1.0;
  const double lx = std::log(x);
  return (std::pow(x, p2) - std::pow(x, p1)) / ((p2 - p1) * lx);
}

std::vector<SparsityFunction> all_families() {
  return {SparsityFunction::power(0.4), SparsityFunction::lorentzian(0.5),
          SparsityFunction::concave_exp(0.7),
          SparsityFunction::mixed_norm(Measure::uniform(0.1, 0.5))};
}

}  // namespace

TEST(SparsityFunction, EvaluatesEachFamily) {
  EXPECT_NEAR(SparsityFunction::power(0.1)(0.25), 0.8705506, 1e-7);
  EXPECT_NEAR(SparsityFunction::lorentzian(1.0)(1.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(SparsityFunction::concave_exp(0.5)(0.25), 1.0 - std::exp(-0.5), 1e-15);
  EXPECT_NEAR(SparsityFunction::power(0.5)(-4.0), 2.0, 1e-15);
  for (const auto& f : all_families()) EXPECT_EQ(f(0.0), 0.0);
}

TEST(SparsityFunction, UniformMixedNormMatchesClosedFormIntegral) {
  const auto f = SparsityFunction::mixed_norm(Measure::uniform(0.1, 0.5));
  for (double x : {1e-6, 0.01, 0.3, 1.0, 2.0, 17.0, 1e5}) {
    EXPECT_NEAR(f(x), uniform_mixed_oracle(x, 0.1, 0.5), 1e-12 * (1.0 + f(x))) << x;
  }
}

TEST(SparsityFunction, DiscreteMeasureIsWeightedSum) {
  const auto f =
      SparsityFunction::mixed_norm(Measure::discrete({{0.2, 0.25}, {0.6, 0.75}}));
  EXPECT_NEAR(f(3.0), 0.25 * std::pow(3.0, 0.2) + 0.75 * std::pow(3.0, 0.6), 1e-14);
  EXPECT_DOUBLE_EQ(f.measure()->p1(), 0.2);
  EXPECT_DOUBLE_EQ(f.measure()->p2(), 0.6);
}

TEST(SparsityFunction, RejectsInvalidParameters) {
  EXPECT_THROW(SparsityFunction::power(0.0), ValidationError);
  EXPECT_THROW(SparsityFunction::lorentzian(1.5), ValidationError);
  EXPECT_THROW(Measure::uniform(0.5, 0.1), ValidationError);
  EXPECT_THROW(Measure::uniform(0.1, 1.0), ValidationError);
  EXPECT_THROW(Measure::discrete({{0.2, 0.5}, {0.4, 0.4}}), ValidationError);
  EXPECT_THROW(parse_family("cauchy"), ValidationError);
  EXPECT_EQ(parse_family("concave-exp"), Family::concave_exp);
  EXPECT_EQ(parse_family("mixed_norm"), Family::mixed_norm);
}

TEST(SparsityFunction, DerivativeMatchesCentralDifferences) {
  // p x^{p-1} / (1 + x^p) = 0.5 * 0.5 / 3.
  EXPECT_NEAR(SparsityFunction::lorentzian(0.5).deriv(4.0), 1.0 / 12.0, 1e-15);
  EXPECT_DOUBLE_EQ(SparsityFunction::power(1.0).deriv(3.0), 1.0);
  for (const auto& f : all_families()) {
    for (double x : log_grid(1e-4, 1e4, 100)) {
      const double h = 1e-5 * x;
      const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
      // Near a finite supremum the difference quotient cancels; see the complement test.
      if (f.supremum() - f(x + h) < 1e-4) continue;
      EXPECT_NEAR(f.deriv(x), fd, 1e-5 * fd) << to_string(f.family()) << " x=" << x;
    }
    EXPECT_THROW(f.deriv(0.0), DomainError);
  }
}

TEST(SparsityFunction, ConcaveExpDerivativeAgainstComplementForm) {
  // d/dx (1 - e^{-x^p}) = p x^{p-1} e^{-x^p}, evaluated where 1 - e^{-u} cancels.
  const auto f = SparsityFunction::concave_exp(0.3);
  for (double x : {1e-12, 1e-6, 1e3}) {
    const double oracle = 0.3 * std::pow(x, -0.7) * std::exp(-std::pow(x, 0.3));
    EXPECT_NEAR(f.deriv(x), oracle, 1e-10 * oracle);
  }
}

TEST(SparsityFunction, InverseRoundTrips) {
  EXPECT_NEAR(SparsityFunction::lorentzian(1.0).inverse(1.0), std::numbers::e - 1.0, 1e-14);
  for (const auto& f : all_families()) {
    for (double x : {1e-4, 0.2, 1.0, 6.0, 250.0}) {
      const double y = f(x);
      if (y >= f.supremum()) continue;
      EXPECT_NEAR(f.inverse(y), x, 1e-9 * x) << to_string(f.family());
    }
    EXPECT_THROW(f.inverse(-1.0), DomainError);
  }
  EXPECT_THROW(SparsityFunction::concave_exp(0.5).inverse(1.0), DomainError);
}

TEST(SparsityFunction, LogEvalStaysFiniteAtExtremes) {
  const auto lor = SparsityFunction::lorentzian(0.5);
  EXPECT_NEAR(lor.log_eval(-1e8), -0.5e8, 1.0);
  EXPECT_NEAR(lor.log_eval(1e8), std::log(0.5e8), 1e-9);
  const auto ce = SparsityFunction::concave_exp(0.5);
  EXPECT_EQ(ce.log_eval(1e8), 0.0);
  EXPECT_NEAR(ce.log_eval(-1e8), -0.5e8, 1.0);
  const auto mixed = SparsityFunction::mixed_norm(Measure::uniform(0.1, 0.5));
  EXPECT_TRUE(std::isfinite(mixed.log_eval(-1e8)));
  EXPECT_TRUE(std::isfinite(mixed.log_eval(1e8)));
  for (double x : {1e-3, 0.5, 9.0}) {
    EXPECT_NEAR(mixed.log_eval(std::log(x)), std::log(mixed(x)), 1e-12);
  }
}

TEST(SparsityFunction, ElasticityValues) {
  EXPECT_NEAR(SparsityFunction::lorentzian(1.0).elasticity(1.0), 1.0 / (2.0 * std::numbers::ln2),
              1e-12);
  EXPECT_DOUBLE_EQ(SparsityFunction::power(0.3).elasticity(12.0), 0.3);
  const auto mixed = SparsityFunction::mixed_norm(Measure::uniform(0.1, 0.5));
  // Quadrature oracle, precomputed.
  EXPECT_NEAR(mixed.elasticity(1e-8), 0.15403, 5e-5);
  EXPECT_NEAR(mixed.elasticity(1e8), 0.44597, 5e-5);
}

TEST(SparsityFunction, ElasticityIsMonotoneWithExpectedExtrema) {
  const auto grid = log_grid(1e-6, 1e6, 400);
  for (const auto& f : all_families()) {
    const auto [hi, lo] = f.elasticity_extrema();
    double prev = f.elasticity(grid.front());
    for (double x : grid) {
      const double e = f.elasticity(x);
      EXPECT_LE(e, hi + 1e-12);
      EXPECT_GE(e, lo - 1e-12);
      if (f.has_nonincreasing_elasticity()) {
        EXPECT_LE(e, prev + 1e-12);
      } else {
        EXPECT_GE(e, prev - 1e-12);
      }
      prev = e;
    }
  }
  const auto mixed_extrema =
      SparsityFunction::mixed_norm(Measure::uniform(0.1, 0.5)).elasticity_extrema();
  EXPECT_DOUBLE_EQ(mixed_extrema.max, 0.5);
  EXPECT_DOUBLE_EQ(mixed_extrema.min, 0.1);
  EXPECT_DOUBLE_EQ(SparsityFunction::concave_exp(0.6).elasticity_extrema().min, 0.0);
}

TEST(SparsityFunction, UZeroAndSupremum) {
  EXPECT_EQ(SparsityFunction::lorentzian(0.5).u_zero(), 0.0);
  EXPECT_EQ(SparsityFunction::concave_exp(0.5).u_zero(), 0.0);
  EXPECT_EQ(SparsityFunction::power(0.5).u_zero(), 1.0);
  EXPECT_EQ(SparsityFunction::concave_exp(0.5).supremum(), 1.0);
  EXPECT_TRUE(std::isinf(SparsityFunction::lorentzian(0.5).supremum()));
}

TEST(ScaleFunction, ClosedForms) {
  const auto mixed = SparsityFunction::mixed_norm(Measure::uniform(0.1, 0.5));
  EXPECT_NEAR(mixed.scale(0.01), std::pow(0.01, 0.1), 1e-15);
  EXPECT_NEAR(mixed.scale(100.0), 10.0, 1e-13);
  EXPECT_EQ(SparsityFunction::lorentzian(0.5).scale(0.3), 1.0);
  EXPECT_NEAR(SparsityFunction::concave_exp(0.5).scale(9.0), 3.0, 1e-15);
  EXPECT_THROW(mixed.scale(-1.0), DomainError);
}

TEST(ScaleFunction, LawsHoldOnRandomPairs) {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> log_u(-6.0, 6.0);
  for (const auto& f : all_families()) {
    EXPECT_EQ(f.scale(0.0), 0.0);
    for (int n = 0; n < 10000; ++n) {
      const double x = std::pow(10.0, log_u(gen));
      const double y = std::pow(10.0, log_u(gen));
      const double lo = std::min(x, y);
      const double hi = std::max(x, y);
      const double g_lo = f.scale(lo);
      const double g_hi = f.scale(hi);
      ASSERT_LE(g_lo, g_hi * (1 + 1e-12));
      ASSERT_GE(g_lo / lo, g_hi / hi * (1 - 1e-12));
      ASSERT_LE(f.scale(x * y), f.scale(x) * f.scale(y) * (1 + 1e-12));
      ASSERT_GE(f.scale(x), std::min(x, 1.0) * (1 - 1e-12));
      ASSERT_LE(f.scale(x), std::max(x, 1.0) * (1 + 1e-12));
    }
  }
}

TEST(ScaleFunction, NumericSupremumMatchesClosedForm) {
  for (const auto& f : all_families()) {
    for (double y : log_grid(1e-3, 1e3, 25)) {
      const double g = f.scale(y);
      EXPECT_NEAR(scale_numeric(f, y), g, 1e-3 * g) << to_string(f.family()) << " y=" << y;
    }
  }
}

TEST(ScaleFunction, BoundsBracketClosedForm) {
  for (const auto& f : all_families()) {
    for (double y : {0.01, 0.4, 0.9, 1.1, 3.0, 500.0}) {
      const auto [lower, upper] = f.scale_bounds(y);
      EXPECT_LE(lower, f.scale(y) * (1 + 1e-12));
      EXPECT_GE(upper, f.scale(y) * (1 - 1e-12));
    }
    EXPECT_THROW(f.scale_bounds(1.0), DomainError);
  }
}

TEST(ScaleFunction, NumericRejectsBadGrid) {
  const auto f = SparsityFunction::power(0.5);
  const std::vector<double> unsorted{1.0, 0.5};
  EXPECT_THROW(scale_numeric(f, 2.0, unsorted), ValidationError);
  EXPECT_THROW(scale_numeric(f, 2.0, std::vector<double>{}), ValidationError);
}

TEST(LogGrid, EndpointsAndSpacing) {
  const auto g = log_grid(1e-2, 1e2, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-2);
  EXPECT_DOUBLE_EQ(g.back(), 1e2);
  EXPECT_NEAR(g[2], 1.0, 1e-15);
  EXPECT_EQ(default_scale_grid().size(), 2001u);
}
