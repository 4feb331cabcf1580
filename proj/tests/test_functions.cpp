#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbiharm/functions.hpp"
#include "fbiharm/report.hpp"

using namespace fbiharm;

namespace {

ScalarField sum_of_squares() {
  return fields::from_function(3, [](PointView x) { return dot(x, x); });
}

template <class Fn>
void expect_error(ErrorCode code, Fn fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

RealFn family_weight(WeightFamily w) {
  return [w](real x) { return weight_value(w, x); };
}

}  // namespace

TEST(Residual, SquaredNormWithInverseNormWeight) {
  EXPECT_NEAR(f_biharmonic_residual(sum_of_squares(), fields::radial_power(3, -1), Point{1, 1, 1}), 0, 1e-5);
}

TEST(Residual, ProperFBiharmonicFunction) {
  EXPECT_NEAR(f_biharmonic_residual(fields::coordinate_times_radial(3, 0, 2), fields::radial_power(3, 1), Point{1, 0, 0}),
              0, 1e-4);
}

TEST(Residual, UnitWeightIsBilaplacian) {
  const ScalarField one = fields::constant(3, 1);
  EXPECT_NEAR(f_biharmonic_residual(sum_of_squares(), one, Point{0.2L, 0.3L, 0.4L}), 0, 1e-5);
  EXPECT_NEAR(f_biharmonic_residual(fields::radial_power(3, 4), one, Point{1, 0, 0}), 120, 1e-3);
}

TEST(Residual, NonPositiveWeight) {
  const ScalarField f = fields::from_function(3, [](PointView x) { return x[0]; });
  expect_error(ErrorCode::NonPositiveWeight, [&] { f_biharmonic_residual(sum_of_squares(), f, Point{-1, 0, 0}); });
  // Positive at x but not across the stencil.
  expect_error(ErrorCode::NonPositiveWeight, [&] { f_biharmonic_residual(sum_of_squares(), f, Point{0.01L, 0, 0}); });
}

TEST(Solve1D, ExponentialWeight) {
  const OneDimSolution sol = solve_1d(family_weight(WeightFamily::Exponential), 1, 0, 0, 0, 0, 1);
  // u'' = x e^x with u(0) = u'(0) = 0.
  for (real x : {real(0), real(0.1), real(0.37), real(0.5), real(0.999), real(1)})
    EXPECT_NEAR(sol(x), (x - 2) * std::exp(x) + x + 2, 1e-12);
}

TEST(Solve1D, RationalWeight) {
  const OneDimSolution sol = solve_1d(family_weight(WeightFamily::Rational), 0, 1, 0, 0, 0, 1);
  // u'' = 1/(1+x^2) with u(0) = u'(0) = 0.
  for (real x : {real(0), real(0.25), real(0.61), real(1)})
    EXPECT_NEAR(sol(x), x * std::atan(x) - std::log(1 + x * x) / 2, 1e-12);
}

TEST(Solve1D, HarmonicCase) {
  const OneDimSolution sol = solve_1d([](real) { return real(1); }, 0, 0, 2, 3, 0, 1);
  for (real x : {real(0), real(0.3), real(1)}) EXPECT_NEAR(sol(x), 2 * x + 3, 1e-15);
}

TEST(Solve1D, ResidualOfSampledSolution) {
  const OneDimSolution sol = solve_1d(family_weight(WeightFamily::Exponential), 1, 0, 0, 0, 0, 1);
  const ScalarField u = sol.field(), f = sol.weight_field();
  for (real x : {real(0.2), real(0.5), real(0.8)}) EXPECT_LT(f_biharmonic_residual(u, f, Point{x}), 1e-5);
}

TEST(Solve1D, Errors) {
  expect_error(ErrorCode::NonPositiveWeight, [] { solve_1d([](real x) { return x - 0.5L; }, 1, 0, 0, 0, 0, 1); });
  expect_error(ErrorCode::InvalidArgument, [] { solve_1d(family_weight(WeightFamily::Rational), 1, 0, 0, 0, 0, 1, 0.3L); });
  expect_error(ErrorCode::InvalidArgument, [] { solve_1d(family_weight(WeightFamily::Rational), 1, 0, 0, 0, 1, 0); });
  expect_error(ErrorCode::NonFinite, [] { solve_1d([](real) { return real(NAN); }, 1, 0, 0, 0, 0, 1); });
  const OneDimSolution sol = solve_1d(family_weight(WeightFamily::Rational), 1, 0, 0, 0, 0, 1, 0.125L);
  EXPECT_EQ(sol.nodes.size(), 9u);
  expect_error(ErrorCode::InvalidArgument, [&] { sol(1.5L); });
  expect_error(ErrorCode::SingularEvaluation, [&] { sol.field()(Point{1.0L}); });
}

TEST(ClosedForm, Examples) {
  EXPECT_EQ(closed_form_1d(WeightFamily::Exponential, 1, 0, 0, 0, 0), -2);
  EXPECT_EQ(closed_form_1d(WeightFamily::Rational, 0, 0, 1, 5, 2), 7);
  EXPECT_NEAR(closed_form_1d(WeightFamily::Exponential, 1, 2, 0, 0, 1), std::numbers::e_v<long double>, 1e-15);
}

TEST(ClosedForm, SatisfiesEquation) {
  // f u'' = A x + B for both families.
  for (auto w : {WeightFamily::Rational, WeightFamily::Exponential}) {
    auto u = [w](real x) { return closed_form_1d(w, 1.5L, -0.5L, 2, 1, x); };
    for (real x : {real(0.2), real(0.7)}) EXPECT_NEAR(weight_value(w, x) * derivative(u, x, 2), 1.5L * x - 0.5L, 1e-10);
  }
}

TEST(Torus, KernelExamples) {
  const double two_pi = 2 * std::numbers::pi;
  EXPECT_EQ(torus_kernel_dimension(build_torus_operator({32}, std::vector<double>(32, 1.0))), 1u);
  EXPECT_EQ(torus_kernel_dimension(build_torus_operator(
                {32}, sample_grid({32}, [&](int j, int) { return 2 + std::sin(two_pi * j / 32); }))),
            1u);
  EXPECT_EQ(torus_kernel_dimension(build_torus_operator(
                {16, 16}, sample_grid({16, 16}, [&](int, int j) { return 1.5 + std::cos(two_pi * j / 16); }))),
            1u);
}

TEST(Torus, StructureAndErrors) {
  const TorusOperator op = build_torus_operator({8, 6}, sample_grid({8, 6}, [](int i, int j) { return 1.0 + i + 0.5 * j; }));
  EXPECT_EQ(op.m, 2);
  EXPECT_EQ(op.matrix.rows(), 48);
  EXPECT_LT(op.matrix.rowwise().sum().cwiseAbs().maxCoeff(), 1e-8 * op.matrix.cwiseAbs().maxCoeff());
  expect_error(ErrorCode::GridTooLarge, [] { build_torus_operator({65, 65}, std::vector<double>(65 * 65, 1.0)); });
  expect_error(ErrorCode::NonPositiveWeight, [] { build_torus_operator({4}, {1.0, 0.0, 1.0, 1.0}); });
  expect_error(ErrorCode::InvalidArgument, [] { build_torus_operator({4}, {1.0, 1.0}); });
  expect_error(ErrorCode::InvalidArgument, [] { build_torus_operator({4, 4, 4}, std::vector<double>(64, 1.0)); });
  // A rank-deficient control: the periodic Laplacian alone has the constants as kernel too.
  EXPECT_EQ(kernel_dimension(periodic_laplacian({12, 12}), 1e-9), 1u);
  EXPECT_EQ(kernel_dimension(Eigen::MatrixXd::Zero(5, 5), 1e-9), 5u);
}

TEST(Property, Factorization) {
  const ScalarField u = fields::from_function(3, [](PointView x) { return std::sin(x[0]) * x[1] * x[1] + x[2] * x[0]; });
  const ScalarField f = fields::from_function(3, [](PointView x) { return 2 + std::cos(x[1]) * x[0]; }).as_weight();
  const FDConfig cfg;
  const ScalarField w = fields::from_function(3, [&](PointView x) { return f(x) * laplacian(u, x, cfg); });
  for (const Point& x : box_samples({-0.5L, -0.5L, -0.5L}, {0.5L, 0.5L, 0.5L}, 10, 31))
    EXPECT_NEAR(f_biharmonic_residual(u, f, x, cfg), std::fabs(laplacian(w, x, cfg)), 1e-10);
}

TEST(Property, SolverResidualAtCheckpoints) {
  SampleRng rng(2024);
  for (auto which : {WeightFamily::Rational, WeightFamily::Exponential}) {
    for (int draw = 0; draw < 3; ++draw) {
      const real A = rng.uniform(-2, 2), B = rng.uniform(-2, 2);
      const OneDimSolution sol = solve_1d(family_weight(which), A, B, 0, 0, 0, 1);
      const ScalarField u = sol.field(), f = sol.weight_field();
      for (int i = 0; i < 50; ++i) {
        const real x = 0.05L + 0.9L * i / 49;
        EXPECT_LT(f_biharmonic_residual(u, f, Point{x}), 1e-5);
      }
    }
  }
}

TEST(Property, SolverMatchesClosedFormUpToAffine) {
  SampleRng rng(77);
  for (auto which : {WeightFamily::Rational, WeightFamily::Exponential}) {
    for (int draw = 0; draw < 5; ++draw) {
      const real A = rng.uniform(-3, 3), B = rng.uniform(-3, 3);
      const OneDimSolution sol = solve_1d(family_weight(which), A, B, 0, 0, 0, 1);
      auto diff = [&](real x) { return sol(x) - closed_form_1d(which, A, B, 0, 0, x); };
      const FDConfig cfg;
      for (int i = 0; i <= 100; ++i) {
        const real x = cfg.singular_margin + (1 - 2 * cfg.singular_margin) * i / 100;
        EXPECT_LT(std::fabs(derivative(diff, x, 2, cfg)), 1e-6);
      }
      // The difference is affine: its values match the chord through the endpoints.
      const real d0 = diff(0), d1 = diff(1);
      for (real x : {real(0.25), real(0.5), real(0.75)}) EXPECT_NEAR(diff(x), d0 + (d1 - d0) * x, 1e-10);
    }
  }
}

TEST(Property, TorusKernelIsConstants) {
  SampleRng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> f1, f2;
    for (int i = 0; i < 32; ++i) f1.push_back(static_cast<double>(rng.uniform(0.1L, 5)));
    for (int i = 0; i < 256; ++i) f2.push_back(static_cast<double>(rng.uniform(0.1L, 5)));
    EXPECT_EQ(torus_kernel_dimension(build_torus_operator({32}, f1)), 1u);
    EXPECT_EQ(torus_kernel_dimension(build_torus_operator({16, 16}, f2)), 1u);
  }
}

TEST(Property, QuasiHarmonicLink) {
  const ScalarField u = sum_of_squares();
  const Point x{0.6L, 0, 0.8L};
  EXPECT_LT(f_biharmonic_residual(u, fields::radial_power(3, -1), x), 1e-5);
  EXPECT_GT(f_biharmonic_residual(u, fields::radial_power(3, 1), x), 1e-2);
}
