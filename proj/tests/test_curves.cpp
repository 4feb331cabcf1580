#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbiharm/curves.hpp"
#include "fbiharm/report.hpp"

using namespace fbiharm;

namespace {

constexpr real kPi = std::numbers::pi_v<long double>;

template <class Fn>
void expect_error(ErrorCode code, Fn fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

Vec3 planar_curve(real s) {
  const real q = std::sqrt(16 + s * s);
  return Vec3(4 * std::log(q + s), q, 0);
}

Vec3 helix_curve(real s) {
  return Vec3(real(2) / 3 * std::pow(1 + s / 2, real(1.5)), real(2) / 3 * std::pow(1 - s / 2, real(1.5)),
              s / std::sqrt(real(2)));
}

real helix_kappa(real s) { return 1 / (2 * std::sqrt(real(2)) * std::sqrt(4 - s * s)); }

CurvatureProfile helix_profile() {
  CurvatureProfile p;
  p.kappa1 = helix_kappa;
  p.ratio_c = 1;
  p.interval = {-1.9L, 1.9L};
  return p;
}

R3Family planar(real c2 = 1, real c3 = 0, real c1 = 1) { return {R3Family::Kind::Planar, c1, c2, c3, 0}; }
R3Family helix(real c, real c2 = 1, real c3 = 0, real c1 = 1) { return {R3Family::Kind::Helix, c1, c2, c3, c}; }

real max_abs(const std::array<real, 4>& v) {
  real m = 0;
  for (real x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

TEST(FrenetSystem, CircleInMatchingSphere) {
  const real k0 = 0.8L;
  CurvatureProfile p;
  p.kappa1 = [k0](real) { return k0; };
  p.ambient_C = k0 * k0;
  p.interval = {-1, 1};
  for (real s : {real(-0.5), real(0), real(0.7)}) {
    const auto r = frenet_system_residual(p, [](real) { return real(1); }, s);
    EXPECT_NEAR(max_abs(r), 0, 1e-12);
  }
}

TEST(FrenetSystem, PlanarFamily) {
  const CurvatureProfile p = planar().profile({-5, 5});
  EXPECT_LT(max_abs(frenet_system_residual(p, p.weight(), 1)), 1e-6);
}

TEST(FrenetSystem, HelixWithEqualCurvaturesIsRejected) {
  const CurvatureProfile p = helix_profile();
  const auto r = frenet_system_residual(p, p.weight(), 0);
  EXPECT_GT(std::fabs(r[1]), 1e-3);
  EXPECT_NEAR(r[1], -0.0331456303681194L, 1e-8);
}

TEST(FrenetSystem, Errors) {
  CurvatureProfile p = planar().profile({-5, 5});
  expect_error(ErrorCode::NonPositiveWeight, [&] { frenet_system_residual(p, [](real) { return real(-1); }, 0); });
  p.kappa1 = [](real s) { return s; };
  expect_error(ErrorCode::NonPositiveCurvature, [&] { frenet_system_residual(p, [](real) { return real(1); }, 0); });
  expect_error(ErrorCode::InvalidArgument, [&] { frenet_system_residual(p, [](real) { return real(1); }, 5); });
  expect_error(ErrorCode::InvalidArgument, [&] { classification_ode_residual(p, 6); });
}

TEST(ClassificationOde, Families) {
  EXPECT_LT(classification_ode_residual(planar().profile({-5, 5}), 0), 1e-7);
  EXPECT_LT(classification_ode_residual(helix(1, 2, 0).profile({-5, 5}), 0.5L), 1e-7);
}

TEST(ClassificationOde, ConstantCurvature) {
  CurvatureProfile p;
  p.kappa1 = [](real) { return real(1); };
  p.interval = {-1, 1};
  EXPECT_NEAR(classification_ode_residual(p, 0), 4, 1e-10);
}

TEST(R3Family, Values) {
  auto a = r3_family_curvature(planar(), 0);
  EXPECT_EQ(a.kappa, 0.25L);
  EXPECT_EQ(a.tau, 0);
  EXPECT_NEAR(a.f, 8, 1e-15);
  // f = c1 kappa^(-3/2) = (16 + s^2)^(3/2) / 8 for c2 = 1, c3 = 0.
  auto b = r3_family_curvature(planar(), 3);
  EXPECT_NEAR(b.f, std::pow(real(25), real(1.5)) / 8, 1e-12);
  auto c = r3_family_curvature(helix(1), 0);
  EXPECT_NEAR(c.kappa, 4.0L / 32, 1e-18);
  EXPECT_EQ(c.tau, c.kappa);
  EXPECT_LT(r3_family_curvature(helix(1), 1e6L).kappa, 1e-11);
  EXPECT_LT(r3_family_curvature(helix(1), -1e6L).kappa, 1e-11);
}

TEST(R3Family, Validation) {
  EXPECT_THROW(r3_family_curvature(planar(0), 0), Error);
  EXPECT_THROW(r3_family_curvature(planar(1, 0, -1), 0), Error);
  EXPECT_THROW(r3_family_curvature(helix(0), 0), Error);
  EXPECT_NO_THROW(r3_family_curvature(helix(-2), 0));
}

TEST(Estimate, PlanarCurve) {
  const ParamCurve g(planar_curve, {-5, 5});
  const auto ct = estimate_curvature_torsion(g, 0);
  EXPECT_NEAR(ct.kappa, 0.25, 1e-6);
  EXPECT_NEAR(ct.tau, 0, 1e-6);
  for (real s : {real(-3), real(2.5)}) EXPECT_NEAR(estimate_curvature_torsion(g, s).kappa, 4 / (16 + s * s), 1e-6);
}

TEST(Estimate, HelixWithEqualCurvatures) {
  const ParamCurve g(helix_curve, {-1.9L, 1.9L});
  const auto ct = estimate_curvature_torsion(g, 0);
  EXPECT_NEAR(ct.kappa, 0.1767766953, 1e-6);
  EXPECT_NEAR(ct.tau, 0.1767766953, 1e-6);
  EXPECT_NEAR(estimate_curvature_torsion(g, 1).tau, helix_kappa(1), 1e-6);
}

TEST(Estimate, UnitCircle) {
  const ParamCurve g([](real s) { return Vec3(std::cos(s), std::sin(s), 0); }, {0, 2 * kPi});
  for (real s : {real(0.5), real(3), real(5)}) {
    const auto ct = estimate_curvature_torsion(g, s);
    EXPECT_NEAR(ct.kappa, 1, 1e-8);
    EXPECT_NEAR(ct.tau, 0, 1e-8);
  }
}

TEST(Estimate, Errors) {
  const ParamCurve line([](real s) { return Vec3(s, 0, 0); }, {0, 1});
  expect_error(ErrorCode::VanishingCurvature, [&] { estimate_curvature_torsion(line, 0.5L); });
  expect_error(ErrorCode::NotArclength, [] { ParamCurve([](real s) { return Vec3(2 * s, 0, 0); }, {0, 1}); });
  expect_error(ErrorCode::InvalidArgument, [&] { estimate_curvature_torsion(line, 0); });
}

TEST(Reconstruct, UnitCircleCloses) {
  const auto c = reconstruct_curve([](real) { return real(1); }, [](real) { return real(0); }, {0, 2 * kPi},
                                   FramedPoint{});
  EXPECT_LT((c.points.back() - c.points.front()).norm(), 1e-6);
  EXPECT_EQ(c.points.size(), c.s.size());
}

TEST(Reconstruct, PlanarFamilyMatchesExplicitCurve) {
  const R3Family fam = planar();
  const auto c = reconstruct_curve([&](real s) { return fam.kappa(s); }, [&](real s) { return fam.tau(s); }, {-5, 5},
                                   FramedPoint{});
  EXPECT_EQ(c.s.size(), 10001u);
  EXPECT_LT(rigid_motion_deviation(c, ParamCurve(planar_curve, {-6, 6})), 1e-5);
}

TEST(Reconstruct, HelixMatchesExplicitCurve) {
  const auto c = reconstruct_curve(helix_kappa, helix_kappa, {-1, 1}, FramedPoint{});
  EXPECT_LT(rigid_motion_deviation(c, ParamCurve(helix_curve, {-1.9L, 1.9L})), 1e-5);
}

TEST(Reconstruct, Errors) {
  auto one = [](real) { return real(1); };
  expect_error(ErrorCode::StepTooLarge, [&] { reconstruct_curve(one, one, {0, 1}, FramedPoint{}, 0.1L); });
  expect_error(ErrorCode::NonPositiveCurvature,
               [&] { reconstruct_curve([](real s) { return s; }, one, {-1, 1}, FramedPoint{}); });
  FramedPoint skew;
  skew.frame(0, 1) = 0.1L;
  expect_error(ErrorCode::InvalidArgument, [&] { reconstruct_curve(one, one, {0, 1}, skew); });
}

TEST(EuclideanResidual, StraightLine) {
  const ParamCurve line([](real s) -> Vec3 { return Vec3(s, 2 * s, 2 * s) / 3; }, {0, 1});
  EXPECT_NEAR(euclidean_curve_residual(line, [](real s) { return 1 + s * s; }, 0.5L), 0, 1e-10);
}

TEST(EuclideanResidual, PlanarCurveWithMatchingWeight) {
  const ParamCurve g(planar_curve, {-5, 5});
  auto f = [](real s) { return std::pow(16 + s * s, real(1.5)) / 8; };
  for (real s : {real(-2), real(0), real(3)}) EXPECT_LT(euclidean_curve_residual(g, f, s), 1e-5);
}

TEST(EuclideanResidual, HelixIsRejected) {
  const ParamCurve g(helix_curve, {-1.9L, 1.9L});
  const real r = euclidean_curve_residual(g, [](real s) { return std::pow(helix_kappa(s), real(-1.5)); }, 0);
  EXPECT_GT(r, 1e-3);
  EXPECT_NEAR(r, 0.445952689899, 1e-6);
}

TEST(Property, OracleEquivalenceOnPolynomialCurves) {
  SampleRng rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    // P(t) = t d + sum_{j=2..5} a_j t^j, with small a_j keeping |P'| away from zero on [0, 1].
    Vec3 d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    d = d.normalized();
    std::array<Vec3, 6> a;
    for (int j = 2; j <= 5; ++j) a[j] = Vec3(rng.uniform(-0.2L, 0.2L), rng.uniform(-0.2L, 0.2L), rng.uniform(-0.2L, 0.2L));
    auto P = [=](real t) {
      Vec3 out = t * d;
      real tj = t;
      for (int j = 2; j <= 5; ++j) out += (tj *= t) * a[j];
      return out;
    };
    auto dP = [=](real t) {
      Vec3 out = d;
      real tj = 1;
      for (int j = 2; j <= 5; ++j) out += j * (tj *= t) * a[j];
      return out;
    };
    const ParamCurve g = arclength_reparameterize(P, dP, 0, 1);
    const real f0 = rng.uniform(1, 2), f1 = rng.uniform(-0.5L, 0.5L), f2 = rng.uniform(0, 0.5L);
    auto f = [=](real s) { return f0 + f1 * s + f2 * std::sin(s); };
    const Interval iv = g.interval();
    for (int i = 0; i < 3; ++i) {
      const real s = iv.lo + iv.length() * (0.2L + 0.3L * i);
      EXPECT_NEAR(euclidean_curve_residual(g, f, s), euclidean_curve_residual_product_form(g, f, s), 1e-8);
    }
  }
}

TEST(Property, RoundTrip) {
  struct Case {
    RealFn kappa, tau;
    Interval iv;
  };
  const R3Family p = planar(1.5L, 0.5L), h = helix(0.8L, 2, -1);
  const std::vector<Case> cases = {
      {[p](real s) { return p.kappa(s); }, [p](real s) { return p.tau(s); }, {-4, 4}},
      {[h](real s) { return h.kappa(s); }, [h](real s) { return h.tau(s); }, {-3, 3}},
      {[](real) { return real(0.7); }, [](real) { return real(0.4); }, {0, 6}},
  };
  for (const auto& c : cases) {
    const SampledCurve rec = reconstruct_curve(c.kappa, c.tau, c.iv, FramedPoint{});
    const ParamCurve g = rec.as_curve();
    real worst = 0;
    for (int i = 0; i <= 40; ++i) {
      const real s = c.iv.lo + c.iv.length() * (0.1L + 0.8L * i / 40);
      const auto ct = estimate_curvature_torsion(g, s);
      worst = std::max({worst, std::fabs(ct.kappa - c.kappa(s)), std::fabs(ct.tau - c.tau(s))});
    }
    EXPECT_LT(worst, 1e-4);
  }
}

TEST(Property, FrameDriftBetweenReorthonormalisations) {
  for (real step : {real(1e-3), real(5e-4)}) {
    const R3Family h = helix(2, 3, 1);
    const auto rec = reconstruct_curve([&](real s) { return h.kappa(s); }, [&](real s) { return h.tau(s); }, {-5, 5},
                                       FramedPoint{}, step);
    EXPECT_LE(rec.max_frame_drift, 1e-8);
    const auto rec2 = reconstruct_curve([](real) { return real(3); }, [](real) { return real(-2); }, {0, 10},
                                        FramedPoint{}, step);
    EXPECT_LE(rec2.max_frame_drift, 1e-8);
  }
}

TEST(Property, ClassificationConsistency) {
  auto accepted = [](const CurvatureProfile& prof) {
    real worst = 0;
    for (int i = 0; i <= 20; ++i) {
      const real s = prof.interval.lo + 0.1L + (prof.interval.length() - 0.2L) * i / 20;
      worst = std::max(worst, max_abs(frenet_system_residual(prof, prof.weight(), s)));
    }
    return worst;
  };
  SampleRng rng(11);
  for (int draw = 0; draw < 5; ++draw) {
    const real c1 = rng.uniform(0.5L, 3), c2 = rng.uniform(0.5L, 3), c3 = rng.uniform(-2, 2), c = rng.uniform(0.3L, 2);
    EXPECT_LT(accepted(planar(c2, c3, c1).profile({-3, 3})), 1e-6);
    EXPECT_LT(accepted(helix(c, c2, c3, c1).profile({-3, 3})), 1e-6);
  }
  // Negative controls. The defects scale like kappa^3, so these use
  // curvature peaks of order one to land clearly above the reject threshold.
  for (int draw = 0; draw < 5; ++draw) {
    const real c1 = rng.uniform(0.5L, 3), c2 = rng.uniform(3, 6), c3 = rng.uniform(-2, 2), c = rng.uniform(0.3L, 1);
    CurvatureProfile wrong_ratio = helix(c, c2, c3, c1).profile({-3, 3});
    wrong_ratio.ratio_c = c + 1;
    EXPECT_GT(accepted(wrong_ratio), 1e-3);
    CurvatureProfile wrong_shape = planar(c2, c3, c1).profile({-3, 3});
    wrong_shape.kappa1 = [c2, c3](real s) { return 4 * c2 / (9 + (c2 * s + c3) * (c2 * s + c3)); };
    EXPECT_GT(accepted(wrong_shape), 1e-3);
  }
  EXPECT_GT(accepted(helix_profile()), 1e-3);
  CurvatureProfile sech;
  sech.kappa1 = [](real s) { return 1 / std::cosh(s); };
  sech.interval = {-2, 2};
  EXPECT_GT(accepted(sech), 1e-3);
}

TEST(Property, ConstantCurvatureForcesConstantWeight) {
  const real k0 = 1.3L;
  CurvatureProfile p;
  p.kappa1 = [k0](real) { return k0; };
  p.interval = {-1, 1};
  for (real s : {real(-0.4), real(0.3)}) {
    EXPECT_NEAR(frenet_system_residual(p, [](real) { return real(2.5); }, s)[0], 0, 1e-14);
    auto f = [](real t) { return std::exp(t); };
    EXPECT_NEAR(frenet_system_residual(p, f, s)[0], -2 * k0 * k0, 1e-9);
    auto g = [](real t) { return 2 + std::sin(t); };
    EXPECT_NEAR(frenet_system_residual(p, g, s)[0], -2 * k0 * k0 * std::cos(s) / (2 + std::sin(s)), 1e-9);
  }
}
