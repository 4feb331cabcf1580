#pragma once

// Arclength curves: residuals of the f-biharmonic curve equations in a space
// form, the planar / helix families in R^3, curvature and torsion estimates,
// and Frenet reconstruction from prescribed (kappa, tau).
//
// Frenet convention (n = 3):
//   F1' = kappa F2,  F2' = -kappa F1 + tau F3,  F3' = -tau F2,
// so tau > 0 for a right-handed helix and tau = det(g', g'', g''') / |g''|^2.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fbiharm/numdiff.hpp"

namespace fbiharm {

using Vec3 = Eigen::Matrix<real, 3, 1>;
using Mat3 = Eigen::Matrix<real, 3, 3>;
using RealFn = std::function<real(real)>;

struct Interval {
  real lo = 0;
  real hi = 1;

  real length() const { return hi - lo; }
  real mid() const { return (lo + hi) / 2; }
};

namespace curves_detail {

inline void require_interior(const Interval& iv, real s, const FDConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(s)) throw Error(ErrorCode::NonFinite, "non-finite curve parameter");
  if (!(s - iv.lo >= cfg.singular_margin && iv.hi - s >= cfg.singular_margin))
    throw Error(ErrorCode::InvalidArgument, "parameter is not interior to the curve interval");
}

inline RealFn checked_curvature(RealFn kappa) {
  return [kappa = std::move(kappa)](real s) {
    const real k = kappa(s);
    if (!std::isfinite(k)) throw Error(ErrorCode::NonFinite, "curvature is not finite");
    if (!(k > 0)) throw Error(ErrorCode::NonPositiveCurvature, "curvature must be positive");
    return k;
  };
}

inline RealFn checked_weight(RealFn f) {
  return [f = std::move(f)](real s) {
    const real v = f(s);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "weight is not finite");
    if (!(v > 0)) throw Error(ErrorCode::NonPositiveWeight, "weight must be positive");
    return v;
  };
}

}  // namespace curves_detail

/// Intrinsic data of a curve in a space form of sectional curvature C.
/// With `ratio_c` set, kappa2 = ratio_c * kappa1; otherwise kappa2 = 0.
struct CurvatureProfile {
  RealFn kappa1;
  std::optional<real> ratio_c;
  real ambient_C = 0;
  Interval interval;
  real f_constant_c1 = 1;

  real ratio() const { return ratio_c.value_or(0); }

  /// f = c1 kappa1^(-3/2).
  RealFn weight() const {
    return [k = kappa1, c1 = f_constant_c1](real s) { return c1 * std::pow(k(s), real(-1.5)); };
  }
};

/// The four coefficient equations of tau_{2,f}(gamma) in the Frenet frame
/// (F1, F2, F3, F4 components); kappa3 = 0 in this three-frame setting.
inline std::array<real, 4> frenet_system_residual(const CurvatureProfile& profile, const RealFn& f,
                                                  real s, const FDConfig& cfg = {}) {
  curves_detail::require_interior(profile.interval, s, cfg);
  const RealFn kappa = curves_detail::checked_curvature(profile.kappa1);
  const RealFn weight = curves_detail::checked_weight(f);
  const real c = profile.ratio();
  const real C = profile.ambient_C;

  const real k = kappa(s);
  const real dk = derivative(kappa, s, 1, cfg);
  const real d2k = derivative(kappa, s, 2, cfg);
  const real fv = weight(s);
  const real df = derivative(weight, s, 1, cfg) / fv;
  const real d2f = derivative(weight, s, 2, cfg) / fv;
  const real k2 = c * k;
  const real dk2 = c * dk;

  return {
      -3 * k * dk - 2 * k * k * df,
      d2k - k * k2 * k2 - k * k * k + k * C + k * d2f + 2 * dk * df,
      2 * dk * k2 + k * dk2 + 2 * k * k2 * df,
      real{0},
  };
}

/// |3 k'^2 - 2 k k'' - 4 k^2 ((1 + c^2) k^2 - C)| with c the torsion ratio (0 if planar).
inline real classification_ode_residual(const CurvatureProfile& profile, real s,
                                        const FDConfig& cfg = {}) {
  curves_detail::require_interior(profile.interval, s, cfg);
  const RealFn kappa = curves_detail::checked_curvature(profile.kappa1);
  const real c = profile.ratio();
  const real k = kappa(s);
  const real dk = derivative(kappa, s, 1, cfg);
  const real d2k = derivative(kappa, s, 2, cfg);
  return std::fabs(3 * dk * dk - 2 * k * d2k - 4 * k * k * ((1 + c * c) * k * k - profile.ambient_C));
}

/// The two proper f-biharmonic families in R^3.
struct R3Family {
  enum class Kind { Planar, Helix };

  Kind kind = Kind::Planar;
  real c1 = 1;
  real c2 = 1;
  real c3 = 0;
  real c = 0;  // tau / kappa for the helix

  void validate() const {
    if (!(c1 > 0)) throw Error(ErrorCode::InvalidArgument, "c1 must be positive");
    if (!(c2 > 0)) throw Error(ErrorCode::InvalidArgument, "c2 must be positive");
    if (kind == Kind::Helix && c == 0)
      throw Error(ErrorCode::InvalidArgument, "helix ratio c must be nonzero");
  }

  real kappa(real s) const {
    const real q = c2 * s + c3;
    const real base = kind == Kind::Planar ? 16 : 16 * (1 + c * c);
    return 4 * c2 / (base + q * q);
  }

  real tau(real s) const { return kind == Kind::Planar ? 0 : c * kappa(s); }

  CurvatureProfile profile(Interval interval) const {
    validate();
    CurvatureProfile p;
    p.kappa1 = [fam = *this](real s) { return fam.kappa(s); };
    if (kind == Kind::Helix) p.ratio_c = c;
    p.ambient_C = 0;
    p.interval = interval;
    p.f_constant_c1 = c1;
    return p;
  }
};

struct FamilyCurvature {
  real kappa = 0;
  real tau = 0;
  real f = 0;
};

inline FamilyCurvature r3_family_curvature(const R3Family& family, real s) {
  family.validate();
  FamilyCurvature out;
  out.kappa = family.kappa(s);
  out.tau = family.tau(s);
  out.f = family.c1 * std::pow(out.kappa, real(-1.5));
  return out;
}

/// An arclength-parameterised curve s -> R^3 on an interval.
class ParamCurve {
 public:
  using Gamma = std::function<Vec3(real)>;

  static constexpr real kArclengthTolerance = 1e-6L;

  /// Checks |gamma'| = 1 at `checks` evenly spaced interior parameters.
  ParamCurve(Gamma gamma, Interval interval, const FDConfig& cfg = {}, int checks = 17)
      : gamma_(std::make_shared<const Gamma>(std::move(gamma))), interval_(interval) {
    cfg.validate();
    if (!(interval_.hi > interval_.lo)) throw Error(ErrorCode::InvalidArgument, "empty curve interval");
    const real lo = interval_.lo + cfg.singular_margin;
    const real hi = interval_.hi - cfg.singular_margin;
    if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "curve interval shorter than the FD margin");
    for (int i = 0; i < checks; ++i) {
      const real s = checks == 1 ? (lo + hi) / 2 : lo + (hi - lo) * i / (checks - 1);
      require_unit_speed(s, cfg);
    }
  }

  Vec3 operator()(real s) const { return (*gamma_)(s); }
  const Interval& interval() const { return interval_; }

  Vec3 derivative(real s, int n, const FDConfig& cfg = {}) const {
    const Gamma& g = *gamma_;
    return fbiharm::derivative(g, s, n, cfg);
  }

  void require_unit_speed(real s, const FDConfig& cfg) const {
    const real speed = derivative(s, 1, cfg).norm();
    if (!(std::fabs(speed - 1) <= kArclengthTolerance))
      throw Error(ErrorCode::NotArclength, "|gamma'| deviates from 1 by more than 1e-6");
  }

 private:
  std::shared_ptr<const Gamma> gamma_;
  Interval interval_;
};

struct CurvatureTorsion {
  real kappa = 0;
  real tau = 0;
};

inline CurvatureTorsion estimate_curvature_torsion(const ParamCurve& curve, real s,
                                                   const FDConfig& cfg = {}) {
  curves_detail::require_interior(curve.interval(), s, cfg);
  const Vec3 d1 = curve.derivative(s, 1, cfg);
  if (!(std::fabs(d1.norm() - 1) <= ParamCurve::kArclengthTolerance))
    throw Error(ErrorCode::NotArclength, "|gamma'| deviates from 1 by more than 1e-6");
  const Vec3 d2 = curve.derivative(s, 2, cfg);
  CurvatureTorsion out;
  out.kappa = d2.norm();
  if (out.kappa < 1e-8L)
    throw Error(ErrorCode::VanishingCurvature, "curvature vanishes; torsion undefined");
  const Vec3 d3 = curve.derivative(s, 3, cfg);
  Mat3 m;
  m << d1, d2, d3;
  out.tau = m.determinant() / (out.kappa * out.kappa);
  return out;
}

/// Base point and Frenet frame (columns F1, F2, F3).
struct FramedPoint {
  Vec3 origin = Vec3::Zero();
  Mat3 frame = Mat3::Identity();
};

/// Output of a Frenet reconstruction: nodes, positions and frames.
struct SampledCurve {
  std::vector<real> s;
  std::vector<Vec3> points;
  std::vector<Mat3> frames;
  real max_frame_drift = 0;  // largest |F^T F - I| seen just before each re-orthonormalisation

  real step() const { return s[1] - s[0]; }

  /// Local degree-7 Lagrange interpolation through the nodes; smooth to
  /// rounding at reconstruction step sizes.
  Vec3 interpolate(real t) const {
    const std::size_t n = s.size();
    const real h = step();
    long j = static_cast<long>(std::floor((t - s.front()) / h));
    long first = std::clamp<long>(j - 3, 0, static_cast<long>(n) - 8);
    Vec3 out = Vec3::Zero();
    for (long a = first; a < first + 8; ++a) {
      real w = 1;
      for (long b = first; b < first + 8; ++b)
        if (b != a) w *= (t - s[b]) / (s[a] - s[b]);
      out += w * points[a];
    }
    return out;
  }

  ParamCurve as_curve(const FDConfig& cfg = {}) const {
    auto self = std::make_shared<const SampledCurve>(*this);
    return ParamCurve([self](real t) { return self->interpolate(t); }, Interval{s.front(), s.back()},
                      cfg);
  }
};

namespace curves_detail {

inline real orthonormality_defect(const Mat3& F) {
  return (F.transpose() * F - Mat3::Identity()).cwiseAbs().maxCoeff();
}

inline void modified_gram_schmidt(Mat3& F) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < i; ++j) F.col(i) -= F.col(j).dot(F.col(i)) * F.col(j);
    F.col(i).normalize();
  }
}

}  // namespace curves_detail

/// Integrates the Frenet system (with gamma' = F1) by classical RK4 at a fixed step,
/// re-orthonormalising the frame every 16 steps.
inline SampledCurve reconstruct_curve(const RealFn& kappa, const RealFn& tau, Interval interval,
                                      const FramedPoint& initial, real step = 1e-3L) {
  if (!(interval.hi > interval.lo)) throw Error(ErrorCode::InvalidArgument, "empty interval");
  if (!(step > 0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  if (step > interval.length() / 64)
    throw Error(ErrorCode::StepTooLarge, "step exceeds 1/64 of the interval");
  if (curves_detail::orthonormality_defect(initial.frame) > 1e-10L)
    throw Error(ErrorCode::InvalidArgument, "initial frame is not orthonormal");

  const RealFn k = curves_detail::checked_curvature(kappa);
  const long n = std::lround(interval.length() / step);
  const real h = interval.length() / n;

  auto rhs = [&](real s, const Mat3& F, Vec3& dp, Mat3& dF) {
    const real ks = k(s);
    const real ts = tau(s);
    if (!std::isfinite(ts)) throw Error(ErrorCode::NonFinite, "torsion is not finite");
    Mat3 K;
    K << 0, -ks, 0,
         ks, 0, -ts,
         0, ts, 0;
    dp = F.col(0);
    dF = F * K;
  };

  SampledCurve out;
  out.s.reserve(n + 1);
  out.points.reserve(n + 1);
  out.frames.reserve(n + 1);
  Vec3 p = initial.origin;
  Mat3 F = initial.frame;
  out.s.push_back(interval.lo);
  out.points.push_back(p);
  out.frames.push_back(F);
  for (long i = 0; i < n; ++i) {
    const real s = interval.lo + i * h;
    Vec3 p1, p2, p3, p4;
    Mat3 F1, F2, F3, F4;
    rhs(s, F, p1, F1);
    rhs(s + h / 2, F + h / 2 * F1, p2, F2);
    rhs(s + h / 2, F + h / 2 * F2, p3, F3);
    rhs(s + h, F + h * F3, p4, F4);
    constexpr real two = 2;
    p += h / 6 * (p1 + two * p2 + two * p3 + p4);
    F += h / 6 * (F1 + two * F2 + two * F3 + F4);
    if ((i + 1) % 16 == 0) {
      out.max_frame_drift = std::max(out.max_frame_drift, curves_detail::orthonormality_defect(F));
      curves_detail::modified_gram_schmidt(F);
    }
    out.s.push_back(interval.lo + (i + 1) * h);
    out.points.push_back(p);
    out.frames.push_back(F);
  }
  out.max_frame_drift = std::max(out.max_frame_drift, curves_detail::orthonormality_defect(F));
  return out;
}

/// Frenet frame of a reference curve computed by finite differences.
inline Mat3 frenet_frame(const ParamCurve& curve, real s, const FDConfig& cfg = {}) {
  const Vec3 t = curve.derivative(s, 1, cfg).normalized();
  const Vec3 accel = curve.derivative(s, 2, cfg);
  if (accel.norm() < 1e-8L) throw Error(ErrorCode::VanishingCurvature, "frame undefined where kappa = 0");
  const Vec3 n = (accel - accel.dot(t) * t).normalized();
  Mat3 F;
  F << t, n, t.cross(n);
  return F;
}

/// Largest pointwise distance between a reconstruction and a reference curve
/// after matching position and frame at the node nearest the interval midpoint.
inline real rigid_motion_deviation(const SampledCurve& sampled, const ParamCurve& reference,
                                   const FDConfig& cfg = {}) {
  const real mid = (sampled.s.front() + sampled.s.back()) / 2;
  std::size_t j = 0;
  for (std::size_t i = 0; i < sampled.s.size(); ++i)
    if (std::fabs(sampled.s[i] - mid) < std::fabs(sampled.s[j] - mid)) j = i;
  const Mat3 ref_frame = frenet_frame(reference, sampled.s[j], cfg);
  const Mat3 Q = ref_frame * sampled.frames[j].transpose();
  const Vec3 anchor = reference(sampled.s[j]);
  real worst = 0;
  for (std::size_t i = 0; i < sampled.s.size(); ++i) {
    const Vec3 mapped = Q * (sampled.points[i] - sampled.points[j]) + anchor;
    worst = std::max(worst, (mapped - reference(sampled.s[i])).norm());
  }
  return worst;
}

/// |f g'''' + 2 f' g''' + f'' g''|, the flat-ambient curve equation.
inline real euclidean_curve_residual(const ParamCurve& curve, const RealFn& f, real s,
                                     const FDConfig& cfg = {}) {
  curves_detail::require_interior(curve.interval(), s, cfg);
  curve.require_unit_speed(s, cfg);
  const RealFn weight = curves_detail::checked_weight(f);
  const real fv = weight(s);
  const real df = derivative(weight, s, 1, cfg);
  const real d2f = derivative(weight, s, 2, cfg);
  const Vec3 r = fv * curve.derivative(s, 4, cfg) + 2 * df * curve.derivative(s, 3, cfg) +
                 d2f * curve.derivative(s, 2, cfg);
  return r.norm();
}

/// The same quantity as |(f g'')''|, differentiating the product directly.
inline real euclidean_curve_residual_product_form(const ParamCurve& curve, const RealFn& f, real s,
                                                  const FDConfig& cfg = {}) {
  curves_detail::require_interior(curve.interval(), s, cfg);
  curve.require_unit_speed(s, cfg);
  const RealFn weight = curves_detail::checked_weight(f);
  auto product = [&](real t) -> Vec3 { return weight(t) * curve.derivative(t, 2, cfg); };
  return derivative(product, s, 2, cfg).norm();
}

namespace curves_detail {

/// 10-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre10 {
  std::array<real, 10> nodes{};
  std::array<real, 10> weights{};

  GaussLegendre10() {
    constexpr int n = 10;
    const real pi = std::acos(real(-1));
    for (int i = 0; i < n; ++i) {
      real x = std::cos(pi * (i + real(0.75)) / (n + real(0.5)));
      real dp = 0;
      for (int it = 0; it < 100; ++it) {
        real p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const real pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const real dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-21L) break;
      }
      nodes[i] = x;
      weights[i] = 2 / ((1 - x * x) * dp * dp);
    }
  }
};

inline const GaussLegendre10& gauss_legendre10() {
  static const GaussLegendre10 rule;
  return rule;
}

}  // namespace curves_detail

/// Reparameterises t -> P(t) on [t0, t1] by arclength. `velocity` is P'(t).
/// The result lives on [0, L] with L the arclength of P over [t0, t1].
inline ParamCurve arclength_reparameterize(std::function<Vec3(real)> position,
                                           std::function<Vec3(real)> velocity, real t0, real t1,
                                           const FDConfig& cfg = {}, int knots = 64) {
  if (!(t1 > t0) || knots < 1) throw Error(ErrorCode::InvalidArgument, "invalid parameter range");
  struct Table {
    std::function<Vec3(real)> position;
    std::function<Vec3(real)> velocity;
    real t0, dt;
    std::vector<real> length;  // arclength at knots t0 + j dt

    real speed(real t) const { return velocity(t).norm(); }

    real segment(real a, real b) const {
      const auto& gl = curves_detail::gauss_legendre10();
      const real half = (b - a) / 2, center = (a + b) / 2;
      real sum = 0;
      for (int i = 0; i < 10; ++i) sum += gl.weights[i] * speed(center + half * gl.nodes[i]);
      return sum * half;
    }

    real arclength(real t) const {
      const long cells = static_cast<long>(length.size()) - 1;
      long j = static_cast<long>(std::floor((t - t0) / dt));
      j = std::clamp<long>(j, 0, cells - 1);
      const real tj = t0 + j * dt;
      return length[j] + segment(tj, t);
    }

    real invert(real s) const {
      real t = t0 + (s / length.back()) * dt * (length.size() - 1);
      for (int it = 0; it < 50; ++it) {
        const real v = speed(t);
        if (!(v > 0)) throw Error(ErrorCode::DegenerateMetric, "curve speed vanishes");
        const real dt_step = (arclength(t) - s) / v;
        t -= dt_step;
        if (std::fabs(dt_step) <= 1e-19L * (1 + std::fabs(t))) break;
      }
      return t;
    }
  };
  auto table = std::make_shared<Table>();
  table->position = std::move(position);
  table->velocity = std::move(velocity);
  table->t0 = t0;
  table->dt = (t1 - t0) / knots;
  table->length.push_back(0);
  for (int j = 0; j < knots; ++j) {
    const real a = t0 + j * table->dt;
    table->length.push_back(table->length.back() + table->segment(a, a + table->dt));
  }
  const real total = table->length.back();
  return ParamCurve([table](real s) { return table->position(table->invert(s)); }, Interval{0, total},
                    cfg);
}

}  // namespace fbiharm
