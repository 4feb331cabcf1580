#pragma once

// Surfaces in R^3 given by charts (u, v) -> X(u, v): fundamental forms,
// shape operator, and the residuals of the f-biharmonic hypersurface system
// in a space form of curvature C (m = 2):
//
//   normal:  Delta H - H |A|^2 + m C H + H (Delta f)/f + 2 <grad ln f, grad H>
//   tangent: 2 A(grad H) + (m/2) grad H^2 + 2 H A(grad ln f)
//
// Delta and grad are those of the induced metric. Sign conventions:
// II_ij = <X_ij, xi>, A = I^-1 II, H = tr(A)/2, xi = orientation * X_u x X_v / |X_u x X_v|.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "fbiharm/curves.hpp"
#include "fbiharm/functions.hpp"
#include "fbiharm/numdiff.hpp"

namespace fbiharm {

using Vec2 = Eigen::Matrix<real, 2, 1>;
using Mat2 = Eigen::Matrix<real, 2, 2>;
using MatX = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using VecX = Eigen::Matrix<real, Eigen::Dynamic, 1>;

struct ChartDomain {
  real u_lo = -kInfinity, u_hi = kInfinity;
  real v_lo = -kInfinity, v_hi = kInfinity;

  bool contains(real u, real v) const { return u > u_lo && u < u_hi && v > v_lo && v < v_hi; }
};

/// A parameterised surface patch. The chart is assumed analytic on a
/// neighbourhood of the domain so stencils may step slightly outside it.
struct ParamSurface {
  using Chart = std::function<Vec3(real, real)>;

  Chart chart;
  ChartDomain domain;
  int orientation = 1;
};

struct SurfaceGeometry {
  Mat2 first_form;
  Mat2 second_form;
  Mat2 shape_operator;
  real mean_curvature = 0;
  real norm_A_sq = 0;
  Vec3 normal = Vec3::Zero();
};

namespace surfaces {

inline ParamSurface plane() {
  return {[](real u, real v) { return Vec3(u, v, 0); }, {}, 1};
}

/// (theta, z) -> (R cos theta, R sin theta, z); orientation -1 is the inward normal.
inline ParamSurface cylinder(real R, int orientation = -1) {
  if (!(R > 0)) throw Error(ErrorCode::InvalidArgument, "cylinder radius must be positive");
  const real two_pi = 2 * std::acos(real(-1));
  return {[R](real t, real z) { return Vec3(R * std::cos(t), R * std::sin(t), z); },
          {0, two_pi, -kInfinity, kInfinity},
          orientation};
}

/// (theta, phi) -> R (sin theta cos phi, sin theta sin phi, cos theta);
/// orientation +1 is the outward normal.
inline ParamSurface sphere(real R = 1, int orientation = 1) {
  if (!(R > 0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be positive");
  const real pi = std::acos(real(-1));
  return {[R](real t, real p) {
            return Vec3(R * std::sin(t) * std::cos(p), R * std::sin(t) * std::sin(p), R * std::cos(t));
          },
          {0, pi, 0, 2 * pi},
          orientation};
}

inline ParamSurface flipped(ParamSurface s) {
  s.orientation = -s.orientation;
  return s;
}

}  // namespace surfaces

namespace surface_detail {

inline void require_interior(const ParamSurface& surface, real u, real v, const FDConfig& cfg) {
  cfg.validate();
  if (!surface.chart) throw Error(ErrorCode::InvalidArgument, "surface has no chart");
  if (surface.orientation != 1 && surface.orientation != -1)
    throw Error(ErrorCode::InvalidArgument, "orientation must be +1 or -1");
  if (!std::isfinite(u) || !std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite chart point");
  if (!surface.domain.contains(u, v))
    throw Error(ErrorCode::InvalidArgument, "chart point is not interior to the domain");
}

inline Vec3 partial_u(const ParamSurface& s, real u, real v, const FDConfig& cfg) {
  return detail::d1([&](real t) { return s.chart(t, v); }, u, cfg);
}

inline Vec3 partial_v(const ParamSurface& s, real u, real v, const FDConfig& cfg) {
  return detail::d1([&](real t) { return s.chart(u, t); }, v, cfg);
}

inline Mat2 metric(const ParamSurface& s, real u, real v, const FDConfig& cfg) {
  const Vec3 xu = partial_u(s, u, v, cfg);
  const Vec3 xv = partial_v(s, u, v, cfg);
  Mat2 g;
  g << xu.dot(xu), xu.dot(xv), xu.dot(xv), xv.dot(xv);
  if (!(g.determinant() > 1e-10L))
    throw Error(ErrorCode::DegenerateMetric, "first fundamental form is degenerate");
  return g;
}

inline SurfaceGeometry geometry(const ParamSurface& s, real u, real v, const FDConfig& cfg) {
  const Vec3 xu = partial_u(s, u, v, cfg);
  const Vec3 xv = partial_v(s, u, v, cfg);
  const Vec3 xuu = detail::d2([&](real t) { return s.chart(t, v); }, u, cfg);
  const Vec3 xvv = detail::d2([&](real t) { return s.chart(u, t); }, v, cfg);
  const Vec3 xuv = detail::d1([&](real t) { return partial_v(s, t, v, cfg); }, u, cfg);

  SurfaceGeometry out;
  out.first_form << xu.dot(xu), xu.dot(xv), xu.dot(xv), xv.dot(xv);
  if (!(out.first_form.determinant() > 1e-10L))
    throw Error(ErrorCode::DegenerateMetric, "first fundamental form is degenerate");
  const Vec3 cross = xu.cross(xv);
  out.normal = static_cast<real>(s.orientation) * cross / cross.norm();
  out.second_form << xuu.dot(out.normal), xuv.dot(out.normal), xuv.dot(out.normal),
      xvv.dot(out.normal);
  out.shape_operator = out.first_form.inverse() * out.second_form;
  out.mean_curvature = out.shape_operator.trace() / 2;
  out.norm_A_sq = (out.shape_operator * out.shape_operator).trace();
  return out;
}

using SurfaceFn = std::function<real(real, real)>;

inline Vec2 coordinate_gradient(const SurfaceFn& F, real u, real v, const FDConfig& cfg) {
  return Vec2(detail::d1([&](real t) { return F(t, v); }, u, cfg),
              detail::d1([&](real t) { return F(u, t); }, v, cfg));
}

/// Divergence form (1/sqrt g) d_i (sqrt g g^ij d_j F).
inline real laplace_beltrami(const ParamSurface& s, const SurfaceFn& F, real u, real v,
                             const FDConfig& cfg) {
  auto flux = [&](real a, real b) -> Vec2 {
    const Mat2 g = metric(s, a, b, cfg);
    return std::sqrt(g.determinant()) * (g.inverse() * coordinate_gradient(F, a, b, cfg));
  };
  const real du = detail::d1([&](real t) { return flux(t, v)[0]; }, u, cfg);
  const real dv = detail::d1([&](real t) { return flux(u, t)[1]; }, v, cfg);
  return (du + dv) / std::sqrt(metric(s, u, v, cfg).determinant());
}

inline SurfaceFn as_surface_fn(const ScalarField& f) {
  if (f.dim() != 2) throw Error(ErrorCode::InvalidArgument, "surface weight must be a field on R^2");
  return [f](real u, real v) {
    const real p[2] = {u, v};
    return f(PointView(p, 2));
  };
}

}  // namespace surface_detail

inline SurfaceGeometry surface_geometry(const ParamSurface& surface, real u, real v,
                                        const FDConfig& cfg = {}) {
  surface_detail::require_interior(surface, u, v, cfg);
  return surface_detail::geometry(surface, u, v, cfg);
}

/// Laplace-Beltrami operator of the induced metric applied to a chart function.
inline real laplace_beltrami(const ParamSurface& surface, const std::function<real(real, real)>& F,
                             real u, real v, const FDConfig& cfg = {}) {
  surface_detail::require_interior(surface, u, v, cfg);
  return surface_detail::laplace_beltrami(surface, F, u, v, cfg);
}

/// Componentwise Laplace-Beltrami of the chart, i.e. the tension of the immersion.
inline Vec3 induced_tension(const ParamSurface& surface, real u, real v, const FDConfig& cfg = {}) {
  surface_detail::require_interior(surface, u, v, cfg);
  Vec3 out;
  for (int a = 0; a < 3; ++a)
    out[a] = surface_detail::laplace_beltrami(
        surface, [&](real p, real q) { return surface.chart(p, q)[a]; }, u, v, cfg);
  return out;
}

struct HypersurfaceResidual {
  real normal = 0;
  real tangent = 0;
};

inline HypersurfaceResidual hypersurface_residual(const ParamSurface& surface, const ScalarField& f,
                                                  real u, real v, real ambient_C = 0,
                                                  const FDConfig& cfg = {}) {
  using namespace surface_detail;
  require_interior(surface, u, v, cfg);
  constexpr real m = 2;
  const SurfaceFn weight = as_surface_fn(f.as_weight());
  const real fv = weight(u, v);

  const SurfaceGeometry geo = geometry(surface, u, v, cfg);
  const SurfaceFn mean_curvature = [&](real a, real b) {
    return geometry(surface, a, b, cfg).mean_curvature;
  };
  const Mat2 g_inv = geo.first_form.inverse();
  const real H = geo.mean_curvature;
  const Vec2 grad_H = g_inv * coordinate_gradient(mean_curvature, u, v, cfg);
  const Vec2 grad_ln_f = g_inv * coordinate_gradient(weight, u, v, cfg) / fv;
  const real lap_H = surface_detail::laplace_beltrami(surface, mean_curvature, u, v, cfg);
  const real lap_f = surface_detail::laplace_beltrami(surface, weight, u, v, cfg);
  const real grad_dot = grad_ln_f.dot(geo.first_form * grad_H);

  HypersurfaceResidual out;
  out.normal = std::fabs(lap_H - H * geo.norm_A_sq + m * ambient_C * H + H * lap_f / fv + 2 * grad_dot);
  const Vec2 tangent = 2 * (geo.shape_operator * grad_H) + m * H * grad_H +
                       2 * H * (geo.shape_operator * grad_ln_f);
  out.tangent = std::sqrt(std::max(real(0), tangent.dot(geo.first_form * tangent)));
  return out;
}

/// f = (C2 e^{+-z/R} - C1 C2^-1 R^2 e^{-+z/R}) / 2 on the cylinder of radius R.
inline real cylinder_f_family(real R, real C1, real C2, int sign, real z) {
  if (!(R > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (C2 == 0) throw Error(ErrorCode::InvalidArgument, "C2 must be nonzero");
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  const real value = (C2 * std::exp(sign * z / R) - C1 / C2 * R * R * std::exp(-sign * z / R)) / 2;
  if (!(value > 0)) throw Error(ErrorCode::NonPositiveWeight, "cylinder weight is not positive");
  return value;
}

/// The family above as a weight field on the (theta, z) chart.
inline ScalarField cylinder_weight_field(real R, real C1, real C2, int sign) {
  return ScalarField(2, [=](PointView x) { return cylinder_f_family(R, C1, C2, sign, x[1]); }, {}, true);
}

struct ReducedSystemResidual {
  real laplace_equation = 0;   // |Delta f - (|A|^2 - m) f|
  real kernel_equation = 0;    // |A (grad ln f)|
};

/// Residuals of the system a constant-mean-curvature f-biharmonic hypersurface
/// of S^{m+1} reduces to, for user-supplied constant H, |A|^2 and shape
/// operator, with f given in flat chart coordinates on R^m.
inline ReducedSystemResidual cmc_sphere_system_residual(real H, real norm_A_sq, const MatX& shape_operator,
                                                        const ScalarField& f, PointView x,
                                                        const FDConfig& cfg = {}) {
  if (H == 0 || !std::isfinite(H)) throw Error(ErrorCode::InvalidArgument, "H must be a nonzero constant");
  const auto m = static_cast<Eigen::Index>(f.dim());
  if (shape_operator.rows() != m || shape_operator.cols() != m)
    throw Error(ErrorCode::InvalidArgument, "shape operator must be m x m");
  require_admissible(f, x, cfg);
  const ScalarField weight = f.as_weight();
  const real fv = weight(x);
  ReducedSystemResidual out;
  out.laplace_equation =
      std::fabs(detail::laplacian(weight, x, cfg) - (norm_A_sq - static_cast<real>(m)) * fv);
  const Point grad = detail::gradient(weight, x, cfg);
  VecX grad_ln_f(m);
  for (Eigen::Index i = 0; i < m; ++i) grad_ln_f[i] = grad[i] / fv;
  out.kernel_equation = (shape_operator * grad_ln_f).norm();
  return out;
}

/// Periodic-grid operator Delta_h - (|A|^2 - m) on the flat unit torus.
inline Eigen::MatrixXd reduced_system_operator(const std::vector<int>& grid_sizes, double norm_A_sq,
                                               int m) {
  Eigen::MatrixXd op = periodic_laplacian(grid_sizes);
  op.diagonal().array() -= (norm_A_sq - m);
  return op;
}

}  // namespace fbiharm
