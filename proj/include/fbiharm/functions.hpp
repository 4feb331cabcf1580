#pragma once

// f-biharmonic functions u, i.e. Delta(f Delta u) = 0 with f > 0.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fbiharm/numdiff.hpp"

namespace fbiharm {

/// The field x -> f(x) * Delta_h u(x); f must stay positive wherever it is sampled.
inline ScalarField weighted_laplacian_field(const ScalarField& u, const ScalarField& f,
                                            const FDConfig& cfg = {}) {
  const ScalarField weight = f.as_weight();
  const ScalarField lap_u = laplacian_field(u, cfg);
  return u.derive([weight, lap_u](PointView x) { return weight(x) * lap_u(x); });
}

/// |Delta_h (f Delta_h u)(x)|.
inline real f_biharmonic_residual(const ScalarField& u, const ScalarField& f, PointView x,
                                  const FDConfig& cfg = {}) {
  require_admissible(u, x, cfg);
  require_admissible(f, x, cfg);
  if (!(f(x) > 0)) throw Error(ErrorCode::NonPositiveWeight, "weight f is not positive");
  return std::fabs(detail::laplacian(weighted_laplacian_field(u, f, cfg), x, cfg));
}

// ---------------------------------------------------------------------------
// One dimension: (f u'')'' = 0, so u'' = (Ax + B)/f and
//   u(x) = \int\int (Ax + B)/f + Cx + D.

using RealFn = std::function<real(real)>;

/// Sampled solution of (f u'')'' = 0 on [lo, hi], normalised so the double
/// integral has zero value and zero slope at lo.
struct OneDimSolution {
  real A = 0, B = 0, C = 0, D = 0;
  real lo = 0, hi = 1;
  real quadrature_step = 0;
  RealFn f;
  std::vector<real> nodes;
  std::vector<real> u;    // u at nodes
  std::vector<real> du;   // u' at nodes
  std::vector<real> d2u;  // u'' = (Ax + B)/f at nodes

  /// Quintic Hermite interpolation between nodes (C^2 across nodes).
  real operator()(real x) const {
    if (!(x >= lo && x <= hi)) throw Error(ErrorCode::InvalidArgument, "point outside solution interval");
    const std::size_t cells = nodes.size() - 1;
    std::size_t j = static_cast<std::size_t>((x - lo) / quadrature_step);
    if (j >= cells) j = cells - 1;
    const real h = quadrature_step;
    const real t = (x - nodes[j]) / h;
    const real t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const real h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const real h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const real h20 = (t2 - 3 * t3 + 3 * t4 - t5) / 2;
    const real h01 = 10 * t3 - 15 * t4 + 6 * t5;
    const real h11 = -4 * t3 + 7 * t4 - 3 * t5;
    const real h21 = (t3 - 2 * t4 + t5) / 2;
    return h00 * u[j] + h10 * h * du[j] + h20 * h * h * d2u[j] + h01 * u[j + 1] +
           h11 * h * du[j + 1] + h21 * h * h * d2u[j + 1];
  }

  /// u as a field on R^1 whose singular set is the complement of (lo, hi).
  ScalarField field() const {
    auto self = std::make_shared<const OneDimSolution>(*this);
    return ScalarField(1, [self](PointView x) { return (*self)(x[0]); }, outside_interval(lo, hi));
  }

  ScalarField weight_field() const {
    auto weight = f;
    return ScalarField(1, [weight](PointView x) { return weight(x[0]); }, outside_interval(lo, hi),
                       true);
  }
};

inline OneDimSolution solve_1d(RealFn f, real A, real B, real C, real D, real lo, real hi,
                               std::optional<real> quadrature_step = std::nullopt) {
  if (!f) throw Error(ErrorCode::InvalidArgument, "missing weight");
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "empty interval");
  const real h = quadrature_step.value_or((hi - lo) / 2048);
  if (!(h > 0)) throw Error(ErrorCode::InvalidArgument, "quadrature step must be positive");
  const real cells_real = (hi - lo) / h;
  const long cells = std::lround(cells_real);
  if (cells < 2 || std::fabs(cells_real - cells) > 1e-9L * cells_real)
    throw Error(ErrorCode::InvalidArgument, "quadrature step must divide the interval length");

  auto weight_at = [&](real x) {
    const real v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "weight is not finite");
    if (!(v > 0)) throw Error(ErrorCode::NonPositiveWeight, "weight is not positive on the interval");
    return v;
  };
  auto g = [&](real x) { return (A * x + B) / weight_at(x); };

  OneDimSolution sol;
  sol.A = A, sol.B = B, sol.C = C, sol.D = D;
  sol.lo = lo, sol.hi = hi;
  sol.quadrature_step = (hi - lo) / cells;
  sol.f = f;
  const real step = sol.quadrature_step;

  // Cumulative composite Simpson (each cell with its midpoint) for
  // G0 = \int g and G1 = \int t g; then \int\int g = x G0 - G1.
  real G0 = 0, G1 = 0;
  real x_prev = lo, g_prev = g(lo);
  for (long j = 0; j <= cells; ++j) {
    const real x = lo + j * step;
    real gx = g_prev;
    if (j > 0) {
      const real xm = (x_prev + x) / 2;
      const real gm = g(xm);
      gx = g(x);
      G0 += step / 6 * (g_prev + 4 * gm + gx);
      G1 += step / 6 * (x_prev * g_prev + 4 * xm * gm + x * gx);
    }
    sol.nodes.push_back(x);
    sol.u.push_back(x * G0 - G1 + C * x + D);
    sol.du.push_back(G0 + C);
    sol.d2u.push_back(gx);
    x_prev = x;
    g_prev = gx;
  }
  return sol;
}

enum class WeightFamily { Rational, Exponential };

/// f = 1 + x^2 or f = e^-x.
inline real weight_value(WeightFamily which, real x) {
  return which == WeightFamily::Rational ? 1 + x * x : std::exp(-x);
}

/// The explicit general solutions for the two weights.
inline real closed_form_1d(WeightFamily which, real A, real B, real C, real D, real x) {
  if (which == WeightFamily::Rational)
    return (A * x - B) * std::log(1 + x * x) / 2 + (B * x + A) * std::atan(x) + (C - A) * x + D;
  return (A * x - 2 * A + B) * std::exp(x) + C * x + D;
}

// ---------------------------------------------------------------------------
// Periodic grids: u -> Delta_h(f Delta_h u) on the flat unit torus.

/// Number of singular values below rel_tol * (largest singular value).
inline std::size_t kernel_dimension(const Eigen::MatrixXd& matrix, double rel_tol) {
  if (matrix.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
  const auto& sv = svd.singularValues();
  if (!(sv.maxCoeff() > 0)) return static_cast<std::size_t>(matrix.cols());
  const double cutoff = rel_tol * sv.maxCoeff();
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] < cutoff) ++count;
  // Non-square input: missing singular values count as kernel directions.
  if (matrix.cols() > sv.size()) count += matrix.cols() - sv.size();
  return count;
}

inline constexpr std::size_t kMaxTorusPoints = 4096;

inline std::size_t grid_total(const std::vector<int>& sizes) {
  std::size_t n = 1;
  for (int s : sizes) {
    if (s < 3) throw Error(ErrorCode::InvalidArgument, "periodic grid needs at least 3 points per axis");
    n *= static_cast<std::size_t>(s);
  }
  return n;
}

/// Second-order periodic Laplacian with spacing 1/N per axis (row-major indexing).
inline Eigen::MatrixXd periodic_laplacian(const std::vector<int>& sizes) {
  if (sizes.empty() || sizes.size() > 2)
    throw Error(ErrorCode::InvalidArgument, "periodic grids are 1- or 2-dimensional");
  const std::size_t n = grid_total(sizes);
  if (n > kMaxTorusPoints) throw Error(ErrorCode::GridTooLarge, "grid exceeds 4096 points");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const int nx = sizes[0];
  const int ny = sizes.size() == 2 ? sizes[1] : 1;
  auto index = [&](int i, int j) { return ((i + nx) % nx) * ny + (j + ny) % ny; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const int row = index(i, j);
      const double hx2 = double(nx) * nx;
      L(row, index(i + 1, j)) += hx2;
      L(row, index(i - 1, j)) += hx2;
      L(row, row) -= 2 * hx2;
      if (sizes.size() == 2) {
        const double hy2 = double(ny) * ny;
        L(row, index(i, j + 1)) += hy2;
        L(row, index(i, j - 1)) += hy2;
        L(row, row) -= 2 * hy2;
      }
    }
  return L;
}

struct TorusOperator {
  int m = 1;
  std::vector<int> grid_sizes;
  std::vector<double> f_samples;
  Eigen::MatrixXd matrix;
};

/// Assembles Delta_h diag(f) Delta_h. `f_samples` is row-major over the grid.
inline TorusOperator build_torus_operator(std::vector<int> grid_sizes, std::vector<double> f_samples) {
  if (grid_sizes.empty() || grid_sizes.size() > 2)
    throw Error(ErrorCode::InvalidArgument, "torus dimension must be 1 or 2");
  const std::size_t n = grid_total(grid_sizes);
  if (n > kMaxTorusPoints) throw Error(ErrorCode::GridTooLarge, "grid exceeds 4096 points");
  if (f_samples.size() != n) throw Error(ErrorCode::InvalidArgument, "one weight sample per grid point");
  for (double v : f_samples)
    if (!(v > 0) || !std::isfinite(v))
      throw Error(ErrorCode::NonPositiveWeight, "torus weight samples must be positive");
  const Eigen::MatrixXd L = periodic_laplacian(grid_sizes);
  const Eigen::Map<const Eigen::VectorXd> f(f_samples.data(), static_cast<Eigen::Index>(n));
  TorusOperator op;
  op.m = static_cast<int>(grid_sizes.size());
  op.matrix = L * f.asDiagonal() * L;
  op.grid_sizes = std::move(grid_sizes);
  op.f_samples = std::move(f_samples);
  return op;
}

/// Weight samples f(i, j) on a grid, row-major; j is always 0 in one dimension.
inline std::vector<double> sample_grid(const std::vector<int>& sizes,
                                       const std::function<double(int, int)>& f) {
  std::vector<double> out;
  const int nx = sizes.at(0);
  const int ny = sizes.size() == 2 ? sizes[1] : 1;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) out.push_back(f(i, j));
  return out;
}

inline std::size_t torus_kernel_dimension(const TorusOperator& op, double rel_tol = 1e-9) {
  if (op.matrix.rows() > static_cast<Eigen::Index>(kMaxTorusPoints))
    throw Error(ErrorCode::GridTooLarge, "grid exceeds 4096 points");
  return kernel_dimension(op.matrix, rel_tol);
}

}  // namespace fbiharm
