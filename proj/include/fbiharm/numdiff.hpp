#pragma once

// Finite-difference calculus on scalar fields over R^m.
//
// All arithmetic is carried out in `real` (long double). Nested operators
// such as the bi-Laplacian amplify evaluation rounding by h^-4, and the
// extra eight bits of mantissa are what make the default step usable.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fbiharm/error.hpp"

namespace fbiharm {

using real = long double;
using Point = std::vector<real>;
using PointView = std::span<const real>;

inline constexpr real kInfinity = std::numeric_limits<real>::infinity();

inline real norm(PointView x) {
  real s = 0;
  for (real v : x) s += v * v;
  return std::sqrt(s);
}

inline real dot(PointView a, PointView b) {
  real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Step control for every finite-difference operator.
///
/// `singular_margin` is the minimum distance from a field's singular set at
/// which an operator may be evaluated. The widest stencil in the library
/// (order-4 Laplacian of an order-4 Laplacian) reaches 4*step, hence the
/// invariant singular_margin >= 4*step.
struct FDConfig {
  real step = 7e-3L;
  int order = 4;
  bool richardson = true;
  real singular_margin = 4 * 7e-3L;

  static FDConfig with_step(real h, int order = 4, bool richardson = true) {
    FDConfig cfg;
    cfg.step = h;
    cfg.order = order;
    cfg.richardson = richardson;
    cfg.singular_margin = 4 * h;
    return cfg;
  }

  void validate() const {
    if (!(step > 0) || !std::isfinite(step))
      throw Error(ErrorCode::InvalidArgument, "FD step must be positive and finite");
    if (order != 2 && order != 4)
      throw Error(ErrorCode::InvalidArgument, "FD stencil order must be 2 or 4");
    if (!(singular_margin >= 4 * step * (1 - 1e-12L)))
      throw Error(ErrorCode::InvalidArgument, "singular_margin must be at least 4*step");
  }
};

/// Distance from a point to a field's excluded set; +inf when there is none.
using SingularDistance = std::function<real(PointView)>;

inline SingularDistance origin_singular() {
  return [](PointView x) { return norm(x); };
}

/// Distance to the complement of the open box (lo, hi) in R^1.
inline SingularDistance outside_interval(real lo, real hi) {
  return [lo, hi](PointView x) { return std::min(x[0] - lo, hi - x[0]); };
}

/// A real-valued function on an open subset of R^m with a declared singular set.
class ScalarField {
 public:
  using Eval = std::function<real(PointView)>;

  ScalarField(std::size_t dim, Eval eval, SingularDistance singular = {},
              bool positivity_required = false)
      : dim_(dim),
        eval_(std::make_shared<const Eval>(std::move(eval))),
        singular_(singular ? std::make_shared<const SingularDistance>(std::move(singular))
                           : nullptr),
        positivity_required_(positivity_required) {
    if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "field dimension must be positive");
    if (!*eval_) throw Error(ErrorCode::InvalidArgument, "field has no evaluator");
  }

  std::size_t dim() const { return dim_; }
  bool positivity_required() const { return positivity_required_; }
  const std::shared_ptr<const SingularDistance>& singular_set() const { return singular_; }

  real singular_distance(PointView x) const { return singular_ ? (*singular_)(x) : kInfinity; }

  /// Raw evaluation. Rejects points on the singular set, non-finite values,
  /// and non-positive values of fields that must stay positive.
  real operator()(PointView x) const {
    if (x.size() != dim_)
      throw Error(ErrorCode::InvalidArgument, "point dimension " + std::to_string(x.size()) +
                                                  " does not match field dimension " +
                                                  std::to_string(dim_));
    if (singular_ && !((*singular_)(x) > 0))
      throw Error(ErrorCode::SingularEvaluation, "evaluation on the singular set");
    const real value = (*eval_)(x);
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFinite, "field returned a non-finite value");
    if (positivity_required_ && !(value > 0))
      throw Error(ErrorCode::NonPositiveWeight, "weight is not positive at a sample point");
    return value;
  }

  real operator()(std::initializer_list<real> x) const {
    return (*this)(PointView(x.begin(), x.size()));
  }

  /// A new field on the same domain and singular set.
  ScalarField derive(Eval eval, bool positivity_required = false) const {
    ScalarField out(*this);
    out.eval_ = std::make_shared<const Eval>(std::move(eval));
    out.positivity_required_ = positivity_required;
    return out;
  }

  ScalarField as_weight() const {
    ScalarField out(*this);
    out.positivity_required_ = true;
    return out;
  }

 private:
  std::size_t dim_;
  std::shared_ptr<const Eval> eval_;
  std::shared_ptr<const SingularDistance> singular_;
  bool positivity_required_;
};

namespace fields {

inline ScalarField constant(std::size_t dim, real c) {
  return ScalarField(dim, [c](PointView) { return c; });
}

/// |x|^alpha on R^m minus the origin.
inline ScalarField radial_power(std::size_t dim, real alpha) {
  return ScalarField(dim, [alpha](PointView x) { return std::pow(norm(x), alpha); },
                     origin_singular());
}

/// x^i |x|^-p on R^m minus the origin.
inline ScalarField coordinate_times_radial(std::size_t dim, std::size_t i, real p) {
  return ScalarField(dim, [i, p](PointView x) { return x[i] * std::pow(norm(x), -p); },
                     origin_singular());
}

inline ScalarField from_function(std::size_t dim, ScalarField::Eval eval) {
  return ScalarField(dim, std::move(eval));
}

/// Pointwise product on the domain of `a` (the singular sets are assumed equal).
inline ScalarField product(const ScalarField& a, const ScalarField& b) {
  return a.derive([a, b](PointView x) { return a(x) * b(x); });
}

inline ScalarField linear_combination(real ca, const ScalarField& a, real cb, const ScalarField& b) {
  return a.derive([=](PointView x) { return ca * a(x) + cb * b(x); });
}

}  // namespace fields

namespace detail {

// One-dimensional stencils. `g(t)` evaluates the function at offset t.
template <class G>
auto first_difference(const G& g, real h, int order) {
  using T = std::decay_t<decltype(g(real{}))>;
  if (order == 2) {
    T out = (g(h) - g(-h)) / (2 * h);
    return out;
  }
  constexpr real eight = 8;
  T out = (g(-2 * h) - eight * g(-h) + eight * g(h) - g(2 * h)) / (12 * h);
  return out;
}

template <class G>
auto second_difference(const G& g, real h, int order) {
  using T = std::decay_t<decltype(g(real{}))>;
  if (order == 2) {
    constexpr real two = 2;
    T out = (g(h) - two * g(real{0}) + g(-h)) / (h * h);
    return out;
  }
  constexpr real sixteen = 16, thirty = 30;
  T out = (sixteen * (g(h) + g(-h)) - (g(2 * h) + g(-2 * h)) - thirty * g(real{0})) / (12 * h * h);
  return out;
}

/// Evaluates `stencil(h)`, optionally combined with `stencil(h/2)` to cancel
/// the leading truncation term (one Richardson step).
template <class S>
auto extrapolate(const S& stencil, const FDConfig& cfg) {
  using T = std::decay_t<decltype(stencil(real{}))>;
  T coarse = stencil(cfg.step);
  if (!cfg.richardson) return coarse;
  T fine = stencil(cfg.step / 2);
  const real w = cfg.order == 2 ? 4 : 16;
  T out = (w * fine - coarse) / (w - 1);
  return out;
}

template <class G>
auto d1(const G& g, real s, const FDConfig& cfg) {
  auto shifted = [&g, s](real t) { return g(s + t); };
  return extrapolate([&](real h) { return first_difference(shifted, h, cfg.order); }, cfg);
}

template <class G>
auto d2(const G& g, real s, const FDConfig& cfg) {
  auto shifted = [&g, s](real t) { return g(s + t); };
  return extrapolate([&](real h) { return second_difference(shifted, h, cfg.order); }, cfg);
}

template <class G>
auto derivative_1d(const G& g, real s, int n, const FDConfig& cfg) {
  using T = std::decay_t<decltype(g(real{}))>;
  auto second = [&](real t) { return d2(g, t, cfg); };
  switch (n) {
    case 0: {
      T out = g(s);
      return out;
    }
    case 1: return d1(g, s, cfg);
    case 2: return d2(g, s, cfg);
    case 3: return d1(second, s, cfg);
    case 4: return d2(second, s, cfg);
    default:
      throw Error(ErrorCode::InvalidArgument, "derivative order must be in 0..4");
  }
}

inline real partial(const ScalarField& field, PointView x, std::size_t axis, const FDConfig& cfg) {
  Point y(x.begin(), x.end());
  auto g = [&](real t) {
    y[axis] = x[axis] + t;
    return field(y);
  };
  return extrapolate([&](real h) { return first_difference(g, h, cfg.order); }, cfg);
}

inline Point gradient(const ScalarField& field, PointView x, const FDConfig& cfg) {
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = partial(field, x, i, cfg);
  return out;
}

inline real laplacian(const ScalarField& field, PointView x, const FDConfig& cfg) {
  Point y(x.begin(), x.end());
  auto stencil = [&](real h) {
    const real center = field(x);
    real sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto g = [&](real t) {
        if (t == 0) return center;
        y[i] = x[i] + t;
        const real v = field(y);
        y[i] = x[i];
        return v;
      };
      sum += second_difference(g, h, cfg.order);
    }
    return sum;
  };
  return extrapolate(stencil, cfg);
}

inline real directional_derivative(const ScalarField& field, PointView x, PointView direction,
                                   const FDConfig& cfg) {
  const real len = norm(direction);
  if (len == 0) return 0;
  Point y(x.size());
  auto g = [&](real t) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + t * direction[i] / len;
    return field(y);
  };
  return len * extrapolate([&](real h) { return first_difference(g, h, cfg.order); }, cfg);
}

}  // namespace detail

/// Throws SingularEvaluation unless x keeps the configured margin from the singular set.
inline void require_admissible(const ScalarField& field, PointView x, const FDConfig& cfg) {
  cfg.validate();
  if (x.size() != field.dim())
    throw Error(ErrorCode::InvalidArgument, "point dimension does not match field dimension");
  for (real v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "non-finite evaluation point");
  if (!(field.singular_distance(x) >= cfg.singular_margin))
    throw Error(ErrorCode::SingularEvaluation,
                "point is closer than singular_margin to the singular set");
}

inline Point gradient(const ScalarField& field, PointView x, const FDConfig& cfg = {}) {
  require_admissible(field, x, cfg);
  return detail::gradient(field, x, cfg);
}

inline real laplacian(const ScalarField& field, PointView x, const FDConfig& cfg = {}) {
  require_admissible(field, x, cfg);
  return detail::laplacian(field, x, cfg);
}

/// The field x -> Delta_h u(x), on the same domain as u.
inline ScalarField laplacian_field(const ScalarField& field, const FDConfig& cfg = {}) {
  return field.derive([field, cfg](PointView x) { return detail::laplacian(field, x, cfg); });
}

/// Delta_h applied to the field Delta_h u.
inline real bilaplacian(const ScalarField& field, PointView x, const FDConfig& cfg = {}) {
  require_admissible(field, x, cfg);
  return detail::laplacian(laplacian_field(field, cfg), x, cfg);
}

inline real directional_derivative(const ScalarField& field, PointView x, PointView direction,
                                   const FDConfig& cfg = {}) {
  require_admissible(field, x, cfg);
  if (direction.size() != x.size())
    throw Error(ErrorCode::InvalidArgument, "direction dimension does not match point");
  return detail::directional_derivative(field, x, direction, cfg);
}

/// n-th derivative (n = 0..4) of a function of one real variable. The value
/// type may be `real` or any vector type closed under + and scalar *.
/// Third and fourth derivatives are nested: D1(D2 g) and D2(D2 g).
template <class G>
auto derivative(const G& g, real s, int n, const FDConfig& cfg = {}) {
  cfg.validate();
  return detail::derivative_1d(g, s, n, cfg);
}

/// Closed form Delta |x|^alpha = alpha (alpha - 2 + m) |x|^(alpha - 2) on R^m.
inline real radial_laplacian(real alpha, int m, real r) {
  if (!std::isfinite(alpha) || !std::isfinite(r))
    throw Error(ErrorCode::NonFinite, "non-finite input to radial_laplacian");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (!(r > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (alpha == 0) return 0;
  return alpha * (alpha - 2 + m) * std::pow(r, alpha - 2);
}

}  // namespace fbiharm
