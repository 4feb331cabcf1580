#pragma once

// Tension, bitension and f-bitension of maps into Euclidean space, the
// inversion family x -> x |x|^-p with weights |x|^k, and a numerical check of
// the Bochner-type identity satisfied along f-biharmonic maps.
//
// For a Euclidean target every field is computed componentwise:
//   tau^a       = Delta phi^a
//   tau_2^a     = Delta^2 phi^a
//   tau_{2,f}^a = f Delta^2 phi^a + (Delta f) Delta phi^a + 2 <grad f, grad Delta phi^a>
// The last term is the flat covariant derivative of tau along grad f.

#include <cmath>
#include <string>
#include <vector>

#include "fbiharm/numdiff.hpp"
#include "fbiharm/report.hpp"

namespace fbiharm {

/// A map R^m -> R^n given by components sharing one domain.
class MapField {
 public:
  explicit MapField(std::vector<ScalarField> components) : components_(std::move(components)) {
    if (components_.empty()) throw Error(ErrorCode::InvalidArgument, "map has no components");
    const auto& first = components_.front();
    for (const auto& c : components_) {
      if (c.dim() != first.dim())
        throw Error(ErrorCode::InvalidArgument, "map components differ in domain dimension");
      if (c.singular_set() != first.singular_set())
        throw Error(ErrorCode::InvalidArgument, "map components declare different singular sets");
    }
  }

  /// Components built from plain evaluators over a shared singular set.
  MapField(std::size_t dim_in, const std::vector<ScalarField::Eval>& evals,
           SingularDistance singular = {})
      : MapField(build(dim_in, evals, std::move(singular))) {}

  std::size_t dim_in() const { return components_.front().dim(); }
  std::size_t dim_out() const { return components_.size(); }
  const ScalarField& component(std::size_t a) const { return components_.at(a); }
  const std::vector<ScalarField>& components() const { return components_; }

  Point operator()(PointView x) const {
    Point out(dim_out());
    for (std::size_t a = 0; a < dim_out(); ++a) out[a] = components_[a](x);
    return out;
  }

 private:
  static std::vector<ScalarField> build(std::size_t dim_in,
                                        const std::vector<ScalarField::Eval>& evals,
                                        SingularDistance singular) {
    if (evals.empty()) throw Error(ErrorCode::InvalidArgument, "map has no components");
    ScalarField base(dim_in, evals.front(), std::move(singular));
    std::vector<ScalarField> out;
    for (const auto& e : evals) out.push_back(base.derive(e));
    return out;
  }

  std::vector<ScalarField> components_;
};

namespace maps {

inline MapField identity(std::size_t m) {
  std::vector<ScalarField::Eval> evals;
  for (std::size_t i = 0; i < m; ++i) evals.push_back([i](PointView x) { return x[i]; });
  return MapField(m, evals);
}

inline void require_map_admissible(const MapField& phi, PointView x, const FDConfig& cfg) {
  for (const auto& c : phi.components()) require_admissible(c, x, cfg);
}

}  // namespace maps

inline Point tension(const MapField& phi, PointView x, const FDConfig& cfg = {}) {
  maps::require_map_admissible(phi, x, cfg);
  Point out(phi.dim_out());
  for (std::size_t a = 0; a < phi.dim_out(); ++a) out[a] = detail::laplacian(phi.component(a), x, cfg);
  return out;
}

inline Point bitension(const MapField& phi, PointView x, const FDConfig& cfg = {}) {
  maps::require_map_admissible(phi, x, cfg);
  Point out(phi.dim_out());
  for (std::size_t a = 0; a < phi.dim_out(); ++a)
    out[a] = detail::laplacian(laplacian_field(phi.component(a), cfg), x, cfg);
  return out;
}

inline real require_positive_weight(const ScalarField& f, PointView x) {
  const real value = f(x);
  if (!(value > 0)) throw Error(ErrorCode::NonPositiveWeight, "weight f is not positive");
  return value;
}

inline Point f_bitension(const MapField& phi, const ScalarField& f, PointView x,
                         const FDConfig& cfg = {}) {
  maps::require_map_admissible(phi, x, cfg);
  require_admissible(f, x, cfg);
  const ScalarField weight = f.as_weight();
  const real fx = require_positive_weight(weight, x);
  const real lap_f = detail::laplacian(weight, x, cfg);
  const Point grad_f = detail::gradient(weight, x, cfg);

  Point out(phi.dim_out());
  for (std::size_t a = 0; a < phi.dim_out(); ++a) {
    const ScalarField tau_a = laplacian_field(phi.component(a), cfg);
    const real tension_a = tau_a(x);
    const real bitension_a = detail::laplacian(tau_a, x, cfg);
    const real along_grad_f = detail::directional_derivative(tau_a, x, grad_f, cfg);
    out[a] = fx * bitension_a + lap_f * tension_a + 2 * along_grad_f;
  }
  return out;
}

/// x -> x |x|^-p, weighted by f = |x|^k, on R^m minus the origin.
struct InversionFamily {
  int m = 3;
  real p = 2;
  real k = 4;

  void validate() const {
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "inversion family needs m >= 2");
    if (!std::isfinite(p) || !std::isfinite(k))
      throw Error(ErrorCode::NonFinite, "non-finite inversion exponent");
  }

  MapField map() const {
    validate();
    std::vector<ScalarField> components;
    const ScalarField base = fields::coordinate_times_radial(m, 0, p);
    const real pp = p;
    for (int i = 0; i < m; ++i)
      components.push_back(
          base.derive([i, pp](PointView x) { return x[i] * std::pow(norm(x), -pp); }));
    return MapField(std::move(components));
  }

  ScalarField weight() const {
    validate();
    return fields::radial_power(m, k).as_weight();
  }

  /// p (p - m)(k - p - 2)(k - p + m - 2); the f-bitension is this times x |x|^(k-p-4).
  real characteristic_product() const { return p * (p - m) * (k - p - 2) * (k - p + m - 2); }
};

enum class InversionCase {
  HarmonicIdentityPower,  // (i)   p = 0
  HarmonicCriticalPower,  // (ii)  p = m
  WeightAbove,            // (iii) k = p + 2
  WeightBelow,            // (iv)  k = p + 2 - m
};

inline const char* case_label(InversionCase c) {
  switch (c) {
    case InversionCase::HarmonicIdentityPower: return "i";
    case InversionCase::HarmonicCriticalPower: return "ii";
    case InversionCase::WeightAbove: return "iii";
    case InversionCase::WeightBelow: return "iv";
  }
  return "?";
}

struct InversionClassification {
  bool f_biharmonic = false;
  std::vector<InversionCase> cases;

  std::string labels() const {
    std::string out;
    for (auto c : cases) {
      if (!out.empty()) out += ",";
      out += case_label(c);
    }
    return out;
  }
};

/// Algebraic criterion: every vanishing factor of the characteristic product is reported.
inline InversionClassification inversion_is_f_biharmonic(const InversionFamily& fam,
                                                         real tol = 1e-12L) {
  fam.validate();
  InversionClassification out;
  auto zero = [tol](real v) { return std::fabs(v) <= tol; };
  if (zero(fam.p)) out.cases.push_back(InversionCase::HarmonicIdentityPower);
  if (zero(fam.p - fam.m)) out.cases.push_back(InversionCase::HarmonicCriticalPower);
  if (zero(fam.k - fam.p - 2)) out.cases.push_back(InversionCase::WeightAbove);
  if (zero(fam.k - fam.p + fam.m - 2)) out.cases.push_back(InversionCase::WeightBelow);
  out.f_biharmonic = !out.cases.empty();
  return out;
}

/// Accept / reject thresholds for numeric f-bitension verdicts.
struct VerdictThresholds {
  real accept = 1e-4L;
  real reject = 1e-2L;
};

enum class NumericVerdict { Accept, Reject, Inconclusive };

inline NumericVerdict classify_residual(real max_residual, const VerdictThresholds& t = {}) {
  if (max_residual < t.accept) return NumericVerdict::Accept;
  if (max_residual > t.reject) return NumericVerdict::Reject;
  return NumericVerdict::Inconclusive;
}

/// |tau_{2,f}(phi)| for the inversion family at seeded annulus samples.
inline ResidualReport verify_inversion(const InversionFamily& fam, std::size_t count,
                                       std::uint64_t seed, const FDConfig& cfg = {},
                                       real tolerance = 1e-4L, real r_min = 0.5L,
                                       real r_max = 2.0L) {
  const MapField phi = fam.map();
  const ScalarField f = fam.weight();
  const auto points = annulus_samples(fam.m, r_min, r_max, count, seed);
  return evaluate_report(
      points, [&](PointView x) { return norm(f_bitension(phi, f, x, cfg)); }, tolerance, seed);
}

/// |LHS - RHS| of
///   Delta(f |tau|^2 / 2) = f sum_i |d_i tau|^2 - (Delta f) |tau|^2 / 2,
/// which holds along f-biharmonic maps into a flat target.
inline real bochner_residual(const MapField& phi, const ScalarField& f, PointView x,
                             const FDConfig& cfg = {}) {
  maps::require_map_admissible(phi, x, cfg);
  require_admissible(f, x, cfg);
  const ScalarField weight = f.as_weight();
  const real fx = require_positive_weight(weight, x);

  std::vector<ScalarField> tau;
  for (const auto& c : phi.components()) tau.push_back(laplacian_field(c, cfg));

  const ScalarField density = weight.derive([weight, tau](PointView y) {
    real sq = 0;
    for (const auto& t : tau) {
      const real v = t(y);
      sq += v * v;
    }
    return weight(y) * sq / 2;
  });
  const real lhs = detail::laplacian(density, x, cfg);

  real tau_sq = 0;
  real grad_tau_sq = 0;
  for (const auto& t : tau) {
    const real v = t(x);
    tau_sq += v * v;
    for (real g : detail::gradient(t, x, cfg)) grad_tau_sq += g * g;
  }
  const real rhs = fx * grad_tau_sq - detail::laplacian(weight, x, cfg) * tau_sq / 2;
  return std::fabs(lhs - rhs);
}

}  // namespace fbiharm
