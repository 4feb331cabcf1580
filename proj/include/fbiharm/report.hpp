#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "fbiharm/numdiff.hpp"

namespace fbiharm {

struct ResidualSample {
  Point point;
  real residual = 0;
};

/// Outcome of a verification: per-sample residual norms and a verdict.
struct ResidualReport {
  std::vector<ResidualSample> samples;
  real max_residual = 0;
  real mean_residual = 0;
  real tolerance = 0;
  bool pass = false;
  std::uint64_t seed = 0;
};

inline ResidualReport make_report(std::vector<ResidualSample> samples, real tolerance,
                                  std::uint64_t seed = 0) {
  if (!(tolerance > 0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  ResidualReport report;
  report.samples = std::move(samples);
  report.tolerance = tolerance;
  report.seed = seed;
  real sum = 0;
  for (const auto& s : report.samples) {
    if (!(s.residual >= 0)) throw Error(ErrorCode::NonFinite, "residual is negative or NaN");
    report.max_residual = std::max(report.max_residual, s.residual);
    sum += s.residual;
  }
  if (!report.samples.empty()) report.mean_residual = sum / report.samples.size();
  report.pass = report.max_residual <= tolerance;
  return report;
}

/// Residuals of `fn` at every point, gathered into a report.
template <class Fn>
ResidualReport evaluate_report(const std::vector<Point>& points, Fn&& fn, real tolerance,
                               std::uint64_t seed = 0) {
  std::vector<ResidualSample> samples;
  samples.reserve(points.size());
  for (const auto& x : points) samples.push_back({x, static_cast<real>(fn(PointView(x)))});
  return make_report(std::move(samples), tolerance, seed);
}

/// Seeded generator whose output does not depend on the standard library's
/// distribution implementations.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) from the top 53 bits.
  real unit() { return static_cast<real>(engine_() >> 11) * 0x1.0p-53L; }

  real uniform(real lo, real hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

/// Points with uniformly distributed directions and radii uniform in [r_min, r_max].
inline std::vector<Point> annulus_samples(std::size_t dim, real r_min, real r_max,
                                          std::size_t count, std::uint64_t seed) {
  if (dim == 0 || !(r_min > 0) || !(r_max >= r_min))
    throw Error(ErrorCode::InvalidArgument, "invalid annulus");
  SampleRng rng(seed);
  std::vector<Point> points;
  points.reserve(count);
  while (points.size() < count) {
    Point x(dim);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const real n = norm(x);
    if (n > 1 || n < 1e-3L) continue;
    const real r = rng.uniform(r_min, r_max);
    for (auto& v : x) v *= r / n;
    points.push_back(std::move(x));
  }
  return points;
}

/// Points uniform in the box prod [lo_i, hi_i].
inline std::vector<Point> box_samples(const Point& lo, const Point& hi, std::size_t count,
                                      std::uint64_t seed) {
  if (lo.size() != hi.size() || lo.empty())
    throw Error(ErrorCode::InvalidArgument, "box corners differ in dimension");
  SampleRng rng(seed);
  std::vector<Point> points(count, Point(lo.size()));
  for (auto& x : points)
    for (std::size_t i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return points;
}

}  // namespace fbiharm
