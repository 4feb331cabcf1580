#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// the commands can be exercised in-process by the tests.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unsupported/Eigen/Splines>
#include <vector>

#include "fbiharm/fbiharm.hpp"

namespace fbiharm::cli {

enum ExitCode { kAgreement = 0, kError = 1, kDisagreement = 2 };

struct RunConfig {
  std::string command;
  double tolerance = 1e-5;
  bool tolerance_explicit = false;
  double fd_step = 7e-3;
  std::uint64_t seed = 42;
  std::string output_path;
  std::string format = "json";
};

/// One verified claim in a report.
struct AnchorResult {
  std::string anchor;
  double max_residual = 0;
  double tolerance = 0;
  bool control = false;  // negative control: passes when the residual exceeds `tolerance`
  std::string verdict;
  std::string error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Locale-independent shortest-unambiguous formatting with 17 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline nlohmann::ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

struct Output {
  std::string command;
  std::vector<AnchorResult> anchors;
  std::string verdict;
  std::optional<Table> table;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

inline std::string render_json(const RunConfig& cfg, const Output& out) {
  nlohmann::ordered_json j;
  j["command"] = out.command;
  j["config"] = {{"seed", cfg.seed}, {"fd_step", cfg.fd_step}, {"tolerance", cfg.tolerance}};
  auto anchors = nlohmann::ordered_json::array();
  for (const auto& a : out.anchors) {
    nlohmann::ordered_json e;
    e["anchor"] = a.anchor;
    e["max_residual"] = number_or_null(a.max_residual);
    e["tolerance"] = a.tolerance;
    if (a.control) e["control"] = true;
    e["verdict"] = a.verdict;
    if (!a.error.empty()) e["error"] = a.error;
    anchors.push_back(e);
  }
  j["anchors"] = anchors;
  j["verdict"] = out.verdict;
  for (auto it = out.extra.begin(); it != out.extra.end(); ++it) j[it.key()] = it.value();
  if (out.table) {
    j["columns"] = out.table->columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : out.table->rows) {
      auto row = nlohmann::ordered_json::array();
      for (double v : r) row.push_back(number_or_null(v));
      rows.push_back(row);
    }
    j["rows"] = rows;
  }
  return j.dump(2) + "\n";
}

/// Tables are written as-is; reports without a table become one row per anchor.
inline std::string render_csv(const Output& out) {
  std::string s;
  if (out.table) {
    for (std::size_t i = 0; i < out.table->columns.size(); ++i)
      s += (i ? "," : "") + out.table->columns[i];
    s += "\n";
    for (const auto& r : out.table->rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_number(r[i]);
      s += "\n";
    }
    return s;
  }
  s = "anchor,max_residual,tolerance,verdict\n";
  for (const auto& a : out.anchors)
    s += csv_escape(a.anchor) + "," + format_number(a.max_residual) + "," +
         format_number(a.tolerance) + "," + a.verdict + "\n";
  return s;
}

inline FDConfig fd_config(const RunConfig& cfg) {
  FDConfig fd = FDConfig::with_step(cfg.fd_step);
  fd.validate();
  return fd;
}

// ---------------------------------------------------------------------------
// verify-inversion

struct InversionArgs {
  int m = 3;
  double p = 2;
  double k = 4;
  int samples = 10;
};

inline int cmd_verify_inversion(const RunConfig& cfg, const InversionArgs& args, Output& out) {
  out.command = "verify-inversion";
  const InversionFamily fam{args.m, static_cast<real>(args.p), static_cast<real>(args.k)};
  if (args.samples < 1) throw Error(ErrorCode::InvalidArgument, "--samples must be positive");
  const VerdictThresholds thresholds;
  const InversionClassification predicate = inversion_is_f_biharmonic(fam);
  const ResidualReport report =
      verify_inversion(fam, static_cast<std::size_t>(args.samples), cfg.seed, fd_config(cfg),
                       thresholds.accept);
  const NumericVerdict numeric = classify_residual(report.max_residual, thresholds);

  AnchorResult a;
  std::ostringstream name;
  name << "inversion x|x|^-p with f=|x|^k (m=" << args.m << " p=" << format_number(args.p)
       << " k=" << format_number(args.k) << ")";
  a.anchor = name.str();
  a.max_residual = static_cast<double>(report.max_residual);
  a.tolerance = static_cast<double>(thresholds.accept);
  a.verdict = numeric == NumericVerdict::Accept   ? "pass"
              : numeric == NumericVerdict::Reject ? "fail"
                                                  : "inconclusive";
  out.anchors.push_back(a);

  const bool agree = (numeric == NumericVerdict::Accept && predicate.f_biharmonic) ||
                     (numeric == NumericVerdict::Reject && !predicate.f_biharmonic);
  out.verdict = agree ? "agreement" : "disagreement";
  out.extra["predicate"] = {{"f_biharmonic", predicate.f_biharmonic}, {"cases", predicate.labels()}};
  out.extra["thresholds"] = {{"accept", static_cast<double>(thresholds.accept)},
                             {"reject", static_cast<double>(thresholds.reject)}};
  auto samples = nlohmann::ordered_json::array();
  for (const auto& s : report.samples) {
    std::vector<double> point(s.point.begin(), s.point.end());
    samples.push_back({{"point", point}, {"residual", static_cast<double>(s.residual)}});
  }
  out.extra["mean_residual"] = static_cast<double>(report.mean_residual);
  out.extra["samples"] = samples;
  return agree ? kAgreement : kDisagreement;
}

// ---------------------------------------------------------------------------
// curve-export

struct CurveArgs {
  std::string family = "planar";
  double c1 = 1, c2 = 1, c3 = 0, c = 0;
  double s0 = -5, s1 = 5;
  double step = 1e-3;
};

inline int cmd_curve_export(const RunConfig&, const CurveArgs& args, Output& out) {
  out.command = "curve-export";
  R3Family fam;
  if (args.family == "planar") fam.kind = R3Family::Kind::Planar;
  else if (args.family == "helix") fam.kind = R3Family::Kind::Helix;
  else throw Error(ErrorCode::InvalidArgument, "--family must be planar or helix");
  fam.c1 = args.c1, fam.c2 = args.c2, fam.c3 = args.c3, fam.c = args.c;
  fam.validate();

  const SampledCurve curve =
      reconstruct_curve([&](real s) { return fam.kappa(s); }, [&](real s) { return fam.tau(s); },
                        Interval{args.s0, args.s1}, FramedPoint{}, args.step);

  Table table;
  table.columns = {"s", "x", "y", "z", "kappa", "tau", "f"};
  for (std::size_t i = 0; i < curve.s.size(); ++i) {
    const FamilyCurvature fc = r3_family_curvature(fam, curve.s[i]);
    const Vec3& p = curve.points[i];
    table.rows.push_back({static_cast<double>(curve.s[i]), static_cast<double>(p[0]),
                          static_cast<double>(p[1]), static_cast<double>(p[2]),
                          static_cast<double>(fc.kappa), static_cast<double>(fc.tau),
                          static_cast<double>(fc.f)});
  }
  out.table = std::move(table);

  AnchorResult a;
  a.anchor = args.family + " f-biharmonic curve family, frame orthonormality drift";
  a.max_residual = static_cast<double>(curve.max_frame_drift);
  a.tolerance = 1e-8;
  a.verdict = a.max_residual <= a.tolerance ? "pass" : "fail";
  out.anchors.push_back(a);
  out.verdict = a.verdict;
  return kAgreement;
}

// ---------------------------------------------------------------------------
// solve-1d

struct Solve1DArgs {
  std::string weight = "exponential";
  double A = 1, B = 0, C = 0, D = 0;
  double lo = 0, hi = 1;
  int checkpoints = 50;
};

/// Two numeric columns x, f per line (comma or whitespace separated); lines
/// starting with '#' and a non-numeric header line are skipped.
inline RealFn load_tabulated_weight(const std::string& path, double lo, double hi) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open weight file " + path);
  std::vector<double> xs, fs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',' || ch == '\t' || ch == ';' || ch == '\r') ch = ' ';
    const auto start = line.find_first_not_of(' ');
    if (start == std::string::npos || line[start] == '#') continue;
    double vals[2];
    const char* p = line.data() + start;
    const char* end = line.data() + line.size();
    bool ok = true;
    for (double& v : vals) {
      while (p < end && *p == ' ') ++p;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        ok = false;
        break;
      }
      p = res.ptr;
    }
    if (!ok) {
      if (first && xs.empty()) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::InvalidArgument, "malformed weight file line: " + line);
    }
    first = false;
    if (!xs.empty() && !(vals[0] > xs.back()))
      throw Error(ErrorCode::InvalidArgument, "weight file abscissae must increase");
    xs.push_back(vals[0]);
    fs.push_back(vals[1]);
  }
  if (xs.size() < 4) throw Error(ErrorCode::InvalidArgument, "weight file needs at least 4 rows");
  for (double v : fs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "weight file contains a non-finite value");
    if (!(v > 0)) throw Error(ErrorCode::NonPositiveWeight, "weight file contains a non-positive value");
  }
  if (lo < xs.front() || hi > xs.back())
    throw Error(ErrorCode::InvalidArgument, "weight table does not cover the interval");

  using Spline = Eigen::Spline<double, 1>;
  const double x0 = xs.front(), span = xs.back() - xs.front();
  Eigen::RowVectorXd values(fs.size()), knots(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    values[i] = fs[i];
    knots[i] = (xs[i] - x0) / span;
  }
  auto spline = std::make_shared<Spline>(
      Eigen::SplineFitting<Spline>::Interpolate(values, 3, knots));
  return [spline, x0, span](real x) {
    const double t = (static_cast<double>(x) - x0) / span;
    if (!(t >= 0 && t <= 1)) throw Error(ErrorCode::InvalidArgument, "outside the tabulated range");
    return static_cast<real>((*spline)(t)(0));
  };
}

inline int cmd_solve_1d(const RunConfig& cfg, const Solve1DArgs& args, Output& out) {
  out.command = "solve-1d";
  const FDConfig fd = fd_config(cfg);
  if (!(cfg.tolerance > 0) || !std::isfinite(cfg.tolerance))
    throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  RealFn f;
  if (args.weight == "rational") f = [](real x) { return weight_value(WeightFamily::Rational, x); };
  else if (args.weight == "exponential")
    f = [](real x) { return weight_value(WeightFamily::Exponential, x); };
  else f = load_tabulated_weight(args.weight, args.lo, args.hi);
  if (args.checkpoints < 1) throw Error(ErrorCode::InvalidArgument, "--checkpoints must be positive");

  const OneDimSolution sol = solve_1d(f, args.A, args.B, args.C, args.D, args.lo, args.hi);
  const ScalarField u = sol.field();
  const ScalarField w = sol.weight_field();
  const real inset = 1.25L * fd.singular_margin;
  const real a = args.lo + inset, b = args.hi - inset;
  if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "interval too short for the FD step");

  Table table;
  table.columns = {"x", "u", "residual"};
  std::vector<ResidualSample> samples;
  for (int i = 0; i < args.checkpoints; ++i) {
    const real x = args.checkpoints == 1 ? (a + b) / 2 : a + (b - a) * i / (args.checkpoints - 1);
    const Point p{x};
    const real r = f_biharmonic_residual(u, w, p, fd);
    samples.push_back({p, r});
    table.rows.push_back({static_cast<double>(x), static_cast<double>(sol(x)), static_cast<double>(r)});
  }
  const ResidualReport report = make_report(std::move(samples), cfg.tolerance, cfg.seed);
  out.table = std::move(table);

  AnchorResult an;
  an.anchor = "solution of (f u'')'' = 0 with weight " + args.weight;
  an.max_residual = static_cast<double>(report.max_residual);
  an.tolerance = cfg.tolerance;
  an.verdict = report.max_residual < cfg.tolerance ? "pass" : "fail";
  out.anchors.push_back(an);
  out.verdict = an.verdict;
  return an.verdict == "pass" ? kAgreement : kError;
}

// ---------------------------------------------------------------------------
// verify-suite

struct Claim {
  std::string anchor;
  double tolerance;
  bool control;  // negative control: must exceed `tolerance`
  std::function<real(const FDConfig&, std::uint64_t)> residual;
};

inline real max_abs(PointView v) {
  real m = 0;
  for (real x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline Interval helix_45_interval() { return {-1.9L, 1.9L}; }

inline Vec3 helix_45(real s) {
  return Vec3(real(2) / 3 * std::pow(1 + s / 2, real(1.5)), real(2) / 3 * std::pow(1 - s / 2, real(1.5)),
              s / std::sqrt(real(2)));
}

inline real helix_45_kappa(real s) { return 1 / (2 * std::sqrt(real(2)) * std::sqrt(4 - s * s)); }

inline Vec3 planar_46(real s) {
  const real q = std::sqrt(16 + s * s);
  return Vec3(4 * std::log(q + s), q, 0);
}

inline std::vector<Claim> suite_claims() {
  using P = Point;
  std::vector<Claim> claims;
  auto add = [&](std::string anchor, double tol, bool control, auto fn) {
    claims.push_back({std::move(anchor), tol, control, fn});
  };
  const ScalarField r2 = fields::from_function(3, [](PointView x) { return dot(x, x); });
  const ScalarField inv_r = fields::radial_power(3, -1);

  add("laplacian of |x|^2 on R^3 is 6", 1e-7, false,
      [=](const FDConfig& fd, std::uint64_t) { return std::fabs(laplacian(r2, P{0.3L, -0.7L, 1.1L}, fd) - 6); });
  add("laplacian of 1/|x| on R^3 vanishes", 1e-6, false,
      [=](const FDConfig& fd, std::uint64_t) { return std::fabs(laplacian(inv_r, P{1, 1, 1}, fd)); });
  add("laplacian of x^1 |x|^-p is p(p-m) x^1 |x|^(-p-2)", 1e-6, false, [](const FDConfig& fd, std::uint64_t) {
    return std::fabs(laplacian(fields::coordinate_times_radial(3, 0, 1), P{2, 0, 0}, fd) + 0.5L);
  });
  add("bilaplacian of |x|^2 on R^3 vanishes", 1e-5, false,
      [=](const FDConfig& fd, std::uint64_t) { return std::fabs(bilaplacian(r2, P{0.3L, -0.7L, 1.1L}, fd)); });
  add("radial laplacian formula at alpha=2 gives 6 and at alpha=-1 gives 0", 1e-12, false,
      [](const FDConfig&, std::uint64_t) {
        return std::max(std::fabs(radial_laplacian(2, 3, 1.7L) - 6), std::fabs(radial_laplacian(-1, 3, 2)));
      });
  add("tension of x/|x|^2 is p(p-m) x |x|^(-p-2)", 1e-6, false, [](const FDConfig& fd, std::uint64_t) {
    const Point t = tension(InversionFamily{3, 2, 0}.map(), P{1, 0, 0}, fd);
    return std::max({std::fabs(t[0] + 2), std::fabs(t[1]), std::fabs(t[2])});
  });
  add("tension of (|x|^2, 0) is (6, 0)", 1e-7, false, [=](const FDConfig& fd, std::uint64_t) {
    const MapField phi({r2, r2.derive([](PointView) { return real(0); })});
    const Point t = tension(phi, P{0.4L, 0.2L, -0.9L}, fd);
    return std::max(std::fabs(t[0] - 6), std::fabs(t[1]));
  });
  add("x/|x|^(m-2) is biharmonic on R^4", 1e-4, false, [](const FDConfig& fd, std::uint64_t seed) {
    const MapField phi = InversionFamily{4, 2, 0}.map();
    real worst = 0;
    for (auto x : annulus_samples(4, 1, 2, 5, seed)) {
      const real scale = 1.5L / norm(x);
      for (real& v : x) v *= scale;
      worst = std::max(worst, max_abs(bitension(phi, x, fd)));
    }
    return worst;
  });
  add("inversion x/|x|^2 is f-biharmonic for f=|x|^4", 1e-4, false, [](const FDConfig& fd, std::uint64_t seed) {
    return verify_inversion(InversionFamily{3, 2, 4}, 20, seed, fd).max_residual;
  });
  add("inversion x/|x|^2 is f-biharmonic for f=|x|^(4-m)", 1e-4, false, [](const FDConfig& fd, std::uint64_t seed) {
    return verify_inversion(InversionFamily{3, 2, 1}, 20, seed, fd).max_residual;
  });
  add("f-bitension of the inversion family is the characteristic product times x|x|^(k-p-4)", 1e-4, false,
      [](const FDConfig& fd, std::uint64_t) {
        const InversionFamily fam{3, 1, 1};
        const Point t = f_bitension(fam.map(), fam.weight(), P{1, 0, 0}, fd);
        return std::max({std::fabs(t[0] - 4), std::fabs(t[1]), std::fabs(t[2])});
      });
  add("inversion predicate selects the weight cases k=p+2 and k=p+2-m", 0.5, false,
      [](const FDConfig&, std::uint64_t) {
        const auto a = inversion_is_f_biharmonic({3, 2, 4});
        const auto b = inversion_is_f_biharmonic({3, 2, 1});
        const auto c = inversion_is_f_biharmonic({3, 1, 1});
        const bool ok = a.labels() == "iii" && b.labels() == "iv" && !c.f_biharmonic;
        return real(ok ? 0 : 1);
      });
  add("bochner identity along the f-biharmonic inversion", 1e-3, false, [](const FDConfig& fd, std::uint64_t seed) {
    const InversionFamily fam{3, 2, 4};
    const MapField phi = fam.map();
    const ScalarField f = fam.weight();
    real worst = 0;
    for (const auto& x : annulus_samples(3, 0.8L, 1.5L, 10, seed)) worst = std::max(worst, bochner_residual(phi, f, x, fd));
    return worst;
  });
  add("|x|^2 is f-biharmonic for f=1/|x|", 1e-5, false, [=](const FDConfig& fd, std::uint64_t) {
    return f_biharmonic_residual(r2, inv_r, P{1, 1, 1}, fd);
  });
  add("x^1/|x|^2 is f-biharmonic for f=|x|", 1e-4, false, [](const FDConfig& fd, std::uint64_t) {
    return f_biharmonic_residual(fields::coordinate_times_radial(3, 0, 2), fields::radial_power(3, 1), P{1, 0, 0}, fd);
  });
  for (auto which : {WeightFamily::Exponential, WeightFamily::Rational}) {
    const bool expo = which == WeightFamily::Exponential;
    add(std::string("double-integral solution for f=") + (expo ? "e^-x" : "1+x^2") + " satisfies (f u'')''=0",
        1e-5, false, [which, expo](const FDConfig& fd, std::uint64_t) {
          const auto sol = solve_1d([which](real x) { return weight_value(which, x); }, expo ? 1 : 0, expo ? 0 : 1, 0,
                                    0, 0, 1);
          const ScalarField u = sol.field(), w = sol.weight_field();
          real worst = 0;
          for (int i = 0; i < 10; ++i) worst = std::max(worst, f_biharmonic_residual(u, w, P{0.1L + 0.08L * i}, fd));
          return worst;
        });
  }
  add("closed form (Ax-2A+B)e^x+Cx+D at A=1, x=0 is -2", 1e-12, false, [](const FDConfig&, std::uint64_t) {
    return std::fabs(closed_form_1d(WeightFamily::Exponential, 1, 0, 0, 0, 0) + 2);
  });
  add("planar family kappa=4c2/(16+(c2 s+c3)^2) solves the curve system", 1e-6, false,
      [](const FDConfig& fd, std::uint64_t) {
        const CurvatureProfile prof = R3Family{R3Family::Kind::Planar, 1, 1, 0, 0}.profile({-5, 5});
        return max_abs(frenet_system_residual(prof, prof.weight(), 1, fd));
      });
  add("planar family satisfies the classification ODE", 1e-7, false, [](const FDConfig& fd, std::uint64_t) {
    return classification_ode_residual(R3Family{R3Family::Kind::Planar, 1, 1, 0, 0}.profile({-5, 5}), 0, fd);
  });
  add("helix family satisfies the classification ODE", 1e-7, false, [](const FDConfig& fd, std::uint64_t) {
    return classification_ode_residual(R3Family{R3Family::Kind::Helix, 1, 2, 0, 1}.profile({-5, 5}), 0.5L, fd);
  });
  add("planar family at s=0 has kappa=1/4 and f=8", 1e-12, false, [](const FDConfig&, std::uint64_t) {
    const auto fc = r3_family_curvature(R3Family{R3Family::Kind::Planar, 1, 1, 0, 0}, 0);
    return std::max({std::fabs(fc.kappa - 0.25L), std::fabs(fc.tau), std::fabs(fc.f - 8)});
  });
  add("planar curve (4 ln(sqrt(16+s^2)+s), sqrt(16+s^2)) has kappa=4/(16+s^2)", 1e-6, false,
      [](const FDConfig& fd, std::uint64_t) {
        const ParamCurve g(planar_46, {-5, 5}, fd);
        const auto ct = estimate_curvature_torsion(g, 0, fd);
        return std::max(std::fabs(ct.kappa - 0.25L), std::fabs(ct.tau));
      });
  add("helix with kappa=tau=1/(2 sqrt2 sqrt(4-s^2)) at s=0", 1e-6, false, [](const FDConfig& fd, std::uint64_t) {
    const ParamCurve g(helix_45, helix_45_interval(), fd);
    const auto ct = estimate_curvature_torsion(g, 0, fd);
    const real expected = helix_45_kappa(0);
    return std::max(std::fabs(ct.kappa - expected), std::fabs(ct.tau - expected));
  });
  add("reconstructed planar family matches the explicit curve up to rigid motion", 1e-5, false,
      [](const FDConfig& fd, std::uint64_t) {
        const R3Family fam{R3Family::Kind::Planar, 1, 1, 0, 0};
        const auto rec = reconstruct_curve([&](real s) { return fam.kappa(s); }, [](real) { return real(0); },
                                           {-5, 5}, FramedPoint{}, 1e-3L);
        return rigid_motion_deviation(rec, ParamCurve(planar_46, {-5.5L, 5.5L}, fd), fd);
      });
  add("reconstructed helix from kappa=tau matches the explicit curve up to rigid motion", 1e-5, false,
      [](const FDConfig& fd, std::uint64_t) {
        const auto rec = reconstruct_curve(helix_45_kappa, helix_45_kappa, {-1, 1}, FramedPoint{}, 1e-3L);
        return rigid_motion_deviation(rec, ParamCurve(helix_45, helix_45_interval(), fd), fd);
      });
  add("planar curve is f-biharmonic for f=(16+s^2)^(3/2)/8", 1e-5, false, [](const FDConfig& fd, std::uint64_t) {
    const ParamCurve g(planar_46, {-5, 5}, fd);
    auto f = [](real s) { return std::pow(16 + s * s, real(1.5)) / 8; };
    real worst = 0;
    for (real s : {real(-2), real(0), real(3)}) worst = std::max(worst, euclidean_curve_residual(g, f, s, fd));
    return worst;
  });
  add("helix with kappa=tau is rejected for f=kappa^(-3/2)", 1e-3, true, [](const FDConfig& fd, std::uint64_t) {
    const ParamCurve g(helix_45, helix_45_interval(), fd);
    return euclidean_curve_residual(g, [](real s) { return std::pow(helix_45_kappa(s), real(-1.5)); }, 0, fd);
  });
  add("helix with kappa=tau fails the normal curve equation", 1e-3, true, [](const FDConfig& fd, std::uint64_t) {
    CurvatureProfile prof;
    prof.kappa1 = helix_45_kappa;
    prof.ratio_c = 1;
    prof.interval = helix_45_interval();
    return std::fabs(frenet_system_residual(prof, prof.weight(), 0, fd)[1]);
  });
  add("cylinder weight (C2 e^(z/R) - C1 R^2 e^(-z/R)/C2)/2 at R=1, C2=2, z=0 is 1", 1e-15, false,
      [](const FDConfig&, std::uint64_t) { return std::fabs(cylinder_f_family(1, 0, 2, 1, 0) - 1); });
  add("unit cylinder is f-biharmonic for f=e^z/2", 1e-5, false, [](const FDConfig& fd, std::uint64_t seed) {
    const ParamSurface cyl = surfaces::cylinder(1);
    const ScalarField f = cylinder_weight_field(1, 0, 1, 1);
    real worst = 0;
    for (const auto& uv : box_samples({0.5L, -1}, {5.5L, 1}, 6, seed)) {
      const auto r = hypersurface_residual(cyl, f, uv[0], uv[1], 0, fd);
      worst = std::max({worst, r.normal, r.tangent});
    }
    return worst;
  });
  return claims;
}

inline int cmd_verify_suite(const RunConfig& cfg, Output& out) {
  out.command = "verify-suite";
  if (!(cfg.tolerance > 0) || !std::isfinite(cfg.tolerance))
    throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const FDConfig fd = FDConfig::with_step(cfg.fd_step);
  bool all = true;
  for (const Claim& c : suite_claims()) {
    AnchorResult a;
    a.anchor = c.anchor;
    a.control = c.control;
    a.tolerance = c.control || !cfg.tolerance_explicit ? c.tolerance : cfg.tolerance;
    try {
      a.max_residual = static_cast<double>(c.residual(fd, cfg.seed));
      const bool pass = c.control ? a.max_residual > a.tolerance : a.max_residual <= a.tolerance;
      a.verdict = pass ? "pass" : "fail";
    } catch (const std::exception& e) {
      a.max_residual = std::numeric_limits<double>::quiet_NaN();
      a.verdict = "error";
      a.error = e.what();
    }
    all = all && a.verdict == "pass";
    out.anchors.push_back(std::move(a));
  }
  out.verdict = all ? "pass" : "fail";
  return all ? kAgreement : kError;
}

// ---------------------------------------------------------------------------

inline bool parse_seed(const std::string& text, std::uint64_t& seed) {
  auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

/// Runs the program on `args` (without the program name). Output goes to
/// `--output` when given, otherwise to `out`; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const char* env_seed = std::getenv("FBIHARM_SEED")) {
  CLI::App app{"Numerical verification of f-biharmonic maps, functions, curves and hypersurfaces",
               "fbiharm"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  app.add_option("--tolerance", tolerance, "Acceptance tolerance (default 1e-5)");
  app.add_option("--fd-step", cfg.fd_step, "Finite-difference step")->capture_default_str();
  app.add_option("--seed", seed, "Sample seed (default 42, or $FBIHARM_SEED)");
  app.add_option("--output", cfg.output_path, "Write the report to this file");
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  InversionArgs inv;
  auto* sub_inv = app.add_subcommand("verify-inversion", "Check x|x|^-p against f=|x|^k");
  sub_inv->add_option("--m", inv.m)->capture_default_str();
  sub_inv->add_option("--p", inv.p)->capture_default_str();
  sub_inv->add_option("--k", inv.k)->capture_default_str();
  sub_inv->add_option("--samples", inv.samples)->capture_default_str();

  CurveArgs curve;
  auto* sub_curve = app.add_subcommand("curve-export", "Reconstruct and tabulate a curve family");
  sub_curve->add_option("--family", curve.family)->check(CLI::IsMember({"planar", "helix"}))->capture_default_str();
  sub_curve->add_option("--c1", curve.c1)->capture_default_str();
  sub_curve->add_option("--c2", curve.c2)->capture_default_str();
  sub_curve->add_option("--c3", curve.c3)->capture_default_str();
  sub_curve->add_option("--c", curve.c, "tau/kappa ratio (helix)")->capture_default_str();
  sub_curve->add_option("--s0", curve.s0)->capture_default_str();
  sub_curve->add_option("--s1", curve.s1)->capture_default_str();
  sub_curve->add_option("--step", curve.step, "RK4 step")->capture_default_str();

  Solve1DArgs solve;
  auto* sub_solve = app.add_subcommand("solve-1d", "Solve (f u'')'' = 0 on an interval");
  sub_solve->add_option("--weight", solve.weight, "rational, exponential, or a file of x,f rows")
      ->capture_default_str();
  sub_solve->add_option("--A", solve.A)->capture_default_str();
  sub_solve->add_option("--B", solve.B)->capture_default_str();
  sub_solve->add_option("--C", solve.C)->capture_default_str();
  sub_solve->add_option("--D", solve.D)->capture_default_str();
  sub_solve->add_option("--lo", solve.lo)->capture_default_str();
  sub_solve->add_option("--hi", solve.hi)->capture_default_str();
  sub_solve->add_option("--checkpoints", solve.checkpoints)->capture_default_str();

  auto* sub_suite = app.add_subcommand("verify-suite", "Run every built-in golden check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAgreement;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kAgreement;
  } catch (const CLI::ParseError& e) {
    err << "fbiharm: " << e.what() << "\n";
    return kError;
  }

  if (tolerance) {
    cfg.tolerance = *tolerance;
    cfg.tolerance_explicit = true;
  }
  if (seed) {
    cfg.seed = *seed;
  } else if (env_seed && *env_seed) {
    if (!parse_seed(env_seed, cfg.seed)) {
      err << "fbiharm: FBIHARM_SEED is not an unsigned integer\n";
      return kError;
    }
  }
  if (!(cfg.tolerance > 0) || !std::isfinite(cfg.tolerance)) {
    err << "fbiharm: --tolerance must be positive\n";
    return kError;
  }
  if (!(cfg.fd_step > 0) || !std::isfinite(cfg.fd_step)) {
    err << "fbiharm: --fd-step must be positive\n";
    return kError;
  }

  Output report;
  int code = kError;
  try {
    if (sub_inv->parsed()) {
      cfg.command = "verify-inversion";
      cfg.tolerance = static_cast<double>(VerdictThresholds{}.accept);
      code = cmd_verify_inversion(cfg, inv, report);
    } else if (sub_curve->parsed()) {
      cfg.command = "curve-export";
      code = cmd_curve_export(cfg, curve, report);
    } else if (sub_solve->parsed()) {
      cfg.command = "solve-1d";
      code = cmd_solve_1d(cfg, solve, report);
    } else if (sub_suite->parsed()) {
      cfg.command = "verify-suite";
      code = cmd_verify_suite(cfg, report);
    }
  } catch (const std::exception& e) {
    err << "fbiharm: " << e.what() << "\n";
    return kError;
  }

  const std::string text = cfg.format == "csv" ? render_csv(report) : render_json(cfg, report);
  if (!cfg.output_path.empty()) {
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!file) {
      err << "fbiharm: cannot write " << cfg.output_path << "\n";
      return kError;
    }
    file << text;
  } else {
    out << text;
  }
  for (const auto& a : report.anchors)
    if (a.verdict != "pass") err << "fbiharm: " << a.verdict << ": " << a.anchor << "\n";
  return code;
}

}  // namespace fbiharm::cli
