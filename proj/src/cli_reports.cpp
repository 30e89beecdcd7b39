#include "cmqop/cli_reports.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "cmqop/cm_model.hpp"
#include "cmqop/errors.hpp"
#include "cmqop/hypergeom.hpp"
#include "cmqop/quadrature.hpp"

namespace cmqop {

using nlohmann::json;

namespace {

const std::map<std::string, Experiment> kExperimentNames = {
    {"int-eq", Experiment::IntEq},           {"kernel-id", Experiment::KernelId},
    {"commutator", Experiment::Commutator},  {"diff-eq", Experiment::DiffEq},
    {"asymptotics", Experiment::Asymptotics}, {"fourier-gamma", Experiment::FourierGamma},
    {"l2-eigen", Experiment::L2Eigen},       {"hr-eigen", Experiment::HrEigen},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a real number, got '" + text + "'");
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + text + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::vector<double> default_u(int n) {
  switch (n) {
    case 1:
      return {0.4};
    case 2:
      return {0.8, -0.8};
    case 3:
      return {0.7, 0.1, -0.6};
    default: {
      std::vector<double> u(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = 0.6 * (0.5 * (n - 1) - i);
      return u;
    }
  }
}

std::vector<double> u_of(const ExperimentConfig& cfg) {
  return cfg.u.empty() ? default_u(cfg.N) : cfg.u;
}

std::vector<std::vector<double>> split_points(const std::vector<double>& flat, int n) {
  std::vector<std::vector<double>> pts;
  for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= flat.size(); k += static_cast<std::size_t>(n)) {
    pts.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(k),
                     flat.begin() + static_cast<std::ptrdiff_t>(k) + n);
  }
  return pts;
}

std::vector<double> sorted_sample(std::mt19937_64& rng, int n, double lo, double hi, double min_gap) {
  std::uniform_real_distribution<double> U(lo, hi);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = U(rng);
    std::sort(x.begin(), x.end());
    bool ok = true;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) ok = ok && x[k + 1] - x[k] > min_gap;
    if (ok) return x;
  }
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

// ---------------------------------------------------------------------------
// Experiments. Each fills checks, diagnostics and the sweep metric.

void run_fourier_gamma(const ExperimentConfig& cfg, VerificationReport& rep) {
  const std::vector<double> vs = cfg.u.empty() ? std::vector<double>{0.0, 0.7, 2.0} : cfg.u;
  const double lambda = cfg.lambda;
  const double tol = cfg.tol > 0 ? cfg.tol : 1e-9;
  // Tail of the integrand beyond L is below (2/lambda) e^{-lambda L / 2}.
  const double L = 2.0 / lambda * (std::log(2.0 / lambda) + 40.0);
  json rows = json::array();
  double worst = 0.0;
  for (double v : vs) {
    const double formula = cosh_fourier_gamma(v, lambda);
    auto f = [&](double w) { return 2.0 * std::cos(v * w) * std::exp(-lambda * std::log(2.0 * std::cosh(0.5 * w))); };
    double err = 0.0;
    const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, L, 20, 1e-15, &err);
    const double res = std::abs(formula - quad) / std::abs(quad);
    worst = std::max(worst, res);
    rep.add_check("fourier_gamma[v=" + fmt(v) + "]", res, tol);
    rows.push_back({{"v", v}, {"formula", formula}, {"quadrature", quad}, {"quad_error_estimate", err}});
  }
  rep.diagnostics["values"] = rows;
  rep.metric = "max_relative_error";
  rep.metric_value = worst;
}

void run_diff_eq(const ExperimentConfig& cfg, VerificationReport& rep) {
  const double tol = cfg.tol > 0 ? cfg.tol : 1e-10;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::vector<double> res;
  json samples = json::array();
  if (!cfg.u.empty() && cfg.draws == 0) {
    const SpectralParameter sp(cfg.u, cfg.lambda);
    res.push_back(difference_eq_residual(cfg.xi, sp));
    samples.push_back({{"u", cfg.u}, {"xi", cfg.xi}, {"residual", res.back()}});
  } else {
    const int draws = cfg.draws > 0 ? cfg.draws : 50;
    for (int d = 0; d < draws; ++d) {
      std::vector<double> u(static_cast<std::size_t>(cfg.N));
      for (double& x : u) x = U(rng);
      const double xi = U(rng);
      res.push_back(difference_eq_residual(xi, SpectralParameter(u, cfg.lambda)));
      samples.push_back({{"u", u}, {"xi", xi}, {"residual", res.back()}});
    }
  }
  rep.add_check("difference_equation_max", max_of(res), tol,
                std::to_string(res.size()) + " parameter draws");
  rep.diagnostics["samples"] = samples;
  rep.metric = "max_residual";
  rep.metric_value = max_of(res);
}

void run_kernel_id(const ExperimentConfig& cfg, VerificationReport& rep) {
  if (cfg.N < 2) throw ConfigError("N: kernel-id needs N >= 2");
  const int samples = cfg.draws > 0 ? cfg.draws : 10;
  const FdOptions fd{cfg.h > 0 ? cfg.h : 1e-3, true};
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> X(-1.5, 1.5);
  std::vector<double> r1, r2;
  json rows = json::array();
  for (int k = 0; k < samples; ++k) {
    const auto t = sorted_sample(rng, cfg.N, -2.0, 2.0, 0.2);
    const auto s = sorted_sample(rng, cfg.N, -2.0, 2.0, 0.2);
    const double xi = X(rng);
    r1.push_back(kernel_identity_residual(1, xi, cfg.lambda, t, s, fd));
    r2.push_back(kernel_identity_residual(2, xi, cfg.lambda, t, s, fd));
    rows.push_back({{"t", t}, {"s", s}, {"xi", xi}, {"r1", r1.back()}, {"r2", r2.back()}});
  }
  rep.add_check("kernel_identity_r1_max", max_of(r1), cfg.tol > 0 ? cfg.tol : 1e-8);
  rep.add_check("kernel_identity_r2_max", max_of(r2), cfg.tol > 0 ? 100 * cfg.tol : 1e-6);
  rep.diagnostics["samples"] = rows;
  rep.diagnostics["h"] = fd.h;
  rep.diagnostics["richardson"] = true;
  rep.metric = "max_r2_residual";
  rep.metric_value = max_of(r2);
}

std::vector<double> default_l2_point(int n) {
  switch (n) {
    case 1:
      return {0.7};
    case 2:
      return {-0.9, 0.9};
    default: {
      std::vector<double> t(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = 2.0 * (i - 0.5 * (n - 1));
      return t;
    }
  }
}

void run_l2_eigen(const ExperimentConfig& cfg, VerificationReport& rep) {
  const SpectralParameter sp(u_of(cfg), cfg.lambda);
  const auto pts = cfg.t.empty() ? std::vector<std::vector<double>>{default_l2_point(cfg.N)}
                                 : split_points(cfg.t, cfg.N);
  const double h = cfg.h > 0 ? cfg.h : 4e-3;
  HypergeomOptions ho;
  ho.tol = 1e-15;
  ExtendedHypergeom F(sp, ho);
  json rows = json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const ChamberPoint t(pts[k]);
    F.reserve_for_gap(t.gap() + h);
    const auto a = l2_residual(F, t, h);
    const auto b = l2_residual(F, t, 0.5 * h);
    const double ratio = a.residual / b.residual;
    const std::string tag = "[t" + std::to_string(k) + "]";
    rep.add_check("l2_residual" + tag, b.residual, cfg.tol > 0 ? cfg.tol : 1e-5, "at step h/2");
    rep.add_check("h2_ratio_distance" + tag, std::abs(ratio - 4.0), 0.8,
                  "|r(h)/r(h/2) - 4|, ratio " + fmt(ratio));
    worst = std::max(worst, b.residual);
    rows.push_back({{"t", pts[k]},
                    {"residual_h", a.residual},
                    {"residual_h2", b.residual},
                    {"ratio", ratio},
                    {"warning_h", a.warning},
                    {"warning_h2", b.warning},
                    {"degree", F.table_degree()}});
  }
  rep.diagnostics["points"] = rows;
  rep.diagnostics["h"] = h;
  rep.metric = "max_l2_residual";
  rep.metric_value = worst;
}

void run_hr_eigen(const ExperimentConfig& cfg, VerificationReport& rep) {
  if (cfg.N < 2) throw ConfigError("N: hr-eigen needs N >= 2");
  const auto mom = u_of(cfg);
  const PhysicalParams phys{1.0, 1.0, cfg.lambda};
  const double h = cfg.h > 0 ? cfg.h : 1e-3;
  const double tol = cfg.tol > 0 ? cfg.tol : (cfg.lambda == 1.0 ? 1e-7 : 1e-5);
  const auto x = cfg.t.empty() ? default_l2_point(cfg.N) : split_points(cfg.t, cfg.N).at(0);

  HypergeomOptions ho;
  ho.tol = 1e-15;
  ExtendedHypergeom F(SpectralParameter(mom, cfg.lambda), ho);
  F.reserve_for_gap(ChamberPoint(x).gap() + 4 * std::max(h, 1e-2));
  const int degree = F.table_degree();
  const Field psi = [&](std::span<const double> y) {
    const ChamberPoint c(std::vector<double>(y.begin(), y.end()));
    return std::sqrt(weight_W(cfg.lambda, c.coords())) * F.evaluate_at_degree(c, degree).value;
  };
  const cplx v = psi(x);
  const int rmax = cfg.r3 && cfg.N == 3 ? 3 : 2;
  json eig = json::array();
  for (int r = 1; r <= rmax; ++r) {
    // The triple mixed difference loses eps/h^3 to rounding; it needs a wider step.
    const HrOptions opts{{r == 3 ? 10 * h : h, true}, cfg.r3};
    const cplx hv = apply_Hr(r, psi, x, phys, opts);
    const double s = elementary_symmetric(r, mom);
    const double res = std::abs(hv - s * v) / std::abs(v);
    rep.add_check("eigen_H" + std::to_string(r), res, tol, "S_" + std::to_string(r) + "(p) = " + fmt(s));
    eig.push_back({{"r", r}, {"residual", res}, {"S_r", s}});
  }

  // Calibration: H_1^2 - 2 H_2 against an analytic -Laplacian + U.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int nfun = cfg.draws > 0 ? cfg.draws : 20;
  const HrOptions opts{{h, true}, false};
  std::vector<double> cal;
  for (int k = 0; k < nfun; ++k) {
    const auto n = static_cast<std::size_t>(cfg.N);
    std::vector<double> a(n), b(n);
    for (double& w : a) w = 0.5 * U(rng);
    for (double& w : b) w = U(rng);
    const double c = U(rng);
    const auto y = sorted_sample(rng, cfg.N, -2.0, 2.0, 0.3);
    const Field f = [&](std::span<const double> z) {
      return cplx(std::exp(dot(a, z)) * std::cos(dot(b, z) + c), 0.0);
    };
    const Field h1f = [&](std::span<const double> z) { return apply_Hr(1, f, z, phys, opts); };
    const cplx lhs = apply_Hr(1, h1f, y, phys, opts) - 2.0 * apply_Hr(2, f, y, phys, opts);
    const double e = std::exp(dot(a, y)), th = dot(b, y) + c;
    const double lap = (dot(a, a) - dot(b, b)) * e * std::cos(th) - 2.0 * dot(a, b) * e * std::sin(th);
    const double rhs = -lap + potential_U(y, phys) * e * std::cos(th);
    cal.push_back(std::abs(lhs - rhs) / std::abs(rhs));
  }
  rep.add_check("calibration_H1sq_minus_2H2", max_of(cal), 1e-6,
                std::to_string(nfun) + " random smooth functions");
  rep.diagnostics["eigen"] = eig;
  rep.diagnostics["calibration"] = cal;
  rep.diagnostics["x"] = x;
  rep.diagnostics["table_degree"] = degree;
  rep.metric = "max_eigen_residual";
  double worst = 0.0;
  for (const auto& e : eig) worst = std::max(worst, e["residual"].get<double>());
  rep.metric_value = worst;
}

void run_asymptotics(const ExperimentConfig& cfg, VerificationReport& rep) {
  if (cfg.N < 2) throw ConfigError("N: asymptotics needs N >= 2");
  // For real u the remainder oscillates with frequencies (sigma u, d) along a
  // ray x = x0 + tau d. With u in (pi/2) Z^N and integer (or half-integer for
  // N = 2) directions every frequency is a multiple of pi/2, so sampling tau
  // with step 4 compares the remainder at equal phase.
  std::vector<double> u = cfg.u;
  const auto n = static_cast<std::size_t>(cfg.N);
  if (u.empty()) {
    u.resize(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = 0.5 * std::numbers::pi * (0.5 * (cfg.N - 1) - static_cast<double>(i));
    if (cfg.N == 2) u = {0.5 * std::numbers::pi, -0.5 * std::numbers::pi};
  }
  const SpectralParameter sp(u, cfg.lambda);
  HypergeomOptions ho;
  ho.tol = 1e-14;
  ExtendedHypergeom F(sp, ho);

  std::vector<std::vector<double>> dirs;
  std::vector<std::vector<double>> offsets;
  if (cfg.N == 2) {
    // One relative direction only; the rays differ by a centre-of-mass shift.
    dirs = {{-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}};
    offsets = {{0.0, 0.0}, {0.7, 0.7}, {-1.3, -1.3}};
  } else {
    std::vector<double> eq(n), left(n), right(n);
    for (std::size_t i = 0; i < n; ++i) eq[i] = static_cast<double>(i) - 0.5 * (cfg.N - 1);
    left = eq;
    right = eq;
    left.front() -= 1.0;
    right.back() += 1.0;
    dirs = {eq, left, right};
    offsets.assign(3, std::vector<double>(n, 0.0));
  }
  const int steps = cfg.draws > 0 ? cfg.draws : 9;
  const double step = cfg.h > 0 ? cfg.h : 4.0;
  const double tau0 = 3.0;
  const auto rho = weyl_vector(cfg.N, cfg.lambda);
  json rays = json::array();
  double worst_slope = 0.0;
  for (std::size_t r = 0; r < dirs.size(); ++r) {
    std::vector<double> ms, ys;
    for (int k = 0; k < steps; ++k) {
      const double tau = (tau0 + step * k) / -chamber_gap(dirs[r]);
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = offsets[r][i] + tau * dirs[r][i];
      const ChamberPoint p(x);
      F.reserve_for_gap(p.gap());
      const auto rem = F.remainder(p);
      ms.push_back(p.gap());
      ys.push_back(std::log(std::abs(rem.value)) - dot(rho, p.coords()));
    }
    double rise = 0.0;
    for (std::size_t k = 1; k < ys.size(); ++k) rise = std::max(rise, ys[k] - ys[k - 1]);
    // Least-squares slope of y against m_N.
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      mx += ms[k];
      my += ys[k];
    }
    mx /= static_cast<double>(ms.size());
    my /= static_cast<double>(ms.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < ms.size(); ++k) {
      sxy += (ms[k] - mx) * (ys[k] - my);
      sxx += (ms[k] - mx) * (ms[k] - mx);
    }
    const double slope = sxy / sxx;
    const std::string tag = "[ray" + std::to_string(r) + "]";
    rep.add_check("monotone_increase" + tag, rise, 0.0, "largest step up of log|F - F_as| - (rho,x)");
    rep.add_check("slope_distance" + tag, std::abs(slope - 1.0), 0.25, "slope " + fmt(slope));
    worst_slope = std::max(worst_slope, std::abs(slope - 1.0));
    rays.push_back({{"direction", dirs[r]}, {"offset", offsets[r]}, {"m_N", ms}, {"log_remainder_minus_rho_x", ys}, {"slope", slope}});
  }
  rep.diagnostics["rays"] = rays;
  rep.diagnostics["u"] = u;
  rep.metric = "max_slope_distance";
  rep.metric_value = worst_slope;
}

struct IntEqDefaults {
  double radius_tol;
  int panels;
  int order;
  double tol;
};

IntEqDefaults int_eq_defaults(const ExperimentConfig& cfg, double box_length_hint) {
  IntEqDefaults d{};
  switch (cfg.N) {
    case 1:
      d = {1e-12, 0, 10, 1e-8};
      break;
    case 2:
      d = {1e-10, 0, 10, cfg.lambda == 1.0 ? 1e-6 : 1e-4};
      break;
    default:
      d = {1e-6, 0, 10, 1e-3};
      break;
  }
  // Panel width about 4 (N = 1), 3.8 (N = 2) or 5.5 (N = 3) at order 10, but at least 8 (5) panels.
  const double width = cfg.N >= 3 ? 5.5 : cfg.N == 2 ? 3.8 : 4.0;
  d.panels = std::max(cfg.N >= 3 ? 5 : 8, static_cast<int>(std::ceil(box_length_hint / width)));
  return d;
}

std::vector<std::vector<double>> default_int_eq_points(int n) {
  switch (n) {
    case 1:
      return {{0.0}, {0.5}, {1.3}};
    case 2:
      return {{-3.0, 3.0}, {-2.0, 1.5}, {-1.0, 2.5}};
    default:
      return {{-3.0, 0.0, 3.0}, {-3.5, -1.0, 2.0}, {-2.0, 0.5, 3.5}};
  }
}

void run_int_eq(const ExperimentConfig& cfg, VerificationReport& rep) {
  if (cfg.N < 1 || cfg.N > 3) throw ConfigError("N: int-eq supports N in {1, 2, 3}");
  const SpectralParameter sp(u_of(cfg), cfg.lambda);
  const auto pts = cfg.t.empty() ? default_int_eq_points(cfg.N) : split_points(cfg.t, cfg.N);
  if (pts.empty()) throw ConfigError("t: need at least one point of N coordinates");
  const auto xis = cfg.xi_list.empty() ? std::vector<double>{0.0, 0.3, 1.0} : cfg.xi_list;

  // One box around the hull of all points.
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : pts) {
    for (double v : p) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const auto def = int_eq_defaults(cfg, 0.0);
  const double radius_tol = cfg.radius_tol > 0 ? cfg.radius_tol : def.radius_tol;
  const double R = cfg.radius > 0 ? cfg.radius : truncation_radius(cfg.lambda, cfg.N, radius_tol);
  const int default_panels = int_eq_defaults(cfg, hi - lo + 2.0 * R).panels;
  const int panels = cfg.panels > 0 ? cfg.panels : default_panels;
  const int order = cfg.order > 0 ? cfg.order : def.order;
  const double tol = cfg.tol > 0 ? cfg.tol : def.tol;
  const double guard = cfg.wall_guard > 0 ? cfg.wall_guard : (cfg.N == 2 ? 0.005 : 0.05);

  std::vector<double> center_coords(static_cast<std::size_t>(cfg.N));
  for (int i = 0; i < cfg.N; ++i) center_coords[static_cast<std::size_t>(i)] = cfg.N == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (cfg.N - 1);
  const ChamberPoint center(center_coords);

  HypergeomOptions ho;
  ho.tol = 1e-10;
  ho.wall_guard = guard;
  ExtendedHypergeom F(sp, ho);
  for (const auto& p : pts) F.reserve_for_gap(ChamberPoint(p).gap());

  json levels = json::array();
  std::vector<std::vector<double>> residuals;
  for (int level = 0; level < 2; ++level) {
    const int pl = panels << level;
    const auto grid = build_grid(center, R, pl, order, guard);
    if (level == 0 && !cfg.dump_grid.empty()) {
      std::ofstream out(cfg.dump_grid);
      grid.write_csv(out);
    }
    F.reserve_for_gap(-grid.min_gap());
    const auto samples = sample_hypergeom(F, grid, cfg.threads);
    std::vector<double> res;
    json cases = json::array();
    double dropped = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      for (double xi : xis) {
        const auto r = integral_equation_residual(xi, F, ChamberPoint(pts[k]), grid, samples, cfg.threads);
        res.push_back(r.residual);
        dropped = std::max(dropped, r.dropped_bound);
        cases.push_back({{"t", pts[k]},
                         {"xi", xi},
                         {"residual", r.residual},
                         {"lhs", {r.lhs.real(), r.lhs.imag()}},
                         {"rhs", {r.rhs.real(), r.rhs.imag()}},
                         {"mu", r.mu}});
      }
    }
    residuals.push_back(res);
    levels.push_back({{"panels", pl},
                      {"nodes", grid.size()},
                      {"dropped_nodes", grid.dropped_size()},
                      {"dropped_bound_max", dropped},
                      {"min_gap", grid.min_gap()},
                      {"max_degree_used", samples.max_degree_used},
                      {"cases", cases}});
  }

  const double floor = 10.0 * truncation_tail(cfg.lambda, cfg.N, R);
  std::size_t c = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (double xi : xis) {
      const std::string tag = "[t" + std::to_string(k) + ",xi=" + fmt(xi) + "]";
      const double base = residuals[0][c], fine = residuals[1][c];
      rep.add_check("residual" + tag, base, tol);
      // Panel doubling cannot remove the truncation tail, so the comparison
      // is against max(base, 10 x tail bound).
      rep.add_check("refinement_ratio" + tag, fine / std::max(base, floor), 1.0,
                    "refined / max(base, truncation floor)");
      ++c;
    }
  }
  rep.diagnostics["levels"] = levels;
  rep.diagnostics["radius"] = R;
  rep.diagnostics["radius_tol"] = radius_tol;
  rep.diagnostics["truncation_floor"] = floor;
  rep.diagnostics["order"] = order;
  rep.diagnostics["table_degree"] = F.table_degree();
  rep.diagnostics["max_residual_base"] = max_of(residuals[0]);
  rep.diagnostics["max_residual_refined"] = max_of(residuals[1]);
  rep.metric = "max_residual";
  rep.metric_value = max_of(residuals[0]);
}

void run_commutator(const ExperimentConfig& cfg, VerificationReport& rep) {
  if (cfg.N < 1 || cfg.N > 3) throw ConfigError("N: commutator supports N in {1, 2, 3}");
  const double tol = cfg.tol > 0 ? cfg.tol : (cfg.N == 1 ? 1e-8 : 1e-4);
  double R = cfg.radius;
  int panels = cfg.panels, order = cfg.order;
  if (cfg.N == 1) {
    if (R <= 0) R = 2.0 * truncation_radius(cfg.lambda, 1, 1e-10);
    if (order <= 0) order = 10;
    if (panels <= 0) panels = static_cast<int>(std::ceil(2.0 * R / 3.0));
  } else {
    if (R <= 0) R = truncation_radius(cfg.lambda, cfg.N, cfg.radius_tol > 0 ? cfg.radius_tol : 1e-4);
    if (order <= 0) order = 7;
    // Panels of width about 5 at order 7.
    if (panels <= 0) panels = std::max(4, static_cast<int>(std::ceil((2.0 * R + 0.5 * (cfg.N - 1)) / 5.0)));
  }
  const double margin = cfg.margin > 0 ? cfg.margin : 0.5 * R;
  const std::vector<double> c0(static_cast<std::size_t>(cfg.N), 0.0);
  std::vector<double> cc(static_cast<std::size_t>(cfg.N));
  for (int i = 0; i < cfg.N; ++i) cc[static_cast<std::size_t>(i)] = 0.5 * i - 0.25 * (cfg.N - 1);
  const ChamberPoint center(cc);

  const auto grid = build_grid(center, R, panels, order, 0.0);
  if (!cfg.dump_grid.empty()) {
    std::ofstream out(cfg.dump_grid);
    grid.write_csv(out);
  }
  const auto A = nystrom_matrix(cfg.xi, cfg.lambda, grid, cfg.threads);
  const auto B = nystrom_matrix(cfg.xi2, cfg.lambda, grid, cfg.threads);
  if (!cfg.dump_matrix.empty()) {
    std::ofstream out(cfg.dump_matrix);
    A.write_csv(out);
  }
  rep.add_check("hermiticity_defect", std::max(A.hermiticity_defect(), B.hermiticity_defect()), 1e-14);
  const double base = commutator_norm_interior(A, B, margin);
  rep.diagnostics["commutator_full_base"] = commutator_norm(A, B);
  rep.diagnostics["nodes_base"] = grid.size();
  rep.diagnostics["radius"] = R;
  rep.diagnostics["margin"] = margin;
  rep.diagnostics["order"] = order;
  rep.diagnostics["panels_base"] = panels;
  rep.diagnostics["commutator_interior_base"] = base;

  if (cfg.N == 1) {
    // Plane waves diagonalise the rank-one operator: (Q e^{iu.})(t) = mu_xi(u) e^{iut}.
    const double u = u_of(cfg)[0];
    const double mu = eigenvalue_mu(cfg.xi, SpectralParameter({u}, cfg.lambda));
    double worst = 0.0;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      v(static_cast<Eigen::Index>(k)) = std::sqrt(grid.weight(k)) * std::polar(1.0, u * grid.node(k)[0]);
    }
    const Eigen::VectorXcd av = A.entries * v;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (grid.boundary_distance(k) < margin) continue;
      const cplx got = av(static_cast<Eigen::Index>(k)) / std::sqrt(grid.weight(k));
      worst = std::max(worst, std::abs(got - mu * std::polar(1.0, u * grid.node(k)[0])) / mu);
    }
    rep.add_check("plane_wave_eigen", worst, tol, "mu_xi(u) = " + fmt(mu));
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A.entries, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    const double sup = cosh_fourier_gamma(0.0, cfg.lambda);
    rep.add_check("leading_eigenvalue_excess", std::max(0.0, top - sup) / sup, 1e-12,
                  "leading " + fmt(top) + " vs sup mu = " + fmt(sup));
    rep.diagnostics["leading_eigenvalue"] = top;
    rep.diagnostics["mu_xi"] = mu;
    rep.add_check("commutator_interior", base, 1e-10);
    rep.metric = "plane_wave_residual";
    rep.metric_value = worst;
    return;
  }

  rep.add_check("commutator_interior_base", base, tol);
  const auto fine_grid = build_grid(center, R, 2 * panels, order, 0.0);
  if (fine_grid.size() > kMaxNystromNodes) {
    rep.diagnostics["refinement_skipped"] = "refined grid exceeds the node limit";
    rep.add_check("refinement_available", static_cast<double>(fine_grid.size()),
                  static_cast<double>(kMaxNystromNodes), "refined node count");
  } else {
    const auto A2 = nystrom_matrix(cfg.xi, cfg.lambda, fine_grid, cfg.threads);
    const auto B2 = nystrom_matrix(cfg.xi2, cfg.lambda, fine_grid, cfg.threads);
    const double fine = commutator_norm_interior(A2, B2, margin);
    rep.add_check("refinement_ratio", fine / base, 0.25, "refined / base, needs >= 4x improvement");
    rep.diagnostics["commutator_interior_refined"] = fine;
    rep.diagnostics["nodes_refined"] = fine_grid.size();
  }
  rep.metric = "commutator_interior";
  rep.metric_value = base;
}

void maybe_dump_table(const ExperimentConfig& cfg) {
  if (cfg.dump_table.empty()) return;
  const auto u = u_of(cfg);
  std::vector<cplx> xi(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) xi[k] = cplx(0.0, u[k]);
  const auto table = hc_coefficients(xi, cfg.lambda, cfg.N <= 2 ? 64 : 24);
  std::ofstream out(cfg.dump_table);
  if (!out) throw ConfigError("dump-table: cannot open " + cfg.dump_table);
  table.write_csv(out);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Experiment e) {
  for (const auto& [name, value] : kExperimentNames) {
    if (value == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  const auto it = kExperimentNames.find(name);
  if (it == kExperimentNames.end()) {
    std::string all;
    for (const auto& [n, v] : kExperimentNames) all += (all.empty() ? "" : ", ") + n;
    throw ConfigError("experiment: unknown '" + name + "' (expected one of " + all + ")");
  }
  return it->second;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double("list", item));
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  auto list = [&] {
    try {
      return parse_csv_doubles(value);
    } catch (const ConfigError&) {
      throw ConfigError(key + ": expected comma-separated reals, got '" + value + "'");
    }
  };
  if (key == "experiment") cfg.experiment = parse_experiment(value);
  else if (key == "N") cfg.N = static_cast<int>(parse_int(key, value));
  else if (key == "lambda") cfg.lambda = parse_double(key, value);
  else if (key == "u") cfg.u = list();
  else if (key == "xi") cfg.xi = parse_double(key, value);
  else if (key == "xi2") cfg.xi2 = parse_double(key, value);
  else if (key == "t") cfg.t = list();
  else if (key == "xi-list") cfg.xi_list = list();
  else if (key == "panels") cfg.panels = static_cast<int>(parse_int(key, value));
  else if (key == "order") cfg.order = static_cast<int>(parse_int(key, value));
  else if (key == "tol") cfg.tol = parse_double(key, value);
  else if (key == "radius-tol") cfg.radius_tol = parse_double(key, value);
  else if (key == "radius") cfg.radius = parse_double(key, value);
  else if (key == "margin") cfg.margin = parse_double(key, value);
  else if (key == "wall-guard") cfg.wall_guard = parse_double(key, value);
  else if (key == "step" || key == "h") cfg.h = parse_double(key, value);
  else if (key == "draws") cfg.draws = static_cast<int>(parse_int(key, value));
  else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "r3") cfg.r3 = parse_bool(key, value);
  else if (key == "json") cfg.json_path = value;
  else if (key == "csv") cfg.csv_path = value;
  else if (key == "sweep") cfg.sweep_axis = value;
  else if (key == "values") cfg.sweep_values = list();
  else if (key == "dump-table") cfg.dump_table = value;
  else if (key == "dump-grid") cfg.dump_grid = value;
  else if (key == "dump-matrix") cfg.dump_matrix = value;
  else throw ConfigError("unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in, std::move(base));
}

void ExperimentConfig::validate() const {
  if (N < 1) throw ConfigError("N: must be >= 1");
  if (N > 6) throw ConfigError("N: at most 6 particles are supported");
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be positive");
  if (!u.empty() && experiment != Experiment::FourierGamma && u.size() != static_cast<std::size_t>(N)) {
    throw ConfigError("u: expected " + std::to_string(N) + " values, got " + std::to_string(u.size()));
  }
  if (!t.empty() && t.size() % static_cast<std::size_t>(N) != 0) {
    throw ConfigError("t: length must be a multiple of N");
  }
  if (panels < 0) throw ConfigError("panels: must be positive");
  if (order != 0 && (order < 4 || order > 16)) throw ConfigError("order: must be in [4, 16]");
  if (tol < 0) throw ConfigError("tol: must be positive");
  if (radius_tol < 0) throw ConfigError("radius-tol: must be positive");
  if (h < 0) throw ConfigError("h: must be positive");
  if (draws < 0) throw ConfigError("draws: must be positive");
  if (threads < 1) throw ConfigError("threads: must be >= 1");
  if ((experiment == Experiment::IntEq || experiment == Experiment::Commutator) && N > 3) {
    throw ConfigError("N: quadrature experiments support N in {1, 2, 3}");
  }
  if (r3 && N != 3) throw ConfigError("r3: only available for N = 3");
  if (!sweep_axis.empty()) {
    static const std::vector<std::string> axes = {"xi", "lambda", "u-gap", "grid-refinement"};
    if (std::find(axes.begin(), axes.end(), sweep_axis) == axes.end()) {
      throw ConfigError("sweep: axis must be one of xi, lambda, u-gap, grid-refinement");
    }
    if (sweep_values.empty()) throw ConfigError("values: a sweep needs at least one value");
  }
}

json ExperimentConfig::to_json() const {
  return {{"experiment", cmqop::to_string(experiment)},
          {"N", N},
          {"lambda", lambda},
          {"u", u},
          {"xi", xi},
          {"xi2", xi2},
          {"t", t},
          {"xi_list", xi_list},
          {"panels", panels},
          {"order", order},
          {"tol", tol},
          {"radius_tol", radius_tol},
          {"radius", radius},
          {"margin", margin},
          {"wall_guard", wall_guard},
          {"h", h},
          {"draws", draws},
          {"threads", threads},
          {"seed", seed},
          {"r3", r3}};
}

void VerificationReport::add_check(std::string name, double residual, double tolerance, std::string note) {
  Check c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tolerance;
  c.pass = residual <= tolerance;
  c.note = std::move(note);
  checks.push_back(std::move(c));
}

void VerificationReport::finalize() {
  bool ok = error.empty();
  for (auto& c : checks) {
    c.pass = c.residual <= c.tolerance;
    ok = ok && c.pass;
  }
  pass = ok;
}

json VerificationReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name},
                  {"residual", c.residual},
                  {"tolerance", c.tolerance},
                  {"pass", c.pass},
                  {"note", c.note}});
  }
  return {{"schema", schema},
          {"version", version},
          {"experiment", experiment},
          {"config", config},
          {"checks", cs},
          {"diagnostics", diagnostics},
          {"metric", metric},
          {"metric_value", metric_value},
          {"exploratory", exploratory},
          {"error", error},
          {"wall_time_ms", wall_time_ms},
          {"seed", seed},
          {"pass", pass}};
}

namespace {

// NaN and infinities are written as null.
double number_or_nan(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

VerificationReport VerificationReport::from_json(const json& j) {
  VerificationReport r;
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != kReportSchema) throw ConfigError("report: unsupported schema '" + r.schema + "'");
  r.version = j.at("version").get<std::string>();
  r.experiment = j.at("experiment").get<std::string>();
  r.config = j.at("config");
  for (const auto& c : j.at("checks")) {
    Check k;
    k.name = c.at("name").get<std::string>();
    k.residual = number_or_nan(c.at("residual"));
    k.tolerance = c.at("tolerance").get<double>();
    k.pass = c.at("pass").get<bool>();
    k.note = c.at("note").get<std::string>();
    r.checks.push_back(std::move(k));
  }
  r.diagnostics = j.at("diagnostics");
  r.metric = j.at("metric").get<std::string>();
  r.metric_value = number_or_nan(j.at("metric_value"));
  r.exploratory = j.at("exploratory").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.pass = j.at("pass").get<bool>();
  return r;
}

void VerificationReport::print_table(std::ostream& out) const {
  out << "cmqop " << version << "  experiment " << experiment << "  seed " << seed << '\n';
  if (exploratory) out << "exploratory mode (lambda < 1): residuals reported without judgment\n";
  std::size_t width = 5;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "check" << std::setw(14) << "residual"
      << std::setw(14) << "tolerance" << "status\n";
  for (const auto& c : checks) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << c.name << std::setw(14)
        << fmt(c.residual) << std::setw(14) << fmt(c.tolerance) << (c.pass ? "pass" : "FAIL");
    if (!c.note.empty()) out << "  " << c.note;
    out << '\n';
  }
  if (!error.empty()) out << "error: " << error << '\n';
  out << metric << " = " << fmt(metric_value) << "   (" << std::fixed << std::setprecision(1)
      << wall_time_ms << " ms)\n";
  out.unsetf(std::ios::fixed);
  out << (pass ? "PASS" : "FAIL") << '\n';
}

VerificationReport run(const ExperimentConfig& cfg) {
  cfg.validate();
  VerificationReport rep;
  rep.experiment = to_string(cfg.experiment);
  rep.config = cfg.to_json();
  rep.seed = cfg.seed;
  rep.exploratory = cfg.lambda < 1.0 &&
                    (cfg.experiment == Experiment::IntEq || cfg.experiment == Experiment::Commutator);
  const auto start = std::chrono::steady_clock::now();
  try {
    maybe_dump_table(cfg);
    switch (cfg.experiment) {
      case Experiment::FourierGamma:
        run_fourier_gamma(cfg, rep);
        break;
      case Experiment::DiffEq:
        run_diff_eq(cfg, rep);
        break;
      case Experiment::KernelId:
        run_kernel_id(cfg, rep);
        break;
      case Experiment::L2Eigen:
        run_l2_eigen(cfg, rep);
        break;
      case Experiment::HrEigen:
        run_hr_eigen(cfg, rep);
        break;
      case Experiment::Asymptotics:
        run_asymptotics(cfg, rep);
        break;
      case Experiment::IntEq:
        run_int_eq(cfg, rep);
        break;
      case Experiment::Commutator:
        run_commutator(cfg, rep);
        break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  if (rep.exploratory) {
    // Keep the residuals as diagnostics, drop the judgment.
    json informational = json::array();
    for (const auto& c : rep.checks) informational.push_back({{"name", c.name}, {"residual", c.residual}});
    rep.diagnostics["unjudged_checks"] = informational;
    rep.checks.clear();
  }
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  rep.finalize();
  return rep;
}

int exit_code(const VerificationReport& report) {
  if (!report.error.empty()) return 3;
  return report.pass ? 0 : 1;
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::string& axis,
                            const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    ExperimentConfig cfg = base;
    cfg.sweep_axis.clear();
    cfg.sweep_values.clear();
    cfg.json_path.clear();
    cfg.csv_path.clear();
    if (axis == "xi") {
      cfg.xi = v;
      cfg.xi_list = {v};
    } else if (axis == "lambda") {
      cfg.lambda = v;
    } else if (axis == "u-gap") {
      cfg.u.assign(static_cast<std::size_t>(cfg.N), 0.0);
      for (int i = 0; i < cfg.N; ++i) cfg.u[static_cast<std::size_t>(i)] = v * (0.5 * (cfg.N - 1) - i);
    } else if (axis == "grid-refinement") {
      cfg.panels = static_cast<int>(v);
    } else {
      throw ConfigError("sweep: unknown axis '" + axis + "'");
    }
    SweepRow row;
    row.value = v;
    try {
      row.report = run(cfg);
    } catch (const ConfigError& e) {
      row.report.experiment = to_string(cfg.experiment);
      row.report.error = std::string("config: ") + e.what();
      row.report.finalize();
    }
    try {
      row.mu_xi = eigenvalue_mu(cfg.xi, SpectralParameter(u_of(cfg), cfg.lambda));
    } catch (const std::exception&) {
      row.mu_xi = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows) {
  out << "axis,value,pass,metric,metric_value,mu_xi,worst_ratio,wall_time_ms,error\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    double worst = 0.0;
    for (const auto& c : r.report.checks) {
      if (c.tolerance > 0) worst = std::max(worst, c.residual / c.tolerance);
    }
    std::string err = r.report.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << axis << ',' << r.value << ',' << (r.report.pass ? 1 : 0) << ',' << r.report.metric << ','
        << r.report.metric_value << ',' << r.mu_xi << ',' << worst << ',' << r.report.wall_time_ms
        << ',' << err << '\n';
  }
}

}  // namespace cmqop
