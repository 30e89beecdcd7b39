// Acceptance run: one PASS/FAIL line per criterion. Library quantities are
// compared against closed forms, Boost quadrature and the rank-one series;
// the experiment-driven criteria go through cmqop::run exactly as the CLI does.
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "cmqop/cli_reports.hpp"
#include "cmqop/cm_model.hpp"
#include "cmqop/hypergeom.hpp"
#include "cmqop/special_fn.hpp"

using namespace cmqop;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_s;
  const bool ok = out.pass && in_time;
  if (!ok) ++failures;
  std::printf("criterion %2d %-28s %s  (%s; %.1f s of %.0f s)\n", id, title, ok ? "PASS" : "FAIL",
              out.detail.c_str(), secs, budget_s);
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Folds a run() report into an outcome, keeping the worst check.
Outcome from_report(const VerificationReport& r, const std::string& label) {
  Outcome o;
  o.pass = r.pass;
  double worst = 0.0;
  std::string which;
  for (const auto& c : r.checks) {
    const double q = c.tolerance > 0 ? c.residual / c.tolerance : (c.residual > 0 ? INFINITY : 0.0);
    if (q >= worst) {
      worst = q;
      which = c.name;
    }
  }
  o.detail = label + ": worst " + which + " at " + sci(worst) + " x tol";
  if (!r.error.empty()) o.detail = label + ": " + r.error;
  return o;
}

Outcome merge(const std::vector<Outcome>& parts) {
  Outcome o;
  for (const auto& p : parts) {
    o.pass = o.pass && p.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
  }
  return o;
}

ExperimentConfig config(Experiment e, int n, double lambda) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.N = n;
  cfg.lambda = lambda;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;

  criterion(1, "cosh-Fourier-Gamma", 1.0, [] {
    double worst = 0.0;
    int pairs = 0;
    for (double lambda : {1.0, 2.0, 3.5}) {
      for (double v : {0.0, 0.5, 1.3, 2.0}) {
        auto f = [&](double w) { return 2.0 * std::cos(v * w) * std::pow(2.0 * std::cosh(0.5 * w), -lambda); };
        double q;
        if (v == 0.0) {
          boost::math::quadrature::exp_sinh<double> integrator;
          q = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-15);
        } else {
          // Oscillatory: sum Gauss-Kronrod over half periods until the tail is negligible.
          q = 0.0;
          const double period = std::numbers::pi / v;
          for (double a = 0.0; a < 120.0 / lambda; a += period) {
            q += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + period, 8, 1e-15);
          }
        }
        worst = std::max(worst, std::abs(cosh_fourier_gamma(v, lambda) - q) / std::abs(q));
        ++pairs;
      }
    }
    return Outcome{worst <= 1e-9, std::to_string(pairs) + " pairs, max rel err " + sci(worst)};
  });

  criterion(2, "Harish-Chandra series", 1.0, [] {
    double coeff_err = 0.0, value_err = 0.0;
    for (double v : {0.3, 1.0, 2.5}) {
      const std::vector<cplx> xi = {cplx(0.0, 0.5 * v), cplx(0.0, -0.5 * v)};
      const auto table = hc_coefficients(xi, 1.0, 20);
      for (std::size_t k = 0; k < table.size(); ++k) coeff_err = std::max(coeff_err, std::abs(table.coefficient(k) - 1.0));
      ExtendedHypergeom f(SpectralParameter({0.5 * v, -0.5 * v}, 1.0));
      f.reserve_for_gap(-1.0);
      for (double s = 1.0; s <= 6.0 + 1e-12; s += 0.25) {
        const double expect = std::sin(0.5 * v * s) / (v * std::sinh(0.5 * s));
        const cplx got = f.evaluate(ChamberPoint({-0.5 * s, 0.5 * s})).value;
        value_err = std::max(value_err, std::abs(got - expect));
      }
    }
    return Outcome{coeff_err <= 1e-12 && value_err <= 1e-8,
                   "max |Delta_m - 1| " + sci(coeff_err) + ", max |F - closed form| " + sci(value_err)};
  });

  criterion(3, "rank-one series overlap", 5.0, [] {
    double worst = 0.0;
    for (double lambda : {1.0, 1.5, 2.5}) {
      for (double v : {0.2, 0.9, 1.7}) {
        const SpectralParameter sp({0.5 * v, -0.5 * v}, lambda);
        for (double s = 1.0; s <= 1.7 + 1e-12; s += 0.1) {
          const cplx got = extended_hypergeom(sp, ChamberPoint({-0.5 * s, 0.5 * s}), 1e-13).value;
          worst = std::max(worst, std::abs(got - a1_oracle_series(v, lambda, s)));
        }
      }
    }
    return Outcome{worst <= 1e-8, "max abs difference " + sci(worst)};
  });

  criterion(4, "L_2 eigen-equation", 30.0, [] {
    return merge({from_report(run(config(Experiment::L2Eigen, 2, 1.5)), "N=2"),
                  from_report(run(config(Experiment::L2Eigen, 3, 1.5)), "N=3")});
  });

  criterion(5, "integral equation", quick ? 60.0 : 1260.0, [quick] {
    std::vector<Outcome> parts = {
        from_report(run(config(Experiment::IntEq, 2, 1.0)), "N=2 lambda=1"),
        from_report(run(config(Experiment::IntEq, 2, 2.5)), "N=2 lambda=2.5")};
    if (!quick) parts.push_back(from_report(run(config(Experiment::IntEq, 3, 1.5)), "N=3 lambda=1.5"));
    auto o = merge(parts);
    if (quick) o.detail += "; N=3 skipped (--quick)";
    return o;
  });

  criterion(6, "kernel identities", 60.0, [] {
    return merge({from_report(run(config(Experiment::KernelId, 2, 1.5)), "N=2"),
                  from_report(run(config(Experiment::KernelId, 3, 1.5)), "N=3")});
  });

  criterion(7, "difference equation", 1.0, [] {
    return merge({from_report(run(config(Experiment::DiffEq, 1, 1.7)), "N=1"),
                  from_report(run(config(Experiment::DiffEq, 2, 1.7)), "N=2"),
                  from_report(run(config(Experiment::DiffEq, 3, 1.7)), "N=3")});
  });

  criterion(8, "Hermiticity and commutation", 120.0, [] {
    auto cfg = config(Experiment::Commutator, 2, 1.5);
    cfg.xi = 0.4;
    cfg.xi2 = 1.1;
    return from_report(run(cfg), "N=2 (0.4, 1.1)");
  });

  criterion(9, "asymptotic remainder", 30.0, [] {
    return merge({from_report(run(config(Experiment::Asymptotics, 2, 1.5)), "N=2"),
                  from_report(run(config(Experiment::Asymptotics, 3, 1.5)), "N=3")});
  });

  criterion(10, "H_r calibration", 10.0, [] {
    auto n3 = config(Experiment::HrEigen, 3, 1.0);
    n3.r3 = true;
    return merge({from_report(run(config(Experiment::HrEigen, 2, 1.0)), "N=2"),
                  from_report(run(n3), "N=3 with H_3")});
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
