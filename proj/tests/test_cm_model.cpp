#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cmqop/cm_model.hpp"
#include "cmqop/errors.hpp"

using namespace cmqop;

namespace {

std::vector<double> sorted_uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi,
                                   double min_gap) {
  std::uniform_real_distribution<double> U(lo, hi);
  while (true) {
    std::vector<double> x(n);
    for (double& v : x) v = U(rng);
    std::sort(x.begin(), x.end());
    bool ok = true;
    for (std::size_t k = 0; k + 1 < n; ++k) ok = ok && x[k + 1] - x[k] > min_gap;
    if (ok) return x;
  }
}

}  // namespace

TEST_CASE("potential u") {
  const PhysicalParams p{1.0, 1.0, 2.0};
  CHECK(potential_u(2.0 * std::asinh(1.0), p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(potential_u(0.7, p) == potential_u(-0.7, p));
  CHECK(potential_u(0.7, PhysicalParams{1.0, 1.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(potential_u(0.0, p), PoleError);
  CHECK_THROWS_AS((PhysicalParams{0.0, 1.0, 1.0}.validate()), DomainError);
}

TEST_CASE("weight W: zeros, substitution, symmetry and exponential form") {
  const std::vector<double> coincide = {0.3, 0.3, 1.0};
  CHECK(weight_W(1.5, coincide) == 0.0);
  const double a = std::asinh(1.0);
  const std::vector<double> s2 = {-a, a};
  CHECK(weight_W(1.7, s2) == doctest::Approx(std::pow(4.0, 1.7)).epsilon(1e-13));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const double lambda = 0.5 + 0.2 * trial;
    auto s = sorted_uniform(rng, 4, -3, 3, 0.05);
    const auto rho = weyl_vector(4, lambda);
    double prod = 1.0;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) prod *= std::pow(1.0 - std::exp(s[i] - s[j]), 2 * lambda);
    }
    const double expform = std::exp(-2.0 * dot(rho, s)) * prod;
    CHECK(std::abs(weight_W(lambda, s) / expform - 1.0) < 1e-12);
    std::vector<double> perm = {s[2], s[0], s[3], s[1]};
    CHECK(weight_W(lambda, perm) == doctest::Approx(weight_W(lambda, s)).epsilon(1e-14));
  }
}

TEST_CASE("kernel K is symmetric, positive and bounded by the exponential estimate") {
  const std::vector<double> t1 = {0.4}, t2 = {0.4};
  CHECK(kernel_K(1.3, t1, t2) == doctest::Approx(std::pow(2.0, -1.3)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> t(3), s(3);
    for (auto& v : t) v = U(rng);
    for (auto& v : s) v = U(rng);
    const double k = kernel_K(2.2, t, s);
    CHECK(k > 0.0);
    CHECK(k == doctest::Approx(kernel_K(2.2, s, t)).epsilon(1e-14));
    double bound = 1.0;
    for (double a : t) {
      for (double b : s) bound *= std::exp(-2.2 * std::abs(a - b) / 2.0);
    }
    CHECK(k <= bound * (1.0 + 1e-14));
  }
  // Deep in the tail the log form keeps the value representable.
  const std::vector<double> far = {-3000.0}, near = {0.0};
  CHECK(log_kernel_K(1.0, far, near) == doctest::Approx(-1500.0));
}

TEST_CASE("Q kernel: Hermitian, real at xi = 0, N = 1 value") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const auto t = sorted_uniform(rng, 3, -3, 3, 0.1);
    const auto s = sorted_uniform(rng, 3, -3, 3, 0.1);
    const cplx a = qz_kernel(0.7, 1.6, t, s);
    const cplx b = qz_kernel(0.7, 1.6, s, t);
    CHECK(std::abs(a - std::conj(b)) <= 1e-14 * std::abs(a));
    const cplx r = qz_kernel(0.0, 1.6, t, s);
    CHECK(r.imag() == 0.0);
    CHECK(r.real() > 0.0);
    CHECK(std::abs(a) == doctest::Approx(r.real()).epsilon(1e-14));
  }
  const std::vector<double> x = {0.25};
  CHECK(std::abs(qz_kernel(0.3, 1.2, x, x) - std::pow(2.0, -1.2)) < 1e-15);
}

TEST_CASE("physical Q kernel reduces to the dimensionless one") {
  const PhysicalParams p{0.5, 2.0, 1.0};
  const std::vector<double> x = {-0.4, 0.6}, y = {-0.2, 0.9};
  const std::vector<double> t = {-0.8, 1.2}, s = {-0.4, 1.8};
  const cplx phys = qz_kernel_physical(0.3, p, x, y);
  CHECK(std::abs(phys - qz_kernel(0.3 / (0.5 * 2.0), 2.0, t, s)) < 1e-14);
}

TEST_CASE("integrand phase and the lambda = 1 closed form") {
  const double v = 0.9;
  const SpectralParameter sp({0.5 * v, -0.5 * v}, 1.0);
  ExtendedHypergeom F(sp);
  F.reserve_for_gap(-0.5);
  const std::vector<double> t = {-2.0, 1.5};
  const ChamberPoint s({-0.9, 0.7});
  const cplx a = integrand_I(0.0, F, t, s), b = integrand_I(0.8, F, t, s);
  CHECK(std::abs(std::abs(a) - std::abs(b)) < 1e-14 * std::abs(a));
  const double d = s[1] - s[0];
  const double f2 = std::sin(0.5 * v * d) / (v * std::sinh(0.5 * d));
  const double expect = kernel_K(1.0, t, s.coords()) * 4.0 * std::sinh(0.5 * d) * std::sinh(0.5 * d) * f2;
  CHECK(std::abs(a - expect) < 1e-12 * std::abs(expect));
}

TEST_CASE("Psi at lambda = 1 is a plane-wave combination") {
  const PhysicalParams p{1.0, 1.0, 1.0};
  const double v = 1.4;
  const std::vector<double> mom = {0.5 * v, -0.5 * v};
  for (double s : {0.8, 2.0, 5.0}) {
    const std::vector<double> x = {0.5 * s, -0.5 * s};  // unsorted on purpose
    const cplx psi = psi_eval(mom, p, x);
    CHECK(std::abs(psi - 2.0 * std::sin(0.5 * v * s) / v) < 1e-10);
  }
}

TEST_CASE("eigenvalue mu") {
  const SpectralParameter one({0.3}, 2.0);
  CHECK(eigenvalue_mu(0.3, one) == doctest::Approx(1.0).epsilon(1e-14));
  for (double lambda : {1.0, 1.5, 3.0}) {
    const SpectralParameter sp({-0.2}, lambda);
    CHECK(eigenvalue_mu(-0.2, sp) ==
          doctest::Approx(std::exp(2 * std::lgamma(lambda / 2) - std::lgamma(lambda))).epsilon(1e-13));
    // Equals the cosh-Fourier-Gamma value in rank one.
    CHECK(eigenvalue_mu(0.6, sp) == doctest::Approx(cosh_fourier_gamma(0.8, lambda)).epsilon(1e-13));
  }
  // Decreasing in |u - xi|, maximal at coincidence.
  const double lambda = 1.7;
  double prev = std::numeric_limits<double>::infinity();
  for (double d = 0.0; d < 4.0; d += 0.25) {
    const double m = eigenvalue_mu(0.0, SpectralParameter({d, -0.5 * d, 0.1}, lambda));
    const double top = std::pow(std::exp(2 * std::lgamma(lambda / 2) - std::lgamma(lambda)), 3);
    CHECK(m <= top * (1 + 1e-12));
    CHECK(m < prev);
    prev = m;
  }
  const PhysicalParams phys{2.0, 0.5, 3.0};
  const std::vector<double> mom = {0.4, -0.1};
  CHECK(phi_z(0.2, mom, phys) ==
        doctest::Approx(eigenvalue_mu(0.2, SpectralParameter({0.4, -0.1}, 1.5)) / 0.25).epsilon(1e-13));
}

TEST_CASE("difference equation: rank-one ratio and random draws") {
  const double lambda = 1.7, u = 0.45, xi = -0.2;
  const SpectralParameter sp({u}, lambda);
  const cplx i(0.0, 1.0);
  const cplx a = i * (u - xi);
  const cplx ratio = eigenvalue_mu_log(xi - i, sp).value() / eigenvalue_mu_log(xi, sp).value();
  CHECK(std::abs(ratio - (lambda / 2 - a) / (lambda / 2 + a - 1.0)) < 1e-13);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-2, 2);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (double l : {1.0, 1.7, 3.0}) {
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> uu(n);
        for (auto& x : uu) x = U(rng);
        CHECK(difference_eq_residual(U(rng), SpectralParameter(uu, l)) < 1e-12);
      }
    }
  }
}

TEST_CASE("H_1 on a plane wave") {
  const PhysicalParams p{0.7, 1.0, 1.0};
  const std::vector<double> k = {0.3, -1.1, 0.5};
  const Field f = [&](std::span<const double> x) {
    return std::polar(1.0, dot(k, x) / p.hbar);
  };
  const std::vector<double> x = {-0.2, 0.4, 1.3};
  const cplx h1 = apply_Hr(1, f, x, p);
  CHECK(std::abs(h1 - (k[0] + k[1] + k[2]) * f(x)) < 1e-6);
  CHECK_THROWS_AS(apply_Hr(3, f, x, p), std::invalid_argument);
  CHECK_THROWS_AS(apply_Hr(4, f, x, p), std::invalid_argument);
}

TEST_CASE("H_1^2 - 2 H_2 equals the Schroedinger operator on random smooth functions") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> U(-1, 1);
  const PhysicalParams p{0.8, 1.3, 2.1};
  const HrOptions opts{{1e-3, true}, false};
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 2;
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = 0.5 * U(rng);
    for (auto& v : b) v = U(rng);
    const double c = U(rng);
    const Field f = [&](std::span<const double> x) {
      return cplx(std::exp(dot(a, x)) * std::cos(dot(b, x) + c), 0.0);
    };
    const auto x = sorted_uniform(rng, n, -2, 2, 0.3);
    const Field h1f = [&](std::span<const double> y) { return apply_Hr(1, f, y, p, opts); };
    const cplx lhs = apply_Hr(1, h1f, x, p, opts) - 2.0 * apply_Hr(2, f, x, p, opts);
    // Analytic Laplacian of e^{a.x} cos(b.x + c).
    const double e = std::exp(dot(a, x)), th = dot(b, x) + c;
    const double lap = (dot(a, a) - dot(b, b)) * e * std::cos(th) - 2.0 * dot(a, b) * e * std::sin(th);
    const double rhs = -p.hbar * p.hbar * lap + potential_U(x, p) * f(x).real();
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));
    CHECK(std::abs(apply_schroedinger(f, x, p, opts.fd) - rhs) <= 1e-6 * std::abs(rhs));
  }
}

TEST_CASE("free-case eigenvalues of H_1, H_2 (and H_3 for N = 3)") {
  const PhysicalParams p{1.0, 1.0, 1.0};
  const std::vector<double> mom = {0.9, 0.2, -0.6};
  const SpectralParameter sp(mom, 1.0);
  ExtendedHypergeom F(sp);
  F.reserve_for_gap(-0.4);
  const int degree = F.table_degree();
  const Field psi = [&](std::span<const double> x) {
    const ChamberPoint c(std::vector<double>(x.begin(), x.end()));
    return std::sqrt(weight_W(1.0, c.coords())) * F.evaluate_at_degree(c, degree).value;
  };
  const std::vector<double> x = {-1.1, 0.2, 1.4};
  const cplx v = psi(x);
  for (int r = 1; r <= 3; ++r) {
    // The third mixed difference loses eps / h^3 to rounding; use a wider step.
    const HrOptions opts{{r == 3 ? 1e-2 : 1e-3, true}, true};
    const cplx h = apply_Hr(r, psi, x, p, opts);
    CHECK(std::abs(h - elementary_symmetric(r, mom) * v) <= 1e-7 * std::abs(v));
  }
}

TEST_CASE("H_2 eigenvalue at lambda = 2.5 through the series") {
  const PhysicalParams p{1.0, 1.0, 2.5};
  const std::vector<double> mom = {0.8, -0.8};
  HypergeomOptions ho;
  ho.tol = 1e-15;
  ExtendedHypergeom F(SpectralParameter(mom, 2.5), ho);
  F.reserve_for_gap(-0.8);
  const int degree = F.table_degree();
  const Field psi = [&](std::span<const double> x) {
    const ChamberPoint c(std::vector<double>(x.begin(), x.end()));
    return std::sqrt(weight_W(2.5, c.coords())) * F.evaluate_at_degree(c, degree).value;
  };
  const std::vector<double> x = {-0.9, 0.6};
  const HrOptions opts{{1e-3, true}, false};
  const cplx v = psi(x);
  for (int r = 1; r <= 2; ++r) {
    CHECK(std::abs(apply_Hr(r, psi, x, p, opts) - elementary_symmetric(r, mom) * v) <= 1e-5 * std::abs(v));
  }
}

TEST_CASE("kernel identities") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> X(-1, 1);
  for (std::size_t n : {2, 3}) {
    for (double lambda : {1.0, 2.0, 1.7}) {
      const auto t = sorted_uniform(rng, n, -2, 2, 0.3);
      const auto s = sorted_uniform(rng, n, -2, 2, 0.3);
      const double xi = X(rng);
      CHECK(kernel_identity_residual(1, xi, lambda, t, s) < 1e-8);
      CHECK(kernel_identity_residual(2, xi, lambda, t, s) < 1e-6);
    }
  }
}

TEST_CASE("kernel identity residual converges at second order without extrapolation") {
  const std::vector<double> t = {-1.0, 0.5, 1.7}, s = {-0.3, 0.2, 2.1};
  for (int r = 1; r <= 2; ++r) {
    const double coarse = kernel_identity_residual(r, 0.6, 1.7, t, s, {4e-2, false});
    const double fine = kernel_identity_residual(r, 0.6, 1.7, t, s, {2e-2, false});
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("truncation radius") {
  for (double lambda : {1.0, 2.0, 3.5}) {
    for (int n : {1, 2, 3}) {
      double prev = 0.0;
      for (double tol = 1e-4; tol > 1e-12; tol *= 0.5) {
        const double r = truncation_radius(lambda, n, tol);
        CHECK(truncation_tail(lambda, n, r) <= tol * (1 + 1e-9));
        // Halving tol moves R by (2/lambda)(ln 2 + P ln((1+R')/(1+R))) at most.
        const int pp = n * (n - 1) / 2;
        if (prev > 0.0) {
          CHECK(r - prev <= 2.0 / lambda * (std::log(2.0) + pp * std::log((1 + r) / (1 + prev))) + 1e-9);
          CHECK(r - prev >= 2.0 / lambda * std::log(2.0) - 1e-9);
        }
        CHECK(r >= prev);
        prev = r;
      }
    }
  }
  CHECK(truncation_radius(1.0, 2, 1e-8) > truncation_radius(2.0, 2, 1e-8));
}
