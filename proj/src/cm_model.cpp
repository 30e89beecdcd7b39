#include "cmqop/cm_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmqop/errors.hpp"

namespace cmqop {

void PhysicalParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(hbar)) throw DomainError("PhysicalParams: hbar must be positive");
  if (!ok(mu)) throw DomainError("PhysicalParams: mu must be positive");
  if (!ok(g)) throw DomainError("PhysicalParams: g must be positive");
}

double potential_u(double x, const PhysicalParams& params) {
  if (x == 0.0) throw PoleError("potential_u: pole at x = 0");
  const double sh = std::sinh(0.5 * params.mu * x);
  return 2.0 * params.g * (params.g - params.hbar) * params.mu * params.mu / (4.0 * sh * sh);
}

double potential_U(std::span<const double> x, const PhysicalParams& params) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) s += potential_u(x[i] - x[j], params);
  }
  return s;
}

double log_weight_W(double lambda, std::span<const double> s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double sh = 2.0 * std::sinh(0.5 * std::abs(s[i] - s[j]));
      if (sh == 0.0) return -std::numeric_limits<double>::infinity();
      acc += 2.0 * std::log(sh);
    }
  }
  return lambda * acc;
}

double weight_W(double lambda, std::span<const double> s) {
  return std::exp(log_weight_W(lambda, s));
}

double weight_W_physical(const PhysicalParams& params, std::span<const double> x) {
  std::vector<double> t(x.begin(), x.end());
  for (double& v : t) v *= params.mu;
  return weight_W(params.lambda(), t);
}

namespace {

// log(2 cosh(w/2)) without overflow for large |w|.
double log_2cosh_half(double w) {
  const double a = 0.5 * std::abs(w);
  return a + std::log1p(std::exp(-2.0 * a));
}

}  // namespace

double log_kernel_K(double lambda, std::span<const double> t, std::span<const double> s) {
  double acc = 0.0;
  for (double ti : t) {
    for (double sj : s) acc += log_2cosh_half(ti - sj);
  }
  return -lambda * acc;
}

double kernel_K(double lambda, std::span<const double> t, std::span<const double> s) {
  return std::exp(log_kernel_K(lambda, t, s));
}

cplx qz_kernel(double xi, double lambda, std::span<const double> t, std::span<const double> s) {
  if (t.size() != s.size()) throw std::invalid_argument("qz_kernel: size mismatch");
  const double logmod =
      0.5 * log_weight_W(lambda, t) + 0.5 * log_weight_W(lambda, s) + log_kernel_K(lambda, t, s);
  if (logmod == -std::numeric_limits<double>::infinity()) return 0.0;
  double phase = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) phase += t[i] - s[i];
  return std::polar(std::exp(logmod), xi * phase);
}

cplx qz_kernel_physical(double z, const PhysicalParams& params, std::span<const double> x,
                        std::span<const double> y) {
  std::vector<double> t(x.begin(), x.end()), s(y.begin(), y.end());
  for (double& v : t) v *= params.mu;
  for (double& v : s) v *= params.mu;
  return qz_kernel(z / (params.hbar * params.mu), params.lambda(), t, s);
}

cplx integrand_I(double xi, const ExtendedHypergeom& F, std::span<const double> t,
                 const ChamberPoint& s) {
  const double lambda = F.spectral().lambda;
  const auto sc = s.coords();
  const double logmod = log_kernel_K(lambda, t, sc) + log_weight_W(lambda, sc);
  double phase = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) phase += t[i] - sc[i];
  return std::polar(std::exp(logmod), xi * phase) * F.evaluate(s).value;
}

cplx psi_eval(std::span<const double> p, const PhysicalParams& params,
              std::span<const double> x, double tol) {
  params.validate();
  if (p.size() != x.size()) throw std::invalid_argument("psi_eval: size mismatch");
  std::vector<double> u(p.begin(), p.end()), t(x.begin(), x.end());
  for (double& v : u) v /= params.hbar * params.mu;
  for (double& v : t) v *= params.mu;
  const ChamberPoint pt(std::move(t));
  const SpectralParameter sp(std::move(u), params.lambda());
  const cplx f = extended_hypergeom(sp, pt, tol).value;
  return std::sqrt(weight_W(params.lambda(), pt.coords())) * f;
}

GammaProduct eigenvalue_mu_log(cplx xi, const SpectralParameter& sp) {
  const double half = 0.5 * sp.lambda;
  const cplx lg_lambda = log_gamma(sp.lambda);
  GammaProduct acc;
  const cplx i(0.0, 1.0);
  for (double ui : sp.u) {
    const cplx a = i * (ui - xi);
    acc *= GammaProduct::from_log(log_gamma(half + a) + log_gamma(half - a) - lg_lambda);
  }
  return acc;
}

double eigenvalue_mu(double xi, const SpectralParameter& sp) {
  // Conjugate Gamma pairs: the product is real and positive.
  return std::exp(eigenvalue_mu_log(xi, sp).log_modulus);
}

double phi_z(double z, std::span<const double> p, const PhysicalParams& params) {
  params.validate();
  std::vector<double> u(p.begin(), p.end());
  for (double& v : u) v /= params.hbar * params.mu;
  const SpectralParameter sp(std::move(u), params.lambda());
  const double n = static_cast<double>(p.size());
  return std::exp(eigenvalue_mu_log(z / (params.hbar * params.mu), sp).log_modulus -
                  n * std::log(params.mu));
}

double difference_eq_residual(double xi, const SpectralParameter& sp) {
  const cplx i(0.0, 1.0);
  const double n = static_cast<double>(sp.size());
  const cplx e_left = generating_E(i * (1.0 - 0.5 * sp.lambda) - xi, sp.u);
  const cplx e_right = generating_E(i * 0.5 * sp.lambda - xi, sp.u);
  if (e_left == 0.0 && e_right == 0.0) return 0.0;
  const GammaProduct mu_shift = eigenvalue_mu_log(xi - i, sp);
  const GammaProduct mu_here = eigenvalue_mu_log(xi, sp);
  // Divide out the common size so that neither side overflows.
  const double scale = std::max(mu_shift.log_modulus, mu_here.log_modulus);
  const cplx left = e_left * std::polar(std::exp(mu_shift.log_modulus - scale), mu_shift.phase);
  const cplx right = std::pow(-1.0, n) * e_right *
                     std::polar(std::exp(mu_here.log_modulus - scale), mu_here.phase);
  const double den = std::abs(left) + std::abs(right);
  return den == 0.0 ? 0.0 : std::abs(left - right) / den;
}

namespace {

cplx d1(const Field& f, std::span<const double> x, std::size_t i, const FdOptions& fd) {
  return fd_derivative(f, x, i, 1, fd);
}

cplx d11(const Field& f, std::span<const double> x, std::size_t i, std::size_t j,
         const FdOptions& fd) {
  std::vector<int> orders(x.size(), 0);
  orders[i] = 1;
  orders[j] = 1;
  return fd_partial(f, x, orders, fd);
}

cplx d111(const Field& f, std::span<const double> x, const FdOptions& fd) {
  std::vector<int> orders(x.size(), 1);
  return fd_partial(f, x, orders, fd);
}

}  // namespace

cplx apply_Hr(int r, const Field& f, std::span<const double> x, const PhysicalParams& params,
              const HrOptions& opts) {
  const std::size_t n = x.size();
  const cplx i(0.0, 1.0);
  const double hb = params.hbar;
  const auto& fd = opts.fd;
  switch (r) {
    case 1: {
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += d1(f, x, k, fd);
      return -i * hb * s;
    }
    case 2: {
      if (n < 2) throw std::invalid_argument("apply_Hr: H_2 needs N >= 2");
      cplx s = 0.0;
      const cplx f0 = f(x);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          s += -hb * hb * d11(f, x, a, b, fd) - 0.5 * potential_u(x[a] - x[b], params) * f0;
        }
      }
      return s;
    }
    case 3: {
      if (!opts.allow_r3 || n != 3) {
        throw std::invalid_argument("apply_Hr: r = 3 is only available for N = 3 with allow_r3");
      }
      // p1 p2 p3 = (-i hbar)^3 d1 d2 d3 = i hbar^3 d1 d2 d3.
      cplx s = i * hb * hb * hb * d111(f, x, fd);
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t a = (k + 1) % 3, b = (k + 2) % 3;
        s -= 0.5 * potential_u(x[a] - x[b], params) * (-i * hb * d1(f, x, k, fd));
      }
      return s;
    }
    default:
      throw std::invalid_argument("apply_Hr: r = " + std::to_string(r) + " is not supported");
  }
}

cplx apply_schroedinger(const Field& f, std::span<const double> x, const PhysicalParams& params,
                        const FdOptions& fd) {
  cplx lap = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) lap += fd_derivative(f, x, k, 2, fd);
  return -params.hbar * params.hbar * lap + potential_U(x, params) * f(x);
}

double kernel_identity_residual(int r, double xi, double lambda, std::span<const double> t,
                                std::span<const double> s, const FdOptions& fd) {
  if (r != 1 && r != 2) {
    throw std::invalid_argument("kernel_identity_residual: r must be 1 or 2");
  }
  const std::size_t n = t.size();
  if (s.size() != n) throw std::invalid_argument("kernel_identity_residual: size mismatch");
  std::vector<double> z(t.begin(), t.end());
  z.insert(z.end(), s.begin(), s.end());
  const Field q = [&](std::span<const double> w) {
    return qz_kernel(xi, lambda, w.subspan(0, n), w.subspan(n, n));
  };
  const PhysicalParams unit{1.0, 1.0, lambda};
  const cplx i(0.0, 1.0);
  cplx a = 0.0, b = 0.0;
  if (r == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      a += -i * d1(q, z, k, fd);
      b += i * d1(q, z, n + k, fd);
    }
  } else {
    const cplx q0 = q(z);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k + 1; l < n; ++l) {
        a += -d11(q, z, k, l, fd) - 0.5 * potential_u(t[k] - t[l], unit) * q0;
        b += -d11(q, z, n + k, n + l, fd) - 0.5 * potential_u(s[k] - s[l], unit) * q0;
      }
    }
  }
  const double den = std::abs(a) + std::abs(b);
  return den == 0.0 ? 0.0 : std::abs(a - b) / den;
}

namespace {

// log sum_{k=0}^{P} x^k / k!
double log_exp_partial(double x, int p) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= p; ++k) {
    term *= x / k;
    sum += term;
  }
  return std::log(sum);
}

}  // namespace

double truncation_tail(double lambda, int n, double radius) {
  if (!(lambda > 0.0)) throw DomainError("truncation_tail: lambda must be positive");
  if (n < 1) throw std::invalid_argument("truncation_tail: N must be >= 1");
  const double a = 0.5 * lambda;
  const int p = n * (n - 1) / 2;
  const double r = std::max(radius, 0.0);
  // int_R^inf e^{-a w}(1+w)^P dw = P! e^{-a R} a^{-P-1} sum_k (a(1+R))^k / k!
  return std::exp(std::log(2.0 * n) - a * r + log_exp_partial(a * (1.0 + r), p) -
                  log_exp_partial(a, p));
}

double truncation_radius(double lambda, int n, double tol) {
  if (!(tol > 0.0)) throw DomainError("truncation_radius: tol must be positive");
  if (truncation_tail(lambda, n, 0.0) <= tol) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (truncation_tail(lambda, n, hi) > tol) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (truncation_tail(lambda, n, mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace cmqop
