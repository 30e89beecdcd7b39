#include "cmqop/special_fn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cmqop/errors.hpp"

namespace cmqop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Lanczos coefficients for g = 671/128, 14 terms (full double precision on the
// right half plane).
constexpr double kLanczosG = 5.24218750000000000;
constexpr double kLanczosC0 = 0.999999999999997092;
constexpr std::array<double, 14> kLanczos = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};
constexpr double kSqrtTwoPi = 2.5066282746310005;

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx log_gamma_lanczos(cplx z) {
  cplx ser = kLanczosC0;
  cplx y = z;
  for (double c : kLanczos) {
    y += 1.0;
    ser += c / y;
  }
  const cplx tmp = z + kLanczosG;
  return (z + 0.5) * std::log(tmp) - tmp + std::log(kSqrtTwoPi * ser) - std::log(z);
}

// sin(pi z) with the real part reduced exactly modulo 2 first.
cplx sin_pi(cplx z) {
  const double xr = z.real() - 2.0 * std::round(0.5 * z.real());
  return std::sin(kPi * cplx(xr, z.imag()));
}

double distance_to_nonpositive_integer(cplx d) {
  const double nearest = std::min(0.0, std::round(d.real()));
  return std::abs(d - nearest);
}

}  // namespace

GammaProduct GammaProduct::from_log(cplx log_value) {
  return {log_value.real(), std::remainder(log_value.imag(), kTwoPi)};
}

GammaProduct GammaProduct::zero() {
  return {-std::numeric_limits<double>::infinity(), 0.0};
}

bool GammaProduct::is_zero() const {
  return std::isinf(log_modulus) && log_modulus < 0;
}

cplx GammaProduct::value() const {
  if (is_zero()) return {0.0, 0.0};
  return std::polar(std::exp(log_modulus), phase);
}

GammaProduct& GammaProduct::operator*=(const GammaProduct& other) {
  log_modulus += other.log_modulus;
  phase = std::remainder(phase + other.phase, kTwoPi);
  return *this;
}

GammaProduct& GammaProduct::operator/=(const GammaProduct& other) {
  if (other.is_zero()) throw PoleError("division by a vanishing Gamma product");
  log_modulus -= other.log_modulus;
  phase = std::remainder(phase - other.phase, kTwoPi);
  return *this;
}

cplx log_gamma(cplx z) {
  if (is_pole(z)) {
    throw PoleError("log_gamma: pole at z = " + std::to_string(z.real()));
  }
  if (z.real() >= 0.5) return log_gamma_lanczos(z);

  if (std::abs(z.imag()) > 100.0) {
    // sin(pi z) would overflow; shift up with the recurrence instead, which
    // preserves the principal branch.
    const int n = static_cast<int>(std::ceil(0.5 - z.real()));
    cplx acc = log_gamma_lanczos(z + static_cast<double>(n));
    for (int k = 0; k < n; ++k) acc -= std::log(z + static_cast<double>(k));
    return acc;
  }

  // Reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z) + 2 pi i k,
  // where k restores continuity of the principal branch across the cuts of
  // log sin(pi z) at Re z = -1/2 - 2j.
  // On the cuts themselves both k and the sign of the zero imaginary part of
  // sin(pi z) follow the limit from the right (real axis: from above).
  const double sign = z.imag() >= 0.0 ? 1.0 : -1.0;
  const double k = -sign * (std::ceil(0.75 - 0.5 * z.real()) - 1.0);
  cplx s = sin_pi(z);
  if (s.imag() == 0.0) s = {s.real(), sign * 0.0};
  return std::log(kPi) - std::log(s) - log_gamma_lanczos(1.0 - z) + cplx(0.0, kTwoPi * k);
}

GammaProduct reciprocal_gamma(cplx z) {
  if (is_pole(z)) return GammaProduct::zero();
  return GammaProduct::from_log(-log_gamma(z));
}

double cosh_fourier_gamma(double v, double lambda) {
  if (!(lambda > 0.0)) {
    throw DomainError("cosh_fourier_gamma: lambda must be positive");
  }
  const cplx lg = log_gamma(cplx(0.5 * lambda, v));
  // The two Gamma factors are complex conjugates.
  return std::exp(2.0 * lg.real() - log_gamma(cplx(lambda, 0.0)).real());
}

GammaProduct harish_chandra_c_log(std::span<const cplx> v, double lambda,
                                  double regularity) {
  if (!(lambda > 0.0)) {
    throw DomainError("harish_chandra_c: lambda must be positive");
  }
  const std::size_t n = v.size();
  GammaProduct num;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx d = v[i] - v[j];
      if (distance_to_nonpositive_integer(d) < regularity) {
        throw IrregularSpectralParameter(
            "irregular spectral parameter: v_" + std::to_string(i + 1) + " - v_" +
            std::to_string(j + 1) + " is (close to) a non-positive integer");
      }
      num *= GammaProduct::from_log(log_gamma(d));
      num *= reciprocal_gamma(d + lambda);
    }
  }
  GammaProduct den;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = lambda * static_cast<double>(j - i);
      den *= GammaProduct::from_log(log_gamma(cplx(d, 0.0)));
      den /= GammaProduct::from_log(log_gamma(cplx(d + lambda, 0.0)));
    }
  }
  if (num.is_zero()) return num;
  return num / den;
}

cplx harish_chandra_c(std::span<const cplx> v, double lambda, double regularity) {
  return harish_chandra_c_log(v, lambda, regularity).value();
}

SharpWeights sharp_weights(std::span<const double> p, double g, double hbar, double mu,
                           double regularity) {
  if (!(g > 0.0 && hbar > 0.0 && mu > 0.0)) {
    throw DomainError("sharp_weights: g, hbar and mu must be positive");
  }
  const double lambda = g / hbar;
  GammaProduct c_hat;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double d = (p[i] - p[j]) / (hbar * mu);
      if (std::abs(d) < regularity) {
        throw PoleError("sharp_weights: coincident momenta p_" + std::to_string(i + 1) +
                        " and p_" + std::to_string(j + 1));
      }
      c_hat *= GammaProduct::from_log(log_gamma(cplx(0.0, d)));
      c_hat /= GammaProduct::from_log(log_gamma(cplx(lambda, d)));
    }
  }
  // C^(g;-p) is the complex conjugate of C^(g;p), so the weight is 1/|C^|^2.
  return {c_hat, GammaProduct{-2.0 * c_hat.log_modulus, 0.0}};
}

}  // namespace cmqop
