#pragma once

#include <complex>
#include <span>

namespace cmqop {

using cplx = std::complex<double>;

/// A product of Gamma values held as log-modulus and phase, so that long
/// products (N! terms, N(N-1)/2 factors) never overflow before the end.
struct GammaProduct {
  double log_modulus = 0.0;
  double phase = 0.0;

  static GammaProduct from_log(cplx log_value);
  /// Exactly zero product (a 1/Gamma factor hit a pole).
  static GammaProduct zero();

  bool is_zero() const;
  cplx value() const;
  cplx log() const { return {log_modulus, phase}; }

  GammaProduct& operator*=(const GammaProduct& other);
  GammaProduct& operator/=(const GammaProduct& other);
  friend GammaProduct operator*(GammaProduct a, const GammaProduct& b) { return a *= b; }
  friend GammaProduct operator/(GammaProduct a, const GammaProduct& b) { return a /= b; }
};

/// Principal branch of log Gamma(z), continuous on C minus (-inf, 0].
/// Lanczos approximation for Re z >= 0.5, reflection otherwise. Points on the
/// negative real axis take the limit from the upper half plane.
/// Throws PoleError at z = 0, -1, -2, ...
cplx log_gamma(cplx z);

/// 1/Gamma(z) in log-polar form; an exact zero product at the poles of Gamma.
GammaProduct reciprocal_gamma(cplx z);

/// Gamma(l/2 + iv) Gamma(l/2 - iv) / Gamma(l), the Fourier transform of
/// [2 cosh(w/2)]^(-l). Requires lambda > 0.
double cosh_fourier_gamma(double v, double lambda);

/// Default minimum separation |v_i - v_j| (and distance of v_i - v_j from the
/// non-positive integers) accepted by the c-function.
inline constexpr double kDefaultRegularity = 1e-8;

/// Normalised Harish-Chandra c-function c(v) = c~(v)/c~(rho) with
/// c~(v) = prod_{i<j} Gamma(v_i - v_j) / Gamma(v_i - v_j + lambda).
/// Throws IrregularSpectralParameter if some v_i - v_j is within `regularity`
/// of a non-positive integer.
GammaProduct harish_chandra_c_log(std::span<const cplx> v, double lambda,
                                  double regularity = kDefaultRegularity);
cplx harish_chandra_c(std::span<const cplx> v, double lambda,
                      double regularity = kDefaultRegularity);

/// Renormalisation factors for the joint eigenfunctions:
/// C^(g;p) = prod_{i<j} Gamma(i(p_i - p_j)/(hbar mu)) / Gamma(g/hbar + i(p_i - p_j)/(hbar mu))
/// and W^ = 1/|C^|^2 (real and positive for real distinct p).
struct SharpWeights {
  GammaProduct c_hat;
  GammaProduct w_hat;
};
SharpWeights sharp_weights(std::span<const double> p, double g, double hbar = 1.0,
                           double mu = 1.0, double regularity = kDefaultRegularity);

}  // namespace cmqop
