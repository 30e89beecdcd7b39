#pragma once

#include <complex>
#include <span>

#include "cmqop/algebra.hpp"
#include "cmqop/finite_diff.hpp"
#include "cmqop/hypergeom.hpp"
#include "cmqop/special_fn.hpp"

namespace cmqop {

/// hbar, mu, g > 0. The dimensionless coupling is lambda = g / hbar.
struct PhysicalParams {
  double hbar = 1.0;
  double mu = 1.0;
  double g = 1.0;

  double lambda() const { return g / hbar; }
  /// Throws DomainError unless all three are positive and finite.
  void validate() const;
};

/// u(x) = 2 g (g - hbar) mu^2 / (4 sinh^2(mu x / 2)). Throws PoleError at x = 0.
double potential_u(double x, const PhysicalParams& params);
/// U(x) = sum_{i<j} u(x_i - x_j).
double potential_U(std::span<const double> x, const PhysicalParams& params);

/// log W_N(lambda; s) = lambda sum_{i<j} log(4 sinh^2((s_i - s_j)/2)); -inf on walls.
double log_weight_W(double lambda, std::span<const double> s);
double weight_W(double lambda, std::span<const double> s);
/// Physical weight W_N(g; x) = W_N(g/hbar; mu x).
double weight_W_physical(const PhysicalParams& params, std::span<const double> x);

/// log K_N(lambda; t, s) = -lambda sum_{i,j} log(2 cosh((t_i - s_j)/2)).
double log_kernel_K(double lambda, std::span<const double> t, std::span<const double> s);
double kernel_K(double lambda, std::span<const double> t, std::span<const double> s);

/// Dimensionless Q-kernel exp(i xi sum(t - s)) W^{1/2}(t) W^{1/2}(s) K_N(t, s).
/// Assembled in log-polar form; Hermitian in (t, s) up to rounding.
cplx qz_kernel(double xi, double lambda, std::span<const double> t, std::span<const double> s);
/// Physical Q_z(g; x, y) with xi = z / (hbar mu) and t = mu x, s = mu y.
cplx qz_kernel_physical(double z, const PhysicalParams& params, std::span<const double> x,
                        std::span<const double> y);

/// I_xi(u, lambda; t, s) = exp(i xi sum(t - s)) K_N(t, s) F_N(u, lambda; s) W_N(lambda; s).
/// F supplies u and lambda; errors from F.evaluate propagate.
cplx integrand_I(double xi, const ExtendedHypergeom& F, std::span<const double> t,
                 const ChamberPoint& s);

/// Psi_N(p, g; x) = W_N(g; x)^{1/2} F_N(p / (hbar mu), g / hbar; mu x).
/// The point is sorted into the chamber first; Psi is symmetric.
cplx psi_eval(std::span<const double> p, const PhysicalParams& params,
              std::span<const double> x, double tol = 1e-12);

/// mu_xi(u, lambda) = prod_i Gamma(lambda/2 + i(u_i - xi)) Gamma(lambda/2 - i(u_i - xi)) / Gamma(lambda).
/// Complex xi is allowed (the difference equation shifts xi by -i); PoleError
/// if a Gamma argument is a pole.
GammaProduct eigenvalue_mu_log(cplx xi, const SpectralParameter& sp);
double eigenvalue_mu(double xi, const SpectralParameter& sp);
/// phi_z(p, g) = mu^{-N} mu_{z/(hbar mu)}(p/(hbar mu), g/hbar).
double phi_z(double z, std::span<const double> p, const PhysicalParams& params);

/// Relative mismatch |L - R| / (|L| + |R|) of
///   E(i(1 - lambda/2) - xi; u) mu_{xi - i}(u) = (-1)^N E(i lambda/2 - xi; u) mu_xi(u).
double difference_eq_residual(double xi, const SpectralParameter& sp);

struct HrOptions {
  FdOptions fd{};
  /// H_3 for N = 3 uses the same calibrated potential insertion as H_2
  /// (p1 p2 p3 - 1/2 sum u(x_i - x_j) p_k); it must be requested explicitly.
  bool allow_r3 = false;
};

/// (H_r f)(x) with p_i = -i hbar d_i by central differences:
///   H_1 = sum_i p_i,  H_2 = sum_{i<j} (p_i p_j - u(x_i - x_j)/2).
/// Throws std::invalid_argument for unsupported r.
cplx apply_Hr(int r, const Field& f, std::span<const double> x, const PhysicalParams& params,
              const HrOptions& opts = {});

/// Direct -hbar^2 Laplacian f + U f, independent of apply_Hr.
cplx apply_schroedinger(const Field& f, std::span<const double> x, const PhysicalParams& params,
                        const FdOptions& fd = {});

/// |A - B| / (|A| + |B|) with A = H_r(x) Q and B = H_r(-y) Q for the
/// dimensionless kernel Q = qz_kernel(xi, lambda, t, s); H_r(-y) flips the sign
/// of every momentum in the second slot.
double kernel_identity_residual(int r, double xi, double lambda, std::span<const double> t,
                                std::span<const double> s, const FdOptions& fd = {1e-3, true});

/// Relative tail of the integrand bound exp(-lambda |w| / 2) (1 + |w|)^P,
/// P = N(N-1)/2, summed over the 2N coordinate directions leaving a box of
/// half-width R:
///   T(R) = 2N int_R^inf e^{-lambda w/2} (1+w)^P dw / int_0^inf e^{-lambda w/2} (1+w)^P dw,
/// in closed form through the finite incomplete-Gamma sum.
double truncation_tail(double lambda, int n, double radius);
/// Smallest R with truncation_tail(lambda, n, R) <= tol.
double truncation_radius(double lambda, int n, double tol);

}  // namespace cmqop
