#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cmqop/algebra.hpp"
#include "cmqop/special_fn.hpp"

namespace cmqop {

/// Coefficients Delta_chi(xi, lambda) of the Harish-Chandra series
///
///   phi(xi + rho; x) = exp((xi + rho, x)) * sum_chi Delta_chi exp((chi, x)),
///
/// for every chi in the positive root lattice up to `max_degree`. They solve
///
///   ((chi,chi) + 2(chi,xi)) Delta_chi
///       = 2 lambda sum_{alpha > 0} sum_{n >= 1} (alpha, xi + rho + chi - n alpha) Delta_{chi - n alpha},
///
/// obtained by inserting the series into L_2 phi = ((xi,xi) - (rho,rho)) phi
/// with L_2 = Laplacian + lambda sum_{i<j} coth((x_i - x_j)/2)(d_i - d_j) and
/// expanding coth(y/2) = -1 - 2 sum_n e^{n y} for y < 0.
///
/// Entries are stored in graded order; a dense (max_degree+1)^(N-1) index maps
/// weights to positions.
class HCSeriesTable {
 public:
  std::span<const cplx> xi() const { return xi_; }
  double lambda() const { return lambda_; }
  int max_degree() const { return max_degree_; }
  std::size_t rank() const { return xi_.size(); }
  std::size_t size() const { return coeffs_.size(); }
  /// Smallest |(chi,chi) + 2(chi,xi)| met by the recursion (infinity if none).
  double min_denominator() const { return min_denominator_; }

  LatticeWeight weight(std::size_t k) const;
  int degree(std::size_t k) const { return degree_[k]; }
  cplx coefficient(std::size_t k) const { return coeffs_[k]; }
  /// Throws std::out_of_range if chi has degree above max_degree().
  cplx coefficient(const LatticeWeight& chi) const;
  /// max |Delta_chi| over chi of degree >= d.
  double tail_coefficient_bound(int d) const { return suffix_max_[static_cast<std::size_t>(d)]; }

  /// Debug dump: degree, m_1..m_{N-1}, Re, Im.
  void write_csv(std::ostream& out) const;

 private:
  friend HCSeriesTable hc_coefficients(std::span<const cplx>, double, int);
  friend class SeriesAccumulator;

  std::vector<cplx> xi_;
  double lambda_ = 0.0;
  int max_degree_ = 0;
  double min_denominator_ = 0.0;
  std::vector<int> m_flat_;       // size() * (N-1)
  std::vector<int> degree_;       // per entry
  std::vector<cplx> coeffs_;
  std::vector<std::int32_t> dense_;  // (max_degree+1)^(N-1), -1 if degree too high
  std::vector<std::size_t> strides_;
  std::vector<double> suffix_max_;
};

/// Builds the table. Throws ResonantSpectralParameter if a denominator falls
/// below 1e-10 in modulus, and std::length_error if the dense index would be
/// unreasonably large.
HCSeriesTable hc_coefficients(std::span<const cplx> xi, double lambda, int max_degree);

struct EvalDiagnostics {
  int degree_used = 0;
  double last_term_magnitude = 0.0;
  double tail_estimate = 0.0;
  double wall_gap = 0.0;
  /// Shell magnitudes still increasing over the last five degrees.
  bool divergence_alarm = false;
};

struct SeriesValue {
  cplx value;
  EvalDiagnostics diag;
};

/// Evaluates phi(xi + rho; x) truncated at table.max_degree(). Terms whose
/// size is provably below `prune` relative to Delta_0 are skipped.
SeriesValue hc_series_eval(const HCSeriesTable& table, const ChamberPoint& x,
                           double prune = 1e-18);

struct HypergeomOptions {
  /// Relative tolerance on the summed tail estimate.
  double tol = 1e-12;
  /// Largest degree the tables may grow to; <= 0 picks a rank-dependent default.
  int degree_cap = 0;
  /// Force this truncation degree at every point (finite-difference stencils
  /// need one smooth function); <= 0 means adaptive.
  int fixed_degree = 0;
  /// Evaluation refused when m_N(t) > -wall_guard.
  double wall_guard = 0.05;
  double prune = 1e-18;
  double regularity = kDefaultRegularity;
};

int default_degree_cap(std::size_t rank);

/// Extended hypergeometric function of type A_{N-1}
///
///   F_N(u, lambda; t) = sum_{sigma in S_N} c(-i sigma u, lambda) phi(i sigma u + rho, lambda; t)
///
/// evaluated deep enough in the chamber for the Harish-Chandra series to
/// converge. One table per permutation is built once and shared; evaluate()
/// is const and safe to call concurrently.
class ExtendedHypergeom {
 public:
  ExtendedHypergeom(SpectralParameter sp, HypergeomOptions opts = {});

  const SpectralParameter& spectral() const { return sp_; }
  const HypergeomOptions& options() const { return opts_; }
  int table_degree() const { return table_degree_; }

  /// Grows the tables so that points with m_N(t) <= gap converge (not
  /// thread-safe). Returns the resulting table degree.
  int reserve_for_gap(double gap);

  /// F_N(u, lambda; t). Throws DomainError inside the wall guard and
  /// ConvergenceError when the tables are too short for the tolerance.
  SeriesValue evaluate(const ChamberPoint& t) const;
  /// Same, truncated at exactly `degree` (<= table_degree()) at every point.
  SeriesValue evaluate_at_degree(const ChamberPoint& t, int degree) const;
  /// F_N^as(u, lambda; t) = sum_sigma c(-i sigma u) exp((i sigma u + rho, t)).
  cplx dominant(const ChamberPoint& t) const;
  /// F_N - F_N^as computed from the chi != 0 terms directly (no cancellation).
  SeriesValue remainder(const ChamberPoint& t) const;

 private:
  struct Branch {
    std::vector<double> su;  // sigma u
    GammaProduct c;
    HCSeriesTable table;
  };

  SeriesValue sum(const ChamberPoint& t, bool skip_leading, int forced_degree) const;
  int degree_for_gap(double gap) const;

  SpectralParameter sp_;
  HypergeomOptions opts_;
  std::vector<double> rho_;
  std::vector<Branch> branches_;
  int table_degree_ = 0;
};

/// One-shot F_N(u, lambda; t): sizes the tables for t, then evaluates.
SeriesValue extended_hypergeom(const SpectralParameter& sp, const ChamberPoint& t,
                               double tol = 1e-12);

cplx dominant_asymptotics(const SpectralParameter& sp, const ChamberPoint& x);

/// Rank-one radial function f(s) solving
///   f'' + lambda coth(s/2) f' + ((v^2 + lambda^2)/4) f = 0,  f(0) = 1,
/// summed as the power series in z = -sinh^2(s/2) of the equivalent
/// hypergeometric equation, 2F1((lambda+iv)/2, (lambda-iv)/2; lambda+1/2; z).
/// lambda = 1 uses sin(vs/2)/(v sinh(s/2)) for every s; otherwise requires
/// |sinh(s/2)| < 1.
double a1_oracle(double v, double lambda, double s);
/// The series alone, for any lambda (same convergence guard).
double a1_oracle_series(double v, double lambda, double s);

struct L2Residual {
  double residual = 0.0;
  cplx value;       // F_N(t)
  cplx l2_value;    // (L_2 F_N)(t) by central differences
  std::string warning;
};

/// |(L_2 F_N)(t) - (-(u,u) - (rho,rho)) F_N(t)| / |F_N(t)| with second-order
/// central differences of step h on a fixed-degree evaluator.
L2Residual l2_residual(const ExtendedHypergeom& f, const ChamberPoint& t, double h);
L2Residual l2_residual(const SpectralParameter& sp, const ChamberPoint& t, double h);

}  // namespace cmqop
