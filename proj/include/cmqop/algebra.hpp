#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cmqop {

using cplx = std::complex<double>;

/// Minimum coordinate gap accepted by ChamberPoint; closer points count as
/// wall collisions.
inline constexpr double kWallTolerance = 1e-12;

/// A point of the Weyl chamber x_1 < x_2 < ... < x_N.
///
/// Construction sorts the input and records the permutation that was applied:
/// every function of a chamber point used here is symmetric, so unsorted input
/// is accepted rather than rejected.
class ChamberPoint {
 public:
  ChamberPoint() = default;
  explicit ChamberPoint(std::vector<double> coords, double wall_tol = kWallTolerance);

  std::size_t size() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  /// coords()[k] == input[permutation()[k]].
  std::span<const std::size_t> permutation() const { return perm_; }
  /// m_N(x) = max_i (x_i - x_{i+1}); negative inside the chamber.
  double gap() const;

 private:
  std::vector<double> coords_;
  std::vector<std::size_t> perm_;
};

/// Dimensionless momenta u with coupling lambda > 0.
struct SpectralParameter {
  std::vector<double> u;
  double lambda = 1.0;

  SpectralParameter() = default;
  SpectralParameter(std::vector<double> u_, double lambda_);

  std::size_t size() const { return u.size(); }
  /// min_{i<j} |u_i - u_j| (infinity for N = 1).
  double min_separation() const;
  /// Throws IrregularSpectralParameter when min_separation() < threshold.
  void require_regular(double threshold) const;
};

/// chi = sum_i m_i (e_i - e_{i+1}) in the positive root lattice of A_{N-1}.
struct LatticeWeight {
  std::vector<int> m;

  int degree() const;
  std::size_t rank() const { return m.size() + 1; }
  /// Coordinates of chi in R^N (they sum to zero).
  std::vector<double> embed() const;
  friend bool operator==(const LatticeWeight&, const LatticeWeight&) = default;
};

double dot(std::span<const double> a, std::span<const double> b);
cplx dot(std::span<const cplx> a, std::span<const double> b);

/// rho = (lambda/2)(N-1, N-3, ..., 1-N).
std::vector<double> weyl_vector(int n, double lambda);

/// Orthogonal projection onto the hyperplane v_1 + ... + v_N = 0.
std::vector<double> project_cms(std::span<const double> v);

/// m_N(x) = max_i (x_i - x_{i+1}); -infinity for N = 1.
double chamber_gap(std::span<const double> x);

/// r-th elementary symmetric function S_r(p), 0 <= r <= N.
double elementary_symmetric(int r, std::span<const double> p);

/// E(gamma; p) = prod_i (gamma + p_i).
cplx generating_E(cplx gamma, std::span<const double> p);

/// Every chi with degree <= max_degree, graded lexicographic order (degree
/// ascending, then m descending lexicographically).
std::vector<LatticeWeight> enumerate_weights(int n, int max_degree);

/// All permutations of {0..n-1} in lexicographic order (identity first).
std::vector<std::vector<std::size_t>> all_permutations(std::size_t n);

}  // namespace cmqop
