#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cmqop/algebra.hpp"
#include "cmqop/hypergeom.hpp"

namespace cmqop {

/// Nodes and weights on [a, b].
struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule1D gauss_legendre(int order);
/// `panels` equal panels on [a, b], each with an order-point Gauss-Legendre rule.
QuadratureRule1D composite_gauss_legendre(double a, double b, int panels, int order);

/// Tensor-product composite Gauss-Legendre nodes inside the Weyl chamber.
///
/// Every axis uses the same 1-D rule on [min(center) - R, max(center) + R].
/// Keeping the strictly increasing tuples integrates a symmetric function that
/// vanishes on the walls exactly as 1/N! of the full tensor rule would.
class ChamberGrid {
 public:
  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> node(std::size_t k) const {
    return {nodes_.data() + k * dim_, dim_};
  }
  double weight(std::size_t k) const { return weights_[k]; }
  std::span<const double> weights() const { return weights_; }

  const ChamberPoint& center() const { return center_; }
  double half_width() const { return half_width_; }
  int panels() const { return panels_; }
  int order() const { return order_; }
  double wall_guard() const { return wall_guard_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  /// Smallest |m_N| over the retained nodes.
  double min_gap() const { return min_gap_; }

  /// Off-wall nodes inside the guard band, kept aside for the error budget.
  std::size_t dropped_size() const { return dropped_weights_.size(); }
  std::span<const double> dropped_node(std::size_t k) const {
    return {dropped_nodes_.data() + k * dim_, dim_};
  }
  double dropped_weight(std::size_t k) const { return dropped_weights_[k]; }

  /// Distance of node k to the box boundary (infinity norm).
  double boundary_distance(std::size_t k) const;

  /// index, s_1..s_N, weight
  void write_csv(std::ostream& out) const;

 private:
  friend ChamberGrid build_grid(const ChamberPoint&, double, int, int, double);

  std::size_t dim_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> dropped_nodes_;
  std::vector<double> dropped_weights_;
  ChamberPoint center_;
  double half_width_ = 0.0;
  int panels_ = 0;
  int order_ = 0;
  double wall_guard_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  double min_gap_ = 0.0;
};

/// Throws std::invalid_argument for R <= 0, panels < 1 or order outside
/// [4, 16]; DomainError if no node survives the chamber filter.
ChamberGrid build_grid(const ChamberPoint& center, double half_width, int panels, int order,
                       double wall_guard = 0.05);

/// Runs body(k) for k in [0, n) on up to `threads` threads (<= 1: inline).
/// Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation; the order depends only on the input length.
cplx pairwise_sum(std::span<const cplx> v);

struct IntegralEquationResult {
  double residual = 0.0;
  cplx lhs;
  cplx rhs;
  double mu = 0.0;
  cplx f_t;
  /// sum of w K W over the dropped guard-band nodes, relative to |rhs|
  /// (uses |F_N| <= 1 for real u).
  double dropped_bound = 0.0;
  std::size_t nodes = 0;
  int max_degree_used = 0;
};

/// F_N at every grid node. Independent of t and xi, so one sample set serves
/// a whole sweep.
struct GridSamples {
  std::vector<cplx> f;
  int max_degree_used = 0;
};

/// F must have tables large enough for grid.min_gap() (call
/// F.reserve_for_gap first); evaluator errors propagate.
GridSamples sample_hypergeom(const ExtendedHypergeom& F, const ChamberGrid& grid, int threads = 1);

/// lhs = sum_k w_k I_xi(u, lambda; t, s_k) over the grid; rhs = mu_xi(u, lambda) F_N(u, lambda; t).
IntegralEquationResult integral_equation_residual(double xi, const ExtendedHypergeom& F,
                                                  const ChamberPoint& t, const ChamberGrid& grid,
                                                  const GridSamples& samples, int threads = 1);
IntegralEquationResult integral_equation_residual(double xi, const ExtendedHypergeom& F,
                                                  const ChamberPoint& t, const ChamberGrid& grid,
                                                  int threads = 1);

using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr std::size_t kMaxNystromNodes = 6000;

/// M[j, k] = sqrt(w_j) Q_xi(t_j, t_k) sqrt(w_k). The upper triangle is
/// computed and mirrored, so the matrix is Hermitian bit for bit.
struct NystromMatrix {
  ComplexMatrix entries;
  double xi = 0.0;
  double lambda = 0.0;
  const ChamberGrid* grid = nullptr;

  double hermiticity_defect() const;
  /// row, col, re, im
  void write_csv(std::ostream& out) const;
};

/// Throws std::length_error above kMaxNystromNodes nodes.
NystromMatrix nystrom_matrix(double xi, double lambda, const ChamberGrid& grid, int threads = 1);

/// ||AB - BA||_F / (||A||_F ||B||_F). Throws std::invalid_argument if the
/// matrices were built on different grids.
double commutator_norm(const NystromMatrix& a, const NystromMatrix& b);

/// The same ratio restricted to rows and columns of nodes at least `margin`
/// from the box boundary; the inner products still run over the whole grid.
/// Truncating the chamber to a box breaks commutation only near the box edge,
/// and this restriction measures the discretisation error away from it.
double commutator_norm_interior(const NystromMatrix& a, const NystromMatrix& b, double margin);

}  // namespace cmqop
