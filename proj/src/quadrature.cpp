#include "cmqop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "cmqop/cm_model.hpp"
#include "cmqop/errors.hpp"

namespace cmqop {

QuadratureRule1D gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  QuadratureRule1D r;
  r.nodes.resize(static_cast<std::size_t>(order));
  r.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int k = 0; k < half; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged node.
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(k);
    const auto hi = static_cast<std::size_t>(order - 1 - k);
    r.nodes[lo] = -x;
    r.nodes[hi] = x;
    r.weights[lo] = w;
    r.weights[hi] = w;
  }
  if (order % 2 == 1) r.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return r;
}

QuadratureRule1D composite_gauss_legendre(double a, double b, int panels, int order) {
  if (!(b > a)) throw std::invalid_argument("composite_gauss_legendre: empty interval");
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: panels must be >= 1");
  const auto base = gauss_legendre(order);
  const double width = (b - a) / panels;
  QuadratureRule1D r;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t k = 0; k < base.nodes.size(); ++k) {
      r.nodes.push_back(mid + 0.5 * width * base.nodes[k]);
      r.weights.push_back(0.5 * width * base.weights[k]);
    }
  }
  return r;
}

double ChamberGrid::boundary_distance(std::size_t k) const {
  double d = std::numeric_limits<double>::infinity();
  for (double x : node(k)) d = std::min({d, x - lo_, hi_ - x});
  return d;
}

void ChamberGrid::write_csv(std::ostream& out) const {
  out << "index";
  for (std::size_t i = 0; i < dim_; ++i) out << ",s" << (i + 1);
  out << ",weight\n";
  out.precision(17);
  for (std::size_t k = 0; k < size(); ++k) {
    out << k;
    for (double x : node(k)) out << ',' << x;
    out << ',' << weights_[k] << '\n';
  }
}

ChamberGrid build_grid(const ChamberPoint& center, double half_width, int panels, int order,
                       double wall_guard) {
  if (!(half_width > 0.0)) throw std::invalid_argument("build_grid: R must be positive");
  if (panels < 1) throw std::invalid_argument("build_grid: panels must be >= 1");
  if (order < 4 || order > 16) throw std::invalid_argument("build_grid: order must be in [4, 16]");
  if (wall_guard < 0.0) throw std::invalid_argument("build_grid: negative wall guard");

  ChamberGrid g;
  g.dim_ = center.size();
  g.center_ = center;
  g.half_width_ = half_width;
  g.panels_ = panels;
  g.order_ = order;
  g.wall_guard_ = wall_guard;
  g.lo_ = center[0] - half_width;
  g.hi_ = center[center.size() - 1] + half_width;
  g.min_gap_ = std::numeric_limits<double>::infinity();

  const auto rule = composite_gauss_legendre(g.lo_, g.hi_, panels, order);
  const std::size_t m = rule.nodes.size();
  const std::size_t n = g.dim_;
  if (n > m) throw DomainError("build_grid: fewer 1-D nodes than particles");

  // Strictly increasing index tuples; equal indices sit on a wall where W = 0.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::vector<double> x(n);
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    const double gap = chamber_gap(x);
    if (n > 1 && gap > -wall_guard) {
      g.dropped_nodes_.insert(g.dropped_nodes_.end(), x.begin(), x.end());
      g.dropped_weights_.push_back(w);
    } else {
      g.nodes_.insert(g.nodes_.end(), x.begin(), x.end());
      g.weights_.push_back(w);
      g.min_gap_ = std::min(g.min_gap_, -gap);
    }
    // Next combination.
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == m - n + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (g.weights_.empty()) throw DomainError("build_grid: no node inside the chamber");
  return g;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  const auto nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::exception_ptr error;
  std::mutex mtx;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < n; k += nt) body(k);
      } catch (...) {
        std::lock_guard lock(mtx);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

cplx pairwise_sum(std::span<const cplx> v) {
  if (v.size() <= 8) {
    cplx s = 0.0;
    for (const cplx& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

GridSamples sample_hypergeom(const ExtendedHypergeom& F, const ChamberGrid& grid, int threads) {
  GridSamples out;
  out.f.resize(grid.size());
  std::vector<int> degrees(grid.size(), 0);
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    const auto s = grid.node(k);
    const auto v = F.evaluate(ChamberPoint(std::vector<double>(s.begin(), s.end()), 0.0));
    out.f[k] = v.value;
    degrees[k] = v.diag.degree_used;
  });
  out.max_degree_used = degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
  return out;
}

IntegralEquationResult integral_equation_residual(double xi, const ExtendedHypergeom& F,
                                                  const ChamberPoint& t, const ChamberGrid& grid,
                                                  const GridSamples& samples, int threads) {
  if (t.size() != grid.dim()) {
    throw std::invalid_argument("integral_equation_residual: rank mismatch");
  }
  if (samples.f.size() != grid.size()) {
    throw std::invalid_argument("integral_equation_residual: samples do not match the grid");
  }
  const double lambda = F.spectral().lambda;
  std::vector<cplx> terms(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    const auto s = grid.node(k);
    const double logmod = log_kernel_K(lambda, t.coords(), s) + log_weight_W(lambda, s);
    double phase = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) phase += t[i] - s[i];
    terms[k] = grid.weight(k) * std::polar(std::exp(logmod), xi * phase) * samples.f[k];
  });

  IntegralEquationResult out;
  out.nodes = grid.size();
  out.lhs = pairwise_sum(terms);
  out.mu = eigenvalue_mu(xi, F.spectral());
  out.f_t = F.evaluate(t).value;
  out.rhs = out.mu * out.f_t;
  out.residual = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  out.max_degree_used = samples.max_degree_used;
  for (std::size_t k = 0; k < grid.dropped_size(); ++k) {
    const auto s = grid.dropped_node(k);
    out.dropped_bound += grid.dropped_weight(k) *
                         std::exp(log_kernel_K(lambda, t.coords(), s) + log_weight_W(lambda, s));
  }
  out.dropped_bound /= std::abs(out.rhs);
  return out;
}

IntegralEquationResult integral_equation_residual(double xi, const ExtendedHypergeom& F,
                                                  const ChamberPoint& t, const ChamberGrid& grid,
                                                  int threads) {
  return integral_equation_residual(xi, F, t, grid, sample_hypergeom(F, grid, threads), threads);
}

double NystromMatrix::hermiticity_defect() const {
  const double scale = entries.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void NystromMatrix::write_csv(std::ostream& out) const {
  out << "row,col,re,im\n";
  out.precision(17);
  for (Eigen::Index j = 0; j < entries.rows(); ++j) {
    for (Eigen::Index k = 0; k < entries.cols(); ++k) {
      out << j << ',' << k << ',' << entries(j, k).real() << ',' << entries(j, k).imag() << '\n';
    }
  }
}

NystromMatrix nystrom_matrix(double xi, double lambda, const ChamberGrid& grid, int threads) {
  const std::size_t m = grid.size();
  if (m == 0) throw std::invalid_argument("nystrom_matrix: empty grid");
  if (m > kMaxNystromNodes) {
    throw std::length_error("nystrom_matrix: " + std::to_string(m) + " nodes exceed the limit of " +
                            std::to_string(kMaxNystromNodes));
  }
  NystromMatrix out;
  out.xi = xi;
  out.lambda = lambda;
  out.grid = &grid;
  out.entries.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<double> sw(m);
  for (std::size_t k = 0; k < m; ++k) sw[k] = std::sqrt(grid.weight(k));
  parallel_for(m, threads, [&](std::size_t j) {
    const auto tj = grid.node(j);
    for (std::size_t k = j; k < m; ++k) {
      out.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          sw[j] * qz_kernel(xi, lambda, tj, grid.node(k)) * sw[k];
    }
  });
  for (std::size_t j = 0; j < m; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out.entries(jj, jj) = out.entries(jj, jj).real();
    for (std::size_t k = j + 1; k < m; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      out.entries(kk, jj) = std::conj(out.entries(jj, kk));
    }
  }
  return out;
}

namespace {

void require_same_grid(const NystromMatrix& a, const NystromMatrix& b) {
  if (a.grid != b.grid || a.entries.rows() != b.entries.rows()) {
    throw std::invalid_argument("commutator_norm: matrices live on different grids");
  }
}

}  // namespace

double commutator_norm(const NystromMatrix& a, const NystromMatrix& b) {
  require_same_grid(a, b);
  const ComplexMatrix c = a.entries * b.entries - b.entries * a.entries;
  const double den = a.entries.norm() * b.entries.norm();
  return den == 0.0 ? 0.0 : c.norm() / den;
}

double commutator_norm_interior(const NystromMatrix& a, const NystromMatrix& b, double margin) {
  require_same_grid(a, b);
  if (a.grid == nullptr) throw std::invalid_argument("commutator_norm_interior: no grid attached");
  std::vector<Eigen::Index> inner;
  for (std::size_t k = 0; k < a.grid->size(); ++k) {
    if (a.grid->boundary_distance(k) >= margin) inner.push_back(static_cast<Eigen::Index>(k));
  }
  if (inner.empty()) throw DomainError("commutator_norm_interior: margin leaves no nodes");
  const auto all = Eigen::all;
  const ComplexMatrix a_rows = a.entries(inner, all), b_rows = b.entries(inner, all);
  const ComplexMatrix a_cols = a.entries(all, inner), b_cols = b.entries(all, inner);
  const ComplexMatrix c = a_rows * b_cols - b_rows * a_cols;
  const double den = ComplexMatrix(a.entries(inner, inner)).norm() *
                     ComplexMatrix(b.entries(inner, inner)).norm();
  return den == 0.0 ? 0.0 : c.norm() / den;
}

}  // namespace cmqop
