#pragma once

#include <complex>
#include <functional>
#include <span>

namespace cmqop {

using cplx = std::complex<double>;

/// Scalar field on R^n.
using Field = std::function<cplx(std::span<const double>)>;

struct FdOptions {
  double h = 1e-3;
  /// Combine steps h and h/2 as (4 D(h/2) - D(h)) / 3. Every stencil below is
  /// central, so this cancels the h^2 term.
  bool richardson = false;
};

/// Mixed partial derivative of f at x; orders[k] in {0, 1, 2, 3} is the order
/// in coordinate k. Central stencils, tensor product across coordinates.
cplx fd_partial(const Field& f, std::span<const double> x, std::span<const int> orders,
                const FdOptions& opts);

/// Convenience for a single coordinate.
cplx fd_derivative(const Field& f, std::span<const double> x, std::size_t k, int order,
                   const FdOptions& opts);

}  // namespace cmqop
