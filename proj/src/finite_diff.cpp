#include "cmqop/finite_diff.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cmqop {

namespace {

struct Stencil {
  std::vector<std::pair<int, double>> taps;  // (offset in units of h, weight)
  int order;
};

const Stencil& stencil(int order) {
  static const Stencil kStencils[] = {
      {{{0, 1.0}}, 0},
      {{{-1, -0.5}, {1, 0.5}}, 1},
      {{{-1, 1.0}, {0, -2.0}, {1, 1.0}}, 2},
      {{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}, 3},
  };
  if (order < 0 || order > 3) throw std::invalid_argument("fd_partial: order must be 0..3");
  return kStencils[order];
}

cplx plain(const Field& f, std::span<const double> x, std::span<const int> orders, double h) {
  std::vector<std::size_t> active;
  int total_order = 0;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k] != 0) {
      active.push_back(k);
      total_order += orders[k];
    }
  }
  std::vector<double> y(x.begin(), x.end());
  cplx acc = 0.0;
  // Odometer over the taps of every active coordinate.
  std::vector<std::size_t> pos(active.size(), 0);
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& [off, wt] = stencil(orders[active[a]]).taps[pos[a]];
      y[active[a]] = x[active[a]] + off * h;
      w *= wt;
    }
    acc += w * f(y);
    std::size_t a = 0;
    for (; a < active.size(); ++a) {
      if (++pos[a] < stencil(orders[active[a]]).taps.size()) break;
      pos[a] = 0;
    }
    if (a == active.size()) break;
  }
  return acc / std::pow(h, total_order);
}

}  // namespace

cplx fd_partial(const Field& f, std::span<const double> x, std::span<const int> orders,
                const FdOptions& opts) {
  if (orders.size() != x.size()) throw std::invalid_argument("fd_partial: size mismatch");
  if (!opts.richardson) return plain(f, x, orders, opts.h);
  const cplx coarse = plain(f, x, orders, opts.h);
  const cplx fine = plain(f, x, orders, 0.5 * opts.h);
  return (4.0 * fine - coarse) / 3.0;
}

cplx fd_derivative(const Field& f, std::span<const double> x, std::size_t k, int order,
                   const FdOptions& opts) {
  std::vector<int> orders(x.size(), 0);
  orders.at(k) = order;
  return fd_partial(f, x, orders, opts);
}

}  // namespace cmqop
