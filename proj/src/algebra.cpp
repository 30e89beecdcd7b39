#include "cmqop/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cmqop/errors.hpp"

namespace cmqop {

ChamberPoint::ChamberPoint(std::vector<double> coords, double wall_tol) {
  if (coords.empty()) throw DomainError("ChamberPoint: empty coordinate vector");
  perm_.resize(coords.size());
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  std::stable_sort(perm_.begin(), perm_.end(),
                   [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });
  coords_.resize(coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (!std::isfinite(coords[perm_[k]])) {
      throw DomainError("ChamberPoint: non-finite coordinate");
    }
    coords_[k] = coords[perm_[k]];
  }
  for (std::size_t k = 0; k + 1 < coords_.size(); ++k) {
    if (coords_[k + 1] - coords_[k] < wall_tol) {
      throw DomainError("ChamberPoint: coordinates " + std::to_string(k + 1) + " and " +
                        std::to_string(k + 2) + " collide (wall)");
    }
  }
}

double ChamberPoint::gap() const { return chamber_gap(coords_); }

SpectralParameter::SpectralParameter(std::vector<double> u_, double lambda_)
    : u(std::move(u_)), lambda(lambda_) {
  if (u.empty()) throw DomainError("SpectralParameter: empty momentum vector");
  if (!(lambda > 0.0)) throw DomainError("SpectralParameter: lambda must be positive");
}

double SpectralParameter::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      best = std::min(best, std::abs(u[i] - u[j]));
    }
  }
  return best;
}

void SpectralParameter::require_regular(double threshold) const {
  if (min_separation() < threshold) {
    throw IrregularSpectralParameter("irregular spectral parameter: min |u_i - u_j| = " +
                                     std::to_string(min_separation()));
  }
}

int LatticeWeight::degree() const { return std::accumulate(m.begin(), m.end(), 0); }

std::vector<double> LatticeWeight::embed() const {
  const std::size_t n = m.size() + 1;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i] += m[i];
    out[i + 1] -= m[i];
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

cplx dot(std::span<const cplx> a, std::span<const double> b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> weyl_vector(int n, double lambda) {
  if (n < 1) throw std::invalid_argument("weyl_vector: N must be >= 1");
  std::vector<double> rho(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) rho[i - 1] = 0.5 * lambda * (n + 1 - 2 * i);
  return rho;
}

std::vector<double> project_cms(std::span<const double> v) {
  const double mean =
      v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x -= mean;
  return out;
}

double chamber_gap(std::span<const double> x) {
  if (x.size() < 2) return -std::numeric_limits<double>::infinity();
  double best = x[0] - x[1];
  for (std::size_t i = 1; i + 1 < x.size(); ++i) best = std::max(best, x[i] - x[i + 1]);
  return best;
}

double elementary_symmetric(int r, std::span<const double> p) {
  const int n = static_cast<int>(p.size());
  if (r < 0 || r > n) {
    throw std::out_of_range("elementary_symmetric: r = " + std::to_string(r) +
                            " outside [0, " + std::to_string(n) + "]");
  }
  // e[k] after processing a prefix holds S_k of that prefix.
  std::vector<double> e(static_cast<std::size_t>(r) + 1, 0.0);
  e[0] = 1.0;
  for (double pi : p) {
    for (int k = r; k >= 1; --k) e[k] += pi * e[k - 1];
  }
  return e[r];
}

cplx generating_E(cplx gamma, std::span<const double> p) {
  cplx prod = 1.0;
  for (double pi : p) prod *= gamma + pi;
  return prod;
}

namespace {

// Compositions of `remaining` into the slots [pos, m.size()), first slot largest
// first, which yields descending lexicographic order.
void compositions(std::vector<int>& m, std::size_t pos, int remaining,
                  std::vector<LatticeWeight>& out) {
  if (pos + 1 == m.size()) {
    m[pos] = remaining;
    out.push_back({m});
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    m[pos] = k;
    compositions(m, pos + 1, remaining - k, out);
  }
}

}  // namespace

std::vector<LatticeWeight> enumerate_weights(int n, int max_degree) {
  if (n < 1) throw std::invalid_argument("enumerate_weights: N must be >= 1");
  if (max_degree < 0) throw std::invalid_argument("enumerate_weights: negative degree");
  std::vector<LatticeWeight> out;
  if (n == 1) {
    out.push_back({});
    return out;
  }
  std::vector<int> m(static_cast<std::size_t>(n - 1), 0);
  for (int d = 0; d <= max_degree; ++d) compositions(m, 0, d, out);
  return out;
}

std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace cmqop
