#include "cmqop/hypergeom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cmqop/errors.hpp"
#include "cmqop/finite_diff.hpp"

namespace cmqop {

namespace {

constexpr double kResonanceThreshold = 1e-10;
constexpr std::size_t kMaxDenseEntries = 50'000'000;
constexpr double kZeroFloor = 1e-4;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<double> embed(std::span<const int> m) {
  std::vector<double> c(m.size() + 1, 0.0);
  for (std::size_t k = 0; k < m.size(); ++k) {
    c[k] += m[k];
    c[k + 1] -= m[k];
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// HCSeriesTable

LatticeWeight HCSeriesTable::weight(std::size_t k) const {
  const std::size_t r = rank() - 1;
  LatticeWeight w;
  w.m.assign(m_flat_.begin() + static_cast<std::ptrdiff_t>(k * r),
             m_flat_.begin() + static_cast<std::ptrdiff_t>((k + 1) * r));
  return w;
}

cplx HCSeriesTable::coefficient(const LatticeWeight& chi) const {
  if (chi.m.size() + 1 != rank()) throw std::invalid_argument("coefficient: rank mismatch");
  if (chi.degree() > max_degree_) throw std::out_of_range("coefficient: degree above table");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < chi.m.size(); ++k) {
    if (chi.m[k] < 0) throw std::out_of_range("coefficient: negative coefficient");
    idx += static_cast<std::size_t>(chi.m[k]) * strides_[k];
  }
  return coeffs_[static_cast<std::size_t>(dense_[idx])];
}

void HCSeriesTable::write_csv(std::ostream& out) const {
  const std::size_t r = rank() - 1;
  out << "degree";
  for (std::size_t k = 0; k < r; ++k) out << ",m" << (k + 1);
  out << ",re,im\n";
  out.precision(17);
  for (std::size_t e = 0; e < size(); ++e) {
    out << degree_[e];
    for (std::size_t k = 0; k < r; ++k) out << ',' << m_flat_[e * r + k];
    out << ',' << coeffs_[e].real() << ',' << coeffs_[e].imag() << '\n';
  }
}

HCSeriesTable hc_coefficients(std::span<const cplx> xi, double lambda, int max_degree) {
  if (xi.empty()) throw std::invalid_argument("hc_coefficients: empty xi");
  if (!(lambda > 0.0)) throw DomainError("hc_coefficients: lambda must be positive");
  if (max_degree < 0) throw std::invalid_argument("hc_coefficients: negative degree");

  HCSeriesTable t;
  t.xi_.assign(xi.begin(), xi.end());
  t.lambda_ = lambda;
  t.min_denominator_ = std::numeric_limits<double>::infinity();
  const std::size_t n = xi.size();
  const std::size_t r = n - 1;

  if (r == 0) {
    t.max_degree_ = max_degree;
    t.coeffs_ = {1.0};
    t.degree_ = {0};
    t.dense_ = {0};
    t.suffix_max_.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
    t.suffix_max_[0] = 1.0;
    return t;
  }

  t.max_degree_ = max_degree;
  const auto side = static_cast<std::size_t>(max_degree) + 1;
  t.strides_.resize(r);
  std::size_t dense_size = 1;
  for (std::size_t k = 0; k < r; ++k) {
    t.strides_[k] = dense_size;
    if (dense_size > kMaxDenseEntries / side) {
      throw std::length_error("hc_coefficients: degree " + std::to_string(max_degree) +
                              " too large for rank " + std::to_string(n));
    }
    dense_size *= side;
  }
  t.dense_.assign(dense_size, -1);

  const auto weights = enumerate_weights(static_cast<int>(n), max_degree);
  t.m_flat_.reserve(weights.size() * r);
  t.degree_.reserve(weights.size());
  t.coeffs_.reserve(weights.size());

  const auto rho = weyl_vector(static_cast<int>(n), lambda);

  for (const auto& w : weights) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < r; ++k) idx += static_cast<std::size_t>(w.m[k]) * t.strides_[k];
    t.dense_[idx] = static_cast<std::int32_t>(t.coeffs_.size());
    t.m_flat_.insert(t.m_flat_.end(), w.m.begin(), w.m.end());
    const int deg = w.degree();
    t.degree_.push_back(deg);
    if (deg == 0) {
      t.coeffs_.push_back(1.0);
      continue;
    }

    const auto c = embed(w.m);
    double chi_sq = 0.0;
    cplx chi_xi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      chi_sq += c[i] * c[i];
      chi_xi += c[i] * xi[i];
    }
    const cplx den = chi_sq + 2.0 * chi_xi;
    const double aden = std::abs(den);
    t.min_denominator_ = std::min(t.min_denominator_, aden);
    if (aden < kResonanceThreshold) {
      std::string name = "(";
      for (std::size_t k = 0; k < r; ++k) name += (k ? "," : "") + std::to_string(w.m[k]);
      throw ResonantSpectralParameter("resonant spectral parameter at chi = " + name + ")");
    }

    cplx rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // alpha = e_i - e_j spans simple roots i..j-1.
        int nmax = std::numeric_limits<int>::max();
        std::size_t step = 0;
        for (std::size_t k = i; k < j; ++k) {
          nmax = std::min(nmax, w.m[k]);
          step += t.strides_[k];
        }
        if (nmax == 0) continue;
        const cplx a0 = (xi[i] - xi[j]) + (rho[i] - rho[j]) + (c[i] - c[j]);
        cplx part = 0.0;
        for (int m = 1; m <= nmax; ++m) {
          const auto prev = t.dense_[idx - static_cast<std::size_t>(m) * step];
          part += (a0 - 2.0 * m) * t.coeffs_[static_cast<std::size_t>(prev)];
        }
        rhs += part;
      }
    }
    t.coeffs_.push_back(2.0 * lambda * rhs / den);
  }

  t.suffix_max_.assign(side, 0.0);
  for (std::size_t e = 0; e < t.coeffs_.size(); ++e) {
    auto& s = t.suffix_max_[static_cast<std::size_t>(t.degree_[e])];
    s = std::max(s, std::abs(t.coeffs_[e]));
  }
  for (std::size_t d = side - 1; d-- > 0;) {
    t.suffix_max_[d] = std::max(t.suffix_max_[d], t.suffix_max_[d + 1]);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Pruned summation by degree shells.

class SeriesAccumulator {
 public:
  SeriesAccumulator(const HCSeriesTable& table, std::span<const double> x, int max_degree,
                    double prune)
      : t_(table),
        max_degree_(std::min(max_degree, table.max_degree())),
        log_cut_(std::log(prune)),
        shell(static_cast<std::size_t>(max_degree_) + 1, 0.0),
        shell_abs(static_cast<std::size_t>(max_degree_) + 1, 0.0) {
    const std::size_t r = t_.rank() - 1;
    gaps_.resize(r);
    powers_.resize(r);
    for (std::size_t k = 0; k < r; ++k) {
      gaps_[k] = x[k] - x[k + 1];
      auto& p = powers_[k];
      p.resize(static_cast<std::size_t>(max_degree_) + 1);
      p[0] = 1.0;
      const double q = std::exp(gaps_[k]);
      for (std::size_t m = 1; m < p.size(); ++m) p[m] = p[m - 1] * q;
    }
    log_suffix_.resize(static_cast<std::size_t>(max_degree_) + 1);
    for (std::size_t d = 0; d < log_suffix_.size(); ++d) {
      log_suffix_[d] = std::log(t_.suffix_max_[d]);
    }
    if (r == 0) {
      shell[0] = 1.0;
      shell_abs[0] = 1.0;
    } else {
      walk(0, 0, 0, 0.0, 1.0);
    }
  }

  const HCSeriesTable& t_;
  int max_degree_;
  double log_cut_;
  std::vector<cplx> shell;
  std::vector<double> shell_abs;

 private:
  void walk(std::size_t k, std::size_t base, int deg, double expo, double weight) {
    const std::size_t r = gaps_.size();
    for (int m = 0;; ++m) {
      const int d = deg + m;
      if (d > max_degree_) break;
      const double e = expo + m * gaps_[k];
      if (e + log_suffix_[static_cast<std::size_t>(d)] < log_cut_) break;
      const std::size_t idx = base + static_cast<std::size_t>(m) * t_.strides_[k];
      const double w = weight * powers_[k][static_cast<std::size_t>(m)];
      if (k + 1 == r) {
        const cplx term = t_.coeffs_[static_cast<std::size_t>(t_.dense_[idx])] * w;
        shell[static_cast<std::size_t>(d)] += term;
        shell_abs[static_cast<std::size_t>(d)] += std::abs(term);
      } else {
        walk(k + 1, idx, d, e, w);
      }
    }
  }

  std::vector<double> gaps_;
  std::vector<std::vector<double>> powers_;
  std::vector<double> log_suffix_;
};

namespace {

bool shells_growing(std::span<const double> shell_abs, int upto) {
  if (upto < 5) return false;
  for (int d = upto - 4; d <= upto; ++d) {
    if (!(shell_abs[static_cast<std::size_t>(d)] > shell_abs[static_cast<std::size_t>(d - 1)])) {
      return false;
    }
  }
  return true;
}

}  // namespace

SeriesValue hc_series_eval(const HCSeriesTable& table, const ChamberPoint& x, double prune) {
  if (x.size() != table.rank()) throw std::invalid_argument("hc_series_eval: rank mismatch");
  const double gap = x.gap();
  if (table.rank() > 1 && !(gap < 0.0)) {
    throw DomainError("hc_series_eval: point is not strictly inside the chamber");
  }
  SeriesAccumulator acc(table, x.coords(), table.max_degree(), prune);
  cplx series = 0.0;
  for (const cplx& s : acc.shell) series += s;

  const auto rho = weyl_vector(static_cast<int>(table.rank()), table.lambda());
  cplx expo = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) expo += (table.xi()[i] + rho[i]) * x[i];

  SeriesValue out;
  const cplx pref = std::exp(expo);
  out.value = pref * series;
  out.diag.degree_used = table.max_degree();
  out.diag.wall_gap = gap;
  out.diag.last_term_magnitude = std::abs(pref) * acc.shell_abs.back();
  const double q = table.rank() > 1 ? std::exp(gap) : 0.0;
  out.diag.tail_estimate = out.diag.last_term_magnitude / (1.0 - q);
  out.diag.divergence_alarm = shells_growing(acc.shell_abs, table.max_degree());
  return out;
}

// ---------------------------------------------------------------------------
// ExtendedHypergeom

int default_degree_cap(std::size_t rank) {
  switch (rank) {
    case 0:
    case 1:
      return 0;
    case 2:
      return 8192;
    case 3:
      return 1024;
    case 4:
      return 128;
    case 5:
      return 48;
    default:
      return 20;
  }
}

ExtendedHypergeom::ExtendedHypergeom(SpectralParameter sp, HypergeomOptions opts)
    : sp_(std::move(sp)), opts_(opts) {
  const std::size_t n = sp_.size();
  if (opts_.degree_cap <= 0) opts_.degree_cap = default_degree_cap(n);
  if (n > 1) sp_.require_regular(opts_.regularity);
  rho_ = weyl_vector(static_cast<int>(n), sp_.lambda);
  table_degree_ = std::min(8, opts_.degree_cap);
  for (const auto& perm : all_permutations(n)) {
    Branch b;
    b.su.resize(n);
    for (std::size_t k = 0; k < n; ++k) b.su[k] = sp_.u[perm[k]];
    std::vector<cplx> arg(n), xi(n);
    for (std::size_t k = 0; k < n; ++k) {
      arg[k] = cplx(0.0, -b.su[k]);
      xi[k] = cplx(0.0, b.su[k]);
    }
    b.c = harish_chandra_c_log(arg, sp_.lambda, opts_.regularity);
    b.table = hc_coefficients(xi, sp_.lambda, table_degree_);
    branches_.push_back(std::move(b));
  }
}

int ExtendedHypergeom::degree_for_gap(double gap) const {
  if (sp_.size() < 2) return 0;
  const double g = std::abs(gap);
  // Shell d carries about d^(N-2) weights, each of size up to e^{d m_N} d^(2 lambda)-ish.
  const double base = -std::log(opts_.tol) + 2.0 * sp_.lambda * std::max(0.0, -std::log(g)) + 8.0;
  const double extra = static_cast<double>(sp_.size() - 1);
  double need = base / g;
  for (int it = 0; it < 4; ++it) need = (base + extra * std::log1p(need)) / g;
  int d = 8;
  while (d < need && d < opts_.degree_cap) d *= 2;
  return std::min(d, opts_.degree_cap);
}

int ExtendedHypergeom::reserve_for_gap(double gap) {
  const int want = degree_for_gap(gap);
  if (want > table_degree_) {
    table_degree_ = want;
    for (auto& b : branches_) {
      std::vector<cplx> xi(b.su.size());
      for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = cplx(0.0, b.su[k]);
      b.table = hc_coefficients(xi, sp_.lambda, table_degree_);
    }
  }
  return table_degree_;
}

SeriesValue ExtendedHypergeom::sum(const ChamberPoint& t, bool skip_leading,
                                   int forced_degree) const {
  if (t.size() != sp_.size()) throw std::invalid_argument("ExtendedHypergeom: rank mismatch");
  const double gap = t.gap();
  if (sp_.size() > 1 && gap > -opts_.wall_guard) {
    throw DomainError("extended_hypergeom: m_N(t) = " + std::to_string(gap) +
                      " inside the wall guard");
  }
  const int top = forced_degree > 0 ? std::min(forced_degree, table_degree_) : table_degree_;
  const double rho_t = dot(rho_, t.coords());

  const std::size_t nb = branches_.size();
  std::vector<cplx> pref(nb);
  std::vector<SeriesAccumulator> accs;
  accs.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& br = branches_[b];
    pref[b] = br.c.is_zero()
                  ? cplx(0.0)
                  : std::polar(std::exp(br.c.log_modulus + rho_t), br.c.phase + dot(br.su, t.coords()));
    accs.emplace_back(br.table, t.coords(), top, opts_.prune);
  }

  const double q = sp_.size() > 1 ? std::exp(gap) : 0.0;
  const auto size = static_cast<std::size_t>(top) + 1;
  std::vector<cplx> partial(size, 0.0);
  std::vector<double> shell_mag(size, 0.0);
  for (std::size_t d = skip_leading ? 1 : 0; d < size; ++d) {
    cplx s = 0.0;
    double a = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      s += pref[b] * accs[b].shell[d];
      a += std::abs(pref[b]) * accs[b].shell_abs[d];
    }
    partial[d] = (d ? partial[d - 1] : cplx(0.0)) + s;
    shell_mag[d] = a;
  }

  // Near a zero of F_N a purely relative test can never succeed; measure the
  // tail against a small fraction of the plane-wave scale sum_sigma |c_sigma e^{...}| there.
  double lead = 0.0;
  for (const cplx& p : pref) lead += std::abs(p);
  const double floor = std::max(kZeroFloor * lead, std::numeric_limits<double>::min());

  auto accept = [&](int d) {
    const auto du = static_cast<std::size_t>(d);
    const double tail = shell_mag[du] / (1.0 - q);
    const bool decreasing = d == 0 || shell_mag[du] <= shell_mag[du - 1];
    const double scale = std::max(std::abs(partial[du]), floor);
    return std::pair{decreasing && tail <= opts_.tol * scale, tail};
  };

  SeriesValue out;
  out.diag.wall_gap = gap;
  int chosen = -1;
  double best_tail = std::numeric_limits<double>::infinity();
  if (forced_degree > 0 || sp_.size() < 2) {
    chosen = top;
    best_tail = accept(top).second;
  } else {
    for (int d = std::min(8, top);; d = std::min(2 * d, top)) {
      const auto [ok, tail] = accept(d);
      best_tail = std::min(best_tail, tail);
      if (ok) {
        chosen = d;
        break;
      }
      if (d == top) break;
    }
  }
  if (chosen < 0) {
    if (shells_growing(shell_mag, top)) {
      throw ConvergenceError("extended_hypergeom: partial sums still growing at degree " +
                                 std::to_string(top),
                             best_tail);
    }
    throw ConvergenceError("extended_hypergeom: tolerance unreachable within degree " +
                               std::to_string(top) + " (best tail " + sci(best_tail) + ")",
                           best_tail);
  }
  const auto cu = static_cast<std::size_t>(chosen);
  out.value = partial[cu];
  out.diag.degree_used = chosen;
  out.diag.last_term_magnitude = shell_mag[cu];
  out.diag.tail_estimate = shell_mag[cu] / (1.0 - q);
  out.diag.divergence_alarm = shells_growing(shell_mag, chosen);
  return out;
}

SeriesValue ExtendedHypergeom::evaluate(const ChamberPoint& t) const {
  return sum(t, false, opts_.fixed_degree);
}

SeriesValue ExtendedHypergeom::evaluate_at_degree(const ChamberPoint& t, int degree) const {
  return sum(t, false, std::max(degree, 1));
}

SeriesValue ExtendedHypergeom::remainder(const ChamberPoint& t) const {
  return sum(t, true, opts_.fixed_degree);
}

cplx ExtendedHypergeom::dominant(const ChamberPoint& t) const {
  const double rho_t = dot(rho_, t.coords());
  cplx s = 0.0;
  for (const auto& br : branches_) {
    if (br.c.is_zero()) continue;
    s += std::polar(std::exp(br.c.log_modulus + rho_t), br.c.phase + dot(br.su, t.coords()));
  }
  return s;
}

SeriesValue extended_hypergeom(const SpectralParameter& sp, const ChamberPoint& t, double tol) {
  HypergeomOptions opts;
  opts.tol = tol;
  ExtendedHypergeom f(sp, opts);
  f.reserve_for_gap(t.gap());
  while (true) {
    try {
      return f.evaluate(t);
    } catch (const ConvergenceError&) {
      if (f.table_degree() >= f.options().degree_cap) throw;
      f.reserve_for_gap(0.5 * t.gap());
    }
  }
}

cplx dominant_asymptotics(const SpectralParameter& sp, const ChamberPoint& x) {
  HypergeomOptions opts;
  ExtendedHypergeom f(sp, opts);
  return f.dominant(x);
}

// ---------------------------------------------------------------------------
// Rank-one oracle

double a1_oracle_series(double v, double lambda, double s) {
  if (!(lambda > 0.0)) throw DomainError("a1_oracle: lambda must be positive");
  const double sh = std::sinh(0.5 * std::abs(s));
  if (!(sh < 1.0)) {
    throw DomainError("a1_oracle: |sinh(s/2)| >= 1 is outside the convergence guard");
  }
  const double z = -sh * sh;
  const double a = 0.5 * lambda;
  const double b2 = 0.25 * v * v;
  const double c = lambda + 0.5;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 2'000'000; ++n) {
    term *= ((a + n) * (a + n) + b2) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && n > 4) return sum;
  }
  throw ConvergenceError("a1_oracle: series did not converge", std::abs(term));
}

double a1_oracle(double v, double lambda, double s) {
  if (lambda == 1.0) {
    const double half = 0.5 * std::abs(s);
    if (half == 0.0) return 1.0;
    const double num = v == 0.0 ? half : std::sin(v * half) / v;
    return num / std::sinh(half);
  }
  return a1_oracle_series(v, lambda, s);
}

// ---------------------------------------------------------------------------
// L_2 residual

L2Residual l2_residual(const ExtendedHypergeom& f, const ChamberPoint& t, double h) {
  const auto& sp = f.spectral();
  const std::size_t n = sp.size();
  if (!(h > 0.0)) throw std::invalid_argument("l2_residual: step must be positive");
  if (n > 1 && h >= 0.5 * std::abs(t.gap())) {
    throw DomainError("l2_residual: stencil leaves the chamber");
  }
  const int degree = f.table_degree();
  const Field field = [&](std::span<const double> y) {
    return f.evaluate_at_degree(ChamberPoint(std::vector<double>(y.begin(), y.end())), degree).value;
  };
  const FdOptions fd{h, false};
  const auto x = t.coords();

  L2Residual out;
  out.value = field(x);
  std::vector<cplx> d1(n);
  cplx l2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    l2 += fd_derivative(field, x, i, 2, fd);
    d1[i] = fd_derivative(field, x, i, 1, fd);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double coth = 1.0 / std::tanh(0.5 * (x[i] - x[j]));
      l2 += sp.lambda * coth * (d1[i] - d1[j]);
    }
  }
  out.l2_value = l2;
  const auto rho = weyl_vector(static_cast<int>(n), sp.lambda);
  const double eig = -dot(sp.u, sp.u) - dot(rho, rho);
  const double scale = std::abs(out.value);
  out.residual = std::abs(l2 - eig * out.value) / scale;

  // Rounding in the second differences grows like eps / h^2.
  const double rounding = 4.0 * static_cast<double>(n) * 1e-15 / (h * h);
  if (h > 0.05) {
    out.warning = "step too large: truncation error may dominate";
  } else if (rounding > 0.1 * out.residual) {
    out.warning = "step too small: rounding error comparable to residual";
  }
  return out;
}

L2Residual l2_residual(const SpectralParameter& sp, const ChamberPoint& t, double h) {
  HypergeomOptions opts;
  opts.tol = 1e-15;
  ExtendedHypergeom f(sp, opts);
  f.reserve_for_gap(t.gap() + h);
  return l2_residual(f, t, h);
}

}  // namespace cmqop
