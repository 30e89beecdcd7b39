#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cmqop/algebra.hpp"
#include "cmqop/errors.hpp"

using namespace cmqop;

TEST_CASE("ChamberPoint sorts and records the permutation") {
  ChamberPoint p({3.0, -1.0, 0.5});
  CHECK(p[0] == -1.0);
  CHECK(p[2] == 3.0);
  const std::vector<double> in = {3.0, -1.0, 0.5};
  for (std::size_t k = 0; k < 3; ++k) CHECK(p[k] == in[p.permutation()[k]]);
  CHECK(p.gap() == doctest::Approx(-1.5));
}

TEST_CASE("ChamberPoint rejects walls and bad input") {
  CHECK_THROWS_AS(ChamberPoint({1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(ChamberPoint(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(ChamberPoint({0.0, NAN}), DomainError);
  CHECK_NOTHROW(ChamberPoint({0.0, 1e-9}));
}

TEST_CASE("weyl vector and chamber pairing") {
  const auto rho = weyl_vector(4, 2.0);
  CHECK(rho == std::vector<double>{3.0, 1.0, -1.0, -3.0});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(4);
    for (double& xi : x) xi = U(rng);
    std::sort(x.begin(), x.end());
    CHECK(dot(rho, x) < 0.0);
    CHECK(chamber_gap(x) < 0.0);
  }
}

TEST_CASE("elementary symmetric functions") {
  const std::vector<double> p = {1.0, 2.0, 3.0};
  CHECK(elementary_symmetric(0, p) == 1.0);
  CHECK(elementary_symmetric(1, p) == 6.0);
  CHECK(elementary_symmetric(2, p) == 11.0);
  CHECK(elementary_symmetric(3, p) == 6.0);
  CHECK_THROWS_AS(elementary_symmetric(4, p), std::out_of_range);
  // E(gamma; p) = sum_r gamma^(N-r) S_r(p).
  const cplx g(0.3, -1.1);
  cplx s = 0.0;
  for (int r = 0; r <= 3; ++r) s += std::pow(g, 3 - r) * elementary_symmetric(r, p);
  CHECK(std::abs(generating_E(g, p) - s) < 1e-12);
}

TEST_CASE("project_cms removes the centre of mass") {
  const std::vector<double> v = {1.0, 4.0, -2.0};
  const auto w = project_cms(v);
  CHECK(std::abs(w[0] + w[1] + w[2]) < 1e-15);
  CHECK(w[0] - w[1] == doctest::Approx(v[0] - v[1]));
}

TEST_CASE("enumerate_weights is graded with binomial shell sizes") {
  const auto w = enumerate_weights(4, 5);
  std::size_t expect = 0;
  for (int d = 0; d <= 5; ++d) expect += static_cast<std::size_t>((d + 1) * (d + 2) / 2);
  CHECK(w.size() == expect);
  for (std::size_t k = 1; k < w.size(); ++k) CHECK(w[k - 1].degree() <= w[k].degree());
  CHECK(w[1].m == std::vector<int>{1, 0, 0});
  CHECK(enumerate_weights(1, 10).size() == 1);
  const auto e = w.back().embed();
  CHECK(e[0] + e[1] + e[2] + e[3] == 0.0);
}

TEST_CASE("spectral parameter regularity") {
  SpectralParameter sp({0.5, 0.5 + 1e-10}, 1.0);
  CHECK_THROWS_AS(sp.require_regular(1e-8), IrregularSpectralParameter);
  CHECK_THROWS_AS(SpectralParameter({0.1}, -1.0), DomainError);
}
