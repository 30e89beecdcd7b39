#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "cmqop/errors.hpp"
#include "cmqop/special_fn.hpp"
#include "fixtures/loggamma_reference.hpp"

using namespace cmqop;

TEST_CASE("log_gamma matches the high-precision reference table") {
  for (const auto& r : fixtures::kLogGammaReference) {
    const cplx got = log_gamma({r.re, r.im});
    CAPTURE(r.re);
    CAPTURE(r.im);
    const double scale = std::max(1.0, std::abs(cplx(r.lg_re, r.lg_im)));
    CHECK(std::abs(got - cplx(r.lg_re, r.lg_im)) <= 2e-13 * scale);
  }
}

TEST_CASE("log_gamma on the real axis agrees with boost lgamma") {
  for (double x = 0.05; x < 60.0; x *= 1.37) {
    CHECK(log_gamma(x).real() == doctest::Approx(boost::math::lgamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("log_gamma obeys the recurrence log Gamma(z+1) = log Gamma(z) + log z") {
  const std::vector<cplx> zs = {{0.3, 0.2}, {-2.7, 1.1}, {4.0, -7.5}, {0.01, -30.0}, {-0.4, -0.9}};
  for (cplx z : zs) {
    const cplx lhs = std::exp(log_gamma(z + 1.0) - log_gamma(z) - std::log(z));
    CHECK(std::abs(lhs - 1.0) < 1e-12);
  }
}

TEST_CASE("log_gamma rejects poles") {
  CHECK_THROWS_AS(log_gamma(0.0), PoleError);
  CHECK_THROWS_AS(log_gamma(-3.0), PoleError);
  CHECK_NOTHROW(log_gamma(cplx(-3.0, 1e-6)));
}

TEST_CASE("reciprocal_gamma vanishes at poles") {
  CHECK(reciprocal_gamma(-2.0).is_zero());
  CHECK(std::abs(reciprocal_gamma(4.0).value() - 1.0 / 6.0) < 1e-15);
}

TEST_CASE("GammaProduct arithmetic") {
  auto a = GammaProduct::from_log({std::log(3.0), 0.5});
  auto b = GammaProduct::from_log({std::log(2.0), -0.25});
  CHECK(std::abs((a * b).value() - a.value() * b.value()) < 1e-14);
  CHECK(std::abs((a / b).value() - a.value() / b.value()) < 1e-14);
  CHECK_THROWS_AS(a / GammaProduct::zero(), PoleError);
  CHECK((GammaProduct::zero() * a).is_zero());
}

TEST_CASE("cosh_fourier_gamma closed forms") {
  // lambda = 2: |Gamma(1+iv)|^2 = pi v / sinh(pi v).
  for (double v : {0.0, 0.3, 1.7}) {
    const double expect = v == 0.0 ? 1.0 : std::numbers::pi * v / std::sinh(std::numbers::pi * v);
    CHECK(cosh_fourier_gamma(v, 2.0) == doctest::Approx(expect).epsilon(1e-13));
  }
  // lambda = 1: pi / cosh(pi v).
  CHECK(cosh_fourier_gamma(0.9, 1.0) ==
        doctest::Approx(std::numbers::pi / std::cosh(0.9 * std::numbers::pi)).epsilon(1e-13));
  CHECK_THROWS_AS(cosh_fourier_gamma(0.1, 0.0), DomainError);
}

TEST_CASE("c-function is normalised at rho and symmetric-rank one") {
  const double lambda = 1.7;
  const std::vector<cplx> rho = {0.5 * lambda * 2, 0.0, -0.5 * lambda * 2};
  CHECK(std::abs(harish_chandra_c(rho, lambda) - 1.0) < 1e-13);

  // N = 2: c(v) = Gamma(v1-v2) Gamma(2 lambda) / (Gamma(v1-v2+lambda) Gamma(lambda)).
  const std::vector<cplx> v = {{0.2, 0.8}, {-0.1, -0.3}};
  const cplx d = v[0] - v[1];
  const cplx expect =
      std::exp(log_gamma(d) - log_gamma(d + lambda) + log_gamma(2 * lambda) - log_gamma(lambda));
  CHECK(std::abs(harish_chandra_c(v, lambda) - expect) < 1e-13);

  const std::vector<cplx> bad = {{1.0, 0.0}, {3.0, 0.0}};
  CHECK_THROWS_AS(harish_chandra_c(bad, lambda), IrregularSpectralParameter);
}

TEST_CASE("sharp weights are positive and reject coincident momenta") {
  const std::vector<double> p = {0.4, -1.2, 2.0};
  const auto s = sharp_weights(p, 1.3);
  const double w = s.w_hat.value().real();
  CHECK(w > 0.0);
  CHECK(std::abs(w * std::norm(s.c_hat.value()) - 1.0) < 1e-12);
  const std::vector<double> same = {0.4, 0.4};
  CHECK_THROWS_AS(sharp_weights(same, 1.0), PoleError);
}
