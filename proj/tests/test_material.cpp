#include <doctest.h>

#include <cmath>
#include <random>

#include "hsgreen/errors.hpp"
#include "hsgreen/material.hpp"

using namespace hsgreen;

namespace {
const Material kElastic{1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
}

TEST_CASE("zener factor: p = q gives exactly 1") {
  Material m = kElastic;
  m.p = m.q = 0.3;
  m.alpha = 0.7;
  CHECK(zener_factor(m, 2.0) == cdouble(1.0, 0.0));

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ua(0.0, 1.0), uw(0.01, 100.0),
      up(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    m.p = m.q = up(rng);
    m.alpha = ua(rng);
    CHECK(zener_factor(m, uw(rng)) == cdouble(1.0, 0.0));
  }
}

TEST_CASE("zener factor: alpha = 0 is frequency independent") {
  Material m = kElastic;
  m.p = 1.0;
  m.q = 3.0;
  m.alpha = 0.0;
  CHECK(zener_factor(m, 1.0).real() == doctest::Approx(0.5));
  CHECK(zener_factor(m, 1.0).imag() == doctest::Approx(0.0));
  CHECK(zener_factor(m, 17.0).real() == doctest::Approx(0.5));
  CHECK(zener_factor(m, 17.0).imag() == doctest::Approx(0.0));
}

TEST_CASE("zener factor: high-precision fixture") {
  // 30-digit evaluation of (1 + 0.05 (10 i)^0.5) / (1 + 0.15 (10 i)^0.5).
  Material m = kElastic;
  m.p = 0.05;
  m.q = 0.15;
  m.alpha = 0.5;
  const cdouble z = zener_factor(m, 10.0);
  CHECK(z.real() == doctest::Approx(0.80293133301012854).epsilon(1e-13));
  CHECK(z.imag() == doctest::Approx(-0.11794724782270005).epsilon(1e-13));
}

TEST_CASE("frequency context: elastic limit has real wavenumbers") {
  const FrequencyContext ctx = frequency_context(kElastic, 1.0);
  CHECK(ctx.k1.real() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(ctx.k1.imag() == 0.0);
  CHECK(ctx.k2.real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ctx.k2.imag() == 0.0);
  CHECK(std::abs(ctx.damped_omega_sq - 1.0) < 1e-15);
}

TEST_CASE("frequency context: damped wavenumbers decay") {
  Material m{2.0, 1.0, 1.0, 0.0, 0.2, 1.0};
  const FrequencyContext ctx = frequency_context(m, 1.0);
  CHECK(std::abs(ctx.damped_omega_sq - 1.0 / cdouble(1.0, 0.2)) < 1e-15);
  CHECK(ctx.k1.imag() > 0.0);
  CHECK(ctx.k2.imag() > 0.0);
  CHECK(std::abs(ctx.k2) >= std::abs(ctx.k1));
}

TEST_CASE("frequency context: p = q matches the elastic context for any alpha") {
  Material m{2.0, 1.5, 1.2, 0.4, 0.4, 0.0};
  Material me = m;
  me.p = me.q = 0.0;
  const FrequencyContext elastic = frequency_context(me, 2.0);
  for (double alpha : {0.0, 0.3, 0.9, 1.0}) {
    m.alpha = alpha;
    const FrequencyContext ctx = frequency_context(m, 2.0);
    CHECK(ctx.k1 == elastic.k1);
    CHECK(ctx.k2 == elastic.k2);
  }
}

TEST_CASE("vertical wavenumber: sign convention and limits") {
  // eta = 0, k = i: beta = sqrt(0 - (i)^2) = 1
  CHECK(vertical_wavenumber(0.0, 0.0, cdouble(0.0, 1.0)) == cdouble(1.0, 0.0));
  // |eta| limit with k = 0
  CHECK(vertical_wavenumber(3.0, 4.0, cdouble(0.0, 0.0)) == cdouble(5.0, 0.0));
}

TEST_CASE("vertical wavenumber: high-precision fixture") {
  const cdouble b = vertical_wavenumber(1.0, 0.0, cdouble(2.0, 0.1));
  CHECK(b.real() == doctest::Approx(0.11540624028348617).epsilon(1e-13));
  CHECK(b.imag() == doctest::Approx(-1.733008540168331).epsilon(1e-13));
}

TEST_CASE("vertical wavenumber: branch point raises in the elastic limit") {
  CHECK_THROWS_AS(vertical_wavenumber(0.5, 0.0, cdouble(1.0, 0.0)),
                  BranchDegenerate);
  // the unchecked variant returns the branch-line value
  const cdouble b = vertical_wavenumber(0.5, 0.0, cdouble(1.0, 0.0), false);
  CHECK(b.real() == 0.0);
  CHECK(b.imag() > 0.0);
}

TEST_CASE("vertical wavenumber: properties over a random grid") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ue(-10.0, 10.0), ukr(-2.0, 2.0),
      uki(0.05, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const double e1 = ue(rng), e2 = ue(rng);
    const cdouble k(ukr(rng), uki(rng));
    const cdouble b = vertical_wavenumber(e1, e2, k);
    CHECK(b.real() > 0.0);  // strictly decaying branch when Im k > 0
    const cdouble resid = b * b + k * k - e1 * e1 - e2 * e2;
    CHECK(std::abs(resid) <=
          1e-12 * std::max(1.0, std::abs(b * b) + std::abs(k * k)));
  }
}

TEST_CASE("vertical wavenumber: large-eta asymptotics") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ukr(-1.0, 1.0), uki(0.05, 1.0),
      uscale(10.0, 100.0), uang(0.0, 2.0 * kPi);
  for (int i = 0; i < 500; ++i) {
    const cdouble k(ukr(rng), uki(rng));
    const double eta = uscale(rng) * std::abs(k);
    const double th = uang(rng);
    const cdouble b =
        vertical_wavenumber(eta * std::cos(th), eta * std::sin(th), k);
    CHECK(std::abs(b - eta) <= std::norm(k) / eta);
  }
}

TEST_CASE("material validation names the field") {
  Material m = kElastic;
  m.alpha = 1.5;
  CHECK_THROWS_WITH_AS(validate(m), "material.alpha must be in [0, 1]",
                       ValidationError);
  m = kElastic;
  m.mu = -1.0;
  CHECK_THROWS_AS(validate(m), ValidationError);
  m = kElastic;
  m.lambda = -1.5;  // lambda + mu <= 0
  CHECK_THROWS_AS(validate(m), ValidationError);
  m = kElastic;
  m.rho = 0.0;
  CHECK_THROWS_AS(validate(m), ValidationError);
}
