#include <doctest.h>

#include <cmath>
#include <random>

#include "hsgreen/errors.hpp"
#include "hsgreen/fullspace.hpp"
#include "hsgreen/quadrature.hpp"
#include "hsgreen/spectral.hpp"

using namespace hsgreen;

namespace {

const Material kViscoA{2.0, 1.0, 1.0, 0.0, 0.3, 0.8};
const Material kElastic{2.0, 1.0, 1.0, 0.0, 0.0, 0.0};

FrequencyContext ctx_unit_wt2(const Material& m) {
  // Context with damped_omega_sq = 1 for substitution fixtures.
  FrequencyContext ctx;
  ctx.omega = 1.0;
  ctx.zener = 1.0;
  ctx.damped_omega_sq = 1.0;
  ctx.omega_tilde = 1.0;
  ctx.c1 = std::sqrt((m.lambda + 2.0 * m.mu) / m.rho);
  ctx.c2 = std::sqrt(m.mu / m.rho);
  ctx.k1 = 1.0 / ctx.c1;
  ctx.k2 = 1.0 / ctx.c2;
  return ctx;
}

// Independent traction assembly: T_p = C_{p3jl} d_l u_j for the mode
// u_j(x) = nu_j e^{beta (x3+xi3)} e^{i eta.x_lat}, via a full tensor loop.
CVec3 traction_by_contraction(const CVec3& nu, cdouble beta, double e1,
                              double e2, const Material& mat) {
  const cdouble sym[3] = {cdouble(0.0, e1), cdouble(0.0, e2), beta};
  CVec3 t = CVec3::Zero();
  for (int p = 0; p < 3; ++p)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l)
        t[p] += elastic_tensor(mat, p, 2, j, l) * nu[j] * sym[l];
  return t;
}

cdouble det3(const CMat3& m) { return m.determinant(); }

}  // namespace

TEST_CASE("operator matrix: eta = beta = 0 is rho w~^2 I") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.1);
  const CMat3 M = operator_matrix(0.0, 0.0, cdouble(0.0, 0.0), ctx, kViscoA);
  const cdouble rw = kViscoA.rho * ctx.damped_omega_sq;
  CHECK((M - rw * CMat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("operator matrix: symmetric for all inputs") {
  const FrequencyContext ctx = frequency_context(kViscoA, 0.9);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const CMat3 M = operator_matrix(u(rng), u(rng), cdouble(u(rng), u(rng)),
                                    ctx, kViscoA);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("operator matrix: substitution fixture") {
  // eta=(1,1), beta=0.5+0.1i, lambda=2, mu=1, rho=1, w~^2=1.
  const FrequencyContext ctx = ctx_unit_wt2(kElastic);
  const CMat3 M = operator_matrix(1.0, 1.0, cdouble(0.5, 0.1), ctx, kElastic);
  CHECK(std::abs(M(0, 0) - cdouble(-3.76, 0.1)) < 1e-14);
  CHECK(std::abs(M(0, 1) - cdouble(-3.0, 0.0)) < 1e-14);
  CHECK(std::abs(M(0, 2) - cdouble(-0.3, 1.5)) < 1e-14);
  CHECK(std::abs(M(1, 1) - cdouble(-3.76, 0.1)) < 1e-14);
  CHECK(std::abs(M(2, 2) - cdouble(-0.04, 0.4)) < 1e-14);
}

TEST_CASE("determinant: vanishes at the eigenvalues") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.3);
  const SpectralPoint pt = make_spectral_point(0.8, -0.5, ctx);
  const CMat3 M1 = operator_matrix(0.8, -0.5, pt.beta1, ctx, kViscoA);
  const double scale1 = std::pow(M1.norm(), 3);
  CHECK(std::abs(det3(M1)) <= 1e-10 * scale1);

  // beta2 is a double root: determinant and its beta-derivative vanish
  const double h = 1e-6;
  const cdouble d0 = det_operator(0.8, -0.5, pt.beta2, ctx, kViscoA);
  const cdouble dp = det_operator(0.8, -0.5, pt.beta2 + h, ctx, kViscoA);
  const cdouble dm = det_operator(0.8, -0.5, pt.beta2 - h, ctx, kViscoA);
  const CMat3 M2 = operator_matrix(0.8, -0.5, pt.beta2, ctx, kViscoA);
  const double scale2 = std::pow(M2.norm(), 3);
  CHECK(std::abs(d0) <= 1e-10 * scale2);
  CHECK(std::abs((dp - dm) / (2.0 * h)) <= 1e-4 * scale2);
}

TEST_CASE("determinant: factorization ratio is the material prefactor") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.7);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double expected = kViscoA.mu * kViscoA.mu * (kViscoA.lambda + 2.0 * kViscoA.mu);
  for (int trial = 0; trial < 5; ++trial) {
    const double e1 = u(rng), e2 = u(rng);
    const double es = e1 * e1 + e2 * e2;
    cdouble first = 0.0;
    for (int i = 0; i < 5; ++i) {
      const cdouble beta(u(rng), u(rng));
      const cdouble det = det_operator(e1, e2, beta, ctx, kViscoA);
      const cdouble fac = (beta * beta - es + ctx.k1 * ctx.k1) *
                          (beta * beta - es + ctx.k2 * ctx.k2) *
                          (beta * beta - es + ctx.k2 * ctx.k2);
      const cdouble ratio = det / fac;
      if (i == 0) first = ratio;
      CHECK(std::abs(ratio - first) <= 1e-8 * std::abs(first));
      CHECK(std::abs(ratio - expected) <= 1e-8 * expected);
    }
  }
}

TEST_CASE("eigenbasis: literal construction and degeneracy") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.0);
  const SpectralPoint pt = make_spectral_point(1.0, 0.0, ctx);
  const Eigenbasis b = eigenbasis(pt);
  CHECK(b.nu1(0) == cdouble(-1.0, 0.0));
  CHECK(b.nu1(2) == cdouble(0.0, 1.0) * pt.beta1);
  CHECK(b.nu2(0) == -pt.beta2);
  CHECK(b.nu2(2) == cdouble(0.0, 1.0));
  CHECK(b.nu3(0) == cdouble(0.0, 0.0));
  CHECK(b.nu3(1) == cdouble(1.0, 0.0));

  const SpectralPoint deg = make_spectral_point(0.0, 1.0, ctx);
  CHECK_THROWS_AS(eigenbasis(deg), DegenerateBasis);
}

TEST_CASE("eigenbasis: mode residuals against the operator matrix") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> ue(-4.0, 4.0), uw(0.5, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double e1 = ue(rng), e2 = ue(rng);
    if (std::abs(e1) < 1e-6) continue;
    const FrequencyContext ctx = frequency_context(kViscoA, uw(rng));
    const SpectralPoint pt = make_spectral_point(e1, e2, ctx);
    const Eigenbasis b = eigenbasis(pt);
    const cdouble betas[3] = {pt.beta1, pt.beta2, pt.beta3};
    const CVec3* nus[3] = {&b.nu1, &b.nu2, &b.nu3};
    for (int m = 0; m < 3; ++m) {
      const CMat3 M = operator_matrix(e1, e2, betas[m], ctx, kViscoA);
      CHECK((M * (*nus[m])).norm() <= 1e-10 * M.norm() * nus[m]->norm());
    }
  }
}

TEST_CASE("boundary matrix N: printed entries") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.0);
  const double xi3 = -0.8;

  SpectralPoint pt = make_spectral_point(1.0, 0.0, ctx);
  Eigenbasis b = eigenbasis(pt);
  CMat3 N = assemble_N(pt, b, xi3, kViscoA);
  // N33 = 0 always; N23 at eta=(1,0) collapses to mu e^{b3 xi3}
  CHECK(N(2, 2) == cdouble(0.0, 0.0));
  const cdouble expected23 = kViscoA.mu * std::exp(pt.beta3 * xi3);
  CHECK(std::abs(N(1, 2) - expected23) < 1e-14 * std::abs(expected23));

  pt = make_spectral_point(0.7, -1.2, ctx);
  b = eigenbasis(pt);
  N = assemble_N(pt, b, xi3, kViscoA);
  CHECK(N(2, 2) == cdouble(0.0, 0.0));
  const double es = 0.7 * 0.7 + 1.2 * 1.2;
  const cdouble E1 = std::exp(pt.beta1 * xi3) / pt.beta1;
  const cdouble E2 = std::exp(pt.beta2 * xi3) / pt.beta2;
  const cdouble I(0.0, 1.0);
  CHECK(std::abs(N(0, 0) - kViscoA.mu * (-2.0 * 0.7 * pt.beta1) * E1) < 1e-13);
  CHECK(std::abs(N(0, 1) -
                 kViscoA.mu * (-pt.beta2 * pt.beta2 - 0.7 * 0.7) * E2) < 1e-13);
  CHECK(std::abs(N(2, 0) - (kViscoA.lambda * (-I * es) +
                            I * (kViscoA.lambda + 2.0 * kViscoA.mu) *
                                pt.beta1 * pt.beta1) * E1) < 1e-13);
  CHECK(std::abs(N(2, 1) - 2.0 * I * kViscoA.mu * 0.7 * pt.beta2 * E2) < 1e-13);
}

TEST_CASE("boundary matrix N: independent tensor-contraction oracle") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.6);
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> ue(-3.0, 3.0), ux(-2.0, -0.1);
  for (int i = 0; i < 30; ++i) {
    const double e1 = ue(rng), e2 = ue(rng), xi3 = ux(rng);
    if (std::abs(e1) < 1e-3) continue;
    const SpectralPoint pt = make_spectral_point(e1, e2, ctx);
    const Eigenbasis b = eigenbasis(pt);
    const CMat3 N = assemble_N(pt, b, xi3, kViscoA);
    const cdouble betas[3] = {pt.beta1, pt.beta2, pt.beta3};
    const CVec3* nus[3] = {&b.nu1, &b.nu2, &b.nu3};
    for (int m = 0; m < 3; ++m) {
      const CVec3 t = traction_by_contraction(*nus[m], betas[m], e1, e2,
                                              kViscoA) *
                      (std::exp(betas[m] * xi3) / betas[m]);
      CHECK((N.col(m) - t).norm() <= 1e-13 * N.norm());
    }
  }
}

TEST_CASE("boundary matrix N: error conditions") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.0);
  const SpectralPoint pt = make_spectral_point(1.0, 0.3, ctx);
  const Eigenbasis b = eigenbasis(pt);
  CHECK_THROWS_AS(assemble_N(pt, b, 0.0, kViscoA), SurfaceSource);

  // beta2 = 0 exactly on the elastic branch point
  const FrequencyContext ectx = frequency_context(kElastic, 1.0);
  const SpectralPoint deg = make_spectral_point(1.0, 0.0, ectx, false);
  CHECK(std::abs(deg.beta2) == 0.0);
  const Eigenbasis bd = eigenbasis(deg);
  CHECK_THROWS_AS(assemble_N(deg, bd, -1.0, kElastic), ModeDegenerate);
}

TEST_CASE("delta closed form: trivial root, determinant match, depth scaling") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.2);

  const SpectralPoint axis = make_spectral_point(0.0, 1.3, ctx);
  CHECK(delta_closed(axis, -0.5, kViscoA, ctx) == cdouble(0.0, 0.0));

  std::mt19937 rng(41);
  std::uniform_real_distribution<double> ue(-3.0, 3.0), ux(-1.5, -0.1);
  for (int i = 0; i < 10; ++i) {
    const double e1 = ue(rng), e2 = ue(rng), xi3 = ux(rng);
    if (std::abs(e1) < 1e-3) continue;
    const SpectralPoint pt = make_spectral_point(e1, e2, ctx);
    const Eigenbasis b = eigenbasis(pt);
    const cdouble dn = det3(assemble_N(pt, b, xi3, kViscoA));
    const cdouble dc = delta_closed(pt, xi3, kViscoA, ctx);
    CHECK(std::abs(dc / dn - 1.0) <= 1e-8);

    const double xi3b = xi3 - 0.7;
    const cdouble ratio = delta_closed(pt, xi3, kViscoA, ctx) /
                          delta_closed(pt, xi3b, kViscoA, ctx);
    const cdouble expected = std::exp((pt.beta1 + 2.0 * pt.beta2) * (xi3 - xi3b));
    CHECK(std::abs(ratio - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("solve_coefficients: contract, Cramer cross-check, guards") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rand_mat = [&]() {
    CMat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = cdouble(u(rng), u(rng));
    return m;
  };

  CHECK(solve_coefficients(CMat3::Identity(), CMat3::Zero()).cwiseAbs()
            .maxCoeff() == 0.0);

  for (int trial = 0; trial < 50; ++trial) {
    const CMat3 N = rand_mat();
    const CMat3 Q = rand_mat();
    double cond = 0.0;
    CMat3 C;
    try {
      C = solve_coefficients(N, Q, 1e6, &cond);
    } catch (const SingularSystem&) {
      continue;  // skip the occasional ill-conditioned draw
    }
    for (int k = 0; k < 3; ++k) {
      CHECK((N * C.col(k) + Q.col(k)).norm() <= 1e-10 * Q.col(k).norm());
      // Cramer: replace column m by -Q_k
      for (int m = 0; m < 3; ++m) {
        CMat3 Nm = N;
        Nm.col(m) = -Q.col(k);
        const cdouble cramer = Nm.determinant() / N.determinant();
        CHECK(std::abs(C(m, k) - cramer) <=
              1e-8 * std::max(1.0, std::abs(cramer)));
      }
    }
  }

  // near-singular: two nearly parallel columns
  CMat3 bad = CMat3::Identity();
  bad.col(2) = bad.col(1) + CVec3::Constant(1e-15);
  CHECK_THROWS_AS(solve_coefficients(bad, CMat3::Identity()), SingularSystem);
}

TEST_CASE("boundary solve: mode rescaling leaves the assembled field invariant") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.1);
  const double xi3 = -0.9, x3 = -0.6;
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> ue(-2.0, 2.0), us(0.2, 5.0);

  for (int trial = 0; trial < 10; ++trial) {
    const double e1 = ue(rng), e2 = ue(rng);
    if (std::abs(e1) < 1e-2) continue;
    const SpectralPoint pt = make_spectral_point(e1, e2, ctx);
    const Eigenbasis base = eigenbasis(pt);
    const CMat3 Q = spectral_fullspace_traction(e1, e2, xi3, ctx, kViscoA);

    auto assemble_w = [&](const Eigenbasis& b) {
      const CMat3 N = assemble_N(pt, b, xi3, kViscoA);
      const CMat3 C = solve_coefficients(N, Q, 1e14);
      const cdouble betas[3] = {pt.beta1, pt.beta2, pt.beta3};
      const CVec3* nus[3] = {&b.nu1, &b.nu2, &b.nu3};
      CMat3 w = CMat3::Zero();
      for (int m = 0; m < 3; ++m) {
        const cdouble amp = std::exp(betas[m] * (x3 + xi3)) / betas[m];
        for (int k = 0; k < 3; ++k) w.col(k) += C(m, k) * amp * (*nus[m]);
      }
      return w;
    };

    const CMat3 w0 = assemble_w(base);
    Eigenbasis scaled = base;
    scaled.nu1 *= cdouble(us(rng), us(rng));
    scaled.nu2 *= cdouble(us(rng), -us(rng));
    scaled.nu3 *= us(rng);
    const CMat3 w1 = assemble_w(scaled);
    CHECK((w1 - w0).cwiseAbs().maxCoeff() <= 1e-10 * w0.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("hypothesis scan: viscoelastic minimum stays positive") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.0);
  ScanGrid grid;
  grid.n_r = 100;
  grid.n_theta = 16;
  const ScanReport rep = hypothesis_scan(kViscoA, ctx, -1.0, grid);
  CHECK(rep.min_abs > 0.0);
  CHECK(rep.median_abs > rep.min_abs);
}

TEST_CASE("hypothesis scan: elastic limit exposes the Rayleigh ring") {
  const FrequencyContext ctx = frequency_context(kElastic, 1.0);
  ScanGrid grid;
  grid.r_min = 0.05;
  grid.r_max = 2.0;
  grid.n_r = 400;
  grid.n_theta = 16;
  const ScanReport rep = hypothesis_scan(kElastic, ctx, -1.0, grid);
  REQUIRE(!rep.candidates.empty());

  // 1D oracle: bisect the classical secular function
  // R(s) = (2 s^2 - k2^2)^2 - 4 s^2 b1 b2 on s > k2.
  const double k1 = ctx.k1.real(), k2 = ctx.k2.real();
  auto rayleigh = [&](double s) {
    const double b1 = std::sqrt(s * s - k1 * k1);
    const double b2 = std::sqrt(s * s - k2 * k2);
    const double t = 2.0 * s * s - k2 * k2;
    return t * t - 4.0 * s * s * b1 * b2;
  };
  double lo = k2 * 1.0001, hi = 2.0 * k2;
  REQUIRE(rayleigh(lo) * rayleigh(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rayleigh(lo) * rayleigh(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double root = 0.5 * (lo + hi);
  CHECK(std::abs(rep.candidates.front().radius - root) / root < 0.01);
}

TEST_CASE("hypothesis scan: grid touching eta1 = 0 is rejected") {
  const FrequencyContext ctx = frequency_context(kViscoA, 1.0);
  ScanGrid grid;
  grid.n_theta = 6;  // midpoint angles include pi/2 for n = 2 mod 4
  CHECK_THROWS_AS(hypothesis_scan(kViscoA, ctx, -1.0, grid), ValidationError);
}
