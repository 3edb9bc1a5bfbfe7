#include "hsgreen/material.hpp"

#include <cmath>
#include <sstream>

#include "hsgreen/errors.hpp"

namespace hsgreen {

void validate(const Material& m) {
  auto fail = [](const std::string& what) { throw ValidationError(what); };
  if (!(m.mu > 0.0)) fail("material.mu must be > 0");
  if (!(m.lambda + m.mu > 0.0)) fail("material.lambda + material.mu must be > 0");
  if (!(m.rho > 0.0)) fail("material.rho must be > 0");
  if (!(m.p >= 0.0)) fail("material.p must be >= 0");
  if (!(m.q >= 0.0)) fail("material.q must be >= 0");
  if (!(m.alpha >= 0.0 && m.alpha <= 1.0))
    fail("material.alpha must be in [0, 1]");
}

cdouble zener_factor(const Material& m, double omega) {
  if (!(omega > 0.0)) throw ValidationError("omega must be > 0");
  // Exact unity for p = q; complex division would leave ~1 ulp of phase.
  if (m.p == m.q) return cdouble(1.0, 0.0);
  // (i omega)^alpha, principal branch for omega > 0.
  const cdouble iwa =
      std::polar(std::pow(omega, m.alpha), m.alpha * kPi / 2.0);
  return (1.0 + m.p * iwa) / (1.0 + m.q * iwa);
}

FrequencyContext frequency_context(const Material& m, double omega,
                                   double eps_damp) {
  validate(m);
  FrequencyContext ctx;
  ctx.omega = omega;
  ctx.zener = zener_factor(m, omega);
  const cdouble damped_omega = omega * cdouble(1.0, eps_damp);
  ctx.damped_omega_sq = ctx.zener * damped_omega * damped_omega;

  cdouble wt = std::sqrt(ctx.damped_omega_sq);
  // k_j = wt * sqrt(rho/modulus) with real positive factors, so fixing
  // Im(wt) >= 0 fixes Im(k_j) >= 0.
  if (wt.imag() < 0.0) wt = -wt;
  ctx.omega_tilde = wt;
  ctx.c1 = std::sqrt((m.lambda + 2.0 * m.mu) / m.rho);
  ctx.c2 = std::sqrt(m.mu / m.rho);
  ctx.k1 = wt / ctx.c1;
  ctx.k2 = wt / ctx.c2;
  return ctx;
}

cdouble vertical_wavenumber(double eta1, double eta2, cdouble k, bool check) {
  const cdouble ksq = k * k;
  cdouble z(eta1 * eta1 + eta2 * eta2 - ksq.real(), -ksq.imag());
  // Normalize a signed zero so the branch cut is approached from above
  // (sqrt(-x + 0i) = +i sqrt(x)); a bare `double - complex` would negate
  // the zero and land below the cut.
  if (z.imag() == 0.0) z = cdouble(z.real(), 0.0);
  cdouble b = std::sqrt(z);
  if (b.real() < 0.0) b = -b;
  if (check && b.real() == 0.0 && k.imag() == 0.0) {
    std::ostringstream os;
    os << "vertical wavenumber on the real-axis branch cut at |eta| = "
       << std::hypot(eta1, eta2) << ", k = " << k.real()
       << "; add damping or move the grid";
    throw BranchDegenerate(os.str());
  }
  return b;
}

Stress3 stress_from_gradient(const std::array<CMat3, 3>& grad,
                             const Material& mat) {
  // sigma_ijm = lambda d_ij u_{lm,l} + mu (u_{im,j} + u_{jm,i})
  Stress3 sig;
  Eigen::RowVector3cd div;  // div(m) = sum_l u_{lm,l}
  div = grad[0].row(0) + grad[1].row(1) + grad[2].row(2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int m = 0; m < 3; ++m) {
        cdouble v = mat.mu * (grad[j](i, m) + grad[i](j, m));
        if (i == j) v += mat.lambda * div(m);
        sig.s[i](j, m) = v;
      }
    }
  }
  return sig;
}

}  // namespace hsgreen
