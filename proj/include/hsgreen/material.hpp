// Constitutive model: fractional Zener factor, damped frequency, complex
// wavenumbers and the square-root branches used everywhere downstream.
#pragma once

#include "hsgreen/types.hpp"

namespace hsgreen {

struct Material {
  double lambda = 0.0;  // Pa
  double mu = 0.0;      // Pa
  double rho = 0.0;     // kg/m^3
  double p = 0.0;       // relaxation coefficient, >= 0
  double q = 0.0;       // retardation coefficient, >= 0
  double alpha = 0.0;   // fractional order, in [0,1]
};

// Throws ValidationError naming the offending field. Requires mu > 0,
// lambda + mu > 0 (ellipticity), rho > 0, p,q >= 0, alpha in [0,1].
void validate(const Material& m);

// Elasticity tensor C_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk).
inline double elastic_tensor(const Material& m, int i, int j, int k, int l) {
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  return m.lambda * d(i, j) * d(k, l) +
         m.mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
}

struct FrequencyContext {
  double omega = 0.0;            // rad/s
  cdouble zener;                 // (1 + p(iw)^a) / (1 + q(iw)^a)
  cdouble damped_omega_sq;       // zener * omega^2 (times damping knob)
  cdouble omega_tilde;           // branch with Im >= 0
  cdouble k1, k2;                // pressure / shear wavenumbers, Im >= 0
  cdouble c1, c2;                // wave speeds omega_tilde / k_j
};

// (i omega)^alpha on the principal branch: omega^alpha * exp(i alpha pi/2),
// omega > 0 only.
cdouble zener_factor(const Material& m, double omega);

// Builds the full context. eps_damp is an optional regularization replacing
// omega by omega*(1+i eps) inside the damped frequency; it is never applied
// implicitly. Default 0 keeps the elastic limit exact.
FrequencyContext frequency_context(const Material& m, double omega,
                                   double eps_damp = 0.0);

// Vertical wavenumber beta = sqrt(eta1^2 + eta2^2 - k^2) on the decaying
// branch Re(beta) >= 0. Throws BranchDegenerate when the real-axis branch
// point is touched (Re beta == 0 with Im k == 0) unless check is false (the
// determinant scan samples the elastic branch line deliberately).
cdouble vertical_wavenumber(double eta1, double eta2, cdouble k,
                            bool check = true);

}  // namespace hsgreen
