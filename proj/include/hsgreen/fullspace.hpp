// Closed-form full-space kernel u*(x,xi,omega) and its stresses, plus the
// wavenumber-domain surface-trace matrices D1/D2 and the traction integrand Q
// that drives the boundary matching.
#pragma once

#include "hsgreen/material.hpp"
#include "hsgreen/types.hpp"

namespace hsgreen {

// e^{ikr}/r and its Cartesian derivatives up to third order, taken with
// respect to x at fixed xi (argument is r_vec = x - xi).
struct PhiDerivs {
  cdouble value;
  CVec3 grad;
  CMat3 hess;
  std::array<CMat3, 3> third;  // third[l](i,j) = phi_{,ijl}
};

PhiDerivs phi_derivs(const Vec3& r_vec, cdouble k, double r_min = 1e-12);

// u*_jk = 1/(4 pi mu k2^2) (phi2 - phi1)_{,jk} + 1/(4 pi mu) phi2 delta_jk.
// The 1/(4 pi rho w~^2) prefactor of the alternative form is identical since
// rho w~^2 = mu k2^2.
CMat3 fullspace_displacement(const FieldPair& pair, const FrequencyContext& ctx,
                             const Material& mat, double r_min = 1e-12);

// Displacement gradient d_l u*_{jm}; stress is stress_from_gradient of it.
std::array<CMat3, 3> fullspace_gradient(const FieldPair& pair,
                                        const FrequencyContext& ctx,
                                        const Material& mat,
                                        double r_min = 1e-12);

Stress3 fullspace_stress(const FieldPair& pair, const FrequencyContext& ctx,
                         const Material& mat, double r_min = 1e-12);

// Surface-trace matrices of the spectral representation of u*, evaluated for
// x3 = 0 > xi3 (sgn = +1 baked in, delta terms dropped):
//   D1 = [ -e1^2, -e1 e2, i e1 b1; ...; i e1 b1, i e2 b1, b1^2 ]
//   D2 = same with b2 and +k2^2 on the diagonal.
void spectral_D_matrices(double eta1, double eta2, const FrequencyContext& ctx,
                         CMat3& D1, CMat3& D2);

// Traction integrand of u* on x3 = 0, composed from the D1/D2 row structure.
// Note the (.,3)/(3,.) entries of the printed D matrices flip sign when a
// further d/dx3 acts on the decaying exponential; the composition uses the
// derivative symbols s_j = (i e1, i e2, -beta_j) throughout.
//
// Returned in the mu-scaled list normalization (e.g. Q11(eta=0) =
// -mu e^{b2 xi3} / (4 pi)); the physical traction integrand is
// (kWeylConstant / mu) * Q.
CMat3 spectral_fullspace_traction(double eta1, double eta2, double xi3,
                                  const FrequencyContext& ctx,
                                  const Material& mat);

struct SpectralTractionMatrices {
  CMat3 D1, D2, Q;
};

SpectralTractionMatrices spectral_traction_matrices(double eta1, double eta2,
                                                    double xi3,
                                                    const FrequencyContext& ctx,
                                                    const Material& mat);

}  // namespace hsgreen
