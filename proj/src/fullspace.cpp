#include "hsgreen/fullspace.hpp"

#include <cmath>
#include <sstream>

#include "hsgreen/errors.hpp"

namespace hsgreen {

PhiDerivs phi_derivs(const Vec3& r_vec, cdouble k, double r_min) {
  const double r = r_vec.norm();
  if (r < r_min) {
    std::ostringstream os;
    os << "phi_derivs: |x - xi| = " << r << " below r_min = " << r_min;
    throw CoincidentPoints(os.str());
  }

  const cdouble ikr = cdouble(0.0, 1.0) * k * r;
  const cdouble f = std::exp(ikr) / r;
  const cdouble ik = cdouble(0.0, 1.0) * k;
  // Radial derivatives of f(r) = e^{ikr}/r.
  const cdouble f1 = f * (ik - 1.0 / r);
  const cdouble f2 = f * (-k * k - 2.0 * ik / r + 2.0 / (r * r));
  const cdouble f3 = f * (-ik * k * k + 3.0 * k * k / r + 6.0 * ik / (r * r) -
                          6.0 / (r * r * r));

  const Vec3 n = r_vec / r;
  PhiDerivs out;
  out.value = f;
  for (int i = 0; i < 3; ++i) out.grad[i] = f1 * n[i];

  const cdouble B = f1 / r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out.hess(i, j) = (f2 - B) * n[i] * n[j] + (i == j ? B : cdouble(0));

  // phi_{,ijl} = (f3 - 3P) n_i n_j n_l + P (d_ij n_l + d_il n_j + d_jl n_i),
  // P = (f2 - f1/r)/r.
  const cdouble P = (f2 - f1 / r) / r;
  const cdouble T = f3 - 3.0 * P;
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        cdouble v = T * n[i] * n[j] * n[l];
        if (i == j) v += P * n[l];
        if (i == l) v += P * n[j];
        if (j == l) v += P * n[i];
        out.third[l](i, j) = v;
      }
    }
  }
  return out;
}

CMat3 fullspace_displacement(const FieldPair& pair, const FrequencyContext& ctx,
                             const Material& mat, double r_min) {
  const Vec3 d = pair.rvec();
  const PhiDerivs p1 = phi_derivs(d, ctx.k1, r_min);
  const PhiDerivs p2 = phi_derivs(d, ctx.k2, r_min);
  const cdouble k2sq = ctx.k2 * ctx.k2;
  const double c = 1.0 / (4.0 * kPi * mat.mu);
  CMat3 u = c / k2sq * (p2.hess - p1.hess);
  u += c * p2.value * CMat3::Identity();
  return u;
}

std::array<CMat3, 3> fullspace_gradient(const FieldPair& pair,
                                        const FrequencyContext& ctx,
                                        const Material& mat, double r_min) {
  const Vec3 d = pair.rvec();
  const PhiDerivs p1 = phi_derivs(d, ctx.k1, r_min);
  const PhiDerivs p2 = phi_derivs(d, ctx.k2, r_min);
  const cdouble k2sq = ctx.k2 * ctx.k2;
  const double c = 1.0 / (4.0 * kPi * mat.mu);
  std::array<CMat3, 3> grad;
  for (int l = 0; l < 3; ++l) {
    grad[l] = c / k2sq * (p2.third[l] - p1.third[l]);
    grad[l] += c * p2.grad[l] * CMat3::Identity();
  }
  return grad;
}

Stress3 fullspace_stress(const FieldPair& pair, const FrequencyContext& ctx,
                         const Material& mat, double r_min) {
  return stress_from_gradient(fullspace_gradient(pair, ctx, mat, r_min), mat);
}

void spectral_D_matrices(double eta1, double eta2, const FrequencyContext& ctx,
                         CMat3& D1, CMat3& D2) {
  const cdouble b1 = vertical_wavenumber(eta1, eta2, ctx.k1, false);
  const cdouble b2 = vertical_wavenumber(eta1, eta2, ctx.k2, false);
  const cdouble I(0.0, 1.0);
  const cdouble k2sq = ctx.k2 * ctx.k2;
  D1 << -eta1 * eta1, -eta1 * eta2, I * eta1 * b1,
        -eta1 * eta2, -eta2 * eta2, I * eta2 * b1,
        I * eta1 * b1, I * eta2 * b1, b1 * b1;
  D2 << -eta1 * eta1 + k2sq, -eta1 * eta2, I * eta1 * b2,
        -eta1 * eta2, -eta2 * eta2 + k2sq, I * eta2 * b2,
        I * eta1 * b2, I * eta2 * b2, b2 * b2 + k2sq;
}

CMat3 spectral_fullspace_traction(double eta1, double eta2, double xi3,
                                  const FrequencyContext& ctx,
                                  const Material& mat) {
  if (xi3 >= 0.0)
    throw SurfaceSource("spectral_fullspace_traction: xi3 must be < 0");

  const cdouble b1 = vertical_wavenumber(eta1, eta2, ctx.k1, false);
  const cdouble b2 = vertical_wavenumber(eta1, eta2, ctx.k2, false);
  const cdouble I(0.0, 1.0);
  const cdouble k2sq = ctx.k2 * ctx.k2;
  const cdouble E1 = std::exp(b1 * xi3) / b1;
  const cdouble E2 = std::exp(b2 * xi3) / b2;

  // Derivative symbols of e^{-beta (x3-xi3)} e^{i eta.x} at the surface.
  const CVec3 s1(I * eta1, I * eta2, -b1);
  const CVec3 s2(I * eta1, I * eta2, -b2);
  // Dh = s s^T (+ k2^2 I for the shear part): the D matrices with the
  // (.,3)/(3,.) sign that a further d/dx3 produces.
  CMat3 Dh1 = s1 * s1.transpose();
  CMat3 Dh2 = s2 * s2.transpose() + k2sq * CMat3::Identity();

  // u_{jk,l} per unit list normalization: (Dh2_jk s2_l E2 - Dh1_jk s1_l E1)/k2^2
  auto du = [&](int j, int k, int l) {
    return (Dh2(j, k) * s2[l] * E2 - Dh1(j, k) * s1[l] * E1) / k2sq;
  };

  CMat3 Q;
  for (int k = 0; k < 3; ++k) {
    Q(0, k) = mat.mu * (du(0, k, 2) + du(2, k, 0));
    Q(1, k) = mat.mu * (du(1, k, 2) + du(2, k, 1));
    Q(2, k) = mat.lambda * (du(0, k, 0) + du(1, k, 1)) +
              (mat.lambda + 2.0 * mat.mu) * du(2, k, 2);
  }
  return Q * (mat.mu / (4.0 * kPi));
}

SpectralTractionMatrices spectral_traction_matrices(double eta1, double eta2,
                                                    double xi3,
                                                    const FrequencyContext& ctx,
                                                    const Material& mat) {
  SpectralTractionMatrices out;
  spectral_D_matrices(eta1, eta2, ctx, out.D1, out.D2);
  out.Q = spectral_fullspace_traction(eta1, eta2, xi3, ctx, mat);
  return out;
}

}  // namespace hsgreen
