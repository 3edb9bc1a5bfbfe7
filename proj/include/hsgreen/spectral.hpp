// Fixed-wavenumber machinery: operator matrix M, its eigenpairs, the
// boundary matrix N, the closed-form determinant, the coefficient solve
// N C_k = -Q_k and the determinant scan behind the solvability hypothesis.
#pragma once

#include <vector>

#include "hsgreen/material.hpp"
#include "hsgreen/types.hpp"

namespace hsgreen {

struct SpectralPoint {
  double eta1 = 0.0, eta2 = 0.0;
  cdouble beta1, beta2, beta3;  // beta3 == beta2
};

SpectralPoint make_spectral_point(double eta1, double eta2,
                                  const FrequencyContext& ctx,
                                  bool check_branch = true);

// nu1 = (-e1, -e2, i b1), nu2 = (-b2, 0, i e1), nu3 = (-e2, e1, 0).
struct Eigenbasis {
  CVec3 nu1, nu2, nu3;
};

// Fourier symbol of the viscoelasticity operator, with the damped frequency
// used uniformly: M = (lambda+mu) d d^T + (mu (d.d) + rho w~^2) I for
// d = (i e1, i e2, beta), written out entrywise.
CMat3 operator_matrix(double eta1, double eta2, cdouble beta,
                      const FrequencyContext& ctx, const Material& mat);

cdouble det_operator(double eta1, double eta2, cdouble beta,
                     const FrequencyContext& ctx, const Material& mat);

// Throws DegenerateBasis on the line eta1 = 0 where nu2 || nu3.
Eigenbasis eigenbasis(const SpectralPoint& pt);

// Boundary matrix: column m is the surface traction of the mode
// nu^m e^{beta_m (x3+xi3)} / beta_m, i.e. exactly the printed form with the
// e^{beta_m xi3}/beta_m column factors. Throws SurfaceSource / ModeDegenerate.
CMat3 assemble_N(const SpectralPoint& pt, const Eigenbasis& basis, double xi3,
                 const Material& mat);

// Traction rows t_p(nu, beta) of a single mode at x3 = 0 (no exponential,
// no 1/beta). Shared by assemble_N and the correction-term stress assembly.
CVec3 mode_traction_rows(const CVec3& nu, cdouble beta, double eta1,
                         double eta2, const Material& mat);

// Closed-form determinant of N.
cdouble delta_closed(const SpectralPoint& pt, double xi3, const Material& mat,
                     const FrequencyContext& ctx);

// Pivoted direct solve of N C_k = -Q_k for the three columns of Q.
// cond_limit guards against near-singular systems (Frobenius condition via
// the closed-form inverse); an infinite limit skips the guard entirely
// (quadrature nodes never sit on the degenerate line, but may come close at
// controlled distance).
CMat3 solve_coefficients(const CMat3& N, const CMat3& Q,
                         double cond_limit = 1e12,
                         double* cond_out = nullptr);

struct BoundarySystem {
  CMat3 N, Q;
  cdouble delta;
  CMat3 C;
  double cond_estimate = 0.0;
};

// Full system at one spectral point: N, the traction integrand Q of the
// full-space kernel (list normalization), delta = det N, and the solve of
// N C_k = -(q_scale Q)_k. The physical assembly passes
// q_scale = kWeylConstant / mu.
BoundarySystem boundary_system(const SpectralPoint& pt, const Eigenbasis& basis,
                               double xi3, const Material& mat,
                               const FrequencyContext& ctx,
                               double q_scale = 1.0,
                               double cond_limit = 1e12);

// ---------------------------------------------------------------------------
// Determinant scan. delta_hat = delta / (eta1 e^{(b1+2 b2) xi3}) removes the
// known trivial root and the exponential scaling; for genuinely viscoelastic
// input its modulus should stay bounded away from zero, while the elastic
// limit shows the classical Rayleigh ring.

struct ScanGrid {
  double r_min = 0.05;   // in units of |k2|
  double r_max = 2.0;
  int n_r = 200;
  int n_theta = 64;      // midpoint angles; multiple of 4 keeps eta1 != 0
};

struct ScanCandidate {
  double radius;      // |eta| of a local minimum along the radial profile
  double min_abs;     // min |delta_hat| on that ring
};

struct ScanReport {
  ScanGrid grid;
  double xi3 = 0.0;
  double min_abs = 0.0;          // global min |delta_hat|
  double median_abs = 0.0;       // grid median, for a dimensionless reading
  double argmin_eta1 = 0.0, argmin_eta2 = 0.0;
  double argmin_radius = 0.0;
  std::vector<ScanCandidate> candidates;  // rings with pronounced minima
};

// Grid nodes are (r_i, theta_j) with midpoint angles; throws ValidationError
// if any node would touch eta1 = 0 within 1e-12 relative.
ScanReport hypothesis_scan(const Material& mat, const FrequencyContext& ctx,
                           double xi3, const ScanGrid& grid);

}  // namespace hsgreen
