#include "hsgreen/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsgreen/errors.hpp"
#include "hsgreen/fullspace.hpp"

namespace hsgreen {

SpectralPoint make_spectral_point(double eta1, double eta2,
                                  const FrequencyContext& ctx,
                                  bool check_branch) {
  SpectralPoint pt;
  pt.eta1 = eta1;
  pt.eta2 = eta2;
  pt.beta1 = vertical_wavenumber(eta1, eta2, ctx.k1, check_branch);
  pt.beta2 = vertical_wavenumber(eta1, eta2, ctx.k2, check_branch);
  pt.beta3 = pt.beta2;
  return pt;
}

CMat3 operator_matrix(double eta1, double eta2, cdouble beta,
                      const FrequencyContext& ctx, const Material& mat) {
  const double lm = mat.lambda + mat.mu;
  const cdouble lap = -eta1 * eta1 - eta2 * eta2 + beta * beta;
  const cdouble rw = mat.rho * ctx.damped_omega_sq;
  const cdouble diag = mat.mu * lap + rw;
  const cdouble I(0.0, 1.0);
  CMat3 M;
  M << lm * (-eta1 * eta1) + diag, lm * (-eta1 * eta2), lm * I * eta1 * beta,
       lm * (-eta1 * eta2), lm * (-eta2 * eta2) + diag, lm * I * eta2 * beta,
       lm * I * eta1 * beta, lm * I * eta2 * beta, lm * beta * beta + diag;
  return M;
}

cdouble det_operator(double eta1, double eta2, cdouble beta,
                     const FrequencyContext& ctx, const Material& mat) {
  return operator_matrix(eta1, eta2, beta, ctx, mat).determinant();
}

Eigenbasis eigenbasis(const SpectralPoint& pt) {
  const cdouble I(0.0, 1.0);
  Eigenbasis b;
  b.nu1 = CVec3(-pt.eta1, -pt.eta2, I * pt.beta1);
  b.nu2 = CVec3(-pt.beta2, 0.0, I * pt.eta1);
  b.nu3 = CVec3(-pt.eta2, pt.eta1, 0.0);

  const double cross = b.nu2.cross(b.nu3).norm();
  if (cross <= 1e-12 * b.nu2.norm() * b.nu3.norm()) {
    std::ostringstream os;
    os << "eigenbasis degenerate at eta1 = " << pt.eta1
       << " (nu2 parallel to nu3); keep quadrature nodes off the eta1=0 line";
    throw DegenerateBasis(os.str());
  }
  return b;
}

CVec3 mode_traction_rows(const CVec3& nu, cdouble beta, double eta1,
                         double eta2, const Material& mat) {
  const cdouble I(0.0, 1.0);
  CVec3 t;
  t[0] = mat.mu * (beta * nu[0] + I * eta1 * nu[2]);
  t[1] = mat.mu * (beta * nu[1] + I * eta2 * nu[2]);
  t[2] = mat.lambda * (I * eta1 * nu[0] + I * eta2 * nu[1]) +
         (mat.lambda + 2.0 * mat.mu) * beta * nu[2];
  return t;
}

CMat3 assemble_N(const SpectralPoint& pt, const Eigenbasis& basis, double xi3,
                 const Material& mat) {
  if (xi3 >= 0.0) throw SurfaceSource("assemble_N: xi3 must be < 0");
  const cdouble betas[3] = {pt.beta1, pt.beta2, pt.beta3};
  const CVec3* nus[3] = {&basis.nu1, &basis.nu2, &basis.nu3};
  CMat3 N;
  for (int m = 0; m < 3; ++m) {
    if (std::abs(betas[m]) < 1e-14) {
      std::ostringstream os;
      os << "assemble_N: |beta_" << m + 1 << "| = " << std::abs(betas[m])
         << " too small for the e^{beta xi3}/beta column factor";
      throw ModeDegenerate(os.str());
    }
    const cdouble colfac = std::exp(betas[m] * xi3) / betas[m];
    N.col(m) = mode_traction_rows(*nus[m], betas[m], pt.eta1, pt.eta2, mat) *
               colfac;
  }
  return N;
}

cdouble delta_closed(const SpectralPoint& pt, double xi3, const Material& mat,
                     const FrequencyContext& ctx) {
  if (xi3 >= 0.0) throw SurfaceSource("delta_closed: xi3 must be < 0");
  const cdouble b1 = pt.beta1, b2 = pt.beta2;
  if (std::abs(b1) < 1e-14 || std::abs(b2) < 1e-14)
    throw ModeDegenerate("delta_closed: beta too small");
  const double es = pt.eta1 * pt.eta1 + pt.eta2 * pt.eta2;
  const cdouble k2sq = ctx.k2 * ctx.k2;
  const cdouble pre = std::exp((b1 + 2.0 * b2) * xi3) / (b1 * b2 * b2);
  const cdouble brace =
      4.0 * mat.mu * es * b1 * b2 +
      (mat.lambda * es - (mat.lambda + 2.0 * mat.mu) * b1 * b1) *
          (2.0 * es - k2sq);
  return pre * cdouble(0.0, 1.0) * mat.mu * mat.mu * pt.eta1 * b2 * brace;
}

CMat3 solve_coefficients(const CMat3& N, const CMat3& Q, double cond_limit,
                         double* cond_out) {
  if (cond_out || std::isfinite(cond_limit)) {
    // Frobenius condition number; exact for 3x3 via the closed-form inverse.
    const double ninv = N.inverse().norm();
    const double cond =
        std::isfinite(ninv) ? N.norm() * ninv
                            : std::numeric_limits<double>::infinity();
    if (cond_out) *cond_out = cond;
    if (cond > cond_limit) {
      std::ostringstream os;
      os << "solve_coefficients: condition estimate " << cond << " exceeds "
         << cond_limit;
      throw SingularSystem(os.str());
    }
  }
  return Eigen::PartialPivLU<CMat3>(N).solve(-Q);
}

BoundarySystem boundary_system(const SpectralPoint& pt, const Eigenbasis& basis,
                               double xi3, const Material& mat,
                               const FrequencyContext& ctx, double q_scale,
                               double cond_limit) {
  BoundarySystem sys;
  sys.N = assemble_N(pt, basis, xi3, mat);
  sys.Q = spectral_fullspace_traction(pt.eta1, pt.eta2, xi3, ctx, mat);
  sys.delta = sys.N.determinant();
  sys.C = solve_coefficients(sys.N, (q_scale * sys.Q).eval(), cond_limit,
                             &sys.cond_estimate);
  return sys;
}

ScanReport hypothesis_scan(const Material& mat, const FrequencyContext& ctx,
                           double xi3, const ScanGrid& grid) {
  if (xi3 >= 0.0) throw SurfaceSource("hypothesis_scan: xi3 must be < 0");
  if (grid.n_r < 2 || grid.n_theta < 4)
    throw ValidationError("hypothesis_scan: grid too small");

  const double kref = std::abs(ctx.k2);
  const double dr = (grid.r_max - grid.r_min) / grid.n_r;

  // Midpoint angles; reject grids whose nodes touch eta1 = 0.
  std::vector<double> thetas(grid.n_theta);
  for (int j = 0; j < grid.n_theta; ++j) {
    thetas[j] = (j + 0.5) * 2.0 * kPi / grid.n_theta;
    if (std::abs(std::cos(thetas[j])) < 1e-12)
      throw ValidationError(
          "hypothesis_scan: grid touches the degenerate line eta1 = 0 "
          "(angle too close to pi/2 or 3pi/2)");
  }

  ScanReport rep;
  rep.grid = grid;
  rep.xi3 = xi3;
  rep.min_abs = std::numeric_limits<double>::infinity();

  std::vector<double> profile(grid.n_r,
                              std::numeric_limits<double>::infinity());
  std::vector<double> all_abs;
  all_abs.reserve(static_cast<size_t>(grid.n_r) * grid.n_theta);

  std::vector<double> radii(grid.n_r);
  for (int i = 0; i < grid.n_r; ++i)
    radii[i] = (grid.r_min + (i + 0.5) * dr) * kref;

  for (int i = 0; i < grid.n_r; ++i) {
    for (int j = 0; j < grid.n_theta; ++j) {
      const double e1 = radii[i] * std::cos(thetas[j]);
      const double e2 = radii[i] * std::sin(thetas[j]);
      // Branch-line nodes are expected in the elastic limit; scan unchecked.
      const SpectralPoint pt = make_spectral_point(e1, e2, ctx, false);
      const cdouble delta = delta_closed(pt, xi3, mat, ctx);
      const cdouble dhat =
          delta / (e1 * std::exp((pt.beta1 + 2.0 * pt.beta2) * xi3));
      const double a = std::abs(dhat);
      all_abs.push_back(a);
      profile[i] = std::min(profile[i], a);
      if (a < rep.min_abs) {
        rep.min_abs = a;
        rep.argmin_eta1 = e1;
        rep.argmin_eta2 = e2;
        rep.argmin_radius = radii[i];
      }
    }
  }

  std::nth_element(all_abs.begin(), all_abs.begin() + all_abs.size() / 2,
                   all_abs.end());
  rep.median_abs = all_abs[all_abs.size() / 2];

  const double thresh = 0.1 * rep.median_abs;
  for (int i = 1; i + 1 < grid.n_r; ++i) {
    if (profile[i] < profile[i - 1] && profile[i] < profile[i + 1] &&
        profile[i] < thresh)
      rep.candidates.push_back({radii[i], profile[i]});
  }
  std::sort(rep.candidates.begin(), rep.candidates.end(),
            [](const ScanCandidate& a, const ScanCandidate& b) {
              return a.min_abs < b.min_abs;
            });
  return rep;
}

}  // namespace hsgreen
