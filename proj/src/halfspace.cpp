#include "hsgreen/halfspace.hpp"

#include <cmath>

#include "hsgreen/errors.hpp"
#include "hsgreen/fullspace.hpp"

namespace hsgreen {

namespace {

double frob(const CMat3& m) { return m.norm(); }

}  // namespace

GreenResult green_displacement(const Vec3& x, const Vec3& xi,
                               const FrequencyContext& ctx, const Material& mat,
                               const QuadratureConfig& cfg, bool with_stress) {
  const FieldPair pair{x, xi};
  GreenResult out;
  out.fullspace_part = fullspace_displacement(pair, ctx, mat, cfg.r_min);

  if (with_stress) {
    const CorrectionField w = correction_field(pair, mat, ctx, cfg);
    out.correction_part = w.displacement;
    Stress3 sig = fullspace_stress(pair, ctx, mat, cfg.r_min);
    sig += w.stress;
    out.stress = sig;
    out.quadrature_error = w.disp_error;
    out.flags.no_convergence = !w.converged;
  } else {
    const SpectralIntegral w = correction_displacement(pair, mat, ctx, cfg);
    out.correction_part = w.value;
    out.quadrature_error = w.abs_error.maxCoeff();
    out.flags.no_convergence = !w.converged;
  }
  out.displacement = out.fullspace_part + out.correction_part;

  const double h_min = cfg.h_min_factor / std::abs(ctx.k2);
  out.flags.near_surface = -(x.z() + xi.z()) < 3.0 * h_min;
  return out;
}

GreenResult green_displacement(const Vec3& x, const Vec3& xi, double omega,
                               const Material& mat,
                               const QuadratureConfig& cfg) {
  return green_displacement(x, xi, frequency_context(mat, omega), mat, cfg);
}

CMat3 green_traction(const Vec3& x, const Vec3& xi, const FrequencyContext& ctx,
                     const Material& mat, const Vec3& normal,
                     const QuadratureConfig& cfg) {
  const FieldPair pair{x, xi};
  Stress3 sig = fullspace_stress(pair, ctx, mat, cfg.r_min);
  sig += correction_field(pair, mat, ctx, cfg).stress;
  return sig.traction(normal);
}

ResidualReport traction_free_residual(
    const Vec3& xi, const FrequencyContext& ctx, const Material& mat,
    const std::vector<Eigen::Vector2d>& surface_samples, double epsilon,
    const QuadratureConfig& cfg, double tolerance, bool include_correction) {
  const Vec3 n(0.0, 0.0, 1.0);
  ResidualReport rep;
  rep.metric_name = include_correction ? "traction_free" : "traction_free_uncorrected";
  rep.tolerance = tolerance;

  double worst = 0.0;
  for (const auto& s : surface_samples) {
    const Vec3 x(s.x(), s.y(), -epsilon);
    rep.sample_points.push_back(x);
    const FieldPair pair{x, xi};
    const CMat3 Tu = fullspace_stress(pair, ctx, mat, cfg.r_min).traction(n);
    CMat3 Tg = Tu;
    if (include_correction)
      Tg += correction_field(pair, mat, ctx, cfg).stress.traction(n);
    worst = std::max(worst, frob(Tg) / frob(Tu));
  }
  rep.value = worst;
  rep.pass = rep.value <= rep.tolerance;
  return rep;
}

ResidualReport pde_residual(const Vec3& x, const Vec3& xi,
                            const FrequencyContext& ctx, const Material& mat,
                            double step, const QuadratureConfig& cfg,
                            FieldPart part, double tolerance) {
  const FieldPair pair{x, xi};
  if (pair.r() < 10.0 * step)
    throw ValidationError("pde_residual: x must stay >= 10 steps away from xi");

  // Stencil: center plus +/- step along each axis, in a fixed order.
  std::vector<Vec3> pts{x};
  for (int i = 0; i < 3; ++i) {
    Vec3 p = x, m = x;
    p[i] += step;
    m[i] -= step;
    pts.push_back(p);
    pts.push_back(m);
  }

  const cdouble rho_wt2 = mat.rho * ctx.damped_omega_sq;
  CMat3 disp = CMat3::Zero();
  std::vector<Stress3> sig(pts.size());

  if (part == FieldPart::Fullspace || part == FieldPart::Total) {
    disp += fullspace_displacement(FieldPair{pts[0], xi}, ctx, mat, cfg.r_min);
    for (size_t i = 0; i < pts.size(); ++i) {
      Stress3 s = fullspace_stress(FieldPair{pts[i], xi}, ctx, mat, cfg.r_min);
      sig[i] += s;
    }
  }
  if (part == FieldPart::Correction || part == FieldPart::Total) {
    // One frozen node set for the whole stencil.
    const auto nodes = correction_node_set(pair, mat, ctx, cfg);
    const auto samples = correction_on_nodes(nodes, xi, pts, mat, ctx);
    disp += samples[0].displacement;
    for (size_t i = 0; i < pts.size(); ++i)
      sig[i] += stress_from_gradient(samples[i].gradient, mat);
  }

  // residual_jm = d_i sigma_ijm + rho w~^2 g_jm, central differences.
  CMat3 res = rho_wt2 * disp;
  for (int i = 0; i < 3; ++i)
    res += (sig[1 + 2 * i].s[i] - sig[2 + 2 * i].s[i]) / (2.0 * step);

  ResidualReport rep;
  rep.metric_name = part == FieldPart::Fullspace    ? "pde_residual_fullspace"
                    : part == FieldPart::Correction ? "pde_residual_correction"
                                                    : "pde_residual";
  rep.sample_points = {x};
  rep.tolerance = tolerance;
  const double scale = std::abs(rho_wt2) * disp.cwiseAbs().maxCoeff();
  rep.value = res.cwiseAbs().maxCoeff() / scale;
  rep.pass = rep.value <= rep.tolerance;
  return rep;
}

}  // namespace hsgreen
