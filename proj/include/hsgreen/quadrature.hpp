// Inverse 2D Fourier integration over the lateral wavenumber plane: polar
// tensor-product rule with adaptive radial bisection, plus the correction
// term w (displacement, gradient, stress) and the plane-wave self-test.
#pragma once

#include <functional>
#include <vector>

#include "hsgreen/material.hpp"
#include "hsgreen/types.hpp"

namespace hsgreen {

// Calibrated constant of the plane-wave representation of e^{ikr}/r.
inline constexpr double kWeylConstant = 1.0 / (2.0 * kPi);

struct QuadratureConfig {
  double rel_tol = 1e-6;
  double truncation_radius = 0.0;  // 0 = auto from the decay bound
  int radial_panels = 32;          // initial partition
  int angular_order = 16;          // Gauss order per panel (both directions)
  int max_refine_depth = 12;
  long max_panels = 40000;

  // Inputs of the auto truncation bound
  //   exp(-(R - k_max_re) * decay_depth) < rel_tol / 100,
  // filled by the correction/Weyl wrappers from the geometry. Required when
  // truncation_radius == 0.
  double decay_depth = 0.0;
  double k_max_re = 0.0;

  // Near-surface exclusion floor on |x3 + xi3|, in units of 1/|k2|.
  double h_min_factor = 1e-3;

  // Cutoff for coincident field points in the closed-form kernels.
  double r_min = 1e-12;
};

struct IntegralResult {
  cdouble value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
  double truncation_radius_used = 0.0;
  bool converged = true;
};

struct SpectralIntegral {
  CMat3 value = CMat3::Zero();
  Eigen::Matrix3d abs_error = Eigen::Matrix3d::Zero();
  long evaluations = 0;
  double truncation_radius_used = 0.0;
  bool converged = true;

  IntegralResult component(int j, int k) const {
    return {value(j, k), abs_error(j, k), evaluations, truncation_radius_used,
            converged};
  }
};

// integral of f(eta1,eta2) e^{i(eta1 dx1 + eta2 dx2)} over R^2, truncated at
// the configured radius. Angular panel boundaries include pi/2 and 3pi/2 so
// Gauss nodes never touch the eta1 = 0 line; panel widths respect the
// oscillation bound width <= pi / (2 |dx| rho).
SpectralIntegral inverse_fourier_2d(const std::function<CMat3(double, double)>& f,
                                    double dx1, double dx2,
                                    const QuadratureConfig& cfg);

// A * integral of (e^{-beta |x3-xi3|} / beta) e^{i eta.(x-xi)} d eta.
// With A = kWeylConstant this equals e^{ikr}/r. Requires Im k > 0 and
// x3 != xi3.
IntegralResult weyl_phi(const FieldPair& pair, cdouble k, double A,
                        const QuadratureConfig& cfg);

// ---------------------------------------------------------------------------
// Correction term. All entries require x3 < 0, xi3 < 0 and
// x3 + xi3 <= -h_min with h_min = h_min_factor / |k2|.

SpectralIntegral correction_displacement(const FieldPair& pair,
                                         const Material& mat,
                                         const FrequencyContext& ctx,
                                         const QuadratureConfig& cfg);

struct StressIntegral {
  Stress3 value;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
  double truncation_radius_used = 0.0;
  bool converged = true;
};

StressIntegral correction_stress(const FieldPair& pair, const Material& mat,
                                 const FrequencyContext& ctx,
                                 const QuadratureConfig& cfg);

// Displacement, gradient and stress from one shared adaptive pass.
struct CorrectionField {
  CMat3 displacement = CMat3::Zero();
  std::array<CMat3, 3> gradient{CMat3::Zero(), CMat3::Zero(), CMat3::Zero()};
  Stress3 stress;
  double disp_error = 0.0;
  double grad_error = 0.0;
  long evaluations = 0;
  double truncation_radius_used = 0.0;
  bool converged = true;
};

CorrectionField correction_field(const FieldPair& pair, const Material& mat,
                                 const FrequencyContext& ctx,
                                 const QuadratureConfig& cfg);

// Raw integrand of the correction displacement (physical scaling, lateral
// phase excluded); exposed so tests can integrate it independently.
CMat3 correction_integrand(double eta1, double eta2, double x3, double xi3,
                           const Material& mat, const FrequencyContext& ctx);

// ---------------------------------------------------------------------------
// Frozen node sets. Finite node sums of the spectral modes solve the
// homogeneous equation exactly, so differencing several field points on one
// shared node set measures only the finite-difference truncation error and
// not quadrature noise. Used by the residual checks.

struct SpectralNode {
  double eta1, eta2;
  double weight;  // radial x angular weight including the polar rho factor
};

// Adapts the quadrature for the reference pair and returns the node list in
// deterministic order.
std::vector<SpectralNode> correction_node_set(const FieldPair& ref,
                                              const Material& mat,
                                              const FrequencyContext& ctx,
                                              const QuadratureConfig& cfg);

struct CorrectionSample {
  CMat3 displacement = CMat3::Zero();
  std::array<CMat3, 3> gradient{CMat3::Zero(), CMat3::Zero(), CMat3::Zero()};
};

// Evaluates the correction field at several receivers on one node set,
// reusing the per-node boundary solve.
std::vector<CorrectionSample> correction_on_nodes(
    const std::vector<SpectralNode>& nodes, const Vec3& xi,
    const std::vector<Vec3>& xs, const Material& mat,
    const FrequencyContext& ctx);

}  // namespace hsgreen
