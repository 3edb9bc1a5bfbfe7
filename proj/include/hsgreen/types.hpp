// Shared value types for the half-space Green's function library.
#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace hsgreen {

using cdouble = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kPi = 3.14159265358979323846;

// Source/receiver pair. xi is where the point load acts, x where the
// response is evaluated.
struct FieldPair {
  Vec3 x = Vec3::Zero();
  Vec3 xi = Vec3::Zero();

  double r() const { return (x - xi).norm(); }
  Vec3 rvec() const { return x - xi; }
};

// Stress tensor sigma_ijm: face index i, displacement component j, load
// direction m. One 3x3 (j,m) block per face index, so the traction on a
// plane with normal n is n0*s[0] + n1*s[1] + n2*s[2].
struct Stress3 {
  std::array<CMat3, 3> s{CMat3::Zero(), CMat3::Zero(), CMat3::Zero()};

  CMat3 traction(const Vec3& n) const {
    return n[0] * s[0] + n[1] * s[1] + n[2] * s[2];
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& b : s) m = std::max(m, b.cwiseAbs().maxCoeff());
    return m;
  }
  Stress3& operator+=(const Stress3& o) {
    for (int i = 0; i < 3; ++i) s[i] += o.s[i];
    return *this;
  }
};

// Displacement gradient grad[l](j,m) = d_l u_{jm} -> viscoelastic stress
// sigma_ijm = lambda delta_ij u_{lm,l} + mu (u_{im,j} + u_{jm,i}).
// Defined here because both the closed-form and the spectral kernels use it.
struct Material;
Stress3 stress_from_gradient(const std::array<CMat3, 3>& grad,
                             const Material& mat);

}  // namespace hsgreen
