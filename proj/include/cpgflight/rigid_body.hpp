#pragma once

#include "cpgflight/common.hpp"

namespace cpgflight {

/// 6-DOF vehicle state. Euler angles are Z-Y-X (roll, pitch, yaw); the
/// inertial frame has Z positive down, so altitude is -position.z().
struct RigidBodyState {
  Vec3 v_body = Vec3::Zero();      ///< V_b, m/s
  Vec3 omega_body = Vec3::Zero();  ///< (p, q, r), rad/s
  Vec3 euler = Vec3::Zero();       ///< (phi_b, theta_b, psi_b), rad
  Vec3 position = Vec3::Zero();    ///< (X_e, Y_e, Z_e), m

  double altitude() const { return -position.z(); }
};

struct MassProperties {
  double mass = 0.3;                                ///< kg
  Mat3 inertia = 0.0012 * Mat3::Identity();         ///< kg m^2
  double gravity = 9.81;                            ///< m/s^2

  void validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw DomainError("MassProperties: mass must be > 0");
    if (!inertia.allFinite() || !inertia.isApprox(inertia.transpose(), 1e-12))
      throw DomainError("MassProperties: inertia must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw DomainError("MassProperties: inertia must be positive definite");
    if (!std::isfinite(gravity) || gravity < 0.0)
      throw DomainError("MassProperties: gravity must be finite and >= 0");
  }
};

}  // namespace cpgflight
