#pragma once

// Rigid-body equations of motion in body axes:
//   m dV_b/dt + m Omega_b x V_b = T_be F_g + F_right + F_left + A
//   I_b dOmega_b/dt + Omega_b x (I_b Omega_b) = M_right + M_left + B
//   dq_b/dt = Z(q_b) Omega_b,   dX_e/dt = T_be^T V_b

#include <algorithm>
#include <string>

#include "cpgflight/common.hpp"
#include "cpgflight/rigid_body.hpp"

namespace cpgflight {

inline constexpr double kGimbalGuard = deg2rad(88.0);

/// Direction cosine matrix taking inertial vectors to body axes (Z-Y-X).
inline Mat3 inertial_to_body(const Vec3& euler) {
  const double cf = std::cos(euler(0)), sf = std::sin(euler(0));
  const double ct = std::cos(euler(1)), st = std::sin(euler(1));
  const double cp = std::cos(euler(2)), sp = std::sin(euler(2));
  Mat3 t;
  t << ct * cp, ct * sp, -st,
       sf * st * cp - cf * sp, sf * st * sp + cf * cp, sf * ct,
       cf * st * cp + sf * sp, cf * st * sp - sf * cp, cf * ct;
  return t;
}

inline Vec3 gravity_in_body(const Vec3& euler, const MassProperties& mp) {
  return inertial_to_body(euler) * Vec3(0.0, 0.0, mp.mass * mp.gravity);
}

/// dV_b/dt given the sum of aerodynamic and auxiliary body forces (gravity is
/// added here).
inline Vec3 translational_derivative(const RigidBodyState& s,
                                     const Vec3& applied_force,
                                     const MassProperties& mp) {
  return (gravity_in_body(s.euler, mp) + applied_force) / mp.mass -
         s.omega_body.cross(s.v_body);
}

inline Vec3 rotational_derivative(const RigidBodyState& s,
                                  const Vec3& total_moment,
                                  const MassProperties& mp) {
  const Vec3 h = mp.inertia * s.omega_body;
  return mp.inertia.ldlt().solve(total_moment - s.omega_body.cross(h));
}

/// Z-Y-X Euler angle rates. Throws SimulationAbort("vehicle", ...) once the
/// pitch angle reaches the gimbal guard.
inline Vec3 euler_rates(const Vec3& euler, const Vec3& omega) {
  const double phi = euler(0), theta = euler(1);
  if (std::abs(theta) >= kGimbalGuard)
    throw SimulationAbort("vehicle", "gimbal lock: |theta_b| reached " +
                                         std::to_string(rad2deg(std::abs(theta))) +
                                         " deg (guard 88 deg)");
  const double p = omega(0), q = omega(1), r = omega(2);
  const double sf = std::sin(phi), cf = std::cos(phi);
  const double tt = std::tan(theta), ct = std::cos(theta);
  return {p + q * sf * tt + r * cf * tt, q * cf - r * sf, (q * sf + r * cf) / ct};
}

inline Vec3 position_rate(const RigidBodyState& s) {
  return inertial_to_body(s.euler).transpose() * s.v_body;
}

/// Body angle of attack and side-slip from the body velocity.
inline double body_alpha(const Vec3& v_body) {
  return std::atan2(v_body.z(), v_body.x());
}
inline double body_sideslip(const Vec3& v_body) {
  const double v = v_body.norm();
  return v > 0.0 ? std::asin(std::clamp(v_body.y() / v, -1.0, 1.0)) : 0.0;
}

/// Fuselage/tail loads. Only a pitching moment is modelled:
///   B_y = 1/2 rho |V_b|^2 S_ref c_ref (C_m0 + C_m_alpha alpha_x).
struct AuxiliaryLoads {
  double cm0 = 0.1;
  double cm_alpha = -0.2;
  double s_ref = 2.0 * 0.32 * 0.15;  ///< m^2, total wing area by default
  double c_ref = 0.15;               ///< m
  Vec3 extra_force = Vec3::Zero();   ///< A, N
};

struct BodyLoads {
  Vec3 force = Vec3::Zero();   ///< A
  Vec3 moment = Vec3::Zero();  ///< B
};

inline BodyLoads body_loads(const RigidBodyState& s, const AuxiliaryLoads& aux,
                            double air_density) {
  BodyLoads out;
  out.force = aux.extra_force;
  const double v2 = s.v_body.squaredNorm();
  if (v2 == 0.0) return out;
  out.moment.y() = 0.5 * air_density * v2 * aux.s_ref * aux.c_ref *
                   (aux.cm0 + aux.cm_alpha * body_alpha(s.v_body));
  return out;
}

}  // namespace cpgflight
