#pragma once

// Frame chain body <- stroke plane <- wing and blade-element velocities.
//
// x_b = T_bs(theta_s) x_s + d and x_s = T_sw(phi_w, psi_w) x_w for the right
// wing. The left wing is the mirror image of the right one through the body
// x-z plane: its quantities are computed as a right wing in the mirrored
// world (M = diag(1, -1, 1)) and mapped back. In that construction positive
// psi_w sweeps either wing forward and positive phi_w raises it.

#include <span>

#include "cpgflight/common.hpp"
#include "cpgflight/rigid_body.hpp"

namespace cpgflight {

enum class WingSide { Right, Left };

struct StrokeFrame {
  double theta_s = 0.0;       ///< stroke-plane inclination, rad
  double theta_s_rate = 0.0;  ///< rad/s
  Vec3 d = Vec3::Zero();      ///< stroke-frame origin in the body frame, m
  WingSide side = WingSide::Right;
};

struct WingJointState {
  double phi = 0.0;    ///< flapping, rad (positive up)
  double theta = 0.0;  ///< wing pitch, rad
  double psi = 0.0;    ///< lead-lag, rad (positive forward)
  double phi_rate = 0.0;
  double theta_rate = 0.0;
  double psi_rate = 0.0;
};

struct BladeElement {
  double r = 0.0;      ///< span coordinate, m
  double dr = 0.01;    ///< strip width, m
  double chord = 0.15; ///< m
  double span = 0.32;  ///< wing span R the element belongs to, m
  Vec3 deformation = Vec3::Zero();       ///< (x_w, y_w, z_w)(r), m
  Vec3 deformation_rate = Vec3::Zero();  ///< m/s
};

/// Local flow at a blade element. For the left wing, `v_wind` is expressed in
/// the mirrored wing frame (span axis outboard); its x and z components are
/// the physical chordwise and normal components for either wing.
struct FlowSample {
  Vec3 v_wind = Vec3::Zero();
  double beta = 0.0;   ///< local incident angle, rad
  double alpha = 0.0;  ///< local angle of attack, rad
  double v_r = 0.0;    ///< speed in the wing x-z plane, m/s
  double k_r = 0.0;    ///< reduced frequency (0 when undefined)
  bool degenerate = false;
};

inline const Mat3& mirror_y() {
  static const Mat3 m = Vec3(1.0, -1.0, 1.0).asDiagonal();
  return m;
}

/// Rotation about y by theta_s taking stroke-frame coordinates to body axes.
inline Mat3 stroke_to_body(double theta_s) {
  const double c = std::cos(theta_s), s = std::sin(theta_s);
  Mat3 t;
  t << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return t;
}

/// Rotation about the wing y axis by the wing pitch angle.
inline Mat3 wing_pitch_rotation(double theta_w) { return stroke_to_body(theta_w); }

namespace detail {

inline Mat3 wing_to_stroke_right(double phi, double psi) {
  const double cp = std::cos(psi), sp = std::sin(psi);
  const double cf = std::cos(phi), sf = std::sin(phi);
  Mat3 lead_lag, flap;
  lead_lag << cp, sp, 0.0,
              -sp, cp, 0.0,
              0.0, 0.0, 1.0;
  flap << 1.0, 0.0, 0.0,
          0.0, cf, sf,
          0.0, -sf, cf;
  return lead_lag * flap;
}

}  // namespace detail

/// T_sw(phi_w, psi_w): lead-lag about z_s followed by flapping about the new x.
inline Mat3 wing_to_stroke(double phi, double psi, WingSide side) {
  const Mat3 right = detail::wing_to_stroke_right(phi, psi);
  if (side == WingSide::Right) return right;
  return mirror_y() * right * mirror_y();
}

/// A blade element's body-frame inputs seen from the right-wing side: the
/// left wing is handled by reflecting velocities (polar vectors) and angular
/// rates (pseudovectors) through the x-z plane.
struct CanonicalBodyInputs {
  Vec3 v_body;
  Vec3 omega_body;
  Vec3 d;
};

inline CanonicalBodyInputs canonical_inputs(const RigidBodyState& body,
                                            const StrokeFrame& frame) {
  if (frame.side == WingSide::Right)
    return {body.v_body, body.omega_body, frame.d};
  return {mirror_y() * body.v_body, -(mirror_y() * body.omega_body),
          mirror_y() * frame.d};
}

/// Angular rate of the wing expressed in the stroke frame (right-wing form).
inline Vec3 stroke_frame_rate(const Vec3& omega_body_canonical,
                              const StrokeFrame& frame,
                              const WingJointState& j) {
  return stroke_to_body(frame.theta_s).transpose() * omega_body_canonical +
         Vec3(-std::cos(j.psi) * j.phi_rate,
              std::sin(j.psi) * j.phi_rate + frame.theta_s_rate,
              -j.psi_rate);
}

/// Velocity of the blade element in the wing frame:
///   V_w = T_ws T_sb (V_b + Omega_b x d) + (T_ws Omega_tot) x ((0, r, 0) + def)
///         + def_rate.
/// Only the velocity part of the returned sample is filled in.
inline FlowSample blade_wind_velocity(const RigidBodyState& body,
                                      const StrokeFrame& frame,
                                      const WingJointState& joints,
                                      const BladeElement& elem) {
  if (!(elem.r >= 0.0 && elem.r <= elem.span))
    throw DomainError("blade_wind_velocity: r outside [0, R]");
  const CanonicalBodyInputs in = canonical_inputs(body, frame);
  const Mat3 t_ws = detail::wing_to_stroke_right(joints.phi, joints.psi).transpose();
  const Mat3 t_sb = stroke_to_body(frame.theta_s).transpose();
  const Vec3 omega_tot = stroke_frame_rate(in.omega_body, frame, joints);
  const Vec3 arm = Vec3(0.0, elem.r, 0.0) + elem.deformation;
  FlowSample s;
  s.v_wind = t_ws * t_sb * (in.v_body + in.omega_body.cross(in.d)) +
             (t_ws * omega_tot).cross(arm) + elem.deformation_rate;
  return s;
}

/// Fills beta, alpha and V_r from the velocity. The spanwise component is
/// ignored. Zero in-plane velocity marks the sample degenerate.
inline FlowSample local_flow_angles(FlowSample s, double theta_w) {
  const double vx = s.v_wind.x(), vz = s.v_wind.z();
  s.v_r = std::hypot(vx, vz);
  if (vx == 0.0 && vz == 0.0) {
    s.degenerate = true;
    s.beta = 0.0;
    s.alpha = theta_w;
    return s;
  }
  s.degenerate = false;
  s.beta = std::atan2(-vz, vx);
  s.alpha = theta_w - s.beta;
  return s;
}

/// k_r = phi_w_rate * c / (2 V_b).
inline double reduced_frequency(double phi_rate, double chord, double v_body) {
  if (!(v_body > 0.0))
    throw DomainError("reduced_frequency: undefined for non-positive speed");
  return phi_rate * chord / (2.0 * v_body);
}

/// Body-frame position of the blade element (deformation excluded).
inline Vec3 blade_position(const StrokeFrame& frame, const WingJointState& j,
                           double r) {
  const double sign = frame.side == WingSide::Right ? 1.0 : -1.0;
  return stroke_to_body(frame.theta_s) * wing_to_stroke(j.phi, j.psi, frame.side) *
             Vec3(0.0, sign * r, 0.0) +
         frame.d;
}

}  // namespace cpgflight
