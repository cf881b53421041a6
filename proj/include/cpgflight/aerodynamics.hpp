#pragma once

// Quasi-steady blade-element aerodynamics.
//
// Per strip of width dr:
//   dL     = 1/2 rho C_L(alpha) c V_r^2 dr
//   dD     = 1/2 rho C_D(alpha) c V_r^2 dr
//   dL_rot = 1/2 rho 2 pi (3/4 - x0_hat) c^2 V_r alpha_dot dr
// and per wing, in the wing frame,
//   F_wz = sum dD sin(beta) - (dL + dL_rot) cos(beta)
//   F_wx = sum -(dL + dL_rot) sin(beta) - dD cos(beta).

#include <optional>
#include <span>
#include <vector>

#include "cpgflight/common.hpp"
#include "cpgflight/kinematics.hpp"

namespace cpgflight {

/// C_L = cl0 + cl_amp sin(cl_slope alpha - cl_shift),
/// C_D = cd0 - cd_amp cos(cd_slope alpha - cd_shift).
/// Slopes multiply alpha in whatever unit the shifts use, so the radian form
/// with shifts in radians is the same curve as the degree form.
struct ForceCoefficientModel {
  double cl0 = 0.225;
  double cl_amp = 1.58;
  double cl_slope = 2.13;
  double cl_shift = deg2rad(7.2);
  double cd0 = 1.92;
  double cd_amp = 1.55;
  double cd_slope = 2.04;
  double cd_shift = deg2rad(9.82);

  bool operator==(const ForceCoefficientModel&) const = default;
};

enum class AlphaRateMode {
  PitchRate,  ///< alpha_dot approximated by theta_w_dot
  Kinematic,  ///< theta_w_dot - beta_dot, beta_dot from the joint trajectory
};

struct AeroModel {
  ForceCoefficientModel coeffs;
  double x0_hat = 0.25;        ///< pitch-axis location along the chord
  double air_density = 1.225;  ///< kg/m^3
  double cl0_moment = 0.0;     ///< C_l0 (roll)
  double cm0 = -0.2;           ///< C_m0 (wing)
  double cm_alpha = -0.12;     ///< C_m_alpha (wing), 1/rad
  double cn0 = 0.0;            ///< C_n0 (yaw)
  AlphaRateMode alpha_rate = AlphaRateMode::PitchRate;

  void validate() const {
    if (!(air_density > 0.0)) throw DomainError("AeroModel: air density must be > 0");
    if (!(x0_hat >= 0.0 && x0_hat < 0.75))
      throw DomainError("AeroModel: x0_hat must lie in [0, 0.75)");
  }

  double rotational_lift_factor() const { return 2.0 * kPi * (0.75 - x0_hat); }
};

struct LiftDrag {
  double cl = 0.0;
  double cd = 0.0;
};

inline LiftDrag lift_drag_coefficients(double alpha,
                                       const ForceCoefficientModel& m = {}) {
  return {m.cl0 + m.cl_amp * std::sin(m.cl_slope * alpha - m.cl_shift),
          m.cd0 - m.cd_amp * std::cos(m.cd_slope * alpha - m.cd_shift)};
}

struct StripLoads {
  double lift = 0.0;
  double drag = 0.0;
  double rot_lift = 0.0;
};

inline StripLoads strip_loads(const FlowSample& sample, const BladeElement& elem,
                              const AeroModel& model, double alpha_rate) {
  if (!(elem.dr > 0.0)) throw DomainError("strip_loads: dr must be > 0");
  if (sample.degenerate || sample.v_r == 0.0) return {};
  const LiftDrag c = lift_drag_coefficients(sample.alpha, model.coeffs);
  const double q_dr = 0.5 * model.air_density * elem.chord * elem.dr;
  const double v2 = sample.v_r * sample.v_r;
  return {q_dr * c.cl * v2, q_dr * c.cd * v2,
          q_dr * model.rotational_lift_factor() * elem.chord * sample.v_r *
              alpha_rate};
}

/// Wing-frame (x, 0, z) force of one strip.
inline Vec3 strip_wing_force(const FlowSample& s, const StripLoads& l) {
  const double sb = std::sin(s.beta), cb = std::cos(s.beta);
  const double lift = l.lift + l.rot_lift;
  return {-lift * sb - l.drag * cb, 0.0, l.drag * sb - lift * cb};
}

struct StripResult {
  BladeElement elem;
  FlowSample flow;
  StripLoads loads;
};

struct WingLoads {
  Vec3 f_wing = Vec3::Zero();  ///< (F_wx, 0, F_wz)
  Vec3 f_body = Vec3::Zero();  ///< body-frame force, N
  Vec3 m_body = Vec3::Zero();  ///< body-frame moment about the c.g., N m
};

struct WingGeometry {
  double span = 0.32;   ///< R, m
  double chord = 0.15;  ///< constant chord, m (used when chord_table is empty)
  double dr = 0.01;     ///< strip width, m
  /// Optional tabulated chord c(r) at strip midpoints, one per strip.
  std::vector<double> chord_table;

  std::size_t strip_count() const {
    return static_cast<std::size_t>(std::llround(std::ceil(span / dr - 1e-9)));
  }

  /// Midpoint-rule strips tiling [0, R]; the last strip is trimmed to R.
  std::vector<BladeElement> strips() const {
    if (!(span > 0.0) || !(dr > 0.0))
      throw DomainError("WingGeometry: span and dr must be > 0");
    const std::size_t n = strip_count();
    if (!chord_table.empty() && chord_table.size() != n)
      throw DomainError("WingGeometry: chord table needs one entry per strip");
    std::vector<BladeElement> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r0 = static_cast<double>(i) * dr;
      const double r1 = std::min(span, r0 + dr);
      BladeElement e;
      e.r = 0.5 * (r0 + r1);
      e.dr = r1 - r0;
      e.chord = chord_table.empty() ? chord : chord_table[i];
      e.span = span;
      out.push_back(e);
    }
    return out;
  }
};

/// Joint states half a step before and after the evaluation time, used for
/// the kinematic angle-of-attack rate.
struct JointBracket {
  WingJointState before;
  WingJointState after;
  double h = 0.0;  ///< half-width of the bracket, s
};

inline std::vector<StripResult> evaluate_strips(
    const RigidBodyState& body, const StrokeFrame& frame,
    const WingJointState& joints, std::span<const BladeElement> elems,
    const AeroModel& model,
    const std::optional<JointBracket>& bracket = std::nullopt) {
  const double speed = body.v_body.norm();
  std::vector<StripResult> out;
  out.reserve(elems.size());
  for (const BladeElement& e : elems) {
    StripResult s;
    s.elem = e;
    s.flow = local_flow_angles(blade_wind_velocity(body, frame, joints, e),
                               joints.theta);
    s.flow.k_r = speed > 0.0 ? reduced_frequency(joints.phi_rate, e.chord, speed)
                             : 0.0;
    double alpha_rate = joints.theta_rate;
    if (model.alpha_rate == AlphaRateMode::Kinematic && bracket &&
        bracket->h > 0.0 && !s.flow.degenerate) {
      const FlowSample b0 = local_flow_angles(
          blade_wind_velocity(body, frame, bracket->before, e), 0.0);
      const FlowSample b1 = local_flow_angles(
          blade_wind_velocity(body, frame, bracket->after, e), 0.0);
      const double beta_rate = wrap_angle(b1.beta - b0.beta) / (2.0 * bracket->h);
      alpha_rate = joints.theta_rate - beta_rate;
    }
    s.loads = strip_loads(s.flow, e, model, alpha_rate);
    out.push_back(s);
  }
  return out;
}

/// Sums strip forces over the span and rotates the result to body axes.
inline WingLoads integrate_wing(std::span<const StripResult> strips,
                                const WingJointState& joints,
                                const StrokeFrame& frame) {
  WingLoads w;
  for (const StripResult& s : strips) w.f_wing += strip_wing_force(s.flow, s.loads);
  w.f_wing.y() = 0.0;
  w.f_body = stroke_to_body(frame.theta_s) *
             wing_to_stroke(joints.phi, joints.psi, frame.side) * w.f_wing;
  return w;
}

/// Moment about the c.g.: sum of p(r) x (strip force in body axes) plus the
/// sectional moments from C_l0, C_m0 + C_m_alpha alpha_w and C_n0.
inline Vec3 wing_moments(std::span<const StripResult> strips,
                         const WingJointState& joints, const StrokeFrame& frame,
                         const AeroModel& model) {
  // Evaluate on the right-wing side and reflect: moments are pseudovectors.
  StrokeFrame canon = frame;
  canon.side = WingSide::Right;
  canon.d = frame.side == WingSide::Right ? frame.d : Vec3(mirror_y() * frame.d);
  const Mat3 t_bw = stroke_to_body(canon.theta_s) *
                    wing_to_stroke(joints.phi, joints.psi, WingSide::Right);
  const Mat3 t_bw_pitch = t_bw * wing_pitch_rotation(joints.theta);
  Vec3 m = Vec3::Zero();
  for (const StripResult& s : strips) {
    const Vec3 p = blade_position(canon, joints, s.elem.r);
    m += p.cross(t_bw * strip_wing_force(s.flow, s.loads));
    if (s.flow.degenerate) continue;
    const double q_dr = 0.5 * model.air_density * s.flow.v_r * s.flow.v_r *
                        s.elem.chord * s.elem.dr;
    const Vec3 sectional(s.elem.r * model.cl0_moment,
                         s.elem.chord * (model.cm0 + model.cm_alpha * s.flow.alpha),
                         s.elem.r * model.cn0);
    m += t_bw_pitch * (q_dr * sectional);
  }
  if (frame.side == WingSide::Left) m = -(mirror_y() * m);
  return m;
}

/// Full per-wing evaluation: strips, force integral, moments.
inline WingLoads compute_wing_loads(
    const RigidBodyState& body, const StrokeFrame& frame,
    const WingJointState& joints, std::span<const BladeElement> elems,
    const AeroModel& model,
    const std::optional<JointBracket>& bracket = std::nullopt) {
  const auto strips = evaluate_strips(body, frame, joints, elems, model, bracket);
  WingLoads w = integrate_wing(strips, joints, frame);
  w.m_body = wing_moments(strips, joints, frame, model);
  return w;
}

}  // namespace cpgflight
