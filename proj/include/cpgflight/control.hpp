#pragma once

// Outer-loop flight control through CPG parameters.
//
// Flapping mode (sigma = +1):
//   omega      = integral of K_omega (V_x,desired - V_x)            frequency
//   delta_32   = delta_76 = -K_delta32 theta_b + delta_0             pitch
//   rho_3, rho_7 = rho_nom -/+ K_r (phi_b - phi_b,desired)           roll/turn
//   delta_21, delta_65 = 90 deg -/+ delta   (optional alternative channel)
// Gliding mode (sigma = -1, k = 0): oscillators collapse onto their biases,
// which are driven by PID laws on body pitch.
//
// Time-varying phases and radii are compensated by feeding T^-1 dT/dt {x}
// back into the oscillators; the rates come from the body rates, never from
// numerical differentiation.

#include <algorithm>
#include <span>
#include <vector>

#include "cpgflight/common.hpp"
#include "cpgflight/oscillator.hpp"
#include "cpgflight/topology.hpp"

namespace cpgflight {

enum class FlightMode { Flapping, Gliding };

inline double mode_sigma(FlightMode m) { return m == FlightMode::Flapping ? 1.0 : -1.0; }
inline const char* mode_name(FlightMode m) {
  return m == FlightMode::Flapping ? "flapping" : "gliding";
}

struct PidGains {
  double kp = 0.0;
  double kd = 0.0;
  double ki = 0.0;
};

/// All gains in SI units and radians.
struct ControlGains {
  double k_omega = 0.0;      ///< rad/m
  double v_x_desired = 0.0;  ///< m/s
  double omega_min = 1.0;    ///< rad/s
  double omega_max = 80.0;   ///< rad/s

  double k_delta32 = 0.0;  ///< rad/rad
  double delta0 = 0.0;     ///< rad

  double k_roll = 0.0;        ///< rad/rad
  double rho3_nominal = 0.0;  ///< rad
  double rho7_nominal = 0.0;  ///< rad
  double rho_min = deg2rad(1.0);

  double delta_offset = 0.0;  ///< rad

  PidGains glide_lead_lag;  ///< bias a_3 = a_7
  double psi_bias = 0.0;    ///< rad
  PidGains glide_flap;      ///< bias a_1 = a_5
  double phi_bias = 0.0;    ///< rad
  double pitch_bias_integral_gain = 0.0;  ///< rad/(rad s), bias a_2 = a_6
  double theta_bias = 0.0;                ///< rad

  void validate() const {
    const double all[] = {k_omega, v_x_desired, omega_min, omega_max, k_delta32,
                          delta0, k_roll, rho3_nominal, rho7_nominal, rho_min,
                          delta_offset, glide_lead_lag.kp, glide_lead_lag.kd,
                          glide_lead_lag.ki, psi_bias, glide_flap.kp,
                          glide_flap.kd, glide_flap.ki, phi_bias,
                          pitch_bias_integral_gain, theta_bias};
    for (double g : all)
      if (!std::isfinite(g)) throw DomainError("ControlGains: non-finite gain");
    if (!(rho3_nominal > 0.0) || !(rho7_nominal > 0.0))
      throw DomainError("ControlGains: nominal radii must be positive");
    if (!(rho_min > 0.0)) throw DomainError("ControlGains: rho_min must be positive");
    if (!(omega_min >= 0.0 && omega_max > omega_min))
      throw DomainError("ControlGains: need 0 <= omega_min < omega_max");
  }
};

struct SwitchThresholds {
  double h_max_flap = 10.0;  ///< m
  double h_min_glide = 5.0;  ///< m
  double v_x_max = 5.0;      ///< m/s
  double v_x_min = 3.0;      ///< m/s
  double dwell = 0.5;        ///< minimum time between switches, s

  void validate() const {
    if (!(h_max_flap > h_min_glide))
      throw DomainError("SwitchThresholds: need h_max_flap > h_min_glide");
    if (!(v_x_max > v_x_min))
      throw DomainError("SwitchThresholds: need v_x_max > v_x_min");
    if (!(dwell >= 0.0)) throw DomainError("SwitchThresholds: dwell must be >= 0");
  }
};

struct ControllerState {
  double omega = 0.0;                 ///< integrated frequency, rad/s
  double glide_theta_integral = 0.0;  ///< integral of theta_b, rad s
  double pitch_bias_integral = 0.0;   ///< rad
  FlightMode mode = FlightMode::Gliding;
  double bank_command = 0.0;          ///< phi_b,desired, rad
  double last_switch_time = -1e300;   ///< s
  bool frequency_frozen = false;
  bool delta_law_enabled = false;
};

/// One Euler step of the frequency integrator, halted at the clamp.
inline double frequency_law(const ControlGains& g, double v_x_actual, double dt,
                            ControllerState& ctrl) {
  if (ctrl.frequency_frozen) return ctrl.omega;
  const double next = ctrl.omega + g.k_omega * (g.v_x_desired - v_x_actual) * dt;
  ctrl.omega = std::clamp(next, g.omega_min, g.omega_max);
  return ctrl.omega;
}

struct PhaseCommand {
  double value = 0.0;  ///< rad
  double rate = 0.0;   ///< rad/s
};

/// delta_32 = -K theta_b + delta_0 and its rate from
/// theta_b_dot = q cos(phi_b) - r sin(phi_b).
inline PhaseCommand pitch_phase_law(const ControlGains& g, const Vec3& euler,
                                    const Vec3& omega_body) {
  const double phi = euler(0), theta = euler(1);
  const double theta_rate =
      omega_body(1) * std::cos(phi) - omega_body(2) * std::sin(phi);
  return {-g.k_delta32 * theta + g.delta0, -g.k_delta32 * theta_rate};
}

struct RadiusCommand {
  double rho3 = 0.0, rho7 = 0.0;
  double rho3_rate = 0.0, rho7_rate = 0.0;
  bool saturated = false;
};

/// Lead-lag amplitude asymmetry for bank-angle tracking. A radius pushed
/// below rho_min is held there with zero rate and flagged.
inline RadiusCommand roll_symmetry_law(const ControlGains& g, const Vec3& euler,
                                       const Vec3& omega_body,
                                       double bank_command) {
  const double phi = euler(0), theta = euler(1);
  const double p = omega_body(0), q = omega_body(1), r = omega_body(2);
  const double phi_rate =
      p + q * std::sin(phi) * std::tan(theta) + r * std::cos(phi) * std::tan(theta);
  const double err = phi - bank_command;
  RadiusCommand c;
  c.rho3 = g.rho3_nominal - g.k_roll * err;
  c.rho7 = g.rho7_nominal + g.k_roll * err;
  c.rho3_rate = -g.k_roll * phi_rate;
  c.rho7_rate = g.k_roll * phi_rate;
  if (c.rho3 < g.rho_min) {
    c.rho3 = g.rho_min;
    c.rho3_rate = 0.0;
    c.saturated = true;
  }
  if (c.rho7 < g.rho_min) {
    c.rho7 = g.rho_min;
    c.rho7_rate = 0.0;
    c.saturated = true;
  }
  return c;
}

struct FlapPitchPhases {
  double delta65 = 0.0;
  double delta21 = 0.0;
};

/// Alternative symmetry breaking: delta_65 = 90 deg + delta,
/// delta_21 = 90 deg - delta.
inline FlapPitchPhases delta_offset_law(const ControlGains& g) {
  return {deg2rad(90.0) + g.delta_offset, deg2rad(90.0) - g.delta_offset};
}

struct GlideBiases {
  double flap = 0.0;      ///< a_1 = a_5
  double pitch = 0.0;     ///< a_2 = a_6
  double lead_lag = 0.0;  ///< a_3 = a_7
};

/// a_3 = a_7 = -k_p theta_b - k_d q - k_i int(theta_b) + psi_bias, the same
/// structure for the flapping bias, and pure integral action for wing pitch.
inline GlideBiases glide_bias_law(const ControlGains& g, double theta_b, double q,
                                  const ControllerState& ctrl) {
  const double integral = ctrl.glide_theta_integral;
  GlideBiases b;
  b.lead_lag = -g.glide_lead_lag.kp * theta_b - g.glide_lead_lag.kd * q -
               g.glide_lead_lag.ki * integral + g.psi_bias;
  b.flap = -g.glide_flap.kp * theta_b - g.glide_flap.kd * q -
           g.glide_flap.ki * integral + g.phi_bias;
  b.pitch = g.theta_bias + ctrl.pitch_bias_integral;
  return b;
}

/// One Euler step of the glide integrators.
inline void glide_integrators_update(const ControlGains& g, double theta_b,
                                     double dt, ControllerState& ctrl) {
  ctrl.glide_theta_integral += theta_b * dt;
  ctrl.pitch_bias_integral -= g.pitch_bias_integral_gain * theta_b * dt;
}

/// The flap/glide predicate. z_b is the inertial down coordinate, so the
/// altitude test z_b < -h reads "higher than h".
inline FlightMode mode_switch_law(const SwitchThresholds& th, double sigma,
                                  double z_b, double v_bx) {
  const bool glide =
      (sigma == 1.0 && z_b < -th.h_max_flap && v_bx > th.v_x_max) ||
      (sigma == -1.0 && z_b < -th.h_min_glide && v_bx > th.v_x_min);
  return glide ? FlightMode::Gliding : FlightMode::Flapping;
}

/// T^-1 dT/dt {x}. Block j of T is (rho_1/rho_j) R(delta_1j), so
///   T_j^-1 dT_j/dt = (rho_1'/rho_1 - rho_j'/rho_j) I + delta_1j' R(90 deg).
/// `phase_rates` are rates of each node's phase lead over node 1
/// (delta_1j' = -phase_rate_j); `radius_rates` are drho_j/dt.
inline VecX correction_feed(std::span<const double> radii,
                            std::span<const double> phase_rates,
                            std::span<const double> radius_rates,
                            const VecX& stacked_shifted) {
  const std::size_t n = radii.size();
  if (phase_rates.size() != n || radius_rates.size() != n ||
      static_cast<std::size_t>(stacked_shifted.size()) != 2 * n)
    throw DomainError("correction_feed: size mismatch");
  VecX out(2 * n);
  const double log_rate_1 = radius_rates[0] / radii[0];
  for (std::size_t j = 0; j < n; ++j) {
    const double scale = log_rate_1 - radius_rates[j] / radii[j];
    const double turn = -phase_rates[j];  // delta_1j'
    const double x0 = stacked_shifted(2 * j), x1 = stacked_shifted(2 * j + 1);
    out(2 * j) = scale * x0 - turn * x1;
    out(2 * j + 1) = scale * x1 + turn * x0;
  }
  return out;
}

inline VecX correction_feed(const CouplingMatrices& mat,
                            std::span<const double> phase_rates,
                            std::span<const double> radius_rates,
                            const NetworkState& net) {
  if (mat.n() != net.size())
    throw DomainError("correction_feed: size mismatch");
  if (!mat.matches(net.params))
    throw DomainError("correction_feed: coupling matrices are stale for the "
                      "current radii");
  return correction_feed(mat.radii, phase_rates, radius_rates,
                         net.stacked_shifted());
}

}  // namespace cpgflight
