#pragma once

// Fixed-step simulation of CPG + 6-DOF vehicle + outer-loop controller.
//
// Integrated state y = [u_1, v_1, ..., u_n, v_n, V_b(3), Omega_b(3), q_b(3), X_e(3)].
// Controller integrators (frequency, glide pitch integrals), the mode and
// event-driven commands are advanced once per step with explicit Euler before
// the RK4 step and held fixed across its stages. Algebraic laws (delta_32,
// rho_3/rho_7, glide biases) are re-evaluated at every stage.

#include <charconv>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cpgflight/aerodynamics.hpp"
#include "cpgflight/common.hpp"
#include "cpgflight/control.hpp"
#include "cpgflight/integrator.hpp"
#include "cpgflight/kinematics.hpp"
#include "cpgflight/oscillator.hpp"
#include "cpgflight/scenario.hpp"
#include "cpgflight/topology.hpp"
#include "cpgflight/vehicle.hpp"

namespace cpgflight {

inline constexpr const char* kVersion = "0.1.0";

/// Node indices (zero-based) driving one wing.
struct WingJoints {
  std::size_t flap = 0, pitch = 1, lead_lag = 2, flap2 = 3;
};

struct TimedEvent {
  std::int64_t step = 0;  ///< index of the step boundary the event snaps to
  ScenarioEvent event;
};

/// Scenario converted to runtime units (radians, zero-based indices).
struct SimModel {
  std::size_t n = 0;
  NetworkTopology topology;         ///< nominal edges, k = k_flap
  std::vector<double> base_phases;  ///< nominal phase lead over node 1
  std::vector<HopfParams> base;     ///< rho, a at nominal; lambda/sigma/omega set per step
  double lambda_flap = 10.0, lambda_glide = 30.0;
  double k_flap = 60.0;
  std::vector<OscillatorState> initial_cpg;

  WingGeometry geometry;
  std::vector<BladeElement> strips;
  StrokeFrame right_frame, left_frame;
  WingJoints right, left;
  AeroModel aero;
  MassProperties mass;
  AuxiliaryLoads aux;
  RigidBodyState initial_body;

  bool control_enabled = true;
  ControlGains gains;
  SwitchThresholds thresholds;
  FlightMode initial_mode = FlightMode::Gliding;
  double omega0 = 0.0;
  bool delta_law = false;

  double dt = 1e-3;
  std::int64_t steps = 0;
  int record_stride = 10;
  bool dynamics = true;
  bool aerodynamics = true;
  double max_abs_derivative = 1e6;
  std::vector<TimedEvent> events;

  MatX sync_basis;  ///< V, depends only on n
  std::uint64_t scenario_hash = 0;

  std::size_t cpg_size() const { return 2 * n; }
  std::size_t state_size() const { return 2 * n + 12; }
};

inline std::size_t to_index(int one_based) {
  return static_cast<std::size_t>(one_based - 1);
}

/// Full topology check (balance, cycle consistency) for a scenario; throws
/// ValidationError naming the node or edge.
inline NetworkTopology scenario_topology(const Scenario& s) {
  NetworkTopology t;
  t.n = s.n();
  t.k = s.topology.k_flap;
  for (const auto& e : s.topology.edges)
    t.edges.push_back({to_index(e.to), to_index(e.from), deg2rad(e.delta_deg)});
  require_valid(t);
  if (t.n >= 2 && !is_connected(t))
    throw ValidationError("topology", "graph is disconnected; relative phases "
                                      "are undefined across components");
  return t;
}

inline SimModel build_model(const Scenario& s) {
  validate_scenario(s);
  SimModel m;
  m.n = s.n();
  m.topology = scenario_topology(s);
  m.base_phases = m.n >= 2 ? node_phases(m.topology) : std::vector<double>(m.n, 0.0);
  m.lambda_flap = s.oscillators.lambda_flap;
  m.lambda_glide = s.oscillators.lambda_glide;
  m.k_flap = s.topology.k_flap;
  m.omega0 = s.oscillators.omega0;
  for (const auto& node : s.oscillators.nodes) {
    HopfParams p;
    p.rho = deg2rad(node.rho_deg);
    p.a = deg2rad(node.a_deg);
    p.lambda = m.lambda_flap;
    p.sigma = static_cast<double>(s.oscillators.sigma0);
    p.omega = m.omega0;
    m.base.push_back(p);
    if (node.initial_deg)
      m.initial_cpg.push_back({deg2rad((*node.initial_deg)[0]),
                               deg2rad((*node.initial_deg)[1])});
    else
      m.initial_cpg.push_back({p.a + 0.05 * p.rho, 0.0});
  }

  m.geometry.span = s.wing.span;
  m.geometry.chord = s.wing.chord;
  m.geometry.dr = s.wing.dr;
  m.geometry.chord_table = s.wing.chord_table;
  try {
    m.strips = m.geometry.strips();
  } catch (const DomainError& e) {
    throw ValidationError("wing.chord_table", e.what());
  }
  const Vec3 d(s.wing.offset[0], s.wing.offset[1], s.wing.offset[2]);
  m.right_frame = {deg2rad(s.wing.stroke_incline_deg),
                   deg2rad(s.wing.stroke_incline_rate_deg_s), d, WingSide::Right};
  m.left_frame = m.right_frame;
  m.left_frame.side = WingSide::Left;
  m.left_frame.d = mirror_y() * d;
  const auto& rj = s.wing.right_joints;
  const auto& lj = s.wing.left_joints;
  m.right = {to_index(rj[0]), to_index(rj[1]), to_index(rj[2]), to_index(rj[3])};
  m.left = {to_index(lj[0]), to_index(lj[1]), to_index(lj[2]), to_index(lj[3])};

  const auto& a = s.aero;
  m.aero.coeffs = {a.cl0, a.cl_amp, a.cl_slope, deg2rad(a.cl_shift_deg),
                   a.cd0, a.cd_amp, a.cd_slope, deg2rad(a.cd_shift_deg)};
  m.aero.x0_hat = a.x0_hat;
  m.aero.air_density = a.air_density;
  m.aero.cl0_moment = a.cl0_moment;
  m.aero.cm0 = a.cm0;
  m.aero.cm_alpha = a.cm_alpha;
  m.aero.cn0 = a.cn0;
  m.aero.alpha_rate =
      a.alpha_rate == "kinematic" ? AlphaRateMode::Kinematic : AlphaRateMode::PitchRate;

  const auto& v = s.vehicle;
  m.mass.mass = v.mass;
  m.mass.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(
      v.inertia.data());
  m.mass.gravity = v.gravity;
  m.aux.cm0 = v.body_cm0;
  m.aux.cm_alpha = v.body_cm_alpha;
  m.aux.s_ref = v.s_ref.value_or(2.0 * s.wing.span * s.wing.chord);
  m.aux.c_ref = v.c_ref.value_or(s.wing.chord);
  m.aux.extra_force = Vec3(v.extra_force[0], v.extra_force[1], v.extra_force[2]);
  m.initial_body.v_body = Vec3(v.velocity[0], v.velocity[1], v.velocity[2]);
  m.initial_body.omega_body =
      Vec3(v.omega_deg_s[0], v.omega_deg_s[1], v.omega_deg_s[2]) * deg2rad(1.0);
  m.initial_body.euler =
      Vec3(v.euler_deg[0], v.euler_deg[1], v.euler_deg[2]) * deg2rad(1.0);
  m.initial_body.position = Vec3(v.position[0], v.position[1], v.position[2]);

  const auto& c = s.control;
  m.control_enabled = c.enabled;
  auto& g = m.gains;
  g.k_omega = c.k_omega;
  g.v_x_desired = c.v_x_desired;
  g.omega_min = c.omega_min;
  g.omega_max = c.omega_max;
  g.k_delta32 = c.k_delta32;
  g.delta0 = deg2rad(c.delta0_deg);
  g.k_roll = c.k_roll;
  g.rho3_nominal = deg2rad(c.rho3_nominal_deg.value_or(
      s.oscillators.nodes[m.right.lead_lag].rho_deg));
  g.rho7_nominal = deg2rad(c.rho7_nominal_deg.value_or(
      s.oscillators.nodes[m.left.lead_lag].rho_deg));
  g.rho_min = deg2rad(c.rho_min_deg);
  g.delta_offset = deg2rad(c.delta_offset_deg);
  g.glide_lead_lag = {c.glide_lead_lag.kp, c.glide_lead_lag.kd, c.glide_lead_lag.ki};
  g.psi_bias = deg2rad(c.psi_bias_deg);
  g.glide_flap = {c.glide_flap.kp, c.glide_flap.kd, c.glide_flap.ki};
  g.phi_bias = deg2rad(c.phi_bias_deg);
  g.pitch_bias_integral_gain = c.pitch_ki;
  g.theta_bias = deg2rad(c.theta_bias_deg);
  g.validate();
  m.delta_law = c.delta_law;
  m.thresholds = {c.h_max_flap, c.h_min_glide, c.v_x_max, c.v_x_min, c.dwell};
  m.thresholds.validate();
  m.initial_mode =
      s.oscillators.sigma0 == 1 ? FlightMode::Flapping : FlightMode::Gliding;

  m.dt = s.sim.dt;
  m.steps = static_cast<std::int64_t>(std::llround(s.sim.duration / s.sim.dt));
  m.record_stride = s.sim.record_stride;
  m.dynamics = s.sim.dynamics;
  m.aerodynamics = s.sim.aerodynamics;
  m.max_abs_derivative = s.sim.max_abs_derivative;
  for (const auto& e : s.events)
    m.events.push_back({static_cast<std::int64_t>(std::llround(e.t / m.dt)), e});
  std::stable_sort(m.events.begin(), m.events.end(),
                   [](const TimedEvent& x, const TimedEvent& y) { return x.step < y.step; });

  m.sync_basis = m.n >= 2 ? sync_complement_basis(m.n) : MatX(2 * m.n, 0);
  m.scenario_hash = scenario_hash(s);
  return m;
}

struct SimState {
  VecX y;  ///< CPG (u, v) pairs then the 12 body states
  ControllerState ctrl;
  ControlGains gains;  ///< event-adjustable copy (speed command)
  double t = 0.0;
  std::int64_t step = 0;
};

inline RigidBodyState unpack_body(const SimModel& m, const VecX& y) {
  const Eigen::Index o = static_cast<Eigen::Index>(m.cpg_size());
  RigidBodyState b;
  b.v_body = y.segment<3>(o);
  b.omega_body = y.segment<3>(o + 3);
  b.euler = y.segment<3>(o + 6);
  b.position = y.segment<3>(o + 9);
  return b;
}

inline SimState initial_state(const SimModel& m) {
  SimState s;
  s.y = VecX::Zero(static_cast<Eigen::Index>(m.state_size()));
  for (std::size_t i = 0; i < m.n; ++i) {
    s.y(2 * i) = m.initial_cpg[i].u;
    s.y(2 * i + 1) = m.initial_cpg[i].v;
  }
  const Eigen::Index o = static_cast<Eigen::Index>(m.cpg_size());
  s.y.segment<3>(o) = m.initial_body.v_body;
  s.y.segment<3>(o + 3) = m.initial_body.omega_body;
  s.y.segment<3>(o + 6) = m.initial_body.euler;
  s.y.segment<3>(o + 9) = m.initial_body.position;
  s.ctrl.omega = m.omega0;
  s.ctrl.mode = m.initial_mode;
  s.ctrl.delta_law_enabled = m.delta_law;
  s.gains = m.gains;
  return s;
}

/// Oscillator parameters, coupling graph and correction inputs in effect at
/// one time slice.
struct CpgCommand {
  std::vector<HopfParams> params;
  NetworkTopology topology;
  std::vector<double> phases;        ///< lead over node 1
  std::vector<double> phase_rates;
  std::vector<double> radius_rates;
  bool corrected = false;
  double delta32 = 0.0;
  double rho3 = 0.0, rho7 = 0.0;
};

inline CpgCommand cpg_command(const SimModel& m, const RigidBodyState& body,
                              const ControllerState& ctrl, const ControlGains& g) {
  CpgCommand c;
  const bool flapping = ctrl.mode == FlightMode::Flapping;
  c.params = m.base;
  for (auto& p : c.params) {
    p.sigma = mode_sigma(ctrl.mode);
    p.lambda = flapping ? m.lambda_flap : m.lambda_glide;
    p.omega = ctrl.omega;
  }
  c.topology = m.topology;
  c.topology.k = flapping ? m.k_flap : 0.0;
  c.phases = m.base_phases;
  c.phase_rates.assign(m.n, 0.0);
  c.radius_rates.assign(m.n, 0.0);
  const auto nominal_gap = [&](std::size_t to, std::size_t from) {
    return m.n >= 2 ? m.base_phases[to] - m.base_phases[from] : 0.0;
  };
  c.delta32 = nominal_gap(m.right.lead_lag, m.right.pitch);
  c.rho3 = m.base[m.right.lead_lag].rho;
  c.rho7 = m.base[m.left.lead_lag].rho;

  if (!m.control_enabled || m.n < 2) return c;

  if (flapping) {
    const PhaseCommand d32 = pitch_phase_law(g, body.euler, body.omega_body);
    const RadiusCommand rr =
        roll_symmetry_law(g, body.euler, body.omega_body, ctrl.bank_command);
    if (!std::isfinite(d32.value) || !std::isfinite(d32.rate) ||
        !std::isfinite(rr.rho3) || !std::isfinite(rr.rho7) ||
        !std::isfinite(rr.rho3_rate) || !std::isfinite(rr.rho7_rate))
      throw SimulationAbort("control", "non-finite phase or radius command");
    c.delta32 = d32.value;
    c.rho3 = rr.rho3;
    c.rho7 = rr.rho7;

    double d21 = nominal_gap(m.right.pitch, m.right.flap);
    double d65 = nominal_gap(m.left.pitch, m.left.flap);
    if (ctrl.delta_law_enabled) {
      d21 -= g.delta_offset;
      d65 += g.delta_offset;
    }
    for (const WingJoints* w : {&m.right, &m.left}) {
      const double pitch_gap = w == &m.right ? d21 : d65;
      const double flap2_gap = nominal_gap(w->flap2, w->lead_lag);
      c.phases[w->pitch] = c.phases[w->flap] + pitch_gap;
      c.phases[w->lead_lag] = c.phases[w->pitch] + d32.value;
      c.phases[w->flap2] = c.phases[w->lead_lag] + flap2_gap;
      c.phase_rates[w->lead_lag] = d32.rate;
      c.phase_rates[w->flap2] = d32.rate;
    }
    c.params[m.right.lead_lag].rho = rr.rho3;
    c.params[m.left.lead_lag].rho = rr.rho7;
    c.radius_rates[m.right.lead_lag] = rr.rho3_rate;
    c.radius_rates[m.left.lead_lag] = rr.rho7_rate;
    c.topology = with_node_phases(c.topology, c.phases);
    c.corrected = true;
  } else {
    const GlideBiases b = glide_bias_law(g, body.euler(1), body.omega_body(1), ctrl);
    if (!std::isfinite(b.flap) || !std::isfinite(b.pitch) || !std::isfinite(b.lead_lag))
      throw SimulationAbort("control", "non-finite glide bias");
    for (const WingJoints* w : {&m.right, &m.left}) {
      c.params[w->flap].a = b.flap;
      c.params[w->pitch].a = b.pitch;
      c.params[w->lead_lag].a = b.lead_lag;
    }
  }
  return c;
}

/// Everything evaluated along the way at one time slice, for recording.
struct Diagnostics {
  CpgCommand command;
  WingJointState right_joints, left_joints;
  WingLoads right_loads, left_loads;
  BodyLoads body;
  Vec3 force = Vec3::Zero();   ///< wings + auxiliary, body axes
  Vec3 moment = Vec3::Zero();  ///< about the c.g.
};

namespace detail {

inline WingJointState joints_of(const VecX& y, const VecX& dcpg, const WingJoints& w) {
  WingJointState j;
  j.phi = y(2 * w.flap);
  j.theta = y(2 * w.pitch);
  j.psi = y(2 * w.lead_lag);
  j.phi_rate = dcpg(2 * w.flap);
  j.theta_rate = dcpg(2 * w.pitch);
  j.psi_rate = dcpg(2 * w.lead_lag);
  return j;
}

inline JointBracket linear_bracket(const WingJointState& j, double h) {
  JointBracket b;
  b.h = h;
  b.before = j;
  b.after = j;
  b.before.phi -= h * j.phi_rate;
  b.before.psi -= h * j.psi_rate;
  b.after.phi += h * j.phi_rate;
  b.after.psi += h * j.psi_rate;
  return b;
}

inline void guard(const VecX& v, Eigen::Index from, Eigen::Index len, double limit,
                  const char* subsystem) {
  for (Eigen::Index i = from; i < from + len; ++i) {
    if (!std::isfinite(v(i)))
      throw SimulationAbort(subsystem, "non-finite derivative component " +
                                           std::to_string(i));
    if (std::abs(v(i)) > limit)
      throw SimulationAbort(subsystem, "derivative component " + std::to_string(i) +
                                           " exceeds sanity limit");
  }
}

inline void guard3(const Vec3& v, double limit, const char* subsystem, const char* what) {
  if (!v.allFinite()) throw SimulationAbort(subsystem, std::string("non-finite ") + what);
  if (v.cwiseAbs().maxCoeff() > limit)
    throw SimulationAbort(subsystem, std::string(what) + " exceeds sanity limit");
}

}  // namespace detail

/// d/dt of the integrated state at (t, y) with controller state held fixed.
inline VecX assemble_derivative(const SimModel& m, const VecX& y,
                                const ControllerState& ctrl, const ControlGains& g,
                                Diagnostics* diag = nullptr) {
  if (!y.allFinite()) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (!std::isfinite(y(i)))
        throw SimulationAbort(i < static_cast<Eigen::Index>(m.cpg_size()) ? "cpg" : "vehicle",
                              "non-finite state component " + std::to_string(i));
  }
  const RigidBodyState body = unpack_body(m, y);
  CpgCommand cmd = cpg_command(m, body, ctrl, g);

  NetworkState net;
  net.params = cmd.params;
  net.states.resize(m.n);
  for (std::size_t i = 0; i < m.n; ++i) net.states[i] = {y(2 * i), y(2 * i + 1)};

  VecX dcpg;
  try {
    if (cmd.corrected) {
      std::vector<double> radii(m.n);
      for (std::size_t i = 0; i < m.n; ++i) radii[i] = cmd.params[i].rho;
      const VecX corr = correction_feed(radii, cmd.phase_rates, cmd.radius_rates,
                                        net.stacked_shifted());
      dcpg = coupled_derivative(net, cmd.topology,
                                std::span<const double>(corr.data(), corr.size()));
    } else {
      dcpg = coupled_derivative(net, cmd.topology);
    }
  } catch (const DomainError& e) {
    throw SimulationAbort("cpg", e.what());
  }
  VecX dy = VecX::Zero(y.size());
  dy.head(dcpg.size()) = dcpg;
  detail::guard(dy, 0, dcpg.size(), m.max_abs_derivative, "cpg");

  const WingJointState jr = detail::joints_of(y, dcpg, m.right);
  const WingJointState jl = detail::joints_of(y, dcpg, m.left);
  WingLoads lr, ll;
  BodyLoads bl;
  bl.force = m.aux.extra_force;
  if (m.aerodynamics) {
    std::optional<JointBracket> br, bll;
    if (m.aero.alpha_rate == AlphaRateMode::Kinematic) {
      br = detail::linear_bracket(jr, 0.5 * m.dt);
      bll = detail::linear_bracket(jl, 0.5 * m.dt);
    }
    lr = compute_wing_loads(body, m.right_frame, jr, m.strips, m.aero, br);
    ll = compute_wing_loads(body, m.left_frame, jl, m.strips, m.aero, bll);
    bl = body_loads(body, m.aux, m.aero.air_density);
  }
  const Vec3 force = lr.f_body + ll.f_body + bl.force;
  const Vec3 moment = lr.m_body + ll.m_body + bl.moment;
  detail::guard3(force, m.max_abs_derivative, "aerodynamics", "force");
  detail::guard3(moment, m.max_abs_derivative, "aerodynamics", "moment");

  if (m.dynamics) {
    const Eigen::Index o = static_cast<Eigen::Index>(m.cpg_size());
    dy.segment<3>(o) = translational_derivative(body, force, m.mass);
    dy.segment<3>(o + 3) = rotational_derivative(body, moment, m.mass);
    dy.segment<3>(o + 6) = euler_rates(body.euler, body.omega_body);
    dy.segment<3>(o + 9) = position_rate(body);
    detail::guard(dy, o, 12, m.max_abs_derivative, "vehicle");
  }

  if (diag) {
    diag->command = std::move(cmd);
    diag->right_joints = jr;
    diag->left_joints = jl;
    diag->right_loads = lr;
    diag->left_loads = ll;
    diag->body = bl;
    diag->force = force;
    diag->moment = moment;
  }
  return dy;
}

/// ||V^T T {x}|| for the command in effect (phases and radii may differ from
/// nominal while the controller is active).
inline double sync_error_of(const SimModel& m, const VecX& y, const CpgCommand& c) {
  if (m.n < 2) return 0.0;
  VecX tx(2 * m.n);
  for (std::size_t j = 0; j < m.n; ++j) {
    const Vec2 x(y(2 * j) - c.params[j].a, y(2 * j + 1));
    tx.segment<2>(2 * j) =
        (c.params[0].rho / c.params[j].rho) * (rotation2(-c.phases[j]) * x);
  }
  return (m.sync_basis.transpose() * tx).norm();
}

/// Applies events due at the current step, then the mode predicate and the
/// per-step integrators. Returns true when the mode changed.
inline bool controller_step(const SimModel& m, SimState& s) {
  for (const TimedEvent& te : m.events) {
    if (te.step != s.step) continue;
    const ScenarioEvent& e = te.event;
    if (e.set_bank_deg) s.ctrl.bank_command = deg2rad(*e.set_bank_deg);
    if (e.set_speed) s.gains.v_x_desired = *e.set_speed;
    if (e.freeze_frequency) s.ctrl.frequency_frozen = *e.freeze_frequency;
    if (e.delta_law) s.ctrl.delta_law_enabled = *e.delta_law;
    if (e.delta_offset_deg) s.gains.delta_offset = deg2rad(*e.delta_offset_deg);
  }
  if (!m.control_enabled) return false;

  const RigidBodyState body = unpack_body(m, s.y);
  bool switched = false;
  const FlightMode wanted = mode_switch_law(m.thresholds, mode_sigma(s.ctrl.mode),
                                            body.position.z(), body.v_body.x());
  if (wanted != s.ctrl.mode && s.t - s.ctrl.last_switch_time >= m.thresholds.dwell) {
    s.ctrl.mode = wanted;
    s.ctrl.last_switch_time = s.t;
    switched = true;
  }
  if (s.ctrl.mode == FlightMode::Flapping)
    frequency_law(s.gains, body.v_body.x(), m.dt, s.ctrl);
  else
    glide_integrators_update(s.gains, body.euler(1), m.dt, s.ctrl);
  return switched;
}

inline void advance(const SimModel& m, SimState& s) {
  const ControllerState ctrl = s.ctrl;
  const ControlGains gains = s.gains;
  s.y = rk4_step(
      [&](double, const VecX& y) { return assemble_derivative(m, y, ctrl, gains); },
      s.t, s.y, m.dt);
  ++s.step;
  s.t = static_cast<double>(s.step) * m.dt;
}

/// One recorded row.
struct SimRecord {
  double t = 0.0;
  VecX y;
  Diagnostics diag;
  double omega = 0.0;
  FlightMode mode = FlightMode::Gliding;
  double sync_error = 0.0;

  RigidBodyState body(const SimModel& m) const { return unpack_body(m, y); }
};

struct ModeChange {
  double t = 0.0;
  FlightMode mode = FlightMode::Gliding;
};

struct RunResult {
  SimState final_state;
  std::vector<ModeChange> mode_changes;
  double peak_sync_error = 0.0;  ///< rad
  std::size_t rows = 0;
  bool aborted = false;
  std::string abort_subsystem;
  std::string abort_message;
};

namespace detail {

inline void put_number(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

}  // namespace detail

inline std::vector<std::string> output_columns(const SimModel& m) {
  std::vector<std::string> c{"t"};
  for (std::size_t i = 1; i <= m.n; ++i) {
    c.push_back("u" + std::to_string(i) + "_deg");
    c.push_back("v" + std::to_string(i) + "_deg");
  }
  for (const char* side : {"R", "L"}) {
    for (const char* j : {"phi", "theta", "psi"})
      c.push_back(std::string(j) + "_" + side + "_deg");
    for (const char* j : {"phi", "theta", "psi"})
      c.push_back(std::string(j) + "_rate_" + side + "_deg_s");
  }
  for (const char* k : {"vx", "vy", "vz"}) c.push_back(k);
  for (const char* k : {"p_deg_s", "q_deg_s", "r_deg_s"}) c.push_back(k);
  for (const char* k : {"roll_deg", "pitch_deg", "yaw_deg"}) c.push_back(k);
  for (const char* k : {"x", "y", "z"}) c.push_back(k);
  for (const char* k : {"Fx", "Fy", "Fz", "Mx", "My", "Mz"}) c.push_back(k);
  for (const char* k : {"omega", "delta32_deg", "rho3_deg", "rho7_deg", "sigma",
                        "mode", "sync_error_deg"})
    c.push_back(k);
  return c;
}

inline std::string format_row(const SimModel& m, const SimRecord& r) {
  std::string line;
  line.reserve(1024);
  const auto put = [&](double v) {
    if (!line.empty()) line.push_back(',');
    detail::put_number(line, v);
  };
  const double deg = rad2deg(1.0);
  put(r.t);
  for (std::size_t i = 0; i < 2 * m.n; ++i) put(r.y(i) * deg);
  for (const WingJointState* j : {&r.diag.right_joints, &r.diag.left_joints}) {
    put(j->phi * deg);
    put(j->theta * deg);
    put(j->psi * deg);
    put(j->phi_rate * deg);
    put(j->theta_rate * deg);
    put(j->psi_rate * deg);
  }
  const RigidBodyState b = r.body(m);
  for (int i = 0; i < 3; ++i) put(b.v_body(i));
  for (int i = 0; i < 3; ++i) put(b.omega_body(i) * deg);
  for (int i = 0; i < 3; ++i) put(b.euler(i) * deg);
  for (int i = 0; i < 3; ++i) put(b.position(i));
  for (int i = 0; i < 3; ++i) put(r.diag.force(i));
  for (int i = 0; i < 3; ++i) put(r.diag.moment(i));
  put(r.omega);
  put(r.diag.command.delta32 * deg);
  put(r.diag.command.rho3 * deg);
  put(r.diag.command.rho7 * deg);
  put(mode_sigma(r.mode));
  line += ',';
  line += mode_name(r.mode);
  put(r.sync_error * deg);
  return line;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

using RecordObserver = std::function<void(const SimRecord&)>;

/// Steps from 0 to the configured duration. Rows go to `out` (may be null)
/// and to `observer`. A mid-run abort keeps what was written and appends an
/// error trailer.
inline RunResult run_scenario(const SimModel& m, std::ostream* out,
                              const RecordObserver& observer = {}) {
  RunResult res;
  SimState s = initial_state(m);
  if (out) {
    *out << "# cpgflight " << kVersion << "\n"
         << "# scenario_hash " << hex64(m.scenario_hash) << "\n"
         << "# dt ";
    std::string dt;
    detail::put_number(dt, m.dt);
    *out << dt << "\n";
    const auto cols = output_columns(m);
    for (std::size_t i = 0; i < cols.size(); ++i) *out << (i ? "," : "") << cols[i];
    *out << "\n";
  }
  if (m.steps == 0) {
    res.final_state = s;
    return res;
  }
  res.mode_changes.push_back({0.0, s.ctrl.mode});
  try {
    for (;;) {
      if (controller_step(m, s)) res.mode_changes.push_back({s.t, s.ctrl.mode});
      if (s.step % m.record_stride == 0 || s.step == m.steps) {
        SimRecord r;
        r.t = s.t;
        r.y = s.y;
        assemble_derivative(m, s.y, s.ctrl, s.gains, &r.diag);
        r.omega = s.ctrl.omega;
        r.mode = s.ctrl.mode;
        r.sync_error = sync_error_of(m, s.y, r.diag.command);
        res.peak_sync_error = std::max(res.peak_sync_error, r.sync_error);
        if (out) *out << format_row(m, r) << "\n";
        if (observer) observer(r);
        ++res.rows;
      }
      if (s.step >= m.steps) break;
      advance(m, s);
    }
  } catch (const SimulationAbort& e) {
    res.aborted = true;
    res.abort_subsystem = e.subsystem();
    res.abort_message = e.what();
  } catch (const DomainError& e) {
    res.aborted = true;
    res.abort_subsystem = "engine";
    res.abort_message = std::string("engine: ") + e.what();
  }
  if (res.aborted && out)
    *out << "# error at t=" << s.t << ": " << res.abort_message << "\n";
  res.final_state = s;
  return res;
}

}  // namespace cpgflight
