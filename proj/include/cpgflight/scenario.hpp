#pragma once

// Scenario files: YAML documents describing the oscillator network, wing,
// aerodynamic model, vehicle, controller, run settings and timed events.
//
// Angles are given in degrees and angular rates in deg/s (keys carry a
// `_deg` / `_deg_s` suffix); everything else is SI. Ratios of angles
// (controller gains) are unit-free. The Scenario struct mirrors the file and
// keeps file units, so parse(serialize(s)) == s holds exactly; conversion to
// radians happens when a simulation is set up.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "cpgflight/common.hpp"

namespace cpgflight {

struct ScenarioNode {
  std::string name;
  double rho_deg = 1.0;
  double a_deg = 0.0;
  std::optional<std::array<double, 2>> initial_deg;  ///< (u, v)

  bool operator==(const ScenarioNode&) const = default;
};

struct ScenarioEdge {
  int to = 1;    ///< one-based
  int from = 1;  ///< one-based
  double delta_deg = 0.0;

  bool operator==(const ScenarioEdge&) const = default;
};

struct PidSpec {
  double kp = 0.0, kd = 0.0, ki = 0.0;
  bool operator==(const PidSpec&) const = default;
};

struct ScenarioEvent {
  double t = 0.0;
  std::optional<double> set_bank_deg;
  std::optional<double> set_speed;
  std::optional<bool> freeze_frequency;
  std::optional<bool> delta_law;
  std::optional<double> delta_offset_deg;

  bool operator==(const ScenarioEvent&) const = default;
};

struct Scenario {
  struct Oscillators {
    double lambda_flap = 10.0;
    double lambda_glide = 30.0;
    int sigma0 = -1;
    double omega0 = 0.0;  ///< rad/s, required in files
    std::vector<ScenarioNode> nodes;
    bool operator==(const Oscillators&) const = default;
  } oscillators;

  struct Topology {
    double k_flap = 60.0;
    std::vector<ScenarioEdge> edges;
    bool operator==(const Topology&) const = default;
  } topology;

  struct Wing {
    double span = 0.32;
    double chord = 0.15;
    double dr = 0.01;
    std::vector<double> chord_table;
    double stroke_incline_deg = 20.0;
    double stroke_incline_rate_deg_s = 0.0;
    std::array<double, 3> offset{0.0, 0.0, 0.0};  ///< right wing; left mirrored
    /// one-based node indices: flap, pitch, lead-lag, second flap joint
    std::array<int, 4> right_joints{1, 2, 3, 4};
    std::array<int, 4> left_joints{5, 6, 7, 8};
    bool operator==(const Wing&) const = default;
  } wing;

  struct Aero {
    double air_density = 1.225;
    double x0_hat = 0.25;
    double cl0 = 0.225, cl_amp = 1.58, cl_slope = 2.13, cl_shift_deg = 7.2;
    double cd0 = 1.92, cd_amp = 1.55, cd_slope = 2.04, cd_shift_deg = 9.82;
    double cl0_moment = 0.0;
    double cm0 = -0.2;
    double cm_alpha = -0.12;
    double cn0 = 0.0;
    std::string alpha_rate = "pitch_rate";  ///< or "kinematic"
    bool operator==(const Aero&) const = default;
  } aero;

  struct Vehicle {
    double mass = 0.3;
    std::array<double, 9> inertia{0.0012, 0, 0, 0, 0.0012, 0, 0, 0, 0.0012};
    double gravity = 9.81;
    double body_cm0 = 0.1;
    double body_cm_alpha = -0.2;
    std::optional<double> s_ref;  ///< default 2 R c
    std::optional<double> c_ref;  ///< default c
    std::array<double, 3> extra_force{0.0, 0.0, 0.0};
    std::array<double, 3> velocity{0.0, 0.0, 0.0};
    std::array<double, 3> omega_deg_s{0.0, 0.0, 0.0};
    std::array<double, 3> euler_deg{0.0, 0.0, 0.0};
    std::array<double, 3> position{0.0, 0.0, 0.0};
    bool operator==(const Vehicle&) const = default;
  } vehicle;

  struct Control {
    bool enabled = true;
    double k_omega = 0.0;
    double v_x_desired = 0.0;
    double omega_min = 1.0;
    double omega_max = 80.0;
    double k_delta32 = 0.0;
    double delta0_deg = -180.0;
    double k_roll = 0.0;
    std::optional<double> rho3_nominal_deg;  ///< default: lead-lag node radius
    std::optional<double> rho7_nominal_deg;
    double rho_min_deg = 1.0;
    bool delta_law = false;
    double delta_offset_deg = 0.0;
    PidSpec glide_lead_lag;
    double psi_bias_deg = -5.0;
    PidSpec glide_flap;
    double phi_bias_deg = 0.0;
    double pitch_ki = 0.0;
    double theta_bias_deg = 0.0;
    double h_max_flap = 10.0;
    double h_min_glide = 5.0;
    double v_x_max = 5.0;
    double v_x_min = 3.0;
    double dwell = 0.5;
    bool operator==(const Control&) const = default;
  } control;

  struct Sim {
    double dt = 1e-3;
    double duration = 25.0;
    int record_stride = 10;
    bool dynamics = true;
    bool aerodynamics = true;
    double max_abs_derivative = 1e6;
    bool operator==(const Sim&) const = default;
  } sim;

  std::vector<ScenarioEvent> events;

  bool operator==(const Scenario&) const = default;

  std::size_t n() const { return oscillators.nodes.size(); }
};

/// Baseline oscillator set for graph configuration A (one-based order
/// phi_R, theta_R, psi_R, phi2_R, phi_L, theta_L, psi_L, phi2_L).
inline std::vector<ScenarioNode> table1_nodes() {
  return {{"phi_R", 50.0, 0.0, {}},   {"theta_R", 30.0, 0.0, {}},
          {"psi_R", 15.0, -5.0, {}},  {"phi2_R", 50.0, 0.0, {}},
          {"phi_L", 50.0, 0.0, {}},   {"theta_L", 30.0, 0.0, {}},
          {"psi_L", 15.0, -5.0, {}},  {"phi2_L", 50.0, 0.0, {}}};
}

inline std::vector<ScenarioEdge> config_a_edges() {
  return {{2, 1, 90.0},  {3, 2, -180.0}, {4, 3, 0.0}, {1, 4, 90.0},
          {1, 5, 0.0},   {5, 1, 0.0},
          {6, 5, 90.0},  {7, 6, -180.0}, {8, 7, 0.0}, {5, 8, 90.0}};
}

namespace detail {

/// Field reader that tracks the dotted path and source line for diagnostics
/// and rejects keys it was not asked about.
class YamlSection {
 public:
  YamlSection(YAML::Node node, std::string path)
      : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      fail(path_, node_, "expected a mapping");
  }

  bool present() const { return node_ && !node_.IsNull(); }
  bool has(const std::string& key) const { return present() && node_[key]; }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    out = convert<T>(node_[key], child(key));
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!has(key)) return;
    out = convert<T>(node_[key], child(key));
  }

  template <typename T, std::size_t N>
  void get(const std::string& key, std::array<T, N>& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const YAML::Node seq = node_[key];
    if (!seq.IsSequence() || seq.size() != N)
      fail(child(key), seq, "expected a list of " + std::to_string(N) + " numbers");
    for (std::size_t i = 0; i < N; ++i)
      out[i] = convert<T>(seq[i], child(key) + "[" + std::to_string(i) + "]");
  }

  void get(const std::string& key, std::vector<double>& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const YAML::Node seq = node_[key];
    if (!seq.IsSequence()) fail(child(key), seq, "expected a list of numbers");
    out.clear();
    for (std::size_t i = 0; i < seq.size(); ++i)
      out.push_back(convert<double>(seq[i], child(key) + "[" + std::to_string(i) + "]"));
  }

  void require(const std::string& key) const {
    if (!has(key)) fail(child(key), node_, "missing required field");
  }

  YamlSection section(const std::string& key) {
    seen_.insert(key);
    return YamlSection(present() ? node_[key] : YAML::Node(), child(key));
  }

  /// Undefined (false in a boolean test) when the key is absent.
  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? node_[key] : YAML::Node(YAML::NodeType::Undefined);
  }

  /// Throws on the first key that no getter asked for.
  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(child(key), kv.first, "unknown key");
    }
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const std::string& path() const { return path_; }

  [[noreturn]] static void fail(const std::string& path, const YAML::Node& at,
                                const std::string& msg) {
    std::string where = path;
    if (at && at.Mark().line >= 0)
      where = "line " + std::to_string(at.Mark().line + 1) + ": " + path;
    throw ValidationError(where, msg);
  }

  template <typename T>
  static T convert(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(path, n, "expected a scalar value");
    try {
      T v = n.as<T>();
      if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) fail(path, n, "value must be finite");
      }
      return v;
    } catch (const YAML::BadConversion&) {
      fail(path, n, "cannot convert '" + n.Scalar() + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ValidationError(path, msg);
}

}  // namespace detail

/// Structural and range checks that do not need the file (also applied after
/// command-line overrides).
inline void validate_scenario(const Scenario& s) {
  using detail::check;
  const auto& o = s.oscillators;
  check(!o.nodes.empty(), "oscillators.nodes", "at least one oscillator required");
  check(o.lambda_flap > 0.0, "oscillators.lambda_flap", "must be > 0");
  check(o.lambda_glide > 0.0, "oscillators.lambda_glide", "must be > 0");
  check(o.sigma0 == 1 || o.sigma0 == -1, "oscillators.sigma0", "must be +1 or -1");
  check(o.omega0 >= 0.0, "oscillators.omega0", "must be >= 0");
  for (std::size_t i = 0; i < o.nodes.size(); ++i) {
    const std::string p = "oscillators.nodes[" + std::to_string(i) + "]";
    check(o.nodes[i].rho_deg > 0.0, p + ".rho_deg", "must be > 0");
  }
  const int n = static_cast<int>(o.nodes.size());
  check(s.topology.k_flap >= 0.0, "topology.k_flap", "must be >= 0");
  for (std::size_t e = 0; e < s.topology.edges.size(); ++e) {
    const auto& edge = s.topology.edges[e];
    const std::string p = "topology.edges[" + std::to_string(e) + "]";
    check(edge.to >= 1 && edge.to <= n && edge.from >= 1 && edge.from <= n, p,
          "edge " + std::to_string(edge.to) + "<-" + std::to_string(edge.from) +
              " references a node outside 1.." + std::to_string(n));
  }
  const auto& w = s.wing;
  check(w.span > 0.0, "wing.span", "must be > 0");
  check(w.chord > 0.0, "wing.chord", "must be > 0");
  check(w.dr > 0.0 && w.dr <= w.span, "wing.dr", "must be in (0, span]");
  for (double c : w.chord_table) check(c > 0.0, "wing.chord_table", "entries must be > 0");
  for (const auto* joints : {&w.right_joints, &w.left_joints}) {
    for (int j : *joints)
      check(j >= 1 && j <= n, joints == &w.right_joints ? "wing.joints.right" : "wing.joints.left",
            "joint node " + std::to_string(j) + " outside 1.." + std::to_string(n));
  }
  const auto& a = s.aero;
  check(a.air_density > 0.0, "aero.air_density", "must be > 0");
  check(a.x0_hat >= 0.0 && a.x0_hat < 0.75, "aero.x0_hat", "must lie in [0, 0.75)");
  check(a.alpha_rate == "pitch_rate" || a.alpha_rate == "kinematic",
        "aero.alpha_rate", "must be 'pitch_rate' or 'kinematic'");
  const auto& v = s.vehicle;
  check(v.mass > 0.0, "vehicle.mass", "must be > 0");
  check(v.gravity >= 0.0, "vehicle.gravity", "must be >= 0");
  {
    Mat3 inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.inertia.data());
    check(inertia.isApprox(inertia.transpose(), 1e-12), "vehicle.inertia", "must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
    check(eig.eigenvalues().minCoeff() > 0.0, "vehicle.inertia", "must be positive definite");
  }
  check(std::abs(v.euler_deg[1]) < 88.0, "vehicle.initial.euler_deg", "|pitch| must be below 88 deg");
  if (v.s_ref) check(*v.s_ref > 0.0, "vehicle.s_ref", "must be > 0");
  if (v.c_ref) check(*v.c_ref > 0.0, "vehicle.c_ref", "must be > 0");
  const auto& c = s.control;
  check(c.omega_min >= 0.0 && c.omega_max > c.omega_min, "control.omega_max",
        "need 0 <= omega_min < omega_max");
  check(c.rho_min_deg > 0.0, "control.rho_min_deg", "must be > 0");
  if (c.rho3_nominal_deg) check(*c.rho3_nominal_deg > 0.0, "control.rho3_nominal_deg", "must be > 0");
  if (c.rho7_nominal_deg) check(*c.rho7_nominal_deg > 0.0, "control.rho7_nominal_deg", "must be > 0");
  check(c.h_max_flap > c.h_min_glide, "control.switching.h_max_flap", "must exceed h_min_glide");
  check(c.v_x_max > c.v_x_min, "control.switching.v_x_max", "must exceed v_x_min");
  check(c.dwell >= 0.0, "control.switching.dwell", "must be >= 0");
  const auto& sim = s.sim;
  check(sim.dt > 0.0, "sim.dt", "must be > 0");
  check(sim.duration >= 0.0, "sim.duration", "must be >= 0");
  check(sim.record_stride >= 1, "sim.record_stride", "must be >= 1");
  check(sim.max_abs_derivative > 0.0, "sim.max_abs_derivative", "must be > 0");
  for (std::size_t i = 0; i < s.events.size(); ++i)
    check(s.events[i].t >= 0.0, "events[" + std::to_string(i) + "].t", "must be >= 0");
}

/// Parses and validates a scenario document. Topology-level checks (balance,
/// cycle consistency) are applied when the simulation is built, see
/// `validate_scenario_topology` in simulation.hpp.
inline Scenario parse_scenario_text(const std::string& text,
                                    const std::string& source = "<scenario>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError("line " + std::to_string(e.mark.line + 1),
                          "syntax error: " + e.msg);
  }
  if (!root || root.IsNull())
    throw ValidationError(source, "missing required section: oscillators");
  if (!root.IsMap()) throw ValidationError(source, "top level must be a mapping");

  using detail::YamlSection;
  YamlSection top(root, "");
  Scenario s;

  if (!top.has("oscillators"))
    throw ValidationError(source, "missing required section: oscillators");
  {
    auto o = top.section("oscillators");
    o.require("omega0");
    o.get("lambda_flap", s.oscillators.lambda_flap);
    o.get("lambda_glide", s.oscillators.lambda_glide);
    o.get("sigma0", s.oscillators.sigma0);
    o.get("omega0", s.oscillators.omega0);
    const YAML::Node nodes = o.raw("nodes");
    if (nodes) {
      if (!nodes.IsSequence())
        YamlSection::fail("oscillators.nodes", nodes, "expected a list");
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        YamlSection ns(nodes[i], "oscillators.nodes[" + std::to_string(i) + "]");
        ScenarioNode node;
        node.name = "osc" + std::to_string(i + 1);
        ns.require("rho_deg");
        ns.get("name", node.name);
        ns.get("rho_deg", node.rho_deg);
        ns.get("a_deg", node.a_deg);
        std::array<double, 2> init{};
        if (ns.has("initial_deg")) {
          ns.get("initial_deg", init);
          node.initial_deg = init;
        }
        ns.finish();
        s.oscillators.nodes.push_back(node);
      }
    } else {
      s.oscillators.nodes = table1_nodes();
    }
    o.finish();
  }

  {
    auto t = top.section("topology");
    t.get("k_flap", s.topology.k_flap);
    const YAML::Node edges = t.raw("edges");
    if (edges) {
      if (!edges.IsSequence())
        YamlSection::fail("topology.edges", edges, "expected a list");
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string p = "topology.edges[" + std::to_string(i) + "]";
        YamlSection es(edges[i], p);
        ScenarioEdge e;
        es.require("to");
        es.require("from");
        es.require("delta_deg");
        es.get("to", e.to);
        es.get("from", e.from);
        es.get("delta_deg", e.delta_deg);
        es.finish();
        const int n = static_cast<int>(s.oscillators.nodes.size());
        if (e.to < 1 || e.to > n || e.from < 1 || e.from > n)
          YamlSection::fail(p, edges[i],
                            "edge " + std::to_string(e.to) + "<-" +
                                std::to_string(e.from) +
                                " references a node outside 1.." + std::to_string(n));
        s.topology.edges.push_back(e);
      }
    } else if (s.oscillators.nodes.size() == 8) {
      s.topology.edges = config_a_edges();
    }
    t.finish();
  }

  {
    auto w = top.section("wing");
    w.get("span", s.wing.span);
    w.get("chord", s.wing.chord);
    w.get("dr", s.wing.dr);
    w.get("chord_table", s.wing.chord_table);
    w.get("stroke_incline_deg", s.wing.stroke_incline_deg);
    w.get("stroke_incline_rate_deg_s", s.wing.stroke_incline_rate_deg_s);
    w.get("offset", s.wing.offset);
    auto j = w.section("joints");
    j.get("right", s.wing.right_joints);
    j.get("left", s.wing.left_joints);
    j.finish();
    w.finish();
  }

  {
    auto a = top.section("aero");
    a.get("air_density", s.aero.air_density);
    a.get("x0_hat", s.aero.x0_hat);
    auto cl = a.section("lift");
    cl.get("c0", s.aero.cl0);
    cl.get("amplitude", s.aero.cl_amp);
    cl.get("slope", s.aero.cl_slope);
    cl.get("shift_deg", s.aero.cl_shift_deg);
    cl.finish();
    auto cd = a.section("drag");
    cd.get("c0", s.aero.cd0);
    cd.get("amplitude", s.aero.cd_amp);
    cd.get("slope", s.aero.cd_slope);
    cd.get("shift_deg", s.aero.cd_shift_deg);
    cd.finish();
    a.get("cl0_moment", s.aero.cl0_moment);
    a.get("cm0", s.aero.cm0);
    a.get("cm_alpha", s.aero.cm_alpha);
    a.get("cn0", s.aero.cn0);
    a.get("alpha_rate", s.aero.alpha_rate);
    a.finish();
  }

  {
    auto v = top.section("vehicle");
    v.get("mass", s.vehicle.mass);
    if (v.has("inertia")) {
      const YAML::Node in = v.raw("inertia");
      if (in.IsSequence() && in.size() == 3) {
        std::array<double, 3> diag{};
        v.get("inertia", diag);
        s.vehicle.inertia = {diag[0], 0, 0, 0, diag[1], 0, 0, 0, diag[2]};
      } else {
        v.get("inertia", s.vehicle.inertia);
      }
    }
    v.get("gravity", s.vehicle.gravity);
    v.get("body_cm0", s.vehicle.body_cm0);
    v.get("body_cm_alpha", s.vehicle.body_cm_alpha);
    v.get("s_ref", s.vehicle.s_ref);
    v.get("c_ref", s.vehicle.c_ref);
    v.get("extra_force", s.vehicle.extra_force);
    auto init = v.section("initial");
    init.get("velocity", s.vehicle.velocity);
    init.get("omega_deg_s", s.vehicle.omega_deg_s);
    init.get("euler_deg", s.vehicle.euler_deg);
    init.get("position", s.vehicle.position);
    init.finish();
    v.finish();
  }

  {
    auto c = top.section("control");
    auto& cs = s.control;
    c.get("enabled", cs.enabled);
    c.get("k_omega", cs.k_omega);
    c.get("v_x_desired", cs.v_x_desired);
    c.get("omega_min", cs.omega_min);
    c.get("omega_max", cs.omega_max);
    c.get("k_delta32", cs.k_delta32);
    c.get("delta0_deg", cs.delta0_deg);
    c.get("k_roll", cs.k_roll);
    c.get("rho3_nominal_deg", cs.rho3_nominal_deg);
    c.get("rho7_nominal_deg", cs.rho7_nominal_deg);
    c.get("rho_min_deg", cs.rho_min_deg);
    c.get("delta_law", cs.delta_law);
    c.get("delta_offset_deg", cs.delta_offset_deg);
    auto g = c.section("glide");
    auto ll = g.section("lead_lag");
    ll.get("kp", cs.glide_lead_lag.kp);
    ll.get("kd", cs.glide_lead_lag.kd);
    ll.get("ki", cs.glide_lead_lag.ki);
    ll.finish();
    g.get("psi_bias_deg", cs.psi_bias_deg);
    auto fl = g.section("flap");
    fl.get("kp", cs.glide_flap.kp);
    fl.get("kd", cs.glide_flap.kd);
    fl.get("ki", cs.glide_flap.ki);
    fl.finish();
    g.get("phi_bias_deg", cs.phi_bias_deg);
    g.get("pitch_ki", cs.pitch_ki);
    g.get("theta_bias_deg", cs.theta_bias_deg);
    g.finish();
    auto sw = c.section("switching");
    sw.get("h_max_flap", cs.h_max_flap);
    sw.get("h_min_glide", cs.h_min_glide);
    sw.get("v_x_max", cs.v_x_max);
    sw.get("v_x_min", cs.v_x_min);
    sw.get("dwell", cs.dwell);
    sw.finish();
    c.finish();
  }

  {
    auto m = top.section("sim");
    m.get("dt", s.sim.dt);
    m.get("duration", s.sim.duration);
    m.get("record_stride", s.sim.record_stride);
    m.get("dynamics", s.sim.dynamics);
    m.get("aerodynamics", s.sim.aerodynamics);
    m.get("max_abs_derivative", s.sim.max_abs_derivative);
    m.finish();
  }

  {
    const YAML::Node events = top.raw("events");
    if (events) {
      if (!events.IsSequence()) YamlSection::fail("events", events, "expected a list");
      for (std::size_t i = 0; i < events.size(); ++i) {
        YamlSection es(events[i], "events[" + std::to_string(i) + "]");
        ScenarioEvent ev;
        es.require("t");
        es.get("t", ev.t);
        es.get("set_bank_deg", ev.set_bank_deg);
        es.get("set_speed", ev.set_speed);
        es.get("freeze_frequency", ev.freeze_frequency);
        es.get("delta_law", ev.delta_law);
        es.get("delta_offset_deg", ev.delta_offset_deg);
        es.finish();
        s.events.push_back(ev);
      }
    }
  }
  top.finish();

  validate_scenario(s);
  return s;
}

inline Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

namespace detail {

template <typename Seq>
void emit_flow_seq(YAML::Emitter& out, const Seq& seq) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : seq) out << x;
  out << YAML::EndSeq;
}

inline void emit_pid(YAML::Emitter& out, const char* key, const PidSpec& p) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "kp" << YAML::Value << p.kp << YAML::Key << "kd"
      << YAML::Value << p.kd << YAML::Key << "ki" << YAML::Value << p.ki
      << YAML::EndMap;
}

}  // namespace detail

/// Canonical YAML with every field written out at full precision.
inline std::string serialize_scenario(const Scenario& s) {
  using detail::emit_flow_seq;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "oscillators" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda_flap" << YAML::Value << s.oscillators.lambda_flap;
  out << YAML::Key << "lambda_glide" << YAML::Value << s.oscillators.lambda_glide;
  out << YAML::Key << "sigma0" << YAML::Value << s.oscillators.sigma0;
  out << YAML::Key << "omega0" << YAML::Value << s.oscillators.omega0;
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : s.oscillators.nodes) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << n.name;
    out << YAML::Key << "rho_deg" << YAML::Value << n.rho_deg;
    out << YAML::Key << "a_deg" << YAML::Value << n.a_deg;
    if (n.initial_deg) {
      out << YAML::Key << "initial_deg" << YAML::Value;
      emit_flow_seq(out, *n.initial_deg);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "k_flap" << YAML::Value << s.topology.k_flap;
  out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : s.topology.edges) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "to" << YAML::Value
        << e.to << YAML::Key << "from" << YAML::Value << e.from << YAML::Key
        << "delta_deg" << YAML::Value << e.delta_deg << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  const auto& w = s.wing;
  out << YAML::Key << "wing" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "span" << YAML::Value << w.span;
  out << YAML::Key << "chord" << YAML::Value << w.chord;
  out << YAML::Key << "dr" << YAML::Value << w.dr;
  if (!w.chord_table.empty()) {
    out << YAML::Key << "chord_table" << YAML::Value;
    emit_flow_seq(out, w.chord_table);
  }
  out << YAML::Key << "stroke_incline_deg" << YAML::Value << w.stroke_incline_deg;
  out << YAML::Key << "stroke_incline_rate_deg_s" << YAML::Value
      << w.stroke_incline_rate_deg_s;
  out << YAML::Key << "offset" << YAML::Value;
  emit_flow_seq(out, w.offset);
  out << YAML::Key << "joints" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "right" << YAML::Value;
  emit_flow_seq(out, w.right_joints);
  out << YAML::Key << "left" << YAML::Value;
  emit_flow_seq(out, w.left_joints);
  out << YAML::EndMap << YAML::EndMap;

  const auto& a = s.aero;
  out << YAML::Key << "aero" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "air_density" << YAML::Value << a.air_density;
  out << YAML::Key << "x0_hat" << YAML::Value << a.x0_hat;
  out << YAML::Key << "lift" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "c0" << YAML::Value << a.cl0 << YAML::Key << "amplitude"
      << YAML::Value << a.cl_amp << YAML::Key << "slope" << YAML::Value
      << a.cl_slope << YAML::Key << "shift_deg" << YAML::Value << a.cl_shift_deg
      << YAML::EndMap;
  out << YAML::Key << "drag" << YAML::Value << YAML::Flow << YAML::BeginMap
      << YAML::Key << "c0" << YAML::Value << a.cd0 << YAML::Key << "amplitude"
      << YAML::Value << a.cd_amp << YAML::Key << "slope" << YAML::Value
      << a.cd_slope << YAML::Key << "shift_deg" << YAML::Value << a.cd_shift_deg
      << YAML::EndMap;
  out << YAML::Key << "cl0_moment" << YAML::Value << a.cl0_moment;
  out << YAML::Key << "cm0" << YAML::Value << a.cm0;
  out << YAML::Key << "cm_alpha" << YAML::Value << a.cm_alpha;
  out << YAML::Key << "cn0" << YAML::Value << a.cn0;
  out << YAML::Key << "alpha_rate" << YAML::Value << a.alpha_rate;
  out << YAML::EndMap;

  const auto& v = s.vehicle;
  out << YAML::Key << "vehicle" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mass" << YAML::Value << v.mass;
  out << YAML::Key << "inertia" << YAML::Value;
  emit_flow_seq(out, v.inertia);
  out << YAML::Key << "gravity" << YAML::Value << v.gravity;
  out << YAML::Key << "body_cm0" << YAML::Value << v.body_cm0;
  out << YAML::Key << "body_cm_alpha" << YAML::Value << v.body_cm_alpha;
  if (v.s_ref) out << YAML::Key << "s_ref" << YAML::Value << *v.s_ref;
  if (v.c_ref) out << YAML::Key << "c_ref" << YAML::Value << *v.c_ref;
  out << YAML::Key << "extra_force" << YAML::Value;
  emit_flow_seq(out, v.extra_force);
  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "velocity" << YAML::Value;
  emit_flow_seq(out, v.velocity);
  out << YAML::Key << "omega_deg_s" << YAML::Value;
  emit_flow_seq(out, v.omega_deg_s);
  out << YAML::Key << "euler_deg" << YAML::Value;
  emit_flow_seq(out, v.euler_deg);
  out << YAML::Key << "position" << YAML::Value;
  emit_flow_seq(out, v.position);
  out << YAML::EndMap << YAML::EndMap;

  const auto& c = s.control;
  out << YAML::Key << "control" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << c.enabled;
  out << YAML::Key << "k_omega" << YAML::Value << c.k_omega;
  out << YAML::Key << "v_x_desired" << YAML::Value << c.v_x_desired;
  out << YAML::Key << "omega_min" << YAML::Value << c.omega_min;
  out << YAML::Key << "omega_max" << YAML::Value << c.omega_max;
  out << YAML::Key << "k_delta32" << YAML::Value << c.k_delta32;
  out << YAML::Key << "delta0_deg" << YAML::Value << c.delta0_deg;
  out << YAML::Key << "k_roll" << YAML::Value << c.k_roll;
  if (c.rho3_nominal_deg)
    out << YAML::Key << "rho3_nominal_deg" << YAML::Value << *c.rho3_nominal_deg;
  if (c.rho7_nominal_deg)
    out << YAML::Key << "rho7_nominal_deg" << YAML::Value << *c.rho7_nominal_deg;
  out << YAML::Key << "rho_min_deg" << YAML::Value << c.rho_min_deg;
  out << YAML::Key << "delta_law" << YAML::Value << c.delta_law;
  out << YAML::Key << "delta_offset_deg" << YAML::Value << c.delta_offset_deg;
  out << YAML::Key << "glide" << YAML::Value << YAML::BeginMap;
  detail::emit_pid(out, "lead_lag", c.glide_lead_lag);
  out << YAML::Key << "psi_bias_deg" << YAML::Value << c.psi_bias_deg;
  detail::emit_pid(out, "flap", c.glide_flap);
  out << YAML::Key << "phi_bias_deg" << YAML::Value << c.phi_bias_deg;
  out << YAML::Key << "pitch_ki" << YAML::Value << c.pitch_ki;
  out << YAML::Key << "theta_bias_deg" << YAML::Value << c.theta_bias_deg;
  out << YAML::EndMap;
  out << YAML::Key << "switching" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "h_max_flap" << YAML::Value << c.h_max_flap;
  out << YAML::Key << "h_min_glide" << YAML::Value << c.h_min_glide;
  out << YAML::Key << "v_x_max" << YAML::Value << c.v_x_max;
  out << YAML::Key << "v_x_min" << YAML::Value << c.v_x_min;
  out << YAML::Key << "dwell" << YAML::Value << c.dwell;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << s.sim.dt;
  out << YAML::Key << "duration" << YAML::Value << s.sim.duration;
  out << YAML::Key << "record_stride" << YAML::Value << s.sim.record_stride;
  out << YAML::Key << "dynamics" << YAML::Value << s.sim.dynamics;
  out << YAML::Key << "aerodynamics" << YAML::Value << s.sim.aerodynamics;
  out << YAML::Key << "max_abs_derivative" << YAML::Value << s.sim.max_abs_derivative;
  out << YAML::EndMap;

  out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : s.events) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "t" << YAML::Value << e.t;
    if (e.set_bank_deg) out << YAML::Key << "set_bank_deg" << YAML::Value << *e.set_bank_deg;
    if (e.set_speed) out << YAML::Key << "set_speed" << YAML::Value << *e.set_speed;
    if (e.freeze_frequency)
      out << YAML::Key << "freeze_frequency" << YAML::Value << *e.freeze_frequency;
    if (e.delta_law) out << YAML::Key << "delta_law" << YAML::Value << *e.delta_law;
    if (e.delta_offset_deg)
      out << YAML::Key << "delta_offset_deg" << YAML::Value << *e.delta_offset_deg;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

/// FNV-1a over the canonical serialization; stable across runs and hosts.
inline std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_scenario(s)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cpgflight
