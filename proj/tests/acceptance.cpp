// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "cpgflight/analysis.hpp"
#include "cpgflight/integrator.hpp"
#include "cpgflight/scenario.hpp"
#include "cpgflight/simulation.hpp"

using namespace cpgflight;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Scenario load(const std::string& name) {
  return parse_scenario(std::string(CPGFLIGHT_SCENARIO_DIR) + "/" + name);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NetworkState network(const std::vector<HopfParams>& params, const VecX& y) {
  NetworkState net;
  net.params = params;
  net.states.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) net.states[i] = {y(2 * i), y(2 * i + 1)};
  return net;
}

std::vector<HopfParams> table1_params(double sigma, double lambda, double omega) {
  std::vector<HopfParams> out;
  for (const ScenarioNode& n : table1_nodes()) {
    HopfParams p;
    p.rho = deg2rad(n.rho_deg);
    p.a = deg2rad(n.a_deg);
    p.sigma = sigma;
    p.lambda = lambda;
    p.omega = omega;
    out.push_back(p);
  }
  return out;
}

// 1. lambda_min of configuration A
Outcome gain_threshold() {
  const SimModel m = build_model(load("config_a_cpg.yaml"));
  const auto t0 = std::chrono::steady_clock::now();
  const SyncReport r = analyze_sync(m, false);
  const double wall = seconds_since(t0);
  const double lm = r.threshold.lambda_min;
  return {std::abs(lm - 0.198) <= 0.001 && wall < 1.0,
          fmt("lambda_min=%.6f (0.198 +/- 0.001), %.3f s (< 1 s)", lm, wall)};
}

// 2. synchronisation from 50 random starts, with the contraction envelope
Outcome global_sync() {
  const SimModel m = build_model(load("config_a_cpg.yaml"));
  const SyncReport rep = analyze_sync(m, false);
  const double rate = rep.predicted_rate;
  const double rho1 = m.base[0].rho;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int below = 0, violations = 0;
  double worst_final = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<OscillatorState> start(m.n);
    for (auto& s : start) s = {u(rng), u(rng)};
    std::vector<double> t, err;
    cpg_only_run(m, start, 3.0, 1e-3, t, err);
    worst_final = std::max(worst_final, err.back());
    if (err.back() < 1e-6 * rho1) ++below;
    std::size_t i0 = 0;
    while (t[i0] < 0.2 - 1e-12) ++i0;
    const double c = 1.05 * err[i0] * std::exp(rate * t[i0]);
    for (std::size_t i = i0; i < t.size(); ++i)
      if (err[i] > c * std::exp(-rate * t[i])) ++violations;
  }
  return {below == 50 && violations == 0,
          fmt("%.0f/50 below 1e-6 rho1 at 3 s (worst %.2e), %.0f envelope violations",
              below, worst_final, violations)};
}

// 3. glide bifurcation collapses every oscillator onto its bias
Outcome bifurcation() {
  const double omega = 10.0;
  const auto params = table1_params(-1.0, 30.0, omega);
  const std::size_t n = params.size();
  const NetworkTopology topo = config_a(0.0);
  VecX y(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ang = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    y(2 * i) = params[i].a + std::cos(ang);
    y(2 * i + 1) = std::sin(ang);
  }
  const auto f = [&](double, const VecX& v) { return coupled_derivative(network(params, v), topo); };
  const double dt = 1e-3;
  double reached = -1.0;
  double turned = 0.0, prev = std::atan2(y(1), y(0) - params[0].a), turn_time = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    y = rk4_step(f, (k - 1) * dt, y, dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(y(2 * i) - params[i].a) + std::abs(y(2 * i + 1)));
    if (reached < 0.0 && worst < 1e-6) reached = k * dt;
    const double r = std::hypot(y(0) - params[0].a, y(1));
    if (r > 1e-9) {
      const double ang = std::atan2(y(1), y(0) - params[0].a);
      turned += wrap_angle(ang - prev);
      prev = ang;
      turn_time = k * dt;
    }
  }
  const double mean_omega = turned / turn_time;
  return {reached > 0.0 && std::abs(mean_omega - omega) < 1e-6,
          fmt("all |u-a|+|v| < 1e-6 at t=%.3f s (<= 1 s), mean angular rate %.9f (10)",
              reached, mean_omega)};
}

// 4. rotation equivariance and scaling of the oscillator field
Outcome symmetry() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), pos(0.5, 1.5), gain(0.1, 10.0);
  double eq = 0.0, sc = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 x(unit(rng), unit(rng));
    const Mat2 r = rotation2(kPi * unit(rng));
    const double rho = pos(rng), lambda = 30.0 * pos(rng), omega = 40.0 * pos(rng);
    const double sigma = unit(rng) < 0 ? -1.0 : 1.0;
    eq = std::max(eq, (hopf_field(r * x, rho, sigma, lambda, omega) -
                       r * hopf_field(x, rho, sigma, lambda, omega)).norm());
  }
  for (int i = 0; i < 1000; ++i) {
    const Vec2 x(unit(rng), unit(rng));
    const double g = gain(rng);
    const double rho = pos(rng), lambda = 30.0 * pos(rng), omega = 40.0 * pos(rng);
    const double sigma = unit(rng) < 0 ? -1.0 : 1.0;
    const Vec2 lhs = hopf_field(g * x, rho, sigma, lambda, omega);
    const Vec2 rhs = g * hopf_field(x, rho / g, sigma, lambda, omega);
    sc = std::max(sc, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
  }
  return {eq <= 1e-12 && sc <= 1e-12,
          fmt("equivariance max %.2e, scaling max %.2e (relative above |f|=1), tol 1e-12",
              eq, sc)};
}

// 5. correction feed keeps the network on the moving sync manifold
Outcome time_varying_correction() {
  const double omega = 10.0;
  const auto params = table1_params(1.0, 10.0, omega);
  const std::size_t n = params.size();
  const NetworkTopology topo = config_a(60.0);
  const std::vector<double> base = node_phases(topo);
  std::vector<double> radii;
  for (const auto& p : params) radii.push_back(p.rho);
  const double amp = deg2rad(20.0);
  const auto phases_at = [&](double t) {
    std::vector<double> ph = base;
    ph[2] = ph[1] + deg2rad(90.0) + amp * std::sin(2.0 * t);
    ph[6] = ph[5] + deg2rad(90.0) + amp * std::sin(2.0 * t);
    return ph;
  };
  const auto rates_at = [&](double t) {
    std::vector<double> r(n, 0.0);
    r[2] = r[6] = 2.0 * amp * std::cos(2.0 * t);
    return r;
  };
  const std::vector<double> zeros(n, 0.0);
  const auto rhs = [&](bool corrected) {
    return [&, corrected](double t, const VecX& y) {
      const NetworkTopology tt = with_node_phases(topo, phases_at(t));
      const NetworkState net = network(params, y);
      if (!corrected) return coupled_derivative(net, tt);
      const CouplingMatrices mat = build_matrices(tt, radii);
      const VecX c = correction_feed(mat, rates_at(t), zeros, net);
      return coupled_derivative(net, tt, std::span<const double>(c.data(), c.size()));
    };
  };
  const auto error_at = [&](double t, const VecX& y) {
    return sync_error(network(params, y), build_matrices(with_node_phases(topo, phases_at(t)), radii));
  };
  VecX start(2 * n);
  const std::vector<double> ph0 = phases_at(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    start(2 * i) = params[i].a + params[i].rho * std::cos(ph0[i]);
    start(2 * i + 1) = params[i].rho * std::sin(ph0[i]);
  }
  VecX yc = start, yu = start;
  const auto fc = rhs(true);
  const auto fu = rhs(false);
  const double dt = 1e-3;
  double worst_c = 0.0, min_gap = 1e300;
  int samples = 0;
  bool ordered = true;
  for (int k = 1; k <= 6000; ++k) {
    const double t0 = (k - 1) * dt;
    yc = rk4_step(fc, t0, yc, dt);
    yu = rk4_step(fu, t0, yu, dt);
    const double t = k * dt;
    if (t >= 2.0 && k % 10 == 0) {
      const double ec = error_at(t, yc), eu = error_at(t, yu);
      worst_c = std::max(worst_c, ec);
      min_gap = std::min(min_gap, eu - ec);
      if (!(eu > ec)) ordered = false;
      ++samples;
    }
  }
  const double rho1 = params[0].rho;
  return {worst_c < 1e-3 * rho1 && ordered,
          fmt("corrected max %.2e rad (< %.2e), uncorrected - corrected >= %.2e",
              worst_c, 1e-3 * rho1, min_gap) +
              fmt(" over %.0f samples in [2, 6] s", samples)};
}

// 6. force coefficients and strip integration
Outcome aero_oracle() {
  const long double d2r = 3.14159265358979323846264338327950288L / 180.0L;
  double worst = 0.0;
  for (int d = -90; d <= 90; ++d) {
    const long double ld = d;
    const long double cl = 0.225L + 1.58L * std::sin((2.13L * ld - 7.2L) * d2r);
    const long double cd = 1.92L - 1.55L * std::cos((2.04L * ld - 9.82L) * d2r);
    const LiftDrag c = lift_drag_coefficients(deg2rad(static_cast<double>(d)));
    worst = std::max({worst, static_cast<double>(std::abs(c.cl - cl)),
                      static_cast<double>(std::abs(c.cd - cd))});
  }
  // arbitrary-precision values at 45 deg
  const LiftDrag c45 = lift_drag_coefficients(deg2rad(45.0));
  worst = std::max({worst, std::abs(c45.cl - 1.80456143974444088),
                    std::abs(c45.cd - 1.70374592007850579)});

  const AeroModel model;
  WingGeometry geom;
  geom.dr = 0.01;
  const auto strips = geom.strips();
  StrokeFrame frame;
  double strip_err = 0.0;
  for (double a_deg : {5.0, 20.0, 40.0}) {
    RigidBodyState b;
    b.v_body = Vec3(5.0, 0.0, 0.0);
    WingJointState j;
    j.theta = deg2rad(a_deg);
    const WingLoads w = compute_wing_loads(b, frame, j, strips, model);
    const double ref = 0.5 * model.air_density * lift_drag_coefficients(j.theta).cl *
                       geom.chord * 25.0 * geom.span;
    strip_err = std::max(strip_err, std::abs(-w.f_wing.z() - ref) / ref);
  }
  return {worst <= 1e-12 && strip_err <= 1e-3,
          fmt("coefficient grid max diff %.2e (1e-12), strip lift rel err %.2e (1e-3)",
              worst, strip_err)};
}

VecX body_rhs(const VecX& y, const MassProperties& mp) {
  RigidBodyState s;
  s.v_body = y.segment<3>(0);
  s.omega_body = y.segment<3>(3);
  s.euler = y.segment<3>(6);
  s.position = y.segment<3>(9);
  VecX d(12);
  d << translational_derivative(s, Vec3::Zero(), mp),
      rotational_derivative(s, Vec3::Zero(), mp), euler_rates(s.euler, s.omega_body),
      position_rate(s);
  return d;
}

// Ballistic body spinning nose-up at 1 rad/s: body-axis states rotate, the
// inertial trajectory is still the parabola.
double projectile_error(double dt, double pitch_rate) {
  const MassProperties mp;
  VecX y = VecX::Zero(12);
  y.segment<3>(0) = Vec3(4.0, 0.0, -3.0);
  y(4) = pitch_rate;
  y.segment<3>(9) = Vec3(1.0, 2.0, -10.0);
  const auto steps = static_cast<int>(std::llround(1.0 / dt));
  for (int k = 0; k < steps; ++k)
    y = rk4_step([&](double, const VecX& v) { return body_rhs(v, mp); }, k * dt, y, dt);
  const Vec3 ref = Vec3(1.0, 2.0, -10.0) + Vec3(4.0, 0.0, -3.0) + Vec3(0.0, 0.0, 0.5 * mp.gravity);
  return (y.segment<3>(9) - ref).norm();
}

double decay_error(double dt) {
  VecX y(1);
  y << 1.0;
  const auto steps = static_cast<int>(std::llround(1.0 / dt));
  for (int k = 0; k < steps; ++k)
    y = rk4_step([](double, const VecX& v) -> VecX { return -v; }, k * dt, y, dt);
  return std::abs(y(0) - std::exp(-1.0));
}

// 7. RK4 order and projectile accuracy
Outcome integrator_order() {
  const double p_exp = std::log2(decay_error(0.1) / decay_error(0.05));
  const double p_proj = std::log2(projectile_error(0.1, 1.0) / projectile_error(0.05, 1.0));
  const double err = std::max(projectile_error(1e-3, 0.0), projectile_error(1e-3, 1.0));
  return {p_exp >= 3.9 && p_proj >= 3.9 && err < 1e-9,
          fmt("order %.3f (decay), %.3f (projectile), projectile error %.2e m at dt=1e-3",
              p_exp, p_proj, err)};
}

// 8. mean vertical force with and without synchronised wing pitch, baseline vehicle
// vehicle held level in a 5 m/s stream, joints on the synchronised limit cycle
Outcome pitch_lift() {
  const SimModel m = build_model(load("table1_flight.yaml"));
  const double omega = 10.0;
  RigidBodyState body;
  body.v_body = Vec3(5.0, 0.0, 0.0);
  const auto joints = [&](const WingJoints& w, double t, bool pitch) {
    const auto angle = [&](std::size_t i, double& q, double& rate) {
      const double ph = omega * t + m.base_phases[i];
      q = m.base[i].a + m.base[i].rho * std::cos(ph);
      rate = -m.base[i].rho * omega * std::sin(ph);
    };
    WingJointState j;
    angle(w.flap, j.phi, j.phi_rate);
    angle(w.lead_lag, j.psi, j.psi_rate);
    if (pitch) angle(w.pitch, j.theta, j.theta_rate);
    return j;
  };
  const double period = 2.0 * kPi / omega, dt = 1e-4;
  const auto steps = static_cast<int>(std::llround(10.0 * period / dt));
  const auto mean_lift = [&](bool pitch) {
    double sum = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double t = k * 10.0 * period / steps;
      const Vec3 f =
          compute_wing_loads(body, m.right_frame, joints(m.right, t, pitch), m.strips, m.aero).f_body +
          compute_wing_loads(body, m.left_frame, joints(m.left, t, pitch), m.strips, m.aero).f_body;
      sum += -f.z();
    }
    return sum / steps;
  };
  const double with = mean_lift(true), without = mean_lift(false);
  const double phase21 = rad2deg(wrap_angle(m.base_phases[m.right.pitch] - m.base_phases[m.right.flap]));
  return {with > without,
          fmt("mean lift %.4f N (pitch sync, delta21=%.0f deg) vs %.4f N (theta_w=0)", with,
              phase21, without) +
              fmt(", ratio %.3f at omega=10, stroke incline %.0f deg", with / without,
                  rad2deg(m.right_frame.theta_s))};
}

// 9. full baseline flight
Outcome full_flight() {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = load("table1_flight.yaml");
  sc.sim.record_stride = 1;
  const SimModel m = build_model(sc);
  double bank_sum = 0.0, yaw_sum = 0.0, theta_max = 0.0;
  int in_turn = 0;
  const RunResult r = run_scenario(m, nullptr, [&](const SimRecord& rec) {
    const RigidBodyState b = rec.body(m);
    if (rec.mode == FlightMode::Flapping) theta_max = std::max(theta_max, std::abs(b.euler(1)));
    if (rec.t >= 12.0 - 1e-9 && rec.t < 16.0 - 1e-9) {
      bank_sum += b.euler(0);
      yaw_sum += euler_rates(b.euler, b.omega_body)(2);
      ++in_turn;
    }
  });
  const double wall = seconds_since(t0);
  bool g2f = false, f2g = false;
  for (std::size_t i = 1; i < r.mode_changes.size(); ++i) {
    if (r.mode_changes[i].mode == FlightMode::Flapping) g2f = true;
    if (r.mode_changes[i].mode == FlightMode::Gliding) f2g = true;
  }
  const double bank = in_turn ? rad2deg(bank_sum / in_turn) : 0.0;
  const double yaw = in_turn ? rad2deg(yaw_sum / in_turn) : 0.0;
  const bool complete = !r.aborted && std::abs(r.final_state.t - 25.0) < 1e-9;
  const bool pass = complete && wall < 60.0 && g2f && f2g && std::abs(bank - 40.0) <= 10.0 &&
                    yaw > 0.0 && rad2deg(theta_max) < 45.0;
  std::string d = fmt("t_final %.3f s in %.2f s wall, %.0f transitions", r.final_state.t, wall,
                      static_cast<double>(r.mode_changes.size()) - 1.0);
  d += std::string(g2f ? " (glide->flap" : " (no glide->flap") +
       (f2g ? ", flap->glide)" : ", no flap->glide)");
  d += fmt(", turn bank %.2f deg (40 +/- 10), yaw rate %+.2f deg/s", bank, yaw);
  d += fmt(", max |theta| flapping %.2f deg (< 45)", rad2deg(theta_max));
  if (r.aborted) d += ", aborted: " + r.abort_message;
  return {pass, d};
}

// 10. byte-identical output
Outcome determinism() {
  bool same = true;
  std::size_t bytes = 0;
  for (const char* name : {"table1_flight.yaml", "config_a_cpg.yaml", "two_node.yaml"}) {
    const SimModel m = build_model(load(name));
    std::ostringstream a, b;
    run_scenario(m, &a);
    run_scenario(m, &b);
    same = same && a.str() == b.str();
    bytes += a.str().size();
  }
  return {same, fmt("3 scenarios, %.0f bytes per pass, identical", static_cast<double>(bytes))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion all[] = {
      {"gain threshold", gain_threshold},
      {"global synchronisation", global_sync},
      {"bifurcation inhibition", bifurcation},
      {"symmetry properties", symmetry},
      {"time-varying correction", time_varying_correction},
      {"aerodynamic oracle", aero_oracle},
      {"integrator order", integrator_order},
      {"pitch-sync lift", pitch_lift},
      {"full flight", full_flight},
      {"determinism", determinism},
  };
  int failed = 0, idx = 0;
  for (const Criterion& c : all) {
    ++idx;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%-4s criterion %2d  %-24s %s\n", o.pass ? "PASS" : "FAIL", idx, c.name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", idx - failed, idx);
  return failed;
}
