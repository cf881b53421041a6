// cpgflight: command-line front end.
//
// exit codes: 0 ok, 1 usage, 2 validation, 3 runtime abort, 4 I/O

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cpgflight/analysis.hpp"
#include "cpgflight/scenario.hpp"
#include "cpgflight/simulation.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kAbort = 3, kIo = 4 };

std::string num(double v) {
  std::string s;
  cpgflight::detail::put_number(s, v);
  return s;
}

int cmd_validate(const std::string& path) {
  const auto sc = cpgflight::parse_scenario(path);
  const auto model = cpgflight::build_model(sc);
  std::cout << "ok: " << path << " (" << model.n << " oscillators, "
            << sc.topology.edges.size() << " edges, hash "
            << cpgflight::hex64(model.scenario_hash) << ")\n";
  return kOk;
}

int cmd_simulate(const std::string& path, const std::string& out_path,
                 std::optional<double> duration, std::optional<double> dt) {
  auto sc = cpgflight::parse_scenario(path);
  if (duration) sc.sim.duration = *duration;
  if (dt) sc.sim.dt = *dt;
  const auto model = cpgflight::build_model(sc);

  std::ofstream file;
  std::ostream* out = nullptr;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return kIo;
    }
    out = &file;
  } else if (out_path == "-") {
    out = &std::cout;
  }

  const auto res = cpgflight::run_scenario(model, out);
  if (file.is_open()) {
    file.close();
    if (!file) {
      std::cerr << "error: write to " << out_path << " failed\n";
      return kIo;
    }
  }

  std::ostream& log = out == &std::cout ? std::cerr : std::cout;
  const auto body = cpgflight::unpack_body(model, res.final_state.y);
  log << "t_final " << num(res.final_state.t) << " s, rows " << res.rows << "\n";
  log << "final body: V_b = (" << num(body.v_body.x()) << ", " << num(body.v_body.y())
      << ", " << num(body.v_body.z()) << ") m/s, euler = ("
      << num(cpgflight::rad2deg(body.euler.x())) << ", "
      << num(cpgflight::rad2deg(body.euler.y())) << ", "
      << num(cpgflight::rad2deg(body.euler.z())) << ") deg, altitude "
      << num(body.altitude()) << " m\n";
  log << "final omega " << num(res.final_state.ctrl.omega) << " rad/s\n";
  log << "mode timeline:";
  for (const auto& mc : res.mode_changes)
    log << " " << num(mc.t) << "s " << cpgflight::mode_name(mc.mode);
  log << "\n";
  log << "mode transitions: "
      << (res.mode_changes.empty() ? 0 : res.mode_changes.size() - 1) << "\n";
  log << "peak sync error " << num(cpgflight::rad2deg(res.peak_sync_error)) << " deg\n";
  if (res.aborted) {
    std::cerr << "aborted [" << res.abort_subsystem << "]: " << res.abort_message << "\n";
    return kAbort;
  }
  return kOk;
}

int cmd_analyze_sync(const std::string& path, bool fit) {
  const auto sc = cpgflight::parse_scenario(path);
  const auto model = cpgflight::build_model(sc);
  const auto r = cpgflight::analyze_sync(model, fit);
  std::cout << "lambda_min " << num(r.threshold.lambda_min) << "\n";
  if (!r.threshold.verifiable) {
    std::cout << "k_min undefined (lambda_min <= 0)\n" << cpgflight::sync_verdict(r) << "\n";
    return kOk;
  }
  std::cout << "lambda " << num(r.lambda) << "\n"
            << "k_min " << num(r.threshold.k_min) << "\n"
            << "verdict " << cpgflight::sync_verdict(r) << "\n"
            << "guaranteed rate k*lambda_min - lambda " << num(r.predicted_rate) << " 1/s\n";
  if (r.fit)
    std::cout << "measured decay rate " << num(r.fit->rate) << " 1/s over ["
              << num(r.fit->t_begin) << ", " << num(r.fit->t_end) << "] s\n";
  else if (fit)
    std::cout << "measured decay rate unavailable (too few samples above floor)\n";
  return kOk;
}

int cmd_coeffs(const std::string& range) {
  const auto rows = cpgflight::coefficient_table(range);
  std::cout << "alpha_deg,CL,CD\n";
  for (const auto& r : rows)
    std::cout << num(r.alpha_deg) << "," << num(r.cl) << "," << num(r.cd) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPG-driven flapping-wing flight simulator"};
  app.require_subcommand(1);

  std::string scenario, out_path, range;
  std::optional<double> duration, dt;
  bool fit = true;

  auto* sim = app.add_subcommand("simulate", "run a scenario and write a time series");
  sim->add_option("scenario", scenario, "scenario file")->required();
  sim->add_option("--out", out_path, "output CSV path ('-' for stdout)");
  sim->add_option("--duration", duration, "override sim.duration (s)");
  sim->add_option("--dt", dt, "override sim.dt (s)");

  auto* sync = app.add_subcommand("analyze-sync", "synchronization gain condition");
  sync->add_option("scenario", scenario, "scenario file")->required();
  sync->add_flag("!--no-fit", fit, "skip the measured decay-rate fit");

  auto* co = app.add_subcommand("coeffs", "lift/drag coefficient table");
  co->add_option("--alpha-range", range, "A:B:STEP in degrees")->required();

  auto* val = app.add_subcommand("validate", "parse and validate a scenario");
  val->add_option("scenario", scenario, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(scenario, out_path, duration, dt);
    if (*sync) return cmd_analyze_sync(scenario, fit);
    if (*co) return cmd_coeffs(range);
    if (*val) return cmd_validate(scenario);
  } catch (const cpgflight::ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kInvalid;
  } catch (const cpgflight::DomainError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kInvalid;
  } catch (const cpgflight::SimulationAbort& e) {
    std::cerr << "aborted [" << e.subsystem() << "]: " << e.what() << "\n";
    return kAbort;
  } catch (const cpgflight::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
