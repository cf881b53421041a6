#pragma once

// Reports behind the analyze-sync and coeffs commands.

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cpgflight/aerodynamics.hpp"
#include "cpgflight/integrator.hpp"
#include "cpgflight/simulation.hpp"

namespace cpgflight {

struct DecayFit {
  double rate = 0.0;        ///< fitted exponential rate, 1/s
  double t_begin = 0.0;     ///< fit window, s
  double t_end = 0.0;
  std::size_t samples = 0;
};

struct SyncReport {
  SyncThreshold threshold;
  double lambda = 0.0;
  double k = 0.0;
  bool satisfied = false;
  double predicted_rate = 0.0;  ///< k lambda_min - lambda
  std::optional<DecayFit> fit;
};

/// Least-squares slope of log(err) against t over the samples above `floor`.
inline std::optional<DecayFit> fit_decay(const std::vector<double>& t,
                                         const std::vector<double>& err,
                                         double t_begin, double floor) {
  double st = 0, sl = 0, stt = 0, stl = 0;
  std::size_t n = 0;
  DecayFit f;
  f.t_begin = t_begin;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_begin || !(err[i] > floor)) continue;
    const double l = std::log(err[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
    f.t_end = t[i];
    ++n;
  }
  if (n < 3) return std::nullopt;
  const double dn = static_cast<double>(n);
  const double den = dn * stt - st * st;
  if (den == 0.0) return std::nullopt;
  f.rate = -(dn * stl - st * sl) / den;
  f.samples = n;
  return f;
}

/// Integrates the nominal flapping network alone (no vehicle, no controller)
/// and returns (t, sync error) samples.
inline void cpg_only_run(const SimModel& m, const std::vector<OscillatorState>& start,
                         double duration, double dt, std::vector<double>& t_out,
                         std::vector<double>& err_out) {
  std::vector<HopfParams> params = m.base;
  for (auto& p : params) {
    p.sigma = 1.0;
    p.lambda = m.lambda_flap;
    p.omega = m.omega0;
  }
  NetworkTopology topo = m.topology;
  topo.k = m.k_flap;
  const CouplingMatrices mat = build_matrices(topo, std::span<const HopfParams>(params));
  VecX y(2 * m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    y(2 * i) = start[i].u;
    y(2 * i + 1) = start[i].v;
  }
  const auto to_net = [&](const VecX& s) {
    NetworkState net;
    net.params = params;
    net.states.resize(m.n);
    for (std::size_t i = 0; i < m.n; ++i) net.states[i] = {s(2 * i), s(2 * i + 1)};
    return net;
  };
  const auto steps = static_cast<std::int64_t>(std::llround(duration / dt));
  for (std::int64_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    t_out.push_back(t);
    err_out.push_back(sync_error(to_net(y), mat));
    if (k == steps) break;
    y = rk4_step([&](double, const VecX& s) { return coupled_derivative(to_net(s), topo); },
                 t, y, dt);
  }
}

inline SyncReport analyze_sync(const SimModel& m, bool with_fit) {
  if (m.n < 2) throw ValidationError("oscillators.nodes", "needs at least two oscillators");
  const CouplingMatrices mat =
      build_matrices(m.topology, std::span<const HopfParams>(m.base));
  SyncReport r;
  r.lambda = m.lambda_flap;
  r.k = m.k_flap;
  r.threshold = sync_gain_threshold(mat, r.lambda);
  r.satisfied = r.threshold.verifiable && r.k > r.threshold.k_min;
  r.predicted_rate = r.k * r.threshold.lambda_min - r.lambda;
  if (with_fit) {
    // deterministic spread-out start: node i at phase 2 pi i / n on its circle
    std::vector<OscillatorState> start(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
      const double ang = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m.n);
      start[i] = {m.base[i].a + m.base[i].rho * std::cos(ang),
                  m.base[i].rho * std::sin(ang)};
    }
    std::vector<double> t, err;
    cpg_only_run(m, start, 3.0, 1e-3, t, err);
    r.fit = fit_decay(t, err, 0.2, 1e-11);
  }
  return r;
}

inline std::string sync_verdict(const SyncReport& r) {
  std::string k;
  detail::put_number(k, r.k);
  if (!r.threshold.verifiable)
    return "graph unverifiable: lambda_min <= 0, no gain satisfies the condition";
  if (r.satisfied) return "k=" + k + " satisfies k > lambda/lambda_min";
  return "k=" + k + ": condition NOT satisfied (sufficient condition only)";
}

struct CoeffRow {
  double alpha_deg = 0.0;
  double cl = 0.0;
  double cd = 0.0;
};

/// Parses "A:B:STEP" (degrees). STEP must be positive and B >= A.
inline std::vector<CoeffRow> coefficient_table(const std::string& range,
                                               const ForceCoefficientModel& m = {}) {
  double a = 0, b = 0, step = 0;
  {
    std::vector<double> parts;
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t next = i < 2 ? range.find(':', pos) : range.size();
      if (next == std::string::npos)
        throw DomainError("alpha range must look like A:B:STEP");
      const std::string tok = range.substr(pos, next - pos);
      double v = 0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw DomainError("alpha range: cannot parse '" + tok + "'");
      parts.push_back(v);
      pos = next + 1;
    }
    a = parts[0];
    b = parts[1];
    step = parts[2];
  }
  if (!(step > 0.0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("alpha range: need A <= B and STEP > 0");
  std::vector<CoeffRow> out;
  const auto count = static_cast<std::int64_t>(std::floor((b - a) / step + 1e-9));
  for (std::int64_t i = 0; i <= count; ++i) {
    const double deg = a + static_cast<double>(i) * step;
    const LiftDrag c = lift_drag_coefficients(deg2rad(deg), m);
    out.push_back({deg, c.cl, c.cd});
  }
  return out;
}

}  // namespace cpgflight
