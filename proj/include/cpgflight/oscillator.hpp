#pragma once

// Hopf limit-cycle oscillators, single and diffusively coupled.
//
// Each oscillator evolves the shifted state x = (u - a, v):
//
//   dx/dt = [ -lam*(|x|^2/rho^2 - sigma)   -omega ] x + input
//           [  omega   -lam*(|x|^2/rho^2 - sigma) ]
//
// With sigma = +1 the circle |x| = rho is a global attractor; with sigma = -1
// the shifted origin (u, v) = (a, 0) is globally exponentially stable.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpgflight/common.hpp"
#include "cpgflight/graph.hpp"

namespace cpgflight {

struct HopfParams {
  double lambda = 10.0;  ///< convergence rate, 1/s
  double rho = 1.0;      ///< limit-cycle radius, rad
  double a = 0.0;        ///< oscillation bias, rad
  double sigma = 1.0;    ///< bifurcation parameter, +1 or -1
  double omega = 0.0;    ///< angular frequency, rad/s

  void validate() const {
    if (!std::isfinite(lambda) || !std::isfinite(rho) || !std::isfinite(a) ||
        !std::isfinite(omega) || !std::isfinite(sigma))
      throw DomainError("HopfParams: non-finite parameter");
    if (lambda <= 0.0) throw DomainError("HopfParams: lambda must be > 0");
    if (rho <= 0.0) throw DomainError("HopfParams: rho must be > 0");
    if (sigma != 1.0 && sigma != -1.0)
      throw DomainError("HopfParams: sigma must be exactly +1 or -1");
    if (omega < 0.0) throw DomainError("HopfParams: omega must be >= 0");
  }

  bool operator==(const HopfParams&) const = default;
};

struct OscillatorState {
  double u = 0.0;
  double v = 0.0;

  Vec2 shifted(double a) const { return {u - a, v}; }
  bool operator==(const OscillatorState&) const = default;
};

/// States and parameters of every oscillator, ordered by topology node index.
struct NetworkState {
  std::vector<OscillatorState> states;
  std::vector<HopfParams> params;

  std::size_t size() const { return states.size(); }

  void check_consistent() const {
    if (states.size() != params.size())
      throw DomainError("NetworkState: states/params length mismatch");
  }

  /// Stacked shifted state {x} = (u1 - a1, v1, ..., un - an, vn).
  VecX stacked_shifted() const {
    check_consistent();
    VecX x(2 * size());
    for (std::size_t i = 0; i < size(); ++i) {
      x(2 * i) = states[i].u - params[i].a;
      x(2 * i + 1) = states[i].v;
    }
    return x;
  }
};

inline Mat2 rotation2(double delta) {
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

/// Hopf vector field on an already shifted state x = (u - a, v).
inline Vec2 hopf_field(const Vec2& x, double rho, double sigma, double lambda,
                       double omega) {
  const double radial = -lambda * (x.squaredNorm() / (rho * rho) - sigma);
  return {radial * x(0) - omega * x(1), omega * x(0) + radial * x(1)};
}

/// d/dt (u - a, v) for one oscillator with external/coupling input.
inline Vec2 hopf_derivative(const OscillatorState& state, const HopfParams& p,
                            const Vec2& input = Vec2::Zero()) {
  p.validate();
  if (!std::isfinite(state.u) || !std::isfinite(state.v) || !input.allFinite())
    throw DomainError("hopf_derivative: non-finite state or input");
  return hopf_field(state.shifted(p.a), p.rho, p.sigma, p.lambda, p.omega) +
         input;
}

/// Stacked derivative [f(x_i; rho_i)] - k G {x} - correction.
///
/// The coupling term is evaluated edge by edge,
///   -k * sum_{j in N_i} (x_i - (rho_i / rho_j) R(delta_ij) x_j),
/// which is G{x} without forming G. `correction`, when supplied, is the
/// stacked T^-1 dT/dt {x} term for time-varying phases and radii.
inline VecX coupled_derivative(const NetworkState& net,
                               const NetworkTopology& topo,
                               std::optional<std::span<const double>>
                                   correction = std::nullopt) {
  net.check_consistent();
  const std::size_t n = net.size();
  if (topo.n != n)
    throw DomainError("coupled_derivative: network has " + std::to_string(n) +
                      " oscillators, topology has " + std::to_string(topo.n));
  if (correction && correction->size() != 2 * n)
    throw DomainError("coupled_derivative: correction must have length 2n");

  const VecX x = net.stacked_shifted();
  if (!x.allFinite()) throw DomainError("coupled_derivative: non-finite state");

  VecX dx(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const HopfParams& p = net.params[i];
    p.validate();
    dx.segment<2>(2 * i) =
        hopf_field(x.segment<2>(2 * i), p.rho, p.sigma, p.lambda, p.omega);
  }
  if (topo.k != 0.0) {
    for (const Edge& e : topo.edges) {
      if (e.to >= n || e.from >= n)
        throw DomainError("coupled_derivative: edge references missing node");
      const double ratio = net.params[e.to].rho / net.params[e.from].rho;
      dx.segment<2>(2 * e.to) -=
          topo.k * (x.segment<2>(2 * e.to) -
                    ratio * (rotation2(e.delta) * x.segment<2>(2 * e.from)));
    }
  }
  if (correction) {
    for (std::size_t i = 0; i < 2 * n; ++i) dx(i) -= (*correction)[i];
  }
  return dx;
}

/// Returns `params` with every oscillator switched to `sigma`. States are
/// untouched, so the switch never introduces a discontinuity.
inline std::vector<HopfParams> bifurcation_set(std::vector<HopfParams> params,
                                               double sigma) {
  if (sigma != 1.0 && sigma != -1.0)
    throw DomainError("bifurcation_set: sigma must be +1 or -1");
  for (auto& p : params) p.sigma = sigma;
  return params;
}

}  // namespace cpgflight
