#pragma once

#include <concepts>

#include "cpgflight/common.hpp"

namespace cpgflight {

/// Classical four-stage Runge-Kutta step for dy/dt = f(t, y). Evaluation
/// order and arithmetic are fixed, so results are bit-reproducible.
template <typename F>
  requires std::invocable<F&, double, const VecX&>
VecX rk4_step(F&& f, double t, const VecX& y, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be > 0");
  const double half = 0.5 * dt;
  const VecX k1 = f(t, y);
  const VecX k2 = f(t + half, y + half * k1);
  const VecX k3 = f(t + half, y + half * k2);
  const VecX k4 = f(t + dt, y + dt * k3);
  VecX next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite())
    throw SimulationAbort("integrator", "non-finite state after RK4 step");
  return next;
}

}  // namespace cpgflight
