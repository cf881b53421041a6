#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cpgflight {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

/// Bad argument or state handed to a numerical routine (non-finite values,
/// size mismatches, out-of-range parameters).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scenario or topology that fails validation. `where` names the offending
/// element (node, edge, field path, line).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// A simulation that had to stop mid-run. `subsystem` names the stage that
/// produced the fault (e.g. "cpg", "aerodynamics", "vehicle").
class SimulationAbort : public std::runtime_error {
 public:
  SimulationAbort(std::string subsystem, const std::string& what)
      : std::runtime_error(subsystem + ": " + what),
        subsystem_(std::move(subsystem)) {}
  const std::string& subsystem() const noexcept { return subsystem_; }

 private:
  std::string subsystem_;
};

/// A file that could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace cpgflight
