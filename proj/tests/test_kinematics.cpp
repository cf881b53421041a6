#include <gtest/gtest.h>

#include <random>

#include "cpgflight/kinematics.hpp"

using namespace cpgflight;

namespace {

BladeElement element(double r) {
  BladeElement e;
  e.r = r;
  return e;
}

StrokeFrame frame(WingSide side, double theta_s = 0.0) {
  StrokeFrame f;
  f.theta_s = theta_s;
  f.side = side;
  return f;
}

bool orthonormal(const Mat3& m, double tol) {
  return (m * m.transpose() - Mat3::Identity()).norm() < tol &&
         std::abs(m.determinant() - 1.0) < tol;
}

}  // namespace

TEST(StrokeToBody, Basics) {
  EXPECT_EQ(stroke_to_body(0.0), Mat3::Identity());
  const Mat3 t = stroke_to_body(deg2rad(90.0));
  const Vec3 x = t * Vec3::UnitX();
  EXPECT_NEAR(x.x(), 0.0, 1e-15);
  EXPECT_NEAR(x.z(), -1.0, 1e-15);
  const Mat3 t20 = stroke_to_body(deg2rad(20.0));
  EXPECT_LT((t20 * t20.transpose() - Mat3::Identity()).norm(), 1e-15);
}

TEST(WingToStroke, IdentityAndFlapBlock) {
  EXPECT_TRUE(wing_to_stroke(0.0, 0.0, WingSide::Right).isApprox(Mat3::Identity()));
  EXPECT_TRUE(wing_to_stroke(0.0, 0.0, WingSide::Left).isApprox(Mat3::Identity()));
  const double f = deg2rad(30.0);
  Mat3 ref;
  ref << 1, 0, 0, 0, std::cos(f), std::sin(f), 0, -std::sin(f), std::cos(f);
  EXPECT_LT((wing_to_stroke(f, 0.0, WingSide::Right) - ref).norm(), 1e-15);
}

TEST(WingToStroke, ChainOrthonormalForRandomAngles) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    for (WingSide side : {WingSide::Right, WingSide::Left}) {
      const Mat3 m = stroke_to_body(a(rng)) * wing_to_stroke(a(rng), a(rng), side) *
                     wing_pitch_rotation(a(rng));
      ASSERT_TRUE(orthonormal(m, 1e-14));
    }
  }
}

// Positive phi raises either wing tip (body z is down); positive psi sweeps
// either wing tip forward.
TEST(WingToStroke, SignConventionsBothWings) {
  const double f = deg2rad(30.0), p = deg2rad(20.0);
  for (WingSide side : {WingSide::Right, WingSide::Left}) {
    StrokeFrame fr = frame(side);
    WingJointState up;
    up.phi = f;
    EXPECT_LT(blade_position(fr, up, 0.3).z(), 0.0);
    WingJointState fwd;
    fwd.psi = p;
    EXPECT_GT(blade_position(fr, fwd, 0.3).x(), 0.0);
    const double y = blade_position(fr, WingJointState{}, 0.3).y();
    EXPECT_NEAR(y, side == WingSide::Right ? 0.3 : -0.3, 1e-15);
  }
}

TEST(BladeWind, ForwardFlightIdentityChain) {
  RigidBodyState b;
  b.v_body = Vec3(5.0, 0.0, 0.0);
  const FlowSample s =
      blade_wind_velocity(b, frame(WingSide::Right), WingJointState{}, element(0.1));
  EXPECT_LT((s.v_wind - Vec3(5.0, 0.0, 0.0)).norm(), 1e-15);
}

TEST(BladeWind, HoverFlapSpeed) {
  RigidBodyState b;
  WingJointState j;
  j.phi_rate = 10.0;
  const FlowSample s = local_flow_angles(
      blade_wind_velocity(b, frame(WingSide::Right), j, element(0.2)), 0.0);
  EXPECT_NEAR(s.v_r, 2.0, 1e-14);
  // (-10, 0, 0) x (0, 0.2, 0)
  EXPECT_NEAR(s.v_wind.z(), -2.0, 1e-14);
}

TEST(BladeWind, BodyRateLeverArm) {
  RigidBodyState b;
  b.omega_body = Vec3(0.0, 0.0, 1.0);
  StrokeFrame f = frame(WingSide::Right);
  f.d = Vec3(0.1, 0.0, 0.0);
  const FlowSample s = blade_wind_velocity(b, f, WingJointState{}, element(0.0));
  EXPECT_LT((s.v_wind - Vec3(0.0, 0.1, 0.0)).norm(), 1e-15);
}

TEST(BladeWind, RadiusOutsideSpanRejected) {
  RigidBodyState b;
  EXPECT_THROW(blade_wind_velocity(b, frame(WingSide::Right), {}, element(0.5)),
               DomainError);
  EXPECT_THROW(blade_wind_velocity(b, frame(WingSide::Right), {}, element(-0.01)),
               DomainError);
}

TEST(FlowAngles, LevelFlight) {
  RigidBodyState b;
  b.v_body = Vec3(5.0, 0.0, 0.0);
  const double theta = deg2rad(12.0);
  const FlowSample s = local_flow_angles(
      blade_wind_velocity(b, frame(WingSide::Right), {}, element(0.2)), theta);
  EXPECT_NEAR(s.beta, 0.0, 1e-15);
  EXPECT_NEAR(s.alpha, theta, 1e-15);
}

TEST(FlowAngles, UpstrokeAndDownstroke) {
  RigidBodyState b;
  b.v_body = Vec3(5.0, 0.0, 0.0);
  WingJointState j;
  j.phi_rate = 10.0;
  FlowSample s = local_flow_angles(
      blade_wind_velocity(b, frame(WingSide::Right), j, element(0.2)), 0.0);
  EXPECT_NEAR(rad2deg(s.beta), 21.80140948635181, 1e-10);
  j.phi_rate = -10.0;
  for (WingSide side : {WingSide::Right, WingSide::Left}) {
    s = local_flow_angles(blade_wind_velocity(b, frame(side), j, element(0.2)), 0.0);
    EXPECT_LT(s.beta, 0.0);
  }
}

TEST(FlowAngles, Degenerate) {
  const FlowSample s = local_flow_angles(FlowSample{}, 0.3);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.v_r, 0.0);
}

TEST(FlowAngles, AlphaPlusBetaIsTheta) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    RigidBodyState b;
    b.v_body = Vec3(5 * u(rng), u(rng), u(rng));
    b.omega_body = Vec3(u(rng), u(rng), u(rng));
    WingJointState j{u(rng), u(rng), u(rng), 20 * u(rng), 5 * u(rng), 5 * u(rng)};
    const FlowSample s = local_flow_angles(
        blade_wind_velocity(b, frame(WingSide::Left, 0.3), j, element(0.16 + 0.15 * u(rng))),
        j.theta);
    ASSERT_GE(s.v_r, 0.0);
    ASSERT_EQ(s.alpha, j.theta - s.beta);
  }
}

TEST(FlowAngles, MirrorSymmetry) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    RigidBodyState b;
    b.v_body = Vec3(5 + u(rng), 0.0, u(rng));
    b.omega_body = Vec3(0.0, u(rng), 0.0);
    WingJointState j{u(rng), u(rng), u(rng), 20 * u(rng), 5 * u(rng), 5 * u(rng)};
    StrokeFrame r = frame(WingSide::Right, 0.35), l = frame(WingSide::Left, 0.35);
    r.d = Vec3(0.01, 0.03, -0.02);
    l.d = mirror_y() * r.d;
    const double rr = 0.3 * (u(rng) + 1.0) / 2.0;
    const FlowSample a = local_flow_angles(blade_wind_velocity(b, r, j, element(rr)), j.theta);
    const FlowSample c = local_flow_angles(blade_wind_velocity(b, l, j, element(rr)), j.theta);
    ASSERT_NEAR(a.alpha, c.alpha, 1e-13);
    ASSERT_NEAR(a.v_r, c.v_r, 1e-13);
  }
}

// A body roll rate p > 0 moves the right wing down and the left wing up.
TEST(BladeWind, RollRateSeenOppositelyByTheWings) {
  RigidBodyState b;
  b.v_body = Vec3(5.0, 0.0, 0.0);
  b.omega_body = Vec3(1.0, 0.0, 0.0);
  const FlowSample r = local_flow_angles(
      blade_wind_velocity(b, frame(WingSide::Right), {}, element(0.2)), 0.0);
  const FlowSample l = local_flow_angles(
      blade_wind_velocity(b, frame(WingSide::Left), {}, element(0.2)), 0.0);
  EXPECT_LT(r.beta, 0.0);
  EXPECT_GT(l.beta, 0.0);
  EXPECT_NEAR(r.beta, -l.beta, 1e-15);
}

TEST(ReducedFrequency, Values) {
  EXPECT_EQ(reduced_frequency(0.0, 0.15, 5.0), 0.0);
  EXPECT_NEAR(reduced_frequency(10.0, 0.15, 5.0), 0.15, 1e-15);
  EXPECT_THROW(reduced_frequency(1.0, 0.15, 0.0), DomainError);
  // beta at the tip equals atan(2 R k_r / c)
  const double R = 0.32, c = 0.15, rate = 10.0, v = 5.0;
  RigidBodyState b;
  b.v_body = Vec3(v, 0.0, 0.0);
  WingJointState j;
  j.phi_rate = rate;
  const FlowSample s = local_flow_angles(
      blade_wind_velocity(b, frame(WingSide::Right), j, element(R)), 0.0);
  EXPECT_NEAR(s.beta, std::atan(2.0 * R * reduced_frequency(rate, c, v) / c), 1e-14);
}
