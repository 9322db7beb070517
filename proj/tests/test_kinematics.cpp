#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "artisim/dynamics.hpp"
#include "artisim/harness.hpp"
#include "artisim/kinematics.hpp"

namespace artisim {
namespace {

const VehicleParams kUnloaded = builtin_params(LoadCondition::Unloaded, ModelKind::Kin);

/// Newton iteration on the steady-turn condition, written out independently
/// of the library's bisection.
double newton_gamma_ss(double delta, const VehicleParams& p) {
  const double k = std::tan(delta) / p.L1;
  double g = delta;
  for (int i = 0; i < 60; ++i) {
    const double f = std::sin(g) / p.L2 - (1.0 - p.L1c * std::cos(g) / p.L2) * k;
    const double df = std::cos(g) / p.L2 - p.L1c * std::sin(g) / p.L2 * k;
    g -= f / df;
  }
  return g;
}

InputTrace constant_road_steer(double delta, double u1, double duration, const VehicleParams& p) {
  InputTrace trace;
  const auto n = static_cast<std::size_t>(duration * 100.0) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    trace.t.push_back(static_cast<double>(k) / 100.0);
    trace.delta_sw.push_back(inverse_steering_map(delta, p));
    trace.u1.push_back(u1);
  }
  return trace;
}

double circumradius(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
  const Eigen::Vector2d u = b - a, v = c - a;
  const double area2 = std::abs(u.x() * v.y() - u.y() * v.x());
  return ab * bc * ca / (2.0 * area2);
}

TEST(WrapAngle, IntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.2), 0.2);
  EXPECT_DOUBLE_EQ(wrap_angle(M_PI), M_PI);
  EXPECT_DOUBLE_EQ(wrap_angle(-M_PI), M_PI);
  EXPECT_NEAR(wrap_angle(6.2), 6.2 - 2 * M_PI, 1e-15);
  EXPECT_NEAR(wrap_angle(-7.0), -7.0 + 2 * M_PI, 1e-15);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = dist(rng);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -M_PI);
    EXPECT_LE(w, M_PI);
    EXPECT_NEAR(std::remainder(a - w, 2 * M_PI), 0.0, 1e-12);
  }
}

TEST(KinDerivatives, StraightLine) {
  const KinState<double> s = KinState<double>::Zero();
  const auto d = kin_derivatives<double>(s, {0.0, 1.389}, kUnloaded);
  EXPECT_DOUBLE_EQ(d(kin::X1), 1.389);
  EXPECT_DOUBLE_EQ(d(kin::Y1), 0.0);
  EXPECT_DOUBLE_EQ(d(kin::Psi1), 0.0);
  EXPECT_DOUBLE_EQ(d(kin::Gamma), 0.0);
}

TEST(KinDerivatives, SteadyInputAtFiveKmh) {
  const KinState<double> s = KinState<double>::Zero();
  const auto d = kin_derivatives<double>(s, {0.1, 1.38889}, kUnloaded);
  EXPECT_NEAR(d(kin::Psi1), 0.036672, 5e-7);
  EXPECT_NEAR(d(kin::Gamma), 0.033396, 5e-7);
  // Same numbers from the formula evaluated by hand.
  const double yaw = 1.38889 * std::tan(0.1) / 3.8;
  EXPECT_NEAR(d(kin::Psi1), yaw, 1e-15);
  EXPECT_NEAR(d(kin::Gamma), (1.0 - 0.67 / 7.5) * yaw, 1e-15);
}

TEST(KinDerivatives, MirroredInputIsOdd) {
  KinState<double> s;
  s << 1.0, 2.0, 0.0, 0.3;
  KinState<double> m = s;
  m(kin::Gamma) = -0.3;
  const auto a = kin_derivatives<double>(s, {0.12, 1.5}, kUnloaded);
  const auto b = kin_derivatives<double>(m, {-0.12, 1.5}, kUnloaded);
  EXPECT_DOUBLE_EQ(a(kin::X1), b(kin::X1));
  EXPECT_DOUBLE_EQ(a(kin::Psi1), -b(kin::Psi1));
  EXPECT_DOUBLE_EQ(a(kin::Gamma), -b(kin::Gamma));
}

TEST(KinSteadyState, ZeroSteer) { EXPECT_NEAR(kin_steady_state_articulation(0.0, kUnloaded), 0.0, 1e-12); }

TEST(KinSteadyState, MatchesNewtonOracle) {
  const double g = kin_steady_state_articulation(0.1, kUnloaded);
  EXPECT_NEAR(g, 0.18163, 1e-5);
  EXPECT_NEAR(g, newton_gamma_ss(0.1, kUnloaded), 1e-11);
}

TEST(KinSteadyState, OddSymmetry) {
  EXPECT_NEAR(kin_steady_state_articulation(-0.2, kUnloaded), -kin_steady_state_articulation(0.2, kUnloaded), 1e-12);
}

TEST(KinSteadyState, IsFixedPointOfArticulationRate) {
  for (double delta : {-0.3, -0.1, 0.02, 0.1, 0.25, 0.4}) {
    const double g = kin_steady_state_articulation(delta, kUnloaded);
    for (double u : {1.0, -1.0, 2.78}) {
      KinState<double> s;
      s << 0.0, 0.0, 0.4, g;
      EXPECT_LT(std::abs(kin_derivatives<double>(s, {delta, u}, kUnloaded)(kin::Gamma)), 1e-10);
    }
  }
}

TEST(KinSteadyState, TooMuchSteerHasNoRoot) {
  // Beyond tan(delta) = L1 / L2 the trailer would have to fold past 90 deg.
  EXPECT_THROW((void)kin_steady_state_articulation(0.6, kUnloaded), std::domain_error);
  EXPECT_THROW((void)kin_steady_state_articulation(M_PI / 2, kUnloaded), std::domain_error);
}

TEST(TrailerPose, StraightAhead) {
  const auto t = trailer_pose_from_tractor<double>({0.0, 0.0, 0.0}, 0.0, kUnloaded);
  // Fifth wheel 0.67 m ahead of the drive axle, trailer axle 7.5 m behind it.
  EXPECT_NEAR(t.x, -6.83, 1e-12);
  EXPECT_NEAR(t.y, 0.0, 1e-12);
  EXPECT_NEAR(t.psi, 0.0, 1e-12);
}

TEST(TrailerPose, SwungToPort) {
  const auto t = trailer_pose_from_tractor<double>({0.0, 0.0, 0.0}, M_PI / 2, kUnloaded);
  EXPECT_NEAR(t.psi, -M_PI / 2, 1e-12);
  EXPECT_NEAR(t.x, 0.67, 1e-12);
  EXPECT_NEAR(t.y, 7.5, 1e-12);
}

TEST(TrailerPose, CouplingPointConsistency) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI), pos(-100.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    const Pose2<double> tractor{pos(rng), pos(rng), ang(rng)};
    const double gamma = ang(rng);
    const auto trailer = trailer_pose_from_tractor(tractor, gamma, kUnloaded);
    EXPECT_LT((fifth_wheel_from_tractor(tractor, kUnloaded) - fifth_wheel_from_trailer(trailer, kUnloaded)).norm(),
              1e-12);
  }
}

// The trailer axle of the kinematic model must roll without side slip. This
// pins the fifth-wheel placement: only with the coupling ahead of the drive
// axle does the articulation equation describe a non-slipping trailer.
TEST(TrailerPose, KinematicTrailerAxleDoesNotSlip) {
  SimConfig cfg;
  cfg.closed_loop = false;
  const auto trace = constant_road_steer(0.2, 1.38889, 30.0, kUnloaded);
  const auto traj = simulate(ModelKind::Kin, trace, kUnloaded, cfg).trajectory;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double dt = traj.t[i + 1] - traj.t[i - 1];
    const Eigen::Vector2d v{(traj.X2[i + 1] - traj.X2[i - 1]) / dt, (traj.Y2[i + 1] - traj.Y2[i - 1]) / dt};
    const double lateral = -std::sin(traj.psi2[i]) * v.x() + std::cos(traj.psi2[i]) * v.y();
    worst = std::max(worst, std::abs(lateral));
    EXPECT_NEAR(traj.vy2[i], 0.0, 1e-12);
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(KinProperties, PathIsSpeedInvariant) {
  // Steering as a function of traveled distance; step sizes cover the same
  // distance at both speeds.
  const auto delta_of_s = [](double s) { return 0.25 * std::sin(s / 6.0); };
  const auto path = [&](double u, double dt) {
    KinState<double> x = KinState<double>::Zero();
    std::vector<Eigen::Vector2d> pts;
    const int steps = static_cast<int>(std::lround(60.0 / (u * dt)));
    for (int k = 0; k < steps; ++k) {
      const double delta = delta_of_s(u * dt * k);
      x = rk4_step([&](const KinState<double>& s) { return kin_derivatives<double>(s, {delta, u}, kUnloaded); }, x,
                   dt);
      pts.emplace_back(x(0), x(1));
    }
    return pts;
  };
  const auto slow = path(5.0 / 3.6, 2e-3);
  const auto fast = path(10.0 / 3.6, 1e-3);
  ASSERT_EQ(slow.size(), fast.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < slow.size(); ++i) worst = std::max(worst, (slow[i] - fast[i]).norm());
  EXPECT_LT(worst, 1e-6);
}

TEST(KinProperties, SteadyCircleRadius) {
  SimConfig cfg;
  cfg.closed_loop = false;
  const double delta = 0.1;
  const auto traj = simulate(ModelKind::Kin, constant_road_steer(delta, 1.38889, 120.0, kUnloaded), kUnloaded, cfg)
                        .trajectory;
  const std::size_t n = traj.size();
  const Eigen::Vector2d a{traj.X1[n - 2001], traj.Y1[n - 2001]};
  const Eigen::Vector2d b{traj.X1[n - 1001], traj.Y1[n - 1001]};
  const Eigen::Vector2d c{traj.X1[n - 1], traj.Y1[n - 1]};
  const double expected = kUnloaded.L1 / std::tan(delta);
  EXPECT_NEAR(circumradius(a, b, c) / expected, 1.0, 0.005);
  EXPECT_NEAR(traj.gamma.back(), kin_steady_state_articulation(delta, kUnloaded), 1e-3);
}

TEST(KinProperties, MirrorSymmetry) {
  VehicleParams p = kUnloaded;
  p.q = 0.0;
  SimConfig cfg;
  cfg.closed_loop = false;
  cfg.initial.gamma = 0.05;
  InputTrace trace;
  for (int k = 0; k <= 2000; ++k) {
    trace.t.push_back(k / 100.0);
    trace.delta_sw.push_back(3.0 * std::sin(k / 300.0));
    trace.u1.push_back(1.5);
  }
  InputTrace mirrored = trace;
  for (double& d : mirrored.delta_sw) d = -d;
  SimConfig mcfg = cfg;
  mcfg.initial.gamma = -0.05;
  const auto a = simulate(ModelKind::Kin, trace, p, cfg).trajectory;
  const auto b = simulate(ModelKind::Kin, mirrored, p, mcfg).trajectory;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.X1[i], b.X1[i], 1e-9);
    EXPECT_NEAR(a.Y1[i], -b.Y1[i], 1e-9);
    EXPECT_NEAR(a.psi1[i], -b.psi1[i], 1e-12);
    EXPECT_NEAR(a.gamma[i], -b.gamma[i], 1e-12);
  }
}

}  // namespace
}  // namespace artisim
