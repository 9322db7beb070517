#include <cmath>

#include <gtest/gtest.h>

#include "artisim/controller.hpp"
#include "artisim/dynamics.hpp"
#include "artisim/harness.hpp"
#include "artisim/kinematics.hpp"

namespace artisim {
namespace {

const VehicleParams kUnloaded = builtin_params(LoadCondition::Unloaded, ModelKind::Kin);

InputTrace straight_trace(double u1, double duration) {
  InputTrace trace;
  for (int k = 0; k <= static_cast<int>(duration * 100); ++k) {
    trace.t.push_back(k / 100.0);
    trace.delta_sw.push_back(0.0);
    trace.u1.push_back(u1);
  }
  return trace;
}

TEST(GainBound, UnloadedValue) {
  EXPECT_NEAR(min_stabilizing_gain(kUnloaded), 3.8 / 6.83, 1e-15);
  EXPECT_NEAR(min_stabilizing_gain(kUnloaded), 0.556369, 1e-6);
}

TEST(GainBound, PaperGainIsStabilizing) {
  for (auto c : {LoadCondition::Unloaded, LoadCondition::Loaded}) {
    EXPECT_GT(ControllerConfig{}.K, min_stabilizing_gain(builtin_params(c, ModelKind::Stm)));
  }
}

TEST(GainBound, UndefinedWhenCouplingReachesAxle) {
  VehicleParams p = kUnloaded;
  p.L2 = p.L1c;
  EXPECT_THROW((void)min_stabilizing_gain(p), std::domain_error);
}

TEST(StabilizedSteering, NoErrorNoCorrection) {
  const ControllerConfig cfg;
  for (double u : {-2.0, -0.1, 0.0, 1.0}) EXPECT_EQ(stabilized_steering(0.07, 0.3, 0.3, u, cfg), 0.07);
}

TEST(StabilizedSteering, ForwardPassThrough) {
  EXPECT_EQ(stabilized_steering(0.07, 0.5, -0.2, 1.0, ControllerConfig{}), 0.07);
}

TEST(StabilizedSteering, ReverseCorrection) {
  EXPECT_NEAR(stabilized_steering(0.07, 0.2, 0.1, -1.0, ControllerConfig{}), 0.07 + 0.3, 1e-15);
}

TEST(StabilizedSteering, CanActInBothDirections) {
  ControllerConfig cfg;
  cfg.enabled_in_reverse_only = false;
  EXPECT_NEAR(stabilized_steering(0.0, 0.2, 0.1, 1.0, cfg), 0.3, 1e-15);
}

TEST(Eigenvalue, PaperGainAtOneMeterPerSecondReverse) {
  EXPECT_NEAR(closed_loop_articulation_eigenvalue(3.0, -1.0, kUnloaded), -16.69 / 28.5, 1e-12);
  EXPECT_NEAR(closed_loop_articulation_eigenvalue(3.0, -1.0, kUnloaded), -0.58561, 1e-5);
}

TEST(Eigenvalue, MarginalAtBound) {
  EXPECT_NEAR(closed_loop_articulation_eigenvalue(min_stabilizing_gain(kUnloaded), -1.0, kUnloaded), 0.0, 1e-15);
}

TEST(Eigenvalue, LowGainUnstable) { EXPECT_GT(closed_loop_articulation_eigenvalue(0.5, -1.0, kUnloaded), 0.0); }

TEST(Eigenvalue, UndefinedAtStandstill) {
  EXPECT_THROW((void)closed_loop_articulation_eigenvalue(3.0, 0.0, kUnloaded), std::domain_error);
}

TEST(Eigenvalue, SignTheorem) {
  for (double u : {-3.0, -1.0, -0.2}) {
    for (double K = 0.0; K < 5.0; K += 0.01) {
      const bool stable = closed_loop_articulation_eigenvalue(K, u, kUnloaded) < 0.0;
      EXPECT_EQ(stable, -kUnloaded.L1 + K * (kUnloaded.L2 - kUnloaded.L1c) > 0.0) << "K " << K;
    }
  }
}

TEST(Eigenvalue, MatchesFiniteDifferenceJacobian) {
  const ControllerConfig cfg;
  for (double u : {-1.0, -2.5}) {
    for (double K : {0.5, 1.0, 3.0}) {
      ControllerConfig c = cfg;
      c.K = K;
      const auto rate = [&](double gamma) {
        const double delta = stabilized_steering(0.0, gamma, 0.0, u, c);
        KinState<double> s;
        s << 0, 0, 0, gamma;
        return kin_derivatives<double>(s, {delta, u}, kUnloaded)(kin::Gamma);
      };
      const double h = 1e-6;
      const double jac = (rate(h) - rate(-h)) / (2 * h);
      const double lambda = closed_loop_articulation_eigenvalue(K, u, kUnloaded);
      EXPECT_NEAR(jac / lambda, 1.0, 1e-6);
    }
  }
}

TEST(ClosedLoop, InitialErrorDecaysWithPaperGain) {
  SimConfig cfg;
  cfg.initial.gamma = 0.2;
  const auto trace = straight_trace(-1.0, 20.0);
  const ArticulationReference ref{trace.t, std::vector<double>(trace.size(), 0.0)};
  const auto r = simulate(ModelKind::Kin, trace, kUnloaded, cfg, &ref);
  EXPECT_FALSE(r.aborted);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    if (r.trajectory.t[i] >= 10.0) {
      EXPECT_LT(std::abs(r.trajectory.gamma[i]), 0.01);
    }
  }
  // Decay follows the linearized eigenvalue while the error is small.
  const double expected = 0.2 * std::exp(closed_loop_articulation_eigenvalue(3.0, -1.0, kUnloaded) * 15.0);
  EXPECT_NEAR(r.trajectory.gamma[1500] / expected, 1.0, 0.15);
}

TEST(ClosedLoop, ErrorGrowsBelowBound) {
  SimConfig cfg;
  cfg.controller.K = 0.5;
  cfg.initial.gamma = 0.2;
  const auto trace = straight_trace(-1.0, 60.0);
  const ArticulationReference ref{trace.t, std::vector<double>(trace.size(), 0.0)};
  const auto r = simulate(ModelKind::Kin, trace, kUnloaded, cfg, &ref);
  EXPECT_GT(std::abs(r.trajectory.gamma.back()), 0.3);
}

TEST(ClosedLoop, OpenLoopReverseJackknifes) {
  SimConfig cfg;
  cfg.closed_loop = false;
  cfg.initial.gamma = 0.05;
  const auto r = simulate(ModelKind::Kin, straight_trace(-1.0, 120.0), kUnloaded, cfg);
  EXPECT_TRUE(r.first_warning_time.has_value());
  EXPECT_TRUE(r.aborted);
}

TEST(ClosedLoop, ForwardRunsIgnoreTheController) {
  const auto spec = maneuver_preset("constant-360-5-left");
  const auto trace = generate_maneuver(spec);
  const ArticulationReference ref{trace.t, std::vector<double>(trace.size(), 0.4)};
  SimConfig open;
  open.closed_loop = false;
  const SimConfig closed;
  for (auto model : {ModelKind::Kin, ModelKind::Stm}) {
    const auto p = builtin_params(LoadCondition::Unloaded, model);
    EXPECT_EQ(simulate(model, trace, p, open).trajectory, simulate(model, trace, p, closed, &ref).trajectory);
  }
}

}  // namespace
}  // namespace artisim
