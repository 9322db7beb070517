#include <cmath>
#include <algorithm>
#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "artisim/harness.hpp"
#include "artisim/ingest.hpp"
#include "artisim/validation.hpp"

namespace artisim {
namespace {

const VehicleParams kStm = builtin_params(LoadCondition::Unloaded, ModelKind::Stm);

Channel ramp_channel(double rate, int n, double slope) {
  Channel ch;
  ch.name = "tractor_u";
  ch.unit = "m/s";
  ch.rate = rate;
  for (int k = 0; k < n; ++k) {
    ch.t.push_back(k / rate);
    ch.values.push_back(slope * k / rate);
  }
  return ch;
}

std::string expect_log_error(const std::string& text) {
  std::istringstream is(text);
  try {
    (void)parse_log(is);
  } catch (const LogError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return {};
}

TEST(LogFormat, RoundTripIsBitExact) {
  const auto trace = generate_maneuver(maneuver_preset("slalom-5"));
  const auto sim = simulate(ModelKind::Stm, trace, kStm);
  const MeasurementLog log = log_from_trajectory(sim.trajectory, kStm);
  std::ostringstream os;
  write_log(os, log);
  std::istringstream is(os.str());
  const MeasurementLog back = parse_log(is);
  EXPECT_EQ(back, log);
  std::ostringstream again;
  write_log(again, back);
  EXPECT_EQ(again.str(), os.str());
}

TEST(LogFormat, MixedRates) {
  std::istringstream is(
      "t[s],steering_wheel_angle[deg]@100,can_speed[km/h]@10\n"
      "0,0,3.6\n0.01,1,\n0.02,2,\n0.03,3,\n0.04,4,\n0.05,5,\n0.06,6,\n0.07,7,\n0.08,8,\n0.09,9,\n0.1,10,7.2\n");
  const auto log = parse_log(is);
  const auto& steer = log.channel("steering_wheel_angle");
  const auto& can = log.channel("can_speed");
  EXPECT_EQ(steer.t.size(), 11u);
  EXPECT_EQ(can.t.size(), 2u);
  EXPECT_EQ(can.rate, 10.0);
  EXPECT_EQ(steer.unit, "rad");
  EXPECT_NEAR(steer.values[10], 10.0 * M_PI / 180.0, 1e-15);
  EXPECT_NEAR(can.values[1], 2.0, 1e-15);
  EXPECT_EQ(can.mount, MountPoint::Can);
}

TEST(LogFormat, DuplicateTimestampNamesRow) {
  const auto msg = expect_log_error("t[s],tractor_u[m/s]@100\n0,1\n0.01,1\n0.01,1\n");
  EXPECT_NE(msg.find("row 4"), std::string::npos) << msg;
  EXPECT_NE(msg.find("duplicate timestamp"), std::string::npos) << msg;
}

TEST(LogFormat, Rejections) {
  EXPECT_NE(expect_log_error("t[s],wheel_speed[m/s]@100\n0,1\n").find("unknown column 'wheel_speed'"),
            std::string::npos);
  EXPECT_NE(expect_log_error("t[s],tractor_u@100\n0,1\n").find("unit tag missing"), std::string::npos);
  EXPECT_NE(expect_log_error("t[s],tractor_u[]@100\n0,1\n").find("unit tag missing"), std::string::npos);
  EXPECT_NE(expect_log_error("t[s],tractor_u[m/s]\n0,1\n").find("rate tag missing"), std::string::npos);
  EXPECT_NE(expect_log_error("t[s],tractor_u[m/s]@100\n0,1\n-1,1\n").find("non-monotone"), std::string::npos);
  EXPECT_NE(expect_log_error("t[s],tractor_u[m/s]@100\n0,x\n").find("cannot parse 'x'"), std::string::npos);
  EXPECT_NE(expect_log_error("t[s],tractor_u[furlong]@100\n0,1\n").find("unsupported unit"), std::string::npos);
  EXPECT_NE(expect_log_error("").find("empty"), std::string::npos);
}

TEST(Units, Conversion) {
  Channel ch;
  ch.name = "tractor_yaw_rate";
  ch.unit = "deg/s";
  ch.values = {180.0};
  convert_to_si(ch);
  EXPECT_EQ(ch.unit, "rad/s");
  EXPECT_NEAR(ch.values[0], M_PI, 1e-15);
  EXPECT_THROW(convert_to_si(ch), LogError);
  EXPECT_TRUE(is_si_unit("m/s"));
  EXPECT_FALSE(is_si_unit("km/h"));
}

TEST(Resample, ConstantStaysConstant) {
  Channel ch = ramp_channel(10.0, 21, 0.0);
  for (auto& v : ch.values) v = 4.2;
  for (auto method : {ResampleMethod::Hold, ResampleMethod::Linear}) {
    const auto out = resample(ch, 100.0, method);
    ASSERT_EQ(out.t.size(), 201u);
    for (double v : out.values) ASSERT_EQ(v, 4.2);
  }
}

TEST(Resample, LinearReproducesRamp) {
  const auto out = resample(ramp_channel(10.0, 11, 1.0), 100.0, ResampleMethod::Linear);
  ASSERT_EQ(out.t.size(), 101u);
  EXPECT_EQ(out.rate, 100.0);
  for (std::size_t k = 0; k < out.t.size(); ++k) ASSERT_NEAR(out.values[k], k / 100.0, 1e-12);
}

TEST(Resample, HoldKeepsRange) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  Channel ch = ramp_channel(10.0, 30, 0.0);
  for (auto& v : ch.values) v = u(rng);
  const auto out = resample(ch, 100.0, ResampleMethod::Hold);
  const auto [lo, hi] = std::minmax_element(ch.values.begin(), ch.values.end());
  for (double v : out.values) {
    ASSERT_GE(v, *lo);
    ASSERT_LE(v, *hi);
  }
  // Every held value is one of the originals and decimating returns them.
  const auto back = sample_channel(out, ch.t, ResampleMethod::Hold);
  EXPECT_EQ(back, ch.values);
}

TEST(Resample, RejectsDownsampling) {
  EXPECT_THROW((void)resample(ramp_channel(100.0, 10, 1.0), 10.0, ResampleMethod::Hold), LogError);
}

TEST(SensorOffsets, Examples) {
  EXPECT_NEAR(sensor_to_reference(0.0, 0.1, kTractorSensorOffset), -0.3825, 1e-15);
  EXPECT_NEAR(sensor_to_reference(0.0, 0.1, kTrailerSensorOffset), 1.0492, 1e-15);
  EXPECT_EQ(sensor_to_reference(0.7, 0.0, kTrailerSensorOffset), 0.7);
}

TEST(SensorOffsets, TrailerOffsetRelativeToMiddleAxle) {
  const auto o = trailer_offset_from_axle_frame(kTrailerSensorOffset, kStm);
  EXPECT_NEAR(o.x, -10.492 + (kStm.L2 - kStm.L1c), 1e-12);
  EXPECT_NEAR(o.x, -3.662, 1e-12);
  EXPECT_EQ(o.y, kTrailerSensorOffset.y);
}

TEST(SensorOffsets, RotatingFrameOracle) {
  // Rigid body moving with reference-point velocity (vx, vy) and yaw rate r.
  // Finite-difference the world position of the sensor point and express the
  // velocity in body axes.
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const double vx = u(rng), vy = u(rng), r = 0.3 * u(rng), psi0 = u(rng);
    const SensorOffset off{3 * u(rng), u(rng), 0.0};
    const auto sensor_at = [&](double t) {
      const double psi = psi0 + r * t;
      const Eigen::Vector2d ref(vx * t * std::cos(psi0) - vy * t * std::sin(psi0),
                                vx * t * std::sin(psi0) + vy * t * std::cos(psi0));
      return Eigen::Vector2d(ref + Eigen::Rotation2Dd(psi) * Eigen::Vector2d(off.x, off.y));
    };
    // The reference point moves on a straight line only to first order; the
    // central difference at t = 0 is what matters.
    const double h = 1e-6;
    const Eigen::Vector2d world = (sensor_at(h) - sensor_at(-h)) / (2 * h);
    const Eigen::Vector2d body = Eigen::Rotation2Dd(-psi0) * world;
    EXPECT_NEAR(sensor_to_reference(body.y(), r, off), vy, 1e-8);
    EXPECT_NEAR(sensor_to_reference_longitudinal(body.x(), r, off), vx, 1e-8);
    const Eigen::Vector2d p = sensor_position_to_reference(sensor_at(0.0), psi0, off);
    EXPECT_NEAR(p.norm(), 0.0, 1e-12);
  }
}

TEST(Articulation, Examples) {
  const std::vector<double> psi1{0.3, M_PI - 0.05, 1.0};
  const std::vector<double> psi2{0.1, -M_PI + 0.0332, 1.0};
  const auto g = compute_articulation(psi1, psi2);
  EXPECT_NEAR(g[0], 0.2, 1e-15);
  EXPECT_NEAR(g[1], -0.0832, 1e-12);
  EXPECT_EQ(g[2], 0.0);
  EXPECT_THROW((void)compute_articulation(psi1, std::vector<double>{0.0}), LogError);
}

TEST(Reference, RecoversSimulatedRun) {
  const auto trace = generate_maneuver(maneuver_preset("ramp-90-6-left"));
  const auto target = driver_articulation_target(trace, kStm);
  const auto& traj = simulate(ModelKind::Stm, trace, kStm, {}, &target).trajectory;
  const auto ref = reference_from_log(log_from_trajectory(traj, kStm), kStm);
  ASSERT_EQ(ref.size(), traj.size());
  EXPECT_TRUE(ref.has_reverse());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ASSERT_NEAR(ref.X1[i], traj.X1[i], 1e-9);
    ASSERT_NEAR(ref.Y1[i], traj.Y1[i], 1e-9);
    ASSERT_NEAR(ref.X2[i], traj.X2[i], 1e-9);
    ASSERT_NEAR(ref.Y2[i], traj.Y2[i], 1e-9);
    ASSERT_NEAR(ref.vy1[i], traj.vy1[i], 1e-12);
    ASSERT_NEAR(ref.vy2[i], traj.vy2[i], 1e-12);
    ASSERT_NEAR(ref.u1[i], traj.u1[i], 1e-12);
    ASSERT_NEAR(ref.gamma[i], traj.gamma[i], 1e-12);
    ASSERT_EQ(ref.delta_sw[i], traj.delta_sw_cmd[i]);
  }
  // The simulation holds each speed sample for 10 ms; the trapezoid differs
  // by half a sample over the speed ramp.
  EXPECT_NEAR(ref.s.back(), traj.s.back(), 0.5 * 0.01 * 6.0 / 3.6 + 1e-9);
}

TEST(Reference, MissingChannelNamed) {
  auto log = log_from_trajectory(simulate(ModelKind::Kin, generate_maneuver(maneuver_preset("slalom-5")),
                                          builtin_params(LoadCondition::Unloaded, ModelKind::Kin))
                                     .trajectory,
                                 kStm);
  std::erase_if(log.channels, [](const Channel& c) { return c.name == "trailer_heading"; });
  try {
    (void)reference_from_log(log, kStm);
    FAIL();
  } catch (const LogError& e) {
    EXPECT_NE(std::string(e.what()).find("trailer_heading"), std::string::npos);
  }
}

}  // namespace
}  // namespace artisim
