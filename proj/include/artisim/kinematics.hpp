#ifndef ARTISIM_KINEMATICS_HPP
#define ARTISIM_KINEMATICS_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "artisim/params.hpp"

namespace artisim {

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  using std::ceil;
  const Scalar two_pi = Scalar(2.0 * M_PI);
  // Shift so that a - k*2pi lands in (-pi, pi].
  const Scalar k = ceil((a - Scalar(M_PI)) / two_pi);
  Scalar w = a - k * two_pi;
  if (w <= Scalar(-M_PI)) w += two_pi;
  return w;
}

/// Kinematic state: drive-axle position, tractor heading, articulation.
template <typename Scalar>
using KinState = Eigen::Matrix<Scalar, 4, 1>;

namespace kin {
enum Index : Eigen::Index { X1 = 0, Y1 = 1, Psi1 = 2, Gamma = 3 };
}

template <typename Scalar>
struct KinInput {
  Scalar delta;  // road-wheel angle [rad]
  Scalar u1;     // tractor longitudinal velocity [m/s], negative in reverse
};

/// Single-axle kinematic tractor-semitrailer, reference point at the drive
/// axle, articulation gamma = psi1 - psi2.
template <typename Scalar>
KinState<Scalar> kin_derivatives(const KinState<Scalar>& s, const KinInput<Scalar>& in,
                                 const VehicleParams& p) {
  using std::cos;
  using std::sin;
  using std::tan;
  const Scalar psi1 = s(kin::Psi1);
  const Scalar gamma = s(kin::Gamma);
  const Scalar yaw_rate = in.u1 * tan(in.delta) / Scalar(p.L1);

  KinState<Scalar> ds;
  ds(kin::X1) = in.u1 * cos(psi1);
  ds(kin::Y1) = in.u1 * sin(psi1);
  ds(kin::Psi1) = yaw_rate;
  ds(kin::Gamma) = -in.u1 * sin(gamma) / Scalar(p.L2) +
                   (Scalar(1) - Scalar(p.L1c) * cos(gamma) / Scalar(p.L2)) * yaw_rate;
  return ds;
}

/// Residual of the articulation rate at constant steer, per unit speed.
template <typename Scalar>
Scalar kin_articulation_residual(Scalar gamma, Scalar delta, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  using std::tan;
  return sin(gamma) / Scalar(p.L2) -
         (Scalar(1) - Scalar(p.L1c) * cos(gamma) / Scalar(p.L2)) * tan(delta) / Scalar(p.L1);
}

/// Steady-state articulation of a constant-steer circle. Independent of speed.
/// Throws std::domain_error when no root exists with |gamma| < pi/2.
inline double kin_steady_state_articulation(double delta, const VehicleParams& p) {
  if (!(std::abs(delta) < M_PI / 2)) throw std::domain_error("steering angle outside (-pi/2, pi/2)");
  constexpr double kEps = 1e-9;
  double lo = -M_PI / 2 + kEps;
  double hi = M_PI / 2 - kEps;
  double r_lo = kin_articulation_residual(lo, delta, p);
  const double r_hi = kin_articulation_residual(hi, delta, p);
  if (r_lo == 0.0) return lo;
  if (r_hi == 0.0) return hi;
  if ((r_lo > 0.0) == (r_hi > 0.0)) {
    throw std::domain_error("no steady-state articulation for this steering angle");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double r_mid = kin_articulation_residual(mid, delta, p);
    if (r_mid == 0.0) return mid;
    if ((r_mid > 0.0) == (r_lo > 0.0)) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename Scalar>
struct Pose2 {
  Scalar x;
  Scalar y;
  Scalar psi;
};

/// Fifth-wheel position of the tractor, L1c ahead of the drive axle.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> fifth_wheel_from_tractor(const Pose2<Scalar>& tractor, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  return {tractor.x + Scalar(p.L1c) * cos(tractor.psi), tractor.y + Scalar(p.L1c) * sin(tractor.psi)};
}

/// Fifth-wheel position seen from the trailer, L2 ahead of the middle axle.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> fifth_wheel_from_trailer(const Pose2<Scalar>& trailer, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  return {trailer.x + Scalar(p.L2) * cos(trailer.psi), trailer.y + Scalar(p.L2) * sin(trailer.psi)};
}

/// Trailer pose at the middle trailer axle from the tractor drive-axle pose.
template <typename Scalar>
Pose2<Scalar> trailer_pose_from_tractor(const Pose2<Scalar>& tractor, Scalar gamma, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  const Scalar psi2 = tractor.psi - gamma;
  const auto hitch = fifth_wheel_from_tractor(tractor, p);
  return {hitch.x() - Scalar(p.L2) * cos(psi2), hitch.y() - Scalar(p.L2) * sin(psi2), psi2};
}

}  // namespace artisim

#endif  // ARTISIM_KINEMATICS_HPP
