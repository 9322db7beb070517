#ifndef ARTISIM_DYNAMICS_HPP
#define ARTISIM_DYNAMICS_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "artisim/params.hpp"

namespace artisim {

/// Single-track state: drive-axle pose and articulation followed by the
/// generalized speeds (tractor-COG lateral velocity, yaw rate, articulation
/// rate).
template <typename Scalar>
using DynState = Eigen::Matrix<Scalar, 7, 1>;

namespace stm {
enum Index : Eigen::Index { X1 = 0, Y1 = 1, Psi1 = 2, Gamma = 3, V1 = 4, R1 = 5, GammaDot = 6 };
}

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using AxleVector = Eigen::Matrix<Scalar, 5, 1>;

/// Speed below which an axle's tire force is faded out linearly.
inline constexpr double kLowSpeedFade = 0.1;

class SingularMassMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Road-wheel angle from steering-wheel angle. Left steer (positive) is
/// amplified by (1 + q), right steer by (1 - q).
template <typename Scalar>
Scalar steering_map(Scalar delta_sw, const VehicleParams& p) {
  const Scalar sign = delta_sw > Scalar(0) ? Scalar(1) : (delta_sw < Scalar(0) ? Scalar(-1) : Scalar(0));
  return delta_sw / Scalar(p.i_s) * (Scalar(1) + Scalar(p.q) * sign);
}

template <typename Scalar>
Scalar inverse_steering_map(Scalar delta, const VehicleParams& p) {
  const Scalar sign = delta > Scalar(0) ? Scalar(1) : (delta < Scalar(0) ? Scalar(-1) : Scalar(0));
  return delta * Scalar(p.i_s) / (Scalar(1) + Scalar(p.q) * sign);
}

/// Slip angle per axle (front, drive, trailer 1..3) together with the
/// low-speed fade applied to the corresponding tire force.
template <typename Scalar>
struct AxleSlip {
  AxleVector<Scalar> alpha = AxleVector<Scalar>::Zero();
  AxleVector<Scalar> fade = AxleVector<Scalar>::Ones();
};

/// Planar velocities of each axle centre, expressed in the frame of the unit
/// carrying the axle.
template <typename Scalar>
struct AxleVelocities {
  AxleVector<Scalar> vx;
  AxleVector<Scalar> vy;
};

template <typename Scalar>
AxleVelocities<Scalar> axle_velocities(const DynState<Scalar>& s, Scalar u1, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  const Scalar v1 = s(stm::V1);
  const Scalar r1 = s(stm::R1);
  const Scalar gamma = s(stm::Gamma);
  const Scalar r2 = r1 - s(stm::GammaDot);

  // Fifth-wheel velocity in tractor axes, rotated into trailer axes.
  const Scalar hitch_lateral = v1 - Scalar(p.Lc) * r1;
  const Scalar u2 = u1 * cos(gamma) - hitch_lateral * sin(gamma);
  const Scalar v2c = u1 * sin(gamma) + hitch_lateral * cos(gamma);

  AxleVelocities<Scalar> out;
  out.vx << u1, u1, u2, u2, u2;
  out.vy << v1 + Scalar(p.a1) * r1, v1 - Scalar(p.b1) * r1, v2c - Scalar(p.L21) * r2, v2c - Scalar(p.L22) * r2,
      v2c - Scalar(p.L23) * r2;
  return out;
}

template <typename Scalar>
AxleSlip<Scalar> slip_angles(const DynState<Scalar>& s, Scalar u1, Scalar delta, const VehicleParams& p) {
  using std::abs;
  using std::atan2;
  const auto vel = axle_velocities(s, u1, p);
  AxleSlip<Scalar> out;
  for (Eigen::Index i = 0; i < 5; ++i) {
    const Scalar steer = i == 0 ? delta : Scalar(0);
    const Scalar vx = vel.vx(i);
    const Scalar vy = vel.vy(i);
    // Slip seen in the rolling direction, so the force opposes lateral
    // sliding both ways. Forward this is steer - atan(vy / vx).
    const Scalar sign = vx < Scalar(0) ? Scalar(-1) : Scalar(1);
    out.alpha(i) = sign * steer - atan2(vy, abs(vx));
    out.fade(i) = abs(vx) < Scalar(kLowSpeedFade) ? abs(vx) / Scalar(kLowSpeedFade) : Scalar(1);
  }
  return out;
}

/// Linear tire law, F = f * Fz * alpha, times the low-speed fade.
template <typename Scalar>
AxleVector<Scalar> tire_forces(const AxleSlip<Scalar>& slip, const VehicleParams& p) {
  const auto loads = p.axle_loads();
  AxleVector<Scalar> fy;
  for (Eigen::Index i = 0; i < 5; ++i) {
    fy(i) = Scalar(p.f) * Scalar(loads[static_cast<std::size_t>(i)]) * slip.alpha(i) * slip.fade(i);
  }
  return fy;
}

template <typename Scalar>
Matrix3<Scalar> mass_matrix(Scalar gamma, const VehicleParams& p) {
  using std::cos;
  const Scalar c = cos(gamma);
  const Scalar m1 = Scalar(p.m1), m2 = Scalar(p.m2), J1 = Scalar(p.J1), J2 = Scalar(p.J2);
  const Scalar a2 = Scalar(p.a2), Lc = Scalar(p.Lc);

  const Scalar m01 = -m2 * (Lc + a2 * c);
  const Scalar m02 = m2 * a2 * c;
  const Scalar m12 = -J2 - m2 * (a2 * a2 + a2 * Lc * c);

  Matrix3<Scalar> M;
  // clang-format off
  M << m1 + m2, m01,                                                   m02,
       m01,     J1 + J2 + m2 * (a2 * a2 + Scalar(2) * a2 * Lc * c + Lc * Lc), m12,
       m02,     m12,                                                   J2 + m2 * a2 * a2;
  // clang-format on
  return M;
}

/// Velocity-dependent inertial terms of the generalized-speed equations.
template <typename Scalar>
Vector3<Scalar> bias_vector(const DynState<Scalar>& s, Scalar u1, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  const Scalar v1 = s(stm::V1);
  const Scalar r = s(stm::R1);
  const Scalar gd = s(stm::GammaDot);
  const Scalar sg = sin(s(stm::Gamma));
  const Scalar cg = cos(s(stm::Gamma));
  const Scalar m1 = Scalar(p.m1), m2 = Scalar(p.m2), a2 = Scalar(p.a2), Lc = Scalar(p.Lc);

  Vector3<Scalar> H;
  H(0) = m1 * r * u1 + m2 * (r * u1 - a2 * sg * gd * gd - a2 * sg * r * r + Scalar(2) * a2 * sg * gd * r);
  H(1) = -m2 * (Scalar(2) * a2 * Lc * sg * gd * r - a2 * Lc * sg * gd * gd + Lc * u1 * r + a2 * cg * r * u1 -
                a2 * sg * r * v1);
  H(2) = m2 * a2 * (cg * r * u1 - sg * r * v1 + Lc * sg * r * r);
  return H;
}

template <typename Scalar>
Vector3<Scalar> generalized_forces(const AxleVector<Scalar>& fy, Scalar delta, Scalar gamma,
                                   const VehicleParams& p) {
  using std::cos;
  const Scalar cd = cos(delta);
  const Scalar cg = cos(gamma);
  const Scalar trailer_sum = fy(2) + fy(3) + fy(4);
  const Scalar trailer_moment = Scalar(p.L21) * fy(2) + Scalar(p.L22) * fy(3) + Scalar(p.L23) * fy(4);

  Vector3<Scalar> Q;
  Q(0) = fy(0) * cd + fy(1) + trailer_sum * cg;
  Q(1) = Scalar(p.a1) * fy(0) * cd - Scalar(p.b1) * fy(1) - Scalar(p.Lc) * trailer_sum * cg - trailer_moment;
  Q(2) = trailer_moment;
  return Q;
}

/// State derivative for a road-wheel angle. Pose rates refer to the drive
/// axle, whose lateral velocity is v1 - b1 * r1.
template <typename Scalar>
DynState<Scalar> stm_derivatives_road(const DynState<Scalar>& s, Scalar delta, Scalar u1, const VehicleParams& p) {
  using std::cos;
  using std::sin;
  const Scalar psi1 = s(stm::Psi1);
  const Scalar gamma = s(stm::Gamma);
  const Scalar v_axle = s(stm::V1) - Scalar(p.b1) * s(stm::R1);

  const auto slip = slip_angles(s, u1, delta, p);
  const auto fy = tire_forces(slip, p);
  const Vector3<Scalar> rhs = generalized_forces(fy, delta, gamma, p) - bias_vector(s, u1, p);

  const auto llt = mass_matrix(gamma, p).llt();
  if (llt.info() != Eigen::Success) throw SingularMassMatrix("mass matrix is not positive definite");
  const Vector3<Scalar> acc = llt.solve(rhs);

  DynState<Scalar> ds;
  ds(stm::X1) = u1 * cos(psi1) - v_axle * sin(psi1);
  ds(stm::Y1) = u1 * sin(psi1) + v_axle * cos(psi1);
  ds(stm::Psi1) = s(stm::R1);
  ds(stm::Gamma) = s(stm::GammaDot);
  ds.template tail<3>() = acc;
  return ds;
}

template <typename Scalar>
struct StmInput {
  Scalar delta_sw;  // steering-wheel angle [rad]
  Scalar u1;        // [m/s]
};

template <typename Scalar>
DynState<Scalar> stm_derivatives(const DynState<Scalar>& s, const StmInput<Scalar>& in, const VehicleParams& p) {
  return stm_derivatives_road(s, steering_map(in.delta_sw, p), in.u1, p);
}

}  // namespace artisim

#endif  // ARTISIM_DYNAMICS_HPP
