#ifndef ARTISIM_CONTROLLER_HPP
#define ARTISIM_CONTROLLER_HPP

#include <stdexcept>

#include "artisim/params.hpp"

namespace artisim {

struct ControllerConfig {
  double K = 3.0;
  bool enabled_in_reverse_only = true;
};

/// Lower bound on K for a stable reverse articulation loop: L1 / (L2 - L1c).
inline double min_stabilizing_gain(const VehicleParams& p) {
  const double lever = p.L2 - p.L1c;
  if (!(lever > 0.0)) throw std::domain_error("gain bound undefined: L2 - L1c must be positive");
  return p.L1 / lever;
}

/// Road-wheel steering with articulation feedback towards the measured
/// articulation. The correction is speed independent and, by default, only
/// active while reversing.
template <typename Scalar>
Scalar stabilized_steering(Scalar delta_meas, Scalar gamma_model, Scalar gamma_meas, Scalar u1,
                           const ControllerConfig& cfg) {
  if (cfg.enabled_in_reverse_only && !(u1 < Scalar(0))) return delta_meas;
  return delta_meas + Scalar(cfg.K) * (gamma_model - gamma_meas);
}

/// Eigenvalue of the articulation error of the kinematic model linearized at
/// gamma = delta = 0 under the feedback law.
inline double closed_loop_articulation_eigenvalue(double K, double u1, const VehicleParams& p) {
  if (u1 == 0.0) throw std::domain_error("articulation eigenvalue undefined at standstill");
  return u1 / (p.L1 * p.L2) * (-p.L1 + K * (p.L2 - p.L1c));
}

}  // namespace artisim

#endif  // ARTISIM_CONTROLLER_HPP
