#ifndef ARTISIM_HARNESS_HPP
#define ARTISIM_HARNESS_HPP

#include <cmath>
#include <iosfwd>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "artisim/controller.hpp"
#include "artisim/params.hpp"

namespace artisim {

class NonFiniteState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ManeuverError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
template <typename Vector>
void require_finite(const Vector& derivative, const Vector& state) {
  if (!derivative.allFinite()) {
    std::ostringstream os;
    os << "non-finite derivative at state [" << state.transpose() << "]";
    throw NonFiniteState(os.str());
  }
}
}  // namespace detail

/// Classical fourth-order Runge-Kutta step. Inputs are whatever `deriv`
/// captures and stay constant over the step.
template <typename Vector, typename Derivative>
Vector rk4_step(Derivative&& deriv, const Vector& x, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  const Vector k1 = deriv(x);
  detail::require_finite(k1, x);
  const Vector x2 = x + (0.5 * dt) * k1;
  const Vector k2 = deriv(x2);
  detail::require_finite(k2, x2);
  const Vector x3 = x + (0.5 * dt) * k2;
  const Vector k3 = deriv(x3);
  detail::require_finite(k3, x3);
  const Vector x4 = x + dt * k3;
  const Vector k4 = deriv(x4);
  detail::require_finite(k4, x4);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// --- maneuvers --------------------------------------------------------------

enum class ManeuverKind { ConstantSteer, RampSteer, Slalom, FigureEight, Replay };
enum class TurnDirection { Left, Right };

/// Driving-test description. Angles are steering-wheel degrees, speed in
/// km/h. Unset `reverse` means: RampSteer drives backwards, others forwards.
struct ManeuverSpec {
  ManeuverKind kind = ManeuverKind::ConstantSteer;
  double amplitude_deg = 200.0;
  double speed_kmh = 5.0;
  TurnDirection direction = TurnDirection::Left;
  double duration = 60.0;
  double ramp_rate_deg_s = 10.0;  // RampSteer
  double period = 10.0;           // Slalom, FigureEight
  double steer_ramp_time = 2.0;   // ConstantSteer ramp-in
  double speed_ramp_time = 1.0;
  double sample_rate = 100.0;
  /// Right-hand half waves of a FigureEight are scaled by (1+a)/(1-a) so the
  /// road-wheel excursions match on both sides.
  double asymmetry = 0.0;
  std::optional<bool> reverse;

  [[nodiscard]] bool is_reverse() const { return reverse.value_or(kind == ManeuverKind::RampSteer); }
};

/// Steering-wheel angle and speed sampled on a strictly increasing grid.
struct InputTrace {
  std::vector<double> t;
  std::vector<double> delta_sw;  // [rad]
  std::vector<double> u1;        // [m/s], signed

  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool has_reverse() const;
};

void validate_trace(const InputTrace& trace);

/// Named presets: constant-{200,360,500}-{5,10}-{left,right},
/// ramp-{30,90}-{3,6}-{left,right}, slalom-5[-left|-right],
/// figure8-5[-left|-right].
ManeuverSpec maneuver_preset(std::string_view name);
bool is_preset_name(std::string_view name);

InputTrace generate_maneuver(const ManeuverSpec& spec);

/// Chooses the period (and duration) of a FigureEight so the kinematic path of
/// `p` closes on itself, and compensates the steering asymmetry.
ManeuverSpec tune_figure_eight(ManeuverSpec spec, const VehicleParams& p);

// --- simulation -------------------------------------------------------------

enum class GuardStatus { Ok, Warn, Abort };

struct GuardConfig {
  double warn = 60.0 * M_PI / 180.0;
  double abort = 90.0 * M_PI / 180.0;
};

GuardStatus jackknife_guard(double gamma, const GuardConfig& cfg = {});

/// Measured articulation the closed loop tracks, zero-order held.
struct ArticulationReference {
  std::vector<double> t;
  std::vector<double> gamma;
};

struct InitialState {
  double X1 = 0.0, Y1 = 0.0, psi1 = 0.0, gamma = 0.0;
  double v1 = 0.0, r1 = 0.0, gamma_dot = 0.0;  // single-track model only
};

struct SimConfig {
  double dt = 1e-3;
  double output_rate = 100.0;
  ControllerConfig controller;
  bool closed_loop = true;
  GuardConfig guard;
  InitialState initial;
};

/// Sampled model output. Positions: tractor drive axle (X1, Y1) and middle
/// trailer axle (X2, Y2). v1 is the tractor-COG lateral velocity; vy1 and
/// vy2 are the lateral velocities at the drive axle and the middle trailer
/// axle.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> X1, Y1, psi1;
  std::vector<double> u1, v1, r1;
  std::vector<double> X2, Y2, psi2;
  std::vector<double> u2, r2;
  std::vector<double> gamma, gamma_dot;
  std::vector<double> vy1, vy2;
  std::vector<double> s;
  std::vector<double> delta_cmd;     // road-wheel [rad]
  std::vector<double> delta_sw_cmd;  // steering-wheel equivalent [rad]

  [[nodiscard]] std::size_t size() const { return t.size(); }
  bool operator==(const Trajectory&) const = default;
};

struct SimResult {
  Trajectory trajectory;
  bool aborted = false;
  std::optional<double> abort_time;
  std::optional<double> first_warning_time;
  double max_abs_gamma = 0.0;
};

/// Integrates a model over the trace with a fixed step. While reversing with
/// the closed loop enabled the steering receives articulation feedback
/// against `reference`, which is then mandatory.
SimResult simulate(ModelKind model, const InputTrace& trace, const VehicleParams& p, const SimConfig& cfg = {},
                   const ArticulationReference* reference = nullptr);

/// Delimited export: t, X1, Y1, psi1, v1, r1, X2, Y2, psi2, gamma, s, delta_cmd.
void write_trajectory(std::ostream& os, const Trajectory& traj);

/// Linear interpolation of every channel onto `times` (clamped at the ends).
Trajectory resample_trajectory(const Trajectory& traj, const std::vector<double>& times);

}  // namespace artisim

#endif  // ARTISIM_HARNESS_HPP
