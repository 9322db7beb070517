#ifndef ARTISIM_VALIDATION_HPP
#define ARTISIM_VALIDATION_HPP

#include <string>

#include "artisim/harness.hpp"
#include "artisim/ingest.hpp"
#include "artisim/metrics.hpp"
#include "artisim/params.hpp"

namespace artisim {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValidationConfig {
  ControllerConfig controller;
  double dt = 1e-3;
  GuardConfig guard;
};

struct ValidationResult {
  ErrorReport report;
  SimResult sim;
  Trajectory on_reference_grid;  // model output sampled at the reference times
};

/// Errors of a model run against the reference on the reference grid. The
/// model's steering-wheel command enters the steering effort for reverse runs.
ErrorReport compute_errors(const ReferenceSignals& ref, const Trajectory& model_on_grid, std::string label);

/// Replays the measured steering and speed through a model, closing the
/// articulation loop while reversing, and scores the result.
ValidationResult validate_model(ModelKind model, const VehicleParams& p, const ReferenceSignals& ref,
                                const ValidationConfig& cfg = {}, std::string label = {});

/// Input trace and initial state replaying a reference.
InputTrace replay_trace(const ReferenceSignals& ref);
InitialState initial_state_from(const ReferenceSignals& ref, const VehicleParams& p);

/// Articulation a driver holds while reversing: the kinematic steady-turn
/// articulation of the current steering angle.
ArticulationReference driver_articulation_target(const InputTrace& trace, const VehicleParams& p);

/// Generates a pseudo-measurement: runs `plant` over the maneuver and records
/// what the sensors would see. Reverse maneuvers are stabilized like a driver
/// would, by articulation feedback with gain `driver.K` towards
/// driver_articulation_target.
MeasurementLog pseudo_measurement(ModelKind plant, const VehicleParams& plant_params, const InputTrace& trace,
                                  const ControllerConfig& driver = {}, double dt = 1e-3);

}  // namespace artisim

#endif  // ARTISIM_VALIDATION_HPP
