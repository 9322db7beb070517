#include "artisim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "artisim/dynamics.hpp"
#include "artisim/kinematics.hpp"

namespace artisim {

namespace {

ReferenceSignals truncate(const ReferenceSignals& ref, std::size_t n) {
  ReferenceSignals out = ref;
  for (auto* v : {&out.t, &out.delta_sw, &out.u1, &out.X1, &out.Y1, &out.psi1, &out.vy1, &out.r1, &out.X2, &out.Y2,
                  &out.psi2, &out.vy2, &out.r2, &out.gamma, &out.s}) {
    v->resize(n);
  }
  return out;
}

double output_rate_for(const ReferenceSignals& ref, double dt) {
  if (ref.size() < 2) return 1.0 / dt;
  const double rate = std::round(1.0 / (ref.t[1] - ref.t[0]));
  const double stride = 1.0 / (rate * dt);
  return rate > 0.0 && std::abs(stride - std::round(stride)) < 1e-9 ? rate : 1.0 / dt;
}

}  // namespace

InputTrace replay_trace(const ReferenceSignals& ref) { return {ref.t, ref.delta_sw, ref.u1}; }

InitialState initial_state_from(const ReferenceSignals& ref, const VehicleParams& p) {
  if (ref.size() == 0) throw ValidationError("reference is empty");
  InitialState s;
  s.X1 = ref.X1[0];
  s.Y1 = ref.Y1[0];
  s.psi1 = ref.psi1[0];
  s.gamma = ref.gamma[0];
  s.r1 = ref.r1[0];
  s.v1 = ref.vy1[0] + p.b1 * ref.r1[0];
  s.gamma_dot = ref.r1[0] - ref.r2[0];
  return s;
}

ErrorReport compute_errors(const ReferenceSignals& ref, const Trajectory& model, std::string label) {
  const std::size_t n = ref.size();
  if (model.size() != n) throw ValidationError("model output is not on the reference grid");
  if (n < 2) throw ValidationError("reference too short to score");

  const auto tractor_path = PathPolyline::from_samples(ref.X1, ref.Y1);
  const auto trailer_path = PathPolyline::from_samples(ref.X2, ref.Y2);

  std::vector<double> ey1(n), ey2(n), er1(n), er2(n), ev1(n), ev2(n);
  for (std::size_t i = 0; i < n; ++i) {
    ey1[i] = orthogonal_path_error({model.X1[i], model.Y1[i]}, tractor_path);
    ey2[i] = orthogonal_path_error({model.X2[i], model.Y2[i]}, trailer_path);
    er1[i] = model.r1[i] - ref.r1[i];
    er2[i] = model.r2[i] - ref.r2[i];
    ev1[i] = model.vy1[i] - ref.vy1[i];
    ev2[i] = model.vy2[i] - ref.vy2[i];
  }

  ErrorReport r;
  r.model = std::move(label);
  r.direction = ref.has_reverse() ? Direction::Reverse : Direction::Forward;
  r.eps_y1 = distance_rms(ref.s, ey1);
  r.eps_y2 = distance_rms(ref.s, ey2);
  r.eps_r1 = distance_rms(ref.s, er1);
  r.eps_r2 = distance_rms(ref.s, er2);
  r.eps_v1 = distance_rms(ref.s, ev1);
  r.eps_v2 = distance_rms(ref.s, ev2);
  complete_sums(r);

  // Tractor and trailer channels share one grid, so the mean of the
  // concatenated magnitudes is the average of the two means.
  const double mean_yaw = 0.5 * (distance_mean_abs(ref.s, ref.r1) + distance_mean_abs(ref.s, ref.r2));
  const double mean_lat = 0.5 * (distance_mean_abs(ref.s, ref.vy1) + distance_mean_abs(ref.s, ref.vy2));
  r.eps_n = normalized_total_error(r.eps_a, r.eps_v, mean_yaw, mean_lat);

  if (r.direction == Direction::Reverse) r.j_steer = steering_effort(ref.s, model.delta_sw_cmd, ref.delta_sw);
  return r;
}

ValidationResult validate_model(ModelKind model, const VehicleParams& p, const ReferenceSignals& ref,
                                const ValidationConfig& cfg, std::string label) {
  if (label.empty()) label = std::string(to_string(model));
  SimConfig sim_cfg;
  sim_cfg.dt = cfg.dt;
  sim_cfg.output_rate = output_rate_for(ref, cfg.dt);
  sim_cfg.controller = cfg.controller;
  sim_cfg.guard = cfg.guard;
  sim_cfg.initial = initial_state_from(ref, p);

  const ArticulationReference articulation{ref.t, ref.gamma};
  ValidationResult result;
  result.sim = simulate(model, replay_trace(ref), p, sim_cfg, &articulation);

  const ReferenceSignals* scored = &ref;
  ReferenceSignals shortened;
  if (result.sim.aborted) {
    const double end = *result.sim.abort_time;
    const auto n = static_cast<std::size_t>(std::upper_bound(ref.t.begin(), ref.t.end(), end) - ref.t.begin());
    shortened = truncate(ref, std::max<std::size_t>(n, 2));
    scored = &shortened;
  }
  result.on_reference_grid = resample_trajectory(result.sim.trajectory, scored->t);
  result.report = compute_errors(*scored, result.on_reference_grid, std::move(label));
  return result;
}

ArticulationReference driver_articulation_target(const InputTrace& trace, const VehicleParams& p) {
  ArticulationReference target{trace.t, std::vector<double>(trace.size(), 0.0)};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    // Steering beyond the steady-turn range keeps the trailer straight.
    try {
      target.gamma[i] = kin_steady_state_articulation(steering_map(trace.delta_sw[i], p), p);
    } catch (const std::domain_error&) {
      target.gamma[i] = 0.0;
    }
  }
  return target;
}

MeasurementLog pseudo_measurement(ModelKind plant, const VehicleParams& plant_params, const InputTrace& trace,
                                  const ControllerConfig& driver, double dt) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.controller = driver;
  const ArticulationReference target = driver_articulation_target(trace, plant_params);
  const SimResult run = simulate(plant, trace, plant_params, cfg, &target);
  if (run.aborted) throw ValidationError("pseudo-plant run tripped the jackknife guard");
  return log_from_trajectory(run.trajectory, plant_params);
}

}  // namespace artisim
