#include "artisim/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "artisim/dynamics.hpp"
#include "artisim/kinematics.hpp"

namespace artisim {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kKmhToMs = 1.0 / 3.6;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s, std::string_view name) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ManeuverError("preset '" + std::string(name) + "': cannot parse '" + std::string(s) + "'");
  }
  return v;
}

TurnDirection parse_direction(std::string_view s, std::string_view name) {
  if (s == "left") return TurnDirection::Left;
  if (s == "right") return TurnDirection::Right;
  throw ManeuverError("preset '" + std::string(name) + "': direction must be left or right");
}

bool one_of(double v, std::initializer_list<double> allowed) {
  return std::any_of(allowed.begin(), allowed.end(), [v](double a) { return v == a; });
}

/// Zero-order-hold index lookup on a monotone grid, advancing with time.
class HoldCursor {
 public:
  explicit HoldCursor(const std::vector<double>& t) : t_(t) {}
  std::size_t at(double time) {
    while (idx_ + 1 < t_.size() && t_[idx_ + 1] <= time + 1e-9) ++idx_;
    return idx_;
  }

 private:
  const std::vector<double>& t_;
  std::size_t idx_ = 0;
};

struct KinModel {
  using State = KinState<double>;
  const VehicleParams& p;

  static State initial(const InitialState& s) { return State(s.X1, s.Y1, s.psi1, s.gamma); }
  static double gamma(const State& x) { return x(kin::Gamma); }
  static void set_gamma(State& x, double g) { x(kin::Gamma) = g; }

  State derivative(const State& x, double delta, double u1) const { return kin_derivatives<double>(x, {delta, u1}, p); }

  void record(Trajectory& out, const State& x, double delta, double u1) const {
    const double gamma = x(kin::Gamma);
    const double r1 = u1 * std::tan(delta) / p.L1;
    const double gamma_dot = derivative(x, delta, u1)(kin::Gamma);
    const double r2 = r1 - gamma_dot;
    out.u1.push_back(u1);
    out.v1.push_back(p.b1 * r1);
    out.r1.push_back(r1);
    out.gamma_dot.push_back(gamma_dot);
    out.r2.push_back(r2);
    out.vy1.push_back(0.0);
    // Fifth wheel moves at (u1, L1c r1) in tractor axes.
    out.u2.push_back(u1 * std::cos(gamma) - p.L1c * r1 * std::sin(gamma));
    out.vy2.push_back(u1 * std::sin(gamma) + p.L1c * r1 * std::cos(gamma) - p.L22 * r2);
  }
};

struct StmModel {
  using State = DynState<double>;
  const VehicleParams& p;

  static State initial(const InitialState& s) {
    State x;
    x << s.X1, s.Y1, s.psi1, s.gamma, s.v1, s.r1, s.gamma_dot;
    return x;
  }
  static double gamma(const State& x) { return x(stm::Gamma); }
  static void set_gamma(State& x, double g) { x(stm::Gamma) = g; }

  State derivative(const State& x, double delta, double u1) const {
    return stm_derivatives_road<double>(x, delta, u1, p);
  }

  void record(Trajectory& out, const State& x, double /*delta*/, double u1) const {
    const auto vel = axle_velocities<double>(x, u1, p);
    out.u1.push_back(u1);
    out.v1.push_back(x(stm::V1));
    out.r1.push_back(x(stm::R1));
    out.gamma_dot.push_back(x(stm::GammaDot));
    out.r2.push_back(x(stm::R1) - x(stm::GammaDot));
    out.vy1.push_back(vel.vy(1));
    out.u2.push_back(vel.vx(2));
    out.vy2.push_back(vel.vy(3));
  }
};

template <typename Model>
SimResult run(const Model& model, const InputTrace& trace, const VehicleParams& p, const SimConfig& cfg,
              const ArticulationReference* reference) {
  using State = typename Model::State;

  if (!(cfg.dt > 0.0)) throw SimulationError("internal step must be positive");
  if (!(cfg.output_rate > 0.0)) throw SimulationError("output rate must be positive");
  const double stride_real = 1.0 / (cfg.output_rate * cfg.dt);
  const long stride = std::lround(stride_real);
  if (stride < 1 || std::abs(stride_real - static_cast<double>(stride)) > 1e-9) {
    throw SimulationError("output period must be an integer multiple of the internal step");
  }

  const double t0 = trace.t.front();
  const long steps = std::lround((trace.t.back() - t0) / cfg.dt);

  SimResult result;
  Trajectory& out = result.trajectory;
  const std::size_t expected = static_cast<std::size_t>(steps / stride) + 2;
  for (auto* v : {&out.t, &out.X1, &out.Y1, &out.psi1, &out.X2, &out.Y2, &out.psi2, &out.gamma, &out.s,
                  &out.delta_cmd, &out.delta_sw_cmd}) {
    v->reserve(expected);
  }

  HoldCursor input_cursor(trace.t);
  std::optional<HoldCursor> reference_cursor;
  if (reference != nullptr) reference_cursor.emplace(reference->t);

  State x = Model::initial(cfg.initial);
  Model::set_gamma(x, wrap_angle(Model::gamma(x)));
  double s = 0.0;

  const auto command = [&](double time, const State& state, double& delta, double& u1) {
    const std::size_t k = input_cursor.at(time);
    u1 = trace.u1[k];
    const double delta_open = steering_map(trace.delta_sw[k], p);
    const bool feedback = cfg.closed_loop && (!cfg.controller.enabled_in_reverse_only || u1 < 0.0);
    if (!feedback) {
      delta = delta_open;
      return;
    }
    const double gamma_meas = reference->gamma[reference_cursor->at(time)];
    delta = stabilized_steering(delta_open, Model::gamma(state), gamma_meas, u1, cfg.controller);
  };

  const auto record = [&](double time, const State& state, double delta, double u1) {
    const Pose2<double> tractor{state(0), state(1), state(2)};
    const double gamma = Model::gamma(state);
    const auto trailer = trailer_pose_from_tractor(tractor, gamma, p);
    out.t.push_back(time);
    out.X1.push_back(tractor.x);
    out.Y1.push_back(tractor.y);
    out.psi1.push_back(tractor.psi);
    out.X2.push_back(trailer.x);
    out.Y2.push_back(trailer.y);
    out.psi2.push_back(trailer.psi);
    out.gamma.push_back(gamma);
    out.s.push_back(s);
    out.delta_cmd.push_back(delta);
    out.delta_sw_cmd.push_back(inverse_steering_map(delta, p));
    model.record(out, state, delta, u1);
  };

  for (long i = 0;; ++i) {
    const double time = t0 + static_cast<double>(i) * cfg.dt;
    double delta = 0.0;
    double u1 = 0.0;
    command(time, x, delta, u1);
    if (i % stride == 0) record(time, x, delta, u1);
    if (i == steps) break;

    x = rk4_step([&](const State& state) { return model.derivative(state, delta, u1); }, x, cfg.dt);
    Model::set_gamma(x, wrap_angle(Model::gamma(x)));
    s += std::abs(u1) * cfg.dt;

    const double gamma = Model::gamma(x);
    result.max_abs_gamma = std::max(result.max_abs_gamma, std::abs(gamma));
    const double next_time = t0 + static_cast<double>(i + 1) * cfg.dt;
    const GuardStatus status = jackknife_guard(gamma, cfg.guard);
    if (status != GuardStatus::Ok && !result.first_warning_time) result.first_warning_time = next_time;
    if (status == GuardStatus::Abort) {
      result.aborted = true;
      result.abort_time = next_time;
      command(next_time, x, delta, u1);
      record(next_time, x, delta, u1);
      break;
    }
  }
  return result;
}

double interp(const std::vector<double>& t, const std::vector<double>& y, double tq, std::size_t& hint) {
  if (tq <= t.front()) return y.front();
  if (tq >= t.back()) return y.back();
  while (hint + 1 < t.size() && t[hint + 1] < tq) ++hint;
  while (hint > 0 && t[hint] > tq) --hint;
  const double w = (tq - t[hint]) / (t[hint + 1] - t[hint]);
  return y[hint] + w * (y[hint + 1] - y[hint]);
}

}  // namespace

bool InputTrace::has_reverse() const {
  return std::any_of(u1.begin(), u1.end(), [](double u) { return u < 0.0; });
}

void validate_trace(const InputTrace& trace) {
  if (trace.t.empty()) throw SimulationError("input trace is empty");
  if (trace.delta_sw.size() != trace.t.size() || trace.u1.size() != trace.t.size()) {
    throw SimulationError("input trace channels differ in length");
  }
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (!std::isfinite(trace.t[i]) || !std::isfinite(trace.delta_sw[i]) || !std::isfinite(trace.u1[i])) {
      throw SimulationError("input trace sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(trace.t[i] > trace.t[i - 1])) {
      throw SimulationError("input trace time not strictly increasing at sample " + std::to_string(i));
    }
  }
}

bool is_preset_name(std::string_view name) {
  try {
    (void)maneuver_preset(name);
    return true;
  } catch (const ManeuverError&) {
    return false;
  }
}

ManeuverSpec maneuver_preset(std::string_view name) {
  const auto parts = split(name, '-');
  ManeuverSpec spec;
  const auto& kind = parts.front();
  if (kind == "constant" || kind == "ramp") {
    if (parts.size() != 4) throw ManeuverError("preset '" + std::string(name) + "': expected kind-amplitude-speed-direction");
    spec.amplitude_deg = parse_number(parts[1], name);
    spec.speed_kmh = parse_number(parts[2], name);
    spec.direction = parse_direction(parts[3], name);
    if (kind == "constant") {
      spec.kind = ManeuverKind::ConstantSteer;
      spec.duration = 60.0;
      if (!one_of(spec.amplitude_deg, {200, 360, 500}) || !one_of(spec.speed_kmh, {5, 10})) {
        throw ManeuverError("preset '" + std::string(name) +
                            "': constant steer runs at 200/360/500 deg and 5/10 km/h");
      }
    } else {
      spec.kind = ManeuverKind::RampSteer;
      spec.duration = 30.0;
      if (!one_of(spec.amplitude_deg, {30, 90}) || !one_of(spec.speed_kmh, {3, 6})) {
        throw ManeuverError("preset '" + std::string(name) + "': ramp steer runs at 30/90 deg and 3/6 km/h");
      }
    }
    return spec;
  }
  if (kind == "slalom" || kind == "figure8") {
    if (parts.size() < 2 || parts.size() > 3) {
      throw ManeuverError("preset '" + std::string(name) + "': expected kind-speed[-direction]");
    }
    spec.speed_kmh = parse_number(parts[1], name);
    if (spec.speed_kmh != 5.0) throw ManeuverError("preset '" + std::string(name) + "': runs at 5 km/h only");
    if (parts.size() == 3) spec.direction = parse_direction(parts[2], name);
    if (kind == "slalom") {
      spec.kind = ManeuverKind::Slalom;
      spec.amplitude_deg = 90.0;
      spec.period = 8.0;
      spec.duration = 40.0;
    } else {
      spec.kind = ManeuverKind::FigureEight;
      spec.amplitude_deg = 360.0;
      spec.period = 60.0;  // replaced by tune_figure_eight
      spec.duration = 61.0;
    }
    return spec;
  }
  throw ManeuverError("unknown maneuver preset '" + std::string(name) + "'");
}

InputTrace generate_maneuver(const ManeuverSpec& spec) {
  if (spec.kind == ManeuverKind::Replay) throw ManeuverError("replay maneuvers are read from a log, not generated");
  if (!(spec.speed_kmh > 0.0)) throw ManeuverError("maneuver speed must be positive");
  if (!(spec.duration > 0.0)) throw ManeuverError("maneuver duration must be positive");
  if (!(spec.amplitude_deg >= 0.0)) throw ManeuverError("steering amplitude must be non-negative");
  if (!(spec.sample_rate > 0.0)) throw ManeuverError("sample rate must be positive");
  if (!(spec.speed_ramp_time >= 0.0) || !(spec.steer_ramp_time >= 0.0)) throw ManeuverError("ramp times must be non-negative");
  if (spec.kind == ManeuverKind::RampSteer && !(spec.ramp_rate_deg_s > 0.0)) {
    throw ManeuverError("ramp steer needs a positive ramp rate");
  }
  if ((spec.kind == ManeuverKind::Slalom || spec.kind == ManeuverKind::FigureEight) && !(spec.period > 0.0)) {
    throw ManeuverError("periodic maneuvers need a positive period");
  }
  if (!(spec.asymmetry >= 0.0 && spec.asymmetry < 1.0)) throw ManeuverError("asymmetry must lie in [0, 1)");

  const double amplitude = spec.amplitude_deg * kDegToRad;
  const double side = spec.direction == TurnDirection::Left ? 1.0 : -1.0;
  const double speed = (spec.is_reverse() ? -1.0 : 1.0) * spec.speed_kmh * kKmhToMs;
  const auto n = static_cast<std::size_t>(std::floor(spec.duration * spec.sample_rate + 1e-9)) + 1;

  InputTrace trace;
  trace.t.resize(n);
  trace.delta_sw.resize(n);
  trace.u1.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / spec.sample_rate;
    trace.t[k] = t;
    trace.u1[k] = spec.speed_ramp_time > 0.0 ? speed * std::min(t / spec.speed_ramp_time, 1.0) : speed;

    double steer = 0.0;
    switch (spec.kind) {
      case ManeuverKind::ConstantSteer:
        steer = spec.steer_ramp_time > 0.0 ? amplitude * std::min(t / spec.steer_ramp_time, 1.0) : amplitude;
        break;
      case ManeuverKind::RampSteer:
        steer = std::min(spec.ramp_rate_deg_s * kDegToRad * t, amplitude);
        break;
      case ManeuverKind::Slalom: {
        const double phase = t - spec.speed_ramp_time;
        steer = phase > 0.0 ? amplitude * std::sin(2.0 * M_PI * phase / spec.period) : 0.0;
        break;
      }
      case ManeuverKind::FigureEight: {
        const double phase = t - spec.speed_ramp_time;
        steer = phase > 0.0 && phase < spec.period ? amplitude * std::sin(2.0 * M_PI * phase / spec.period) : 0.0;
        break;
      }
      case ManeuverKind::Replay:
        break;
    }
    steer *= side;
    if (spec.kind == ManeuverKind::FigureEight && steer < 0.0) {
      steer *= (1.0 + spec.asymmetry) / (1.0 - spec.asymmetry);
    }
    trace.delta_sw[k] = steer;
  }
  return trace;
}

ManeuverSpec tune_figure_eight(ManeuverSpec spec, const VehicleParams& p) {
  if (spec.kind != ManeuverKind::FigureEight) throw ManeuverError("only figure-eight maneuvers can be tuned");
  spec.asymmetry = p.q;
  const double delta0 = steering_map(spec.amplitude_deg * kDegToRad, p);
  if (!(delta0 > 0.0 && delta0 < M_PI / 2)) throw ManeuverError("figure-eight amplitude out of range");

  // Heading profile shape F(theta) = integral of tan(delta0 sin) over one half wave.
  constexpr int kN = 4000;
  std::array<double, kN + 1> shape{};
  const double h = M_PI / kN;
  for (int i = 1; i <= kN; ++i) {
    const double a = std::tan(delta0 * std::sin((i - 1) * h));
    const double m = std::tan(delta0 * std::sin((i - 0.5) * h));
    const double b = std::tan(delta0 * std::sin(i * h));
    shape[i] = shape[i - 1] + h / 6.0 * (a + 4.0 * m + b);
  }
  const double peak = shape[kN];
  // The path closes when the integral of cos(psi - psi_peak/2) over a half
  // wave vanishes, psi = c * F. For small steer this is J0(psi_peak/2) = 0.
  const auto closure = [&](double c) {
    double acc = 0.0;
    for (int i = 0; i <= kN; ++i) {
      const double w = (i == 0 || i == kN) ? 0.5 : 1.0;
      acc += w * std::cos(c * (shape[i] - 0.5 * peak));
    }
    return acc * h;
  };
  double lo = 2.0 * 1.0 / peak;
  double hi = 2.0 * 3.5 / peak;
  double f_lo = closure(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = closure(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double c = 0.5 * (lo + hi);
  const double speed = spec.speed_kmh * kKmhToMs;
  spec.period = 2.0 * M_PI * c * p.L1 / speed;
  // End where the drive axle passes the start point again: the run-up
  // distance is covered in half the speed-ramp time at full speed.
  spec.duration = spec.period + 0.5 * spec.speed_ramp_time;
  return spec;
}

GuardStatus jackknife_guard(double gamma, const GuardConfig& cfg) {
  const double a = std::abs(gamma);
  if (a >= cfg.abort) return GuardStatus::Abort;
  if (a >= cfg.warn) return GuardStatus::Warn;
  return GuardStatus::Ok;
}

SimResult simulate(ModelKind model, const InputTrace& trace, const VehicleParams& p, const SimConfig& cfg,
                   const ArticulationReference* reference) {
  validate_trace(trace);
  const bool needs_reference =
      cfg.closed_loop && (!cfg.controller.enabled_in_reverse_only || trace.has_reverse());
  if (needs_reference) {
    if (reference == nullptr) throw SimulationError("closed-loop run needs a measured articulation reference");
    if (reference->t.empty() || reference->t.size() != reference->gamma.size()) {
      throw SimulationError("articulation reference is empty or malformed");
    }
  }
  if (model == ModelKind::Kin) return run(KinModel{p}, trace, p, cfg, needs_reference ? reference : nullptr);
  return run(StmModel{p}, trace, p, cfg, needs_reference ? reference : nullptr);
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  os << "t,X1,Y1,psi1,v1,r1,X2,Y2,psi2,gamma,s,delta_cmd\n";
  char buf[64];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::array<double, 12> row{traj.t[i],  traj.X1[i],  traj.Y1[i],    traj.psi1[i],
                                     traj.v1[i], traj.r1[i],  traj.X2[i],    traj.Y2[i],
                                     traj.psi2[i], traj.gamma[i], traj.s[i], traj.delta_cmd[i]};
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
      os << buf << (c + 1 < row.size() ? ',' : '\n');
    }
  }
}

Trajectory resample_trajectory(const Trajectory& traj, const std::vector<double>& times) {
  if (traj.size() == 0) throw SimulationError("cannot resample an empty trajectory");
  Trajectory out;
  out.t = times;
  const std::array<std::pair<const std::vector<double>*, std::vector<double>*>, 18> channels{{
      {&traj.X1, &out.X1},       {&traj.Y1, &out.Y1},       {&traj.psi1, &out.psi1},
      {&traj.u1, &out.u1},       {&traj.v1, &out.v1},       {&traj.r1, &out.r1},
      {&traj.X2, &out.X2},       {&traj.Y2, &out.Y2},       {&traj.psi2, &out.psi2},
      {&traj.u2, &out.u2},       {&traj.r2, &out.r2},       {&traj.gamma, &out.gamma},
      {&traj.gamma_dot, &out.gamma_dot}, {&traj.vy1, &out.vy1}, {&traj.vy2, &out.vy2},
      {&traj.s, &out.s},         {&traj.delta_cmd, &out.delta_cmd}, {&traj.delta_sw_cmd, &out.delta_sw_cmd},
  }};
  for (const auto& [src, dst] : channels) {
    dst->resize(times.size());
    std::size_t hint = 0;
    for (std::size_t i = 0; i < times.size(); ++i) (*dst)[i] = interp(traj.t, *src, times[i], hint);
  }
  return out;
}

}  // namespace artisim
