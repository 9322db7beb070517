#include "artisim/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "artisim/kinematics.hpp"

namespace artisim {

namespace {

constexpr std::array<std::string_view, 14> kChannelNames{
    "steering_wheel_angle", "tractor_u",   "tractor_v",         "tractor_yaw_rate", "tractor_x",
    "tractor_y",            "tractor_heading", "trailer_u",     "trailer_v",        "trailer_yaw_rate",
    "trailer_x",            "trailer_y",   "trailer_heading",   "can_speed",
};

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

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> unwrap(std::vector<double> a) {
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double d = a[i] - a[i - 1];
    a[i] = a[i - 1] + wrap_angle(d);
  }
  return a;
}

Channel make_channel(std::string name, std::string unit, double rate, std::vector<double> t,
                     std::vector<double> values) {
  Channel c;
  c.mount = mount_of(name);
  c.name = std::move(name);
  c.unit = std::move(unit);
  c.rate = rate;
  c.t = std::move(t);
  c.values = std::move(values);
  return c;
}

}  // namespace

bool MeasurementLog::has(std::string_view name) const {
  return std::any_of(channels.begin(), channels.end(), [&](const Channel& c) { return c.name == name; });
}

const Channel& MeasurementLog::channel(std::string_view name) const {
  for (const auto& c : channels) {
    if (c.name == name) return c;
  }
  throw LogError("missing channel '" + std::string(name) + "'");
}

bool is_known_channel(std::string_view name) {
  return std::find(kChannelNames.begin(), kChannelNames.end(), name) != kChannelNames.end();
}

MountPoint mount_of(std::string_view name) {
  if (name.starts_with("tractor_")) return MountPoint::TractorSensor;
  if (name.starts_with("trailer_")) return MountPoint::TrailerSensor;
  if (name.starts_with("can_")) return MountPoint::Can;
  return MountPoint::Steering;
}

bool is_si_unit(std::string_view unit) {
  constexpr std::array<std::string_view, 7> si{"s", "rad", "rad/s", "m", "m/s", "m/s^2", "-"};
  return std::find(si.begin(), si.end(), unit) != si.end();
}

void convert_to_si(Channel& channel) {
  if (is_si_unit(channel.unit)) {
    throw LogError("channel '" + channel.name + "' is already in SI units [" + channel.unit + "]");
  }
  double scale = 0.0;
  std::string si;
  if (channel.unit == "deg") {
    scale = M_PI / 180.0;
    si = "rad";
  } else if (channel.unit == "deg/s") {
    scale = M_PI / 180.0;
    si = "rad/s";
  } else if (channel.unit == "km/h") {
    scale = 1.0 / 3.6;
    si = "m/s";
  } else {
    throw LogError("channel '" + channel.name + "': unsupported unit [" + channel.unit + "]");
  }
  for (auto& v : channel.values) v *= scale;
  channel.unit = std::move(si);
}

MeasurementLog parse_log(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw LogError("log is empty");
  const auto header = split(trim(line), ',');
  if (trim(header.front()) != "t[s]") throw LogError("first column must be 't[s]'");

  MeasurementLog log;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto cell = trim(header[c]);
    const auto open = cell.find('[');
    const auto close = cell.find(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      throw LogError("column '" + std::string(cell) + "': unit tag missing");
    }
    const auto name = cell.substr(0, open);
    const auto unit = cell.substr(open + 1, close - open - 1);
    const auto rest = cell.substr(close + 1);
    if (!is_known_channel(name)) throw LogError("unknown column '" + std::string(name) + "'");
    if (log.has(name)) throw LogError("duplicate column '" + std::string(name) + "'");
    if (unit.empty()) throw LogError("column '" + std::string(name) + "': unit tag missing");
    if (!rest.starts_with("@")) throw LogError("column '" + std::string(name) + "': rate tag missing");
    const auto rate = to_double(rest.substr(1));
    if (!rate || !(*rate > 0.0)) throw LogError("column '" + std::string(name) + "': bad rate tag");
    log.channels.push_back(make_channel(std::string(name), std::string(unit), *rate, {}, {}));
  }

  std::optional<double> previous;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto cells = split(text, ',');
    if (cells.size() != header.size()) {
      throw LogError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) + " cells");
    }
    const auto t = to_double(trim(cells[0]));
    if (!t) throw LogError("row " + std::to_string(row) + ": bad timestamp");
    if (previous && *t == *previous) throw LogError("row " + std::to_string(row) + ": duplicate timestamp");
    if (previous && *t < *previous) throw LogError("row " + std::to_string(row) + ": non-monotone time");
    previous = t;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto cell = trim(cells[c]);
      if (cell.empty()) continue;
      const auto v = to_double(cell);
      if (!v) throw LogError("row " + std::to_string(row) + ": cannot parse '" + std::string(cell) + "'");
      auto& ch = log.channels[c - 1];
      ch.t.push_back(*t);
      ch.values.push_back(*v);
    }
  }

  for (auto& ch : log.channels) {
    if (ch.t.empty()) throw LogError("channel '" + ch.name + "' has no samples");
    if (!is_si_unit(ch.unit)) convert_to_si(ch);
  }
  return log;
}

MeasurementLog parse_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LogError("cannot open log " + path.string());
  return parse_log(in);
}

void write_log(std::ostream& os, const MeasurementLog& log) {
  char rate[32];
  os << "t[s]";
  for (const auto& ch : log.channels) {
    std::snprintf(rate, sizeof(rate), "%g", ch.rate);
    os << ',' << ch.name << '[' << ch.unit << "]@" << rate;
  }
  os << '\n';

  std::map<double, std::vector<std::optional<double>>> rows;
  for (std::size_t c = 0; c < log.channels.size(); ++c) {
    const auto& ch = log.channels[c];
    for (std::size_t i = 0; i < ch.t.size(); ++i) {
      auto& row = rows[ch.t[i]];
      row.resize(log.channels.size());
      row[c] = ch.values[i];
    }
  }
  for (const auto& [t, row] : rows) {
    os << format_double(t);
    for (const auto& v : row) {
      os << ',';
      if (v) os << format_double(*v);
    }
    os << '\n';
  }
}

std::vector<double> sample_channel(const Channel& channel, std::span<const double> times, ResampleMethod method) {
  if (channel.t.empty()) throw LogError("cannot resample empty channel '" + channel.name + "'");
  const auto& t = channel.t;
  const auto& y = channel.values;
  std::vector<double> out(times.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double tq = times[i];
    while (k + 1 < t.size() && t[k + 1] <= tq + 1e-9) ++k;
    if (method == ResampleMethod::Hold || tq <= t.front() || k + 1 >= t.size()) {
      out[i] = y[k];
      continue;
    }
    const double w = (tq - t[k]) / (t[k + 1] - t[k]);
    out[i] = w == 0.0 ? y[k] : y[k] + w * (y[k + 1] - y[k]);
  }
  return out;
}

Channel resample(const Channel& channel, double rate, ResampleMethod method) {
  if (channel.t.empty()) throw LogError("cannot resample empty channel '" + channel.name + "'");
  if (!(rate >= channel.rate)) throw LogError("target rate below native rate of '" + channel.name + "'");
  const double t0 = channel.t.front();
  const double span = channel.t.back() - t0;
  const auto n = static_cast<std::size_t>(std::floor(span * rate + 1e-6)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = t0 + static_cast<double>(k) / rate;

  Channel out = channel;
  out.rate = rate;
  out.values = sample_channel(channel, grid, method);
  out.t = std::move(grid);
  return out;
}

SensorOffset trailer_offset_from_axle_frame(const SensorOffset& offset, const VehicleParams& p) {
  return {offset.x + (p.L2 - p.L1c), offset.y, offset.z};
}

double sensor_to_reference(double vy_sensor, double yaw_rate, const SensorOffset& offset) {
  return vy_sensor - offset.x * yaw_rate;
}

double sensor_to_reference_longitudinal(double vx_sensor, double yaw_rate, const SensorOffset& offset) {
  return vx_sensor + offset.y * yaw_rate;
}

Eigen::Vector2d sensor_position_to_reference(const Eigen::Vector2d& sensor, double heading, const SensorOffset& offset) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {sensor.x() - (c * offset.x - s * offset.y), sensor.y() - (s * offset.x + c * offset.y)};
}

std::vector<double> compute_articulation(std::span<const double> psi1, std::span<const double> psi2) {
  if (psi1.size() != psi2.size()) throw LogError("heading channels are on different grids");
  std::vector<double> gamma(psi1.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = wrap_angle(psi1[i] - psi2[i]);
  return gamma;
}

bool ReferenceSignals::has_reverse() const {
  return std::any_of(u1.begin(), u1.end(), [](double u) { return u < 0.0; });
}

ReferenceSignals reference_from_log(const MeasurementLog& log, const VehicleParams& p, const SensorLayout& layout) {
  const Channel& steering = log.channel("steering_wheel_angle");
  ReferenceSignals ref;
  ref.t = steering.t;
  ref.delta_sw = steering.values;
  const auto at = [&](std::string_view name) {
    const Channel& ch = log.channel(name);
    const auto method = ch.mount == MountPoint::Can ? ResampleMethod::Hold : ResampleMethod::Linear;
    if (name.ends_with("heading")) {
      Channel unwrapped = ch;
      unwrapped.values = unwrap(ch.values);
      return sample_channel(unwrapped, ref.t, method);
    }
    return sample_channel(ch, ref.t, method);
  };

  const auto tu = at("tractor_u");
  const auto tv = at("tractor_v");
  ref.r1 = at("tractor_yaw_rate");
  const auto tx = at("tractor_x");
  const auto ty = at("tractor_y");
  ref.psi1 = at("tractor_heading");
  (void)at("trailer_u");  // required; the error criteria use lateral signals only
  const auto trv = at("trailer_v");
  ref.r2 = at("trailer_yaw_rate");
  const auto trx = at("trailer_x");
  const auto try_ = at("trailer_y");
  ref.psi2 = at("trailer_heading");

  const SensorOffset trailer = trailer_offset_from_axle_frame(layout.trailer, p);
  const std::size_t n = ref.t.size();
  for (auto* v : {&ref.u1, &ref.X1, &ref.Y1, &ref.vy1, &ref.X2, &ref.Y2, &ref.vy2, &ref.s}) v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ref.u1[i] = sensor_to_reference_longitudinal(tu[i], ref.r1[i], layout.tractor);
    ref.vy1[i] = sensor_to_reference(tv[i], ref.r1[i], layout.tractor);
    const auto p1 = sensor_position_to_reference({tx[i], ty[i]}, ref.psi1[i], layout.tractor);
    ref.X1[i] = p1.x();
    ref.Y1[i] = p1.y();
    ref.vy2[i] = sensor_to_reference(trv[i], ref.r2[i], trailer);
    const auto p2 = sensor_position_to_reference({trx[i], try_[i]}, ref.psi2[i], trailer);
    ref.X2[i] = p2.x();
    ref.Y2[i] = p2.y();
  }
  ref.gamma = compute_articulation(ref.psi1, ref.psi2);
  ref.s[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    ref.s[i] = ref.s[i - 1] + 0.5 * (ref.t[i] - ref.t[i - 1]) * (std::abs(ref.u1[i - 1]) + std::abs(ref.u1[i]));
  }
  return ref;
}

MeasurementLog log_from_trajectory(const Trajectory& traj, const VehicleParams& p, const SensorLayout& layout,
                                   bool with_can) {
  if (traj.size() < 2) throw LogError("trajectory too short to export");
  const SensorOffset trailer = trailer_offset_from_axle_frame(layout.trailer, p);
  const std::size_t n = traj.size();
  const double rate = std::round(1.0 / (traj.t[1] - traj.t[0]));

  std::vector<double> tu(n), tv(n), tx(n), ty(n), tru(n), trv(n), trx(n), try_(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SensorOffset& a = layout.tractor;
    const double c1 = std::cos(traj.psi1[i]), s1 = std::sin(traj.psi1[i]);
    tu[i] = traj.u1[i] - a.y * traj.r1[i];
    tv[i] = traj.vy1[i] + a.x * traj.r1[i];
    tx[i] = traj.X1[i] + c1 * a.x - s1 * a.y;
    ty[i] = traj.Y1[i] + s1 * a.x + c1 * a.y;

    const double c2 = std::cos(traj.psi2[i]), s2 = std::sin(traj.psi2[i]);
    tru[i] = traj.u2[i] - trailer.y * traj.r2[i];
    trv[i] = traj.vy2[i] + trailer.x * traj.r2[i];
    trx[i] = traj.X2[i] + c2 * trailer.x - s2 * trailer.y;
    try_[i] = traj.Y2[i] + s2 * trailer.x + c2 * trailer.y;
  }

  MeasurementLog log;
  log.channels.push_back(make_channel("steering_wheel_angle", "rad", rate, traj.t, traj.delta_sw_cmd));
  log.channels.push_back(make_channel("tractor_u", "m/s", rate, traj.t, tu));
  log.channels.push_back(make_channel("tractor_v", "m/s", rate, traj.t, tv));
  log.channels.push_back(make_channel("tractor_yaw_rate", "rad/s", rate, traj.t, traj.r1));
  log.channels.push_back(make_channel("tractor_x", "m", rate, traj.t, tx));
  log.channels.push_back(make_channel("tractor_y", "m", rate, traj.t, ty));
  log.channels.push_back(make_channel("tractor_heading", "rad", rate, traj.t, traj.psi1));
  log.channels.push_back(make_channel("trailer_u", "m/s", rate, traj.t, tru));
  log.channels.push_back(make_channel("trailer_v", "m/s", rate, traj.t, trv));
  log.channels.push_back(make_channel("trailer_yaw_rate", "rad/s", rate, traj.t, traj.r2));
  log.channels.push_back(make_channel("trailer_x", "m", rate, traj.t, trx));
  log.channels.push_back(make_channel("trailer_y", "m", rate, traj.t, try_));
  log.channels.push_back(make_channel("trailer_heading", "rad", rate, traj.t, traj.psi2));

  if (with_can) {
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(rate / 10.0)));
    std::vector<double> ct, cv;
    for (std::size_t i = 0; i < n; i += stride) {
      ct.push_back(traj.t[i]);
      cv.push_back(traj.u1[i]);
    }
    log.channels.push_back(make_channel("can_speed", "m/s", rate / static_cast<double>(stride), ct, cv));
  }
  return log;
}

}  // namespace artisim
