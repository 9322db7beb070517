#ifndef ARTISIM_INGEST_HPP
#define ARTISIM_INGEST_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "artisim/harness.hpp"
#include "artisim/params.hpp"

namespace artisim {

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MountPoint { Steering, TractorSensor, TrailerSensor, Can };

/// One measured signal at its native rate.
struct Channel {
  std::string name;
  std::string unit;
  double rate = 0.0;  // [Hz]
  MountPoint mount = MountPoint::Steering;
  std::vector<double> t;
  std::vector<double> values;

  bool operator==(const Channel&) const = default;
};

/// Channels of one test run. Channel names follow the recorded signal list:
/// steering_wheel_angle, {tractor,trailer}_{u,v,yaw_rate,x,y,heading} and the
/// auxiliary can_speed.
struct MeasurementLog {
  std::vector<Channel> channels;

  [[nodiscard]] bool has(std::string_view name) const;
  [[nodiscard]] const Channel& channel(std::string_view name) const;
  bool operator==(const MeasurementLog&) const = default;
};

bool is_known_channel(std::string_view name);
MountPoint mount_of(std::string_view name);

bool is_si_unit(std::string_view unit);
/// Converts deg, deg/s and km/h to rad, rad/s and m/s. A channel already in
/// SI units is rejected.
void convert_to_si(Channel& channel);

/// Header `t[s],name[unit]@rate,...`; empty cells mark samples a slower
/// channel does not have. Units are converted to SI on load.
MeasurementLog parse_log(std::istream& is);
MeasurementLog parse_log(const std::filesystem::path& path);
void write_log(std::ostream& os, const MeasurementLog& log);

enum class ResampleMethod { Hold, Linear };

/// Uniform grid at `rate` from the first to the last sample.
Channel resample(const Channel& channel, double rate, ResampleMethod method);

/// Samples a channel at arbitrary times with the given method.
std::vector<double> sample_channel(const Channel& channel, std::span<const double> times, ResampleMethod method);

/// Sensor displacement from the reference point of its unit, vehicle axes.
struct SensorOffset {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // recorded, unused by the planar models
};

/// Sensor positions relative to the tractor drive axle, straight-ahead
/// configuration.
inline constexpr SensorOffset kTractorSensorOffset{3.825, -0.005, 1.206};
inline constexpr SensorOffset kTrailerSensorOffset{-10.492, -0.004, 0.1};

/// Re-expresses a drive-axle-relative trailer sensor offset relative to the
/// middle trailer axle.
SensorOffset trailer_offset_from_axle_frame(const SensorOffset& offset, const VehicleParams& p);

/// Lateral velocity at the reference point: vy - x * r.
double sensor_to_reference(double vy_sensor, double yaw_rate, const SensorOffset& offset);
/// Longitudinal velocity at the reference point: vx + y * r.
double sensor_to_reference_longitudinal(double vx_sensor, double yaw_rate, const SensorOffset& offset);
/// Reference-point position from the sensor position and heading.
Eigen::Vector2d sensor_position_to_reference(const Eigen::Vector2d& sensor, double heading, const SensorOffset& offset);

/// gamma = wrap(psi1 - psi2) sample by sample.
std::vector<double> compute_articulation(std::span<const double> psi1, std::span<const double> psi2);

/// Measured signals at the model reference points on the steering grid:
/// drive axle for the tractor, middle axle for the trailer.
struct ReferenceSignals {
  std::vector<double> t;
  std::vector<double> delta_sw;
  std::vector<double> u1;
  std::vector<double> X1, Y1, psi1, vy1, r1;
  std::vector<double> X2, Y2, psi2, vy2, r2;
  std::vector<double> gamma;
  std::vector<double> s;  // traveled distance, integral of |u1|

  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool has_reverse() const;
};

struct SensorLayout {
  SensorOffset tractor = kTractorSensorOffset;
  SensorOffset trailer = kTrailerSensorOffset;  // drive-axle relative, as tabulated
};

ReferenceSignals reference_from_log(const MeasurementLog& log, const VehicleParams& p, const SensorLayout& layout = {});

/// Synthesizes what the sensors would have recorded for a simulated run; the
/// steering channel carries the applied steering-wheel angle. A 10 Hz
/// can_speed channel is added when `with_can` is set.
MeasurementLog log_from_trajectory(const Trajectory& traj, const VehicleParams& p, const SensorLayout& layout = {},
                                   bool with_can = true);

}  // namespace artisim

#endif  // ARTISIM_INGEST_HPP
