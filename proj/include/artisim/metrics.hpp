#ifndef ARTISIM_METRICS_HPP
#define ARTISIM_METRICS_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace artisim {

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered 2-D polyline with cumulative arc length.
class PathPolyline {
 public:
  /// Requires at least two points and strictly increasing arc length.
  explicit PathPolyline(std::vector<Eigen::Vector2d> points);

  /// Builds a polyline from sampled positions, dropping samples that do not
  /// advance (standstill).
  static PathPolyline from_samples(std::span<const double> x, std::span<const double> y);

  [[nodiscard]] const std::vector<Eigen::Vector2d>& points() const { return points_; }
  [[nodiscard]] const std::vector<double>& arc_length() const { return arc_; }
  [[nodiscard]] double length() const { return arc_.back(); }

 private:
  std::vector<Eigen::Vector2d> points_;
  std::vector<double> arc_;
};

/// Shortest distance from a point to the polyline.
double orthogonal_path_error(const Eigen::Vector2d& point, const PathPolyline& path);

/// sqrt((1/s_max) * integral eps^2 ds) with trapezoidal quadrature over the
/// samples; s_max is the covered distance s.back() - s.front().
double distance_rms(std::span<const double> s, std::span<const double> eps);

/// (1/s_max) * integral |x| ds, the distance-weighted mean magnitude.
double distance_mean_abs(std::span<const double> s, std::span<const double> x);

struct AbsoluteErrors {
  double eps_p;
  double eps_a;
  double eps_v;
};

AbsoluteErrors absolute_errors(double eps_y1, double eps_y2, double eps_r1, double eps_r2, double eps_v1,
                               double eps_v2);

/// 100 * (eps_a / mean|yaw rate| + eps_v / mean|lateral velocity|) [%].
double normalized_total_error(double eps_a, double eps_v, double mean_abs_yaw_rate, double mean_abs_lateral_velocity);

/// 100 * distance_rms(delta - delta_meas) / mean|delta_meas| [%]; both
/// signals are steering-wheel angles.
double steering_effort(std::span<const double> s, std::span<const double> delta_cmd,
                       std::span<const double> delta_meas);

enum class Direction { Forward, Reverse };

struct ErrorReport {
  std::string model;
  Direction direction = Direction::Forward;
  double eps_y1 = 0.0, eps_y2 = 0.0;
  double eps_r1 = 0.0, eps_r2 = 0.0;
  double eps_v1 = 0.0, eps_v2 = 0.0;
  double eps_p = 0.0;
  double eps_a = 0.0;
  double eps_v = 0.0;
  double eps_n = 0.0;
  std::optional<double> j_steer;  // reverse runs only

  bool operator==(const ErrorReport&) const = default;
};

/// Fills the sums eps_p, eps_a, eps_v from the per-unit errors.
void complete_sums(ErrorReport& r);

}  // namespace artisim

#endif  // ARTISIM_METRICS_HPP
