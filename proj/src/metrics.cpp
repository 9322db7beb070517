#include "artisim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace artisim {

PathPolyline::PathPolyline(std::vector<Eigen::Vector2d> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw MetricsError("polyline needs at least two points");
  arc_.reserve(points_.size());
  arc_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double step = (points_[i] - points_[i - 1]).norm();
    if (!(step > 0.0)) throw MetricsError("polyline arc length must be strictly increasing");
    arc_.push_back(arc_.back() + step);
  }
}

PathPolyline PathPolyline::from_samples(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MetricsError("polyline coordinate lengths differ");
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Eigen::Vector2d p(x[i], y[i]);
    if (pts.empty() || (p - pts.back()).norm() > 1e-12) pts.push_back(p);
  }
  return PathPolyline(std::move(pts));
}

double orthogonal_path_error(const Eigen::Vector2d& point, const PathPolyline& path) {
  const auto& pts = path.points();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Eigen::Vector2d seg = pts[i] - pts[i - 1];
    const double t = std::clamp((point - pts[i - 1]).dot(seg) / seg.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (pts[i - 1] + t * seg - point).squaredNorm());
  }
  return std::sqrt(best);
}

namespace {

template <typename F>
double distance_integral(std::span<const double> s, std::span<const double> x, F&& integrand) {
  if (s.size() != x.size()) throw MetricsError("signal and distance grids differ in length");
  if (s.size() < 2) throw MetricsError("need at least two samples");
  const double s_max = s.back() - s.front();
  if (!(s_max > 0.0)) throw MetricsError("degenerate run: traveled distance must be positive");
  double acc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double ds = s[i] - s[i - 1];
    if (ds < 0.0) throw MetricsError("distance samples must be non-decreasing");
    acc += 0.5 * ds * (integrand(x[i - 1]) + integrand(x[i]));
  }
  return acc / s_max;
}

}  // namespace

double distance_rms(std::span<const double> s, std::span<const double> eps) {
  return std::sqrt(distance_integral(s, eps, [](double e) { return e * e; }));
}

double distance_mean_abs(std::span<const double> s, std::span<const double> x) {
  return distance_integral(s, x, [](double v) { return std::abs(v); });
}

AbsoluteErrors absolute_errors(double eps_y1, double eps_y2, double eps_r1, double eps_r2, double eps_v1,
                               double eps_v2) {
  return {eps_y1 + eps_y2, eps_r1 + eps_r2, eps_v1 + eps_v2};
}

double normalized_total_error(double eps_a, double eps_v, double mean_abs_yaw_rate, double mean_abs_lateral_velocity) {
  if (!(mean_abs_yaw_rate > 0.0)) throw MetricsError("measured yaw rate too quiet to normalize (zero mean)");
  if (!(mean_abs_lateral_velocity > 0.0)) {
    throw MetricsError("measured lateral velocity too quiet to normalize (zero mean)");
  }
  return 100.0 * (eps_a / mean_abs_yaw_rate + eps_v / mean_abs_lateral_velocity);
}

double steering_effort(std::span<const double> s, std::span<const double> delta_cmd,
                       std::span<const double> delta_meas) {
  if (delta_cmd.size() != delta_meas.size()) throw MetricsError("steering signals differ in length");
  const double mean = distance_mean_abs(s, delta_meas);
  if (!(mean > 0.0)) throw MetricsError("measured steering angle has zero mean");
  std::vector<double> diff(delta_cmd.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = delta_cmd[i] - delta_meas[i];
  return 100.0 * distance_rms(s, diff) / mean;
}

void complete_sums(ErrorReport& r) {
  const auto sums = absolute_errors(r.eps_y1, r.eps_y2, r.eps_r1, r.eps_r2, r.eps_v1, r.eps_v2);
  r.eps_p = sums.eps_p;
  r.eps_a = sums.eps_a;
  r.eps_v = sums.eps_v;
}

}  // namespace artisim
