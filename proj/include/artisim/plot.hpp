#ifndef ARTISIM_PLOT_HPP
#define ARTISIM_PLOT_HPP

#include <string>
#include <vector>

#include "artisim/harness.hpp"

namespace artisim {

struct PathSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct SignalSeries {
  std::string label;
  std::string color;
  std::vector<double> t;
  std::vector<double> v;
};

struct SignalStrip {
  std::string title;
  std::vector<SignalSeries> series;
};

/// Overhead path panel (equal axis scaling) above a stack of signal strips.
/// Output depends only on the inputs.
std::string render_svg(const std::string& title, const std::vector<PathSeries>& paths,
                       const std::vector<SignalStrip>& strips);

/// Tractor and trailer paths plus steering, speed, yaw rate and articulation.
std::string trajectory_svg(const Trajectory& traj, const std::string& title);

}  // namespace artisim

#endif  // ARTISIM_PLOT_HPP
