#include "artisim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace artisim {

namespace {

constexpr double kWidth = 800.0;
constexpr double kMargin = 50.0;
constexpr double kPathHeight = 500.0;
constexpr double kStripHeight = 120.0;
constexpr double kStripGap = 30.0;
constexpr std::size_t kMaxPoints = 2000;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = -1.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  [[nodiscard]] double span() const { return hi - lo; }
};

std::size_t step_for(std::size_t n) { return n > kMaxPoints ? (n + kMaxPoints - 1) / kMaxPoints : 1; }

template <class MapX, class MapY>
void polyline(std::ostringstream& os, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& color, MapX mx, MapY my) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n == 0) return;
  const std::size_t step = step_for(n);
  os << "<polyline fill=\"none\" stroke=\"" << escape(color) << "\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < n; i += step) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    os << (first ? "" : " ") << num(mx(xs[i])) << ',' << num(my(ys[i]));
    first = false;
  }
  if ((n - 1) % step != 0 && std::isfinite(xs[n - 1]) && std::isfinite(ys[n - 1])) {
    os << ' ' << num(mx(xs[n - 1])) << ',' << num(my(ys[n - 1]));
  }
  os << "\"/>\n";
}

void legend(std::ostringstream& os, double x, double y, const std::string& label, const std::string& color) {
  os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 8) << "\" width=\"12\" height=\"3\" fill=\"" << escape(color)
     << "\"/>\n";
  os << "<text x=\"" << num(x + 16) << "\" y=\"" << num(y - 3) << "\" font-size=\"11\">" << escape(label)
     << "</text>\n";
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<PathSeries>& paths,
                       const std::vector<SignalStrip>& strips) {
  const double plot_w = kWidth - 2 * kMargin;
  const double height = kMargin + kPathHeight + static_cast<double>(strips.size()) * (kStripHeight + kStripGap) +
                        kMargin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
     << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kMargin) << "\" y=\"25\" font-size=\"14\">" << escape(title) << "</text>\n";

  // Overhead view with equal scaling on both axes.
  Range rx, ry;
  for (const auto& p : paths) {
    for (double v : p.x) rx.add(v);
    for (double v : p.y) ry.add(v);
  }
  rx.settle();
  ry.settle();
  const double scale = std::min(plot_w / rx.span(), kPathHeight / ry.span());
  const double ox = kMargin + 0.5 * (plot_w - scale * rx.span());
  const double oy = kMargin + 0.5 * (kPathHeight + scale * ry.span());
  const auto mx = [&](double x) { return ox + scale * (x - rx.lo); };
  const auto my = [&](double y) { return oy - scale * (y - ry.lo); };

  os << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(plot_w)
     << "\" height=\"" << num(kPathHeight) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  os << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kMargin + kPathHeight + 14) << "\" font-size=\"10\">x ["
     << num(rx.lo) << ", " << num(rx.hi) << "] m, y [" << num(ry.lo) << ", " << num(ry.hi) << "] m</text>\n";
  double ly = kMargin + 14;
  for (const auto& p : paths) {
    polyline(os, p.x, p.y, p.color, mx, my);
    legend(os, kMargin + 6, ly, p.label, p.color);
    ly += 14;
  }

  double top = kMargin + kPathHeight + kStripGap;
  for (const auto& strip : strips) {
    Range rt, rv;
    for (const auto& s : strip.series) {
      for (double v : s.t) rt.add(v);
      for (double v : s.v) rv.add(v);
    }
    rt.settle();
    rv.settle();
    const auto sx = [&](double t) { return kMargin + plot_w * (t - rt.lo) / rt.span(); };
    const auto sy = [&](double v) { return top + kStripHeight * (1.0 - (v - rv.lo) / rv.span()); };

    os << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
       << num(kStripHeight) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    os << "<text x=\"" << num(kMargin) << "\" y=\"" << num(top - 4) << "\" font-size=\"11\">" << escape(strip.title)
       << " [" << num(rv.lo) << ", " << num(rv.hi) << "]</text>\n";
    double sly = top + 14;
    for (const auto& s : strip.series) {
      polyline(os, s.t, s.v, s.color, sx, sy);
      if (strip.series.size() > 1) {
        legend(os, kMargin + plot_w - 120, sly, s.label, s.color);
        sly += 14;
      }
    }
    top += kStripHeight + kStripGap;
  }
  os << "</svg>\n";
  return os.str();
}

std::string trajectory_svg(const Trajectory& traj, const std::string& title) {
  constexpr double kDeg = 180.0 / 3.14159265358979323846;
  std::vector<double> delta_sw_deg(traj.size()), gamma_deg(traj.size()), speed_kmh(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    delta_sw_deg[i] = traj.delta_sw_cmd[i] * kDeg;
    gamma_deg[i] = traj.gamma[i] * kDeg;
    speed_kmh[i] = traj.u1[i] * 3.6;
  }
  const std::vector<PathSeries> paths{{"tractor drive axle", "#1f77b4", traj.X1, traj.Y1},
                                      {"trailer axle", "#d62728", traj.X2, traj.Y2}};
  const std::vector<SignalStrip> strips{
      {"steering wheel angle [deg]", {{"delta_sw", "#333333", traj.t, delta_sw_deg}}},
      {"speed [km/h]", {{"u1", "#333333", traj.t, speed_kmh}}},
      {"yaw rate [rad/s]", {{"tractor", "#1f77b4", traj.t, traj.r1}, {"trailer", "#d62728", traj.t, traj.r2}}},
      {"articulation [deg]", {{"gamma", "#333333", traj.t, gamma_deg}}},
  };
  return render_svg(title, paths, strips);
}

}  // namespace artisim
