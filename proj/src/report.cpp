#include "artisim/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace artisim {

namespace {

struct Column {
  const char* header;
  int decimals;
  double (*value)(const ErrorReport&);
};

constexpr std::array<Column, 4> kForwardColumns{{
    {"eps_a [rad/s]", 4, [](const ErrorReport& r) { return r.eps_a; }},
    {"eps_v [m/s]", 4, [](const ErrorReport& r) { return r.eps_v; }},
    {"eps_p [m]", 2, [](const ErrorReport& r) { return r.eps_p; }},
    {"eps_n [%]", 2, [](const ErrorReport& r) { return r.eps_n; }},
}};

constexpr std::array<Column, 4> kReverseColumns{{
    {"eps_a [rad/s]", 4, [](const ErrorReport& r) { return r.eps_a; }},
    {"eps_v [m/s]", 4, [](const ErrorReport& r) { return r.eps_v; }},
    {"J_steer [%]", 2, [](const ErrorReport& r) { return r.j_steer.value_or(0.0); }},
    {"eps_n [%]", 2, [](const ErrorReport& r) { return r.eps_n; }},
}};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

Direction common_direction(const std::vector<ErrorReport>& rows) {
  if (rows.empty()) throw ReportError("report needs at least one row");
  const Direction d = rows.front().direction;
  for (const auto& r : rows) {
    if (r.direction != d) throw ReportError("cannot mix forward and reverse results in one table");
  }
  return d;
}

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

double to_double(std::string_view s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ReportError("error record line " + std::to_string(line) + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

constexpr const char* kRecordHeader =
    "model,direction,eps_y1,eps_y2,eps_r1,eps_r2,eps_v1,eps_v2,eps_p,eps_a,eps_v,eps_n,j_steer";

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "delimited") return ReportFormat::Delimited;
  throw ReportError("unknown report format '" + s + "'");
}

std::string render_table(const std::vector<ErrorReport>& rows, ReportFormat format) {
  const Direction direction = common_direction(rows);
  const auto& columns = direction == Direction::Forward ? kForwardColumns : kReverseColumns;
  std::ostringstream os;

  if (format == ReportFormat::Delimited) {
    os << "Error";
    for (const auto& c : columns) os << ',' << c.header;
    os << '\n';
    for (const auto& r : rows) {
      os << r.model;
      for (const auto& c : columns) os << ',' << fixed(c.value(r), c.decimals);
      os << '\n';
    }
    return os.str();
  }

  std::size_t first = std::string_view("Error").size();
  for (const auto& r : rows) first = std::max(first, r.model.size());
  first += 2;

  os << (direction == Direction::Forward ? "Forward Driving Results" : "Reverse Driving Results") << '\n';
  std::string line = pad("Error", first);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    line += i + 1 < columns.size() ? pad(columns[i].header, std::string_view(columns[i].header).size() + 2)
                                   : std::string(columns[i].header);
  }
  os << line << '\n';
  for (const auto& r : rows) {
    line = pad(r.model, first);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto cell = fixed(columns[i].value(r), columns[i].decimals);
      line += i + 1 < columns.size() ? pad(cell, std::string_view(columns[i].header).size() + 2) : cell;
    }
    os << line << '\n';
  }
  return os.str();
}

std::vector<ErrorReport> aggregate_reports(const std::vector<ErrorReport>& reports) {
  const Direction direction = common_direction(reports);
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ErrorReport*>> groups;
  for (const auto& r : reports) {
    if (!groups.count(r.model)) order.push_back(r.model);
    groups[r.model].push_back(&r);
  }

  std::vector<ErrorReport> out;
  for (const auto& model : order) {
    const auto& group = groups[model];
    const double n = static_cast<double>(group.size());
    ErrorReport mean;
    mean.model = model;
    mean.direction = direction;
    double j_sum = 0.0;
    bool has_j = false;
    for (const auto* r : group) {
      mean.eps_y1 += r->eps_y1 / n;
      mean.eps_y2 += r->eps_y2 / n;
      mean.eps_r1 += r->eps_r1 / n;
      mean.eps_r2 += r->eps_r2 / n;
      mean.eps_v1 += r->eps_v1 / n;
      mean.eps_v2 += r->eps_v2 / n;
      mean.eps_p += r->eps_p / n;
      mean.eps_a += r->eps_a / n;
      mean.eps_v += r->eps_v / n;
      mean.eps_n += r->eps_n / n;
      if (r->j_steer) {
        has_j = true;
        j_sum += *r->j_steer / n;
      }
    }
    if (group.size() == 1) {
      mean = *group.front();
    } else if (has_j) {
      mean.j_steer = j_sum;
    }
    out.push_back(mean);
  }
  return out;
}

void write_error_records(std::ostream& os, const std::vector<ErrorReport>& reports) {
  os << kRecordHeader << '\n';
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : reports) {
    os << r.model << ',' << (r.direction == Direction::Forward ? "forward" : "reverse") << ',' << num(r.eps_y1)
       << ',' << num(r.eps_y2) << ',' << num(r.eps_r1) << ',' << num(r.eps_r2) << ',' << num(r.eps_v1) << ','
       << num(r.eps_v2) << ',' << num(r.eps_p) << ',' << num(r.eps_a) << ',' << num(r.eps_v) << ','
       << num(r.eps_n) << ',' << (r.j_steer ? num(*r.j_steer) : std::string()) << '\n';
  }
}

std::vector<ErrorReport> read_error_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRecordHeader) throw ReportError("not an error record file");
  std::vector<ErrorReport> out;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 13) throw ReportError("error record line " + std::to_string(line_no) + ": expected 13 cells");
    ErrorReport r;
    r.model = std::string(cells[0]);
    if (cells[1] == "forward") {
      r.direction = Direction::Forward;
    } else if (cells[1] == "reverse") {
      r.direction = Direction::Reverse;
    } else {
      throw ReportError("error record line " + std::to_string(line_no) + ": bad direction");
    }
    r.eps_y1 = to_double(cells[2], line_no);
    r.eps_y2 = to_double(cells[3], line_no);
    r.eps_r1 = to_double(cells[4], line_no);
    r.eps_r2 = to_double(cells[5], line_no);
    r.eps_v1 = to_double(cells[6], line_no);
    r.eps_v2 = to_double(cells[7], line_no);
    r.eps_p = to_double(cells[8], line_no);
    r.eps_a = to_double(cells[9], line_no);
    r.eps_v = to_double(cells[10], line_no);
    r.eps_n = to_double(cells[11], line_no);
    if (!cells[12].empty()) r.j_steer = to_double(cells[12], line_no);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace artisim
