#ifndef ARTISIM_REPORT_HPP
#define ARTISIM_REPORT_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "artisim/metrics.hpp"

namespace artisim {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Text, Delimited };

ReportFormat parse_report_format(const std::string& s);

/// Forward table: Error | eps_a | eps_v | eps_p | eps_n.
/// Reverse table: Error | eps_a | eps_v | J_steer | eps_n.
/// All rows must share one driving direction.
std::string render_table(const std::vector<ErrorReport>& rows, ReportFormat format);

/// Arithmetic mean per model across maneuvers, in first-seen model order.
std::vector<ErrorReport> aggregate_reports(const std::vector<ErrorReport>& reports);

/// Machine-readable per-maneuver records carrying every error field.
void write_error_records(std::ostream& os, const std::vector<ErrorReport>& reports);
std::vector<ErrorReport> read_error_records(std::istream& is);

}  // namespace artisim

#endif  // ARTISIM_REPORT_HPP
