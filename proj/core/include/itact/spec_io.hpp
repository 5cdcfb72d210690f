#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "itact/coding_sim.hpp"
#include "itact/error.hpp"
#include "itact/specs.hpp"

namespace itact {

using AnySpec = std::variant<SourceSpec, ChannelSpec>;

/// Reads a JSON spec file. Syntax errors report line and column, shape and
/// value errors report the JSON pointer of the offending entry.
AnySpec load_spec(const std::filesystem::path& path);
AnySpec parse_spec(std::string_view text, std::string_view origin = "<input>");

/// Canonical JSON text; parse_spec(emit_spec(s)) reproduces s exactly.
std::string emit_spec(const SourceSpec& spec);
std::string emit_spec(const ChannelSpec& spec);

/// %.9g rendering used for every CSV number.
std::string format_number(double v);

/// "start:step:count" or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

/// CSV with a "# itact v1" first line and a named header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(bool v) { return *this << static_cast<long long>(v ? 1 : 0); }
  CsvWriter& operator<<(std::string_view v);
  CsvWriter& operator<<(const char* v) { return *this << std::string_view(v); }

  /// Throws InvalidInput if the row does not have one field per column.
  void end_row();

 private:
  void field(std::string_view text);

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Column-name to values view of a CSV written by CsvWriter.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

std::string sim_reports_json(const std::vector<SimReport>& reports);
void write_trace_csv(std::ostream& out, const SimReport& report, const std::vector<TrialTrace>& trace);

}  // namespace itact
