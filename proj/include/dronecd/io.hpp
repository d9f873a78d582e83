#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dronecd/engine.hpp"
#include "dronecd/model.hpp"

namespace dronecd {

/// Malformed document. `line` is 1-based, 0 when unknown; `field` names the
/// offending key or column when there is one.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line = 0, std::string field = {});
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// Instance document (JSON):
//   {"version": 1, "q": 2, "c": 1.15, "r": [3.4, 2.8, 4.4], "unit": "h"}
// n is the length of r; "unit" is an optional free-form label.

inline constexpr int kInstanceFormatVersion = 1;

struct InstanceFile {
  ScheduleInstance instance;
  std::string unit;
};

/// Throws FormatError on syntax or type problems and InstanceError when the
/// values violate n > q >= 1, r_i > 0, c >= 0.
InstanceFile parse_instance(std::string_view document);
std::string write_instance(const InstanceFile& file);

// Trace CSV: header `iter,f,makespan,best_makespan,n_sel,q_sel,accepted`,
// one row per iteration, reals with 9 significant digits, accepted as 0/1.

inline constexpr std::string_view kTraceHeader =
    "iter,f,makespan,best_makespan,n_sel,q_sel,accepted";

std::string write_trace(std::span<const TraceRecord> trace);

/// Also enforces strictly increasing iter and nonincreasing best_makespan.
std::vector<TraceRecord> parse_trace(std::string_view csv);

/// Rounds the real columns the way write_trace prints them.
TraceRecord as_written(const TraceRecord& rec);

// Parallel-machine benchmark tables: whitespace-separated numbers, one job
// per row (or per column), one machine per column (or per row). Jobs become
// routes, the chosen machine's processing time becomes the route time.

struct BenchmarkLayout {
  int skip_lines = 0;      // leading header lines
  bool jobs_in_rows = true;
  int machine = 1;         // 1-based column (row when jobs are columns)
  int jobs = 0;            // expected job count; 0 accepts any
};

/// Parses "skip=2,orient=rows,column=1,jobs=200". Unknown keys throw
/// std::invalid_argument.
BenchmarkLayout parse_layout(std::string_view text);

inline constexpr double kBenchmarkRecharge = 75.0;  // minutes

ScheduleInstance adapt_machine_scheduling(std::string_view table,
                                          const BenchmarkLayout& layout, int drones,
                                          double recharge = kBenchmarkRecharge);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace dronecd
