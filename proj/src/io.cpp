#include "dronecd/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

namespace dronecd {

using nlohmann::json;

FormatError::FormatError(const std::string& what, int line, std::string field)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line),
      field_(std::move(field)) {}

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

int line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_real(std::string_view s, int line, const char* field) {
  // strtod: locale "C" by default in this process, '.' separator.
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v))
    throw FormatError("not a finite number: '" + tmp + "'", line, field);
  return v;
}

long long parse_integer(std::string_view s, int line, const char* field) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("not an integer: '" + std::string(s) + "'", line, field);
  return v;
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

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

InstanceFile parse_instance(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("syntax error: ") + e.what(),
                      line_of_offset(document, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw FormatError("instance document must be a JSON object", 1);

  auto require = [&](const char* key) -> const json& {
    const auto it = doc.find(key);
    if (it == doc.end()) throw FormatError(std::string("missing field '") + key + "'", 0, key);
    return *it;
  };
  auto fail = [&](const char* key, const std::string& msg) -> FormatError {
    return FormatError(std::string("field '") + key + "': " + msg, line_of_key(document, key), key);
  };

  const json& version = require("version");
  if (!version.is_number_integer() || version.get<long long>() != kInstanceFormatVersion)
    throw fail("version", "unsupported format version");

  const json& q = require("q");
  if (!q.is_number_integer()) throw fail("q", "expected an integer drone count");
  const json& c = require("c");
  if (!c.is_number()) throw fail("c", "expected a number");
  const json& r = require("r");
  if (!r.is_array()) throw fail("r", "expected an array of route times");

  Eigen::VectorXd routes(static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r[i].is_number()) throw fail("r", "entry " + std::to_string(i) + " is not a number");
    routes[static_cast<Eigen::Index>(i)] = r[i].get<double>();
  }

  std::string unit;
  if (const auto it = doc.find("unit"); it != doc.end()) {
    if (!it->is_string()) throw fail("unit", "expected a string");
    unit = it->get<std::string>();
  }

  const long long drones = q.get<long long>();
  if (drones < 1 || drones > std::numeric_limits<int>::max())
    throw InstanceError("drone count q must be >= 1");
  return {ScheduleInstance(std::move(routes), static_cast<int>(drones), c.get<double>()),
          std::move(unit)};
}

std::string write_instance(const InstanceFile& file) {
  json doc = json::object();
  doc["version"] = kInstanceFormatVersion;
  doc["q"] = file.instance.q();
  doc["c"] = file.instance.c();
  doc["r"] = std::vector<double>(file.instance.r().begin(), file.instance.r().end());
  if (!file.unit.empty()) doc["unit"] = file.unit;
  return doc.dump(2) + "\n";
}

TraceRecord as_written(const TraceRecord& rec) {
  TraceRecord out = rec;
  out.f = std::strtod(format_real(rec.f).c_str(), nullptr);
  out.makespan = std::strtod(format_real(rec.makespan).c_str(), nullptr);
  out.best_makespan = std::strtod(format_real(rec.best_makespan).c_str(), nullptr);
  return out;
}

std::string write_trace(std::span<const TraceRecord> trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& t : trace) {
    out += std::to_string(t.iter) + ',' + format_real(t.f) + ',' + format_real(t.makespan) +
           ',' + format_real(t.best_makespan) + ',' + std::to_string(t.n_sel) + ',' +
           std::to_string(t.q_sel) + ',' + (t.accepted ? '1' : '0') + '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_trace(std::string_view csv) {
  auto lines = split(csv, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || trim(lines.front()) != kTraceHeader)
    throw FormatError("missing trace header", 1);

  static constexpr const char* kColumns[] = {"iter",  "f",     "makespan", "best_makespan",
                                             "n_sel", "q_sel", "accepted"};
  std::vector<TraceRecord> trace;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const int line = static_cast<int>(ln) + 1;
    const auto cells = split(trim(lines[ln]), ',');
    if (cells.size() != 7) throw FormatError("expected 7 columns", line);
    TraceRecord t;
    t.iter = static_cast<int>(parse_integer(cells[0], line, kColumns[0]));
    t.f = parse_real(cells[1], line, kColumns[1]);
    t.makespan = parse_real(cells[2], line, kColumns[2]);
    t.best_makespan = parse_real(cells[3], line, kColumns[3]);
    t.n_sel = static_cast<int>(parse_integer(cells[4], line, kColumns[4]));
    t.q_sel = static_cast<int>(parse_integer(cells[5], line, kColumns[5]));
    const auto acc = parse_integer(cells[6], line, kColumns[6]);
    if (acc != 0 && acc != 1) throw FormatError("accepted must be 0 or 1", line, kColumns[6]);
    t.accepted = acc == 1;
    if (!trace.empty()) {
      if (t.iter <= trace.back().iter)
        throw FormatError("iter must increase strictly", line, kColumns[0]);
      if (t.best_makespan > trace.back().best_makespan)
        throw FormatError("best_makespan must not increase", line, kColumns[3]);
    }
    trace.push_back(t);
  }
  return trace;
}

BenchmarkLayout parse_layout(std::string_view text) {
  BenchmarkLayout layout;
  if (trim(text).empty()) return layout;
  for (auto item : split(text, ',')) {
    item = trim(item);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("layout entry '" + std::string(item) + "' is not key=value");
    const auto key = trim(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    auto as_int = [&](int min) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size() || v < min)
        throw std::invalid_argument("layout key '" + std::string(key) + "' needs an integer >= " +
                                    std::to_string(min));
      return v;
    };
    if (key == "skip") layout.skip_lines = as_int(0);
    else if (key == "column" || key == "machine") layout.machine = as_int(1);
    else if (key == "jobs") layout.jobs = as_int(0);
    else if (key == "orient") {
      if (value == "rows") layout.jobs_in_rows = true;
      else if (value == "cols" || value == "columns") layout.jobs_in_rows = false;
      else throw std::invalid_argument("orient must be rows or cols");
    } else {
      throw std::invalid_argument("unknown layout key '" + std::string(key) + "'");
    }
  }
  return layout;
}

ScheduleInstance adapt_machine_scheduling(std::string_view table,
                                          const BenchmarkLayout& layout, int drones,
                                          double recharge) {
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
  const auto lines = split(table, '\n');
  for (std::size_t ln = static_cast<std::size_t>(layout.skip_lines); ln < lines.size(); ++ln) {
    const auto text = trim(lines[ln]);
    if (text.empty()) continue;
    std::vector<double> cells;
    std::istringstream in{std::string(text)};
    std::string cell;
    while (in >> cell)
      cells.push_back(parse_real(cell, static_cast<int>(ln) + 1, "cell"));
    rows.push_back(std::move(cells));
    row_lines.push_back(static_cast<int>(ln) + 1);
  }
  if (rows.empty()) throw FormatError("benchmark table has no data rows");

  std::vector<double> times;
  if (layout.jobs_in_rows) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (static_cast<int>(rows[k].size()) < layout.machine)
        throw FormatError("row has no column " + std::to_string(layout.machine), row_lines[k],
                          "column");
      times.push_back(rows[k][layout.machine - 1]);
    }
  } else {
    if (static_cast<int>(rows.size()) < layout.machine)
      throw FormatError("table has no row " + std::to_string(layout.machine), 0, "column");
    times = rows[layout.machine - 1];
  }
  if (layout.jobs > 0) {
    if (static_cast<int>(times.size()) < layout.jobs)
      throw FormatError("expected " + std::to_string(layout.jobs) + " jobs, found " +
                        std::to_string(times.size()), 0, "jobs");
    times.resize(layout.jobs);
  }
  return ScheduleInstance(Eigen::Map<const Eigen::VectorXd>(times.data(),
                                                            static_cast<Eigen::Index>(times.size())),
                          drones, recharge);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw FormatError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FormatError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace dronecd
