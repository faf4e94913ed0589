#pragma once

// CSV outputs of an experiment grid, and a reader for the raw per-cell file
// so the other tables can be re-derived from it.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "pli/error.hpp"
#include "pli/eval/experiment.hpp"
#include "pli/io/csv.hpp"
#include "pli/probability.hpp"

namespace pli::eval {

inline constexpr const char* raw_header =
    "dataset,method,m,n,seed,instances,correct,accuracy,full_rank_instances,weight_fallbacks,counts_dependent,"
    "counts_total";
inline constexpr const char* by_size_header =
    "dataset,method,m,n,seeds,mean_accuracy,accuracy_stddev,pli,empirical_full_rank";
inline constexpr const char* summary_header = "dataset,method,m,SINC,INC,n_INC,acc_pct_of_max,correlation";
inline constexpr const char* profile_header = "dataset,method,n,l,p_l";
inline constexpr const char* curve_header = "dataset,method,n,pli";

struct report_options {
  // Omit the "# generated <UTC time>" first line so reruns are byte-identical.
  bool reproducible = false;
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_preamble(std::ostream& out, const report_options& opts, const char* header) {
  if (!opts.reproducible) out << "# generated " << utc_timestamp() << '\n';
  out << header << '\n';
}

inline const std::string& checked_key(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw validation_error("identifier '" + s + "' contains a comma or newline");
  return s;
}

inline std::string join_counts(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

inline std::vector<std::uint64_t> split_counts(std::string_view s, std::size_t line) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (true) {
    const auto semi = s.find(';', start);
    const auto part = s.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
    const auto v = io::parse_unsigned(part);
    if (!v) throw ingestion_error("bad count list '" + std::string(s) + "'", line);
    out.push_back(*v);
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return out;
}

template <typename T>
std::string optional_cell(const std::optional<T>& v) {
  if (!v) return "--";
  if constexpr (std::is_floating_point_v<T>)
    return io::format_double(*v);
  else
    return std::to_string(*v);
}

}  // namespace detail

inline void write_raw_csv(std::ostream& out, const std::vector<cell_result>& cells, const report_options& opts = {}) {
  detail::write_preamble(out, opts, raw_header);
  for (const auto& c : cells) {
    out << detail::checked_key(c.dataset) << ',' << detail::checked_key(c.method) << ',' << c.classes << ',' << c.n
        << ',' << c.seed << ',' << c.instances << ',' << c.correct << ',' << io::format_double(c.accuracy) << ','
        << c.full_rank_instances << ',' << c.weight_fallbacks << ',' << detail::join_counts(c.counters.dependent)
        << ',' << detail::join_counts(c.counters.total) << '\n';
  }
}

inline std::vector<cell_result> read_raw_csv(std::istream& in) {
  std::vector<cell_result> cells;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = io::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!header_seen) {
      if (trimmed != raw_header) throw ingestion_error("not a raw results file: unexpected header", line_no);
      header_seen = true;
      continue;
    }
    const auto f = io::split_fields(trimmed);
    if (f.size() != 12) throw ingestion_error("expected 12 columns, found " + std::to_string(f.size()), line_no);
    auto count = [&](std::size_t i) {
      const auto v = io::parse_unsigned(f[i]);
      if (!v) throw ingestion_error("column " + std::to_string(i + 1) + " is not a count", line_no);
      return static_cast<std::uint64_t>(*v);
    };
    cell_result c;
    c.dataset = std::string(f[0]);
    c.method = std::string(f[1]);
    c.classes = count(2);
    c.n = count(3);
    c.seed = count(4);
    c.instances = count(5);
    c.correct = count(6);
    const auto acc = io::parse_double(f[7]);
    if (!acc) throw ingestion_error("accuracy is not a number", line_no);
    c.accuracy = *acc;
    c.full_rank_instances = count(8);
    c.weight_fallbacks = count(9);
    if (c.classes < 2) throw ingestion_error("m must be >= 2", line_no);
    c.counters = rank_counters(c.classes);
    c.counters.dependent = detail::split_counts(f[10], line_no);
    c.counters.total = detail::split_counts(f[11], line_no);
    if (c.counters.dependent.size() != c.classes - 1 || c.counters.total.size() != c.classes - 1)
      throw ingestion_error("count lists must have m-1 entries", line_no);
    for (std::size_t l = 0; l + 1 < c.classes; ++l)
      if (c.counters.dependent[l] > c.counters.total[l])
        throw ingestion_error("dependent count exceeds total", line_no);
    cells.push_back(std::move(c));
  }
  if (!header_seen) throw ingestion_error("raw results file is empty");
  return cells;
}

inline void write_by_size_csv(std::ostream& out, const std::vector<experiment_row>& rows,
                              const report_options& opts = {}) {
  detail::write_preamble(out, opts, by_size_header);
  for (const auto& r : rows)
    out << detail::checked_key(r.dataset) << ',' << detail::checked_key(r.method) << ',' << r.classes << ',' << r.n
        << ',' << r.seeds << ',' << io::format_double(r.mean_accuracy) << ',' << io::format_double(r.accuracy_stddev)
        << ',' << io::format_double(r.pli_at_n) << ',' << io::format_double(r.empirical_full_rank) << '\n';
}

inline void write_summary_csv(std::ostream& out, const std::vector<summary_row>& summary,
                              const report_options& opts = {}) {
  detail::write_preamble(out, opts, summary_header);
  for (const auto& s : summary)
    out << detail::checked_key(s.dataset) << ',' << detail::checked_key(s.method) << ',' << s.classes << ','
        << detail::optional_cell(s.sinc) << ',' << detail::optional_cell(s.inc) << ','
        << detail::optional_cell(s.n_inc) << ',' << detail::optional_cell(s.acc_pct_of_max) << ','
        << detail::optional_cell(s.correlation) << '\n';
}

inline void write_profiles_csv(std::ostream& out, const std::vector<experiment_row>& rows,
                               const report_options& opts = {}) {
  detail::write_preamble(out, opts, profile_header);
  for (const auto& r : rows)
    for (std::size_t l = 1; l < r.classes; ++l)
      out << detail::checked_key(r.dataset) << ',' << detail::checked_key(r.method) << ',' << r.n << ',' << l << ','
          << io::format_double(r.profile.at(l)) << '\n';
}

// PLI of each summary's size-averaged profile for n = 1..max_n.
inline void write_pli_curve_csv(std::ostream& out, const std::vector<summary_row>& summary, std::size_t max_n,
                                const report_options& opts = {}) {
  detail::write_preamble(out, opts, curve_header);
  for (const auto& s : summary) {
    const auto curve = pli_exact_curve(s.averaged_profile, 1, max_n);
    for (const auto& pt : curve)
      out << detail::checked_key(s.dataset) << ',' << detail::checked_key(s.method) << ',' << pt.n << ','
          << io::format_double(pt.pli) << '\n';
  }
}

struct report_files {
  std::filesystem::path raw, by_size, summary, profiles, curve;
};

inline report_files report_paths(const std::filesystem::path& dir) {
  return {dir / "results_raw.csv", dir / "results_by_size.csv", dir / "results_summary.csv", dir / "p_profiles.csv",
          dir / "pli_curve.csv"};
}

// Writes every table into `dir`, creating it if needed.
inline report_files write_report(const std::filesystem::path& dir, const experiment_result& result,
                                 std::size_t curve_max_n, const report_options& opts = {}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw resource_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto paths = report_paths(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw resource_error("cannot write " + p.string());
    return f;
  };
  auto check = [](std::ofstream& f, const std::filesystem::path& p) {
    f.flush();
    if (!f) throw resource_error("write failed for " + p.string());
  };
  {
    auto f = open(paths.raw);
    write_raw_csv(f, result.cells, opts);
    check(f, paths.raw);
  }
  {
    auto f = open(paths.by_size);
    write_by_size_csv(f, result.rows, opts);
    check(f, paths.by_size);
  }
  {
    auto f = open(paths.summary);
    write_summary_csv(f, result.summary, opts);
    check(f, paths.summary);
  }
  {
    auto f = open(paths.profiles);
    write_profiles_csv(f, result.rows, opts);
    check(f, paths.profiles);
  }
  {
    auto f = open(paths.curve);
    write_pli_curve_csv(f, result.summary, curve_max_n, opts);
    check(f, paths.curve);
  }
  return paths;
}

}  // namespace pli::eval
