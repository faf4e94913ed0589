#pragma once

// Vote dumps: one CSV row per (instance, classifier) with that classifier's
// scores, header instance_id,classifier_id,score_0,...,score_{m-1}. Rows of
// one instance must be contiguous; classifier ids order the rows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pli/error.hpp"
#include "pli/io/csv.hpp"
#include "pli/vote_algebra.hpp"

namespace pli::io {

inline void write_vote_dump_header(std::ostream& out, std::size_t classes) {
  out << "instance_id,classifier_id";
  for (std::size_t c = 0; c < classes; ++c) out << ",score_" << c;
  out << '\n';
}

inline void write_vote_dump_rows(std::ostream& out, std::uint64_t instance_id, const vote_matrix& votes) {
  for (std::size_t i = 0; i < votes.rows(); ++i) {
    out << instance_id << ',' << i;
    for (double s : votes.row(i)) out << ',' << format_double(s);
    out << '\n';
  }
}

struct dumped_instance {
  std::uint64_t instance_id = 0;
  vote_matrix votes;
};

class vote_dump_reader {
 public:
  explicit vote_dump_reader(std::istream& in) : in_(in) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() < 4 || fields[0] != "instance_id" || fields[1] != "classifier_id")
        throw ingestion_error("vote dump header must be instance_id,classifier_id,score_0,...", line_no_);
      for (std::size_t c = 2; c < fields.size(); ++c)
        if (fields[c] != "score_" + std::to_string(c - 2))
          throw ingestion_error("unexpected column '" + std::string(fields[c]) + "'", line_no_);
      classes_ = fields.size() - 2;
      return;
    }
    throw ingestion_error("vote dump is empty");
  }

  std::size_t classes() const noexcept { return classes_; }

  // Next instance's vote matrix, or nullopt at end of input.
  std::optional<dumped_instance> next() {
    std::vector<std::pair<std::uint64_t, std::vector<double>>> rows;
    std::uint64_t id = 0;
    while (true) {
      row r;
      if (pending_) {
        r = std::move(*pending_);
        pending_.reset();
      } else if (!read_row(r)) {
        break;
      }
      if (rows.empty()) {
        id = r.instance;
        if (!finished_.insert(id).second)
          throw ingestion_error("rows of instance " + std::to_string(id) + " are not contiguous", r.line);
      } else if (r.instance != id) {
        pending_ = std::move(r);
        break;
      }
      for (const auto& existing : rows)
        if (existing.first == r.classifier)
          throw ingestion_error("duplicate classifier " + std::to_string(r.classifier) + " for instance " +
                                    std::to_string(id),
                                r.line);
      rows.emplace_back(r.classifier, std::move(r.scores));
    }
    if (rows.empty()) return std::nullopt;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    dumped_instance out;
    out.instance_id = id;
    out.votes = vote_matrix(0, classes_);
    for (auto& [cid, scores] : rows) out.votes.append_row(scores);
    return out;
  }

 private:
  struct row {
    std::uint64_t instance = 0;
    std::uint64_t classifier = 0;
    std::vector<double> scores;
    std::size_t line = 0;
  };

  bool read_row(row& r) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != classes_ + 2)
        throw ingestion_error("expected " + std::to_string(classes_ + 2) + " columns, found " +
                                  std::to_string(fields.size()),
                              line_no_);
      const auto inst = parse_unsigned(fields[0]);
      const auto cls = parse_unsigned(fields[1]);
      if (!inst || !cls) throw ingestion_error("instance_id and classifier_id must be non-negative integers", line_no_);
      r.instance = *inst;
      r.classifier = *cls;
      r.line = line_no_;
      std::vector<double> raw;
      raw.reserve(classes_);
      for (std::size_t c = 2; c < fields.size(); ++c) {
        const auto v = parse_double(fields[c]);
        if (!v || !std::isfinite(*v) || *v < 0.0)
          throw ingestion_error("score '" + std::string(fields[c]) + "' is not a finite non-negative number", line_no_);
        raw.push_back(*v);
      }
      // An all-zero row abstains and is read as the uniform vote.
      const auto v = normalize_vote_or_uniform(raw);
      r.scores.assign(v.scores().begin(), v.scores().end());
      return true;
    }
    return false;
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
  std::size_t classes_ = 0;
  std::optional<row> pending_;
  std::unordered_set<std::uint64_t> finished_;
};

}  // namespace pli::io
