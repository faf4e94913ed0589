#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pli/error.hpp"
#include "pli/io/csv.hpp"
#include "pli/stream/instance.hpp"

namespace pli::stream {

struct csv_schema {
  // When set, labels outside this list are rejected; indices follow list order.
  std::optional<std::vector<std::string>> labels;
};

struct csv_dataset {
  memory_stream stream;
  std::vector<std::string> label_names;
  std::vector<std::string> feature_names;
};

// Header row, numeric feature columns, trailing label column. Labels map to
// dense indices in order of first appearance.
inline csv_dataset csv_ingest(std::istream& in, const csv_schema& schema = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    for (auto f : io::split_fields(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw ingestion_error("dataset is empty");
  if (header.size() < 2) throw ingestion_error("dataset needs at least one feature column and a label column", line_no);

  std::map<std::string, std::size_t, std::less<>> label_index;
  std::vector<std::string> names;
  if (schema.labels) {
    names = *schema.labels;
    for (std::size_t i = 0; i < names.size(); ++i) label_index.emplace(names[i], i);
  }

  const std::size_t width = header.size();
  std::vector<stream_instance> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    const auto fields = io::split_fields(line);
    if (fields.size() != width)
      throw ingestion_error("expected " + std::to_string(width) + " columns, found " + std::to_string(fields.size()),
                            line_no);
    stream_instance inst;
    inst.features.reserve(width - 1);
    for (std::size_t c = 0; c + 1 < width; ++c) {
      const auto v = io::parse_double(fields[c]);
      if (!v) throw ingestion_error("non-numeric value '" + std::string(fields[c]) + "' in column " + header[c], line_no);
      inst.features.push_back(*v);
    }
    const auto label = fields.back();
    if (label.empty()) throw ingestion_error("missing label", line_no);
    auto it = label_index.find(label);
    if (it == label_index.end()) {
      if (schema.labels) throw ingestion_error("label '" + std::string(label) + "' is not in the declared label set", line_no);
      it = label_index.emplace(std::string(label), names.size()).first;
      names.emplace_back(label);
    }
    inst.label = it->second;
    rows.push_back(std::move(inst));
  }
  if (rows.empty()) throw ingestion_error("dataset has a header but no instances");
  if (names.size() < 2) throw ingestion_error("dataset needs at least 2 distinct labels");

  std::vector<std::string> feature_names(header.begin(), header.end() - 1);
  const std::size_t classes = names.size();
  return {memory_stream(std::move(rows), classes, width - 1), std::move(names), std::move(feature_names)};
}

inline csv_dataset csv_ingest(const std::string& path, const csv_schema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw ingestion_error("cannot open dataset '" + path + "'");
  return csv_ingest(in, schema);
}

}  // namespace pli::stream
