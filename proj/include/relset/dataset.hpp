#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relset/model.hpp"

namespace relset {

// CSV dataset: first row is the header and must list the feature names in id
// order; one optional trailing column carries a declared class used only for
// agreement reporting. Values are matched to domain tokens textually.
struct Dataset {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // feature values only
  std::vector<std::string> declared_class;     // empty when no class column
  bool has_class_column = false;
};

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Comma-separated; fields may be double-quoted, with "" as a literal quote.
Dataset parse_csv(const std::string& text, const TreeModel& model);

// Drops duplicate rows, keeping first occurrences; returns surviving indexes.
std::vector<int> unique_rows(const Dataset& data);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace relset
