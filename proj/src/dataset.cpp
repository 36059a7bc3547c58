#include "relset/dataset.hpp"

#include <map>
#include <sstream>

namespace relset {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  size_t i = 0;
  while (true) {
    field.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          field.push_back(line[i++]);
        }
      }
    } else {
      while (i < line.size() && line[i] != ',') field.push_back(line[i++]);
    }
    fields.push_back(field);
    if (i >= line.size()) break;
    if (line[i] == ',') ++i;
  }
  return fields;
}

Dataset parse_csv(const std::string& text, const TreeModel& model) {
  std::istringstream in(text);
  std::string line;
  Dataset data;
  int line_no = 0;
  const int m = model.space.size();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no == 1) {
      data.header = fields;
      if (static_cast<int>(fields.size()) != m && static_cast<int>(fields.size()) != m + 1)
        throw DatasetError("header has " + std::to_string(fields.size()) + " columns, expected " + std::to_string(m) +
                           " feature names (plus an optional class column)");
      for (int f = 0; f < m; ++f)
        if (fields[f] != model.space.features[f].name)
          throw DatasetError("header column " + std::to_string(f + 1) + " is '" + fields[f] + "', expected feature '" +
                             model.space.features[f].name + "'");
      data.has_class_column = static_cast<int>(fields.size()) == m + 1;
      continue;
    }
    if (static_cast<int>(fields.size()) != static_cast<int>(data.header.size()))
      throw DatasetError("row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(data.header.size()));
    if (data.has_class_column) {
      data.declared_class.push_back(fields.back());
      fields.pop_back();
    }
    data.rows.push_back(std::move(fields));
  }
  if (data.header.empty()) throw DatasetError("dataset is empty");
  return data;
}

std::vector<int> unique_rows(const Dataset& data) {
  std::map<std::vector<std::string>, int> seen;
  std::vector<int> keep;
  for (size_t i = 0; i < data.rows.size(); ++i)
    if (seen.emplace(data.rows[i], static_cast<int>(i)).second) keep.push_back(static_cast<int>(i));
  return keep;
}

}  // namespace relset
