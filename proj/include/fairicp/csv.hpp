#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairicp/dataset.hpp"

namespace fairicp {

// Declares how CSV columns map onto the dataset blocks. Attribute and
// response columns with a non-empty level list are categorical; their cell
// values are looked up in the list and stored as integer codes.
struct CsvSchema {
  std::vector<std::string> features;
  struct Column {
    std::string name;
    std::vector<std::string> levels;  // empty = continuous
  };
  std::vector<Column> attributes;
  Column response;
};

// Reads a comma-separated file with a header row. Lines starting with '#'
// are skipped. Missing cells and unknown levels are rejected with the
// offending row and column named.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Writes the dataset back to CSV (header + rows, continuous values at 17
// significant digits so doubles round-trip exactly).
void save_csv(const Dataset& ds, const std::string& path);

// Generic results-table writer: '#schema:' comment, header, then rows of
// preformatted cells.
void write_table(const std::string& path,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);  // 17 significant digits

}  // namespace fairicp
