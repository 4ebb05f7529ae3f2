#include "fairicp/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fairicp/errors.hpp"

namespace fairicp {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, std::size_t row,
                    const std::string& col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw RuntimeError("csv: non-numeric value '" + cell + "' in row " +
                       std::to_string(row) + ", column '" + col + "'");
  return v;
}

int find_column(const std::vector<std::string>& header,
                const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw RuntimeError("csv: missing column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

int code_for_level(const std::vector<std::string>& levels,
                   const std::string& cell, std::size_t row,
                   const std::string& col) {
  auto it = std::find(levels.begin(), levels.end(), cell);
  if (it == levels.end())
    throw RuntimeError("csv: unknown level '" + cell + "' in row " +
                       std::to_string(row) + ", column '" + col + "'");
  return static_cast<int>(it - levels.begin());
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("csv: cannot open '" + path + "'");

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = split_line(line);
    break;
  }
  if (header.empty()) throw RuntimeError("csv: missing header row in '" + path + "'");

  std::vector<int> x_idx;
  for (const auto& name : schema.features) x_idx.push_back(find_column(header, name));
  std::vector<int> a_idx;
  for (const auto& col : schema.attributes) a_idx.push_back(find_column(header, col.name));
  const int y_idx = find_column(header, schema.response.name);

  std::vector<std::vector<double>> x_rows, a_rows;
  std::vector<double> y_rows;
  std::size_t row = 1;  // header was row 0 of the payload
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw RuntimeError("csv: row " + std::to_string(row) + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(header.size()));
    auto cell_at = [&](int idx, const std::string& col) -> const std::string& {
      const std::string& c = cells[static_cast<std::size_t>(idx)];
      if (c.empty())
        throw RuntimeError("csv: missing value in row " + std::to_string(row) +
                           ", column '" + col + "'");
      return c;
    };

    std::vector<double> xr, ar;
    for (std::size_t j = 0; j < x_idx.size(); ++j)
      xr.push_back(parse_number(cell_at(x_idx[j], schema.features[j]), row,
                                schema.features[j]));
    for (std::size_t j = 0; j < a_idx.size(); ++j) {
      const auto& col = schema.attributes[j];
      const std::string& c = cell_at(a_idx[j], col.name);
      ar.push_back(col.levels.empty()
                       ? parse_number(c, row, col.name)
                       : code_for_level(col.levels, c, row, col.name));
    }
    const std::string& yc = cell_at(y_idx, schema.response.name);
    y_rows.push_back(schema.response.levels.empty()
                         ? parse_number(yc, row, schema.response.name)
                         : code_for_level(schema.response.levels, yc, row,
                                          schema.response.name));
    x_rows.push_back(std::move(xr));
    a_rows.push_back(std::move(ar));
    ++row;
  }

  const auto n = static_cast<Eigen::Index>(y_rows.size());
  if (n == 0) throw RuntimeError("csv: no data rows in '" + path + "'");

  Dataset ds;
  ds.X.resize(n, static_cast<Eigen::Index>(schema.features.size()));
  ds.A.resize(n, static_cast<Eigen::Index>(schema.attributes.size()));
  ds.Y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) ds.X(i, j) = x_rows[i][j];
    for (Eigen::Index j = 0; j < ds.A.cols(); ++j) ds.A(i, j) = a_rows[i][j];
    ds.Y(i) = y_rows[i];
  }
  ds.x_names = schema.features;
  for (const auto& col : schema.attributes) {
    ds.a_cols.push_back(col.levels.empty()
                            ? AttrColumn::continuous(col.name)
                            : AttrColumn::with_levels(
                                  col.name, static_cast<int>(col.levels.size())));
  }
  ds.y_name = schema.response.name;
  if (!schema.response.levels.empty()) {
    ds.task = TaskKind::classification;
    ds.n_classes = static_cast<int>(schema.response.levels.size());
  }
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("csv: cannot write '" + path + "'");

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < ds.X.cols(); ++j)
    names.push_back(j < static_cast<Eigen::Index>(ds.x_names.size())
                        ? ds.x_names[static_cast<std::size_t>(j)]
                        : "x" + std::to_string(j + 1));
  for (const auto& c : ds.a_cols) names.push_back(c.name);
  names.push_back(ds.y_name);

  out << "#schema:";
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : " ") << names[j];
  out << "\n";
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << "\n";
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j)
      out << format_double(ds.X(i, j)) << ",";
    for (Eigen::Index j = 0; j < ds.A.cols(); ++j)
      out << format_double(ds.A(i, j)) << ",";
    out << format_double(ds.Y(i)) << "\n";
  }
}

void write_table(const std::string& path,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("table: cannot write '" + path + "'");
  out << "#schema:";
  for (std::size_t j = 0; j < columns.size(); ++j)
    out << (j ? "," : " ") << columns[j];
  out << "\n";
  for (std::size_t j = 0; j < columns.size(); ++j)
    out << (j ? "," : "") << columns[j];
  out << "\n";
  for (const auto& r : rows) {
    if (r.size() != columns.size())
      throw RuntimeError("table: row width does not match header");
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << "\n";
  }
}

}  // namespace fairicp
