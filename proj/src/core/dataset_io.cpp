#include <fstream>
#include <sstream>
#include <vector>

#include "dpbo/core/types.hpp"

namespace dpbo::core {

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(token, &pos);
      while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
      if (pos != token.size()) return false;
      out.push_back(v);
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

}  // namespace

// One sample per row, comma-separated floating point columns. A first row
// that fails numeric parsing is treated as a header and skipped.
Dataset Dataset::from_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error,
          "Dataset::from_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    if (!parse_row(line, row)) {
      require(first, ErrorCode::io_error,
              "Dataset::from_csv: non-numeric row in " + path);
      first = false;
      continue;
    }
    first = false;
    if (!rows.empty())
      require(row.size() == rows.front().size(), ErrorCode::io_error,
              "Dataset::from_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::io_error,
          "Dataset::from_csv: no samples in " + path);
  Mat cols(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    for (int j = 0; j < cols.rows(); ++j) cols(j, i) = rows[i][j];
  return Dataset(std::move(cols));
}

}  // namespace dpbo::core
