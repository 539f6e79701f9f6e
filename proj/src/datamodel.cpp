#include "ltwd/datamodel.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ltwd/util.hpp"

namespace ltwd {

namespace {

char delimiter(TableFormat f) { return f == TableFormat::csv ? ',' : '\t'; }

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& value) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

DataMatrix load_matrix(const std::string& path, TableFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  const char delim = delimiter(format);

  std::vector<std::vector<std::string>> raw;
  std::string line;
  long line_no = 0;
  std::vector<long> line_numbers;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    raw.push_back(split(line, delim));
    line_numbers.push_back(line_no);
  }
  if (raw.empty()) throw std::runtime_error("empty table: " + path);

  for (std::size_t r = 1; r < raw.size(); ++r) {
    if (raw[r].size() != raw[0].size()) {
      throw std::runtime_error(path + ": ragged row at line " +
                               std::to_string(line_numbers[r]) + " (" +
                               std::to_string(raw[r].size()) + " cells, expected " +
                               std::to_string(raw[0].size()) + ")");
    }
  }

  double tmp;
  // Header row: present iff the first data row has a non-numeric cell past
  // any identifier column. Identifier column: non-numeric first cell in the
  // second row.
  bool has_id_col = raw.size() > 1 && !parse_double(raw[1][0], tmp);
  if (raw.size() == 1) has_id_col = false;
  std::size_t first_col = has_id_col ? 1 : 0;
  if (raw[0].size() <= first_col)
    throw std::runtime_error(path + ": no numeric columns");
  bool has_header = !parse_double(raw[0][first_col], tmp);

  std::size_t first_row = has_header ? 1 : 0;
  std::size_t n = raw.size() - first_row;
  std::size_t m = raw[0].size() - first_col;
  if (n == 0) throw std::runtime_error(path + ": no data rows");

  DataMatrix X;
  X.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  X.row_ids.resize(n);
  X.col_ids.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    X.col_ids[j] = has_header ? raw[0][j + first_col] : "f" + std::to_string(j + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = raw[i + first_row];
    X.row_ids[i] = has_id_col ? row[0] : "s" + std::to_string(i + 1);
    for (std::size_t j = 0; j < m; ++j) {
      double v;
      if (!parse_double(row[j + first_col], v))
        throw std::runtime_error(path + ": non-numeric cell '" + row[j + first_col] +
                                 "' at line " + std::to_string(line_numbers[i + first_row]));
      if (!std::isfinite(v))
        throw std::runtime_error(path + ": non-finite value at line " +
                                 std::to_string(line_numbers[i + first_row]));
      X.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return X;
}

void save_matrix(const DataMatrix& X, const std::string& path, TableFormat format,
                 const std::vector<std::string>& header) {
  const char delim = delimiter(format);
  atomic_write_file(path, [&](std::ostream& out) {
    for (const auto& h : header) out << "# " << h << "\n";
    out << "id";
    for (const auto& c : X.col_ids) out << delim << c;
    out << "\n";
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out << X.row_ids[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < X.cols(); ++j) out << delim << X.values(i, j);
      out << "\n";
    }
  });
}

HistogramSet normalize_rows(const DataMatrix& X) {
  HistogramSet H;
  H.rows.resize(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double sum = 0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      double v = X.values(i, j);
      if (v < 0)
        throw std::domain_error("negative entry at row " + std::to_string(i) +
                                ", column " + std::to_string(j));
      sum += v;
    }
    if (sum <= 0)
      throw std::domain_error("all-zero row " + std::to_string(i) +
                              " cannot be normalized");
    H.rows.row(i) = X.values.row(i) / sum;
  }
  return H;
}

LabelVector load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  LabelVector out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    // optional "label" header
    double v;
    if (first && !parse_double(line, v)) {
      first = false;
      continue;
    }
    first = false;
    if (!parse_double(line, v))
      throw std::runtime_error(path + ": non-numeric label '" + line + "'");
    out.labels.push_back(static_cast<int>(v));
  }
  if (out.labels.empty()) throw std::runtime_error("no labels in " + path);
  return out;
}

void save_labels(const LabelVector& labels, const std::string& path,
                 const std::vector<std::string>& header) {
  atomic_write_file(path, [&](std::ostream& out) {
    for (const auto& h : header) out << "# " << h << "\n";
    out << "label\n";
    for (int v : labels.labels) out << v << "\n";
  });
}

}  // namespace ltwd
