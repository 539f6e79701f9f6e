#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltwd {

// Dense samples (rows) x features (columns) matrix with identifiers.
// Immutable after construction.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// Rows are discrete probability distributions over the m features.
struct HistogramSet {
  Eigen::MatrixXd rows;  // n x m, each row sums to 1

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

struct LabelVector {
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

enum class TableFormat { csv, tsv };

// Parses a rectangular numeric table. Optional header row and/or leading
// identifier column are auto-detected (non-numeric first row / first column).
// Lines starting with '#' are skipped.
DataMatrix load_matrix(const std::string& path, TableFormat format = TableFormat::csv);

// Writes values with 17 significant digits so a reload is bit-faithful.
// `header` lines, if any, are emitted first as '#'-prefixed comments.
void save_matrix(const DataMatrix& X, const std::string& path,
                 TableFormat format = TableFormat::csv,
                 const std::vector<std::string>& header = {});

// X_{i,:} / ||X_{i,:}||_1 per row. Rejects negative entries and all-zero rows.
HistogramSet normalize_rows(const DataMatrix& X);

LabelVector load_labels(const std::string& path);
void save_labels(const LabelVector& labels, const std::string& path,
                 const std::vector<std::string>& header = {});

}  // namespace ltwd
