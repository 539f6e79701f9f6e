#include "ltwd/twd.hpp"

#include <cmath>
#include <stdexcept>

#include "ltwd/util.hpp"

namespace ltwd {

namespace {

void check_histogram(const WeightedBinaryTree& t,
                     const Eigen::Ref<const Eigen::VectorXd>& x, const char* name) {
  if (x.size() != t.num_leaves)
    throw std::invalid_argument(std::string(name) + ": length " +
                                std::to_string(x.size()) + " does not match " +
                                std::to_string(t.num_leaves) + " leaves");
  double sum = x.sum();
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::domain_error(std::string(name) + ": histogram sums to " +
                            std::to_string(sum) + ", expected 1");
}

}  // namespace

double twd_pair(const WeightedBinaryTree& t, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
  check_histogram(t, x, "x");
  check_histogram(t, y, "y");

  // internal ids follow merge order, so a forward pass visits children first
  thread_local std::vector<double> acc;
  const std::size_t n_nodes = t.nodes.size();
  acc.assign(n_nodes, 0.0);
  const Eigen::Index m = t.num_leaves;
  for (Eigen::Index j = 0; j < m; ++j) acc[static_cast<std::size_t>(j)] = x(j) - y(j);

  double total = 0;
  for (std::size_t v = 0; v < n_nodes; ++v) {
    const auto& node = t.nodes[v];
    total += node.parent_edge_weight * std::abs(acc[v]);
    if (node.parent >= 0) acc[static_cast<std::size_t>(node.parent)] += acc[v];
  }
  return total;
}

DistanceMatrixOut twd_matrix(const WeightedBinaryTree& t, const HistogramSet& H,
                             const std::vector<std::string>& sample_ids) {
  if (H.dim() != t.num_leaves)
    throw std::invalid_argument("histogram column count does not match tree leaves");
  const Eigen::Index n = H.size();
  DistanceMatrixOut out;
  out.W = Eigen::MatrixXd::Zero(n, n);
  out.sample_ids = sample_ids;
  if (out.sample_ids.empty())
    for (Eigen::Index i = 0; i < n; ++i)
      out.sample_ids.push_back("s" + std::to_string(i + 1));

  parallel_for(n, [&](long i) {
    for (Eigen::Index i2 = i + 1; i2 < n; ++i2) {
      double w = twd_pair(t, H.rows.row(i).transpose(), H.rows.row(i2).transpose());
      out.W(i, i2) = w;
      out.W(i2, i) = w;
    }
  });
  return out;
}

double tree_sliced_sum(const std::vector<WeightedBinaryTree>& trees,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y) {
  double total = 0;
  for (const auto& t : trees) total += twd_pair(t, x, y);
  return total;
}

void save_distance_matrix(const DistanceMatrixOut& W, const std::string& path,
                          const std::vector<std::string>& header) {
  DataMatrix as_matrix;
  as_matrix.values = W.W;
  as_matrix.row_ids = W.sample_ids;
  as_matrix.col_ids = W.sample_ids;
  save_matrix(as_matrix, path, TableFormat::csv, header);
}

DistanceMatrixOut load_distance_matrix(const std::string& path) {
  DataMatrix raw = load_matrix(path);
  if (raw.rows() != raw.cols())
    throw std::runtime_error(path + ": distance matrix must be square");
  DistanceMatrixOut out;
  out.W = raw.values;
  out.sample_ids = raw.row_ids;
  return out;
}

}  // namespace ltwd
