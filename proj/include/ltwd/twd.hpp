#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ltwd/datamodel.hpp"
#include "ltwd/tree.hpp"

namespace ltwd {

// Symmetric pairwise distance matrix with zero diagonal.
struct DistanceMatrixOut {
  Eigen::MatrixXd W;  // n x n
  std::vector<std::string> sample_ids;
};

// TWD between two histograms over the tree's leaves: one post-order pass
// accumulating signed subtree mass differences, O(m).
double twd_pair(const WeightedBinaryTree& t, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y);

DistanceMatrixOut twd_matrix(const WeightedBinaryTree& t, const HistogramSet& H,
                             const std::vector<std::string>& sample_ids = {});

// Sum of twd_pair over a family of trees sharing the leaf set.
double tree_sliced_sum(const std::vector<WeightedBinaryTree>& trees,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& y);

void save_distance_matrix(const DistanceMatrixOut& W, const std::string& path,
                          const std::vector<std::string>& header = {});
DistanceMatrixOut load_distance_matrix(const std::string& path);

}  // namespace ltwd
