#pragma once

#include <Eigen/Core>
#include <vector>

#include "ltwd/hyperbolic.hpp"
#include "ltwd/tree.hpp"

namespace ltwd {

// Rooted tree of arbitrary degree with nonnegative parent-edge weights.
// Distributions may place mass on any node. Used by the slow exact
// reference implementations; kept independent of the main TWD engine.
class GeneralTree {
 public:
  // parent[i] == -1 exactly for the root; weight[i] is the edge to parent[i].
  GeneralTree(std::vector<int> parent, std::vector<double> weight);

  static GeneralTree from_binary(const WeightedBinaryTree& t);

  int size() const { return static_cast<int>(parent_.size()); }
  int root() const { return root_; }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  double parent_edge_weight(int v) const { return weight_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& children(int v) const {
    return children_[static_cast<std::size_t>(v)];
  }

  // all-pairs shortest-path matrix
  Eigen::MatrixXd metric_matrix() const;

 private:
  std::vector<int> parent_;
  std::vector<double> weight_;
  std::vector<std::vector<int>> children_;
  int root_ = -1;
};

// Exact transportation LP value via successive shortest augmenting paths.
// Deterministic and exact to accumulation error; capped at m <= 512.
double exact_ot(const Eigen::MatrixXd& C, const Eigen::VectorXd& mu,
                const Eigen::VectorXd& nu);

// TWD on an arbitrary rooted tree: sum over nodes of the parent edge
// weight times the absolute subtree mass difference.
double tw_reference(const GeneralTree& t, const Eigen::VectorXd& mu,
                    const Eigen::VectorXd& nu);

double tree_shortest_path(const GeneralTree& t, int u, int v);

// (1/2)(d(j,r) + d(j',r) - d(j,j')); equals the depth of LCA(j,j') below r.
double gromov_product(const GeneralTree& t, int j, int j2, int r);

enum class FrechetConstraint { free, vertical_axis };

// Derivative-free minimizer of sum_i d_H^2(h, p_i); a test oracle only.
HalfSpacePoint frechet_mean_numeric(const std::vector<HalfSpacePoint>& points,
                                    FrechetConstraint constraint);

}  // namespace ltwd
