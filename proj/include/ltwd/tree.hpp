#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "ltwd/hyperbolic.hpp"

namespace ltwd {

// Rooted binary tree over m feature leaves: 2m-1 nodes, leaves are node ids
// 0..m-1, internal nodes are appended in merge order so children always
// precede their parent. Heights are nondecreasing from leaves to the root.
struct WeightedBinaryTree {
  struct Node {
    int parent = -1;
    std::array<int, 2> children{-1, -1};
    double parent_edge_weight = 0;
    double height = 0;

    bool is_leaf() const { return children[0] < 0; }
  };

  Eigen::Index num_leaves = 0;
  std::vector<Node> nodes;
  int root_id = -1;
  std::vector<std::string> leaf_names;  // empty => f1..fm

  Eigen::Index num_nodes() const { return static_cast<Eigen::Index>(nodes.size()); }
  std::string leaf_name(Eigen::Index j) const;
  void validate() const;  // throws on any structural invariant violation
};

// R(v,j) = 1 iff node v is an ancestor-or-self of leaf j; alpha(v) is the
// parent edge weight (0 at the root). TWD in matrix form is
// |diag(alpha) R (x - y)|_1.
struct SubtreeIndicator {
  Eigen::MatrixXd R;       // (2m-1) x m, zero/one
  Eigen::VectorXd alpha;   // length 2m-1
};

// Multi-scale decoding: merges feature pairs ascending by HD-LCA depth
// a_{j,j'}; each merge creates an internal node at height d_M(j,j')/2,
// clamped up to keep heights monotone. Ties in the sort break
// lexicographically by (min(j,j'), max(j,j')).
WeightedBinaryTree decode_tree(const MultiScaleEmbedding& emb);

// Single-scale variant: pairs ordered by lca_projection at scale k, merge
// height is half the half-space geodesic distance at that scale.
WeightedBinaryTree decode_tree_single_scale(const MultiScaleEmbedding& emb, int k);

// Shortest-path length between two leaves (through their LCA).
double tree_metric(const WeightedBinaryTree& t, Eigen::Index j, Eigen::Index j2);

SubtreeIndicator subtree_indicator(const WeightedBinaryTree& t);

// Leaf indices below each node, root's set is all leaves.
std::vector<std::vector<Eigen::Index>> leaf_sets(const WeightedBinaryTree& t);

std::string to_newick(const WeightedBinaryTree& t);
WeightedBinaryTree from_newick(const std::string& text);

void save_newick(const WeightedBinaryTree& t, const std::string& path,
                 const std::vector<std::string>& header = {});
WeightedBinaryTree load_newick(const std::string& path);

}  // namespace ltwd
