#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltwd/datamodel.hpp"
#include "ltwd/oracle.hpp"

namespace ltwd {

// Synthetic observations together with the latent feature tree that
// generated them. feature_nodes[j] is the truth-tree node carrying
// feature j (features need not sit on leaves).
struct SyntheticBundle {
  DataMatrix X;
  std::optional<LabelVector> labels;
  GeneralTree truth;
  std::vector<int> feature_nodes;
  std::vector<std::string> truth_node_names;
};

// Produce-word documents: binary 8-feature vectors drawn from the
// fruit/vegetable category cascade, each branch and item independently
// active with probability 1/2. All-zero draws are rejected and redrawn.
// Label is the fruit-branch indicator of the accepted draw.
SyntheticBundle gen_hier_docs(Eigen::Index n, std::uint64_t seed);

// Four-level balanced binary tree on 15 nodes with unit edge weights;
// samples are N(5*1, L^+) realizations (L^+ = pseudo-inverse of the tree
// Laplacian), redrawn while any element is negative.
SyntheticBundle gen_tree_gaussians(Eigen::Index n, std::uint64_t seed);

// Arbitrary-degree Newick with node names and branch lengths.
std::string general_tree_to_newick(const GeneralTree& t,
                                   const std::vector<std::string>& names);

}  // namespace ltwd
