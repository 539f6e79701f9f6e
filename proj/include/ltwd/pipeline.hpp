#pragma once

#include <cstdint>
#include <optional>

#include "ltwd/datamodel.hpp"
#include "ltwd/diffusion.hpp"
#include "ltwd/hyperbolic.hpp"
#include "ltwd/tree.hpp"

namespace ltwd {

struct RunConfig {
  double epsilon_factor = 2.0;
  int max_scale = 7;  // K_c
  std::uint64_t seed = 42;
  std::optional<double> landmark_tau;
};

struct PipelineResult {
  DiffusionOperator op;
  MultiScaleEmbedding embedding;
  WeightedBinaryTree tree;
};

// X -> cosine distances -> diffusion operator (full or landmark) ->
// dyadic densities -> half-space embedding -> decoded feature tree.
PipelineResult build_feature_tree(const DataMatrix& X, const RunConfig& config);

}  // namespace ltwd
