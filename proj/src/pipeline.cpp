#include "ltwd/pipeline.hpp"

#include <stdexcept>

namespace ltwd {

PipelineResult build_feature_tree(const DataMatrix& X, const RunConfig& config) {
  if (config.max_scale < 0 || config.max_scale > 19)
    throw std::invalid_argument("max_scale must lie in 0..19");
  PipelineResult out;
  if (config.landmark_tau) {
    out.op = landmark_diffusion(X, *config.landmark_tau, config.epsilon_factor,
                                config.seed);
  } else {
    out.op = build_diffusion_operator(cosine_distance_matrix(X), config.epsilon_factor);
  }
  MultiScaleDensities densities = multiscale_densities(out.op, config.max_scale);
  out.embedding = embed(densities);
  out.tree = decode_tree(out.embedding);
  out.tree.leaf_names = X.col_ids;
  return out;
}

}  // namespace ltwd
