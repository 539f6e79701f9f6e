#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "ltwd/diffusion.hpp"

namespace ltwd {

// Point in the Poincare half-space model: last coordinate strictly positive.
struct HalfSpacePoint {
  Eigen::VectorXd coords;

  double height() const { return coords(coords.size() - 1); }
  Eigen::Index dim() const { return coords.size(); }
};

// Feature j at scale k sits at z_j^k = [psi_j^k ; 2^{k/2-2}], where psi is
// the elementwise square root of the diffusion density phi_j^k (a unit
// vector, so all points of one scale share a horosphere).
struct MultiScaleEmbedding {
  int K_c = 0;
  Eigen::Index m = 0;
  std::vector<Eigen::MatrixXd> psi;  // K_c+1 matrices, m x m; column j = psi_j^k

  double scale_height(int k) const { return std::exp2(0.5 * k - 2.0); }
  HalfSpacePoint point(int k, Eigen::Index j) const;
};

// 2*asinh(|x - y| / (2*sqrt(x_h * y_h)))
double halfspace_distance(const HalfSpacePoint& x, const HalfSpacePoint& y);

MultiScaleEmbedding embed(const MultiScaleDensities& densities);

// Height of the hyperbolic LCA of two same-height points:
// sqrt(|psi1 - psi2|^2 / 4 + h^2). This is the radius of the geodesic
// semicircle joining them.
double lca_projection(const HalfSpacePoint& z1, const HalfSpacePoint& z2);

// Closed-form Frechet mean of two same-height points:
// [(psi1 + psi2)/2 ; lca_projection].
HalfSpacePoint hyperbolic_lca(const HalfSpacePoint& z1, const HalfSpacePoint& z2);

// Per-scale lca_projection for a feature pair.
double lca_projection_at(const MultiScaleEmbedding& emb, int k, Eigen::Index j,
                         Eigen::Index j2);

// a_{j,j'}: geometric mean of lca_projection over scales 0..K_c,
// evaluated in log-space.
double hd_lca_depth(const MultiScaleEmbedding& emb, Eigen::Index j, Eigen::Index j2);

// d_M(j,j') = sum_k 2*asinh(2^{-k/2+1} |z_j^k - z_{j'}^k|); the heights
// cancel within a scale, so only the psi difference enters.
double product_manifold_distance(const MultiScaleEmbedding& emb, Eigen::Index j,
                                 Eigen::Index j2);

}  // namespace ltwd
