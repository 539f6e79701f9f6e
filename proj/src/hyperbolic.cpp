#include "ltwd/hyperbolic.hpp"

#include <cmath>
#include <stdexcept>

namespace ltwd {

HalfSpacePoint MultiScaleEmbedding::point(int k, Eigen::Index j) const {
  const Eigen::MatrixXd& P = psi[static_cast<std::size_t>(k)];
  HalfSpacePoint z;
  z.coords.resize(m + 1);
  z.coords.head(m) = P.col(j);
  z.coords(m) = scale_height(k);
  return z;
}

double halfspace_distance(const HalfSpacePoint& x, const HalfSpacePoint& y) {
  if (x.dim() != y.dim())
    throw std::invalid_argument("half-space points of mismatched dimension");
  double prod = x.height() * y.height();
  return 2.0 * std::asinh((x.coords - y.coords).norm() / (2.0 * std::sqrt(prod)));
}

MultiScaleEmbedding embed(const MultiScaleDensities& densities) {
  MultiScaleEmbedding emb;
  emb.K_c = densities.K_c;
  emb.psi.reserve(densities.densities.size());
  for (const auto& phi : densities.densities) {
    if ((phi.array() < 0).any())
      throw std::logic_error("negative diffusion density after clamping");
    emb.psi.push_back(phi.array().sqrt().matrix());
  }
  emb.m = emb.psi.empty() ? 0 : emb.psi[0].cols();
  return emb;
}

double lca_projection(const HalfSpacePoint& z1, const HalfSpacePoint& z2) {
  if (z1.dim() != z2.dim())
    throw std::invalid_argument("half-space points of mismatched dimension");
  if (z1.height() != z2.height())
    throw std::invalid_argument("lca_projection requires matching heights");
  double offset = 0.5 * (z1.coords.head(z1.dim() - 1) - z2.coords.head(z2.dim() - 1)).norm();
  return std::hypot(offset, z1.height());
}

HalfSpacePoint hyperbolic_lca(const HalfSpacePoint& z1, const HalfSpacePoint& z2) {
  double proj = lca_projection(z1, z2);
  HalfSpacePoint out;
  out.coords.resize(z1.dim());
  out.coords.head(z1.dim() - 1) =
      0.5 * (z1.coords.head(z1.dim() - 1) + z2.coords.head(z2.dim() - 1));
  out.coords(z1.dim() - 1) = proj;
  return out;
}

double lca_projection_at(const MultiScaleEmbedding& emb, int k, Eigen::Index j,
                         Eigen::Index j2) {
  const Eigen::MatrixXd& P = emb.psi[static_cast<std::size_t>(k)];
  double offset = 0.5 * (P.col(j) - P.col(j2)).norm();
  return std::hypot(offset, emb.scale_height(k));
}

double hd_lca_depth(const MultiScaleEmbedding& emb, Eigen::Index j, Eigen::Index j2) {
  double log_sum = 0;
  for (int k = 0; k <= emb.K_c; ++k)
    log_sum += std::log(lca_projection_at(emb, k, j, j2));
  return std::exp(log_sum / (emb.K_c + 1));
}

double product_manifold_distance(const MultiScaleEmbedding& emb, Eigen::Index j,
                                 Eigen::Index j2) {
  double sum = 0;
  for (int k = 0; k <= emb.K_c; ++k) {
    const Eigen::MatrixXd& P = emb.psi[static_cast<std::size_t>(k)];
    double diff = (P.col(j) - P.col(j2)).norm();
    sum += 2.0 * std::asinh(std::exp2(-0.5 * k + 1.0) * diff);
  }
  return sum;
}

}  // namespace ltwd
