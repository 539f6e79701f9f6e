#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ltwd/datamodel.hpp"

namespace ltwd {

// Symmetric feature-to-feature distances with zero diagonal.
struct FeatureDistanceMatrix {
  Eigen::MatrixXd d;  // m x m

  Eigen::Index size() const { return d.rows(); }
};

// Spectral factorization of the column-stochastic diffusion operator
// P = Qhat * Dhat^{-1}, stored through the symmetric conjugate
// S = Dhat^{-1/2} Qhat Dhat^{-1/2} so fractional powers stay real:
//   P^t = Dhat^{1/2} * V diag(lambda^t) V^T * Dhat^{-1/2}.
// rank() may be below m for landmark-built operators; missing directions
// are exact zeros of S and contribute nothing to any power.
struct DiffusionOperator {
  Eigen::Index m = 0;
  Eigen::VectorXd d_hat;     // length m, positive
  Eigen::VectorXd eigvals;   // length r, descending, in [1e-12, 1]
  Eigen::MatrixXd eigvecs;   // m x r, orthonormal columns
  double epsilon = 0;        // kernel bandwidth actually used

  Eigen::Index rank() const { return eigvals.size(); }

  // Dense P^t for real t >= 0, no clamping applied.
  Eigen::MatrixXd power(double t) const;
};

// phi_j^k = P^{2^-k} e_j, clamped entrywise to >= 0 and column-renormalized.
struct MultiScaleDensities {
  int K_c = 0;
  std::vector<Eigen::MatrixXd> densities;  // K_c+1 matrices, m x m
  std::vector<std::string> warnings;       // columns that lost > 1e-6 mass
};

// d(j,j') = 1 - cos(X_:,j, X_:,j'). Diagonal forced to exactly 0.
FeatureDistanceMatrix cosine_distance_matrix(const DataMatrix& X);

// Density-normalized Gaussian kernel with
// epsilon = epsilon_factor * median of off-diagonal distances.
DiffusionOperator build_diffusion_operator(const FeatureDistanceMatrix& d,
                                           double epsilon_factor = 2.0);

MultiScaleDensities multiscale_densities(const DiffusionOperator& op, int K_c);

// Rank-reduced operator through round(m^tau) random landmark features.
DiffusionOperator landmark_diffusion(const DataMatrix& X, double tau,
                                     double epsilon_factor, std::uint64_t seed);

}  // namespace ltwd
