#include "ltwd/diffusion.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ltwd {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

Eigen::MatrixXd normalized_columns(const DataMatrix& X) {
  Eigen::MatrixXd cols = X.values;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    double norm = cols.col(j).norm();
    if (norm <= 0)
      throw std::domain_error("feature '" + X.col_ids[static_cast<std::size_t>(j)] +
                              "' has zero Euclidean norm");
    cols.col(j) /= norm;
  }
  return cols;
}

constexpr double kEigvalFloor = 1e-12;

}  // namespace

Eigen::MatrixXd DiffusionOperator::power(double t) const {
  Eigen::VectorXd lam = eigvals.array().pow(t);
  Eigen::MatrixXd sym = eigvecs * lam.asDiagonal() * eigvecs.transpose();
  Eigen::VectorXd sqrt_d = d_hat.array().sqrt();
  return sqrt_d.asDiagonal() * sym * sqrt_d.cwiseInverse().asDiagonal();
}

FeatureDistanceMatrix cosine_distance_matrix(const DataMatrix& X) {
  Eigen::MatrixXd cols = normalized_columns(X);
  FeatureDistanceMatrix out;
  out.d = Eigen::MatrixXd::Ones(X.cols(), X.cols()) - cols.transpose() * cols;
  out.d = 0.5 * (out.d + out.d.transpose());
  out.d = out.d.cwiseMax(0.0);
  out.d.diagonal().setZero();
  return out;
}

DiffusionOperator build_diffusion_operator(const FeatureDistanceMatrix& d,
                                           double epsilon_factor) {
  const Eigen::Index m = d.size();
  if (m < 2) throw std::invalid_argument("need at least 2 features");
  if (epsilon_factor <= 0) throw std::invalid_argument("epsilon_factor must be positive");

  std::vector<double> offdiag;
  offdiag.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = j + 1; i < m; ++i) offdiag.push_back(d.d(i, j));
  double eps = epsilon_factor * median(offdiag);
  if (eps <= 0)
    throw std::domain_error("degenerate kernel: all pairwise distances are zero");

  Eigen::MatrixXd Q = (-d.d.array().square() / eps).exp();
  Eigen::VectorXd D = Q.rowwise().sum();
  Eigen::MatrixXd Qhat =
      D.cwiseInverse().asDiagonal() * Q * D.cwiseInverse().asDiagonal();
  Eigen::VectorXd Dhat = Qhat.rowwise().sum();

  Eigen::VectorXd inv_sqrt = Dhat.array().sqrt().inverse();
  Eigen::MatrixXd S = inv_sqrt.asDiagonal() * Qhat * inv_sqrt.asDiagonal();
  S = 0.5 * (S + S.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition of diffusion kernel failed");

  DiffusionOperator op;
  op.m = m;
  op.d_hat = Dhat;
  op.epsilon = eps;
  // solver returns ascending order
  op.eigvals = eig.eigenvalues().reverse().cwiseMax(kEigvalFloor).cwiseMin(1.0);
  op.eigvecs = eig.eigenvectors().rowwise().reverse();
  return op;
}

MultiScaleDensities multiscale_densities(const DiffusionOperator& op, int K_c) {
  if (K_c < 0) throw std::invalid_argument("K_c must be nonnegative");
  MultiScaleDensities out;
  out.K_c = K_c;
  out.densities.resize(static_cast<std::size_t>(K_c) + 1);
  for (int k = 0; k <= K_c; ++k) {
    Eigen::MatrixXd M = op.power(std::ldexp(1.0, -k));
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      double lost = -M.col(j).cwiseMin(0.0).sum();
      if (lost > 1e-6)
        out.warnings.push_back("scale " + std::to_string(k) + ", feature " +
                               std::to_string(j) + ": clamped negative mass " +
                               std::to_string(lost));
      M.col(j) = M.col(j).cwiseMax(0.0);
      M.col(j) /= M.col(j).sum();
    }
    out.densities[static_cast<std::size_t>(k)] = std::move(M);
  }
  return out;
}

DiffusionOperator landmark_diffusion(const DataMatrix& X, double tau,
                                     double epsilon_factor, std::uint64_t seed) {
  const Eigen::Index m = X.cols();
  if (tau <= 0 || tau >= 1.0 + 1e-15)
    throw std::invalid_argument("tau must lie in (0, 1]");
  const Eigen::Index mp =
      static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(m), tau)));
  if (mp < 2) throw std::invalid_argument("round(m^tau) < 2 landmarks");
  if (epsilon_factor <= 0) throw std::invalid_argument("epsilon_factor must be positive");

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(mp));
  std::sort(idx.begin(), idx.end());

  Eigen::MatrixXd cols = normalized_columns(X);
  Eigen::MatrixXd lm(cols.rows(), mp);
  for (Eigen::Index l = 0; l < mp; ++l) lm.col(l) = cols.col(idx[static_cast<std::size_t>(l)]);

  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(m, mp) - cols.transpose() * lm;
  d = d.cwiseMax(0.0);

  std::vector<double> pool;
  pool.reserve(static_cast<std::size_t>(m * mp));
  for (Eigen::Index l = 0; l < mp; ++l)
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != idx[static_cast<std::size_t>(l)]) pool.push_back(d(j, l));
  double eps = epsilon_factor * median(pool);
  if (eps <= 0)
    throw std::domain_error("degenerate landmark kernel: all distances are zero");

  Eigen::MatrixXd K = (-d.array().square() / eps).exp();
  Eigen::VectorXd Dt = K * (K.transpose() * Eigen::VectorXd::Ones(m));
  Eigen::MatrixXd W = Dt.array().sqrt().inverse().matrix().asDiagonal() * K;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeThinU);
  DiffusionOperator op;
  op.m = m;
  op.d_hat = Dt;
  op.epsilon = eps;
  op.eigvals = svd.singularValues().array().square().max(kEigvalFloor).min(1.0);
  op.eigvecs = svd.matrixU();
  return op;
}

}  // namespace ltwd
