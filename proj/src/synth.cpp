#include "ltwd/synth.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ltwd {

namespace {

// truth tree of the produce cascade: root -> fruit, vegetable;
// vegetable -> green leaf, root vegetable; items hang off their category
constexpr int kProduceNodes = 13;
const char* kProduceNames[kProduceNodes] = {
    "produce", "fruit",  "vegetable", "green_leaf", "root_vegetable",
    "apple",   "orange", "banana",    "kale",       "spinach",
    "lettuce", "carrot", "beetroot"};
const int kProduceParents[kProduceNodes] = {-1, 0, 0, 2, 2, 1, 1, 1, 3, 3, 3, 4, 4};

// feature order of the 8 observed words
const int kFeatureNode[8] = {5, 6, 7, 11, 12, 8, 9, 10};
const char* kFeatureNames[8] = {"apple",  "orange",  "banana", "carrot",
                                "beetroot", "kale",  "spinach", "lettuce"};

}  // namespace

SyntheticBundle gen_hier_docs(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  std::mt19937_64 rng(seed);
  auto coin = [&rng] { return (rng() & 1u) != 0; };

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 8);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (;;) {
      bool fruit = coin();
      bool vegetable = coin();
      double row[8] = {};
      if (fruit)
        for (int f = 0; f < 3; ++f) row[f] = coin() ? 1.0 : 0.0;
      if (vegetable) {
        bool green_leaf = coin();
        bool root_veg = coin();
        if (root_veg)
          for (int f = 3; f < 5; ++f) row[f] = coin() ? 1.0 : 0.0;
        if (green_leaf)
          for (int f = 5; f < 8; ++f) row[f] = coin() ? 1.0 : 0.0;
      }
      double sum = 0;
      for (double v : row) sum += v;
      if (sum == 0) continue;  // histogram normalization needs positive mass
      for (int f = 0; f < 8; ++f) X(i, f) = row[f];
      labels[static_cast<std::size_t>(i)] = fruit ? 1 : 0;
      break;
    }
  }

  SyntheticBundle bundle{
      {},
      LabelVector{std::move(labels)},
      GeneralTree(std::vector<int>(kProduceParents, kProduceParents + kProduceNodes),
                  std::vector<double>(kProduceNodes, 1.0)),
      std::vector<int>(kFeatureNode, kFeatureNode + 8),
      std::vector<std::string>(kProduceNames, kProduceNames + kProduceNodes)};
  bundle.X.values = std::move(X);
  for (Eigen::Index i = 0; i < n; ++i)
    bundle.X.row_ids.push_back("doc" + std::to_string(i + 1));
  bundle.X.col_ids.assign(kFeatureNames, kFeatureNames + 8);
  return bundle;
}

SyntheticBundle gen_tree_gaussians(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  constexpr int kNodes = 15;

  std::vector<int> parents(kNodes, -1);
  for (int v = 1; v < kNodes; ++v) parents[static_cast<std::size_t>(v)] = (v - 1) / 2;
  GeneralTree truth(parents, std::vector<double>(kNodes, 1.0));

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kNodes, kNodes);
  for (int v = 1; v < kNodes; ++v) {
    A(v, (v - 1) / 2) = 1.0;
    A((v - 1) / 2, v) = 1.0;
  }
  Eigen::MatrixXd L = Eigen::MatrixXd(A.rowwise().sum().asDiagonal()) - A;

  // sampling factor of the pseudo-inverse: U diag(1/sqrt(lambda)) over the
  // nonzero spectrum, so x = mu + B xi has covariance L^+
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  constexpr double cutoff = 1e-10;
  std::vector<int> kept;
  for (int i = 0; i < kNodes; ++i)
    if (eig.eigenvalues()(i) > cutoff) kept.push_back(i);
  Eigen::MatrixXd B(kNodes, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c)
    B.col(static_cast<Eigen::Index>(c)) =
        eig.eigenvectors().col(kept[c]) / std::sqrt(eig.eigenvalues()(kept[c]));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(kNodes, 5.0);
  Eigen::MatrixXd X(n, kNodes);
  Eigen::VectorXd xi(static_cast<Eigen::Index>(kept.size()));
  constexpr long kMaxAttempts = 1000000;
  for (Eigen::Index i = 0; i < n; ++i) {
    long attempt = 0;
    for (;;) {
      if (++attempt > kMaxAttempts)
        throw std::runtime_error("rejection sampling exceeded the attempt cap");
      for (Eigen::Index c = 0; c < xi.size(); ++c) xi(c) = gauss(rng);
      Eigen::VectorXd x = mu + B * xi;
      if ((x.array() >= 0).all()) {
        X.row(i) = x.transpose();
        break;
      }
    }
  }

  SyntheticBundle bundle{{}, std::nullopt, std::move(truth), {}, {}};
  bundle.X.values = std::move(X);
  for (Eigen::Index i = 0; i < n; ++i)
    bundle.X.row_ids.push_back("s" + std::to_string(i + 1));
  for (int v = 0; v < kNodes; ++v) {
    bundle.X.col_ids.push_back("v" + std::to_string(v + 1));
    bundle.feature_nodes.push_back(v);
    bundle.truth_node_names.push_back("v" + std::to_string(v + 1));
  }
  return bundle;
}

namespace {

void write_general(const GeneralTree& t, const std::vector<std::string>& names,
                   int v, std::ostream& out) {
  const auto& kids = t.children(v);
  if (!kids.empty()) {
    out << '(';
    for (std::size_t c = 0; c < kids.size(); ++c) {
      if (c) out << ',';
      write_general(t, names, kids[c], out);
    }
    out << ')';
  }
  if (!names.empty()) out << names[static_cast<std::size_t>(v)];
  if (v != t.root()) out << ':' << t.parent_edge_weight(v);
}

}  // namespace

std::string general_tree_to_newick(const GeneralTree& t,
                                   const std::vector<std::string>& names) {
  std::ostringstream out;
  out.precision(17);
  write_general(t, names, t.root(), out);
  out << ';';
  return out.str();
}

}  // namespace ltwd
