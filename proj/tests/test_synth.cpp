#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "doctest.h"
#include "ltwd/oracle.hpp"
#include "ltwd/synth.hpp"

using namespace ltwd;

namespace {

// Exact law of the produce cascade by enumeration: 12 fair coins (fruit,
// vegetable, green-leaf, root-vegetable branches plus 8 items), a word is
// observed iff its own coin and every branch coin above it are on, and
// all-zero outcomes are discarded. Returns P(word j | accepted) for the
// 8 words in generator order and P(label=1 | accepted).
struct CascadeLaw {
  std::array<double, 8> p_word{};
  double p_label1 = 0;
};

CascadeLaw enumerate_cascade() {
  CascadeLaw law;
  double accepted = 0;
  for (int bits = 0; bits < (1 << 12); ++bits) {
    const bool fruit = bits & 1, veg = bits & 2, gl = bits & 4, rv = bits & 8;
    std::array<bool, 8> word{};
    for (int f = 0; f < 3; ++f) word[static_cast<std::size_t>(f)] = fruit && (bits & (16 << f));
    for (int f = 3; f < 5; ++f)
      word[static_cast<std::size_t>(f)] = veg && rv && (bits & (16 << f));
    for (int f = 5; f < 8; ++f)
      word[static_cast<std::size_t>(f)] = veg && gl && (bits & (16 << f));
    bool any = false;
    for (bool w : word) any = any || w;
    if (!any) continue;
    accepted += 1;
    for (int f = 0; f < 8; ++f)
      if (word[static_cast<std::size_t>(f)]) law.p_word[static_cast<std::size_t>(f)] += 1;
    if (fruit) law.p_label1 += 1;
  }
  for (double& p : law.p_word) p /= accepted;
  law.p_label1 /= accepted;
  return law;
}

}  // namespace

TEST_CASE("produce documents: shape, determinism, and structural facts") {
  SyntheticBundle b = gen_hier_docs(50, 7);
  REQUIRE(b.X.rows() == 50);
  REQUIRE(b.X.cols() == 8);
  REQUIRE(b.labels.has_value());
  REQUIRE(b.labels->labels.size() == 50);
  CHECK(b.X.col_ids == std::vector<std::string>{"apple", "orange", "banana", "carrot",
                                                "beetroot", "kale", "spinach", "lettuce"});
  CHECK(b.X.row_ids.front() == "doc1");

  for (Eigen::Index i = 0; i < 50; ++i) {
    CHECK(b.X.values.row(i).sum() > 0);  // all-zero draws were rejected
    for (Eigen::Index j = 0; j < 8; ++j)
      CHECK((b.X.values(i, j) == 0.0 || b.X.values(i, j) == 1.0));
    int label = b.labels->labels[static_cast<std::size_t>(i)];
    CHECK((label == 0 || label == 1));
    // any visible fruit word implies the fruit branch, hence label 1
    if (b.X.values.row(i).head(3).sum() > 0) CHECK(label == 1);
    // label 0 samples carry vegetable words only
    if (label == 0) CHECK(b.X.values.row(i).head(3).sum() == 0.0);
  }

  SyntheticBundle again = gen_hier_docs(50, 7);
  CHECK(again.X.values == b.X.values);
  CHECK(again.labels->labels == b.labels->labels);
  SyntheticBundle other = gen_hier_docs(50, 8);
  CHECK(other.X.values != b.X.values);
}

TEST_CASE("produce truth tree wires words to the category cascade") {
  SyntheticBundle b = gen_hier_docs(3, 1);
  REQUIRE(b.truth.size() == 13);
  CHECK(b.truth.root() == 0);
  CHECK(b.truth_node_names[0] == "produce");
  REQUIRE(b.feature_nodes.size() == 8);
  // feature j lives at the truth node bearing the same name
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(b.truth_node_names[static_cast<std::size_t>(b.feature_nodes[j])] ==
          b.X.col_ids[j]);
  // every word node hangs two edges below the root (category in between)
  for (int node : b.feature_nodes) {
    int cat = b.truth.parent(node);
    CHECK(cat > 0);
    CHECK(tree_shortest_path(b.truth, node, 0) >= 2.0);
  }
  // apple and orange are siblings; apple and carrot are not
  CHECK(b.truth.parent(b.feature_nodes[0]) == b.truth.parent(b.feature_nodes[1]));
  CHECK(b.truth.parent(b.feature_nodes[0]) != b.truth.parent(b.feature_nodes[3]));
}

TEST_CASE("produce word frequencies match the exact enumeration law") {
  CascadeLaw law = enumerate_cascade();
  // frozen exact values of the conditioned law
  CHECK(law.p_word[0] == doctest::Approx(1024.0 / 2539.0).epsilon(1e-12));
  CHECK(law.p_label1 == doctest::Approx(1875.0 / 2539.0).epsilon(1e-12));

  const Eigen::Index n = 40000;
  SyntheticBundle b = gen_hier_docs(n, 123);
  for (std::size_t j = 0; j < 8; ++j) {
    double freq = b.X.values.col(static_cast<Eigen::Index>(j)).sum() /
                  static_cast<double>(n);
    // ~6 standard errors at this n
    CHECK(std::abs(freq - law.p_word[j]) < 0.015);
  }
  double label_freq = 0;
  for (int l : b.labels->labels) label_freq += l;
  CHECK(std::abs(label_freq / static_cast<double>(n) - law.p_label1) < 0.015);
}

TEST_CASE("tree gaussians: shape, nonnegativity, mean, and covariance") {
  const Eigen::Index n = 20000;
  SyntheticBundle b = gen_tree_gaussians(n, 31);
  REQUIRE(b.X.rows() == n);
  REQUIRE(b.X.cols() == 15);
  CHECK_FALSE(b.labels.has_value());
  CHECK(b.X.col_ids.front() == "v1");
  CHECK(b.X.row_ids.front() == "s1");
  CHECK((b.X.values.array() >= 0).all());

  REQUIRE(b.truth.size() == 15);
  for (int v = 1; v < 15; ++v) {
    CHECK(b.truth.parent(v) == (v - 1) / 2);
    CHECK(b.truth.parent_edge_weight(v) == 1.0);
  }

  // Laplacian pseudo-inverse of the balanced tree, computed independently
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(15, 15);
  for (int v = 1; v < 15; ++v) {
    A(v, (v - 1) / 2) = 1;
    A((v - 1) / 2, v) = 1;
  }
  Eigen::MatrixXd L = Eigen::MatrixXd(A.rowwise().sum().asDiagonal()) - A;
  Eigen::MatrixXd Lp = L.completeOrthogonalDecomposition().pseudoInverse();

  Eigen::RowVectorXd mean = b.X.values.colwise().mean();
  for (Eigen::Index v = 0; v < 15; ++v) CHECK(std::abs(mean(v) - 5.0) < 0.5);

  Eigen::MatrixXd centered = b.X.values.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  // rejection of negative draws perturbs the law slightly; demand the
  // covariance be L+-shaped, not exactly L+
  double rel = (cov - Lp).norm() / Lp.norm();
  CHECK(rel < 0.35);
  Eigen::Map<Eigen::VectorXd> cv(cov.data(), cov.size());
  Eigen::Map<Eigen::VectorXd> lv(Lp.data(), Lp.size());
  double corr = (cv.array() - cv.mean()).matrix().normalized().dot(
      (lv.array() - lv.mean()).matrix().normalized());
  CHECK(corr > 0.95);

  SyntheticBundle again = gen_tree_gaussians(100, 31);
  CHECK(again.X.values == gen_tree_gaussians(100, 31).X.values);
}

TEST_CASE("general tree newick serialization") {
  SyntheticBundle b = gen_hier_docs(1, 2);
  std::string nwk = general_tree_to_newick(b.truth, b.truth_node_names);
  CHECK(nwk.front() == '(');
  CHECK(nwk.back() == ';');
  for (const auto& name : b.truth_node_names)
    CHECK(nwk.find(name) != std::string::npos);
  CHECK(nwk.find(":1") != std::string::npos);
  CHECK_THROWS_AS(gen_hier_docs(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_tree_gaussians(0, 1), std::invalid_argument);
}
