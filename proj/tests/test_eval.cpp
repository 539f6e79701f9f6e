#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "ltwd/eval.hpp"

using namespace ltwd;

namespace {

// two well-separated clusters: intra distance ~0, inter distance ~1
DistanceMatrixOut clustered_matrix(Eigen::Index per_class, double noise,
                                   std::uint64_t seed, LabelVector* labels) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(0.0, noise);
  const Eigen::Index n = 2 * per_class;
  DistanceMatrixOut W;
  W.W = Eigen::MatrixXd::Zero(n, n);
  labels->labels.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = per_class; i < n; ++i)
    labels->labels[static_cast<std::size_t>(i)] = 1;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      bool same = (i < per_class) == (j < per_class);
      double d = (same ? 0.0 : 1.0) + jitter(rng);
      W.W(i, j) = d;
      W.W(j, i) = d;
    }
  for (Eigen::Index i = 0; i < n; ++i) W.sample_ids.push_back("s" + std::to_string(i));
  return W;
}

}  // namespace

TEST_CASE("knn reaches perfect accuracy on separated clusters") {
  LabelVector labels;
  DistanceMatrixOut W = clustered_matrix(20, 0.05, 5, &labels);
  KnnReport report = knn_accuracy(W, labels, {1, 3, 5}, 0.7, 3, 11);
  CHECK(report.best_accuracy_mean == 1.0);
  CHECK(report.best_accuracy_std == 0.0);
  CHECK(report.per_k.size() == 3);
  for (const auto& row : report.per_k) {
    CHECK_FALSE(row.skipped);
    CHECK(row.accuracy_mean == 1.0);
  }
  // deterministic for a fixed seed
  KnnReport again = knn_accuracy(W, labels, {1, 3, 5}, 0.7, 3, 11);
  CHECK(again.best_k == report.best_k);
  CHECK(again.per_k[1].accuracy_mean == report.per_k[1].accuracy_mean);
}

TEST_CASE("knn vote ties break toward the smaller summed distance") {
  // 4 samples, labels 0,0,1,1; whichever sample lands in the test fold,
  // its k=2 neighbors are its same-class partner (closer) and one
  // cross-class sample, a 1-1 vote. Accuracy 1.0 on every split iff the
  // tie goes to the class with the smaller distance sum.
  DistanceMatrixOut W;
  W.W = Eigen::MatrixXd::Zero(4, 4);
  auto set = [&](Eigen::Index i, Eigen::Index j, double d) {
    W.W(i, j) = d;
    W.W(j, i) = d;
  };
  set(0, 1, 0.3);
  set(2, 3, 0.3);
  set(0, 2, 0.5);
  set(0, 3, 0.7);
  set(1, 2, 0.7);
  set(1, 3, 0.5);
  for (Eigen::Index i = 0; i < 4; ++i) W.sample_ids.push_back("s" + std::to_string(i));
  LabelVector labels;
  labels.labels = {0, 0, 1, 1};
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    KnnReport r = knn_accuracy(W, labels, {2}, 0.7, 1, seed);
    CHECK(r.per_k[0].accuracy_mean == 1.0);
  }
}

TEST_CASE("knn skips oversized k and validates input") {
  LabelVector labels;
  DistanceMatrixOut W = clustered_matrix(3, 0.01, 2, &labels);  // n=6, train 5
  KnnReport r = knn_accuracy(W, labels, {1, 9}, 0.7, 2, 3);
  CHECK_FALSE(r.per_k[0].skipped);
  CHECK(r.per_k[1].skipped);
  CHECK(r.best_k == 1);

  CHECK_THROWS_AS(knn_accuracy(W, labels, {9}, 0.7, 2, 3), std::invalid_argument);
  LabelVector bad;
  bad.labels = {0, 1};
  CHECK_THROWS_AS(knn_accuracy(W, bad), std::invalid_argument);
  CHECK_THROWS_AS(knn_accuracy(W, labels, {1}, 1.5, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(knn_accuracy(W, labels, {1}, 0.7, 0, 3), std::invalid_argument);
}

TEST_CASE("frobenius discrepancy hand values") {
  DistanceMatrixOut A, B;
  A.W = Eigen::MatrixXd::Zero(2, 2);
  B.W = Eigen::MatrixXd::Zero(2, 2);
  CHECK(frobenius_discrepancy(A, B) == 0.0);
  B.W << 3, 0, 0, 4;
  A.W << 0, 0, 0, 0;
  CHECK(frobenius_discrepancy(A, B) == doctest::Approx(1.0).epsilon(1e-15));
  A.W << 3, 0, 0, 0;
  // |diff| = 4, |B| = 5
  CHECK(frobenius_discrepancy(A, B) == doctest::Approx(0.8).epsilon(1e-15));
  DistanceMatrixOut C;
  C.W = Eigen::MatrixXd::Zero(3, 3);
  CHECK_THROWS_AS(frobenius_discrepancy(A, C), std::invalid_argument);
}

TEST_CASE("random binary trees are valid and deterministic") {
  WeightedBinaryTree t = random_binary_tree(17, 42);
  t.validate();
  CHECK(t.num_leaves == 17);
  WeightedBinaryTree u = random_binary_tree(17, 42);
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    CHECK(t.nodes[v].parent == u.nodes[v].parent);
    CHECK(t.nodes[v].height == u.nodes[v].height);
  }
  CHECK_THROWS_AS(random_binary_tree(1, 0), std::invalid_argument);
}

TEST_CASE("loglog slope recovers an exact power law") {
  std::vector<BenchRow> rows;
  for (Eigen::Index m : {16, 32, 64, 128})
    rows.push_back({m, 3e-9 * static_cast<double>(m)});
  CHECK(loglog_slope(rows) == doctest::Approx(1.0).epsilon(1e-12));
  for (auto& r : rows) r.median_seconds_per_pair *= r.median_seconds_per_pair;
  CHECK(loglog_slope(rows) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({rows[0]}), std::invalid_argument);
}

TEST_CASE("bench produces positive timings per requested size") {
  auto rows = bench_twd({16, 64}, 3, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].m == 16);
  CHECK(rows[1].m == 64);
  for (const auto& r : rows) CHECK(r.median_seconds_per_pair > 0);
}

TEST_CASE("spearman correlation on hand series") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0).epsilon(1e-15));
  // monotone transform leaves ranks alone
  CHECK(spearman({1, 2, 3, 4}, {1, 4, 9, 16}) == doctest::Approx(1.0).epsilon(1e-15));
  // tied pair averages ranks: series (1,2,2,3) vs (1,2,3,4)
  // ranks a = 1, 2.5, 2.5, 4; b = 1,2,3,4 -> corr = cov/sqrt(va*vb)
  double expected = 4.5 / std::sqrt(4.5 * 5.0);
  CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(expected).epsilon(1e-13));
  CHECK_THROWS_AS(spearman({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("knn report serialization") {
  LabelVector labels;
  DistanceMatrixOut W = clustered_matrix(10, 0.02, 9, &labels);
  KnnReport r = knn_accuracy(W, labels, {1, 3}, 0.7, 2, 1);
  std::string path = "/tmp/ltwd_knn_report.csv";
  save_knn_report_csv(r, path, {"meta line"});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# meta line");
  std::getline(in, line);
  CHECK(line == "k,accuracy_mean,accuracy_std,skipped");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "1,");

  std::string text = knn_report_text(r);
  CHECK(text.find("best: k=") != std::string::npos);
  CHECK(text.find("k=3") != std::string::npos);
}
