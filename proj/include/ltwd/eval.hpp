#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltwd/datamodel.hpp"
#include "ltwd/twd.hpp"

namespace ltwd {

struct KnnReport {
  struct PerK {
    int k = 0;
    double accuracy_mean = 0;
    double accuracy_std = 0;
    bool skipped = false;  // k >= train size
  };
  std::vector<PerK> per_k;
  int best_k = 0;
  double best_accuracy_mean = 0;
  double best_accuracy_std = 0;
  double split_fraction = 0;
  int repeat_count = 0;
  std::uint64_t seed = 0;
};

// kNN over a precomputed distance matrix with random train/test splits.
// Vote ties break by smaller summed distance, then smaller class id.
// "Best" is the k with the highest mean accuracy across repeats.
KnnReport knn_accuracy(const DistanceMatrixOut& W, const LabelVector& labels,
                       const std::vector<int>& ks = {1, 3, 5, 7, 9, 11, 13, 15, 17, 19},
                       double split = 0.7, int repeats = 5, std::uint64_t seed = 0);

// |W_hat - W_true|_F / |W_true|_F; 0 when both are all-zero.
double frobenius_discrepancy(const DistanceMatrixOut& W_hat,
                             const DistanceMatrixOut& W_true);

// Uniform random merge topology with increasing heights; used by the
// benchmark and by property tests.
WeightedBinaryTree random_binary_tree(Eigen::Index m, std::uint64_t seed);

struct BenchRow {
  Eigen::Index m = 0;
  double median_seconds_per_pair = 0;
};

// Median twd_pair wall time on random trees/histograms per feature count.
std::vector<BenchRow> bench_twd(const std::vector<Eigen::Index>& m_values,
                                int pair_count, std::uint64_t seed = 0);

// Least-squares slope of log(time) vs log(m).
double loglog_slope(const std::vector<BenchRow>& rows);

void save_knn_report_csv(const KnnReport& report, const std::string& path,
                         const std::vector<std::string>& header = {});
std::string knn_report_text(const KnnReport& report);

// Spearman rank correlation with average ranks over ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ltwd
