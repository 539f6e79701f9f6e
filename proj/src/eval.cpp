#include "ltwd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ltwd/util.hpp"

namespace ltwd {

KnnReport knn_accuracy(const DistanceMatrixOut& W, const LabelVector& labels,
                       const std::vector<int>& ks, double split, int repeats,
                       std::uint64_t seed) {
  const Eigen::Index n = W.W.rows();
  if (W.W.cols() != n) throw std::invalid_argument("distance matrix must be square");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("label count does not match matrix size");
  if (split <= 0 || split >= 1) throw std::invalid_argument("split must lie in (0,1)");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");

  const Eigen::Index train_size =
      static_cast<Eigen::Index>(std::ceil(split * static_cast<double>(n)));
  if (train_size >= n) throw std::invalid_argument("split leaves no test samples");

  std::vector<std::vector<double>> acc_per_k(ks.size());
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  for (int rep = 0; rep < repeats; ++rep) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Eigen::Index> train(perm.begin(), perm.begin() + train_size);
    std::vector<Eigen::Index> test(perm.begin() + train_size, perm.end());

    std::vector<std::vector<int>> correct(ks.size());
    for (auto& c : correct) c.assign(test.size(), 0);

    parallel_for(static_cast<long>(test.size()), [&](long ti) {
      Eigen::Index q = test[static_cast<std::size_t>(ti)];
      std::vector<std::pair<double, Eigen::Index>> neighbors;
      neighbors.reserve(train.size());
      for (Eigen::Index t : train) neighbors.emplace_back(W.W(q, t), t);
      std::sort(neighbors.begin(), neighbors.end());

      for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        int k = ks[ki];
        if (k >= static_cast<int>(train.size())) continue;
        std::map<int, std::pair<int, double>> votes;  // class -> (count, dist sum)
        for (int i = 0; i < k; ++i) {
          int cls = labels.labels[static_cast<std::size_t>(neighbors[static_cast<std::size_t>(i)].second)];
          auto& v = votes[cls];
          v.first += 1;
          v.second += neighbors[static_cast<std::size_t>(i)].first;
        }
        int best_cls = -1;
        int best_count = -1;
        double best_sum = 0;
        for (const auto& [cls, v] : votes) {
          bool better = v.first > best_count ||
                        (v.first == best_count && v.second < best_sum);
          // map iterates ascending class id, so equal (count, sum) keeps
          // the smaller class
          if (better) {
            best_cls = cls;
            best_count = v.first;
            best_sum = v.second;
          }
        }
        if (best_cls == labels.labels[static_cast<std::size_t>(q)])
          correct[ki][static_cast<std::size_t>(ti)] = 1;
      }
    });

    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      if (ks[ki] >= static_cast<int>(train.size())) continue;
      double acc = std::accumulate(correct[ki].begin(), correct[ki].end(), 0.0) /
                   static_cast<double>(test.size());
      acc_per_k[ki].push_back(acc);
    }
  }

  KnnReport report;
  report.split_fraction = split;
  report.repeat_count = repeats;
  report.seed = seed;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    KnnReport::PerK row;
    row.k = ks[ki];
    if (acc_per_k[ki].empty()) {
      row.skipped = true;
    } else {
      double mean = std::accumulate(acc_per_k[ki].begin(), acc_per_k[ki].end(), 0.0) /
                    static_cast<double>(acc_per_k[ki].size());
      double var = 0;
      for (double a : acc_per_k[ki]) var += (a - mean) * (a - mean);
      var /= static_cast<double>(acc_per_k[ki].size());
      row.accuracy_mean = mean;
      row.accuracy_std = std::sqrt(var);
    }
    report.per_k.push_back(row);
  }
  auto best = std::max_element(report.per_k.begin(), report.per_k.end(),
                               [](const KnnReport::PerK& a, const KnnReport::PerK& b) {
                                 double av = a.skipped ? -1 : a.accuracy_mean;
                                 double bv = b.skipped ? -1 : b.accuracy_mean;
                                 return av < bv;
                               });
  if (best == report.per_k.end() || best->skipped)
    throw std::invalid_argument("every k was skipped (k >= train size)");
  report.best_k = best->k;
  report.best_accuracy_mean = best->accuracy_mean;
  report.best_accuracy_std = best->accuracy_std;
  return report;
}

double frobenius_discrepancy(const DistanceMatrixOut& W_hat,
                             const DistanceMatrixOut& W_true) {
  if (W_hat.W.rows() != W_true.W.rows() || W_hat.W.cols() != W_true.W.cols())
    throw std::invalid_argument("shape mismatch");
  double denom = W_true.W.norm();
  double num = (W_hat.W - W_true.W).norm();
  if (denom == 0) return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

WeightedBinaryTree random_binary_tree(Eigen::Index m, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("need at least 2 leaves");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  WeightedBinaryTree t;
  t.num_leaves = m;
  t.nodes.resize(static_cast<std::size_t>(2 * m - 1));
  std::vector<int> active(static_cast<std::size_t>(m));
  std::iota(active.begin(), active.end(), 0);
  int next_id = static_cast<int>(m);
  while (active.size() > 1) {
    std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
    std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    int ca = active[a], cb = active[b];
    double h = std::max(t.nodes[static_cast<std::size_t>(ca)].height,
                        t.nodes[static_cast<std::size_t>(cb)].height) +
               unif(rng);
    auto& node = t.nodes[static_cast<std::size_t>(next_id)];
    node.children = {ca, cb};
    node.height = h;
    for (int c : {ca, cb}) {
      t.nodes[static_cast<std::size_t>(c)].parent = next_id;
      t.nodes[static_cast<std::size_t>(c)].parent_edge_weight =
          h - t.nodes[static_cast<std::size_t>(c)].height;
    }
    if (a > b) std::swap(a, b);
    active.erase(active.begin() + static_cast<long>(b));
    active[a] = next_id;
    ++next_id;
  }
  t.root_id = next_id - 1;
  return t;
}

std::vector<BenchRow> bench_twd(const std::vector<Eigen::Index>& m_values,
                                int pair_count, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (Eigen::Index m : m_values) {
    WeightedBinaryTree t = random_binary_tree(m, rng());
    Eigen::VectorXd x(m), y(m);
    std::vector<double> times;
    for (int p = 0; p < pair_count; ++p) {
      for (Eigen::Index j = 0; j < m; ++j) {
        x(j) = expo(rng);
        y(j) = expo(rng);
      }
      x /= x.sum();
      y /= y.sum();
      long reps = std::max<long>(1, 200000 / m);
      volatile double sink = 0;
      auto start = std::chrono::steady_clock::now();
      for (long r = 0; r < reps; ++r) sink = sink + twd_pair(t, x, y);
      auto stop = std::chrono::steady_clock::now();
      double secs = std::chrono::duration<double>(stop - start).count() /
                    static_cast<double>(reps);
      times.push_back(secs);
    }
    std::sort(times.begin(), times.end());
    rows.push_back({m, times[times.size() / 2]});
  }
  return rows;
}

double loglog_slope(const std::vector<BenchRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    double x = std::log(static_cast<double>(r.m));
    double y = std::log(r.median_seconds_per_pair);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void save_knn_report_csv(const KnnReport& report, const std::string& path,
                         const std::vector<std::string>& header) {
  atomic_write_file(path, [&](std::ostream& out) {
    for (const auto& h : header) out << "# " << h << "\n";
    out << "k,accuracy_mean,accuracy_std,skipped\n";
    out.precision(17);
    for (const auto& row : report.per_k)
      out << row.k << ',' << row.accuracy_mean << ',' << row.accuracy_std << ','
          << (row.skipped ? 1 : 0) << "\n";
  });
}

std::string knn_report_text(const KnnReport& report) {
  std::ostringstream out;
  out.precision(4);
  out << "kNN evaluation: split " << report.split_fraction << ", "
      << report.repeat_count << " repeats, seed " << report.seed << "\n";
  for (const auto& row : report.per_k) {
    if (row.skipped)
      out << "  k=" << row.k << ": skipped (k >= train size)\n";
    else
      out << "  k=" << row.k << ": " << row.accuracy_mean << " +/- "
          << row.accuracy_std << "\n";
  }
  out << "best: k=" << report.best_k << " accuracy " << report.best_accuracy_mean
      << " +/- " << report.best_accuracy_std << "\n";
  return out.str();
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman needs two equal-length series");
  std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace ltwd
