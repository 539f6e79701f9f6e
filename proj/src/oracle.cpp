#include "ltwd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ltwd {

GeneralTree::GeneralTree(std::vector<int> parent, std::vector<double> weight)
    : parent_(std::move(parent)), weight_(std::move(weight)) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("empty tree");
  if (weight_.size() != parent_.size())
    throw std::invalid_argument("parent/weight size mismatch");
  children_.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    int p = parent_[static_cast<std::size_t>(v)];
    if (p == -1) {
      if (root_ != -1) throw std::invalid_argument("multiple roots");
      root_ = v;
      continue;
    }
    if (p < 0 || p >= n) throw std::invalid_argument("parent index out of range");
    if (weight_[static_cast<std::size_t>(v)] < 0)
      throw std::invalid_argument("negative edge weight");
    children_[static_cast<std::size_t>(p)].push_back(v);
  }
  if (root_ == -1) throw std::invalid_argument("no root");
  // reachability from the root proves connectivity (and hence acyclicity)
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{root_};
  int count = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(v)]) throw std::invalid_argument("cycle in tree");
    seen[static_cast<std::size_t>(v)] = true;
    ++count;
    for (int c : children_[static_cast<std::size_t>(v)]) stack.push_back(c);
  }
  if (count != n) throw std::invalid_argument("disconnected tree");
}

GeneralTree GeneralTree::from_binary(const WeightedBinaryTree& t) {
  std::vector<int> parent(t.nodes.size());
  std::vector<double> weight(t.nodes.size());
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    parent[v] = t.nodes[v].parent;
    weight[v] = t.nodes[v].parent_edge_weight;
  }
  return GeneralTree(std::move(parent), std::move(weight));
}

Eigen::MatrixXd GeneralTree::metric_matrix() const {
  const int n = size();
  Eigen::MatrixXd D(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) D(u, v) = tree_shortest_path(*this, u, v);
  return D;
}

double exact_ot(const Eigen::MatrixXd& C, const Eigen::VectorXd& mu,
                const Eigen::VectorXd& nu) {
  const int ns = static_cast<int>(mu.size());
  const int nd = static_cast<int>(nu.size());
  if (C.rows() != ns || C.cols() != nd)
    throw std::invalid_argument("cost matrix shape does not match marginals");
  if (ns > 512 || nd > 512) throw std::invalid_argument("oracle scale exceeded (m <= 512)");
  if ((C.array() < 0).any()) throw std::invalid_argument("negative cost entry");
  if ((mu.array() < -1e-15).any() || (nu.array() < -1e-15).any())
    throw std::invalid_argument("negative mass in marginal");
  if (std::abs(mu.sum() - 1.0) > 1e-9 || std::abs(nu.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("marginals must sum to 1 within 1e-9");

  Eigen::VectorXd supply = mu.cwiseMax(0.0);
  Eigen::VectorXd demand = nu.cwiseMax(0.0);
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(ns, nd);

  // Successive shortest paths with Johnson potentials on the bipartite
  // residual graph. Nodes: 0..ns-1 supplies, ns..ns+nd-1 demands.
  const int V = ns + nd;
  std::vector<double> pot(static_cast<std::size_t>(V), 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  const double mass_eps = 1e-15;

  while (supply.sum() > mass_eps && demand.sum() > mass_eps) {
    std::vector<double> dist(static_cast<std::size_t>(V), inf);
    std::vector<int> prev(static_cast<std::size_t>(V), -1);
    std::vector<bool> done(static_cast<std::size_t>(V), false);
    for (int i = 0; i < ns; ++i)
      if (supply(i) > mass_eps) dist[static_cast<std::size_t>(i)] = 0;

    for (;;) {
      int best = -1;
      double best_d = inf;
      for (int v = 0; v < V; ++v)
        if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best_d) {
          best = v;
          best_d = dist[static_cast<std::size_t>(v)];
        }
      if (best < 0) break;
      done[static_cast<std::size_t>(best)] = true;
      if (best < ns) {
        const int i = best;
        for (int j = 0; j < nd; ++j) {
          double rc = C(i, j) + pot[static_cast<std::size_t>(i)] -
                      pot[static_cast<std::size_t>(ns + j)];
          if (rc < 0) rc = 0;  // guard rounding
          double cand = best_d + rc;
          if (cand < dist[static_cast<std::size_t>(ns + j)]) {
            dist[static_cast<std::size_t>(ns + j)] = cand;
            prev[static_cast<std::size_t>(ns + j)] = i;
          }
        }
      } else {
        const int j = best - ns;
        for (int i = 0; i < ns; ++i) {
          if (flow(i, j) <= mass_eps) continue;
          double rc = -C(i, j) + pot[static_cast<std::size_t>(ns + j)] -
                      pot[static_cast<std::size_t>(i)];
          if (rc < 0) rc = 0;
          double cand = best_d + rc;
          if (cand < dist[static_cast<std::size_t>(i)]) {
            dist[static_cast<std::size_t>(i)] = cand;
            prev[static_cast<std::size_t>(i)] = ns + j;
          }
        }
      }
    }

    int target = -1;
    double target_d = inf;
    for (int j = 0; j < nd; ++j)
      if (demand(j) > mass_eps && dist[static_cast<std::size_t>(ns + j)] < target_d) {
        target = ns + j;
        target_d = dist[static_cast<std::size_t>(ns + j)];
      }
    if (target < 0) throw std::runtime_error("transportation LP infeasible");

    // path amount and source
    double amount = demand(target - ns);
    int v = target;
    while (prev[static_cast<std::size_t>(v)] != -1) {
      int u = prev[static_cast<std::size_t>(v)];
      if (v >= ns && u < ns) {
        // forward arc, unbounded
      } else {
        amount = std::min(amount, flow(v, u - ns));  // backward arc u=demand, v=supply
      }
      v = u;
    }
    amount = std::min(amount, supply(v));

    int src = v;
    v = target;
    while (prev[static_cast<std::size_t>(v)] != -1) {
      int u = prev[static_cast<std::size_t>(v)];
      if (v >= ns && u < ns)
        flow(u, v - ns) += amount;
      else
        flow(v, u - ns) -= amount;
      v = u;
    }
    supply(src) -= amount;
    demand(target - ns) -= amount;

    for (int w = 0; w < V; ++w)
      if (dist[static_cast<std::size_t>(w)] < inf)
        pot[static_cast<std::size_t>(w)] += dist[static_cast<std::size_t>(w)];
  }

  return (flow.array() * C.array()).sum();
}

double tw_reference(const GeneralTree& t, const Eigen::VectorXd& mu,
                    const Eigen::VectorXd& nu) {
  const int n = t.size();
  if (mu.size() != n || nu.size() != n)
    throw std::invalid_argument("distribution length must equal node count");
  if (std::abs(mu.sum() - 1.0) > 1e-9 || std::abs(nu.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("distributions must sum to 1 within 1e-9");

  // post-order via two stacks
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<int> stack{t.root()};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int c : t.children(v)) stack.push_back(c);
  }
  std::reverse(order.begin(), order.end());  // children now precede parents

  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  double total = 0;
  for (int v : order) {
    acc[static_cast<std::size_t>(v)] += mu(v) - nu(v);
    if (v != t.root()) {
      total += t.parent_edge_weight(v) * std::abs(acc[static_cast<std::size_t>(v)]);
      acc[static_cast<std::size_t>(t.parent(v))] += acc[static_cast<std::size_t>(v)];
    }
  }
  return total;
}

double tree_shortest_path(const GeneralTree& t, int u, int v) {
  if (u < 0 || u >= t.size() || v < 0 || v >= t.size())
    throw std::out_of_range("node index out of range");
  if (u == v) return 0;
  std::vector<std::pair<int, double>> up;
  double acc = 0;
  for (int w = u; w != -1; w = t.parent(w)) {
    up.emplace_back(w, acc);
    if (t.parent(w) != -1) acc += t.parent_edge_weight(w);
  }
  acc = 0;
  for (int w = v; w != -1; w = t.parent(w)) {
    for (const auto& [node, d] : up)
      if (node == w) return d + acc;
    if (t.parent(w) != -1) acc += t.parent_edge_weight(w);
  }
  throw std::logic_error("nodes share no ancestor");
}

double gromov_product(const GeneralTree& t, int j, int j2, int r) {
  return 0.5 * (tree_shortest_path(t, j, r) + tree_shortest_path(t, j2, r) -
                tree_shortest_path(t, j, j2));
}

namespace {

template <typename F>
double golden_section(F f, double lo, double hi, double tol) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

HalfSpacePoint frechet_mean_numeric(const std::vector<HalfSpacePoint>& points,
                                    FrechetConstraint constraint) {
  if (points.empty()) throw std::invalid_argument("no points");
  const Eigen::Index dim = points[0].dim();
  for (const auto& p : points) {
    if (p.dim() != dim) throw std::invalid_argument("mixed dimensions");
    if (p.height() <= 0) throw std::invalid_argument("point outside half-space");
  }
  if (constraint == FrechetConstraint::vertical_axis)
    for (const auto& p : points)
      if (p.coords.head(dim - 1).norm() > 1e-12)
        throw std::invalid_argument("vertical-axis mode requires on-axis points");
  if (points.size() == 1) return points[0];

  double h_min = std::numeric_limits<double>::infinity(), h_max = 0;
  for (const auto& p : points) {
    h_min = std::min(h_min, p.height());
    h_max = std::max(h_max, p.height());
  }

  if (constraint == FrechetConstraint::vertical_axis) {
    // on the axis the distance is |ln(h/h_i)|
    auto objective = [&](double log_h) {
      double obj = 0;
      for (const auto& p : points) {
        double d = log_h - std::log(p.height());
        obj += d * d;
      }
      return obj;
    };
    double log_h =
        golden_section(objective, std::log(h_min) - 1.0, std::log(h_max) + 1.0, 1e-12);
    HalfSpacePoint out;
    out.coords = Eigen::VectorXd::Zero(dim);
    out.coords(dim - 1) = std::exp(log_h);
    return out;
  }

  HalfSpacePoint h;
  h.coords = Eigen::VectorXd::Zero(dim);
  double span = 0;
  for (const auto& p : points) {
    h.coords += p.coords;
    for (const auto& q : points)
      span = std::max(span, (p.coords - q.coords).norm());
  }
  h.coords /= static_cast<double>(points.size());
  span = std::max(span, h_max);

  auto objective = [&](const HalfSpacePoint& z) {
    double obj = 0;
    for (const auto& p : points) {
      double d = halfspace_distance(z, p);
      obj += d * d;
    }
    return obj;
  };

  double prev_obj = objective(h);
  const int max_sweeps = 500;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index c = 0; c + 1 < dim; ++c) {
      double center = h.coords(c);
      h.coords(c) = golden_section(
          [&](double v) {
            h.coords(c) = v;
            return objective(h);
          },
          center - span - 1.0, center + span + 1.0, 1e-11);
    }
    // height coordinate searched in log-space to stay positive
    h.coords(dim - 1) = std::exp(golden_section(
        [&](double v) {
          h.coords(dim - 1) = std::exp(v);
          return objective(h);
        },
        std::log(h_min) - 4.0, std::log(h_max) + std::log(2.0 + span / h_max) + 2.0,
        1e-12));
    double obj = objective(h);
    if (prev_obj - obj < 1e-12 && sweep > 2) return h;
    prev_obj = obj;
  }
  throw std::runtime_error("frechet_mean_numeric failed to converge");
}

}  // namespace ltwd
