#include "ltwd/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ltwd/util.hpp"

namespace ltwd {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

struct ScoredPair {
  double key;
  int j, j2;
};

// Shared merge sweep: pairs sorted ascending by (key, j, j2); each effective
// merge creates an internal node at half the pair's merge distance, clamped
// so heights never decrease toward the root.
WeightedBinaryTree sweep_merge(Eigen::Index m, std::vector<ScoredPair> pairs,
                               const std::function<double(int, int)>& merge_dist) {
  std::sort(pairs.begin(), pairs.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.j != b.j) return a.j < b.j;
    return a.j2 < b.j2;
  });

  WeightedBinaryTree t;
  t.num_leaves = m;
  t.nodes.resize(static_cast<std::size_t>(2 * m - 1));

  UnionFind uf(static_cast<int>(m));
  std::vector<int> comp_root(static_cast<std::size_t>(m));
  std::iota(comp_root.begin(), comp_root.end(), 0);

  int next_id = static_cast<int>(m);
  for (const auto& p : pairs) {
    int ra = uf.find(p.j), rb = uf.find(p.j2);
    if (ra == rb) continue;
    int ca = comp_root[static_cast<std::size_t>(ra)];
    int cb = comp_root[static_cast<std::size_t>(rb)];
    double h = 0.5 * merge_dist(p.j, p.j2);
    h = std::max({h, t.nodes[static_cast<std::size_t>(ca)].height,
                  t.nodes[static_cast<std::size_t>(cb)].height});
    auto& node = t.nodes[static_cast<std::size_t>(next_id)];
    node.children = {ca, cb};
    node.height = h;
    for (int c : {ca, cb}) {
      t.nodes[static_cast<std::size_t>(c)].parent = next_id;
      t.nodes[static_cast<std::size_t>(c)].parent_edge_weight =
          h - t.nodes[static_cast<std::size_t>(c)].height;
    }
    uf.unite(ra, rb);
    comp_root[static_cast<std::size_t>(uf.find(ra))] = next_id;
    ++next_id;
    if (next_id == static_cast<int>(2 * m - 1)) break;
  }
  t.root_id = next_id - 1;
  return t;
}

std::vector<ScoredPair> all_pairs(Eigen::Index m) {
  std::vector<ScoredPair> pairs;
  pairs.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (int j = 0; j < m; ++j)
    for (int j2 = j + 1; j2 < m; ++j2) pairs.push_back({0.0, j, j2});
  return pairs;
}

}  // namespace

std::string WeightedBinaryTree::leaf_name(Eigen::Index j) const {
  if (!leaf_names.empty()) return leaf_names[static_cast<std::size_t>(j)];
  return "f" + std::to_string(j + 1);
}

void WeightedBinaryTree::validate() const {
  const Eigen::Index m = num_leaves;
  if (m < 2) throw std::logic_error("tree needs at least 2 leaves");
  if (num_nodes() != 2 * m - 1) throw std::logic_error("node count must be 2m-1");
  if (root_id < 0 || root_id >= num_nodes()) throw std::logic_error("bad root id");
  if (nodes[static_cast<std::size_t>(root_id)].parent != -1)
    throw std::logic_error("root must have no parent");
  if (nodes[static_cast<std::size_t>(root_id)].parent_edge_weight != 0)
    throw std::logic_error("root parent edge weight must be 0");
  Eigen::Index leaves = 0;
  for (Eigen::Index v = 0; v < num_nodes(); ++v) {
    const auto& node = nodes[static_cast<std::size_t>(v)];
    if (node.is_leaf()) {
      ++leaves;
      if (v >= m) throw std::logic_error("leaf at non-leaf id");
    } else {
      for (int c : node.children) {
        const auto& child = nodes[static_cast<std::size_t>(c)];
        if (child.parent != static_cast<int>(v))
          throw std::logic_error("parent/child mismatch");
        if (child.parent_edge_weight < 0)
          throw std::logic_error("negative edge weight");
        if (child.height > node.height + 1e-12)
          throw std::logic_error("heights not monotone");
      }
    }
    if (node.parent == -1 && v != root_id) throw std::logic_error("multiple roots");
  }
  if (leaves != m) throw std::logic_error("leaf count mismatch");
  if (!leaf_names.empty() && static_cast<Eigen::Index>(leaf_names.size()) != m)
    throw std::logic_error("leaf name count mismatch");
}

WeightedBinaryTree decode_tree(const MultiScaleEmbedding& emb) {
  const Eigen::Index m = emb.m;
  if (m < 2) throw std::invalid_argument("need at least 2 features to decode a tree");
  auto pairs = all_pairs(m);
  parallel_for(static_cast<long>(pairs.size()), [&](long i) {
    auto& p = pairs[static_cast<std::size_t>(i)];
    p.key = hd_lca_depth(emb, p.j, p.j2);
  });
  return sweep_merge(m, std::move(pairs), [&](int j, int j2) {
    return product_manifold_distance(emb, j, j2);
  });
}

WeightedBinaryTree decode_tree_single_scale(const MultiScaleEmbedding& emb, int k) {
  const Eigen::Index m = emb.m;
  if (m < 2) throw std::invalid_argument("need at least 2 features to decode a tree");
  if (k < 0 || k > emb.K_c) throw std::invalid_argument("scale out of range");
  auto pairs = all_pairs(m);
  parallel_for(static_cast<long>(pairs.size()), [&](long i) {
    auto& p = pairs[static_cast<std::size_t>(i)];
    p.key = lca_projection_at(emb, k, p.j, p.j2);
  });
  const double h = emb.scale_height(k);
  const Eigen::MatrixXd& psi = emb.psi[static_cast<std::size_t>(k)];
  return sweep_merge(m, std::move(pairs), [&](int j, int j2) {
    return 2.0 * std::asinh((psi.col(j) - psi.col(j2)).norm() / (2.0 * h));
  });
}

double tree_metric(const WeightedBinaryTree& t, Eigen::Index j, Eigen::Index j2) {
  if (j < 0 || j >= t.num_leaves || j2 < 0 || j2 >= t.num_leaves)
    throw std::out_of_range("leaf index out of range");
  if (j == j2) return 0;
  // cumulative distance from j to each of its ancestors
  std::vector<std::pair<int, double>> up;
  double acc = 0;
  for (int v = static_cast<int>(j); v != -1;
       v = t.nodes[static_cast<std::size_t>(v)].parent) {
    up.emplace_back(v, acc);
    acc += t.nodes[static_cast<std::size_t>(v)].parent_edge_weight;
  }
  acc = 0;
  for (int v = static_cast<int>(j2); v != -1;
       v = t.nodes[static_cast<std::size_t>(v)].parent) {
    for (const auto& [u, d] : up)
      if (u == v) return d + acc;
    acc += t.nodes[static_cast<std::size_t>(v)].parent_edge_weight;
  }
  throw std::logic_error("leaves share no ancestor");
}

SubtreeIndicator subtree_indicator(const WeightedBinaryTree& t) {
  SubtreeIndicator ind;
  ind.R = Eigen::MatrixXd::Zero(t.num_nodes(), t.num_leaves);
  ind.alpha.resize(t.num_nodes());
  for (Eigen::Index v = 0; v < t.num_nodes(); ++v)
    ind.alpha(v) = t.nodes[static_cast<std::size_t>(v)].parent_edge_weight;
  for (Eigen::Index j = 0; j < t.num_leaves; ++j)
    for (int v = static_cast<int>(j); v != -1;
         v = t.nodes[static_cast<std::size_t>(v)].parent)
      ind.R(v, j) = 1.0;
  return ind;
}

std::vector<std::vector<Eigen::Index>> leaf_sets(const WeightedBinaryTree& t) {
  std::vector<std::vector<Eigen::Index>> sets(static_cast<std::size_t>(t.num_nodes()));
  for (Eigen::Index j = 0; j < t.num_leaves; ++j)
    for (int v = static_cast<int>(j); v != -1;
         v = t.nodes[static_cast<std::size_t>(v)].parent)
      sets[static_cast<std::size_t>(v)].push_back(j);
  return sets;
}

namespace {

void write_newick(const WeightedBinaryTree& t, int v, std::ostream& out) {
  const auto& node = t.nodes[static_cast<std::size_t>(v)];
  if (node.is_leaf()) {
    out << t.leaf_name(v);
  } else {
    out << '(';
    write_newick(t, node.children[0], out);
    out << ',';
    write_newick(t, node.children[1], out);
    out << ')';
  }
  if (v != t.root_id) out << ':' << node.parent_edge_weight;
}

struct NewickParser {
  const std::string& text;
  std::size_t pos = 0;

  struct TempNode {
    std::string label;
    double weight = 0;
    std::vector<int> children;
  };
  std::vector<TempNode> nodes;

  explicit NewickParser(const std::string& s) : text(s) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("newick parse error at position " +
                             std::to_string(pos) + ": " + what);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    return text[pos];
  }

  std::string read_label() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && text[pos] != ':' && text[pos] != ',' &&
           text[pos] != ')' && text[pos] != '(' && text[pos] != ';' &&
           !std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    return text.substr(start, pos - start);
  }

  int parse_subtree() {
    int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (peek() == '(') {
      ++pos;
      // recursion may grow `nodes`; take the child id before indexing
      int child = parse_subtree();
      nodes[static_cast<std::size_t>(id)].children.push_back(child);
      while (peek() == ',') {
        ++pos;
        child = parse_subtree();
        nodes[static_cast<std::size_t>(id)].children.push_back(child);
      }
      if (peek() != ')') fail("expected ')'");
      ++pos;
      read_label();  // internal labels are permitted and ignored
    } else {
      nodes[static_cast<std::size_t>(id)].label = read_label();
      if (nodes[static_cast<std::size_t>(id)].label.empty()) fail("expected a leaf name");
    }
    skip_ws();
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      skip_ws();
      std::size_t consumed = 0;
      double w;
      try {
        w = std::stod(text.substr(pos), &consumed);
      } catch (const std::exception&) {
        fail("expected a branch length");
      }
      pos += consumed;
      nodes[static_cast<std::size_t>(id)].weight = w;
    }
    return id;
  }

  int parse() {
    int root = parse_subtree();
    if (peek() != ';') fail("expected ';'");
    ++pos;
    skip_ws();
    if (pos != text.size()) fail("trailing characters after ';'");
    return root;
  }
};

}  // namespace

std::string to_newick(const WeightedBinaryTree& t) {
  std::ostringstream out;
  out << std::setprecision(17);
  write_newick(t, t.root_id, out);
  out << ';';
  return out.str();
}

WeightedBinaryTree from_newick(const std::string& text) {
  NewickParser parser(text);
  int temp_root = parser.parse();

  // collect leaves in encounter order and post-order internal nodes
  std::vector<int> temp_leaves, post;
  {
    std::vector<std::pair<int, bool>> stack{{temp_root, false}};
    while (!stack.empty()) {
      auto [v, expanded] = stack.back();
      stack.pop_back();
      const auto& node = parser.nodes[static_cast<std::size_t>(v)];
      if (node.children.empty()) {
        temp_leaves.push_back(v);
        continue;
      }
      if (node.children.size() != 2)
        throw std::runtime_error("newick parse error: node with " +
                                 std::to_string(node.children.size()) +
                                 " children, expected a binary tree");
      if (expanded) {
        post.push_back(v);
      } else {
        stack.emplace_back(v, true);
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
          stack.emplace_back(*it, false);
      }
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(temp_leaves.size());
  if (m < 2) throw std::runtime_error("newick parse error: fewer than 2 leaves");

  // leaves named f1..fm keep their numeric positions, anything else keeps
  // encounter order
  std::vector<Eigen::Index> leaf_slot(temp_leaves.size());
  bool canonical = true;
  std::vector<bool> seen(temp_leaves.size(), false);
  for (std::size_t i = 0; i < temp_leaves.size() && canonical; ++i) {
    const std::string& name = parser.nodes[static_cast<std::size_t>(temp_leaves[i])].label;
    long num = -1;
    if (name.size() > 1 && name[0] == 'f') {
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), num);
      if (ec != std::errc() || ptr != name.data() + name.size()) num = -1;
    }
    if (num < 1 || num > static_cast<long>(m) || seen[static_cast<std::size_t>(num - 1)])
      canonical = false;
    else {
      seen[static_cast<std::size_t>(num - 1)] = true;
      leaf_slot[i] = num - 1;
    }
  }
  if (!canonical) std::iota(leaf_slot.begin(), leaf_slot.end(), 0);

  WeightedBinaryTree t;
  t.num_leaves = m;
  t.nodes.resize(static_cast<std::size_t>(2 * m - 1));
  t.leaf_names.resize(static_cast<std::size_t>(m));

  std::vector<int> new_id(parser.nodes.size(), -1);
  for (std::size_t i = 0; i < temp_leaves.size(); ++i) {
    new_id[static_cast<std::size_t>(temp_leaves[i])] = static_cast<int>(leaf_slot[i]);
    t.leaf_names[static_cast<std::size_t>(leaf_slot[i])] =
        parser.nodes[static_cast<std::size_t>(temp_leaves[i])].label;
  }
  int next = static_cast<int>(m);
  for (int v : post) new_id[static_cast<std::size_t>(v)] = next++;

  for (std::size_t v = 0; v < parser.nodes.size(); ++v) {
    if (new_id[v] < 0) continue;
    const auto& src = parser.nodes[v];
    auto& dst = t.nodes[static_cast<std::size_t>(new_id[v])];
    if (src.weight < 0)
      throw std::runtime_error("newick parse error: negative branch length");
    dst.parent_edge_weight = src.weight;
    for (std::size_t c = 0; c < src.children.size(); ++c) {
      int child = new_id[static_cast<std::size_t>(src.children[c])];
      dst.children[c] = child;
      t.nodes[static_cast<std::size_t>(child)].parent = new_id[v];
    }
  }
  t.root_id = new_id[static_cast<std::size_t>(temp_root)];
  t.nodes[static_cast<std::size_t>(t.root_id)].parent_edge_weight = 0;

  // rebuild heights bottom-up; newick carries only branch lengths
  for (int v : post) {
    auto& node = t.nodes[static_cast<std::size_t>(new_id[static_cast<std::size_t>(v)])];
    node.height = 0;
    for (int c : node.children) {
      const auto& child = t.nodes[static_cast<std::size_t>(c)];
      node.height = std::max(node.height, child.height + child.parent_edge_weight);
    }
  }
  t.validate();
  return t;
}

void save_newick(const WeightedBinaryTree& t, const std::string& path,
                 const std::vector<std::string>& header) {
  atomic_write_file(path, [&](std::ostream& out) {
    for (const auto& h : header) out << "# " << h << "\n";
    out << to_newick(t) << "\n";
  });
}

WeightedBinaryTree load_newick(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string text, line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    text += line;
  }
  return from_newick(text);
}

}  // namespace ltwd
