#pragma once

// Reference implementations and random inputs shared by the test suites.
// The oracles here are deliberately naive and share no code with the
// library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ged/cpm.hpp"
#include "ged/temporal.hpp"

namespace ged::test {

using NodeSet = std::vector<NodeId>;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

inline bool is_clique(const std::set<std::pair<NodeId, NodeId>>& adj, const NodeSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (!adj.count({s[i], s[j]})) return false;
  return true;
}

inline std::set<std::pair<NodeId, NodeId>> adjacency_pairs(const EdgeList& edges) {
  std::set<std::pair<NodeId, NodeId>> adj;
  for (const auto& [x, y] : edges) {
    if (x == y) continue;
    adj.insert({x, y});
    adj.insert({y, x});
  }
  return adj;
}

/// Maximal cliques by checking every subset of the node list.
inline std::vector<NodeSet> brute_force_maximal_cliques(const NodeSet& nodes, const EdgeList& edges) {
  const auto adj = adjacency_pairs(edges);
  std::vector<NodeSet> out;
  const std::size_t n = nodes.size();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    NodeSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(nodes[i]);
    if (!is_clique(adj, s)) continue;
    bool maximal = true;
    for (std::size_t i = 0; i < n && maximal; ++i) {
      if (mask & (1u << i)) continue;
      auto bigger = s;
      bigger.push_back(nodes[i]);
      if (is_clique(adj, bigger)) maximal = false;
    }
    if (maximal) {
      std::sort(s.begin(), s.end());
      out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline void k_subsets(const NodeSet& nodes, std::size_t k, std::size_t start, NodeSet& cur, std::vector<NodeSet>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < nodes.size(); ++i) {
    cur.push_back(nodes[i]);
    k_subsets(nodes, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/// k-clique percolation straight from the definition: every k-clique, the
/// "share k-1 nodes" adjacency between them, connected components.
inline std::vector<NodeSet> brute_force_cpm(const NodeSet& nodes, const EdgeList& edges, std::size_t k) {
  const auto adj = adjacency_pairs(edges);
  NodeSet sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  std::vector<NodeSet> subsets, cliques;
  NodeSet cur;
  k_subsets(sorted, k, 0, cur, subsets);
  for (auto& s : subsets)
    if (is_clique(adj, s)) cliques.push_back(s);

  std::vector<int> component(cliques.size(), -1);
  int next = 0;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    if (component[c] >= 0) continue;
    std::vector<std::size_t> stack{c};
    component[c] = next;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < cliques.size(); ++v) {
        if (component[v] >= 0) continue;
        NodeSet common;
        std::set_intersection(cliques[u].begin(), cliques[u].end(), cliques[v].begin(), cliques[v].end(),
                              std::back_inserter(common));
        if (common.size() == k - 1) {
          component[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  std::vector<std::set<NodeId>> members(static_cast<std::size_t>(next));
  for (std::size_t c = 0; c < cliques.size(); ++c)
    members[static_cast<std::size_t>(component[c])].insert(cliques[c].begin(), cliques[c].end());
  std::vector<NodeSet> out;
  for (const auto& m : members) out.emplace_back(m.begin(), m.end());
  std::sort(out.begin(), out.end());
  return out;
}

struct RandomGraph {
  NodeSet nodes;
  EdgeList edges;
};

inline RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes, double min_p = 0.3, double max_p = 0.9) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_nodes);
  std::uniform_real_distribution<double> p_dist(min_p, max_p), coin(0.0, 1.0);
  const auto n = n_dist(rng);
  const double p = p_dist(rng);
  RandomGraph g;
  // sparse, shuffled ids so that relabeling issues would show
  std::vector<NodeId> ids;
  for (NodeId i = 0; i < n; ++i) ids.push_back(100 + 7 * i);
  std::shuffle(ids.begin(), ids.end(), rng);
  g.nodes = ids;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng) < p) g.edges.emplace_back(ids[i], ids[j]);
  return g;
}

/// Solves (I - eps * C^T) sp = (1 - eps) * 1 by Gaussian elimination with
/// partial pivoting; C(y, x) = w(y->x) / out-weight(y).
inline std::map<NodeId, double> social_position_direct(const SocialNetwork& net, double eps) {
  const std::vector<NodeId> nodes(net.nodes.begin(), net.nodes.end());
  const std::size_t n = nodes.size();
  std::map<NodeId, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[nodes[i]] = i;
  std::vector<double> out_w(n, 0.0);
  for (const auto& [e, w] : net.edges) out_w[idx[e.first]] += w;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0;
    a[i][n] = 1.0 - eps;
  }
  for (const auto& [e, w] : net.edges) {
    const auto y = idx[e.first], x = idx[e.second];
    a[x][y] -= eps * w / out_w[y];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::map<NodeId, double> out;
  for (std::size_t i = 0; i < n; ++i) out[nodes[i]] = a[i][n] / a[i][i];
  return out;
}

/// Random directed network in which every node has at least one out-edge.
inline SocialNetwork random_out_connected(std::mt19937_64& rng, std::size_t n) {
  SocialNetwork net;
  std::uniform_int_distribution<NodeId> pick(1, n);
  std::uniform_int_distribution<int> extra(1, 4), weight(1, 3);
  for (NodeId x = 1; x <= n; ++x) {
    const int out = extra(rng);
    for (int e = 0; e < out; ++e) {
      NodeId y = pick(rng);
      while (y == x) y = pick(rng);
      const int w = weight(rng);
      for (int i = 0; i < w; ++i) net.add_interaction(x, y);
    }
  }
  return net;
}

/// Uniformly random interaction log over `nodes` nodes and `span_days` days.
inline TemporalEventLog random_log(std::mt19937_64& rng, std::size_t nodes, std::int64_t span_days, std::size_t records) {
  std::uniform_int_distribution<NodeId> pick(1, nodes);
  std::uniform_int_distribution<std::int64_t> day(0, span_days - 1);
  const Day start = day_from_civil(2010, 1, 1);
  std::vector<InteractionRecord> recs;
  while (recs.size() < records) {
    const auto x = pick(rng), y = pick(rng);
    if (x == y) continue;
    recs.push_back({x, y, start + day(rng), {}});
  }
  return TemporalEventLog(std::move(recs), start, start + span_days - 1);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Relative path -> contents for every regular file under `root`.
inline std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file()) out[std::filesystem::relative(entry.path(), root).string()] = read_file(entry.path());
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ged_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ged::test
