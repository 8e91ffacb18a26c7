#pragma once

// Clique percolation communities on per-frame snapshots.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "ged/error.hpp"
#include "ged/temporal.hpp"

namespace ged {

/// Simple undirected graph over a sorted node list. Adjacency lists hold
/// local indices into `nodes` and are kept sorted.
struct UndirectedGraph {
  std::vector<NodeId> nodes;
  std::vector<std::vector<std::uint32_t>> adjacency;

  std::size_t index_of(NodeId id) const {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), id) - nodes.begin());
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adjacency) twice += a.size();
    return twice / 2;
  }

  bool has_edge(NodeId x, NodeId y) const {
    const auto i = index_of(x), j = index_of(y);
    if (i >= nodes.size() || j >= nodes.size() || nodes[i] != x || nodes[j] != y) return false;
    return std::binary_search(adjacency[i].begin(), adjacency[i].end(), static_cast<std::uint32_t>(j));
  }

  /// Builds a graph from an explicit node list and undirected edge list.
  /// Self-loops and duplicate edges are ignored.
  static UndirectedGraph from_edges(std::vector<NodeId> nodes, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    UndirectedGraph g;
    for (const auto& [x, y] : edges) {
      nodes.push_back(x);
      nodes.push_back(y);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    g.nodes = std::move(nodes);
    g.adjacency.resize(g.nodes.size());
    for (const auto& [x, y] : edges) {
      if (x == y) continue;
      const auto i = static_cast<std::uint32_t>(g.index_of(x));
      const auto j = static_cast<std::uint32_t>(g.index_of(y));
      g.adjacency[i].push_back(j);
      g.adjacency[j].push_back(i);
    }
    for (auto& a : g.adjacency) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return g;
  }
};

/// Edge {x,y} exists iff x->y or y->x does. Edge weights are dropped.
inline UndirectedGraph undirected_projection(const SocialNetwork& net) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(net.edges.size());
  for (const auto& [pair, w] : net.edges) edges.push_back(pair);
  return UndirectedGraph::from_edges({net.nodes.begin(), net.nodes.end()}, edges);
}

namespace detail {

using IndexSet = std::vector<std::uint32_t>;

inline IndexSet intersect(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
  std::size_t n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else { ++n; ++i; ++j; }
  }
  return n;
}

// Bron-Kerbosch with Tomita pivoting. P and X are sorted index sets.
inline void bron_kerbosch(const UndirectedGraph& g, IndexSet& r, IndexSet p, IndexSet x, std::vector<IndexSet>& out) {
  if (p.empty()) {
    if (x.empty()) {
      auto clique = r;
      std::sort(clique.begin(), clique.end());
      out.push_back(std::move(clique));
    }
    return;
  }
  // pivot maximizes |P ∩ N(u)| over u in P ∪ X
  std::uint32_t pivot = p.front();
  std::size_t best = 0;
  for (const auto* set : {&p, &x}) {
    for (const auto u : *set) {
      const auto c = intersection_size(p, g.adjacency[u]);
      if (c > best || (c == best && u < pivot)) {
        best = c;
        pivot = u;
      }
    }
  }
  IndexSet candidates;
  std::set_difference(p.begin(), p.end(), g.adjacency[pivot].begin(), g.adjacency[pivot].end(),
                      std::back_inserter(candidates));
  for (const auto v : candidates) {
    r.push_back(v);
    bron_kerbosch(g, r, intersect(p, g.adjacency[v]), intersect(x, g.adjacency[v]), out);
    r.pop_back();
    p.erase(std::lower_bound(p.begin(), p.end(), v));
    x.insert(std::lower_bound(x.begin(), x.end(), v), v);
  }
}

inline std::vector<IndexSet> maximal_clique_indices(const UndirectedGraph& g) {
  std::vector<IndexSet> out;
  if (g.nodes.empty()) return out;
  IndexSet r;
  IndexSet p(g.nodes.size());
  std::iota(p.begin(), p.end(), 0u);
  bron_kerbosch(g, r, std::move(p), {}, out);
  std::sort(out.begin(), out.end());
  return out;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

inline std::vector<NodeId> to_ids(const UndirectedGraph& g, const IndexSet& s) {
  std::vector<NodeId> ids;
  ids.reserve(s.size());
  for (const auto i : s) ids.push_back(g.nodes[i]);
  return ids;  // sorted because nodes is sorted and s is sorted
}

}  // namespace detail

/// All maximal cliques, each sorted ascending, the list sorted
/// lexicographically. Isolated nodes come out as singleton cliques.
inline std::vector<std::vector<NodeId>> enumerate_maximal_cliques(const UndirectedGraph& g) {
  std::vector<std::vector<NodeId>> out;
  for (const auto& c : detail::maximal_clique_indices(g)) out.push_back(detail::to_ids(g, c));
  std::sort(out.begin(), out.end());
  return out;
}

/// k-clique communities: unions of k-cliques that can reach each other
/// through k-cliques sharing k-1 nodes. Computed from maximal cliques of size
/// >= k, two of which belong to the same community iff they share at least
/// k-1 nodes. Communities may overlap. Sorted by smallest member, then
/// lexicographically.
inline std::vector<std::vector<NodeId>> k_clique_communities(const UndirectedGraph& g, std::size_t k) {
  if (k < 3) throw Error(ErrorCode::InvalidParameter, "clique size k must be at least 3");
  std::vector<detail::IndexSet> cliques;
  for (auto& c : detail::maximal_clique_indices(g))
    if (c.size() >= k) cliques.push_back(std::move(c));

  std::vector<std::vector<std::size_t>> cliques_of(g.nodes.size());
  for (std::size_t c = 0; c < cliques.size(); ++c)
    for (const auto v : cliques[c]) cliques_of[v].push_back(c);

  // Two cliques can only percolate through a shared node, so pairs are
  // examined per node. Pairs already joined are skipped, which keeps dense
  // regions (where most cliques merge early) cheap.
  detail::DisjointSets sets(cliques.size());
  for (const auto& around : cliques_of) {
    for (std::size_t i = 0; i < around.size(); ++i) {
      for (std::size_t j = i + 1; j < around.size(); ++j) {
        const auto a = around[i], b = around[j];
        if (sets.find(a) == sets.find(b)) continue;
        if (detail::intersection_size(cliques[a], cliques[b]) >= k - 1) sets.unite(a, b);
      }
    }
  }

  std::vector<detail::IndexSet> members(cliques.size());
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    auto& m = members[sets.find(c)];
    m.insert(m.end(), cliques[c].begin(), cliques[c].end());
  }
  std::vector<std::vector<NodeId>> out;
  for (auto& m : members) {
    if (m.empty()) continue;
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    out.push_back(detail::to_ids(g, m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A node set found in one frame. Members are sorted ascending.
struct Group {
  std::size_t frame_index = 0;
  std::size_t group_id = 0;
  std::vector<NodeId> members;

  std::size_t size() const { return members.size(); }
  friend bool operator==(const Group&, const Group&) = default;
};

/// Community detector interface: maps a snapshot to member sets.
using GroupDetector = std::function<std::vector<std::vector<NodeId>>(const SocialNetwork&)>;

inline GroupDetector cpm_detector(std::size_t k) {
  return [k](const SocialNetwork& net) { return k_clique_communities(undirected_projection(net), k); };
}

/// Groups per frame; outer index is frame_index - 1. Group ids are assigned
/// 0.. in detector output order.
inline std::vector<std::vector<Group>> detect_groups(const TemporalSocialNetwork& tsn, const GroupDetector& detector) {
  std::vector<std::vector<Group>> out;
  out.reserve(tsn.frames.size());
  for (const auto& frame : tsn.frames) {
    auto& groups = out.emplace_back();
    std::size_t id = 0;
    for (auto& m : detector(frame.snapshot)) groups.push_back({frame.index, id++, std::move(m)});
  }
  return out;
}

inline void write_groups(std::ostream& out, const std::vector<std::vector<Group>>& groups) {
  out << "# frame_index,group_id,members\n";
  for (const auto& frame : groups) {
    for (const auto& g : frame) {
      out << g.frame_index << ',' << g.group_id << ',';
      for (std::size_t i = 0; i < g.members.size(); ++i) out << (i ? ";" : "") << g.members[i];
      out << '\n';
    }
  }
}

/// Reads `frame_index,group_id,m1;m2;...` lines into a flat list. Members
/// are sorted; frame indices are not checked here (see bucket_groups).
inline std::vector<Group> read_groups(std::istream& in) {
  std::vector<Group> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split(text, ',');
    const auto frame = fields.size() == 3 ? detail::parse_int<std::size_t>(fields[0]) : std::nullopt;
    const auto id = fields.size() == 3 ? detail::parse_int<std::size_t>(fields[1]) : std::nullopt;
    if (!frame || !id) throw Error(ErrorCode::Parse, "groups file line " + std::to_string(line_no));
    Group g{*frame, *id, {}};
    for (const auto m : detail::split(fields[2], ';')) {
      const auto v = detail::parse_int<NodeId>(m);
      if (!v) throw Error(ErrorCode::Parse, "groups file line " + std::to_string(line_no) + ": bad member");
      g.members.push_back(*v);
    }
    std::sort(g.members.begin(), g.members.end());
    g.members.erase(std::unique(g.members.begin(), g.members.end()), g.members.end());
    out.push_back(std::move(g));
  }
  return out;
}

/// Buckets a flat group list by frame. Throws FrameMismatch for a group that
/// references a frame outside 1..frame_count.
inline std::vector<std::vector<Group>> bucket_groups(std::vector<Group> groups, std::size_t frame_count) {
  std::vector<std::vector<Group>> out(frame_count);
  for (auto& g : groups) {
    if (g.frame_index < 1 || g.frame_index > frame_count)
      throw Error(ErrorCode::FrameMismatch, "group " + std::to_string(g.group_id) + " references frame " +
                                                std::to_string(g.frame_index) + " of " + std::to_string(frame_count));
    out[g.frame_index - 1].push_back(std::move(g));
  }
  for (auto& frame : out)
    std::sort(frame.begin(), frame.end(), [](const Group& a, const Group& b) { return a.group_id < b.group_id; });
  return out;
}

}  // namespace ged
