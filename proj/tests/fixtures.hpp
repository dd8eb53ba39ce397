#pragma once

// Small graphs and brute-force oracles shared by the test binaries.

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "splitter/graph.hpp"
#include "splitter/persona.hpp"

namespace splitter::testing {

inline Graph make_graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> pairs,
                        bool directed = false) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v});
  return Graph::from_edges(n, edges, directed);
}

inline Graph parse(const std::string& text, bool directed = false,
                   IngestStats* stats = nullptr) {
  std::istringstream in(text);
  return parse_edge_list(in, directed, stats);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return make_graph(n, pairs);
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId u = 0; u + 1 < n; ++u) pairs.emplace_back(u, u + 1);
  return make_graph(n, pairs);
}

// Triangles 0-1-2 and 2-3-4 sharing node 2.
inline Graph bowtie() {
  return make_graph(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}});
}

// Two K_k cliques on [0,k) and [k,2k) joined by the edge (k-1, k).
inline Graph two_cliques(std::size_t k) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId base : {NodeId{0}, static_cast<NodeId>(k)})
    for (NodeId u = 0; u < k; ++u)
      for (NodeId v = u + 1; v < k; ++v) pairs.emplace_back(base + u, base + v);
  pairs.emplace_back(static_cast<NodeId>(k - 1), static_cast<NodeId>(k));
  return make_graph(2 * k, pairs);
}

inline Graph gnp(std::size_t n, double p, std::mt19937_64& rng, bool directed = false) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = directed ? 0 : u + 1; v < n; ++v) {
      if (u != v && coin(rng)) edges.push_back({u, v});
    }
  }
  return Graph::from_edges(n, edges, directed);
}

// Random spanning tree plus extra random edges; always connected.
inline Graph random_connected(std::size_t n, std::size_t extra, std::mt19937_64& rng) {
  std::vector<Edge> edges;
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    edges.push_back({order[pick(rng)], order[i]});
  }
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  for (std::size_t i = 0; i < extra; ++i) {
    const NodeId u = node(rng), v = node(rng);
    if (u != v) edges.push_back({u, v});
  }
  return Graph::from_edges(n, edges, false);
}

struct UnionFind {
  std::vector<NodeId> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  NodeId find(NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(NodeId a, NodeId b) { parent[find(a)] = find(b); }
};

// Components as a set of sets, from union-find over the raw edge list.
inline std::set<std::set<NodeId>> union_find_components(const Graph& g) {
  UnionFind uf(g.num_nodes());
  for (const Edge& e : g.edges()) uf.unite(e.src, e.dst);
  std::vector<std::set<NodeId>> by_root(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) by_root[uf.find(u)].insert(u);
  std::set<std::set<NodeId>> out;
  for (auto& s : by_root)
    if (!s.empty()) out.insert(s);
  return out;
}

inline std::set<std::set<NodeId>> as_sets(const std::vector<NodeSet>& parts) {
  std::set<std::set<NodeId>> out;
  for (const auto& p : parts) out.insert(std::set<NodeId>(p.begin(), p.end()));
  return out;
}

inline std::pair<NodeId, NodeId> unordered(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

// Persona edges mapped back through p2n, as a sorted multiset of unordered pairs.
inline std::vector<std::pair<NodeId, NodeId>> mapped_back(const PersonaGraph& pg) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const Edge& e : pg.graph().edges())
    out.push_back(unordered(pg.original_node(e.src), pg.original_node(e.dst)));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::pair<NodeId, NodeId>> edge_pairs(const Graph& g) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const Edge& e : g.edges()) out.push_back(unordered(e.src, e.dst));
  std::sort(out.begin(), out.end());
  return out;
}

inline bool has_triangle(const Graph& g) {
  for (const Edge& e : g.edges())
    for (NodeId w : g.neighbors(e.src))
      if (w != e.dst && g.has_edge(e.dst, w)) return true;
  return false;
}

}  // namespace splitter::testing
