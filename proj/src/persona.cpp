#include "splitter/persona.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace splitter {

namespace {

// Ego-net over an undirected graph; adjacency lists are sorted.
EgoNet undirected_ego_net(const Graph& g, NodeId u) {
  EgoNet ego;
  ego.ego = u;
  const auto members = g.neighbors(u);
  ego.members.assign(members.begin(), members.end());

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const NodeId v = members[i];
    const auto adj = g.neighbors(v);
    // Merge the tails of N(v) and N(u) above v.
    auto a = std::upper_bound(adj.begin(), adj.end(), v);
    std::size_t j = i + 1;
    while (a != adj.end() && j < members.size()) {
      if (*a < members[j]) {
        ++a;
      } else if (members[j] < *a) {
        ++j;
      } else {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
        ++a;
        ++j;
      }
    }
  }
  ego.graph = Graph::from_edges(members.size(), edges, false);
  return ego;
}

void check_partition(const std::vector<NodeSet>& parts, std::size_t n,
                     NodeId ego) {
  std::vector<char> seen(n, 0);
  std::size_t covered = 0;
  for (const NodeSet& part : parts) {
    if (part.empty()) {
      throw GraphError("clustering of ego-net " + std::to_string(ego) +
                       " returned an empty cluster");
    }
    for (NodeId id : part) {
      if (id >= n || seen[id]) {
        throw GraphError("clustering of ego-net " + std::to_string(ego) +
                         " is not a partition");
      }
      seen[id] = 1;
      ++covered;
    }
  }
  if (covered != n) {
    throw GraphError("clustering of ego-net " + std::to_string(ego) +
                     " does not cover every neighbor");
  }
}

}  // namespace

ClusteringAlgorithm connected_components_clustering() {
  return [](const Graph& g) { return connected_components(g); };
}

EgoNet ego_net(const Graph& g, NodeId u) {
  g.check_node(u);
  if (!g.directed()) return undirected_ego_net(g, u);
  // Only the 2-hop neighborhood matters; symmetrize just that.
  const auto members = g.undirected_neighbors(u);
  Subgraph local = induced_subgraph(g, NodeSet(members));
  EgoNet ego;
  ego.ego = u;
  ego.members = std::move(local.to_parent);
  ego.graph = Graph::from_edges(ego.members.size(), local.graph.edges(), false);
  return ego;
}

PersonaGraph::PersonaGraph(Graph graph, std::vector<NodeId> persona_to_node,
                           std::size_t num_original_nodes)
    : graph_(std::move(graph)), p2n_(std::move(persona_to_node)) {
  if (graph_.num_nodes() != p2n_.size()) {
    throw GraphError("persona mapping does not cover the persona graph");
  }
  offsets_.assign(num_original_nodes + 1, 0);
  for (std::size_t p = 0; p < p2n_.size(); ++p) {
    if (p2n_[p] >= num_original_nodes) {
      throw GraphError("persona maps to an unknown node");
    }
    if (p > 0 && p2n_[p] < p2n_[p - 1]) {
      throw GraphError("personas must be grouped by original node");
    }
    ++offsets_[p2n_[p] + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  persona_ids_.resize(p2n_.size());
  std::iota(persona_ids_.begin(), persona_ids_.end(), NodeId{0});
}

PersonaGraph persona_decompose(const Graph& input,
                               const ClusteringAlgorithm& algo) {
  const Graph sym_storage = input.directed() ? symmetrized(input) : Graph{};
  const Graph& g = input.directed() ? sym_storage : input;
  const std::size_t n = g.num_nodes();

  // cluster_slot[adj_offset[u] + k] = cluster of the k-th neighbor of u.
  std::vector<std::size_t> adj_offset(n + 1, 0);
  for (NodeId u = 0; u < n; ++u) adj_offset[u + 1] = adj_offset[u] + g.degree(u);
  std::vector<NodeId> cluster_slot(adj_offset[n]);
  std::vector<NodeId> first_persona(n + 1, 0);
  std::vector<NodeId> p2n;

  for (NodeId u = 0; u < n; ++u) {
    first_persona[u] = static_cast<NodeId>(p2n.size());
    if (g.degree(u) == 0) {
      p2n.push_back(u);
      continue;
    }
    const EgoNet ego = undirected_ego_net(g, u);
    std::vector<NodeSet> parts = algo(ego.graph);
    check_partition(parts, ego.members.size(), u);
    std::sort(parts.begin(), parts.end(),
              [](const NodeSet& a, const NodeSet& b) { return a.front() < b.front(); });
    for (std::size_t c = 0; c < parts.size(); ++c) {
      for (NodeId local : parts[c]) {
        cluster_slot[adj_offset[u] + local] = static_cast<NodeId>(c);
      }
      p2n.push_back(u);
    }
  }
  first_persona[n] = static_cast<NodeId>(p2n.size());

  auto persona_of = [&](NodeId u, NodeId v) {
    const auto adj = g.neighbors(u);
    const auto k = static_cast<std::size_t>(
        std::lower_bound(adj.begin(), adj.end(), v) - adj.begin());
    return first_persona[u] + cluster_slot[adj_offset[u] + k];
  };

  std::vector<Edge> persona_edges;
  persona_edges.reserve(g.num_edges());
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (v < u) continue;
      persona_edges.push_back({persona_of(u, v), persona_of(v, u)});
    }
  }
  Graph persona_graph =
      Graph::from_edges(p2n.size(), persona_edges, /*directed=*/false);
  return PersonaGraph(std::move(persona_graph), std::move(p2n), n);
}

double avg_personas_per_node(const PersonaGraph& pg) {
  if (pg.num_original_nodes() == 0) return 0.0;
  return static_cast<double>(pg.num_personas()) /
         static_cast<double>(pg.num_original_nodes());
}

std::string persona_label(const PersonaGraph& pg, const Graph& original,
                          NodeId persona) {
  return original.label(pg.original_node(persona)) + "|" +
         std::to_string(pg.persona_index(persona));
}

void write_persona_edges(std::ostream& out, const PersonaGraph& pg) {
  write_edge_list(out, pg.graph());
}

void write_persona_mapping(std::ostream& out, const PersonaGraph& pg,
                           const Graph& original) {
  for (NodeId p = 0; p < pg.num_personas(); ++p) {
    out << p << '\t' << original.label(pg.original_node(p)) << '\n';
  }
}

}  // namespace splitter
