#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "splitter/graph.hpp"

namespace splitter {

// The graph induced on a node's neighborhood, without the node itself.
struct EgoNet {
  NodeId ego = 0;
  // Local id -> neighbor id in the parent graph. Sorted ascending.
  std::vector<NodeId> members;
  Graph graph;
};

// A non-overlapping clustering: maps a graph to a partition of its node ids.
using ClusteringAlgorithm = std::function<std::vector<NodeSet>(const Graph&)>;

// Connected components as the ego-net clustering.
ClusteringAlgorithm connected_components_clustering();

// For directed graphs the neighborhood is the union of in- and out-neighbors
// and the ego-net is undirected.
EgoNet ego_net(const Graph& g, NodeId u);

// Graph over persona ids plus the mapping back to original nodes.
//
// Personas are numbered grouped by original node in ascending id order, and
// within a node by the smallest member of the ego-net cluster they stand for.
class PersonaGraph {
 public:
  PersonaGraph(Graph graph, std::vector<NodeId> persona_to_node,
               std::size_t num_original_nodes);

  const Graph& graph() const { return graph_; }
  std::size_t num_personas() const { return p2n_.size(); }
  std::size_t num_original_nodes() const { return offsets_.size() - 1; }

  NodeId original_node(NodeId persona) const { return p2n_.at(persona); }
  std::span<const NodeId> p2n() const { return p2n_; }
  // Personas are contiguous per node, so this is an id range.
  std::span<const NodeId> personas_of(NodeId node) const {
    return {persona_ids_.data() + offsets_.at(node),
            offsets_.at(node + 1) - offsets_.at(node)};
  }
  // Position of a persona among its node's personas.
  std::size_t persona_index(NodeId persona) const {
    return persona - offsets_.at(p2n_.at(persona));
  }

 private:
  Graph graph_;
  std::vector<NodeId> p2n_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> persona_ids_;
};

// Splits every node into one persona per cluster of its ego-net and reroutes
// each original edge (u, v) to the persona of u whose cluster holds v and the
// persona of v whose cluster holds u. Directed input is symmetrized first, so
// the persona graph is always undirected. Isolated nodes get one persona.
PersonaGraph persona_decompose(const Graph& g, const ClusteringAlgorithm& algo);

double avg_personas_per_node(const PersonaGraph& pg);

// `label|k` for the k-th persona of the node labelled `label`.
std::string persona_label(const PersonaGraph& pg, const Graph& original,
                          NodeId persona);

// Edge list of persona ids and a `persona_id<TAB>original_label` mapping.
void write_persona_edges(std::ostream& out, const PersonaGraph& pg);
void write_persona_mapping(std::ostream& out, const PersonaGraph& pg,
                           const Graph& original);

}  // namespace splitter
