#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace splitter {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public GraphError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Sorted, duplicate-free set of node ids.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::vector<NodeId> ids);

  std::span<const NodeId> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(NodeId id) const;
  NodeId front() const { return ids_.front(); }

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<NodeId> ids_;
};

// Bidirectional map between external string labels and dense ids. An empty
// dictionary means every node is labelled by its decimal id.
class LabelDict {
 public:
  LabelDict() = default;
  explicit LabelDict(std::vector<std::string> labels);

  bool empty() const { return labels_.empty(); }
  std::string label(NodeId id) const;
  // Returns false when the label is unknown.
  bool find(std::string_view label, NodeId& out) const;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

// Counters collected while building a graph from raw edges.
struct IngestStats {
  std::size_t lines = 0;
  std::size_t raw_edges = 0;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
  // Directed only: unordered pairs present in both directions. Symmetrizing
  // the graph would collapse each of these into one edge.
  std::size_t reciprocal_pairs = 0;
};

// Immutable compressed adjacency graph over ids [0, num_nodes).
//
// Undirected graphs store each edge in both endpoint lists. Directed graphs
// keep separate out- and in-adjacency so that weak connectivity and
// neighborhood unions are O(deg) queries.
class Graph {
 public:
  Graph() = default;

  // Self-loops and repeated edges are dropped; stats, when given, records how
  // many. For undirected graphs (u, v) and (v, u) are the same edge.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                          bool directed, LabelDict labels = {},
                          IngestStats* stats = nullptr);

  std::size_t num_nodes() const { return num_nodes_; }
  // Unordered pairs when undirected, ordered pairs when directed.
  std::size_t num_edges() const { return num_edges_; }
  bool directed() const { return directed_; }

  // Out-neighbors for directed graphs. Sorted ascending.
  std::span<const NodeId> neighbors(NodeId u) const {
    return {out_targets_.data() + out_offsets_[u],
            out_offsets_[u + 1] - out_offsets_[u]};
  }
  std::span<const NodeId> in_neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const {
    return out_offsets_[u + 1] - out_offsets_[u];
  }

  // Sorted union of in- and out-neighbors; the plain neighbor list when
  // undirected.
  std::vector<NodeId> undirected_neighbors(NodeId u) const;

  bool has_edge(NodeId u, NodeId v) const;

  // Every edge once: u < v for undirected graphs, (src, dst) for directed.
  std::vector<Edge> edges() const;

  const LabelDict& labels() const { return labels_; }
  std::string label(NodeId u) const { return labels_.label(u); }

  void check_node(NodeId u) const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_edges_ = 0;
  bool directed_ = false;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> in_targets_;
  LabelDict labels_;
};

// A graph paired with the ids its nodes had in the graph it was cut from.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;
};

// Reads whitespace separated `src dst` lines; blank lines and `#` comments are
// skipped. Labels map to ids in first-seen order.
Graph parse_edge_list(std::istream& in, bool directed,
                      IngestStats* stats = nullptr);
Graph read_edge_list_file(const std::string& path, bool directed,
                          IngestStats* stats = nullptr);
void write_edge_list(std::ostream& out, const Graph& g);

// Undirected copy of a directed graph; identity for undirected input.
Graph symmetrized(const Graph& g);

// Subgraph induced on the given nodes, with labels carried over.
Subgraph induced_subgraph(const Graph& g, const NodeSet& nodes);

// Direction-blind components, ordered by smallest member.
std::vector<NodeSet> connected_components(const Graph& g);

// Largest weakly connected component; ties go to the component holding the
// smallest id.
Subgraph largest_connected_component(const Graph& g);

bool is_connected(const Graph& g);

}  // namespace splitter
