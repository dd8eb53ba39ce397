#include "splitter/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace splitter {

NodeSet::NodeSet(std::vector<NodeId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool NodeSet::contains(NodeId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

LabelDict::LabelDict(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto [it, inserted] = index_.emplace(labels_[i], static_cast<NodeId>(i));
    if (!inserted) throw GraphError("duplicate label '" + labels_[i] + "'");
  }
}

std::string LabelDict::label(NodeId id) const {
  if (labels_.empty()) return std::to_string(id);
  return labels_.at(id);
}

bool LabelDict::find(std::string_view label, NodeId& out) const {
  if (labels_.empty()) {
    // Numeric identity labelling.
    NodeId value = 0;
    if (label.empty()) return false;
    for (char c : label) {
      if (c < '0' || c > '9') return false;
      value = value * 10 + static_cast<NodeId>(c - '0');
    }
    out = value;
    return true;
  }
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return false;
  out = it->second;
  return true;
}

namespace {

void build_csr(std::size_t n, std::vector<Edge>& arcs,
               std::vector<std::size_t>& offsets,
               std::vector<NodeId>& targets) {
  std::sort(arcs.begin(), arcs.end());
  offsets.assign(n + 1, 0);
  targets.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    ++offsets[arcs[i].src + 1];
    targets[i] = arcs[i].dst;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
}

}  // namespace

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                        bool directed, LabelDict labels, IngestStats* stats) {
  if (!labels.empty() && labels.labels().size() != num_nodes) {
    throw GraphError("label count does not match node count");
  }
  if (num_nodes > static_cast<std::size_t>(UINT32_MAX)) {
    throw GraphError("too many nodes");
  }
  IngestStats local;
  local.raw_edges = edges.size();

  std::vector<Edge> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  for (const Edge& e : edges) {
    if (e.src >= num_nodes || e.dst >= num_nodes) {
      throw GraphError("edge endpoint out of range");
    }
    if (e.src == e.dst) {
      ++local.self_loops;
      continue;
    }
    if (directed) {
      arcs.push_back(e);
    } else {
      arcs.push_back({std::min(e.src, e.dst), std::max(e.src, e.dst)});
    }
  }
  std::sort(arcs.begin(), arcs.end());
  const auto unique_end = std::unique(arcs.begin(), arcs.end());
  local.duplicates = static_cast<std::size_t>(arcs.end() - unique_end);
  arcs.erase(unique_end, arcs.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.directed_ = directed;
  g.num_edges_ = arcs.size();
  g.labels_ = std::move(labels);

  if (directed) {
    std::vector<Edge> reversed;
    reversed.reserve(arcs.size());
    for (const Edge& e : arcs) reversed.push_back({e.dst, e.src});
    build_csr(num_nodes, arcs, g.out_offsets_, g.out_targets_);
    build_csr(num_nodes, reversed, g.in_offsets_, g.in_targets_);
    for (const Edge& e : arcs) {
      if (e.src < e.dst && g.has_edge(e.dst, e.src)) ++local.reciprocal_pairs;
    }
  } else {
    const std::size_t m = arcs.size();
    for (std::size_t i = 0; i < m; ++i) arcs.push_back({arcs[i].dst, arcs[i].src});
    build_csr(num_nodes, arcs, g.out_offsets_, g.out_targets_);
  }
  if (stats != nullptr) {
    stats->raw_edges = local.raw_edges;
    stats->self_loops = local.self_loops;
    stats->duplicates = local.duplicates;
    stats->reciprocal_pairs = local.reciprocal_pairs;
  }
  return g;
}

std::span<const NodeId> Graph::in_neighbors(NodeId u) const {
  if (!directed_) return neighbors(u);
  return {in_targets_.data() + in_offsets_[u],
          in_offsets_[u + 1] - in_offsets_[u]};
}

std::vector<NodeId> Graph::undirected_neighbors(NodeId u) const {
  const auto out = neighbors(u);
  if (!directed_) return {out.begin(), out.end()};
  const auto in = in_neighbors(u);
  std::vector<NodeId> merged;
  merged.reserve(out.size() + in.size());
  std::set_union(out.begin(), out.end(), in.begin(), in.end(),
                 std::back_inserter(merged));
  return merged;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= num_nodes_ || v >= num_nodes_) return false;
  const auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (directed_ || u < v) out.push_back({u, v});
    }
  }
  return out;
}

void Graph::check_node(NodeId u) const {
  if (u >= num_nodes_) {
    throw GraphError("node id " + std::to_string(u) + " out of range [0, " +
                     std::to_string(num_nodes_) + ")");
  }
}

Graph parse_edge_list(std::istream& in, bool directed, IngestStats* stats) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<Edge> edges;

  auto intern = [&](std::string&& token) {
    auto [it, inserted] = ids.try_emplace(token, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(std::move(token));
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string src, dst, extra;
    if (!(fields >> src >> dst)) {
      throw ParseError(line_no, "expected 'src dst', got '" + line + "'");
    }
    if (fields >> extra) {
      throw ParseError(line_no, "unexpected trailing field '" + extra + "'");
    }
    const NodeId u = intern(std::move(src));
    const NodeId v = intern(std::move(dst));
    edges.push_back({u, v});
  }
  if (in.bad()) throw GraphError("read error");

  IngestStats local;
  local.lines = line_no;
  const std::size_t n = labels.size();
  Graph g = Graph::from_edges(n, edges, directed, LabelDict(std::move(labels)),
                              &local);
  if (stats != nullptr) *stats = local;
  return g;
}

Graph read_edge_list_file(const std::string& path, bool directed,
                          IngestStats* stats) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open '" + path + "'");
  return parse_edge_list(in, directed, stats);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (const Edge& e : g.edges()) {
    out << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
  }
}

Graph symmetrized(const Graph& g) {
  if (!g.directed()) return g;
  const auto edges = g.edges();
  return Graph::from_edges(g.num_nodes(), edges, false, g.labels());
}

Subgraph induced_subgraph(const Graph& g, const NodeSet& nodes) {
  constexpr NodeId kAbsent = UINT32_MAX;
  std::vector<NodeId> local(g.num_nodes(), kAbsent);
  Subgraph sub;
  sub.to_parent.reserve(nodes.size());
  for (NodeId u : nodes) {
    g.check_node(u);
    local[u] = static_cast<NodeId>(sub.to_parent.size());
    sub.to_parent.push_back(u);
  }
  std::vector<Edge> edges;
  for (NodeId u : nodes) {
    for (NodeId v : g.neighbors(u)) {
      if (local[v] == kAbsent) continue;
      if (!g.directed() && v < u) continue;
      edges.push_back({local[u], local[v]});
    }
  }
  LabelDict labels;
  if (!g.labels().empty()) {
    std::vector<std::string> names;
    names.reserve(nodes.size());
    for (NodeId u : nodes) names.push_back(g.label(u));
    labels = LabelDict(std::move(names));
  }
  sub.graph = Graph::from_edges(nodes.size(), edges, g.directed(), std::move(labels));
  return sub;
}

std::vector<NodeSet> connected_components(const Graph& g) {
  constexpr NodeId kUnvisited = UINT32_MAX;
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> component(n, kUnvisited);
  std::vector<std::vector<NodeId>> members;
  std::vector<NodeId> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (component[root] != kUnvisited) continue;
    const auto id = static_cast<NodeId>(members.size());
    members.emplace_back();
    component[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      members[id].push_back(u);
      auto visit = [&](NodeId v) {
        if (component[v] == kUnvisited) {
          component[v] = id;
          stack.push_back(v);
        }
      };
      for (NodeId v : g.neighbors(u)) visit(v);
      if (g.directed()) {
        for (NodeId v : g.in_neighbors(u)) visit(v);
      }
    }
  }
  std::vector<NodeSet> out;
  out.reserve(members.size());
  for (auto& m : members) out.emplace_back(std::move(m));
  return out;
}

Subgraph largest_connected_component(const Graph& g) {
  if (g.num_nodes() == 0) throw GraphError("empty graph has no components");
  auto components = connected_components(g);
  const auto largest = std::max_element(
      components.begin(), components.end(),
      [](const NodeSet& a, const NodeSet& b) { return a.size() < b.size(); });
  return induced_subgraph(g, *largest);
}

bool is_connected(const Graph& g) {
  return g.num_nodes() <= 1 || connected_components(g).size() == 1;
}

}  // namespace splitter
