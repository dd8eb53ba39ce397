#include "splitter/linkpred.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "splitter/walker.hpp"

namespace splitter {

namespace {

// Residual graph for splitting: undirected multigraph view, so that removing
// one of two reciprocal arcs keeps the endpoints connected.
class ResidualGraph {
 public:
  explicit ResidualGraph(const Graph& g) : adj_(g.num_nodes()), seen_(g.num_nodes(), 0) {
    for (const Edge& e : g.edges()) add(e);
  }

  void add(const Edge& e) {
    adj_[e.src].push_back(e.dst);
    adj_[e.dst].push_back(e.src);
  }

  void remove(const Edge& e) {
    erase_one(adj_[e.src], e.dst);
    erase_one(adj_[e.dst], e.src);
  }

  // Bidirectional search from both endpoints, always growing the smaller
  // frontier. A bridge costs a search of its smaller side.
  bool connected(NodeId a, NodeId b) {
    if (a == b) return true;
    stamp_ += 2;
    const std::uint64_t side_a = stamp_;
    const std::uint64_t side_b = stamp_ + 1;
    std::vector<NodeId> queue_a{a};
    std::vector<NodeId> queue_b{b};
    std::size_t head_a = 0;
    std::size_t head_b = 0;
    seen_[a] = side_a;
    seen_[b] = side_b;
    while (head_a < queue_a.size() && head_b < queue_b.size()) {
      const bool grow_a = queue_a.size() - head_a <= queue_b.size() - head_b;
      auto& queue = grow_a ? queue_a : queue_b;
      auto& head = grow_a ? head_a : head_b;
      const std::uint64_t mine = grow_a ? side_a : side_b;
      const std::uint64_t theirs = grow_a ? side_b : side_a;
      const NodeId u = queue[head++];
      for (NodeId v : adj_[u]) {
        if (seen_[v] == theirs) return true;
        if (seen_[v] != mine) {
          seen_[v] = mine;
          queue.push_back(v);
        }
      }
    }
    return false;
  }

 private:
  static void erase_one(std::vector<NodeId>& list, NodeId v) {
    auto it = std::find(list.begin(), list.end(), v);
    *it = list.back();
    list.pop_back();
  }

  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::uint64_t> seen_;
  std::uint64_t stamp_ = 0;
};

std::uint64_t pair_key(NodeId u, NodeId v, bool directed) {
  if (!directed && v < u) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t count_common(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

LinkPredSplit split_edges(const Graph& g, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  }
  if (!is_connected(g)) throw GraphError("edge split needs a connected graph");

  LinkPredSplit split;
  split.seed = seed;
  Rng rng(seed);
  std::vector<Edge> order = g.edges();
  std::shuffle(order.begin(), order.end(), rng);
  const auto target = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(order.size())));

  ResidualGraph residual(g);
  std::vector<char> removed(order.size(), 0);
  for (std::size_t i = 0; i < order.size() && split.test_edges.size() < target; ++i) {
    residual.remove(order[i]);
    if (residual.connected(order[i].src, order[i].dst)) {
      removed[i] = 1;
      split.test_edges.push_back(order[i]);
    } else {
      residual.add(order[i]);
    }
  }
  if (split.test_edges.size() < target) {
    split.warnings.push_back("only " + std::to_string(split.test_edges.size()) + " of " +
                             std::to_string(target) +
                             " requested edges can be removed without disconnecting the graph");
  }

  std::vector<Edge> kept;
  kept.reserve(order.size() - split.test_edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!removed[i]) kept.push_back(order[i]);
  }
  split.train_graph = Graph::from_edges(g.num_nodes(), kept, g.directed(), g.labels());

  const auto n = static_cast<double>(g.num_nodes());
  const double pairs = g.directed() ? n * (n - 1) : n * (n - 1) / 2;
  const double available = pairs - static_cast<double>(g.num_edges());
  const std::size_t wanted = split.test_edges.size();
  if (available < 4.0 * static_cast<double>(wanted)) {
    // Dense graph: rejection sampling would crawl, so enumerate the non-edges.
    std::vector<Edge> pool;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (NodeId v = g.directed() ? 0 : u + 1; v < g.num_nodes(); ++v) {
        if (u != v && !g.has_edge(u, v)) pool.push_back({u, v});
      }
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    if (pool.size() < wanted) {
      split.warnings.push_back("only " + std::to_string(pool.size()) +
                               " non-edges exist; negatives are fewer than test edges");
    }
    pool.resize(std::min(pool.size(), wanted));
    split.negative_edges = std::move(pool);
    return split;
  }
  std::unordered_set<std::uint64_t> taken;
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.num_nodes() - 1));
  while (split.negative_edges.size() < wanted) {
    const NodeId u = pick(rng);
    const NodeId v = pick(rng);
    if (u == v || g.has_edge(u, v)) continue;
    if (!taken.insert(pair_key(u, v, g.directed())).second) continue;
    split.negative_edges.push_back({u, v});
  }
  return split;
}

void write_split(std::ostream& out, const LinkPredSplit& split) {
  const Graph& g = split.train_graph;
  out << "# seed " << split.seed << '\n';
  out << "# directed " << (g.directed() ? 1 : 0) << '\n';
  for (const Edge& e : g.edges()) {
    out << "train\t" << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
  }
  for (const Edge& e : split.test_edges) {
    out << "test\t" << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
  }
  for (const Edge& e : split.negative_edges) {
    out << "negative\t" << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
  }
}

LinkPredSplit read_split(std::istream& in, const Graph& g) {
  LinkPredSplit split;
  std::vector<Edge> train;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind, a, b;
    fields >> kind;
    if (kind == "#") {
      std::string key;
      fields >> key;
      if (key == "seed") fields >> split.seed;
      continue;
    }
    if (!(fields >> a >> b)) throw ParseError(line_no, "expected '<kind> <src> <dst>'");
    NodeId u = 0;
    NodeId v = 0;
    if (!g.labels().find(a, u) || !g.labels().find(b, v) || u >= g.num_nodes() ||
        v >= g.num_nodes()) {
      throw ParseError(line_no, "unknown node in split file");
    }
    if (kind == "train") {
      train.push_back({u, v});
    } else if (kind == "test") {
      split.test_edges.push_back({u, v});
    } else if (kind == "negative") {
      split.negative_edges.push_back({u, v});
    } else {
      throw ParseError(line_no, "unknown record kind '" + kind + "'");
    }
  }
  split.train_graph = Graph::from_edges(g.num_nodes(), train, g.directed(), g.labels());
  return split;
}

EdgeScorer jaccard_scorer(std::shared_ptr<const Graph> g) {
  return [g = std::move(g)](NodeId u, NodeId v) {
    const auto a = g->neighbors(u);
    const auto b = g->neighbors(v);
    const std::size_t common = count_common(a, b);
    const std::size_t uni = a.size() + b.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
  };
}

EdgeScorer common_neighbors_scorer(std::shared_ptr<const Graph> g) {
  return [g = std::move(g)](NodeId u, NodeId v) {
    return static_cast<double>(count_common(g->neighbors(u), g->neighbors(v)));
  };
}

EdgeScorer adamic_adar_scorer(std::shared_ptr<const Graph> g) {
  return [g = std::move(g)](NodeId u, NodeId v) {
    const auto a = g->neighbors(u);
    const auto b = g->neighbors(v);
    double score = 0.0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        const std::size_t deg = g->degree(*i);
        if (deg > 1) score += 1.0 / std::log(static_cast<double>(deg));
        ++i;
        ++j;
      }
    }
    return score;
  };
}

EdgeScorer persona_scorer(EdgeScorer base, std::shared_ptr<const PersonaGraph> pg,
                          Aggregate aggregate) {
  return [base = std::move(base), pg = std::move(pg), aggregate](NodeId u, NodeId v) {
    const auto pu = pg->personas_of(u);
    const auto pv = pg->personas_of(v);
    if (pu.empty() || pv.empty()) throw GraphError("node without personas");
    double best = aggregate == Aggregate::kMin ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (NodeId a : pu) {
      for (NodeId b : pv) {
        const double s = base(a, b);
        sum += s;
        best = aggregate == Aggregate::kMin ? std::min(best, s) : std::max(best, s);
      }
    }
    if (aggregate == Aggregate::kMean) {
      return sum / static_cast<double>(pu.size() * pv.size());
    }
    return best;
  };
}

EdgeScorer splitter_scorer(std::shared_ptr<const SplitterModel> model) {
  return [model = std::move(model)](NodeId u, NodeId v) {
    if (u >= model->num_nodes() || v >= model->num_nodes()) {
      throw GraphError("unknown node in splitter scorer");
    }
    const Matrix& vectors = model->persona_table.input;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = model->persona_offsets[u]; a < model->persona_offsets[u + 1]; ++a) {
      for (std::size_t b = model->persona_offsets[v]; b < model->persona_offsets[v + 1]; ++b) {
        best = std::max(best, dot(vectors.row(a), vectors.row(b)));
      }
    }
    return best;
  };
}

EdgeScorer dot_product_scorer(std::shared_ptr<const Matrix> vectors) {
  return [vectors = std::move(vectors)](NodeId u, NodeId v) {
    return dot(vectors->row(u), vectors->row(v));
  };
}

EdgeScorer random_scorer(std::uint64_t seed) {
  return [seed](NodeId u, NodeId v) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(pair_key(u, v, true)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  };
}

double roc_auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) {
    throw std::invalid_argument("AUC needs at least one positive and one negative");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(positives.begin(), positives.end(), finite) ||
      !std::all_of(negatives.begin(), negatives.end(), finite)) {
    throw std::invalid_argument("AUC scores must be finite");
  }
  std::vector<double> sorted(negatives.begin(), negatives.end());
  std::sort(sorted.begin(), sorted.end());
  double credit = 0.0;
  for (double p : positives) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), p);
    const auto hi = std::upper_bound(lo, sorted.end(), p);
    credit += static_cast<double>(lo - sorted.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return credit / (static_cast<double>(positives.size()) * static_cast<double>(sorted.size()));
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kJaccard: return "jc";
    case Method::kCommonNeighbors: return "cn";
    case Method::kAdamicAdar: return "aa";
    case Method::kPersonaJaccard: return "persona-jc";
    case Method::kPersonaCommonNeighbors: return "persona-cn";
    case Method::kPersonaAdamicAdar: return "persona-aa";
    case Method::kDeepWalk: return "deepwalk";
    case Method::kSplitter: return "splitter";
    case Method::kRandom: return "random";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kJaccard, Method::kCommonNeighbors, Method::kAdamicAdar,
                   Method::kPersonaJaccard, Method::kPersonaCommonNeighbors,
                   Method::kPersonaAdamicAdar, Method::kDeepWalk, Method::kSplitter,
                   Method::kRandom}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::istringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  return out;
}

bool is_embedding_method(Method m) {
  return m == Method::kDeepWalk || m == Method::kSplitter;
}

double evaluate_scorer(const EdgeScorer& scorer, const LinkPredSplit& split) {
  std::vector<double> pos;
  std::vector<double> neg;
  pos.reserve(split.test_edges.size());
  neg.reserve(split.negative_edges.size());
  for (const Edge& e : split.test_edges) pos.push_back(scorer(e.src, e.dst));
  for (const Edge& e : split.negative_edges) neg.push_back(scorer(e.src, e.dst));
  return roc_auc(pos, neg);
}

EvalReport run_evaluation(const LinkPredSplit& split, const EvalConfig& cfg,
                          const std::string& dataset) {
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  };

  EvalReport report;
  report.dataset = dataset;
  report.split_seed = split.seed;
  const auto train = std::make_shared<const Graph>(split.train_graph);

  std::shared_ptr<const PersonaGraph> personas;
  double persona_seconds = 0.0;
  auto persona_graph = [&] {
    if (!personas) {
      const auto t0 = Clock::now();
      personas = std::make_shared<const PersonaGraph>(
          persona_decompose(*train, connected_components_clustering()));
      persona_seconds = seconds_since(t0);
    }
    return personas;
  };

  for (Method m : cfg.methods) {
    if (is_embedding_method(m)) continue;
    const auto t0 = Clock::now();
    EdgeScorer scorer;
    double extra = 0.0;
    switch (m) {
      case Method::kJaccard: scorer = jaccard_scorer(train); break;
      case Method::kCommonNeighbors: scorer = common_neighbors_scorer(train); break;
      case Method::kAdamicAdar: scorer = adamic_adar_scorer(train); break;
      case Method::kRandom: scorer = random_scorer(split.seed); break;
      default: {
        const auto pg = persona_graph();
        extra = persona_seconds;
        const auto pgraph = std::shared_ptr<const Graph>(pg, &pg->graph());
        EdgeScorer base = m == Method::kPersonaJaccard ? jaccard_scorer(pgraph)
                          : m == Method::kPersonaCommonNeighbors
                              ? common_neighbors_scorer(pgraph)
                              : adamic_adar_scorer(pgraph);
        scorer = persona_scorer(std::move(base), pg, cfg.aggregate);
      }
    }
    const double auc = evaluate_scorer(scorer, split);
    report.rows.push_back({method_name(m), 0, auc, seconds_since(t0) + extra});
  }

  const bool want_deepwalk = std::count(cfg.methods.begin(), cfg.methods.end(), Method::kDeepWalk) > 0;
  const bool want_splitter = std::count(cfg.methods.begin(), cfg.methods.end(), Method::kSplitter) > 0;
  if (!want_deepwalk && !want_splitter) return report;

  for (std::size_t dim : cfg.dims) {
    TrainConfig train_cfg = cfg.train;
    train_cfg.dim = dim;
    const auto t0 = Clock::now();
    const EmbeddingTable base = train_base(*train, cfg.walk, train_cfg);
    const double base_seconds = seconds_since(t0);
    if (want_deepwalk) {
      const auto vectors = std::make_shared<const Matrix>(base.input);
      report.rows.push_back({method_name(Method::kDeepWalk), dim,
                             evaluate_scorer(dot_product_scorer(vectors), split),
                             base_seconds});
    }
    if (want_splitter) {
      const auto pg = persona_graph();
      const auto t1 = Clock::now();
      const auto model = std::make_shared<const SplitterModel>(
          train_splitter(*train, *pg, cfg.walk, train_cfg, base));
      const double auc = evaluate_scorer(splitter_scorer(model), split);
      report.rows.push_back({method_name(Method::kSplitter), dim, auc,
                             base_seconds + persona_seconds + seconds_since(t1)});
    }
  }
  return report;
}

void write_report_tsv(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "dataset\tsplit_seed\tmethod\td\tauc\tseconds\n";
  for (const EvalReport& r : reports) {
    for (const EvalRow& row : r.rows) {
      out << r.dataset << '\t' << r.split_seed << '\t' << row.method << '\t';
      if (row.dim == 0) {
        out << '-';
      } else {
        out << row.dim;
      }
      out << '\t' << std::fixed << std::setprecision(4) << row.auc << '\t'
          << std::setprecision(3) << row.seconds << '\n';
      out.unsetf(std::ios::floatfield);
    }
  }
}

std::vector<EvalSummaryRow> summarize(const std::vector<EvalReport>& reports) {
  std::vector<EvalSummaryRow> rows;
  std::map<std::pair<std::string, std::size_t>, std::vector<const EvalRow*>> groups;
  for (const EvalReport& r : reports) {
    for (const EvalRow& row : r.rows) {
      auto& group = groups[{row.method, row.dim}];
      if (group.empty()) rows.push_back({row.method, row.dim});
      group.push_back(&row);
    }
  }
  for (EvalSummaryRow& s : rows) {
    const auto& group = groups[{s.method, s.dim}];
    s.runs = group.size();
    for (const EvalRow* row : group) {
      s.mean_auc += row->auc;
      s.mean_seconds += row->seconds;
    }
    s.mean_auc /= static_cast<double>(s.runs);
    s.mean_seconds /= static_cast<double>(s.runs);
    if (s.runs > 1) {
      double ss = 0.0;
      for (const EvalRow* row : group) ss += (row->auc - s.mean_auc) * (row->auc - s.mean_auc);
      s.stddev_auc = std::sqrt(ss / static_cast<double>(s.runs - 1));
    }
  }
  return rows;
}

void write_summary_table(std::ostream& out, const std::string& dataset,
                         const std::vector<EvalSummaryRow>& rows) {
  out << std::left << std::setw(14) << "dataset" << std::setw(12) << "method"
      << std::setw(6) << "d" << std::setw(18) << "AUC" << "time (s)\n";
  for (const EvalSummaryRow& s : rows) {
    std::ostringstream auc;
    auc << std::fixed << std::setprecision(3) << s.mean_auc;
    if (s.runs > 1) auc << " +- " << std::setprecision(3) << s.stddev_auc;
    out << std::left << std::setw(14) << dataset << std::setw(12) << s.method
        << std::setw(6) << (s.dim == 0 ? std::string("-") : std::to_string(s.dim))
        << std::setw(18) << auc.str() << std::fixed << std::setprecision(2)
        << s.mean_seconds << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

}  // namespace splitter
