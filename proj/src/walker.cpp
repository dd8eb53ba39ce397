#include "splitter/walker.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

namespace splitter {

void WalkConfig::validate() const {
  if (walk_length < 2) throw std::invalid_argument("walk length must be >= 2");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

void WalkCorpus::add(std::span<const NodeId> walk) {
  tokens_.insert(tokens_.end(), walk.begin(), walk.end());
  offsets_.push_back(tokens_.size());
}

std::vector<std::uint64_t> WalkCorpus::frequencies(std::size_t vocab_size) const {
  std::vector<std::uint64_t> counts(vocab_size, 0);
  for (NodeId id : tokens_) ++counts.at(id);
  return counts;
}

std::vector<NodeId> random_walk(const Graph& g, NodeId start,
                                std::size_t length, Rng& rng) {
  g.check_node(start);
  std::vector<NodeId> walk;
  walk.reserve(length);
  walk.push_back(start);
  while (walk.size() < length) {
    const auto adj = g.neighbors(walk.back());
    if (adj.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, adj.size() - 1);
    walk.push_back(adj[pick(rng)]);
  }
  return walk;
}

WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<NodeId> order(g.num_nodes());
  std::iota(order.begin(), order.end(), NodeId{0});
  WalkCorpus corpus;
  for (std::size_t pass = 0; pass < cfg.walks_per_node; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (NodeId start : order) {
      corpus.add(random_walk(g, start, cfg.walk_length, rng));
    }
  }
  return corpus;
}

void write_corpus(std::ostream& out, const WalkCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.num_walks(); ++i) {
    const auto walk = corpus.walk(i);
    for (std::size_t k = 0; k < walk.size(); ++k) {
      if (k > 0) out << ' ';
      out << walk[k];
    }
    out << '\n';
  }
}

std::vector<std::pair<NodeId, NodeId>> context_pairs(
    std::span<const NodeId> walk, std::size_t window) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for_each_context_pair(walk, window,
                        [&](NodeId c, NodeId k) { out.emplace_back(c, k); });
  return out;
}

std::size_t count_context_pairs(std::size_t walk_length, std::size_t window) {
  std::size_t total = 0;
  for (std::size_t j = 0; j < walk_length; ++j) {
    const std::size_t lo = j >= window ? j - window : 0;
    const std::size_t hi = std::min(walk_length - 1, j + window);
    total += hi - lo + 1;
  }
  return total - walk_length;
}

}  // namespace splitter
