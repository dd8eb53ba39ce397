#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "splitter/graph.hpp"

namespace splitter {

using Rng = std::mt19937_64;

struct WalkConfig {
  std::size_t walks_per_node = 10;  // passes over the vertex set
  std::size_t walk_length = 40;     // nodes per walk, start included
  std::size_t window = 5;
  std::uint64_t seed = 1;

  // walks_per_node may be 0, which yields an empty corpus.
  void validate() const;
};

// Walks stored back to back; walk i is tokens[offsets[i], offsets[i + 1]).
class WalkCorpus {
 public:
  WalkCorpus() : offsets_{0} {}

  void add(std::span<const NodeId> walk);
  std::size_t num_walks() const { return offsets_.size() - 1; }
  std::size_t num_tokens() const { return tokens_.size(); }
  std::span<const NodeId> walk(std::size_t i) const {
    return {tokens_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const NodeId> tokens() const { return tokens_; }
  // Occurrences of every id in [0, vocab_size).
  std::vector<std::uint64_t> frequencies(std::size_t vocab_size) const;

  friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;

 private:
  std::vector<NodeId> tokens_;
  std::vector<std::size_t> offsets_;
};

// Uniform random walk of up to `length` nodes; stops early at a node without
// out-neighbors.
std::vector<NodeId> random_walk(const Graph& g, NodeId start,
                                std::size_t length, Rng& rng);

// walks_per_node passes; each pass visits the nodes in a freshly shuffled
// order and starts one walk from each.
WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg);

void write_corpus(std::ostream& out, const WalkCorpus& corpus);

// Calls f(center, context) for every position j of the walk and every other
// position k with |j - k| <= window.
template <typename F>
void for_each_context_pair(std::span<const NodeId> walk, std::size_t window,
                           F&& f) {
  const std::size_t len = walk.size();
  for (std::size_t j = 0; j < len; ++j) {
    const std::size_t lo = j >= window ? j - window : 0;
    const std::size_t hi = std::min(len - 1, j + window);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (k != j) f(walk[j], walk[k]);
    }
  }
}

std::vector<std::pair<NodeId, NodeId>> context_pairs(
    std::span<const NodeId> walk, std::size_t window);

// Closed form for the number of pairs produced from a walk of this length.
std::size_t count_context_pairs(std::size_t walk_length, std::size_t window);

}  // namespace splitter
