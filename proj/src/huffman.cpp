#include "splitter/huffman.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

namespace splitter {

HuffmanTree HuffmanTree::build(std::span<const double> weights) {
  const std::size_t n = weights.size();
  HuffmanTree tree;
  tree.offsets_.assign(n + 1, 0);
  if (n <= 1) return tree;

  using Entry = std::pair<double, std::uint32_t>;  // (weight, node id)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("negative Huffman weight");
    heap.emplace(weights[i], i);
  }
  // Node ids: leaves [0, n), internal nodes [n, 2n - 1).
  std::vector<std::uint32_t> parent(2 * n - 1, 0);
  std::vector<std::uint8_t> branch(2 * n - 1, 0);
  auto next = static_cast<std::uint32_t>(n);
  while (heap.size() > 1) {
    const auto [w0, a] = heap.top();
    heap.pop();
    const auto [w1, b] = heap.top();
    heap.pop();
    parent[a] = next;
    parent[b] = next;
    branch[b] = 1;
    heap.emplace(w0 + w1, next);
    ++next;
  }
  const std::uint32_t root = next - 1;

  std::vector<std::uint32_t> up_points;
  std::vector<std::uint8_t> up_codes;
  for (std::uint32_t leaf = 0; leaf < n; ++leaf) {
    up_points.clear();
    up_codes.clear();
    for (std::uint32_t node = leaf; node != root; node = parent[node]) {
      up_codes.push_back(branch[node]);
      up_points.push_back(parent[node] - static_cast<std::uint32_t>(n));
    }
    tree.points_.insert(tree.points_.end(), up_points.rbegin(), up_points.rend());
    tree.codes_.insert(tree.codes_.end(), up_codes.rbegin(), up_codes.rend());
    tree.offsets_[leaf + 1] = tree.points_.size();
  }
  return tree;
}

}  // namespace splitter
