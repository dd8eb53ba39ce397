#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace splitter {

// Binary Huffman tree over a vocabulary, stored as per-leaf root-to-leaf
// paths. Internal nodes are numbered [0, num_leaves - 1) with the root last.
// A single-leaf vocabulary has no internal nodes and an empty path.
class HuffmanTree {
 public:
  HuffmanTree() = default;

  // Ties between equal weights are broken by leaf id, so the tree is a pure
  // function of the weights.
  static HuffmanTree build(std::span<const double> weights);

  std::size_t num_leaves() const { return offsets_.size() - 1; }
  std::size_t num_internal() const {
    return num_leaves() == 0 ? 0 : num_leaves() - 1;
  }

  // Internal nodes from the root down to the leaf's parent.
  std::span<const std::uint32_t> path(std::uint32_t leaf) const {
    return {points_.data() + offsets_[leaf], offsets_[leaf + 1] - offsets_[leaf]};
  }
  // Branch taken below each node of path(): 0 or 1.
  std::span<const std::uint8_t> code(std::uint32_t leaf) const {
    return {codes_.data() + offsets_[leaf], offsets_[leaf + 1] - offsets_[leaf]};
  }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> points_;
  std::vector<std::uint8_t> codes_;
};

}  // namespace splitter
