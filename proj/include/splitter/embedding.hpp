#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitter/graph.hpp"
#include "splitter/huffman.hpp"
#include "splitter/walker.hpp"

namespace splitter {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow for large |x|.
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

enum class Objective { kHierarchicalSoftmax, kNegativeSampling };

// Output side of a skip-gram model. Hierarchical softmax keeps one parameter
// vector per internal node of a Huffman tree over the vocabulary; negative
// sampling keeps one output vector per vocabulary entry and a unigram^0.75
// noise distribution.
class OutputLayer {
 public:
  OutputLayer() = default;

  static OutputLayer hierarchical(std::span<const double> leaf_weights,
                                  std::size_t dim);
  static OutputLayer negative_sampling(std::span<const double> leaf_weights,
                                       std::size_t dim, std::size_t negatives);

  Objective objective() const { return objective_; }
  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t dim() const { return weights_.cols(); }
  const HuffmanTree& tree() const { return tree_; }
  Matrix& weights() { return weights_; }
  const Matrix& weights() const { return weights_; }
  std::size_t negatives() const { return negatives_; }
  NodeId sample_noise(Rng& rng) const;

 private:
  Objective objective_ = Objective::kHierarchicalSoftmax;
  std::size_t vocab_size_ = 0;
  HuffmanTree tree_;
  Matrix weights_;
  std::size_t negatives_ = 0;
  std::vector<double> noise_cdf_;
};

// Pr(target | vec). Normalized over the vocabulary under hierarchical
// softmax; under negative sampling the per-target sigmoid score.
double output_probability(const OutputLayer& out, std::span<const double> vec,
                          NodeId target);

// -log Pr(target | vec) under hierarchical softmax.
double output_loss(const OutputLayer& out, std::span<const double> vec,
                   NodeId target);

// Analytic gradient of output_loss: adds d/dvec into vec_grad and
// d/dweights into weights_grad (same shape as out.weights()).
void output_loss_gradient(const OutputLayer& out, std::span<const double> vec,
                          NodeId target, std::span<double> vec_grad,
                          Matrix& weights_grad);

// One SGD step on the output side for predicting `target` from `vec`.
// Output parameters are updated in place; the step for vec itself is added
// to vec_step so the caller can apply it after all output updates. With
// track_loss, returns the loss of the sampled terms before the update (0
// otherwise). rng is only used by negative sampling.
double output_sgd(OutputLayer& out, std::span<const double> vec, NodeId target,
                  double lr, std::span<double> vec_step, Rng* rng,
                  bool track_loss = false);

// Input vectors plus the output layer they are trained against.
struct EmbeddingTable {
  Matrix input;
  OutputLayer output;

  std::size_t dim() const { return input.cols(); }
  std::size_t vocab_size() const { return input.rows(); }
};

// word2vec text format: "<rows> <dim>" then "<label> v1 ... vd" per row.
void write_embeddings(std::ostream& out, const Matrix& vectors,
                      const std::vector<std::string>& labels);

struct LabeledVectors {
  std::vector<std::string> labels;
  Matrix vectors;
};
LabeledVectors read_embeddings(std::istream& in);

}  // namespace splitter
