#include "splitter/embedding.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace splitter {

namespace {

[[noreturn]] void non_finite(const char* where, NodeId target, double score) {
  std::ostringstream msg;
  msg << "non-finite score " << score << " in " << where << " (target "
      << target << "); lower the learning rate";
  throw NumericalError(msg.str());
}

}  // namespace

OutputLayer OutputLayer::hierarchical(std::span<const double> leaf_weights,
                                      std::size_t dim) {
  OutputLayer out;
  out.objective_ = Objective::kHierarchicalSoftmax;
  out.vocab_size_ = leaf_weights.size();
  out.tree_ = HuffmanTree::build(leaf_weights);
  out.weights_ = Matrix(out.tree_.num_internal(), dim);
  return out;
}

OutputLayer OutputLayer::negative_sampling(std::span<const double> leaf_weights,
                                           std::size_t dim,
                                           std::size_t negatives) {
  OutputLayer out;
  out.objective_ = Objective::kNegativeSampling;
  out.vocab_size_ = leaf_weights.size();
  out.weights_ = Matrix(leaf_weights.size(), dim);
  out.negatives_ = negatives;
  out.noise_cdf_.resize(leaf_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < leaf_weights.size(); ++i) {
    total += std::pow(std::max(leaf_weights[i], 0.0), 0.75);
    out.noise_cdf_[i] = total;
  }
  if (total <= 0.0) {
    // Degenerate weights: fall back to uniform noise.
    for (std::size_t i = 0; i < out.noise_cdf_.size(); ++i) {
      out.noise_cdf_[i] = static_cast<double>(i + 1);
    }
  }
  return out;
}

NodeId OutputLayer::sample_noise(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, noise_cdf_.back());
  const auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), unit(rng));
  return static_cast<NodeId>(
      std::min<std::ptrdiff_t>(it - noise_cdf_.begin(),
                               static_cast<std::ptrdiff_t>(noise_cdf_.size()) - 1));
}

double output_probability(const OutputLayer& out, std::span<const double> vec,
                          NodeId target) {
  if (target >= out.vocab_size()) throw std::out_of_range("target not in vocabulary");
  if (out.objective() == Objective::kNegativeSampling) {
    return sigmoid(dot(vec, out.weights().row(target)));
  }
  const auto path = out.tree().path(target);
  const auto code = out.tree().code(target);
  double p = 1.0;
  for (std::size_t l = 0; l < path.size(); ++l) {
    const double z = dot(vec, out.weights().row(path[l]));
    p *= code[l] == 0 ? sigmoid(z) : sigmoid(-z);
  }
  return p;
}

double output_loss(const OutputLayer& out, std::span<const double> vec,
                   NodeId target) {
  if (target >= out.vocab_size()) throw std::out_of_range("target not in vocabulary");
  if (out.objective() != Objective::kHierarchicalSoftmax) {
    throw std::logic_error("exact loss needs hierarchical softmax");
  }
  const auto path = out.tree().path(target);
  const auto code = out.tree().code(target);
  double loss = 0.0;
  for (std::size_t l = 0; l < path.size(); ++l) {
    const double z = dot(vec, out.weights().row(path[l]));
    loss -= log_sigmoid(code[l] == 0 ? z : -z);
  }
  return loss;
}

void output_loss_gradient(const OutputLayer& out, std::span<const double> vec,
                          NodeId target, std::span<double> vec_grad,
                          Matrix& weights_grad) {
  if (out.objective() != Objective::kHierarchicalSoftmax) {
    throw std::logic_error("exact gradient needs hierarchical softmax");
  }
  const auto path = out.tree().path(target);
  const auto code = out.tree().code(target);
  for (std::size_t l = 0; l < path.size(); ++l) {
    const auto node = out.weights().row(path[l]);
    // d/dz of -log sigmoid(+-z) is -(1 - code - sigmoid(z)).
    const double g = -(1.0 - code[l] - sigmoid(dot(vec, node)));
    auto node_grad = weights_grad.row(path[l]);
    for (std::size_t c = 0; c < vec.size(); ++c) {
      vec_grad[c] += g * node[c];
      node_grad[c] += g * vec[c];
    }
  }
}

double output_sgd(OutputLayer& out, std::span<const double> vec, NodeId target,
                  double lr, std::span<double> vec_step, Rng* rng,
                  bool track_loss) {
  const std::size_t d = vec.size();
  double loss = 0.0;
  auto update = [&](std::span<double> node, double label) {
    const double z = dot(vec, node);
    if (!std::isfinite(z)) non_finite("skip-gram update", target, z);
    if (track_loss) loss -= log_sigmoid(label > 0.5 ? z : -z);
    const double g = lr * (label - sigmoid(z));
    for (std::size_t c = 0; c < d; ++c) vec_step[c] += g * node[c];
    for (std::size_t c = 0; c < d; ++c) node[c] += g * vec[c];
  };

  if (out.objective() == Objective::kHierarchicalSoftmax) {
    const auto path = out.tree().path(target);
    const auto code = out.tree().code(target);
    for (std::size_t l = 0; l < path.size(); ++l) {
      update(out.weights().row(path[l]), 1.0 - code[l]);
    }
    return loss;
  }

  update(out.weights().row(target), 1.0);
  if (rng == nullptr) throw std::logic_error("negative sampling needs an rng");
  for (std::size_t k = 0; k < out.negatives(); ++k) {
    const NodeId noise = out.sample_noise(*rng);
    if (noise == target) continue;
    update(out.weights().row(noise), 0.0);
  }
  return loss;
}

void write_embeddings(std::ostream& out, const Matrix& vectors,
                      const std::vector<std::string>& labels) {
  if (labels.size() != vectors.rows()) {
    throw std::invalid_argument("one label per embedding row required");
  }
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  out << std::setprecision(9);
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    out << labels[r];
    for (double v : vectors.row(r)) out << ' ' << v;
    out << '\n';
  }
}

LabeledVectors read_embeddings(std::istream& in) {
  std::size_t rows = 0;
  std::size_t dim = 0;
  if (!(in >> rows >> dim)) {
    throw std::runtime_error("embedding file: missing '<rows> <dim>' header");
  }
  LabeledVectors result;
  result.vectors = Matrix(rows, dim);
  result.labels.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::string label;
    if (!(in >> label)) {
      throw std::runtime_error("embedding file: expected " + std::to_string(rows) +
                               " rows, got " + std::to_string(r));
    }
    for (double& v : result.vectors.row(r)) {
      if (!(in >> v)) {
        throw std::runtime_error("embedding file: short row for '" + label + "'");
      }
    }
    result.labels.push_back(std::move(label));
  }
  return result;
}

}  // namespace splitter
