#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "splitter/embedding.hpp"
#include "splitter/graph.hpp"
#include "splitter/persona.hpp"
#include "splitter/walker.hpp"

namespace splitter {

// Where the persona regularizer's Pr(node | persona vector) comes from.
enum class RegularizerOutput {
  // A fresh hierarchical softmax over the original nodes, leaves weighted by
  // degree, trained jointly with the personas.
  kSeparateTree,
  // A copy of the base model's output layer, trained further.
  kBaseOutput,
};

struct TrainConfig {
  std::size_t dim = 16;
  double alpha = 0.025;
  double alpha_floor = 0.025 * 1e-4;
  double lambda = 0.1;
  std::uint64_t seed = 1;
  // 1 trains deterministically; more workers update shared parameters without
  // locks and results depend on scheduling.
  std::size_t threads = 1;
  Objective objective = Objective::kHierarchicalSoftmax;
  std::size_t negatives = 5;
  RegularizerOutput regularizer_output = RegularizerOutput::kSeparateTree;
  // Collect the mean pair loss per training segment (costs one log per
  // output node visited).
  bool record_loss = false;
  std::size_t loss_segments = 20;

  void validate() const;
};

// alpha0 * (1 - processed / total), clamped below at alpha_floor.
double learning_rate(const TrainConfig& cfg, std::uint64_t processed,
                     std::uint64_t total);

struct TrainStats {
  std::uint64_t tokens = 0;
  std::uint64_t pairs = 0;
  // Mean skip-gram pair loss per equal slice of the corpus (record_loss).
  std::vector<double> segment_loss;
  double seconds = 0.0;
};

// Persona vectors with the output layers of both objectives.
struct SplitterModel {
  EmbeddingTable persona_table;
  OutputLayer node_output;
  std::vector<NodeId> p2n;
  // personas_of(node) is [persona_offsets[node], persona_offsets[node + 1]).
  std::vector<std::size_t> persona_offsets;

  std::size_t dim() const { return persona_table.dim(); }
  std::size_t num_nodes() const { return persona_offsets.size() - 1; }
};

// Pr(target | center_vec) under the table's hierarchical softmax.
double hs_probability(const EmbeddingTable& table,
                      std::span<const double> center_vec, NodeId target);

// One gradient step on -log Pr(context | center). Returns the pre-step loss
// when track_loss is set.
double sgd_step_pair(EmbeddingTable& table, NodeId center, NodeId context,
                     double alpha, Rng* rng = nullptr, bool track_loss = false);

// One gradient step with rate alpha * lambda on
// -log Pr(p2n(persona) | persona vector). No-op when lambda or alpha is 0.
void sgd_step_regularizer(SplitterModel& model, NodeId persona, double alpha,
                          double lambda, Rng* rng = nullptr);

// Loss of one context pair plus lambda times the regularizer for the center,
// i.e. the per-pair objective the Splitter steps descend.
double splitter_pair_objective(const SplitterModel& model, NodeId center,
                               NodeId context, double lambda);

// Random input vectors in [-0.5/d, 0.5/d]; output layer built from the
// corpus frequencies with zeroed parameters.
EmbeddingTable init_table(std::size_t vocab, const WalkCorpus& corpus,
                          const TrainConfig& cfg);

// DeepWalk: skip-gram over uniform random walks on g. initial_vectors
// replaces the random initialization when given.
EmbeddingTable train_base(const Graph& g, const WalkConfig& walk_cfg,
                          const TrainConfig& train_cfg,
                          TrainStats* stats = nullptr,
                          const Matrix* initial_vectors = nullptr);

// Personas start from their node's base vector and are trained on walks over
// the persona graph; each context pair is followed by a regularizer step
// pulling the center persona toward predicting its original node.
SplitterModel train_splitter(const Graph& g, const PersonaGraph& pg,
                             const WalkConfig& walk_cfg,
                             const TrainConfig& train_cfg,
                             const EmbeddingTable& base,
                             TrainStats* stats = nullptr);

// Persona vectors in word2vec text format, labelled `label|k`, plus the
// `persona_label<TAB>original_label` sidecar.
void write_splitter_embeddings(std::ostream& out, const SplitterModel& model,
                               const Graph& original);
void write_splitter_mapping(std::ostream& out, const SplitterModel& model,
                            const Graph& original);
void write_base_embeddings(std::ostream& out, const EmbeddingTable& table,
                           const Graph& g);

}  // namespace splitter
