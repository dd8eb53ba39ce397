#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "splitter/graph.hpp"
#include "splitter/persona.hpp"
#include "splitter/trainer.hpp"

namespace splitter {

// Held-out evaluation data. train_graph keeps every node of the source graph
// under the same ids; only the test edges are missing.
struct LinkPredSplit {
  Graph train_graph;
  std::vector<Edge> test_edges;
  std::vector<Edge> negative_edges;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Removes floor(fraction * |E|) edges in seeded random order, skipping any
// whose removal would disconnect the (weakly) connected residual graph, and
// draws as many distinct non-edges of g as negatives. Returns fewer test
// edges, with a warning, when not enough edges can be removed; a graph with
// too few non-edges likewise gets fewer negatives and a warning.
LinkPredSplit split_edges(const Graph& g, double fraction, std::uint64_t seed);

void write_split(std::ostream& out, const LinkPredSplit& split);
// Rebuilds a split written by write_split against the graph it came from.
LinkPredSplit read_split(std::istream& in, const Graph& g);

// Higher scores mean a link is more likely.
using EdgeScorer = std::function<double(NodeId, NodeId)>;

// Neighborhood scores over the out-neighbors of the given graph.
EdgeScorer jaccard_scorer(std::shared_ptr<const Graph> g);
EdgeScorer common_neighbors_scorer(std::shared_ptr<const Graph> g);
// Natural log; common neighbors of degree <= 1 contribute nothing.
EdgeScorer adamic_adar_scorer(std::shared_ptr<const Graph> g);

enum class Aggregate { kMax, kMin, kMean };

// Aggregates a persona-level score over all persona pairs of (u, v).
EdgeScorer persona_scorer(EdgeScorer base, std::shared_ptr<const PersonaGraph> pg,
                          Aggregate aggregate = Aggregate::kMax);

// Maximum dot product over all persona pairs.
EdgeScorer splitter_scorer(std::shared_ptr<const SplitterModel> model);

// Dot product of one vector per node.
EdgeScorer dot_product_scorer(std::shared_ptr<const Matrix> vectors);

// Deterministic pseudo-random score per pair; the null model.
EdgeScorer random_scorer(std::uint64_t seed);

// Mann-Whitney AUC: P(positive > negative) with ties counted as one half.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

enum class Method {
  kJaccard,
  kCommonNeighbors,
  kAdamicAdar,
  kPersonaJaccard,
  kPersonaCommonNeighbors,
  kPersonaAdamicAdar,
  kDeepWalk,
  kSplitter,
  kRandom,
};

std::string method_name(Method m);
Method parse_method(const std::string& name);
// Comma separated list, e.g. "jc,cn,splitter".
std::vector<Method> parse_methods(const std::string& list);
bool is_embedding_method(Method m);

struct EvalConfig {
  std::vector<Method> methods;
  std::vector<std::size_t> dims{16};
  WalkConfig walk;
  TrainConfig train;
  Aggregate aggregate = Aggregate::kMax;
};

struct EvalRow {
  std::string method;
  std::size_t dim = 0;  // 0 for methods without embeddings
  double auc = 0.0;
  double seconds = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::uint64_t split_seed = 0;
  std::vector<EvalRow> rows;
};

// Every method is built from split.train_graph alone and scored on the test
// and negative pairs.
EvalReport run_evaluation(const LinkPredSplit& split, const EvalConfig& cfg,
                          const std::string& dataset = "");

// Scores both pair lists and returns the AUC.
double evaluate_scorer(const EdgeScorer& scorer, const LinkPredSplit& split);

void write_report_tsv(std::ostream& out, const std::vector<EvalReport>& reports);

// Mean and sample standard deviation of each (method, d) over reports.
struct EvalSummaryRow {
  std::string method;
  std::size_t dim = 0;
  double mean_auc = 0.0;
  double stddev_auc = 0.0;
  double mean_seconds = 0.0;
  std::size_t runs = 0;
};
std::vector<EvalSummaryRow> summarize(const std::vector<EvalReport>& reports);
void write_summary_table(std::ostream& out, const std::string& dataset,
                         const std::vector<EvalSummaryRow>& rows);

}  // namespace splitter
