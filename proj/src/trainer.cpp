#include "splitter/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace splitter {

void TrainConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(alpha_floor > 0.0) || !(alpha_floor <= alpha)) {
    throw std::invalid_argument("learning rates must satisfy 0 < floor <= alpha");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (objective == Objective::kNegativeSampling && negatives < 1) {
    throw std::invalid_argument("negative sampling needs at least one negative");
  }
}

double learning_rate(const TrainConfig& cfg, std::uint64_t processed,
                     std::uint64_t total) {
  if (total == 0) return cfg.alpha;
  const double frac = static_cast<double>(processed) / static_cast<double>(total);
  return std::max(cfg.alpha_floor, cfg.alpha * (1.0 - frac));
}

namespace {

void add_into(std::span<double> dst, std::span<const double> src) {
  for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
}

void regularize(SplitterModel& model, NodeId persona, double lr, double lambda,
                Rng* rng, std::span<double> scratch) {
  if (lambda == 0.0 || lr == 0.0) return;
  auto vec = model.persona_table.input.row(persona);
  std::fill(scratch.begin(), scratch.end(), 0.0);
  output_sgd(model.node_output, vec, model.p2n[persona], lr * lambda, scratch, rng);
  add_into(vec, scratch);
}

Rng worker_rng(std::uint64_t seed, std::size_t worker) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(worker), 0x5eedU};
  return Rng(seq);
}

struct LossAccumulator {
  std::vector<double> sum;
  std::vector<std::uint64_t> count;
};

// Skip-gram over the corpus. after_pair(center, lr, rng, scratch) runs after
// every pair update.
template <typename AfterPair>
void run_skipgram(EmbeddingTable& table, const WalkCorpus& corpus,
                  std::size_t window, const TrainConfig& cfg, TrainStats* stats,
                  AfterPair&& after_pair) {
  const auto start_time = std::chrono::steady_clock::now();
  const std::uint64_t total = corpus.num_tokens();
  const std::size_t segments = std::max<std::size_t>(cfg.loss_segments, 1);
  const bool track = cfg.record_loss && stats != nullptr;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(cfg.threads, corpus.num_walks()));
  std::atomic<std::uint64_t> processed{0};
  std::atomic<std::uint64_t> pair_count{0};
  std::vector<LossAccumulator> losses(workers);

  auto work = [&](std::size_t worker) {
    Rng rng = worker_rng(cfg.seed, worker);
    std::vector<double> step(table.dim());
    std::vector<double> scratch(table.dim());
    LossAccumulator& acc = losses[worker];
    if (track) {
      acc.sum.assign(segments, 0.0);
      acc.count.assign(segments, 0);
    }
    std::uint64_t pairs = 0;
    const std::size_t begin = corpus.num_walks() * worker / workers;
    const std::size_t end = corpus.num_walks() * (worker + 1) / workers;
    for (std::size_t w = begin; w < end; ++w) {
      const auto walk = corpus.walk(w);
      const std::uint64_t base = processed.load(std::memory_order_relaxed);
      for (std::size_t j = 0; j < walk.size(); ++j) {
        const std::uint64_t n = std::min(base + j, total);
        const double lr = learning_rate(cfg, n, total);
        const std::size_t segment =
            std::min<std::size_t>(segments - 1, n * segments / std::max<std::uint64_t>(total, 1));
        const NodeId center = walk[j];
        const std::size_t lo = j >= window ? j - window : 0;
        const std::size_t hi = std::min(walk.size() - 1, j + window);
        for (std::size_t k = lo; k <= hi; ++k) {
          if (k == j) continue;
          auto vec = table.input.row(center);
          std::fill(step.begin(), step.end(), 0.0);
          const double loss =
              output_sgd(table.output, vec, walk[k], lr, step, &rng, track);
          add_into(vec, step);
          if (track) {
            acc.sum[segment] += loss;
            ++acc.count[segment];
          }
          after_pair(center, lr, rng, std::span<double>(scratch));
          ++pairs;
        }
      }
      processed.fetch_add(walk.size(), std::memory_order_relaxed);
    }
    pair_count.fetch_add(pairs, std::memory_order_relaxed);
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  if (stats != nullptr) {
    stats->tokens = total;
    stats->pairs = pair_count.load();
    stats->segment_loss.clear();
    if (track) {
      for (std::size_t s = 0; s < segments; ++s) {
        double sum = 0.0;
        std::uint64_t count = 0;
        for (const auto& acc : losses) {
          sum += acc.sum[s];
          count += acc.count[s];
        }
        stats->segment_loss.push_back(count > 0 ? sum / static_cast<double>(count) : 0.0);
      }
    }
    stats->seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start_time)
                         .count();
  }
}

OutputLayer make_output(std::span<const double> weights, const TrainConfig& cfg) {
  if (cfg.objective == Objective::kNegativeSampling) {
    return OutputLayer::negative_sampling(weights, cfg.dim, cfg.negatives);
  }
  return OutputLayer::hierarchical(weights, cfg.dim);
}

std::vector<double> corpus_weights(const WalkCorpus& corpus, std::size_t vocab) {
  const auto counts = corpus.frequencies(vocab);
  return {counts.begin(), counts.end()};
}

}  // namespace

double hs_probability(const EmbeddingTable& table,
                      std::span<const double> center_vec, NodeId target) {
  return output_probability(table.output, center_vec, target);
}

double sgd_step_pair(EmbeddingTable& table, NodeId center, NodeId context,
                     double alpha, Rng* rng, bool track_loss) {
  if (center >= table.vocab_size()) throw std::out_of_range("center not in vocabulary");
  if (alpha == 0.0) {
    return track_loss ? output_loss(table.output, table.input.row(center), context)
                      : 0.0;
  }
  auto vec = table.input.row(center);
  std::vector<double> step(table.dim(), 0.0);
  const double loss = output_sgd(table.output, vec, context, alpha, step, rng, track_loss);
  add_into(vec, step);
  return loss;
}

void sgd_step_regularizer(SplitterModel& model, NodeId persona, double alpha,
                          double lambda, Rng* rng) {
  if (persona >= model.p2n.size()) throw std::out_of_range("unknown persona");
  std::vector<double> scratch(model.dim());
  regularize(model, persona, alpha, lambda, rng, scratch);
}

double splitter_pair_objective(const SplitterModel& model, NodeId center,
                               NodeId context, double lambda) {
  const auto vec = model.persona_table.input.row(center);
  return output_loss(model.persona_table.output, vec, context) +
         lambda * output_loss(model.node_output, vec, model.p2n.at(center));
}

EmbeddingTable init_table(std::size_t vocab, const WalkCorpus& corpus,
                          const TrainConfig& cfg) {
  EmbeddingTable table;
  table.input = Matrix(vocab, cfg.dim);
  Rng rng(cfg.seed);
  const double half = 0.5 / static_cast<double>(cfg.dim);
  std::uniform_real_distribution<double> init(-half, half);
  for (double& v : table.input.data()) v = init(rng);
  table.output = make_output(corpus_weights(corpus, vocab), cfg);
  return table;
}

EmbeddingTable train_base(const Graph& g, const WalkConfig& walk_cfg,
                          const TrainConfig& train_cfg, TrainStats* stats,
                          const Matrix* initial_vectors) {
  train_cfg.validate();
  if (g.num_nodes() == 0) throw std::invalid_argument("cannot embed an empty graph");
  const WalkCorpus corpus = generate_corpus(g, walk_cfg);
  EmbeddingTable table = init_table(g.num_nodes(), corpus, train_cfg);
  if (initial_vectors != nullptr) {
    if (initial_vectors->rows() != g.num_nodes() ||
        initial_vectors->cols() != train_cfg.dim) {
      throw std::invalid_argument("initial vectors have the wrong shape");
    }
    table.input = *initial_vectors;
  }
  run_skipgram(table, corpus, walk_cfg.window, train_cfg, stats,
               [](NodeId, double, Rng&, std::span<double>) {});
  return table;
}

SplitterModel train_splitter(const Graph& g, const PersonaGraph& pg,
                             const WalkConfig& walk_cfg,
                             const TrainConfig& train_cfg,
                             const EmbeddingTable& base, TrainStats* stats) {
  train_cfg.validate();
  if (base.dim() != train_cfg.dim) {
    throw std::invalid_argument("base embedding has dimension " +
                                std::to_string(base.dim()) + ", config asks for " +
                                std::to_string(train_cfg.dim));
  }
  if (base.vocab_size() != g.num_nodes() || pg.num_original_nodes() != g.num_nodes()) {
    throw std::invalid_argument("base embedding, persona graph and graph disagree on |V|");
  }
  const Graph& persona_graph = pg.graph();
  const WalkCorpus corpus = generate_corpus(persona_graph, walk_cfg);

  SplitterModel model;
  model.p2n.assign(pg.p2n().begin(), pg.p2n().end());
  model.persona_offsets.assign(g.num_nodes() + 1, 0);
  for (NodeId node = 0; node < g.num_nodes(); ++node) {
    model.persona_offsets[node + 1] =
        model.persona_offsets[node] + pg.personas_of(node).size();
  }

  model.persona_table.input = Matrix(pg.num_personas(), train_cfg.dim);
  for (NodeId p = 0; p < pg.num_personas(); ++p) {
    const auto src = base.input.row(model.p2n[p]);
    std::copy(src.begin(), src.end(), model.persona_table.input.row(p).begin());
  }
  model.persona_table.output =
      make_output(corpus_weights(corpus, pg.num_personas()), train_cfg);

  if (train_cfg.regularizer_output == RegularizerOutput::kBaseOutput) {
    model.node_output = base.output;
  } else {
    std::vector<double> degree(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      degree[u] = static_cast<double>(g.undirected_neighbors(u).size());
    }
    model.node_output = make_output(degree, train_cfg);
  }

  const double lambda = train_cfg.lambda;
  run_skipgram(model.persona_table, corpus, walk_cfg.window, train_cfg, stats,
               [&](NodeId center, double lr, Rng& rng, std::span<double> scratch) {
                 regularize(model, center, lr, lambda, &rng, scratch);
               });
  return model;
}

void write_splitter_embeddings(std::ostream& out, const SplitterModel& model,
                               const Graph& original) {
  std::vector<std::string> labels;
  labels.reserve(model.p2n.size());
  for (NodeId p = 0; p < model.p2n.size(); ++p) {
    const NodeId node = model.p2n[p];
    labels.push_back(original.label(node) + "|" +
                     std::to_string(p - model.persona_offsets[node]));
  }
  write_embeddings(out, model.persona_table.input, labels);
}

void write_splitter_mapping(std::ostream& out, const SplitterModel& model,
                            const Graph& original) {
  for (NodeId p = 0; p < model.p2n.size(); ++p) {
    const NodeId node = model.p2n[p];
    out << original.label(node) << '|' << (p - model.persona_offsets[node]) << '\t'
        << original.label(node) << '\n';
  }
}

void write_base_embeddings(std::ostream& out, const EmbeddingTable& table,
                           const Graph& g) {
  std::vector<std::string> labels;
  labels.reserve(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) labels.push_back(g.label(u));
  write_embeddings(out, table.input, labels);
}

}  // namespace splitter
