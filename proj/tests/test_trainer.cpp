#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "splitter/trainer.hpp"

using namespace splitter;
using namespace splitter::testing;

namespace {

std::vector<double> random_vector(std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(d);
  for (double& x : v) x = normal(rng);
  return v;
}

void randomize(Matrix& m, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  for (double& x : m.data()) x = normal(rng);
}

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> w(n);
  for (double& x : w) x = 1.0 + static_cast<double>(rng() % 20);
  return w;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)});
}

double cosine(std::span<const double> a, std::span<const double> b) {
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

WalkConfig small_walks(std::uint64_t seed, std::size_t passes = 10, std::size_t length = 20) {
  WalkConfig w;
  w.walks_per_node = passes;
  w.walk_length = length;
  w.window = 3;
  w.seed = seed;
  return w;
}

TrainConfig small_train(std::size_t dim, std::uint64_t seed) {
  TrainConfig t;
  t.dim = dim;
  t.seed = seed;
  return t;
}

// Mean dot product between rows of a and rows of b, skipping identical rows.
double mean_dot(const Matrix& m, const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  double sum = 0.0;
  std::size_t count = 0;
  for (NodeId x : a)
    for (NodeId y : b)
      if (x != y) {
        sum += dot(m.row(x), m.row(y));
        ++count;
      }
  return sum / static_cast<double>(count);
}

}  // namespace

TEST_CASE("hierarchical softmax sums to one over the vocabulary") {
  std::mt19937_64 rng(1);
  for (std::size_t vocab = 1; vocab <= 64; ++vocab) {
    const std::size_t d = 1 + rng() % 8;
    OutputLayer out = OutputLayer::hierarchical(random_weights(vocab, rng), d);
    randomize(out.weights(), rng);
    const auto vec = random_vector(d, rng);
    double total = 0.0;
    for (NodeId leaf = 0; leaf < vocab; ++leaf) {
      const double p = output_probability(out, vec, leaf);
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hierarchical softmax edge cases") {
  const std::vector<double> two{1.0, 1.0};
  const OutputLayer out2 = OutputLayer::hierarchical(two, 3);
  const std::vector<double> zero(3, 0.0);
  CHECK(output_probability(out2, zero, 0) == doctest::Approx(0.5));
  CHECK(output_probability(out2, zero, 1) == doctest::Approx(0.5));

  const std::vector<double> one{4.0};
  const OutputLayer out1 = OutputLayer::hierarchical(one, 3);
  std::mt19937_64 rng(2);
  CHECK(output_probability(out1, random_vector(3, rng), 0) == 1.0);
  CHECK(output_loss(out1, random_vector(3, rng), 0) == 0.0);
}

TEST_CASE("pair loss gradient matches central finite differences") {
  std::mt19937_64 rng(3);
  const double eps = 1e-6;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t vocab = 2 + rng() % 30;
    const std::size_t d = 1 + rng() % 8;
    OutputLayer out = OutputLayer::hierarchical(random_weights(vocab, rng), d);
    randomize(out.weights(), rng, 0.5);
    auto vec = random_vector(d, rng, 0.5);
    const NodeId target = static_cast<NodeId>(rng() % vocab);

    std::vector<double> gvec(d, 0.0);
    Matrix gw(out.weights().rows(), d);
    output_loss_gradient(out, vec, target, gvec, gw);

    for (std::size_t c = 0; c < d; ++c) {
      const double keep = vec[c];
      vec[c] = keep + eps;
      const double up = output_loss(out, vec, target);
      vec[c] = keep - eps;
      const double down = output_loss(out, vec, target);
      vec[c] = keep;
      CHECK(relative_error(gvec[c], (up - down) / (2 * eps)) <= 1e-4);
    }
    for (std::size_t r = 0; r < gw.rows(); ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        double& w = out.weights().row(r)[c];
        const double keep = w;
        w = keep + eps;
        const double up = output_loss(out, vec, target);
        w = keep - eps;
        const double down = output_loss(out, vec, target);
        w = keep;
        const double fd = (up - down) / (2 * eps);
        if (gw.row(r)[c] == 0.0) {
          CHECK(std::abs(fd) < 1e-9);  // off-path internal node
        } else {
          CHECK(relative_error(gw.row(r)[c], fd) <= 1e-4);
        }
      }
    }
  }
}

TEST_CASE("combined persona objective gradient matches finite differences") {
  std::mt19937_64 rng(4);
  const double eps = 1e-6;
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + rng() % 8;
    SplitterModel model;
    model.p2n.assign(pg.p2n().begin(), pg.p2n().end());
    model.persona_offsets = {0, 1, 2, 4, 5, 6};
    model.persona_table.input = Matrix(pg.num_personas(), d);
    randomize(model.persona_table.input, rng, 0.5);
    model.persona_table.output =
        OutputLayer::hierarchical(random_weights(pg.num_personas(), rng), d);
    randomize(model.persona_table.output.weights(), rng, 0.5);
    model.node_output = OutputLayer::hierarchical(random_weights(g.num_nodes(), rng), d);
    randomize(model.node_output.weights(), rng, 0.5);

    const double lambda = 0.1 + std::uniform_real_distribution<double>(0, 2)(rng);
    const NodeId center = static_cast<NodeId>(rng() % pg.num_personas());
    const NodeId context = static_cast<NodeId>(rng() % pg.num_personas());

    std::vector<double> g1(d, 0.0), g2(d, 0.0);
    Matrix w1(model.persona_table.output.weights().rows(), d);
    Matrix w2(model.node_output.weights().rows(), d);
    const auto vec0 = model.persona_table.input.row(center);
    std::vector<double> vec(vec0.begin(), vec0.end());
    output_loss_gradient(model.persona_table.output, vec, context, g1, w1);
    output_loss_gradient(model.node_output, vec, model.p2n[center], g2, w2);

    auto row = model.persona_table.input.row(center);
    for (std::size_t c = 0; c < d; ++c) {
      const double keep = row[c];
      row[c] = keep + eps;
      const double up = splitter_pair_objective(model, center, context, lambda);
      row[c] = keep - eps;
      const double down = splitter_pair_objective(model, center, context, lambda);
      row[c] = keep;
      CHECK(relative_error(g1[c] + lambda * g2[c], (up - down) / (2 * eps)) <= 1e-4);
    }

    // The two SGD steps together move the vector along the combined gradient.
    const double alpha = 1e-3;
    SplitterModel stepped = model;
    sgd_step_pair(stepped.persona_table, center, context, alpha);
    const auto mid = stepped.persona_table.input.row(center);
    for (std::size_t c = 0; c < d; ++c)
      CHECK(mid[c] == doctest::Approx(vec[c] - alpha * g1[c]).epsilon(1e-12));
    std::vector<double> g2_mid(d, 0.0);
    Matrix w2_mid(model.node_output.weights().rows(), d);
    output_loss_gradient(stepped.node_output, mid, model.p2n[center], g2_mid, w2_mid);
    const std::vector<double> before(mid.begin(), mid.end());
    sgd_step_regularizer(stepped, center, alpha, lambda);
    for (std::size_t c = 0; c < d; ++c) {
      CHECK(stepped.persona_table.input.row(center)[c] ==
            doctest::Approx(before[c] - alpha * lambda * g2_mid[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("sgd_step_pair: loss falls for a small step; zero rate is a no-op") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t vocab = 2 + rng() % 20;
    EmbeddingTable table;
    table.input = Matrix(vocab, 6);
    randomize(table.input, rng, 0.3);
    table.output = OutputLayer::hierarchical(random_weights(vocab, rng), 6);
    randomize(table.output.weights(), rng, 0.3);
    const NodeId center = static_cast<NodeId>(rng() % vocab);
    const NodeId context = static_cast<NodeId>(rng() % vocab);

    const EmbeddingTable frozen = table;
    sgd_step_pair(table, center, context, 0.0);
    CHECK(table.input == frozen.input);
    CHECK(table.output.weights() == frozen.output.weights());

    const double before = output_loss(table.output, table.input.row(center), context);
    sgd_step_pair(table, center, context, 0.01);
    const double after = output_loss(table.output, table.input.row(center), context);
    CHECK(after < before);
  }
}

TEST_CASE("sgd_step_pair: non-finite input fails fast") {
  EmbeddingTable table;
  table.input = Matrix(3, 2);
  const std::vector<double> w{1, 1, 1};
  table.output = OutputLayer::hierarchical(w, 2);
  table.output.weights().row(0)[0] = 1.0;
  table.output.weights().row(1)[0] = 1.0;
  table.input.row(0)[0] = std::nan("");
  CHECK_THROWS_AS(sgd_step_pair(table, 0, 1, 0.1), NumericalError);
}

TEST_CASE("sgd_step_regularizer: lambda or alpha zero leaves the model unchanged") {
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  TrainConfig cfg = small_train(4, 1);
  const EmbeddingTable base = train_base(g, small_walks(1, 2, 5), cfg);
  SplitterModel model = train_splitter(g, pg, small_walks(1, 2, 5), cfg, base);
  const SplitterModel frozen = model;
  sgd_step_regularizer(model, 2, 0.025, 0.0);
  sgd_step_regularizer(model, 3, 0.0, 0.1);
  CHECK(model.persona_table.input == frozen.persona_table.input);
  CHECK(model.node_output.weights() == frozen.node_output.weights());
  sgd_step_regularizer(model, 3, 0.025, 0.1);
  CHECK_FALSE(model.persona_table.input == frozen.persona_table.input);
}

TEST_CASE("learning rate decays linearly to the floor") {
  TrainConfig cfg;
  CHECK(learning_rate(cfg, 0, 100) == cfg.alpha);
  CHECK(learning_rate(cfg, 50, 100) == doctest::Approx(cfg.alpha / 2));
  CHECK(learning_rate(cfg, 100, 100) == cfg.alpha_floor);
  double prev = cfg.alpha;
  for (std::uint64_t n = 0; n <= 1000; ++n) {
    const double lr = learning_rate(cfg, n, 1000);
    CHECK(lr <= prev);
    CHECK(lr >= cfg.alpha_floor);
    prev = lr;
  }
}

TEST_CASE("TrainConfig validation") {
  TrainConfig cfg;
  cfg.dim = 0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.alpha_floor = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = TrainConfig{};
  cfg.lambda = -1;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("train_base: deterministic with one worker") {
  const Graph g = two_cliques(5);
  const EmbeddingTable a = train_base(g, small_walks(9), small_train(8, 9));
  const EmbeddingTable b = train_base(g, small_walks(9), small_train(8, 9));
  CHECK(a.input == b.input);
  CHECK(a.output.weights() == b.output.weights());
  std::ostringstream sa, sb;
  write_base_embeddings(sa, a, g);
  write_base_embeddings(sb, b, g);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("train_base: zero passes leave the initialization") {
  const Graph g = two_cliques(4);
  WalkConfig w = small_walks(3);
  w.walks_per_node = 0;
  const TrainConfig t = small_train(6, 3);
  const EmbeddingTable trained = train_base(g, w, t);
  const EmbeddingTable init = init_table(g.num_nodes(), WalkCorpus{}, t);
  CHECK(trained.input == init.input);
  const double half = 0.5 / 6;
  for (double v : trained.input.data()) CHECK(std::abs(v) <= half);
  for (double v : trained.output.weights().data()) CHECK(v == 0.0);
}

TEST_CASE("train_base: two cliques joined by an edge separate") {
  const Graph g = two_cliques(10);
  std::vector<NodeId> left(10), right(10);
  std::iota(left.begin(), left.end(), 0);
  std::iota(right.begin(), right.end(), 10);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const EmbeddingTable t = train_base(g, small_walks(seed), small_train(16, seed));
    const double within = (mean_dot(t.input, left, left) + mean_dot(t.input, right, right)) / 2;
    CHECK(within > mean_dot(t.input, left, right));
  }
}

TEST_CASE("training loss falls from the first to the last quarter") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const Graph g = random_connected(10 + rng() % 40, 30, rng);
    TrainConfig t = small_train(8, trial + 1);
    t.record_loss = true;
    t.loss_segments = 4;
    TrainStats stats;
    train_base(g, small_walks(trial + 1), t, &stats);
    REQUIRE(stats.segment_loss.size() == 4);
    CHECK(stats.segment_loss.back() < stats.segment_loss.front());
    CHECK(stats.pairs > 0);
  }
}

TEST_CASE("train_splitter: personas start as copies of their node") {
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  const TrainConfig t = small_train(4, 2);
  const EmbeddingTable base = train_base(g, small_walks(2), t);
  WalkConfig none = small_walks(2);
  none.walks_per_node = 0;
  const SplitterModel model = train_splitter(g, pg, none, t, base);
  const auto c = pg.personas_of(2);
  CHECK(cosine(model.persona_table.input.row(c[0]), model.persona_table.input.row(c[1])) ==
        doctest::Approx(1.0));
  for (NodeId p = 0; p < pg.num_personas(); ++p) {
    const auto a = model.persona_table.input.row(p);
    const auto b = base.input.row(pg.original_node(p));
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("train_splitter: rejects a base of the wrong dimension") {
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  const EmbeddingTable base = train_base(g, small_walks(1, 1), small_train(4, 1));
  CHECK_THROWS_AS(train_splitter(g, pg, small_walks(1, 1), small_train(8, 1), base),
                  std::invalid_argument);
}

TEST_CASE("train_splitter: bowtie personas side with their triangle") {
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  const auto c = pg.personas_of(2);
  const NodeId a = pg.personas_of(0)[0], b = pg.personas_of(1)[0];
  const NodeId d = pg.personas_of(3)[0], e = pg.personas_of(4)[0];
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainConfig t = small_train(2, seed);
    const EmbeddingTable base = train_base(g, small_walks(seed), t);
    const SplitterModel m = train_splitter(g, pg, small_walks(seed), t, base);
    const Matrix& x = m.persona_table.input;
    const bool first = dot(x.row(c[0]), x.row(a)) + dot(x.row(c[0]), x.row(b)) >
                       dot(x.row(c[0]), x.row(d)) + dot(x.row(c[0]), x.row(e));
    const bool second = dot(x.row(c[1]), x.row(d)) + dot(x.row(c[1]), x.row(e)) >
                        dot(x.row(c[1]), x.row(a)) + dot(x.row(c[1]), x.row(b));
    good += first && second;
  }
  CHECK(good >= 3);
}

TEST_CASE("train_splitter: a large lambda pulls a node's personas together") {
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  const auto c = pg.personas_of(2);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    TrainConfig t = small_train(8, seed);
    const EmbeddingTable base = train_base(g, small_walks(seed), t);
    t.lambda = 0.0;
    const SplitterModel free = train_splitter(g, pg, small_walks(seed), t, base);
    t.lambda = 10.0;
    const SplitterModel tied = train_splitter(g, pg, small_walks(seed), t, base);
    const double cos_free =
        cosine(free.persona_table.input.row(c[0]), free.persona_table.input.row(c[1]));
    const double cos_tied =
        cosine(tied.persona_table.input.row(c[0]), tied.persona_table.input.row(c[1]));
    CHECK(cos_tied > cos_free);
  }
}

TEST_CASE("train_splitter: an unstable regularizer step fails fast") {
  // alpha * lambda = 25 overshoots every sigmoid and the scores blow up.
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  TrainConfig t = small_train(8, 1);
  const EmbeddingTable base = train_base(g, small_walks(1), t);
  t.lambda = 1e3;
  CHECK_THROWS_AS(train_splitter(g, pg, small_walks(1), t, base), NumericalError);
}

TEST_CASE("train_splitter with lambda zero on a clique replays base training") {
  for (std::size_t n : {4, 7}) {
    const Graph g = complete_graph(n);
    const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
    REQUIRE(pg.num_personas() == n);
    TrainConfig t = small_train(8, 21);
    t.record_loss = true;
    const WalkConfig w = small_walks(21);
    const EmbeddingTable base = train_base(g, w, t);

    t.lambda = 0.0;
    TrainStats split_stats, replay_stats;
    const SplitterModel model = train_splitter(g, pg, w, t, base, &split_stats);
    const EmbeddingTable replay = train_base(pg.graph(), w, t, &replay_stats, &base.input);
    CHECK(split_stats.segment_loss == replay_stats.segment_loss);
    CHECK(model.persona_table.input == replay.input);
  }
}

TEST_CASE("regularizer can reuse the base output layer") {
  const Graph g = bowtie();
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  TrainConfig t = small_train(4, 6);
  t.regularizer_output = RegularizerOutput::kBaseOutput;
  const EmbeddingTable base = train_base(g, small_walks(6), t);
  const SplitterModel m = train_splitter(g, pg, small_walks(6), t, base);
  CHECK(m.node_output.vocab_size() == g.num_nodes());
  for (double v : m.persona_table.input.data()) CHECK(std::isfinite(v));
}

TEST_CASE("negative sampling objective trains and separates") {
  const Graph g = two_cliques(8);
  std::vector<NodeId> left(8), right(8);
  std::iota(left.begin(), left.end(), 0);
  std::iota(right.begin(), right.end(), 8);
  TrainConfig t = small_train(16, 4);
  t.objective = Objective::kNegativeSampling;
  t.record_loss = true;
  t.loss_segments = 4;
  TrainStats stats;
  const EmbeddingTable e = train_base(g, small_walks(4), t, &stats);
  CHECK(stats.segment_loss.back() < stats.segment_loss.front());
  const double within = (mean_dot(e.input, left, left) + mean_dot(e.input, right, right)) / 2;
  CHECK(within > mean_dot(e.input, left, right));
}

TEST_CASE("parallel training produces finite embeddings of the right shape") {
  const Graph g = two_cliques(10);
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  TrainConfig t = small_train(8, 5);
  t.threads = 4;
  const EmbeddingTable base = train_base(g, small_walks(5), t);
  const SplitterModel m = train_splitter(g, pg, small_walks(5), t, base);
  CHECK(m.persona_table.input.rows() == pg.num_personas());
  for (double v : m.persona_table.input.data()) CHECK(std::isfinite(v));
}

TEST_CASE("embedding files: header, persona labels, sidecar, round trip") {
  const Graph g = parse("a b\nb c\na c\nc d\nd e\nc e\n");
  const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
  const TrainConfig t = small_train(3, 1);
  const EmbeddingTable base = train_base(g, small_walks(1, 2), t);
  const SplitterModel m = train_splitter(g, pg, small_walks(1, 2), t, base);
  std::ostringstream emb;
  write_splitter_embeddings(emb, m, g);
  CHECK(emb.str().rfind("6 3\n", 0) == 0);
  CHECK(emb.str().find("\nc|1 ") != std::string::npos);
  std::istringstream in(emb.str());
  const LabeledVectors back = read_embeddings(in);
  REQUIRE(back.vectors.rows() == 6);
  CHECK(back.labels[3] == "c|1");
  for (std::size_t i = 0; i < back.vectors.data().size(); ++i) {
    CHECK(back.vectors.data()[i] ==
          doctest::Approx(m.persona_table.input.data()[i]).epsilon(1e-7));
  }
  std::ostringstream sidecar;
  write_splitter_mapping(sidecar, m, g);
  CHECK(sidecar.str() == "a|0\ta\nb|0\tb\nc|0\tc\nc|1\tc\nd|0\td\ne|0\te\n");
}
