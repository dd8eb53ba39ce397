#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "splitter/graph.hpp"
#include "splitter/persona.hpp"
#include "splitter/project.hpp"

#ifndef SPLITTER_VERSION
#define SPLITTER_VERSION "0.0.0"
#endif

namespace splitter::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files are written under a temporary name and renamed into place on
// commit(); anything not committed is deleted.
class StagedOutputs {
 public:
  explicit StagedOutputs(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;

  ~StagedOutputs() {
    if (committed_) return;
    std::error_code ignored;
    for (const auto& [tmp, final_path] : files_) fs::remove(tmp, ignored);
  }

  std::ofstream open(const std::string& name) {
    const fs::path final_path = dir_ / name;
    const fs::path tmp = dir_ / (name + ".partial");
    std::ofstream out(tmp);
    if (!out) throw GraphError("cannot write '" + tmp.string() + "'");
    files_.emplace_back(tmp, final_path);
    return out;
  }

  void commit() {
    for (const auto& [tmp, final_path] : files_) fs::rename(tmp, final_path);
    committed_ = true;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [tmp, final_path] : files_) out.push_back(final_path.filename().string());
    return out;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> files_;
  bool committed_ = false;
};

const char* objective_name(Objective o) {
  return o == Objective::kHierarchicalSoftmax ? "hs" : "ns";
}

const char* regularizer_name(RegularizerOutput r) {
  return r == RegularizerOutput::kSeparateTree ? "separate" : "base";
}

json manifest_for(const std::string& command, const RunConfig& cfg) {
  json m;
  m["command"] = command;
  m["version"] = SPLITTER_VERSION;
  m["input"] = cfg.input;
  m["directed"] = cfg.directed;
  m["seed"] = cfg.seed;
  m["walk"] = {{"walks_per_node", cfg.walk.walks_per_node},
               {"walk_length", cfg.walk.walk_length},
               {"window", cfg.walk.window},
               {"seed", cfg.walk.seed}};
  m["train"] = {{"dims", cfg.dims},
                {"alpha", cfg.train.alpha},
                {"alpha_floor", cfg.train.alpha_floor},
                {"lambda", cfg.train.lambda},
                {"seed", cfg.train.seed},
                {"threads", cfg.train.threads},
                {"objective", objective_name(cfg.train.objective)},
                {"negatives", cfg.train.negatives},
                {"regularizer", regularizer_name(cfg.train.regularizer_output)}};
  if (command == "eval") {
    m["fraction"] = cfg.fraction;
    m["methods"] = cfg.methods;
    m["repeat"] = cfg.repeat;
    m["split_in"] = cfg.split_in;
  }
  return m;
}

// Writes manifest.json and returns the hash embedded in the other artifacts.
std::string stage_manifest(StagedOutputs& outputs, json manifest) {
  const std::string hash = fnv1a_hex(manifest.dump());
  manifest["hash"] = hash;
  auto names = outputs.names();
  names.push_back("manifest.json");
  manifest["artifacts"] = names;
  auto out = outputs.open("manifest.json");
  out << manifest.dump(2) << '\n';
  return hash;
}

Graph load_largest_component(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.empty()) throw UsageError("an input edge list is required");
  IngestStats stats;
  const Graph raw = read_edge_list_file(cfg.input, cfg.directed, &stats);
  log << "read " << cfg.input << ": " << raw.num_nodes() << " nodes, " << raw.num_edges()
      << (cfg.directed ? " directed" : "") << " edges";
  if (stats.self_loops + stats.duplicates > 0) {
    log << " (dropped " << stats.self_loops << " self-loops, " << stats.duplicates
        << " duplicate edges)";
  }
  log << '\n';
  if (cfg.directed && stats.reciprocal_pairs > 0) {
    log << "  " << stats.reciprocal_pairs << " reciprocal pairs; "
        << raw.num_edges() - stats.reciprocal_pairs << " edges once symmetrized\n";
  }
  Subgraph lcc = largest_connected_component(raw);
  log << "largest component: " << lcc.graph.num_nodes() << " nodes, "
      << lcc.graph.num_edges() << " edges\n";
  return std::move(lcc.graph);
}

RunConfig with_derived_seeds(RunConfig cfg) {
  cfg.walk.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  return cfg;
}

std::string dataset_name(const RunConfig& cfg) {
  if (!cfg.dataset.empty()) return cfg.dataset;
  return fs::path(cfg.input).stem().string();
}

template <typename F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    log << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const GraphError& e) {
    log << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    log << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

int cmd_persona(const RunConfig& raw_cfg, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = with_derived_seeds(raw_cfg);
    const Graph g = load_largest_component(cfg, log);
    const PersonaGraph pg = persona_decompose(g, connected_components_clustering());

    StagedOutputs outputs(cfg.out);
    json manifest = manifest_for("persona", cfg);
    const std::string hash = fnv1a_hex(manifest.dump());
    {
      auto edges = outputs.open("persona_edges.tsv");
      edges << "# manifest " << hash << '\n';
      write_persona_edges(edges, pg);
      auto mapping = outputs.open("persona_mapping.tsv");
      mapping << "# manifest " << hash << '\n';
      write_persona_mapping(mapping, pg, g);
    }
    stage_manifest(outputs, manifest);
    outputs.commit();

    log << "|V| = " << g.num_nodes() << "\n|E| = " << g.num_edges()
        << "\n|V_P| = " << pg.num_personas() << "\n|E_P| = " << pg.graph().num_edges()
        << "\navg personas per node = " << std::fixed << std::setprecision(2)
        << avg_personas_per_node(pg) << '\n';
    log.unsetf(std::ios::floatfield);
    return kOk;
  });
}

int cmd_train(const RunConfig& raw_cfg, std::ostream& log) {
  return guarded(log, [&] {
    if (raw_cfg.dims.size() != 1) throw UsageError("train takes a single --dim");
    RunConfig cfg = with_derived_seeds(raw_cfg);
    cfg.train.dim = cfg.dims.front();
    cfg.train.validate();
    cfg.walk.validate();
    const Graph g = load_largest_component(cfg, log);
    if (cfg.walk.walks_per_node == 0) {
      log << "warning: zero walks per node; embeddings stay at their initialization\n";
    }

    const PersonaGraph pg = persona_decompose(g, connected_components_clustering());
    log << "persona graph: " << pg.num_personas() << " personas ("
        << avg_personas_per_node(pg) << " per node)\n";

    TrainStats base_stats;
    const EmbeddingTable base = train_base(g, cfg.walk, cfg.train, &base_stats);
    log << "base embedding: " << base_stats.pairs << " pairs in " << base_stats.seconds
        << " s\n";
    TrainStats splitter_stats;
    const SplitterModel model =
        train_splitter(g, pg, cfg.walk, cfg.train, base, &splitter_stats);
    log << "splitter embedding: " << splitter_stats.pairs << " pairs in "
        << splitter_stats.seconds << " s\n";

    StagedOutputs outputs(cfg.out);
    const json manifest = manifest_for("train", cfg);
    const std::string hash = fnv1a_hex(manifest.dump());
    {
      auto base_out = outputs.open("base.emb");
      write_base_embeddings(base_out, base, g);
      auto persona_out = outputs.open("splitter.emb");
      write_splitter_embeddings(persona_out, model, g);
      auto mapping = outputs.open("splitter_mapping.tsv");
      mapping << "# manifest " << hash << '\n';
      write_splitter_mapping(mapping, model, g);
    }
    stage_manifest(outputs, manifest);
    outputs.commit();
    log << "wrote " << pg.num_personas() << " persona vectors to "
        << (fs::path(cfg.out) / "splitter.emb").string() << '\n';
    return kOk;
  });
}

int cmd_eval(const RunConfig& raw_cfg, std::ostream& log) {
  return guarded(log, [&] {
    if (raw_cfg.repeat < 1) throw UsageError("--repeat must be >= 1");
    const Graph g = load_largest_component(raw_cfg, log);

    EvalConfig eval;
    eval.methods = parse_methods(raw_cfg.methods);
    if (eval.methods.empty()) throw UsageError("no methods selected");
    eval.dims = raw_cfg.dims;

    std::vector<EvalReport> reports;
    StagedOutputs outputs(raw_cfg.out);
    for (std::size_t r = 0; r < raw_cfg.repeat; ++r) {
      RunConfig cfg = raw_cfg;
      cfg.seed = raw_cfg.seed + r;
      cfg = with_derived_seeds(cfg);
      eval.walk = cfg.walk;
      eval.train = cfg.train;

      LinkPredSplit split;
      if (!cfg.split_in.empty()) {
        std::ifstream in(cfg.split_in);
        if (!in) throw GraphError("cannot open split file '" + cfg.split_in + "'");
        split = read_split(in, g);
      } else {
        split = split_edges(g, cfg.fraction, cfg.seed);
      }
      for (const auto& w : split.warnings) log << "warning: " << w << '\n';
      log << "split seed " << split.seed << ": " << split.train_graph.num_edges()
          << " train edges, " << split.test_edges.size() << " test edges, "
          << split.negative_edges.size() << " negatives\n";
      if (cfg.save_split) {
        auto out = outputs.open("split_seed" + std::to_string(split.seed) + ".tsv");
        write_split(out, split);
      }
      reports.push_back(run_evaluation(split, eval, dataset_name(cfg)));
      for (const EvalRow& row : reports.back().rows) {
        log << "  " << row.method << (row.dim ? " d=" + std::to_string(row.dim) : "")
            << ": AUC " << std::fixed << std::setprecision(4) << row.auc << '\n';
        log.unsetf(std::ios::floatfield);
      }
    }

    const json manifest = manifest_for("eval", raw_cfg);
    const std::string hash = fnv1a_hex(manifest.dump());
    {
      auto report = outputs.open("report.tsv");
      report << "# manifest " << hash << '\n';
      write_report_tsv(report, reports);
      auto table = outputs.open("report.txt");
      table << "# manifest " << hash << '\n';
      write_summary_table(table, dataset_name(raw_cfg), summarize(reports));
    }
    stage_manifest(outputs, manifest);
    outputs.commit();
    write_summary_table(log, dataset_name(raw_cfg), summarize(reports));
    return kOk;
  });
}

int cmd_project(const ProjectOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    if (opts.method != "pca") throw UsageError("unknown projection '" + opts.method + "'");
    std::ifstream in(opts.input);
    if (!in) throw GraphError("cannot open '" + opts.input + "'");
    LabeledVectors emb;
    try {
      emb = read_embeddings(in);
    } catch (const std::runtime_error& e) {
      throw GraphError(e.what());
    }
    if (emb.vectors.cols() < 2) {
      throw GraphError("embeddings have fewer than 2 dimensions");
    }
    const Matrix coords = pca_project(emb.vectors, 2);
    const std::string out_path =
        opts.out.empty() ? fs::path(opts.input).replace_extension(".pca.tsv").string()
                         : opts.out;
    const fs::path target(out_path);
    StagedOutputs outputs(target.has_parent_path() ? target.parent_path() : fs::path("."));
    {
      auto out = outputs.open(target.filename().string());
      write_coordinates(out, emb.labels, coords);
    }
    outputs.commit();
    log << "projected " << emb.vectors.rows() << " vectors to " << out_path << '\n';
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Persona decomposition and multi-vector node embeddings"};
  app.set_config("--config", "", "TOML file with default flag values");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string objective = "hs";
  std::string regularizer = "separate";

  auto add_graph_flags = [&](CLI::App* cmd) {
    cmd->add_option("input", cfg.input, "Edge list (SNAP format)")->required();
    cmd->add_flag("--directed", cfg.directed, "Treat edges as directed");
    cmd->add_option("--out", cfg.out, "Output directory");
  };
  auto add_train_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dim", cfg.dims, "Embedding dimension(s)")->delimiter(',');
    cmd->add_option("--walks", cfg.walk.walks_per_node, "Walks per node");
    cmd->add_option("--walk-len", cfg.walk.walk_length, "Nodes per walk");
    cmd->add_option("--window", cfg.walk.window, "Skip-gram window");
    cmd->add_option("--lambda", cfg.train.lambda, "Persona regularization coefficient");
    cmd->add_option("--alpha", cfg.train.alpha, "Initial learning rate");
    cmd->add_option("--alpha-floor", cfg.train.alpha_floor, "Minimum learning rate");
    cmd->add_option("--seed", cfg.seed, "Random seed");
    cmd->add_option("--threads", cfg.train.threads,
                    "Training workers (1 = deterministic)");
    cmd->add_option("--objective", objective, "hs (hierarchical softmax) or ns")
        ->check(CLI::IsMember({"hs", "ns"}));
    cmd->add_option("--negatives", cfg.train.negatives, "Noise samples per pair (ns)");
    cmd->add_option("--regularizer", regularizer,
                    "Output layer of the persona regularizer: separate or base")
        ->check(CLI::IsMember({"separate", "base"}));
  };

  auto* persona = app.add_subcommand("persona", "Build and export the persona graph");
  add_graph_flags(persona);

  auto* train = app.add_subcommand("train", "Train base and persona embeddings");
  add_graph_flags(train);
  add_train_flags(train);

  auto* eval = app.add_subcommand("eval", "Link prediction evaluation");
  add_graph_flags(eval);
  add_train_flags(eval);
  eval->add_option("--fraction", cfg.fraction, "Share of edges held out");
  eval->add_option("--methods", cfg.methods, "Comma separated methods");
  eval->add_option("--repeat", cfg.repeat, "Independent splits (seed, seed+1, ...)");
  eval->add_option("--split-in", cfg.split_in, "Re-evaluate a saved split");
  eval->add_flag("--save-split", cfg.save_split, "Write the split next to the report");
  eval->add_option("--dataset", cfg.dataset, "Dataset name for reports");

  ProjectOptions project_opts;
  auto* project = app.add_subcommand("project", "2-D PCA coordinates of an embedding file");
  project->add_option("input", project_opts.input, "Embedding file")->required();
  project->add_option("--method", project_opts.method, "Projection method (pca)");
  project->add_option("--out", project_opts.out, "Output TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return kUsageError;
  }
  cfg.train.objective =
      objective == "ns" ? Objective::kNegativeSampling : Objective::kHierarchicalSoftmax;
  cfg.train.regularizer_output = regularizer == "base" ? RegularizerOutput::kBaseOutput
                                                       : RegularizerOutput::kSeparateTree;

  if (*persona) return cmd_persona(cfg, log);
  if (*train) return cmd_train(cfg, log);
  if (*eval) return cmd_eval(cfg, log);
  if (*project) return cmd_project(project_opts, log);
  return kUsageError;
}

}  // namespace splitter::cli
