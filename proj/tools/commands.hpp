#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "splitter/linkpred.hpp"
#include "splitter/trainer.hpp"
#include "splitter/walker.hpp"

namespace splitter::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kInternalError = 3,
};

struct RunConfig {
  std::string input;
  bool directed = false;
  WalkConfig walk;
  TrainConfig train;
  std::vector<std::size_t> dims{16};
  double fraction = 0.5;
  std::uint64_t seed = 1;
  std::string methods = "jc,cn,aa,persona-jc,persona-cn,persona-aa,deepwalk,splitter";
  std::size_t repeat = 1;
  std::string out = ".";
  std::string split_in;
  bool save_split = false;
  std::string dataset;  // defaults to the input file stem
};

struct ProjectOptions {
  std::string input;
  std::string method = "pca";
  std::string out;
};

// Each command logs progress to `log` and returns an ExitCode.
int cmd_persona(const RunConfig& cfg, std::ostream& log);
int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_eval(const RunConfig& cfg, std::ostream& log);
int cmd_project(const ProjectOptions& opts, std::ostream& log);

// Parses argv and dispatches; the process entry point.
int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace splitter::cli
