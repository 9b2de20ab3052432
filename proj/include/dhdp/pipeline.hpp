#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dhdp/corpus.hpp"
#include "dhdp/eval.hpp"
#include "dhdp/model.hpp"

namespace dhdp::pipeline {

// Every command writes its outputs plus the fully resolved configuration
// (run.config, key=value lines) under its output directory, so a run can
// be reproduced from the directory alone.

struct ExtractOptions {
  std::string flow_path;
  int cells_x = 0;
  int cells_y = 0;
  int frames_per_clip = 25;
  double threshold = 0.5;
  std::string out_dir;
};

struct ExtractOutcome {
  std::string corpus_path;
  std::size_t documents = 0;
  std::size_t tokens = 0;
  std::size_t empty_documents = 0;
  bool resorted = false;
};

ExtractOutcome run_extract(const ExtractOptions& options);

struct GenerateOptions {
  int train_docs = 2000;
  int test_docs = 1000;
  int abnormal = 300;
  int words_per_doc = 20;
  double alpha = 1.5;
  double gamma = 2.0;
  double delta = 0.5;
  double noise = 0.01;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

struct GenerateOutcome {
  std::uint64_t seed = 0;
  std::string train_corpus;
  std::string test_corpus;
  std::string test_labels;
  std::string truth_file;
};

GenerateOutcome run_generate(const GenerateOptions& options);

struct TrainOptions {
  std::string corpus_path;
  ModelKind model = ModelKind::kDynamicHdp;
  double alpha = 1.5;
  double gamma = 2.0;
  double eta = 0.2;
  double delta = 0.5;
  int burn_in = 1000;
  int chains = 5;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
};

struct TrainOutcome {
  std::uint64_t seed = 0;
  std::vector<std::string> snapshot_paths;
};

TrainOutcome run_train(const TrainOptions& options);

struct ScoreOptions {
  std::string model_dir;
  std::string corpus_path;
  int online_sweeps = 1000;
  std::optional<std::uint64_t> seed;
  bool literal_likelihood = false;
  std::string out_dir;
};

struct ScoreOutcome {
  std::uint64_t seed = 0;
  std::string scores_path;
  int documents = 0;
  int chains = 0;
};

ScoreOutcome run_score(const ScoreOptions& options);

struct EvaluateOptions {
  std::string scores_path;
  std::string labels_path;
  std::string out_dir;
};

struct EvaluateOutcome {
  EvalSummary summary;
  std::string roc_path;
};

EvaluateOutcome run_evaluate(const EvaluateOptions& options);

struct TrueScoreOptions {
  std::string corpus_path;
  std::string truth_path;
  std::optional<double> noise;  // defaults to the generator's recorded value
  std::string out_dir;
};

struct TrueScoreOutcome {
  std::string scores_path;
  std::string warning;  // nonempty when the noise override disagrees
};

TrueScoreOutcome run_true_score(const TrueScoreOptions& options);

}  // namespace dhdp::pipeline
