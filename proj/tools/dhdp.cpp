#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dhdp/errors.hpp"
#include "dhdp/model.hpp"
#include "dhdp/pipeline.hpp"

namespace {

// CLI11 has no std::optional<uint64> binding that distinguishes "absent";
// use a sentinel string option instead.
std::optional<std::uint64_t> parse_seed(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return std::stoull(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic HDP topic modelling and abnormality scoring"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file ('#' comments)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // extract-words
  auto* extract = app.add_subcommand(
      "extract-words", "Quantise optical-flow records into a visual-word corpus");
  dhdp::pipeline::ExtractOptions extract_options;
  extract->add_option("--flow", extract_options.flow_path, "flow CSV file")->required();
  extract->add_option("--cells-x", extract_options.cells_x, "grid cells along x")
      ->required();
  extract->add_option("--cells-y", extract_options.cells_y, "grid cells along y")
      ->required();
  extract->add_option("--frames-per-clip", extract_options.frames_per_clip,
                      "frames per document");
  extract->add_option("--threshold", extract_options.threshold,
                      "minimum flow magnitude (px/frame) emitting a word");
  extract->add_option("--out", extract_options.out_dir, "output directory")->required();

  // generate-synthetic
  auto* generate = app.add_subcommand(
      "generate-synthetic", "Generate bar-topic corpora with planted abnormal documents");
  dhdp::pipeline::GenerateOptions generate_options;
  std::string generate_seed;
  generate->add_option("--train-docs", generate_options.train_docs, "training documents");
  generate->add_option("--test-docs", generate_options.test_docs, "test documents");
  generate->add_option("--abnormal", generate_options.abnormal,
                       "abnormal documents planted in the test sequence");
  generate->add_option("--words-per-doc", generate_options.words_per_doc,
                       "words per document");
  generate->add_option("--alpha", generate_options.alpha, "table concentration");
  generate->add_option("--gamma", generate_options.gamma, "topic concentration");
  generate->add_option("--delta", generate_options.delta, "global weight");
  generate->add_option("--noise", generate_options.noise, "bar-topic noise level");
  generate->add_option("--seed", generate_seed, "generator seed (default: entropy)");
  generate->add_option("--out-dir", generate_options.out_dir, "output directory")
      ->required();

  // train
  auto* train = app.add_subcommand("train", "Batch Gibbs training");
  dhdp::pipeline::TrainOptions train_options;
  std::string train_model = "dhdp";
  std::string train_seed;
  train->add_option("--corpus", train_options.corpus_path, "corpus file")->required();
  train->add_option("--model", train_model, "dhdp or hdp");
  train->add_option("--alpha", train_options.alpha, "table concentration");
  train->add_option("--gamma", train_options.gamma, "topic concentration");
  train->add_option("--eta", train_options.eta, "word Dirichlet parameter");
  train->add_option("--delta", train_options.delta, "global weight (dynamic model)");
  train->add_option("--burn-in", train_options.burn_in, "burn-in sweeps");
  train->add_option("--chains", train_options.chains, "independent chains");
  train->add_option("--seed", train_seed, "master seed (default: entropy)");
  train->add_flag("--quiet", train_options.quiet, "suppress progress lines");
  train->add_option("--out", train_options.out_dir, "output directory")->required();

  // score
  auto* score = app.add_subcommand(
      "score", "Online inference and abnormality scores for a test corpus");
  dhdp::pipeline::ScoreOptions score_options;
  std::string score_seed;
  score->add_option("--model-dir", score_options.model_dir,
                    "directory with chain_<c>.snapshot files")
      ->required();
  score->add_option("--corpus", score_options.corpus_path, "test corpus")->required();
  score->add_option("--online-sweeps", score_options.online_sweeps,
                    "sweeps per test document");
  score->add_option("--seed", score_seed, "scoring seed (default: entropy)");
  score->add_flag("--literal-likelihood", score_options.literal_likelihood,
                  "emit (1/N) p instead of the per-word log likelihood");
  score->add_option("--out", score_options.out_dir, "output directory")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "ROC curve and AUC against labels");
  dhdp::pipeline::EvaluateOptions evaluate_options;
  evaluate->add_option("--scores", evaluate_options.scores_path, "scores CSV")
      ->required();
  evaluate->add_option("--labels", evaluate_options.labels_path, "labels CSV")
      ->required();
  evaluate->add_option("--out-roc", evaluate_options.out_dir, "output directory")
      ->required();

  // true-score
  auto* true_score = app.add_subcommand(
      "true-score", "Scores from the generator's own topics and assignments");
  dhdp::pipeline::TrueScoreOptions true_options;
  double true_noise = -1.0;
  true_score->add_option("--corpus", true_options.corpus_path, "test corpus")
      ->required();
  true_score->add_option("--truth", true_options.truth_path, "ground-truth file")
      ->required();
  true_score->add_option("--noise", true_noise,
                         "bar noise override (default: the generator's value)");
  true_score->add_option("--out", true_options.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*extract) {
      auto outcome = dhdp::pipeline::run_extract(extract_options);
      if (outcome.resorted) {
        std::cerr << "warning: flow records were not sorted by frame; sorted "
                     "internally\n";
      }
      if (outcome.documents == 0) {
        std::cerr << "warning: empty flow file produced a corpus with zero "
                     "documents\n";
      }
      std::cout << "corpus=" << outcome.corpus_path
                << " documents=" << outcome.documents << " tokens=" << outcome.tokens
                << " empty_documents=" << outcome.empty_documents << "\n";
    } else if (*generate) {
      generate_options.seed = parse_seed(generate_seed);
      auto outcome = dhdp::pipeline::run_generate(generate_options);
      std::cout << "seed=" << outcome.seed << " train=" << outcome.train_corpus
                << " test=" << outcome.test_corpus << " labels=" << outcome.test_labels
                << " truth=" << outcome.truth_file << "\n";
    } else if (*train) {
      train_options.model = dhdp::model_kind_from_string(train_model);
      train_options.seed = parse_seed(train_seed);
      auto outcome = dhdp::pipeline::run_train(train_options);
      std::cout << "seed=" << outcome.seed
                << " snapshots=" << outcome.snapshot_paths.size() << "\n";
    } else if (*score) {
      score_options.seed = parse_seed(score_seed);
      auto outcome = dhdp::pipeline::run_score(score_options);
      std::cout << "seed=" << outcome.seed << " scores=" << outcome.scores_path
                << " documents=" << outcome.documents << " chains=" << outcome.chains
                << "\n";
    } else if (*evaluate) {
      auto outcome = dhdp::pipeline::run_evaluate(evaluate_options);
      std::cout << dhdp::summary_line(outcome.summary) << "\n";
    } else if (*true_score) {
      if (true_noise >= 0.0) true_options.noise = true_noise;
      auto outcome = dhdp::pipeline::run_true_score(true_options);
      if (!outcome.warning.empty()) std::cerr << outcome.warning << "\n";
      std::cout << "scores=" << outcome.scores_path << "\n";
    }
  } catch (const dhdp::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
