#include "dhdp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <thread>

#include "dhdp/abnormality.hpp"
#include "dhdp/corpus_io.hpp"
#include "dhdp/errors.hpp"
#include "dhdp/sampler.hpp"
#include "dhdp/snapshot.hpp"
#include "dhdp/synthgen.hpp"

namespace fs = std::filesystem;

namespace dhdp::pipeline {

namespace {

struct RunConfig {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
  }
  void add(const std::string& key, std::int64_t value) {
    add(key, std::to_string(value));
  }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }

  void write(const fs::path& dir) const {
    std::ofstream out(dir / "run.config");
    if (!out) throw DataError("cannot write " + (dir / "run.config").string());
    out << "# resolved configuration\n";
    for (const auto& [key, value] : entries) {
      out << key << "=" << value << "\n";
    }
    if (!out) throw DataError("failed writing run.config");
  }
};

fs::path prepare_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw DataError("output directory not set");
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + out_dir + ": " + ec.message());
  return dir;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device entropy;
  return (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
}

unsigned worker_count(int jobs) {
  return std::min<unsigned>(static_cast<unsigned>(jobs),
                            std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

ExtractOutcome run_extract(const ExtractOptions& options) {
  if (options.cells_x < 1 || options.cells_y < 1) {
    throw DataError("cells-x and cells-y must be >= 1");
  }
  const fs::path dir = prepare_out_dir(options.out_dir);
  GridSpec grid{options.cells_x, options.cells_y};

  std::vector<FlowRecord> records = read_flow_csv(options.flow_path);
  ExtractStats stats;
  Corpus corpus = extract_words(std::move(records), grid, options.frames_per_clip,
                                options.threshold, &stats);

  ExtractOutcome outcome;
  outcome.corpus_path = (dir / "corpus.txt").string();
  outcome.documents = corpus.documents.size();
  outcome.tokens = stats.tokens;
  outcome.empty_documents = corpus.empty_document_count();
  outcome.resorted = stats.resorted;
  write_corpus(corpus, outcome.corpus_path);

  RunConfig config;
  config.add("command", "extract-words");
  config.add("flow", options.flow_path);
  config.add("cells_x", options.cells_x);
  config.add("cells_y", options.cells_y);
  config.add("frames_per_clip", options.frames_per_clip);
  config.add("threshold", options.threshold);
  config.add("vocab_size", grid.vocab_size());
  config.write(dir);
  return outcome;
}

GenerateOutcome run_generate(const GenerateOptions& options) {
  if (options.abnormal < 0 || options.abnormal > options.test_docs - 1) {
    throw DataError("abnormal count must be in [0, test_docs-1]");
  }
  const fs::path dir = prepare_out_dir(options.out_dir);
  const std::uint64_t seed = resolve_seed(options.seed);

  // One sequential stream: abnormal indices, then the training chain, then
  // the independent test chain.
  Rng rng(seed, 0);
  std::vector<int> abnormal_docs;
  {
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(options.test_docs) - 1);
    for (int j = 1; j < options.test_docs; ++j) candidates.push_back(j);
    for (int picked = 0; picked < options.abnormal; ++picked) {
      const std::size_t at = rng.below(candidates.size());
      abnormal_docs.push_back(candidates[at]);
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(at));
    }
    std::sort(abnormal_docs.begin(), abnormal_docs.end());
  }

  dhdp::GenerateOptions gen;
  gen.words_per_doc = options.words_per_doc;
  gen.alpha = options.alpha;
  gen.gamma = options.gamma;
  gen.delta = options.delta;
  gen.noise = options.noise;

  gen.num_docs = options.train_docs;
  gen.abnormal_docs = {};
  GeneratedSequence train = generate_sequence(gen, rng);
  train.truth.seed = seed;

  gen.num_docs = options.test_docs;
  gen.abnormal_docs = abnormal_docs;
  GeneratedSequence test = generate_sequence(gen, rng);
  test.truth.seed = seed;

  GenerateOutcome outcome;
  outcome.seed = seed;
  outcome.train_corpus = (dir / "train.corpus").string();
  outcome.test_corpus = (dir / "test.corpus").string();
  outcome.test_labels = (dir / "test.labels").string();
  outcome.truth_file = (dir / "truth").string();

  write_corpus(train.corpus, outcome.train_corpus);
  write_corpus(test.corpus, outcome.test_corpus);
  std::vector<LabeledDoc> labels;
  labels.reserve(test.truth.abnormal.size());
  for (std::size_t j = 0; j < test.truth.abnormal.size(); ++j) {
    labels.push_back({static_cast<int>(j), test.truth.abnormal[j] ? 1 : 0});
  }
  write_labels_csv(labels, outcome.test_labels);
  write_truth(test.truth, outcome.truth_file);

  RunConfig config;
  config.add("command", "generate-synthetic");
  config.add("train_docs", options.train_docs);
  config.add("test_docs", options.test_docs);
  config.add("abnormal", options.abnormal);
  config.add("words_per_doc", options.words_per_doc);
  config.add("alpha", options.alpha);
  config.add("gamma", options.gamma);
  config.add("delta", options.delta);
  config.add("noise", options.noise);
  config.add("seed", seed);
  config.write(dir);
  return outcome;
}

TrainOutcome run_train(const TrainOptions& options) {
  const fs::path dir = prepare_out_dir(options.out_dir);
  const std::uint64_t seed = resolve_seed(options.seed);

  Corpus corpus = read_corpus(options.corpus_path);
  Hyperparameters hyper;
  hyper.alpha = options.alpha;
  hyper.gamma = options.gamma;
  hyper.eta = options.eta;
  hyper.delta = options.delta;
  hyper.model_kind = options.model;

  SamplerConfig sampler_config;
  sampler_config.burn_in_sweeps = options.burn_in;
  sampler_config.chains = options.chains;
  sampler_config.master_seed = seed;

  std::vector<ChainFit> fits = batch_fit(corpus, hyper, sampler_config,
                                         options.quiet ? nullptr : &std::cerr);

  TrainOutcome outcome;
  outcome.seed = seed;
  for (const ChainFit& fit : fits) {
    const fs::path path = dir / ("chain_" + std::to_string(fit.chain) + ".snapshot");
    write_snapshot(fit.samples.back(), path.string());
    outcome.snapshot_paths.push_back(path.string());
  }

  RunConfig config;
  config.add("command", "train");
  config.add("corpus", options.corpus_path);
  config.add("model", to_string(options.model));
  config.add("alpha", options.alpha);
  config.add("gamma", options.gamma);
  config.add("eta", options.eta);
  config.add("delta", options.delta);
  config.add("burn_in", options.burn_in);
  config.add("chains", options.chains);
  config.add("seed", seed);
  config.write(dir);
  return outcome;
}

ScoreOutcome run_score(const ScoreOptions& options) {
  const fs::path dir = prepare_out_dir(options.out_dir);
  const std::uint64_t seed = resolve_seed(options.seed);

  Corpus corpus = read_corpus(options.corpus_path);

  std::vector<ModelSnapshot> snapshots;
  for (int chain = 0;; ++chain) {
    const fs::path path =
        fs::path(options.model_dir) / ("chain_" + std::to_string(chain) + ".snapshot");
    if (!fs::exists(path)) break;
    snapshots.push_back(read_snapshot(path.string()));
  }
  if (snapshots.empty()) {
    throw DataError("no chain_<c>.snapshot files in " + options.model_dir);
  }
  for (const ModelSnapshot& snap : snapshots) {
    if (snap.vocab_size != corpus.vocabulary.size) {
      throw DataError("vocabulary size mismatch: corpus V=" +
                      std::to_string(corpus.vocabulary.size) + ", model V=" +
                      std::to_string(snap.vocab_size));
    }
  }

  const int num_docs = static_cast<int>(corpus.documents.size());
  const int num_chains = static_cast<int>(snapshots.size());
  // log p per (document, chain); documents strictly in order within each
  // chain, chains independent across threads.
  std::vector<std::vector<double>> log_p(
      static_cast<std::size_t>(num_docs),
      std::vector<double>(static_cast<std::size_t>(num_chains), 0.0));

  std::atomic<int> next_chain{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto chain_task = [&]() {
    for (;;) {
      const int chain = next_chain.fetch_add(1);
      if (chain >= num_chains) return;
      try {
        OnlineChain online(snapshots[static_cast<std::size_t>(chain)], seed,
                           static_cast<std::uint64_t>(chain));
        for (int j = 0; j < num_docs; ++j) {
          OnlineInferResult result = online.process_document(
              corpus.documents[static_cast<std::size_t>(j)].tokens,
              options.online_sweeps);
          log_p[static_cast<std::size_t>(j)][static_cast<std::size_t>(chain)] =
              result.log_predictive;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers = worker_count(num_chains);
  if (workers <= 1) {
    chain_task();
  } else {
    std::vector<std::thread> pool;
    for (unsigned wi = 0; wi < workers; ++wi) pool.emplace_back(chain_task);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ScoredDoc> rows;
  rows.reserve(static_cast<std::size_t>(num_docs));
  for (int j = 0; j < num_docs; ++j) {
    const auto& doc = corpus.documents[static_cast<std::size_t>(j)];
    ScoreRecord record = abnormality_score(j, static_cast<int>(doc.tokens.size()),
                                           log_p[static_cast<std::size_t>(j)]);
    double value = record.score;
    if (options.literal_likelihood && record.defined()) {
      value = std::exp(harmonic_mean_log(record.per_chain_log_likelihood)) /
              static_cast<double>(record.n_tokens);
    }
    rows.push_back({j, value, static_cast<std::int64_t>(doc.tokens.size())});
  }

  ScoreOutcome outcome;
  outcome.seed = seed;
  outcome.scores_path = (dir / "scores.csv").string();
  outcome.documents = num_docs;
  outcome.chains = num_chains;
  write_scores_csv(rows, outcome.scores_path);

  RunConfig config;
  config.add("command", "score");
  config.add("model_dir", options.model_dir);
  config.add("corpus", options.corpus_path);
  config.add("online_sweeps", options.online_sweeps);
  config.add("chains", num_chains);
  config.add("literal_likelihood", options.literal_likelihood ? 1 : 0);
  config.add("seed", seed);
  config.write(dir);
  return outcome;
}

EvaluateOutcome run_evaluate(const EvaluateOptions& options) {
  const fs::path dir = prepare_out_dir(options.out_dir);
  std::vector<ScoredDoc> scored = read_scores_csv(options.scores_path);
  std::vector<LabeledDoc> labeled = read_labels_csv(options.labels_path);
  if (scored.size() != labeled.size()) {
    throw DataError("scores and labels list different document counts");
  }
  std::vector<double> scores;
  std::vector<int> labels;
  long excluded = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].doc_index != labeled[i].doc_index) {
      throw DataError("doc id mismatch at row " + std::to_string(i) + ": scores has " +
                      std::to_string(scored[i].doc_index) + ", labels has " +
                      std::to_string(labeled[i].doc_index));
    }
    if (std::isnan(scored[i].score)) {
      ++excluded;
      continue;
    }
    scores.push_back(scored[i].score);
    labels.push_back(labeled[i].label);
  }

  EvaluateOutcome outcome;
  outcome.summary.auc = auc(scores, labels);
  outcome.summary.n = static_cast<long>(scores.size());
  outcome.summary.excluded = excluded;
  outcome.roc_path = (dir / "roc.csv").string();
  write_roc_csv(roc(scores, labels), outcome.roc_path);

  RunConfig config;
  config.add("command", "evaluate");
  config.add("scores", options.scores_path);
  config.add("labels", options.labels_path);
  config.add("auc", outcome.summary.auc);
  config.add("n", outcome.summary.n);
  config.add("excluded", outcome.summary.excluded);
  config.write(dir);
  return outcome;
}

TrueScoreOutcome run_true_score(const TrueScoreOptions& options) {
  const fs::path dir = prepare_out_dir(options.out_dir);
  Corpus corpus = read_corpus(options.corpus_path);
  GroundTruth truth = read_truth(options.truth_path);
  if (truth.token_topics.size() != corpus.documents.size()) {
    throw DataError("truth file covers " + std::to_string(truth.token_topics.size()) +
                    " documents, corpus has " +
                    std::to_string(corpus.documents.size()));
  }

  TrueScoreOutcome outcome;
  double noise = truth.noise;
  if (options.noise && *options.noise != truth.noise) {
    noise = *options.noise;
    outcome.warning = "warning: noise " + format_double(*options.noise) +
                      " differs from the generator's " + format_double(truth.noise);
  }
  const BarTopics bars = bar_topics(noise);

  std::vector<ScoredDoc> rows;
  rows.reserve(corpus.documents.size());
  for (std::size_t j = 0; j < corpus.documents.size(); ++j) {
    const Document& doc = corpus.documents[j];
    const double score = true_model_score(doc, truth.token_topics[j], bars);
    rows.push_back({static_cast<int>(j), score,
                    static_cast<std::int64_t>(doc.tokens.size())});
  }
  outcome.scores_path = (dir / "scores.csv").string();
  write_scores_csv(rows, outcome.scores_path);

  RunConfig config;
  config.add("command", "true-score");
  config.add("corpus", options.corpus_path);
  config.add("truth", options.truth_path);
  config.add("noise", noise);
  config.write(dir);
  return outcome;
}

}  // namespace dhdp::pipeline
