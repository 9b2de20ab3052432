// Acceptance suite: one function per criterion, each printing a PASS or
// FAIL line with the measured numbers.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dhdp/abnormality.hpp"
#include "dhdp/corpus_io.hpp"
#include "dhdp/crf_state.hpp"
#include "dhdp/eval.hpp"
#include "dhdp/pipeline.hpp"
#include "dhdp/rng.hpp"
#include "dhdp/sampler.hpp"
#include "dhdp/snapshot.hpp"
#include "dhdp/synthgen.hpp"
#include "geweke.hpp"

namespace fs = std::filesystem;
using namespace dhdp;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream details;
};

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dhdp_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check(Outcome& out, bool condition, const std::string& what) {
  if (!condition) {
    out.pass = false;
    out.details << " FAILED[" << what << "]";
  }
}

struct PipelineAucs {
  double dynamic_auc = 0.0;
  double plain_auc = 0.0;
  double true_auc = 0.0;
};

// generate -> train (both models) -> score -> evaluate -> true-score.
PipelineAucs run_full_pipeline(const fs::path& dir, std::uint64_t seed,
                               int train_docs, int test_docs, int abnormal,
                               int burn_in, int chains, int online_sweeps,
                               bool run_true_model) {
  pipeline::GenerateOptions gen;
  gen.train_docs = train_docs;
  gen.test_docs = test_docs;
  gen.abnormal = abnormal;
  gen.seed = seed;
  gen.out_dir = (dir / "data").string();
  const auto data = pipeline::run_generate(gen);

  PipelineAucs result;
  for (ModelKind kind : {ModelKind::kDynamicHdp, ModelKind::kPlainHdp}) {
    const std::string tag = to_string(kind);
    pipeline::TrainOptions train;
    train.corpus_path = data.train_corpus;
    train.model = kind;
    train.alpha = 1.5;
    train.gamma = 2.0;
    train.eta = 0.2;
    train.delta = 0.5;
    train.burn_in = burn_in;
    train.chains = chains;
    train.seed = seed + 1;
    train.out_dir = (dir / ("model_" + tag)).string();
    train.quiet = true;
    pipeline::run_train(train);

    pipeline::ScoreOptions score;
    score.model_dir = train.out_dir;
    score.corpus_path = data.test_corpus;
    score.online_sweeps = online_sweeps;
    score.seed = seed + 2;
    score.out_dir = (dir / ("scores_" + tag)).string();
    const auto scored = pipeline::run_score(score);

    pipeline::EvaluateOptions evaluate;
    evaluate.scores_path = scored.scores_path;
    evaluate.labels_path = data.test_labels;
    evaluate.out_dir = (dir / ("eval_" + tag)).string();
    const auto evaluated = pipeline::run_evaluate(evaluate);
    if (kind == ModelKind::kDynamicHdp) {
      result.dynamic_auc = evaluated.summary.auc;
    } else {
      result.plain_auc = evaluated.summary.auc;
    }
  }

  if (run_true_model) {
    pipeline::TrueScoreOptions true_score;
    true_score.corpus_path = data.test_corpus;
    true_score.truth_path = data.truth_file;
    true_score.out_dir = (dir / "scores_true").string();
    const auto scored = pipeline::run_true_score(true_score);

    pipeline::EvaluateOptions evaluate;
    evaluate.scores_path = scored.scores_path;
    evaluate.labels_path = data.test_labels;
    evaluate.out_dir = (dir / "eval_true").string();
    result.true_auc = pipeline::run_evaluate(evaluate).summary.auc;
  }
  return result;
}

// --- criterion 1: synthetic reproduction at paper scale ---------------------

Outcome criterion_1() {
  Outcome out;
  const fs::path dir = work_dir("criterion_1");
  const std::uint64_t master_seeds[3] = {101, 202, 303};
  for (std::uint64_t seed : master_seeds) {
    const auto aucs = run_full_pipeline(dir / std::to_string(seed), seed,
                                        /*train_docs=*/2000, /*test_docs=*/1000,
                                        /*abnormal=*/300, /*burn_in=*/1000,
                                        /*chains=*/5, /*online_sweeps=*/1000,
                                        /*run_true_model=*/true);
    out.details << " seed=" << seed << " dhdp=" << aucs.dynamic_auc
                << " hdp=" << aucs.plain_auc << " true=" << aucs.true_auc;
    check(out, aucs.dynamic_auc >= 0.63 && aucs.dynamic_auc <= 0.80,
          "dynamic AUC in [0.63, 0.80]");
    check(out, aucs.plain_auc >= 0.40 && aucs.plain_auc <= 0.55,
          "plain AUC in [0.40, 0.55]");
    check(out, aucs.true_auc >= 0.68 && aucs.true_auc <= 0.80,
          "true-model AUC in [0.68, 0.80]");
    check(out, aucs.dynamic_auc - aucs.plain_auc >= 0.15, "dynamic - plain >= 0.15");
  }
  return out;
}

// --- criterion 2: CI-scale variant -------------------------------------------

Outcome criterion_2() {
  Outcome out;
  const fs::path dir = work_dir("criterion_2");
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto aucs = run_full_pipeline(dir / std::to_string(seed), seed * 1000,
                                        /*train_docs=*/400, /*test_docs=*/200,
                                        /*abnormal=*/60, /*burn_in=*/200,
                                        /*chains=*/3, /*online_sweeps=*/1000,
                                        /*run_true_model=*/false);
    const bool win = aucs.dynamic_auc - aucs.plain_auc >= 0.10;
    wins += win ? 1 : 0;
    out.details << " seed=" << seed << " dhdp=" << aucs.dynamic_auc
                << " hdp=" << aucs.plain_auc << (win ? " win" : " miss");
  }
  out.details << " wins=" << wins << "/5";
  check(out, wins >= 4, "dynamic beats plain by >= 0.10 in at least 4 of 5 seeds");
  return out;
}

// --- criterion 3: likelihood oracles -----------------------------------------

Outcome criterion_3() {
  Outcome out;
  Rng rng(33);
  double worst_block = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int vocab = 3 + static_cast<int>(rng.below(40));
    Hyperparameters hp;
    hp.alpha = 1.0;
    hp.gamma = 1.0;
    hp.eta = 0.05 + 2.0 * rng.uniform();
    hp.delta = 0.5;

    std::vector<int> seed_words;
    const int seed_count = static_cast<int>(rng.below(30));
    for (int i = 0; i < seed_count; ++i) {
      seed_words.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab))));
    }
    std::vector<int> block;
    const int block_size = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < block_size; ++i) {
      block.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab))));
    }

    // State under test: seed counts on one topic (or none).
    CrfState state(vocab, hp);
    const bool with_topic = seed_count > 0 && rng.uniform() < 0.8;
    int topic = kNoTopic;
    if (with_topic) {
      state.append_document(seed_words);
      topic = state.activate_topic();
      const int t = state.new_table(0);
      for (int i = 0; i < seed_count; ++i) state.seat_token(0, i, t);
      state.attach_table_counts(0, t, topic);
    }

    // Chain-rule oracle via sequential one-word predictives.
    double oracle = 0.0;
    {
      CrfState seq(vocab, hp);
      std::vector<int> all;
      if (with_topic) all = seed_words;
      all.insert(all.end(), block.begin(), block.end());
      seq.append_document(all);
      const int sk = seq.activate_topic();
      int next = 0;
      if (with_topic) {
        const int st = seq.new_table(0);
        for (int i = 0; i < seed_count; ++i) seq.seat_token(0, next++, st);
        seq.attach_table_counts(0, st, sk);
      }
      const int bt = seq.new_table(0);
      for (std::size_t i = 0; i < block.size(); ++i) {
        oracle += std::log(seq.word_topic_predictive(block[i], sk));
        seq.seat_token(0, next++, bt);
        if (i == 0) seq.attach_table_counts(0, bt, sk);
      }
    }
    worst_block = std::max(worst_block,
                           std::abs(state.table_block_log_likelihood(block, topic) - oracle));
  }
  out.details << " block_vs_chain_rule_max=" << worst_block;
  check(out, worst_block <= 1e-9, "block likelihood == chain rule within 1e-9");

  // per_sample_log_predictive vs the block likelihood on single-topic docs.
  double worst_doc = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int vocab = 5 + static_cast<int>(rng.below(30));
    ModelSnapshot snap;
    snap.vocab_size = vocab;
    snap.hyper.alpha = 1.0;
    snap.hyper.gamma = 1.0;
    snap.hyper.eta = 0.1 + rng.uniform();
    snap.hyper.delta = 0.5;
    snap.num_topics = 1;
    snap.m_all = {2};
    snap.m_window = {2};
    snap.m_last_doc = {1};
    std::vector<std::pair<int, int>> row;
    std::int64_t total = 0;
    for (int w = 0; w < vocab; ++w) {
      const int c = static_cast<int>(rng.below(5));
      if (c > 0) {
        row.emplace_back(w, c);
        total += c;
      }
    }
    snap.l_total = {total};
    snap.l_words = {row};

    std::vector<int> doc_words;
    const int n = 1 + static_cast<int>(rng.below(15));
    for (int i = 0; i < n; ++i) {
      doc_words.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab))));
    }
    TopicIncrement inc;
    inc.topic = 0;
    inc.total = n;
    for (int w : doc_words) {
      bool found = false;
      for (auto& [word, count] : inc.word_counts) {
        if (word == w) {
          count += 1;
          found = true;
        }
      }
      if (!found) inc.word_counts.emplace_back(w, 1);
    }
    const std::vector<TopicIncrement> doc{inc};

    CrfState state(snap, snap.hyper);
    const double via_block = state.table_block_log_likelihood(doc_words, 0);
    const double via_doc = per_sample_log_predictive(snap, doc);
    worst_doc = std::max(worst_doc, std::abs(via_block - via_doc));
  }
  out.details << " doc_vs_block_max=" << worst_doc;
  check(out, worst_doc <= 1e-12, "document predictive == block likelihood within 1e-12");
  return out;
}

// --- criterion 4: Geweke joint-distribution test ------------------------------

Outcome criterion_4() {
  Outcome out;
  geweke::Config cfg;
  cfg.vocab = 3;
  cfg.docs = 2;
  cfg.tokens_per_doc = 3;
  cfg.hyper.alpha = 1.0;
  cfg.hyper.gamma = 1.0;
  cfg.hyper.eta = 0.5;
  cfg.hyper.delta = 0.5;
  cfg.forward_samples = 100000;
  cfg.gibbs_samples = 100000;
  cfg.gibbs_batches = 100;
  const auto comparisons = geweke::run(cfg, 777);
  for (const auto& c : comparisons) {
    out.details << " " << c.name << ": fwd=" << c.forward.mean
                << " gibbs=" << c.gibbs.mean << " (" << c.sigmas << " se)";
    check(out, c.within(3.0), c.name + " within 3 standard errors");
  }
  return out;
}

// --- criterion 5: count integrity ---------------------------------------------

Outcome criterion_5() {
  Outcome out;
  // Real sampler: audit the full recount after every sweep until the
  // operation count passes 10^4 (one sweep = one move per token and per
  // table).
  GenerateOptions gen;
  gen.num_docs = 10;
  gen.words_per_doc = 12;
  Rng grng(55);
  GeneratedSequence data = generate_sequence(gen, grng);

  Hyperparameters hp;
  hp.alpha = 1.5;
  hp.gamma = 2.0;
  hp.eta = 0.2;
  hp.delta = 0.5;
  CrfState state(data.corpus.vocabulary.size, hp);
  for (const Document& doc : data.corpus.documents) {
    state.append_document(doc.tokens);
  }
  Rng rng(56);
  DocSamplingWeights weights;
  state.reset_window();
  for (int j = 0; j < state.num_documents(); ++j) {
    state.advance_window();
    for (int i = 0; i < static_cast<int>(state.doc(j).words.size()); ++i) {
      seat_token_by_sampling(state, j, i, rng, SampleMode::kBatch, &weights);
    }
  }
  state.audit();
  long operations = 0;
  int sweeps = 0;
  while (operations < 10000) {
    state.compact_tables();
    gibbs_sweep(state, rng, SampleMode::kBatch, weights);
    operations += 120;  // tokens per sweep
    for (int j = 0; j < state.num_documents(); ++j) {
      operations += state.doc(j).live_tables;
    }
    state.audit();
    ++sweeps;
  }
  out.details << " sweeps=" << sweeps << " operations=" << operations
              << " audits_passed=" << sweeps + 1;
  return out;  // audit throws on the first mismatch
}

// --- criterion 6: AUC against brute-force Mann-Whitney -------------------------

Outcome criterion_6() {
  Outcome out;
  Rng rng(66);
  int exact_matches = 0;
  const int instances = 500;
  for (int trial = 0; trial < instances; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(199));
    std::vector<double> scores;
    std::vector<int> labels;
    int positives = 0;
    for (int i = 0; i < n; ++i) {
      scores.push_back(std::floor(rng.uniform() * 10.0) / 2.0);
      labels.push_back(static_cast<int>(rng.below(2)));
      positives += labels.back();
    }
    if (positives == 0) labels[0] = 1;
    if (positives == n) labels[0] = 0;

    long pairs = 0;
    double credit = 0.0;
    for (int i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      for (int j = 0; j < n; ++j) {
        if (labels[j] != 0) continue;
        ++pairs;
        if (scores[i] < scores[j]) {
          credit += 1.0;
        } else if (scores[i] == scores[j]) {
          credit += 0.5;
        }
      }
    }
    const double mw = credit / static_cast<double>(pairs);
    if (auc(scores, labels) == mw) ++exact_matches;
  }
  out.details << " exact_matches=" << exact_matches << "/" << instances;
  check(out, exact_matches == instances, "trapezoid equals Mann-Whitney exactly");
  return out;
}

// --- criterion 7: harmonic mean -----------------------------------------------

Outcome criterion_7() {
  Outcome out;
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> xs;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
      xs.push_back(-300.0 * rng.uniform());  // exp(x) stays normal
    }
    double inverse_sum = 0.0;
    for (double x : xs) inverse_sum += 1.0 / std::exp(x);
    if (!std::isfinite(inverse_sum)) continue;
    const double direct = std::log(static_cast<double>(n) / inverse_sum);
    worst = std::max(worst, std::abs(harmonic_mean_log(xs) - direct));
  }
  out.details << " log_vs_direct_max=" << worst;
  check(out, worst <= 1e-12, "log-domain matches direct computation within 1e-12");

  bool exact = true;
  for (double c : {-5000.0, -7.25, -1e-9, 0.0, 13.0}) {
    for (int n = 1; n <= 7; ++n) {
      std::vector<double> xs(static_cast<std::size_t>(n), c);
      exact = exact && (harmonic_mean_log(xs) == c);
    }
  }
  out.details << " equal_input_exact=" << (exact ? "yes" : "no");
  check(out, exact, "equal-input identity is exact");
  return out;
}

// --- criterion 8: determinism ---------------------------------------------------

Outcome criterion_8() {
  Outcome out;
  const fs::path dir = work_dir("criterion_8");
  auto run_once = [&](const std::string& tag) {
    const fs::path base = dir / tag;
    pipeline::GenerateOptions gen;
    gen.train_docs = 30;
    gen.test_docs = 20;
    gen.abnormal = 6;
    gen.seed = 4242;
    gen.out_dir = (base / "data").string();
    const auto data = pipeline::run_generate(gen);

    pipeline::TrainOptions train;
    train.corpus_path = data.train_corpus;
    train.model = ModelKind::kDynamicHdp;
    train.burn_in = 40;
    train.chains = 2;
    train.seed = 7;
    train.out_dir = (base / "model").string();
    train.quiet = true;
    const auto trained = pipeline::run_train(train);

    pipeline::ScoreOptions score;
    score.model_dir = train.out_dir;
    score.corpus_path = data.test_corpus;
    score.online_sweeps = 50;
    score.seed = 9;
    score.out_dir = (base / "scores").string();
    const auto scored = pipeline::run_score(score);

    pipeline::EvaluateOptions evaluate;
    evaluate.scores_path = scored.scores_path;
    evaluate.labels_path = data.test_labels;
    evaluate.out_dir = (base / "eval").string();
    const auto evaluated = pipeline::run_evaluate(evaluate);

    std::vector<std::string> files;
    for (const std::string& snap : trained.snapshot_paths) files.push_back(snap);
    files.push_back(scored.scores_path);
    files.push_back(evaluated.roc_path);
    return files;
  };

  const auto first = run_once("first");
  const auto second = run_once("second");
  check(out, first.size() == second.size(), "same file lists");
  for (std::size_t i = 0; i < first.size(); ++i) {
    const bool same = slurp(first[i]) == slurp(second[i]);
    check(out, same, "byte-identical " + fs::path(first[i]).filename().string());
  }
  out.details << " files_compared=" << first.size();
  return out;
}

// --- criterion 9: QMUL-shaped ingestion -----------------------------------------

Outcome criterion_9() {
  Outcome out;
  const fs::path dir = work_dir("criterion_9");
  // Two seconds of a 45x36 grid at 25 fps with a handful of moving cells.
  std::vector<FlowRecord> records;
  Rng rng(99);
  for (long frame = 0; frame < 50; ++frame) {
    for (int i = 0; i < 20; ++i) {
      FlowRecord rec;
      rec.frame = frame;
      rec.cell_x = static_cast<int>(rng.below(45));
      rec.cell_y = static_cast<int>(rng.below(36));
      rec.u = rng.uniform() * 4.0 - 2.0;
      rec.v = rng.uniform() * 4.0 - 2.0;
      records.push_back(rec);
    }
  }
  const fs::path flow_path = dir / "flow.csv";
  write_flow_csv(records, flow_path.string());

  pipeline::ExtractOptions extract;
  extract.flow_path = flow_path.string();
  extract.cells_x = 45;
  extract.cells_y = 36;
  extract.frames_per_clip = 25;
  extract.threshold = 0.5;
  extract.out_dir = (dir / "out").string();
  const auto outcome = pipeline::run_extract(extract);

  std::ifstream in(outcome.corpus_path);
  std::string header;
  std::getline(in, header);
  out.details << " header=" << header << " documents=" << outcome.documents;
  check(out, header == "#vocab_size=6480", "vocabulary is 45*36*4 = 6480");
  check(out, outcome.documents == 2, "50 frames / 25 per clip = 2 documents");

  const Corpus corpus = read_corpus(outcome.corpus_path);
  bool ids_in_range = true;
  for (const Document& doc : corpus.documents) {
    for (int w : doc.tokens) ids_in_range = ids_in_range && w >= 0 && w < 6480;
  }
  check(out, ids_in_range, "word ids within [0, 6480)");
  return out;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "synthetic reproduction at paper scale", criterion_1},
      {2, "CI-scale dynamic vs plain separation", criterion_2},
      {3, "likelihood oracles", criterion_3},
      {4, "Geweke joint-distribution test", criterion_4},
      {5, "count integrity under sweeps", criterion_5},
      {6, "AUC equals Mann-Whitney", criterion_6},
      {7, "harmonic mean", criterion_7},
      {8, "end-to-end determinism", criterion_8},
      {9, "QMUL-shaped ingestion", criterion_9},
  };

  bool all_pass = true;
  for (const Criterion& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.details << " exception: " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id
              << ": " << criterion.name << " (" << seconds << "s)"
              << outcome.details.str() << std::endl;
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
