#include "dhdp/abnormality.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "dhdp/rng.hpp"
#include "dhdp/sampler.hpp"
#include "dhdp/synthgen.hpp"

using namespace dhdp;

namespace {

ModelSnapshot snapshot_with_topic(int vocab, double eta, int word, int count) {
  ModelSnapshot snap;
  snap.vocab_size = vocab;
  snap.hyper.alpha = 1.0;
  snap.hyper.gamma = 1.0;
  snap.hyper.eta = eta;
  snap.hyper.delta = 0.5;
  snap.num_topics = 1;
  snap.m_all = {1};
  snap.m_window = {1};
  snap.m_last_doc = {1};
  snap.l_total = {count + 7};
  snap.l_words = {{{word, count}, {word + 1, 7}}};
  return snap;
}

}  // namespace

TEST_CASE("per_sample_log_predictive") {
  SUBCASE("empty document scores zero") {
    const ModelSnapshot snap = snapshot_with_topic(25, 0.5, 2, 3);
    CHECK(per_sample_log_predictive(snap, {}) == 0.0);
  }
  SUBCASE("single token direct substitution") {
    // l_wk = 3, l_.k = 10, eta = 0.5, V = 25 -> ln(3.5 / 22.5).
    const ModelSnapshot snap = snapshot_with_topic(25, 0.5, 2, 3);
    std::vector<TopicIncrement> doc{{0, 1, {{2, 1}}}};
    CHECK(per_sample_log_predictive(snap, doc) ==
          doctest::Approx(std::log(3.5 / 22.5)).epsilon(1e-12));
    CHECK(per_sample_log_predictive(snap, doc) == doctest::Approx(-1.8608).epsilon(1e-4));
  }
  SUBCASE("single-topic document equals the table block likelihood") {
    const ModelSnapshot snap = snapshot_with_topic(25, 0.5, 2, 3);
    CrfState state(snap, snap.hyper);
    const std::vector<int> block{2, 2, 4, 9, 2};
    std::vector<TopicIncrement> doc{{0, 5, {{2, 3}, {4, 1}, {9, 1}}}};
    const double via_block = state.table_block_log_likelihood(block, 0);
    const double via_doc = per_sample_log_predictive(snap, doc);
    CHECK(std::abs(via_block - via_doc) <= 1e-12);
  }
  SUBCASE("additive over disjoint topic sets") {
    ModelSnapshot snap = snapshot_with_topic(25, 0.5, 2, 3);
    snap.num_topics = 2;
    snap.m_all = {1, 2};
    snap.m_window = {1, 2};
    snap.m_last_doc = {1, 0};
    snap.l_total = {10, 4};
    snap.l_words = {{{2, 3}, {3, 7}}, {{5, 4}}};
    std::vector<TopicIncrement> first{{0, 2, {{2, 2}}}};
    std::vector<TopicIncrement> second{{1, 1, {{5, 1}}}};
    std::vector<TopicIncrement> both{{0, 2, {{2, 2}}}, {1, 1, {{5, 1}}}};
    CHECK(per_sample_log_predictive(snap, both) ==
          doctest::Approx(per_sample_log_predictive(snap, first) +
                          per_sample_log_predictive(snap, second))
              .epsilon(1e-14));
  }
}

TEST_CASE("harmonic_mean_log") {
  SUBCASE("equal inputs are exact") {
    for (double c : {-1234.5, -2.0, 0.0, 3.75, -1e8}) {
      std::vector<double> xs(5, c);
      CHECK(harmonic_mean_log(xs) == c);
    }
  }
  SUBCASE("direct computation of {0.5, 0.25}") {
    std::vector<double> xs{std::log(0.5), std::log(0.25)};
    CHECK(harmonic_mean_log(xs) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-14));
  }
  SUBCASE("single sample is the identity") {
    std::vector<double> xs{-7.25};
    CHECK(harmonic_mean_log(xs) == -7.25);
  }
  SUBCASE("minus infinity dominates") {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> xs{-1.0, -inf, -2.0};
    CHECK(harmonic_mean_log(xs) == -inf);
  }
  SUBCASE("harmonic mean is at most the arithmetic mean") {
    Rng rng(8);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> xs;
      const int n = 2 + static_cast<int>(rng.below(6));
      for (int i = 0; i < n; ++i) {
        xs.push_back(-20.0 * rng.uniform());
      }
      double arith = 0.0;
      for (double x : xs) arith += std::exp(x);
      arith = std::log(arith / n);
      CHECK(harmonic_mean_log(xs) <= arith + 1e-12);
    }
  }
  SUBCASE("log-domain result matches the direct domain where it exists") {
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> xs;
      const int n = 1 + static_cast<int>(rng.below(8));
      for (int i = 0; i < n; ++i) {
        xs.push_back(-50.0 * rng.uniform());
      }
      double inverse_sum = 0.0;
      for (double x : xs) inverse_sum += 1.0 / std::exp(x);
      const double direct = std::log(static_cast<double>(n) / inverse_sum);
      CHECK(harmonic_mean_log(xs) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("abnormality_score") {
  SUBCASE("single-word documents score the harmonic mean itself") {
    ScoreRecord record = abnormality_score(0, 1, {-2.0, -3.0});
    CHECK(record.score ==
          doctest::Approx(harmonic_mean_log(std::vector<double>{-2.0, -3.0})));
  }
  SUBCASE("empty documents are undefined") {
    ScoreRecord record = abnormality_score(4, 0, {});
    CHECK(std::isnan(record.score));
    CHECK_FALSE(record.defined());
  }
  SUBCASE("per-word normalisation divides by the token count") {
    ScoreRecord record = abnormality_score(1, 10, {-30.0});
    CHECK(record.score == doctest::Approx(-3.0));
  }
}

TEST_CASE("doubling a document changes the per-word score only slightly") {
  // Converged mini-model on bar data; score a document and its doubled
  // version from the same snapshot.
  GenerateOptions gen;
  gen.num_docs = 60;
  gen.words_per_doc = 20;
  Rng grng(404);
  GeneratedSequence data = generate_sequence(gen, grng);

  Hyperparameters hp;
  hp.alpha = 1.5;
  hp.gamma = 2.0;
  hp.eta = 0.2;
  hp.delta = 0.5;
  SamplerConfig config;
  config.burn_in_sweeps = 120;
  config.chains = 1;
  config.master_seed = 7;
  auto fits = batch_fit(data.corpus, hp, config);
  const ModelSnapshot snap = fits[0].samples.back();

  const std::vector<int>& doc = data.corpus.documents[5].tokens;
  std::vector<int> doubled = doc;
  doubled.insert(doubled.end(), doc.begin(), doc.end());

  auto score_once = [&](const std::vector<int>& tokens, std::uint64_t stream) {
    OnlineChain chain(snap, 31, stream);
    auto result = chain.process_document(tokens, 200);
    return result.log_predictive / static_cast<double>(tokens.size());
  };
  const double single = score_once(doc, 0);
  const double twice = score_once(doubled, 1);
  INFO("single ", single, " doubled ", twice);
  CHECK(std::abs(single - twice) <= 0.2);
}

TEST_CASE("label thresholding") {
  std::vector<ScoreRecord> scores;
  scores.push_back(abnormality_score(0, 2, {-10.0}));  // score -5
  scores.push_back(abnormality_score(1, 2, {-2.0}));   // score -1
  const double inf = std::numeric_limits<double>::infinity();

  auto all_false = label(scores, -inf);
  CHECK(all_false == std::vector<bool>{false, false});
  auto all_true = label(scores, inf);
  CHECK(all_true == std::vector<bool>{true, true});
  auto mixed = label(scores, -3.0);
  CHECK(mixed == std::vector<bool>{true, false});
}
