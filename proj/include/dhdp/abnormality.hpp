#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dhdp/crf_state.hpp"

namespace dhdp {

// Per-document abnormality: per-word log predictive likelihood combined
// across chains; lower means more abnormal.
struct ScoreRecord {
  int doc_index = 0;
  double score = 0.0;  // NaN when the document is empty
  int n_tokens = 0;
  std::vector<double> per_chain_log_likelihood;

  bool defined() const { return n_tokens > 0; }
};

// One topic's share of a document under a posterior sample: the tokens the
// sample assigned to the topic, grouped by word.
struct TopicIncrement {
  int topic = 0;
  int total = 0;
  std::vector<std::pair<int, int>> word_counts;  // (word, count)
};

// log p(x_j | t, k, x_{1:j-1}): gamma-ratio terms of the document's
// counts over the pre-document counts, summed over touched topics.
double per_sample_log_predictive(const ModelSnapshot& before,
                                 std::span<const TopicIncrement> doc_counts);

// Harmonic mean in the log domain: log S - logsumexp(-log p_s). Exact on
// equal inputs; -inf inputs yield -inf.
double harmonic_mean_log(std::span<const double> log_p);

// Combine per-chain log likelihoods into the per-word score.
ScoreRecord abnormality_score(int doc_index, int n_tokens,
                              std::vector<double> per_chain_log_likelihood);

// abnormal (true) iff score < threshold; undefined scores are normal.
std::vector<bool> label(std::span<const ScoreRecord> scores, double threshold);

}  // namespace dhdp
