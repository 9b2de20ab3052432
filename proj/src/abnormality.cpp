#include "dhdp/abnormality.hpp"

#include <cmath>
#include <limits>

#include "dhdp/errors.hpp"
#include "dhdp/mathutil.hpp"

namespace dhdp {

double per_sample_log_predictive(const ModelSnapshot& before,
                                 std::span<const TopicIncrement> doc_counts) {
  const double eta = before.hyper.eta;
  const double veta = before.vocab_size * eta;
  double acc = 0.0;
  for (const TopicIncrement& inc : doc_counts) {
    int total = 0;
    std::int64_t before_total = 0;
    const bool existing = inc.topic >= 0 && inc.topic < before.num_topics;
    if (existing) before_total = before.l_total[static_cast<std::size_t>(inc.topic)];
    for (const auto& [word, count] : inc.word_counts) {
      const int lw = existing ? before.l_word(inc.topic, word) : 0;
      acc += log_rising_factorial(static_cast<double>(lw) + eta, count);
      total += count;
    }
    if (total != inc.total) {
      throw ContractViolation("topic increment total disagrees with word counts");
    }
    acc -= log_rising_factorial(static_cast<double>(before_total) + veta, inc.total);
  }
  return acc;
}

double harmonic_mean_log(std::span<const double> log_p) {
  if (log_p.empty()) {
    throw ContractViolation("harmonic mean of no samples");
  }
  double neg_max = -std::numeric_limits<double>::infinity();
  for (double lp : log_p) {
    if (lp == -std::numeric_limits<double>::infinity()) return lp;
    neg_max = std::max(neg_max, -lp);
  }
  // -(max + log(mean exp(-lp - max))): with equal inputs the mean is
  // exactly 1 and the identity holds bit for bit.
  double sum = 0.0;
  for (double lp : log_p) {
    sum += std::exp(-lp - neg_max);
  }
  return -(neg_max + std::log(sum / static_cast<double>(log_p.size())));
}

ScoreRecord abnormality_score(int doc_index, int n_tokens,
                              std::vector<double> per_chain_log_likelihood) {
  ScoreRecord record;
  record.doc_index = doc_index;
  record.n_tokens = n_tokens;
  record.per_chain_log_likelihood = std::move(per_chain_log_likelihood);
  if (n_tokens == 0) {
    record.score = std::numeric_limits<double>::quiet_NaN();
    return record;
  }
  record.score = harmonic_mean_log(record.per_chain_log_likelihood) /
                 static_cast<double>(n_tokens);
  return record;
}

std::vector<bool> label(std::span<const ScoreRecord> scores, double threshold) {
  std::vector<bool> out;
  out.reserve(scores.size());
  for (const ScoreRecord& s : scores) {
    out.push_back(s.defined() && s.score < threshold);
  }
  return out;
}

}  // namespace dhdp
