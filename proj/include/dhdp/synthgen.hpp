#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhdp/corpus.hpp"
#include "dhdp/model.hpp"
#include "dhdp/rng.hpp"

namespace dhdp {

// The ten bar topics over the 5x5 word grid: topics 0-4 are rows,
// 5-9 are columns, mixed with noise/V of uniform mass.
struct BarTopics {
  static constexpr int kVocab = 25;
  static constexpr int kTopics = 10;
  double noise = 0.0;
  std::vector<std::vector<double>> phi;  // kTopics rows over kVocab words

  double prob(int topic, int word) const {
    return phi[static_cast<std::size_t>(topic)][static_cast<std::size_t>(word)];
  }
};

BarTopics bar_topics(double noise);

// What the generator knows: abnormal flags and the true assignments.
struct GroundTruth {
  std::uint64_t seed = 0;
  double noise = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::vector<char> abnormal;                   // per document
  std::vector<std::vector<int>> token_topics;   // per document, per token
  std::vector<std::vector<int>> table_topics;   // per document, per table
};

// Sequence from the dynamic generative process over the ten bar topics.
// A new-topic draw picks uniformly among bars not yet used in the chain;
// once every bar is used the new-topic mass folds back onto the existing
// weights. Abnormal documents draw every new table's topic uniformly from
// the bars absent from the previous document.
struct GenerateOptions {
  int num_docs = 0;
  int words_per_doc = 20;
  double alpha = 1.5;
  double gamma = 2.0;
  double delta = 0.5;
  double noise = 0.01;
  std::vector<int> abnormal_docs;  // indices; 0 is invalid (no previous doc)
};

struct GeneratedSequence {
  Corpus corpus;
  GroundTruth truth;
};

GeneratedSequence generate_sequence(const GenerateOptions& options, Rng& rng);

// Per-word log likelihood of a document under the true topics and the
// true assignments.
double true_model_score(const Document& doc, const std::vector<int>& token_topics,
                        const BarTopics& bars);

// Ground-truth file: per-document abnormal flag and per-token true topic.
void write_truth(const GroundTruth& truth, const std::string& path);
GroundTruth read_truth(const std::string& path);

}  // namespace dhdp
