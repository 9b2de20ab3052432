#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhdp/corpus.hpp"

namespace dhdp {

// Corpus text format:
//   #vocab_size=<V>
//   <doc_id>\t<space-separated word ids>
// Doc ids are consecutive from 0; an empty token list (or a fully empty
// line) is an empty document.
Corpus read_corpus(const std::string& path);
void write_corpus(const Corpus& corpus, const std::string& path);

// Flow CSV with header "frame,cell_x,cell_y,u,v".
std::vector<FlowRecord> read_flow_csv(const std::string& path);
void write_flow_csv(const std::vector<FlowRecord>& records, const std::string& path);

// Labels CSV "doc_id,label", label in {0 (normal), 1 (abnormal)}.
struct LabeledDoc {
  int doc_index = 0;
  int label = 0;
};
std::vector<LabeledDoc> read_labels_csv(const std::string& path);
void write_labels_csv(const std::vector<LabeledDoc>& labels, const std::string& path);

// Scores CSV "doc_id,score,n_tokens"; an undefined score (empty document)
// is written as "nan".
struct ScoredDoc {
  int doc_index = 0;
  double score = 0.0;
  std::int64_t n_tokens = 0;
};
std::vector<ScoredDoc> read_scores_csv(const std::string& path);
void write_scores_csv(const std::vector<ScoredDoc>& scores, const std::string& path);

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double x);

}  // namespace dhdp
