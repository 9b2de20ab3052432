#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dhdp/model.hpp"

namespace dhdp {

inline constexpr int kNoTopic = -1;

// One table of the franchise. A retired slot keeps its index forever;
// indices are never reused within a sweep so the -jt bookkeeping stays
// auditable.
struct Table {
  int topic = kNoTopic;  // kNoTopic while pending/detached or after retirement
  int n_tokens = 0;
  bool retired = false;

  bool live() const { return n_tokens > 0; }
};

// Seating of one document: token words, per-token table assignments and
// the tables themselves, plus the sparse per-topic table counts m_jk.
struct DocSeating {
  std::vector<int> words;
  std::vector<int> token_table;  // -1 while unseated
  std::vector<Table> tables;
  std::vector<std::pair<int, int>> topic_tables;  // (topic, count), sorted, m_jk
  int live_tables = 0;
  int seated_tokens = 0;

  int tables_for_topic(int topic) const;
  int total_topic_tables() const;  // m_j. over topic-attached tables
};

// Counts taken from one chain, persistable and sufficient for online
// continuation and scoring. Topic ids are compacted to 0..K-1.
struct ModelSnapshot {
  int format_version = 1;
  int vocab_size = 0;
  Hyperparameters hyper;
  int num_topics = 0;
  std::vector<int> m_all;                                  // m_.k
  std::vector<int> m_window;                               // m_{1:J,k}
  std::vector<int> m_last_doc;                             // m_{J,k}
  std::vector<std::int64_t> l_total;                       // l_.k
  std::vector<std::vector<std::pair<int, int>>> l_words;   // per topic (word, count)

  std::int64_t total_tokens() const;
  std::int64_t total_tables() const;
  int l_word(int topic, int word) const;
  void validate() const;
};

// Chinese-restaurant-franchise seating state for one chain: documents,
// tables, topic assignments and every derived count. Mutations keep all
// caches consistent; audit() recomputes everything from the raw
// assignments and verifies the caches exactly.
//
// Confined to one chain: single writer, no concurrent mutation.
class CrfState {
 public:
  CrfState(int vocab_size, const Hyperparameters& hyper);

  // Online continuation: counts from the snapshot become the frozen base;
  // the snapshot's last-document vector supplies m_{j-1,k} for doc 0.
  CrfState(const ModelSnapshot& base, const Hyperparameters& hyper);

  int append_document(std::vector<int> words);

  // --- seating mutations -------------------------------------------------
  // Create a pending table (topic assigned later via attach_table_counts).
  int new_table(int j);
  void seat_token(int j, int i, int t);
  void unseat_token(int j, int i);
  // Remove table t's block from l and its table from the m counts; the
  // table keeps its tokens and waits for attach_table_counts. This is the
  // -jt state of the topic-assignment move.
  int detach_table_counts(int j, int t);  // returns the previous topic
  void attach_table_counts(int j, int t, int topic);
  int activate_topic();
  // Deactivate when no table serves the topic and no token counts remain.
  bool maybe_deactivate_topic(int topic);
  // Swap the word of a seated token, adjusting l. Used by joint-distribution
  // sampler checks that resample data given assignments.
  void replace_token_word(int j, int i, int word);
  // Drop retired table slots and renumber token assignments. Table indices
  // are stable within a sweep; call this only at sweep boundaries.
  void compact_tables();

  // --- dynamics window ---------------------------------------------------
  // m_window covers base counts plus documents [0, window_doc]; the sweep
  // advances it so m_{1:j,k} means "all documents seen so far".
  void reset_window();
  void advance_window();
  int window_doc() const { return window_doc_; }

  // --- queries -----------------------------------------------------------
  int vocab_size() const { return vocab_; }
  const Hyperparameters& hyper() const { return hyper_; }
  int num_documents() const { return static_cast<int>(docs_.size()); }
  const DocSeating& doc(int j) const { return docs_[static_cast<std::size_t>(j)]; }
  std::span<const int> active_topics() const { return active_; }
  int num_active_topics() const { return static_cast<int>(active_.size()); }
  bool topic_alive(int topic) const;
  int topic_ids_created() const { return static_cast<int>(m_all_.size()); }

  int m_all(int topic) const { return m_all_[static_cast<std::size_t>(topic)]; }
  int m_window(int topic) const { return m_window_[static_cast<std::size_t>(topic)]; }
  std::int64_t m_all_total() const { return m_all_total_; }
  std::int64_t m_window_total() const { return m_window_total_; }
  // m_{j-1,k}: the previous document's table count for the topic; doc 0
  // falls back to the base snapshot's last-document vector.
  int m_prev_doc(int j, int topic) const;
  int m_prev_doc_total(int j) const;

  std::int64_t l_total(int topic) const { return l_total_[static_cast<std::size_t>(topic)]; }
  int l_word(int topic, int word) const;
  std::int64_t seated_token_count() const { return seated_tokens_total_; }

  // Version stamp bumped by every m-affecting mutation; per-document
  // sampling caches key off it.
  std::uint64_t m_version() const { return m_version_; }

  // --- likelihood primitives ----------------------------------------------
  // (l_wk + eta) / (l_.k + V eta); pass kNoTopic for a new topic.
  double word_topic_predictive(int word, int topic) const {
    const double eta = hyper_.eta;
    if (topic == kNoTopic) return eta / (vocab_ * eta);
    const auto idx = static_cast<std::size_t>(topic);
    const auto& row = l_[idx];
    const int lwk = row.empty() ? 0 : row[static_cast<std::size_t>(word)];
    return (static_cast<double>(lwk) + eta) * inv_l_denom_[idx];
  }
  // log f_k(block) with the current counts as the excluded-block baseline;
  // pass kNoTopic for a new topic.
  double table_block_log_likelihood(std::span<const int> block_words, int topic) const;
  // Same from pre-aggregated (word, count) pairs.
  double table_block_log_likelihood_counts(
      std::span<const std::pair<int, int>> word_counts, long block_size,
      int topic) const;
  // Words currently seated at table t of document j, in token order.
  std::vector<int> table_words(int j, int t) const;
  // Posterior-mean word distribution of one topic (row of TopicEstimate).
  std::vector<double> topic_estimate(int topic) const;
  // Collapsed Dirichlet-multinomial log likelihood of all seated tokens.
  double collapsed_data_log_likelihood() const;

  // --- snapshots and audits ------------------------------------------------
  ModelSnapshot snapshot() const;
  bool has_base() const { return has_base_; }
  const ModelSnapshot& base() const { return base_; }
  // True when current counts minus this state's own documents equal the
  // frozen base exactly.
  bool base_counts_intact() const;
  // Recount everything from raw assignments; throws ContractViolation with
  // a description on the first mismatch.
  void audit() const;

 private:
  void l_add(int topic, int word, int delta);
  void m_add(int j, int topic, int delta);
  void bump_m_version() { ++m_version_; }

  int vocab_ = 0;
  Hyperparameters hyper_;
  std::vector<DocSeating> docs_;

  // Indexed by topic id; ids are never reused within a chain.
  std::vector<char> alive_;
  std::vector<int> m_all_;
  std::vector<int> m_window_;
  std::vector<std::int64_t> l_total_;
  std::vector<double> inv_l_denom_;            // 1 / (l_.k + V eta)
  std::vector<std::vector<int>> l_;            // dense rows, cleared when dead
  std::vector<int> active_;                    // alive ids, ascending

  int window_doc_ = -1;
  std::int64_t m_all_total_ = 0;
  std::int64_t m_window_total_ = 0;
  std::int64_t seated_tokens_total_ = 0;
  std::uint64_t m_version_ = 0;

  bool has_base_ = false;
  ModelSnapshot base_;
};

}  // namespace dhdp
