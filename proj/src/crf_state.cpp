#include "dhdp/crf_state.hpp"

#include <algorithm>
#include <cmath>

#include "dhdp/errors.hpp"
#include "dhdp/mathutil.hpp"

namespace dhdp {

namespace {

inline void must(bool condition, const char* what) {
  if (!condition) throw ContractViolation(what);
}

// Sorted sparse counter over topic ids.
void sparse_add(std::vector<std::pair<int, int>>& entries, int key, int delta) {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& e, int k) { return e.first < k; });
  if (it != entries.end() && it->first == key) {
    it->second += delta;
    must(it->second >= 0, "negative sparse count");
    if (it->second == 0) entries.erase(it);
  } else {
    must(delta > 0, "decrement of absent sparse count");
    entries.insert(it, {key, delta});
  }
}

int sparse_get(const std::vector<std::pair<int, int>>& entries, int key) {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& e, int k) { return e.first < k; });
  return (it != entries.end() && it->first == key) ? it->second : 0;
}

}  // namespace

void Hyperparameters::validate() const {
  if (!(alpha > 0.0)) throw DataError("alpha must be > 0");
  if (!(gamma > 0.0)) throw DataError("gamma must be > 0");
  if (!(eta > 0.0)) throw DataError("eta must be > 0");
  if (!(delta >= 0.0)) throw DataError("delta must be >= 0");
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kDynamicHdp ? "dhdp" : "hdp";
}

ModelKind model_kind_from_string(const std::string& text) {
  if (text == "dhdp") return ModelKind::kDynamicHdp;
  if (text == "hdp") return ModelKind::kPlainHdp;
  throw DataError("unknown model '" + text + "', expected dhdp or hdp");
}

int DocSeating::tables_for_topic(int topic) const {
  return sparse_get(topic_tables, topic);
}

int DocSeating::total_topic_tables() const {
  int total = 0;
  for (const auto& [topic, count] : topic_tables) total += count;
  return total;
}

std::int64_t ModelSnapshot::total_tokens() const {
  std::int64_t n = 0;
  for (std::int64_t t : l_total) n += t;
  return n;
}

std::int64_t ModelSnapshot::total_tables() const {
  std::int64_t n = 0;
  for (int m : m_all) n += m;
  return n;
}

int ModelSnapshot::l_word(int topic, int word) const {
  const auto& row = l_words[static_cast<std::size_t>(topic)];
  auto it = std::lower_bound(row.begin(), row.end(), word,
                             [](const auto& e, int w) { return e.first < w; });
  return (it != row.end() && it->first == word) ? it->second : 0;
}

void ModelSnapshot::validate() const {
  if (format_version != 1) {
    throw DataError("unsupported snapshot format_version " +
                    std::to_string(format_version));
  }
  if (vocab_size < 1) throw DataError("snapshot vocab_size must be >= 1");
  hyper.validate();
  const auto k = static_cast<std::size_t>(num_topics);
  if (m_all.size() != k || m_window.size() != k || m_last_doc.size() != k ||
      l_total.size() != k || l_words.size() != k) {
    throw DataError("snapshot arrays disagree with num_topics");
  }
  for (std::size_t topic = 0; topic < k; ++topic) {
    std::int64_t sum = 0;
    for (const auto& [word, count] : l_words[topic]) {
      if (word < 0 || word >= vocab_size) {
        throw DataError("snapshot word id out of range");
      }
      if (count <= 0) throw DataError("snapshot sparse count must be positive");
      sum += count;
    }
    if (sum != l_total[topic]) {
      throw DataError("snapshot l_total mismatch for topic " + std::to_string(topic));
    }
    if (m_all[topic] < 0 || m_window[topic] < 0 || m_last_doc[topic] < 0) {
      throw DataError("snapshot table counts must be nonnegative");
    }
  }
}

CrfState::CrfState(int vocab_size, const Hyperparameters& hyper)
    : vocab_(vocab_size), hyper_(hyper) {
  if (vocab_ < 1) throw DataError("vocab_size must be >= 1");
  hyper_.validate();
}

CrfState::CrfState(const ModelSnapshot& base, const Hyperparameters& hyper)
    : CrfState(base.vocab_size, hyper) {
  base.validate();
  has_base_ = true;
  base_ = base;
  const int k = base.num_topics;
  alive_.assign(static_cast<std::size_t>(k), 1);
  m_all_.assign(base.m_all.begin(), base.m_all.end());
  m_window_.assign(base.m_window.begin(), base.m_window.end());
  l_total_.assign(base.l_total.begin(), base.l_total.end());
  l_.resize(static_cast<std::size_t>(k));
  inv_l_denom_.resize(static_cast<std::size_t>(k));
  active_.resize(static_cast<std::size_t>(k));
  for (int topic = 0; topic < k; ++topic) {
    const auto idx = static_cast<std::size_t>(topic);
    active_[idx] = topic;
    l_[idx].assign(static_cast<std::size_t>(vocab_), 0);
    for (const auto& [word, count] : base.l_words[idx]) {
      l_[idx][static_cast<std::size_t>(word)] = count;
    }
    inv_l_denom_[idx] =
        1.0 / (static_cast<double>(l_total_[idx]) + vocab_ * hyper_.eta);
    m_all_total_ += m_all_[idx];
    m_window_total_ += m_window_[idx];
    seated_tokens_total_ += l_total_[idx];
  }
}

int CrfState::append_document(std::vector<int> words) {
  for (int w : words) {
    if (w < 0 || w >= vocab_) {
      throw DataError("word id out of range: " + std::to_string(w));
    }
  }
  DocSeating doc;
  doc.token_table.assign(words.size(), -1);
  doc.words = std::move(words);
  docs_.push_back(std::move(doc));
  return static_cast<int>(docs_.size()) - 1;
}

int CrfState::new_table(int j) {
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  doc.tables.push_back(Table{});
  return static_cast<int>(doc.tables.size()) - 1;
}

void CrfState::seat_token(int j, int i, int t) {
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  must(doc.token_table[static_cast<std::size_t>(i)] == -1, "token already seated");
  Table& table = doc.tables[static_cast<std::size_t>(t)];
  must(!table.retired, "cannot seat at a retired table");
  if (table.n_tokens == 0) doc.live_tables += 1;
  table.n_tokens += 1;
  doc.token_table[static_cast<std::size_t>(i)] = t;
  doc.seated_tokens += 1;
  if (table.topic != kNoTopic) {
    l_add(table.topic, doc.words[static_cast<std::size_t>(i)], +1);
  }
}

void CrfState::unseat_token(int j, int i) {
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  const int t = doc.token_table[static_cast<std::size_t>(i)];
  must(t != -1, "token not seated");
  Table& table = doc.tables[static_cast<std::size_t>(t)];
  must(table.topic != kNoTopic, "cannot unseat from a pending table");
  l_add(table.topic, doc.words[static_cast<std::size_t>(i)], -1);
  table.n_tokens -= 1;
  doc.token_table[static_cast<std::size_t>(i)] = -1;
  doc.seated_tokens -= 1;
  if (table.n_tokens == 0) {
    const int topic = table.topic;
    table.topic = kNoTopic;
    table.retired = true;
    doc.live_tables -= 1;
    m_add(j, topic, -1);
    maybe_deactivate_topic(topic);
  }
}

int CrfState::detach_table_counts(int j, int t) {
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  Table& table = doc.tables[static_cast<std::size_t>(t)];
  must(table.live() && table.topic != kNoTopic, "detach requires a live attached table");
  const int topic = table.topic;
  for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
    if (doc.token_table[i] == t) l_add(topic, doc.words[i], -1);
  }
  table.topic = kNoTopic;
  m_add(j, topic, -1);
  return topic;
}

void CrfState::attach_table_counts(int j, int t, int topic) {
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  Table& table = doc.tables[static_cast<std::size_t>(t)];
  must(table.live() && table.topic == kNoTopic, "attach requires a detached table");
  must(topic_alive(topic), "attach to a dead topic");
  table.topic = topic;
  for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
    if (doc.token_table[i] == static_cast<int>(t)) l_add(topic, doc.words[i], +1);
  }
  m_add(j, topic, +1);
}

int CrfState::activate_topic() {
  const int topic = static_cast<int>(m_all_.size());
  alive_.push_back(1);
  m_all_.push_back(0);
  m_window_.push_back(0);
  l_total_.push_back(0);
  inv_l_denom_.push_back(1.0 / (vocab_ * hyper_.eta));
  l_.emplace_back(static_cast<std::size_t>(vocab_), 0);
  active_.push_back(topic);
  return topic;
}

bool CrfState::maybe_deactivate_topic(int topic) {
  const auto idx = static_cast<std::size_t>(topic);
  if (!alive_[idx]) return false;
  if (m_all_[idx] != 0 || l_total_[idx] != 0) return false;
  alive_[idx] = 0;
  l_[idx].clear();
  l_[idx].shrink_to_fit();
  active_.erase(std::find(active_.begin(), active_.end(), topic));
  bump_m_version();
  return true;
}

void CrfState::replace_token_word(int j, int i, int word) {
  must(word >= 0 && word < vocab_, "word id out of range");
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  const int t = doc.token_table[static_cast<std::size_t>(i)];
  must(t != -1, "token not seated");
  const int topic = doc.tables[static_cast<std::size_t>(t)].topic;
  must(topic != kNoTopic, "token's table has no topic");
  l_add(topic, doc.words[static_cast<std::size_t>(i)], -1);
  doc.words[static_cast<std::size_t>(i)] = word;
  l_add(topic, word, +1);
}

void CrfState::reset_window() {
  if (has_base_) {
    std::fill(m_window_.begin(), m_window_.end(), 0);
    m_window_total_ = 0;
    for (int topic = 0; topic < base_.num_topics; ++topic) {
      m_window_[static_cast<std::size_t>(topic)] = base_.m_window[static_cast<std::size_t>(topic)];
      m_window_total_ += base_.m_window[static_cast<std::size_t>(topic)];
    }
  } else {
    std::fill(m_window_.begin(), m_window_.end(), 0);
    m_window_total_ = 0;
  }
  window_doc_ = -1;
  bump_m_version();
}

void CrfState::advance_window() {
  must(window_doc_ + 1 < num_documents(), "window past the last document");
  window_doc_ += 1;
  const DocSeating& doc = docs_[static_cast<std::size_t>(window_doc_)];
  for (const auto& [topic, count] : doc.topic_tables) {
    m_window_[static_cast<std::size_t>(topic)] += count;
    m_window_total_ += count;
  }
  bump_m_version();
}

bool CrfState::topic_alive(int topic) const {
  return topic >= 0 && topic < static_cast<int>(alive_.size()) &&
         alive_[static_cast<std::size_t>(topic)];
}

int CrfState::m_prev_doc(int j, int topic) const {
  if (j == 0) {
    if (!has_base_) return 0;
    return topic < base_.num_topics ? base_.m_last_doc[static_cast<std::size_t>(topic)] : 0;
  }
  return docs_[static_cast<std::size_t>(j - 1)].tables_for_topic(topic);
}

int CrfState::m_prev_doc_total(int j) const {
  if (j == 0) {
    if (!has_base_) return 0;
    int total = 0;
    for (int m : base_.m_last_doc) total += m;
    return total;
  }
  return docs_[static_cast<std::size_t>(j - 1)].total_topic_tables();
}

int CrfState::l_word(int topic, int word) const {
  const auto& row = l_[static_cast<std::size_t>(topic)];
  return row.empty() ? 0 : row[static_cast<std::size_t>(word)];
}

void CrfState::l_add(int topic, int word, int delta) {
  const auto idx = static_cast<std::size_t>(topic);
  must(alive_[idx], "l update on a dead topic");
  int& cell = l_[idx][static_cast<std::size_t>(word)];
  cell += delta;
  must(cell >= 0, "negative word-topic count");
  l_total_[idx] += delta;
  must(l_total_[idx] >= 0, "negative topic token count");
  inv_l_denom_[idx] =
      1.0 / (static_cast<double>(l_total_[idx]) + vocab_ * hyper_.eta);
  seated_tokens_total_ += delta;
}

void CrfState::m_add(int j, int topic, int delta) {
  const auto idx = static_cast<std::size_t>(topic);
  must(alive_[idx], "m update on a dead topic");
  DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  sparse_add(doc.topic_tables, topic, delta);
  m_all_[idx] += delta;
  m_all_total_ += delta;
  must(m_all_[idx] >= 0, "negative global table count");
  if (j <= window_doc_) {
    m_window_[idx] += delta;
    m_window_total_ += delta;
    must(m_window_[idx] >= 0, "negative window table count");
  }
  bump_m_version();
}

double CrfState::table_block_log_likelihood(std::span<const int> block_words,
                                            int topic) const {
  if (block_words.empty()) return 0.0;
  thread_local std::vector<std::pair<int, int>> counts;
  counts.clear();
  for (int w : block_words) sparse_add(counts, w, +1);
  return table_block_log_likelihood_counts(counts,
                                           static_cast<long>(block_words.size()),
                                           topic);
}

double CrfState::table_block_log_likelihood_counts(
    std::span<const std::pair<int, int>> word_counts, long block_size,
    int topic) const {
  if (block_size == 0) return 0.0;
  const double eta = hyper_.eta;
  double acc = 0.0;
  std::int64_t base_total = 0;
  if (topic == kNoTopic) {
    for (const auto& [word, count] : word_counts) {
      acc += log_rising_factorial(eta, count);
    }
  } else {
    must(topic_alive(topic), "block likelihood for a dead topic");
    const auto idx = static_cast<std::size_t>(topic);
    base_total = l_total_[idx];
    for (const auto& [word, count] : word_counts) {
      const int lwk = l_[idx].empty() ? 0 : l_[idx][static_cast<std::size_t>(word)];
      acc += log_rising_factorial(static_cast<double>(lwk) + eta, count);
    }
  }
  acc -= log_rising_factorial(static_cast<double>(base_total) + vocab_ * eta,
                              block_size);
  return acc;
}

std::vector<int> CrfState::table_words(int j, int t) const {
  const DocSeating& doc = docs_[static_cast<std::size_t>(j)];
  std::vector<int> words;
  for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
    if (doc.token_table[i] == t) words.push_back(doc.words[i]);
  }
  return words;
}

void CrfState::compact_tables() {
  thread_local std::vector<int> remap;
  for (DocSeating& doc : docs_) {
    if (doc.tables.empty()) continue;
    remap.assign(doc.tables.size(), -1);
    std::size_t kept = 0;
    for (std::size_t t = 0; t < doc.tables.size(); ++t) {
      if (doc.tables[t].retired) continue;
      must(doc.tables[t].live(), "pending table during compaction");
      remap[t] = static_cast<int>(kept);
      if (kept != t) doc.tables[kept] = doc.tables[t];
      ++kept;
    }
    doc.tables.resize(kept);
    for (int& t : doc.token_table) {
      if (t != -1) t = remap[static_cast<std::size_t>(t)];
    }
  }
}

std::vector<double> CrfState::topic_estimate(int topic) const {
  std::vector<double> phi(static_cast<std::size_t>(vocab_));
  const double eta = hyper_.eta;
  if (topic == kNoTopic) {
    std::fill(phi.begin(), phi.end(), 1.0 / vocab_);
    return phi;
  }
  must(topic_alive(topic), "estimate for a dead topic");
  const auto idx = static_cast<std::size_t>(topic);
  const double denom = static_cast<double>(l_total_[idx]) + vocab_ * eta;
  for (int w = 0; w < vocab_; ++w) {
    const int lwk = l_[idx].empty() ? 0 : l_[idx][static_cast<std::size_t>(w)];
    phi[static_cast<std::size_t>(w)] = (static_cast<double>(lwk) + eta) / denom;
  }
  return phi;
}

double CrfState::collapsed_data_log_likelihood() const {
  const double eta = hyper_.eta;
  const double lg_eta = log_gamma(eta);
  const double lg_veta = log_gamma(vocab_ * eta);
  double acc = 0.0;
  for (int topic : active_) {
    const auto idx = static_cast<std::size_t>(topic);
    acc += lg_veta - log_gamma(static_cast<double>(l_total_[idx]) + vocab_ * eta);
    for (int count : l_[idx]) {
      if (count > 0) acc += log_gamma(count + eta) - lg_eta;
    }
  }
  return acc;
}

ModelSnapshot CrfState::snapshot() const {
  for (const DocSeating& doc : docs_) {
    for (const Table& table : doc.tables) {
      must(!table.live() || table.topic != kNoTopic,
           "snapshot with pending or detached tables");
    }
  }
  ModelSnapshot snap;
  snap.vocab_size = vocab_;
  snap.hyper = hyper_;
  snap.num_topics = static_cast<int>(active_.size());
  snap.m_all.reserve(active_.size());
  snap.m_window.reserve(active_.size());
  snap.l_total.reserve(active_.size());
  snap.l_words.reserve(active_.size());

  const DocSeating* last_doc = docs_.empty() ? nullptr : &docs_.back();
  for (int topic : active_) {
    const auto idx = static_cast<std::size_t>(topic);
    snap.m_all.push_back(m_all_[idx]);
    snap.m_window.push_back(m_window_[idx]);
    snap.m_last_doc.push_back(last_doc ? last_doc->tables_for_topic(topic) : 0);
    snap.l_total.push_back(l_total_[idx]);
    std::vector<std::pair<int, int>> row;
    for (int w = 0; w < vocab_; ++w) {
      const int count = l_[idx].empty() ? 0 : l_[idx][static_cast<std::size_t>(w)];
      if (count > 0) row.emplace_back(w, count);
    }
    snap.l_words.push_back(std::move(row));
  }
  snap.validate();
  return snap;
}

bool CrfState::base_counts_intact() const {
  if (!has_base_) return true;
  // Subtract this state's own contribution and compare with the base.
  std::vector<std::int64_t> local_l_total(m_all_.size(), 0);
  std::vector<std::vector<int>> local_l(m_all_.size());
  std::vector<int> local_m(m_all_.size(), 0);
  for (const DocSeating& doc : docs_) {
    for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
      const int t = doc.token_table[i];
      if (t == -1) continue;
      const int topic = doc.tables[static_cast<std::size_t>(t)].topic;
      if (topic == kNoTopic) continue;
      auto& row = local_l[static_cast<std::size_t>(topic)];
      if (row.empty()) row.assign(static_cast<std::size_t>(vocab_), 0);
      row[static_cast<std::size_t>(doc.words[i])] += 1;
      local_l_total[static_cast<std::size_t>(topic)] += 1;
    }
    for (const auto& [topic, count] : doc.topic_tables) {
      local_m[static_cast<std::size_t>(topic)] += count;
    }
  }
  for (std::size_t topic = 0; topic < m_all_.size(); ++topic) {
    const int base_m =
        topic < base_.m_all.size() ? base_.m_all[topic] : 0;
    const std::int64_t base_lt =
        topic < base_.l_total.size() ? base_.l_total[topic] : 0;
    if (m_all_[topic] - local_m[topic] != base_m) return false;
    if (alive_[topic] && l_total_[topic] - local_l_total[topic] != base_lt) return false;
    if (!alive_[topic]) continue;
    for (int w = 0; w < vocab_; ++w) {
      const int current = l_[topic].empty() ? 0 : l_[topic][static_cast<std::size_t>(w)];
      const int local = local_l[topic].empty() ? 0 : local_l[topic][static_cast<std::size_t>(w)];
      const int base_count = topic < static_cast<std::size_t>(base_.num_topics)
                                 ? base_.l_word(static_cast<int>(topic), w)
                                 : 0;
      if (current - local != base_count) return false;
    }
  }
  return true;
}

void CrfState::audit() const {
  const std::size_t ids = m_all_.size();
  std::vector<int> want_m_all(ids, 0);
  std::vector<int> want_m_window(ids, 0);
  std::vector<std::int64_t> want_l_total(ids, 0);
  std::vector<std::vector<int>> want_l(ids);
  std::int64_t want_seated_total = 0;

  if (has_base_) {
    for (int topic = 0; topic < base_.num_topics; ++topic) {
      const auto idx = static_cast<std::size_t>(topic);
      want_m_all[idx] += base_.m_all[idx];
      want_m_window[idx] += base_.m_window[idx];
      want_l_total[idx] += base_.l_total[idx];
      want_l[idx].assign(static_cast<std::size_t>(vocab_), 0);
      for (const auto& [word, count] : base_.l_words[idx]) {
        want_l[idx][static_cast<std::size_t>(word)] += count;
      }
      want_seated_total += base_.l_total[idx];
    }
  }

  for (int j = 0; j < num_documents(); ++j) {
    const DocSeating& doc = docs_[static_cast<std::size_t>(j)];
    std::vector<int> want_n(doc.tables.size(), 0);
    int want_seated = 0;
    for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
      const int t = doc.token_table[i];
      if (t == -1) continue;
      want_n[static_cast<std::size_t>(t)] += 1;
      want_seated += 1;
      const int topic = doc.tables[static_cast<std::size_t>(t)].topic;
      if (topic != kNoTopic) {
        auto& row = want_l[static_cast<std::size_t>(topic)];
        if (row.empty()) row.assign(static_cast<std::size_t>(vocab_), 0);
        row[static_cast<std::size_t>(doc.words[i])] += 1;
        want_l_total[static_cast<std::size_t>(topic)] += 1;
        want_seated_total += 1;
      }
    }
    must(want_seated == doc.seated_tokens, "seated_tokens cache mismatch");
    int want_live = 0;
    std::vector<std::pair<int, int>> want_topic_tables;
    for (std::size_t t = 0; t < doc.tables.size(); ++t) {
      const Table& table = doc.tables[t];
      must(table.n_tokens == want_n[t], "n_jt cache mismatch");
      must(!(table.retired && table.n_tokens > 0), "retired table holds tokens");
      if (table.live()) want_live += 1;
      if (table.topic != kNoTopic) {
        must(table.live(), "attached table without tokens");
        must(topic_alive(table.topic), "table serves a dead topic");
        sparse_add(want_topic_tables, table.topic, +1);
      }
    }
    must(want_live == doc.live_tables, "live_tables cache mismatch");
    must(want_topic_tables == doc.topic_tables, "m_jk cache mismatch");
    for (const auto& [topic, count] : doc.topic_tables) {
      want_m_all[static_cast<std::size_t>(topic)] += count;
      if (j <= window_doc_) {
        want_m_window[static_cast<std::size_t>(topic)] += count;
      }
    }
  }

  std::int64_t want_m_all_total = 0;
  std::int64_t want_m_window_total = 0;
  for (std::size_t topic = 0; topic < ids; ++topic) {
    must(m_all_[topic] == want_m_all[topic], "m_all cache mismatch");
    must(m_window_[topic] == want_m_window[topic], "m_window cache mismatch");
    must(l_total_[topic] == want_l_total[topic], "l_total cache mismatch");
    want_m_all_total += want_m_all[topic];
    want_m_window_total += want_m_window[topic];
    if (alive_[topic]) {
      const double want_inv =
          1.0 / (static_cast<double>(l_total_[topic]) + vocab_ * hyper_.eta);
      must(inv_l_denom_[topic] == want_inv, "inv_l_denom cache mismatch");
      for (int w = 0; w < vocab_; ++w) {
        const int have = l_[topic].empty() ? 0 : l_[topic][static_cast<std::size_t>(w)];
        const int want = want_l[topic].empty() ? 0 : want_l[topic][static_cast<std::size_t>(w)];
        must(have == want, "l_wk cache mismatch");
      }
      must(std::find(active_.begin(), active_.end(), static_cast<int>(topic)) !=
               active_.end(),
           "alive topic missing from active list");
    } else {
      must(want_l_total[topic] == 0 && want_m_all[topic] == 0,
           "dead topic still holds counts");
      must(std::find(active_.begin(), active_.end(), static_cast<int>(topic)) ==
               active_.end(),
           "dead topic in active list");
    }
  }
  must(m_all_total_ == want_m_all_total, "m_all_total cache mismatch");
  must(m_window_total_ == want_m_window_total, "m_window_total cache mismatch");
  must(seated_tokens_total_ == want_seated_total, "seated token total mismatch");
  must(std::is_sorted(active_.begin(), active_.end()), "active list not sorted");
}

}  // namespace dhdp
