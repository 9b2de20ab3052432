#include "dhdp/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "dhdp/errors.hpp"
#include "dhdp/mathutil.hpp"

namespace dhdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int sparse_lookup(const std::vector<std::pair<int, int>>& entries, int key) {
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const auto& e, int k) { return e.first < k; });
  return (it != entries.end() && it->first == key) ? it->second : 0;
}

// Draw an index from log weights via max shift; -inf entries carry no mass.
std::size_t pick_from_log_weights(Rng& rng, std::span<const double> log_weights) {
  double m = kNegInf;
  for (double lw : log_weights) {
    if (lw > m) m = lw;
  }
  if (!(m > kNegInf)) {
    throw ContractViolation("sampling distribution has no positive mass");
  }
  thread_local std::vector<double> linear;
  linear.resize(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    linear[i] = std::isfinite(log_weights[i]) ? std::exp(log_weights[i] - m) : 0.0;
    total += linear[i];
  }
  return rng.pick(linear, total);
}

}  // namespace

void SamplerConfig::validate() const {
  if (burn_in_sweeps < 1) throw DataError("burn_in_sweeps must be >= 1");
  if (chains < 1) throw DataError("chains must be >= 1");
  if (samples_per_chain < 1) throw DataError("samples_per_chain must be >= 1");
  if (thin_sweeps < 1) throw DataError("thin_sweeps must be >= 1");
  if (online_sweeps < 1) throw DataError("online_sweeps must be >= 1");
}

bool DocSamplingWeights::valid_for(const CrfState& state, int j, SampleMode m) const {
  return doc == j && mode == m && version == state.m_version();
}

void DocSamplingWeights::ensure(const CrfState& state, int j, SampleMode m) {
  if (!valid_for(state, j, m)) rebuild(state, j, m);
}

void DocSamplingWeights::rebuild(const CrfState& state, int j, SampleMode m) {
  const Hyperparameters& hp = state.hyper();
  const bool dynamic = hp.model_kind == ModelKind::kDynamicHdp;
  const std::span<const int> active = state.active_topics();
  const std::size_t K = active.size();

  topics.assign(active.begin(), active.end());
  prior_w.assign(K, 0.0);
  nd_index_of_slot.assign(K, -1);
  nd_log_baseline.clear();
  nd_log_adjusted.clear();
  adopt_topics.clear();
  adopt_weight.clear();
  nd_zero_baselines = 0;
  log_table_correction = 0.0;

  const DocSeating& doc_j = state.doc(j);
  if (!dynamic) {
    prior_total = 0.0;
    for (std::size_t slot = 0; slot < K; ++slot) {
      prior_w[slot] = static_cast<double>(state.m_all(topics[slot]));
      prior_total += prior_w[slot];
    }
  } else {
    const double delta = hp.delta;
    for (std::size_t slot = 0; slot < K; ++slot) {
      prior_w[slot] = delta * static_cast<double>(state.m_window(topics[slot]));
    }
    // Current document's m_jk and the previous document's m_{j-1,k} ride on
    // top of the window term; both are sparse over ascending topic ids.
    auto add_sparse = [this, K](const std::vector<std::pair<int, int>>& entries) {
      std::size_t slot = 0;
      for (const auto& [topic, count] : entries) {
        while (slot < K && topics[slot] < topic) ++slot;
        if (slot < K && topics[slot] == topic) {
          prior_w[slot] += static_cast<double>(count);
        }
      }
    };
    add_sparse(doc_j.topic_tables);
    if (j == 0 && state.has_base()) {
      const auto& prev = state.base().m_last_doc;
      for (std::size_t topic = 0; topic < prev.size(); ++topic) {
        // Base ids form the leading prefix of the active list.
        if (prev[topic] > 0) prior_w[topic] += static_cast<double>(prev[topic]);
      }
    } else if (j > 0) {
      add_sparse(state.doc(j - 1).topic_tables);
    }
    prior_total = static_cast<double>(doc_j.total_topic_tables()) +
                  static_cast<double>(state.m_prev_doc_total(j)) +
                  delta * static_cast<double>(state.m_window_total());
  }
  draw_denominator = prior_total + hp.gamma;

  if (dynamic && m == SampleMode::kBatch && j + 1 < state.num_documents()) {
    const double delta = hp.delta;
    const DocSeating& doc_next = state.doc(j + 1);
    for (const auto& [s, m_next] : doc_next.topic_tables) {
      const int mw = state.m_window(s);
      if (mw == 0) {
        // First appearance would be in document j+1: reachable for the
        // current table only through the new-topic branch; the born-term
        // bookkeeping leaves weight m_{j+1,s} * (1 + delta).
        adopt_topics.push_back(s);
        adopt_weight.push_back(static_cast<double>(m_next) * (1.0 + delta));
        continue;
      }
      const int mc = doc_j.tables_for_topic(s);
      double log_b = 0.0;
      double log_a = 0.0;
      bool zero = false;
      for (int n = 0; n < m_next; ++n) {
        const double tb = static_cast<double>(mc + n) + delta * static_cast<double>(mw + n);
        const double ta =
            static_cast<double>(mc + 1 + n) + delta * static_cast<double>(mw + 1 + n);
        if (tb <= 0.0) {
          zero = true;
        } else {
          log_b += std::log(tb);
        }
        log_a += std::log(ta);
      }
      const auto slot = static_cast<std::size_t>(
          std::lower_bound(topics.begin(), topics.end(), s) - topics.begin());
      nd_index_of_slot[slot] = static_cast<int>(nd_log_baseline.size());
      nd_log_baseline.push_back(zero ? kNegInf : log_b);
      nd_log_adjusted.push_back(log_a);
      if (zero) ++nd_zero_baselines;
    }
    // Creating a table in document j enters every next-document draw
    // denominator: D_n shifts by 1 + delta.
    const int m_next_total = doc_next.total_topic_tables();
    const double mj = static_cast<double>(doc_j.total_topic_tables());
    const double cj = static_cast<double>(state.m_window_total());
    for (int n = 0; n < m_next_total; ++n) {
      const double dn =
          static_cast<double>(n) + mj + delta * (cj + static_cast<double>(n)) + hp.gamma;
      log_table_correction += std::log(dn) - std::log(dn + 1.0 + delta);
    }
  }

  wg.assign(K, 0.0);
  for (std::size_t slot = 0; slot < K; ++slot) {
    if (prior_w[slot] <= 0.0) continue;
    const double rel = rel_log_g_topic(slot);
    wg[slot] = std::isfinite(rel) ? prior_w[slot] * std::exp(rel) : 0.0;
  }

  version = state.m_version();
  doc = j;
  mode = m;
}

double DocSamplingWeights::rel_log_g_topic(std::size_t slot) const {
  const int nd = nd_index_of_slot[slot];
  if (nd_zero_baselines == 0) {
    return nd >= 0 ? nd_log_adjusted[static_cast<std::size_t>(nd)] -
                         nd_log_baseline[static_cast<std::size_t>(nd)]
                   : 0.0;
  }
  if (nd_zero_baselines == 1 && nd >= 0 &&
      nd_log_baseline[static_cast<std::size_t>(nd)] == kNegInf) {
    // Only this candidate restores the vanished support of its own topic;
    // relative to the finite part of the baseline the factor is exp(a).
    return nd_log_adjusted[static_cast<std::size_t>(nd)];
  }
  return kNegInf;
}

double DocSamplingWeights::rel_log_g_none() const {
  return nd_zero_baselines == 0 ? 0.0 : kNegInf;
}

double topic_prior(const CrfState& state, int j, int topic) {
  const Hyperparameters& hp = state.hyper();
  if (hp.model_kind == ModelKind::kPlainHdp) {
    return static_cast<double>(state.m_all(topic));
  }
  return static_cast<double>(state.doc(j).tables_for_topic(topic)) +
         static_cast<double>(state.m_prev_doc(j, topic)) +
         hp.delta * static_cast<double>(state.m_window(topic));
}

double topic_prior_new(const CrfState& state) { return state.hyper().gamma; }

double next_doc_log_factor(const CrfState& state, int j, int topic) {
  if (j + 1 >= state.num_documents()) return 0.0;
  const double delta = state.hyper().delta;
  const DocSeating& doc_j = state.doc(j);
  double acc = 0.0;
  for (const auto& [s, m_next] : state.doc(j + 1).topic_tables) {
    const int boost = (s == topic) ? 1 : 0;
    const int mw = state.m_window(s) + boost;
    if (mw == 0) continue;  // first appears in document j+1
    const int mc = doc_j.tables_for_topic(s) + boost;
    for (int n = 0; n < m_next; ++n) {
      const double term =
          static_cast<double>(mc + n) + delta * static_cast<double>(mw + n);
      if (term <= 0.0) return kNegInf;  // candidate cannot support doc j+1
      acc += std::log(term);
    }
  }
  return acc;
}

double new_table_word_likelihood(const CrfState& state, int j, int word,
                                 SampleMode mode) {
  DocSamplingWeights weights;
  weights.rebuild(state, j, mode);
  double numerator = state.hyper().gamma *
                     (weights.rel_log_g_none() == 0.0 ? 1.0 : 0.0) /
                     static_cast<double>(state.vocab_size());
  double denominator =
      state.hyper().gamma * (weights.rel_log_g_none() == 0.0 ? 1.0 : 0.0);
  for (std::size_t slot = 0; slot < weights.topics.size(); ++slot) {
    if (weights.wg[slot] <= 0.0) continue;
    numerator += weights.wg[slot] *
                 state.word_topic_predictive(word, weights.topics[slot]);
    denominator += weights.wg[slot];
  }
  if (!(denominator > 0.0)) {
    throw ContractViolation("new-table likelihood has no positive prior mass");
  }
  return numerator / denominator;
}

namespace {

// Topic draw for a table whose counts are currently excluded (detached
// table or a fresh single-token table). Attaches the drawn topic.
int sample_topic_for_excluded_table(CrfState& state, int j, int t, Rng& rng,
                                    SampleMode mode, DocSamplingWeights& weights) {
  weights.ensure(state, j, mode);

  thread_local std::vector<int> block;
  block.clear();
  const DocSeating& doc = state.doc(j);
  for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
    if (doc.token_table[i] == t) block.push_back(doc.words[i]);
  }
  thread_local std::vector<std::pair<int, int>> block_counts;
  block_counts.clear();
  for (int w : block) {
    auto it = std::lower_bound(block_counts.begin(), block_counts.end(), w,
                               [](const auto& e, int k) { return e.first < k; });
    if (it != block_counts.end() && it->first == w) {
      it->second += 1;
    } else {
      block_counts.insert(it, {w, 1});
    }
  }
  const long block_size = static_cast<long>(block.size());

  const std::size_t K = weights.topics.size();
  thread_local std::vector<double> log_weight;
  log_weight.assign(K + 1 + weights.adopt_topics.size(), kNegInf);
  for (std::size_t slot = 0; slot < K; ++slot) {
    if (weights.prior_w[slot] <= 0.0) continue;
    const double rel = weights.rel_log_g_topic(slot);
    if (!std::isfinite(rel)) continue;
    log_weight[slot] =
        std::log(weights.prior_w[slot]) + rel +
        state.table_block_log_likelihood_counts(block_counts, block_size,
                                                weights.topics[slot]);
  }
  const double rel_none = weights.rel_log_g_none();
  if (std::isfinite(rel_none)) {
    log_weight[K] = std::log(state.hyper().gamma) + rel_none +
                    state.table_block_log_likelihood_counts(block_counts, block_size,
                                                            kNoTopic);
    for (std::size_t a = 0; a < weights.adopt_topics.size(); ++a) {
      log_weight[K + 1 + a] =
          std::log(weights.adopt_weight[a]) +
          state.table_block_log_likelihood_counts(block_counts, block_size,
                                                  weights.adopt_topics[a]);
    }
  }

  const std::size_t choice = pick_from_log_weights(rng, log_weight);
  int topic = kNoTopic;
  if (choice < K) {
    topic = weights.topics[choice];
  } else if (choice == K) {
    topic = state.activate_topic();
  } else {
    topic = weights.adopt_topics[choice - K - 1];
  }
  state.attach_table_counts(j, t, topic);
  return topic;
}

}  // namespace

int sample_topic_for_table(CrfState& state, int j, int t, Rng& rng, SampleMode mode,
                           DocSamplingWeights* weights) {
  DocSamplingWeights local;
  DocSamplingWeights& w = weights ? *weights : local;
  const int old_topic = state.detach_table_counts(j, t);
  const int topic = sample_topic_for_excluded_table(state, j, t, rng, mode, w);
  if (topic != old_topic) state.maybe_deactivate_topic(old_topic);
  return topic;
}

int seat_token_by_sampling(CrfState& state, int j, int i, Rng& rng, SampleMode mode,
                           DocSamplingWeights* weights) {
  DocSamplingWeights local;
  DocSamplingWeights& w = weights ? *weights : local;
  w.ensure(state, j, mode);

  const DocSeating& doc = state.doc(j);
  const int word = doc.words[static_cast<std::size_t>(i)];
  const Hyperparameters& hp = state.hyper();

  std::vector<double>& tw = w.scratch_table_weights_;
  tw.assign(doc.tables.size() + 1, 0.0);
  double total = 0.0;
  const double table_scale = (w.nd_zero_baselines == 0) ? 1.0 : 0.0;
  if (table_scale > 0.0) {
    for (std::size_t t = 0; t < doc.tables.size(); ++t) {
      const Table& table = doc.tables[t];
      if (!table.live() || table.topic == kNoTopic) continue;
      tw[t] = state.word_topic_predictive(word, table.topic) *
              static_cast<double>(table.n_tokens);
      total += tw[t];
    }
  }

  // New-table branch: word likelihood mixed over the topic draw, with the
  // next-document table-count correction.
  double mixture = 0.0;
  if (w.nd_zero_baselines == 0) {
    for (std::size_t slot = 0; slot < w.topics.size(); ++slot) {
      if (w.wg[slot] <= 0.0) continue;
      mixture += w.wg[slot] * state.word_topic_predictive(word, w.topics[slot]);
    }
    mixture += hp.gamma / static_cast<double>(state.vocab_size());
    for (std::size_t a = 0; a < w.adopt_topics.size(); ++a) {
      mixture += w.adopt_weight[a] *
                 state.word_topic_predictive(word, w.adopt_topics[a]);
    }
  } else if (w.nd_zero_baselines == 1) {
    for (std::size_t slot = 0; slot < w.topics.size(); ++slot) {
      if (w.prior_w[slot] <= 0.0) continue;
      const double rel = w.rel_log_g_topic(slot);
      if (!std::isfinite(rel)) continue;
      mixture += w.prior_w[slot] * std::exp(rel) *
                 state.word_topic_predictive(word, w.topics[slot]);
    }
  }
  tw[doc.tables.size()] = hp.alpha * std::exp(w.log_table_correction) * mixture /
                          w.draw_denominator;
  total += tw[doc.tables.size()];

  const std::size_t choice = rng.pick(tw, total);
  if (choice < doc.tables.size()) {
    state.seat_token(j, i, static_cast<int>(choice));
    return static_cast<int>(choice);
  }
  const int t = state.new_table(j);
  state.seat_token(j, i, t);
  sample_topic_for_excluded_table(state, j, t, rng, mode, w);
  return t;
}

int sample_table_for_token(CrfState& state, int j, int i, Rng& rng, SampleMode mode,
                           DocSamplingWeights* weights) {
  state.unseat_token(j, i);
  return seat_token_by_sampling(state, j, i, rng, mode, weights);
}

void gibbs_sweep(CrfState& state, Rng& rng, SampleMode mode,
                 DocSamplingWeights& weights) {
  state.reset_window();
  for (int j = 0; j < state.num_documents(); ++j) {
    state.advance_window();
    const DocSeating& doc = state.doc(j);
    if (doc.words.empty()) continue;
    for (int i = 0; i < static_cast<int>(doc.words.size()); ++i) {
      sample_table_for_token(state, j, i, rng, mode, &weights);
    }
    for (int t = 0; t < static_cast<int>(doc.tables.size()); ++t) {
      if (doc.tables[static_cast<std::size_t>(t)].live()) {
        sample_topic_for_table(state, j, t, rng, mode, &weights);
      }
    }
  }
}

namespace {

void initial_seating(CrfState& state, Rng& rng, SampleMode mode,
                     DocSamplingWeights& weights) {
  state.reset_window();
  for (int j = 0; j < state.num_documents(); ++j) {
    state.advance_window();
    const DocSeating& doc = state.doc(j);
    for (int i = 0; i < static_cast<int>(doc.words.size()); ++i) {
      seat_token_by_sampling(state, j, i, rng, mode, &weights);
    }
  }
}

struct ProgressLog {
  std::ostream* out = nullptr;
  std::mutex mutex;

  void line(int chain, int sweep, int num_topics, double loglik) {
    if (!out) return;
    std::lock_guard<std::mutex> lock(mutex);
    (*out) << "chain=" << chain << " sweep=" << sweep << " K=" << num_topics
           << " loglik=" << loglik << "\n";
  }
};

ChainFit fit_single_chain(const Corpus& corpus, const Hyperparameters& hyper,
                          const SamplerConfig& config, int chain,
                          ProgressLog& progress) {
  CrfState state(corpus.vocabulary.size, hyper);
  for (const Document& doc : corpus.documents) {
    state.append_document(doc.tokens);
  }
  Rng rng(config.master_seed, static_cast<std::uint64_t>(chain));
  DocSamplingWeights weights;

  initial_seating(state, rng, SampleMode::kBatch, weights);
  const int log_every = std::max(1, config.burn_in_sweeps / 20);
  progress.line(chain, 0, state.num_active_topics(),
                state.collapsed_data_log_likelihood());
  for (int sweep = 1; sweep <= config.burn_in_sweeps; ++sweep) {
    state.compact_tables();
    gibbs_sweep(state, rng, SampleMode::kBatch, weights);
    if (sweep % log_every == 0 || sweep == config.burn_in_sweeps) {
      progress.line(chain, sweep, state.num_active_topics(),
                    state.collapsed_data_log_likelihood());
    }
  }

  ChainFit fit;
  fit.chain = chain;
  fit.samples.push_back(state.snapshot());
  for (int extra = 1; extra < config.samples_per_chain; ++extra) {
    for (int s = 0; s < config.thin_sweeps; ++s) {
      state.compact_tables();
      gibbs_sweep(state, rng, SampleMode::kBatch, weights);
    }
    fit.samples.push_back(state.snapshot());
  }
  return fit;
}

}  // namespace

std::vector<ChainFit> batch_fit(const Corpus& corpus, const Hyperparameters& hyper,
                                const SamplerConfig& config, std::ostream* out) {
  corpus.validate();
  hyper.validate();
  config.validate();
  if (corpus.documents.empty()) {
    throw DataError("batch_fit requires a nonempty corpus");
  }

  ProgressLog progress;
  progress.out = out;
  std::vector<ChainFit> fits(static_cast<std::size_t>(config.chains));
  const unsigned workers = std::min<unsigned>(
      static_cast<unsigned>(config.chains),
      std::max(1u, std::thread::hardware_concurrency()));

  if (workers <= 1) {
    for (int chain = 0; chain < config.chains; ++chain) {
      fits[static_cast<std::size_t>(chain)] =
          fit_single_chain(corpus, hyper, config, chain, progress);
    }
    return fits;
  }

  std::atomic<int> next_chain{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned wi = 0; wi < workers; ++wi) {
    pool.emplace_back([&] {
      for (;;) {
        const int chain = next_chain.fetch_add(1);
        if (chain >= config.chains) return;
        try {
          fits[static_cast<std::size_t>(chain)] =
              fit_single_chain(corpus, hyper, config, chain, progress);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return fits;
}

OnlineInferResult online_infer(const ModelSnapshot& snapshot,
                               const std::vector<int>& tokens, int online_sweeps,
                               Rng& rng) {
  if (online_sweeps < 1) throw DataError("online_sweeps must be >= 1");
  OnlineInferResult result;
  result.n_tokens = static_cast<int>(tokens.size());
  if (tokens.empty()) {
    result.log_predictive = 0.0;
    result.updated = snapshot;
    std::fill(result.updated.m_last_doc.begin(), result.updated.m_last_doc.end(), 0);
    return result;
  }

  CrfState state(snapshot, snapshot.hyper);
  const int j = state.append_document(tokens);
  DocSamplingWeights weights;
  initial_seating(state, rng, SampleMode::kOnline, weights);
  for (int sweep = 1; sweep <= online_sweeps; ++sweep) {
    state.compact_tables();
    gibbs_sweep(state, rng, SampleMode::kOnline, weights);
  }
  if (!state.base_counts_intact()) {
    throw ContractViolation("online sweeps touched frozen snapshot counts");
  }

  // log p(x_j | t, k, x_{1:j-1}): rising factorials of the document's
  // topic-word increments over the pre-fold counts.
  const DocSeating& doc = state.doc(j);
  struct Inc {
    int topic;
    int word;
    int count;
  };
  thread_local std::vector<Inc> incs;
  incs.clear();
  thread_local std::vector<std::pair<int, int>> topic_totals;
  topic_totals.clear();
  for (std::size_t i = 0; i < doc.token_table.size(); ++i) {
    const int t = doc.token_table[i];
    const int topic = doc.tables[static_cast<std::size_t>(t)].topic;
    const int word = doc.words[i];
    auto it = std::find_if(incs.begin(), incs.end(), [&](const Inc& e) {
      return e.topic == topic && e.word == word;
    });
    if (it == incs.end()) {
      incs.push_back({topic, word, 1});
    } else {
      it->count += 1;
    }
    auto tt = std::find_if(topic_totals.begin(), topic_totals.end(),
                           [&](const auto& e) { return e.first == topic; });
    if (tt == topic_totals.end()) {
      topic_totals.emplace_back(topic, 1);
    } else {
      tt->second += 1;
    }
  }
  const double eta = state.hyper().eta;
  const double veta = state.vocab_size() * eta;
  double logp = 0.0;
  for (const Inc& inc : incs) {
    const int before = state.l_word(inc.topic, inc.word) - inc.count;
    logp += log_rising_factorial(static_cast<double>(before) + eta, inc.count);
  }
  for (const auto& [topic, count] : topic_totals) {
    const std::int64_t before = state.l_total(topic) - count;
    logp -= log_rising_factorial(static_cast<double>(before) + veta, count);
  }
  result.log_predictive = logp;
  result.updated = state.snapshot();
  return result;
}

}  // namespace dhdp
