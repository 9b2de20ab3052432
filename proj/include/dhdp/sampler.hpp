#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dhdp/corpus.hpp"
#include "dhdp/crf_state.hpp"
#include "dhdp/rng.hpp"

namespace dhdp {

// Batch moves see the next document through the one-step lookahead
// factor; online moves use the prior only and freeze global counts.
enum class SampleMode { kBatch, kOnline };

struct SamplerConfig {
  int burn_in_sweeps = 1000;
  int chains = 5;
  std::uint64_t master_seed = 1;
  int samples_per_chain = 1;
  int thin_sweeps = 1;
  int online_sweeps = 1000;

  void validate() const;
};

// Per-document sampling weights over the active topics, cached between
// moves and rebuilt whenever table counts change. For dynamic batch
// sampling it also carries the next-document lookahead: per-topic
// likelihood ratios, candidates for topics that would otherwise first
// appear in document j+1, and the table-count correction applied to the
// new-table branch.
struct DocSamplingWeights {
  std::vector<int> topics;        // active ids at rebuild time, ascending
  std::vector<double> prior_w;    // topic prior weight per id (0 = outside support)
  std::vector<double> wg;         // prior_w times next-doc ratio, new-table mixture
  double prior_total = 0.0;       // sum of prior_w
  double draw_denominator = 0.0;  // prior_total + gamma
  double log_table_correction = 0.0;  // log of the next-doc denominator ratio

  // Next-document topics with support in the window: baseline and
  // candidate-adjusted log factors.
  std::vector<int> nd_index_of_slot;  // slot -> index into nd_* or -1
  std::vector<double> nd_log_baseline;
  std::vector<double> nd_log_adjusted;
  int nd_zero_baselines = 0;          // baselines that vanished (possible when delta == 0)

  // Topics used in document j+1 with no support in documents 1..j: these
  // enter the conditional through the new-topic branch.
  std::vector<int> adopt_topics;
  std::vector<double> adopt_weight;

  std::uint64_t version = ~0ull;
  int doc = -1;
  SampleMode mode = SampleMode::kBatch;

  void rebuild(const CrfState& state, int j, SampleMode mode);
  void ensure(const CrfState& state, int j, SampleMode mode);
  bool valid_for(const CrfState& state, int j, SampleMode mode) const;

  // log of G(candidate)/G(baseline) for an existing-topic candidate slot;
  // -inf when the candidate cannot support document j+1.
  double rel_log_g_topic(std::size_t slot) const;
  // Same for the fresh-topic branch (and any candidate that leaves the
  // next document's support unchanged).
  double rel_log_g_none() const;

 private:
  std::vector<double> scratch_table_weights_;
  friend int seat_token_by_sampling(CrfState&, int, int, Rng&, SampleMode,
                                    DocSamplingWeights*);
};

// --- spec-level operations -------------------------------------------------

// Unnormalised topic prior weight for an existing topic (the caller is
// responsible for the -jt convention, e.g. via detach_table_counts).
double topic_prior(const CrfState& state, int j, int topic);
double topic_prior_new(const CrfState& state);

// log g_k(k_{j+1}): the next-document factor for candidate `topic`
// (kNoTopic = no adjustment / fresh topic), product over the topics of
// document j+1 that do not first appear there. 0 when j is the last
// document.
double next_doc_log_factor(const CrfState& state, int j, int topic);

// r_{t_new}(word): mixture of word predictives under the normalised topic
// prior (batch: prior times next-doc factor; online: prior only).
double new_table_word_likelihood(const CrfState& state, int j, int word,
                                 SampleMode mode);

// Resample the topic of table t (detach, score, attach; a fresh id is
// activated when the new-topic branch wins). Returns the topic.
int sample_topic_for_table(CrfState& state, int j, int t, Rng& rng, SampleMode mode,
                           DocSamplingWeights* weights = nullptr);

// Seat the (currently unseated) token by sampling a table; a drawn new
// table immediately receives a topic. Returns the table index.
int seat_token_by_sampling(CrfState& state, int j, int i, Rng& rng, SampleMode mode,
                           DocSamplingWeights* weights = nullptr);

// Unseat token i and reseat it by sampling. Returns the table index.
int sample_table_for_token(CrfState& state, int j, int i, Rng& rng, SampleMode mode,
                           DocSamplingWeights* weights = nullptr);

// One full sweep in document order: every token's table, then every live
// table's topic.
void gibbs_sweep(CrfState& state, Rng& rng, SampleMode mode, DocSamplingWeights& weights);

// --- batch fit ---------------------------------------------------------------

struct ChainFit {
  int chain = 0;
  std::vector<ModelSnapshot> samples;  // samples_per_chain entries, last = final sweep
};

// Runs `config.chains` independent chains (in parallel across worker
// threads); results depend only on (corpus, hyper, config). Progress lines
// "chain=<c> sweep=<n> K=<k> loglik=<v>" go to `progress` when non-null.
std::vector<ChainFit> batch_fit(const Corpus& corpus, const Hyperparameters& hyper,
                                const SamplerConfig& config,
                                std::ostream* progress = nullptr);

// --- online inference --------------------------------------------------------

struct OnlineInferResult {
  double log_predictive = 0.0;  // log p(x_j | t, k, x_{1:j-1}) at the final state
  int n_tokens = 0;
  ModelSnapshot updated;
};

// Samples only the new document's variables for online_sweeps sweeps with
// global counts frozen at the snapshot, then folds the document in. The
// updated snapshot's previous-document vector becomes this document's.
OnlineInferResult online_infer(const ModelSnapshot& snapshot,
                               const std::vector<int>& tokens, int online_sweeps,
                               Rng& rng);

// One chain's snapshot advanced document by document.
class OnlineChain {
 public:
  OnlineChain(ModelSnapshot snapshot, std::uint64_t seed, std::uint64_t stream)
      : snap_(std::move(snapshot)), rng_(seed, stream) {}

  // Returns the document's log predictive under the pre-fold counts.
  OnlineInferResult process_document(const std::vector<int>& tokens, int online_sweeps) {
    OnlineInferResult result = online_infer(snap_, tokens, online_sweeps, rng_);
    snap_ = result.updated;
    return result;
  }

  const ModelSnapshot& snapshot() const { return snap_; }

 private:
  ModelSnapshot snap_;
  Rng rng_;
};

}  // namespace dhdp
