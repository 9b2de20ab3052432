#include "dhdp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dhdp/corpus_io.hpp"
#include "dhdp/errors.hpp"

namespace dhdp {

BarTopics bar_topics(double noise) {
  if (noise < 0.0 || noise > 1.0) throw DataError("noise must be in [0, 1]");
  BarTopics bars;
  bars.noise = noise;
  bars.phi.assign(BarTopics::kTopics, std::vector<double>(BarTopics::kVocab, 0.0));
  const double on = (1.0 - noise) * 0.2 + noise / BarTopics::kVocab;
  const double off = noise / BarTopics::kVocab;
  for (int k = 0; k < BarTopics::kTopics; ++k) {
    for (int w = 0; w < BarTopics::kVocab; ++w) {
      const int row = w / 5;
      const int col = w % 5;
      const bool in_bar = (k < 5) ? (row == k) : (col == k - 5);
      bars.phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)] =
          in_bar ? on : off;
    }
  }
  return bars;
}

namespace {

int draw_word(const BarTopics& bars, int topic, Rng& rng) {
  const auto& phi = bars.phi[static_cast<std::size_t>(topic)];
  double u = rng.uniform();
  double acc = 0.0;
  for (int w = 0; w < BarTopics::kVocab; ++w) {
    acc += phi[static_cast<std::size_t>(w)];
    if (u < acc) return w;
  }
  return BarTopics::kVocab - 1;
}

}  // namespace

GeneratedSequence generate_sequence(const GenerateOptions& options, Rng& rng) {
  if (options.num_docs < 1) throw DataError("num_docs must be >= 1");
  if (options.words_per_doc < 1) throw DataError("words_per_doc must be >= 1");
  if (options.alpha <= 0.0 || options.gamma <= 0.0) {
    throw DataError("alpha and gamma must be > 0");
  }
  if (options.delta < 0.0) throw DataError("delta must be >= 0");
  std::vector<char> abnormal(static_cast<std::size_t>(options.num_docs), 0);
  for (int j : options.abnormal_docs) {
    if (j == 0) throw DataError("document 0 cannot be abnormal: no previous document");
    if (j < 0 || j >= options.num_docs) {
      throw DataError("abnormal index " + std::to_string(j) + " out of range");
    }
    abnormal[static_cast<std::size_t>(j)] = 1;
  }

  const BarTopics bars = bar_topics(options.noise);
  constexpr int kTopics = BarTopics::kTopics;

  GeneratedSequence out;
  out.corpus.vocabulary.size = BarTopics::kVocab;
  out.truth.noise = options.noise;
  out.truth.alpha = options.alpha;
  out.truth.gamma = options.gamma;
  out.truth.delta = options.delta;
  out.truth.abnormal = abnormal;

  std::vector<int> m_cumulative(kTopics, 0);   // m_{1:j,k} over the chain so far
  std::vector<int> m_prev(kTopics, 0);         // m_{j-1,k}
  long m_cumulative_total = 0;
  long m_prev_total = 0;

  std::vector<double> weights(static_cast<std::size_t>(kTopics) + 1, 0.0);

  for (int j = 0; j < options.num_docs; ++j) {
    Document doc;
    doc.doc_index = j;
    std::vector<int> table_topic;
    std::vector<int> table_n;
    std::vector<int> token_topic;
    std::vector<int> m_cur(kTopics, 0);

    for (int i = 0; i < options.words_per_doc; ++i) {
      // Table via the within-document seating process.
      double total = 0.0;
      weights.resize(table_n.size() + 1);
      for (std::size_t t = 0; t < table_n.size(); ++t) {
        weights[t] = static_cast<double>(table_n[t]);
        total += weights[t];
      }
      weights[table_n.size()] = options.alpha;
      total += options.alpha;
      const std::size_t t = rng.pick(weights, total);

      if (t == table_n.size()) {
        int topic = -1;
        if (abnormal[static_cast<std::size_t>(j)]) {
          // Uniform over the bars absent from the previous document.
          std::vector<int> candidates;
          for (int k = 0; k < kTopics; ++k) {
            if (m_prev[static_cast<std::size_t>(k)] == 0) candidates.push_back(k);
          }
          if (candidates.empty()) {
            for (int k = 0; k < kTopics; ++k) candidates.push_back(k);
          }
          topic = candidates[rng.below(candidates.size())];
        } else {
          // m_jk + m_{j-1,k} + delta m_{1:j,k}; the new-topic mass spreads
          // uniformly over unused bars, or folds back proportionally once
          // all ten are in play.
          std::vector<double> topic_weights(kTopics + 1, 0.0);
          std::vector<int> unused;
          double grand = 0.0;
          for (int k = 0; k < kTopics; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            topic_weights[ks] = static_cast<double>(m_cur[ks]) +
                                static_cast<double>(m_prev[ks]) +
                                options.delta * static_cast<double>(m_cumulative[ks]);
            grand += topic_weights[ks];
            if (m_cumulative[ks] == 0) unused.push_back(k);
          }
          topic_weights[kTopics] = unused.empty() ? 0.0 : options.gamma;
          grand += topic_weights[kTopics];
          const std::size_t pick = rng.pick(topic_weights, grand);
          topic = (pick == static_cast<std::size_t>(kTopics))
                      ? unused[rng.below(unused.size())]
                      : static_cast<int>(pick);
        }
        table_topic.push_back(topic);
        table_n.push_back(1);
        m_cur[static_cast<std::size_t>(topic)] += 1;
        m_cumulative[static_cast<std::size_t>(topic)] += 1;
        m_cumulative_total += 1;
      } else {
        table_n[t] += 1;
      }

      const int topic = table_topic[t];
      const int word = draw_word(bars, topic, rng);
      doc.tokens.push_back(word);
      token_topic.push_back(topic);
    }

    m_prev = m_cur;
    m_prev_total = 0;
    for (int k = 0; k < kTopics; ++k) m_prev_total += m_prev[static_cast<std::size_t>(k)];

    out.corpus.documents.push_back(std::move(doc));
    out.truth.token_topics.push_back(std::move(token_topic));
    out.truth.table_topics.push_back(std::move(table_topic));
  }
  (void)m_prev_total;
  (void)m_cumulative_total;
  out.corpus.validate();
  return out;
}

double true_model_score(const Document& doc, const std::vector<int>& token_topics,
                        const BarTopics& bars) {
  if (doc.tokens.size() != token_topics.size()) {
    throw DataError("token topics disagree with document length");
  }
  if (doc.tokens.empty()) return std::nan("");
  double acc = 0.0;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    acc += std::log(bars.prob(token_topics[i], doc.tokens[i]));
  }
  return acc / static_cast<double>(doc.tokens.size());
}

void write_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "dhdp-truth\n";
  out << "format_version=1\n";
  out << "seed=" << truth.seed << "\n";
  out << "noise=" << format_double(truth.noise) << "\n";
  out << "alpha=" << format_double(truth.alpha) << "\n";
  out << "gamma=" << format_double(truth.gamma) << "\n";
  out << "delta=" << format_double(truth.delta) << "\n";
  out << "docs=" << truth.abnormal.size() << "\n";
  for (std::size_t j = 0; j < truth.abnormal.size(); ++j) {
    out << j << ' ' << static_cast<int>(truth.abnormal[j]) << ' ';
    const auto& topics = truth.token_topics[j];
    for (std::size_t i = 0; i < topics.size(); ++i) {
      if (i) out << ' ';
      out << topics[i];
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

GroundTruth read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw DataError(path + ": truncated truth file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next_line() != "dhdp-truth") throw DataError(path + ": not a truth file");
  auto field = [&](const std::string& key) {
    next_line();
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0) {
      throw DataError(path + ": expected '" + key + "='");
    }
    return line.substr(prefix.size());
  };
  if (std::stoi(field("format_version")) != 1) {
    throw DataError(path + ": unsupported truth format version");
  }
  GroundTruth truth;
  truth.seed = std::stoull(field("seed"));
  truth.noise = std::stod(field("noise"));
  truth.alpha = std::stod(field("alpha"));
  truth.gamma = std::stod(field("gamma"));
  truth.delta = std::stod(field("delta"));
  const long docs = std::stol(field("docs"));
  truth.abnormal.resize(static_cast<std::size_t>(docs), 0);
  truth.token_topics.resize(static_cast<std::size_t>(docs));
  for (long j = 0; j < docs; ++j) {
    std::istringstream ss(next_line());
    long doc_id = 0;
    int flag = 0;
    if (!(ss >> doc_id >> flag) || doc_id != j || (flag != 0 && flag != 1)) {
      throw DataError(path + ": bad truth line for doc " + std::to_string(j));
    }
    truth.abnormal[static_cast<std::size_t>(j)] = static_cast<char>(flag);
    int topic = 0;
    while (ss >> topic) {
      if (topic < 0 || topic >= BarTopics::kTopics) {
        throw DataError(path + ": topic id out of range");
      }
      truth.token_topics[static_cast<std::size_t>(j)].push_back(topic);
    }
  }
  return truth;
}

}  // namespace dhdp
