#include "dhdp/eval.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "dhdp/corpus_io.hpp"
#include "dhdp/errors.hpp"

namespace dhdp {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("scores and labels differ in length");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("labels must be 0 or 1");
  }
}

// Distinct scores ascending with positive/negative counts per value.
struct ScoreGroups {
  std::vector<double> value;
  std::vector<long> pos;
  std::vector<long> neg;
  long total_pos = 0;
  long total_neg = 0;
};

ScoreGroups group_scores(std::span<const double> scores, std::span<const int> labels) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  ScoreGroups g;
  for (std::size_t i : order) {
    if (g.value.empty() || scores[i] != g.value.back()) {
      g.value.push_back(scores[i]);
      g.pos.push_back(0);
      g.neg.push_back(0);
    }
    if (labels[i] == 1) {
      g.pos.back() += 1;
      g.total_pos += 1;
    } else {
      g.neg.back() += 1;
      g.total_neg += 1;
    }
  }
  return g;
}

}  // namespace

Confusion confusion(std::span<const double> scores, std::span<const int> labels,
                    double threshold) {
  check_inputs(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_abnormal = scores[i] < threshold;
    if (labels[i] == 1) {
      (predicted_abnormal ? c.tp : c.fn) += 1;
    } else {
      (predicted_abnormal ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

std::vector<RocPoint> roc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const ScoreGroups g = group_scores(scores, labels);
  if (g.total_pos == 0 || g.total_neg == 0) {
    throw DataError("single-class labels: ROC requires both classes");
  }
  std::vector<RocPoint> points;
  points.reserve(g.value.size() + 2);
  points.push_back({-std::numeric_limits<double>::infinity(), 0.0, 0.0});
  long tp = 0;
  long fp = 0;
  for (std::size_t i = 0; i < g.value.size(); ++i) {
    // Threshold just above value[i]: all scores <= value[i] are positive.
    tp += g.pos[i];
    fp += g.neg[i];
    const double threshold = (i + 1 < g.value.size())
                                 ? g.value[i + 1]
                                 : std::numeric_limits<double>::infinity();
    points.push_back({threshold,
                      static_cast<double>(fp) / static_cast<double>(g.total_neg),
                      static_cast<double>(tp) / static_cast<double>(g.total_pos)});
  }
  return points;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const ScoreGroups g = group_scores(scores, labels);
  if (g.total_pos == 0 || g.total_neg == 0) {
    throw DataError("single-class labels: AUC requires both classes");
  }
  // Trapezoid numerator in integers: sum over steps of
  // dFP * (TP_before + TP_after), divided once by 2*P*N. Ties advance TP
  // and FP together, which is exactly the half-credit convention.
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t twice_area = 0;
  for (std::size_t i = 0; i < g.value.size(); ++i) {
    twice_area += g.neg[i] * (2 * tp + g.pos[i]);
    tp += g.pos[i];
    fp += g.neg[i];
  }
  (void)fp;
  return static_cast<double>(twice_area) /
         (2.0 * static_cast<double>(g.total_pos) * static_cast<double>(g.total_neg));
}

std::string summary_line(const EvalSummary& summary) {
  std::ostringstream out;
  out << "auc=" << format_double(summary.auc) << " n=" << summary.n
      << " excluded=" << summary.excluded;
  return out.str();
}

void write_roc_csv(std::span<const RocPoint> points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "threshold,fpr,tpr\n";
  for (const RocPoint& p : points) {
    out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
        << format_double(p.tpr) << '\n';
  }
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace dhdp
