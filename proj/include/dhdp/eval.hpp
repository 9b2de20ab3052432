#pragma once

#include <span>
#include <string>
#include <vector>

namespace dhdp {

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct Confusion {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

// Positive class = abnormal (label 1); prediction positive iff
// score < threshold.
Confusion confusion(std::span<const double> scores, std::span<const int> labels,
                    double threshold);

// Thresholds at every distinct score plus the +-inf sentinels; tied scores
// flip together, so the sweep is monotone in both coordinates.
std::vector<RocPoint> roc(std::span<const double> scores, std::span<const int> labels);

// Trapezoidal area under roc(); accumulated in integers so it equals the
// Mann-Whitney statistic (ties at half credit) exactly.
double auc(std::span<const double> scores, std::span<const int> labels);

struct EvalSummary {
  double auc = 0.0;
  long n = 0;         // scored documents
  long excluded = 0;  // undefined scores dropped before evaluation
};

std::string summary_line(const EvalSummary& summary);

void write_roc_csv(std::span<const RocPoint> points, const std::string& path);

}  // namespace dhdp
