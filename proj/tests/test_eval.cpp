#include "dhdp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dhdp/errors.hpp"
#include "dhdp/rng.hpp"

using namespace dhdp;

namespace {

// Pairwise Mann-Whitney with half credit for ties: positives (abnormal)
// should score lower.
double mann_whitney(std::span<const double> scores, std::span<const int> labels) {
  long pairs = 0;
  double credit = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] < scores[j]) {
        credit += 1.0;
      } else if (scores[i] == scores[j]) {
        credit += 0.5;
      }
    }
  }
  return credit / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("confusion counts") {
  SUBCASE("no positives in the labels") {
    std::vector<double> scores{-1.0, -2.0, -3.0};
    std::vector<int> labels{0, 0, 0};
    const Confusion c = confusion(scores, labels, -1.5);
    CHECK(c.tp == 0);
    CHECK(c.fn == 0);
    CHECK(c.fp == 2);
    CHECK(c.tn == 1);
  }
  SUBCASE("worked two-document example") {
    std::vector<double> scores{-5.0, -1.0};
    std::vector<int> labels{1, 0};
    const Confusion c = confusion(scores, labels, -3.0);
    CHECK(c.tp == 1);
    CHECK(c.fp == 0);
    CHECK(c.tn == 1);
    CHECK(c.fn == 0);
  }
  SUBCASE("threshold below every score predicts nothing") {
    std::vector<double> scores{-5.0, -1.0};
    std::vector<int> labels{1, 0};
    const Confusion c = confusion(scores, labels, -10.0);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
  }
}

TEST_CASE("roc curve") {
  SUBCASE("perfect separation passes through (0, 1)") {
    std::vector<double> scores{-5.0, -4.0, -1.0, -0.5};
    std::vector<int> labels{1, 1, 0, 0};
    const auto points = roc(scores, labels);
    bool hits_corner = false;
    for (const RocPoint& p : points) {
      if (p.fpr == 0.0 && p.tpr == 1.0) hits_corner = true;
    }
    CHECK(hits_corner);
    CHECK(points.front().fpr == 0.0);
    CHECK(points.front().tpr == 0.0);
    CHECK(points.back().fpr == 1.0);
    CHECK(points.back().tpr == 1.0);
  }
  SUBCASE("all-tied scores give just the two endpoints") {
    std::vector<double> scores{-2.0, -2.0, -2.0};
    std::vector<int> labels{1, 0, 1};
    const auto points = roc(scores, labels);
    REQUIRE(points.size() == 2);
    CHECK(points[0].fpr == 0.0);
    CHECK(points[0].tpr == 0.0);
    CHECK(points[1].fpr == 1.0);
    CHECK(points[1].tpr == 1.0);
  }
  SUBCASE("monotone in both coordinates") {
    Rng rng(31);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 100; ++i) {
      scores.push_back(std::floor(rng.uniform() * 20.0) / 4.0);
      labels.push_back(static_cast<int>(rng.below(2)));
    }
    const auto points = roc(scores, labels);
    for (std::size_t i = 1; i < points.size(); ++i) {
      CHECK(points[i].fpr >= points[i - 1].fpr);
      CHECK(points[i].tpr >= points[i - 1].tpr);
    }
  }
  SUBCASE("single-class labels are rejected") {
    std::vector<double> scores{-1.0, -2.0};
    std::vector<int> labels{0, 0};
    CHECK_THROWS_AS(roc(scores, labels), DataError);
  }
}

TEST_CASE("auc examples") {
  SUBCASE("perfect separation scores 1") {
    std::vector<double> scores{-5.0, -4.0, -1.0, -0.5};
    std::vector<int> labels{1, 1, 0, 0};
    CHECK(auc(scores, labels) == 1.0);
  }
  SUBCASE("identical scores give one half") {
    std::vector<double> scores{-2.0, -2.0, -2.0, -2.0};
    std::vector<int> labels{1, 0, 1, 0};
    CHECK(auc(scores, labels) == 0.5);
  }
  SUBCASE("positives {0.45, 0.1} against negatives {0.4, 0.8}") {
    std::vector<double> scores{0.45, 0.1, 0.4, 0.8};
    std::vector<int> labels{1, 1, 0, 0};
    CHECK(auc(scores, labels) == 0.75);
    CHECK(mann_whitney(scores, labels) == 0.75);
  }
}

TEST_CASE("trapezoidal auc equals brute-force Mann-Whitney exactly") {
  Rng rng(2026);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(199));
    std::vector<double> scores;
    std::vector<int> labels;
    int positives = 0;
    for (int i = 0; i < n; ++i) {
      // Coarse grid of values to force plenty of ties.
      scores.push_back(std::floor(rng.uniform() * 12.0) / 3.0 - 2.0);
      labels.push_back(static_cast<int>(rng.below(2)));
      positives += labels.back();
    }
    if (positives == 0) labels[0] = 1;
    if (positives == n) labels[0] = 0;
    CHECK(auc(scores, labels) == mann_whitney(scores, labels));
  }
}

TEST_CASE("auc invariances") {
  Rng rng(5);
  SUBCASE("strictly increasing transforms leave auc unchanged") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 5 + static_cast<int>(rng.below(50));
      std::vector<double> scores, transformed;
      std::vector<int> labels;
      int positives = 0;
      for (int i = 0; i < n; ++i) {
        scores.push_back(rng.uniform() * 10.0 - 5.0);
        transformed.push_back(std::exp(0.5 * scores.back()) + 3.0);
        labels.push_back(static_cast<int>(rng.below(2)));
        positives += labels.back();
      }
      if (positives == 0) labels[0] = 1;
      if (positives == n) labels[0] = 0;
      CHECK(auc(scores, labels) == doctest::Approx(auc(transformed, labels)).epsilon(1e-12));
    }
  }
  SUBCASE("negating tie-free scores complements auc") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 5 + static_cast<int>(rng.below(50));
      std::vector<double> scores, negated;
      std::vector<int> labels;
      int positives = 0;
      for (int i = 0; i < n; ++i) {
        scores.push_back(rng.uniform());  // ties have probability zero
        negated.push_back(-scores.back());
        labels.push_back(static_cast<int>(rng.below(2)));
        positives += labels.back();
      }
      if (positives == 0) labels[0] = 1;
      if (positives == n) labels[0] = 0;
      CHECK(auc(scores, labels) + auc(negated, labels) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("summary line format") {
  EvalSummary summary;
  summary.auc = 0.75;
  summary.n = 200;
  summary.excluded = 3;
  CHECK(summary_line(summary) == "auc=0.75 n=200 excluded=3");
}
