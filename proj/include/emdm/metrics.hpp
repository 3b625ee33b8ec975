#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "emdm/errors.hpp"
#include "emdm/weights.hpp"

namespace emdm {

inline double em_mean(const std::vector<double>& scores) {
  if (scores.empty()) fail(ErrorCode::EMPTY_DENOMINATOR, "mean of zero scores");
  double s = 0.0;
  for (double v : scores) s += v;
  return s / static_cast<double>(scores.size());
}

inline double em_mean(const SampleScores& scores) {
  if (scores.empty()) fail(ErrorCode::EMPTY_DENOMINATOR, "mean of zero scores");
  double s = 0.0;
  for (const auto& [_, v] : scores) s += v;
  return s / static_cast<double>(scores.size());
}

// Weighted mean over categories: each sample contributes its score times its
// category weight, and the denominator is the weighted sample count. With all
// weights at 1.0 this collapses to the plain mean.
inline double emdm_score(const TransitionMatrix& matrix, const WeightVector& weights,
                         const SampleScores& scores) {
  if (matrix.scheme != weights.scheme)
    fail(ErrorCode::SCHEME_MISMATCH, std::string("matrix is ") + to_string(matrix.scheme) +
                                         " but weights are " + to_string(weights.scheme));
  double num = 0.0;
  double den = 0.0;
  for (const auto& [key, ids] : matrix.members) {
    const WeightEntry* e = weights.find(key);
    if (!e) fail(ErrorCode::SCHEME_MISMATCH, "no weight for populated category '" + key + "'");
    double cell_sum = 0.0;
    for (const auto& id : ids) {
      auto it = scores.find(id);
      if (it == scores.end())
        fail(ErrorCode::MISSING_SCORES, "no score for sample '" + id + "'");
      cell_sum += it->second;
    }
    num += e->weight * cell_sum;
    den += e->weight * static_cast<double>(ids.size());
  }
  if (den <= 0.0) fail(ErrorCode::EMPTY_DENOMINATOR, "weighted sample count is zero");
  return num / den;
}

// Percent gain of a model over the baseline, on whichever aggregate both were
// scored with. Undefined when the model score is not positive.
inline double relative_increase(double model_score, double baseline_score) {
  if (model_score <= 0.0)
    fail(ErrorCode::NONPOSITIVE_SCORE,
         "relative increase needs a positive model score, got " + std::to_string(model_score));
  return 100.0 * (1.0 - baseline_score / model_score);
}

// Mean gap between adjacent scores once sorted. Telescopes to
// (max - min) / (n - 1); the sum is kept explicit so the identity stays a
// checkable property rather than an assumption.
inline double inter_model_difference(std::vector<double> scores) {
  if (scores.size() < 2)
    fail(ErrorCode::TOO_FEW_MODELS, "spread needs at least two scores, got " +
                                        std::to_string(scores.size()));
  std::sort(scores.begin(), scores.end());
  double s = 0.0;
  for (size_t i = 0; i + 1 < scores.size(); ++i) s += scores[i + 1] - scores[i];
  return s / static_cast<double>(scores.size() - 1);
}

inline double score_range(const std::vector<double>& scores) {
  if (scores.size() < 2)
    fail(ErrorCode::TOO_FEW_MODELS, "range needs at least two scores, got " +
                                        std::to_string(scores.size()));
  auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
  return *mx - *mn;
}

}  // namespace emdm
