// svkit/fusion.hpp

// Copyright 2026  svkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "svkit/common.hpp"
#include "svkit/metrics.hpp"
#include "svkit/scores.hpp"

namespace svkit {

/// Non-negative weights on the simplex, one per sub-system.
struct FusionWeights {
  Vector weights;

  void validate() const {
    require(weights.size() >= 1, "fusion: need at least one weight");
    require(weights.minCoeff() >= 0.0, "fusion: weights must be non-negative");
    require(std::abs(weights.sum() - 1.0) < 1e-12,
            "fusion: weights must sum to 1");
  }

  static FusionWeights equal(Eigen::Index n) {
    FusionWeights w;
    w.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
    return w;
  }
};

/// Per-trial weighted sum of sub-system scores.  All systems must score
/// exactly the same trial keys.
inline ScoreSet fuse(const std::vector<ScoreSet>& systems,
                     const FusionWeights& weights) {
  require(!systems.empty(), "fusion: no systems");
  require(weights.weights.size() ==
              static_cast<Eigen::Index>(systems.size()),
          "fusion: ", systems.size(), " systems but ",
          weights.weights.size(), " weights");
  weights.validate();
  for (std::size_t s = 1; s < systems.size(); ++s) {
    TrialKey divergent;
    if (!systems[0].same_keys(systems[s], &divergent))
      throw ParamError(message(
          "fusion: system ", s, " has a different trial set; first divergent "
          "key (", divergent.first, ", ", divergent.second, ")"));
  }

  ScoreSet fused;
  for (const auto& entry : systems[0].entries()) {
    double score = 0.0;
    for (std::size_t s = 0; s < systems.size(); ++s)
      score += weights.weights[static_cast<Eigen::Index>(s)] *
               systems[s].at(entry.enroll, entry.test);
    fused.add(entry.enroll, entry.test, score);
  }
  return fused;
}

enum class FusionCriterion { kMinDcf, kEer };

namespace detail {

inline double fusion_criterion(const ScoreSet& scores,
                               const TrialLabels& labels,
                               FusionCriterion criterion,
                               const DcfParams& params) {
  return criterion == FusionCriterion::kMinDcf ? min_dcf(scores, labels, params)
                                               : eer(scores, labels);
}

// All non-negative integer compositions of `total` into `slots` parts.
inline void enumerate_compositions(
    Eigen::Index slots, Eigen::Index total,
    std::vector<Eigen::Index>& current,
    std::vector<std::vector<Eigen::Index>>& out) {
  if (slots == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (Eigen::Index k = 0; k <= total; ++k) {
    current.push_back(k);
    enumerate_compositions(slots - 1, total - k, current, out);
    current.pop_back();
  }
}

}  // namespace detail

/// Exhaustive simplex grid search minimizing the dev-set criterion.  The
/// equal-weight point is always evaluated, so the tuned result can never be
/// worse than equal weights on the same dev set.  Ties prefer the most
/// uniform weight vector, then lexicographic order.
inline FusionWeights tune_weights(const std::vector<ScoreSet>& systems,
                                  const TrialLabels& labels,
                                  double grid_step = 0.05,
                                  FusionCriterion criterion =
                                      FusionCriterion::kMinDcf,
                                  const DcfParams& params = {}) {
  require(!systems.empty(), "fusion: no systems");
  require(grid_step > 0.0 && grid_step <= 1.0,
          "fusion: grid step must lie in (0, 1]");
  detail::require_both_classes(labels);
  const auto n_systems = static_cast<Eigen::Index>(systems.size());
  if (n_systems == 1) return FusionWeights::equal(1);

  const auto resolution =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(
                                    std::lround(1.0 / grid_step)));
  std::vector<std::vector<Eigen::Index>> grid;
  std::vector<Eigen::Index> scratch;
  detail::enumerate_compositions(n_systems, resolution, scratch, grid);

  std::vector<Vector> candidates;
  candidates.reserve(grid.size() + 1);
  candidates.push_back(FusionWeights::equal(n_systems).weights);
  for (const auto& composition : grid) {
    Vector w(n_systems);
    for (Eigen::Index i = 0; i < n_systems; ++i)
      w[i] = static_cast<double>(composition[static_cast<std::size_t>(i)]) /
             static_cast<double>(resolution);
    candidates.push_back(std::move(w));
  }

  const Vector uniform = FusionWeights::equal(n_systems).weights;
  double best_value = std::numeric_limits<double>::infinity();
  double best_distance = std::numeric_limits<double>::infinity();
  Vector best = uniform;
  for (const auto& w : candidates) {
    FusionWeights fw;
    fw.weights = w;
    const double value =
        detail::fusion_criterion(fuse(systems, fw), labels, criterion, params);
    const double distance = (w - uniform).squaredNorm();
    bool better = value < best_value;
    if (value == best_value) {
      if (distance < best_distance)
        better = true;
      else if (distance == best_distance)
        better = std::lexicographical_compare(
            w.data(), w.data() + w.size(), best.data(),
            best.data() + best.size());
    }
    if (better) {
      best_value = value;
      best_distance = distance;
      best = w;
    }
  }

  FusionWeights result;
  result.weights = best;
  result.validate();
  return result;
}

}  // namespace svkit
