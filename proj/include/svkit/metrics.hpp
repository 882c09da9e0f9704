// svkit/metrics.hpp

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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "svkit/common.hpp"
#include "svkit/scores.hpp"

namespace svkit {

/// Detection cost model.  The defaults are common assumptions, not values
/// fixed by an evaluation plan; override per task.
struct DcfParams {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;

  /// Bayes decision threshold for log-likelihood-ratio scores.
  double bayes_threshold() const {
    return std::log((c_fa * (1.0 - p_target)) / (c_miss * p_target));
  }

  double normalizer() const {
    return std::min(c_miss * p_target, c_fa * (1.0 - p_target));
  }

  void validate() const {
    require(p_target > 0.0 && p_target < 1.0, "p_target must lie in (0,1)");
    require(c_miss > 0.0 && c_fa > 0.0, "costs must be positive");
  }
};

/// One operating point of the decision rule "accept iff score >= threshold".
struct RocPoint {
  double threshold;
  double p_miss;  // fraction of targets with score < threshold
  double p_fa;    // fraction of nontargets with score >= threshold
};

namespace detail {

// (score, is_target) rows for every labeled trial; every labeled trial must
// be scored.
inline std::vector<std::pair<double, bool>> paired_scores(
    const ScoreSet& scores, const TrialLabels& labels) {
  std::vector<std::pair<double, bool>> pairs;
  pairs.reserve(labels.size());
  for (const auto& [key, is_target] : labels.entries())
    pairs.push_back({scores.at(key.first, key.second), is_target});
  return pairs;
}

inline void require_both_classes(const TrialLabels& labels) {
  require(labels.num_targets() > 0 && labels.num_nontargets() > 0,
          "need at least one target and one nontarget trial (got ",
          labels.num_targets(), " targets, ", labels.num_nontargets(),
          " nontargets)");
}

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace detail

/// All achievable operating points, ordered by increasing threshold: one per
/// distinct score plus the reject-all point at +inf.  p_miss is non-decreasing
/// and p_fa non-increasing along the result.
inline std::vector<RocPoint> roc_points(const ScoreSet& scores,
                                        const TrialLabels& labels) {
  detail::require_both_classes(labels);
  auto pairs = detail::paired_scores(scores, labels);
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const double n_t = static_cast<double>(labels.num_targets());
  const double n_n = static_cast<double>(labels.num_nontargets());

  std::vector<RocPoint> points;
  std::size_t targets_below = 0, nontargets_below = 0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    const double s = pairs[i].first;
    points.push_back({s, static_cast<double>(targets_below) / n_t,
                      (n_n - static_cast<double>(nontargets_below)) / n_n});
    while (i < pairs.size() && pairs[i].first == s) {
      if (pairs[i].second)
        ++targets_below;
      else
        ++nontargets_below;
      ++i;
    }
  }
  points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  return points;
}

/// Equal error rate: the miss rate at the point where the linearly
/// interpolated ROC crosses p_miss == p_fa.
inline double eer(const ScoreSet& scores, const TrialLabels& labels) {
  const auto points = roc_points(scores, labels);
  double prev_miss = points[0].p_miss;
  double prev_d = points[0].p_miss - points[0].p_fa;
  if (prev_d >= 0.0) return prev_miss;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = points[i].p_miss - points[i].p_fa;
    if (d >= 0.0) {
      const double alpha = -prev_d / (d - prev_d);
      return prev_miss + alpha * (points[i].p_miss - prev_miss);
    }
    prev_miss = points[i].p_miss;
    prev_d = d;
  }
  return 1.0;  // unreachable: the last point has d = 1
}

namespace detail {

inline double normalized_dcf(double p_miss, double p_fa,
                             const DcfParams& params) {
  return (params.c_miss * params.p_target * p_miss +
          params.c_fa * (1.0 - params.p_target) * p_fa) /
         params.normalizer();
}

}  // namespace detail

/// Minimum normalized detection cost over all thresholds.
inline double min_dcf(const ScoreSet& scores, const TrialLabels& labels,
                      const DcfParams& params = {}) {
  params.validate();
  const auto points = roc_points(scores, labels);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points)
    best = std::min(best, detail::normalized_dcf(p.p_miss, p.p_fa, params));
  return best;
}

/// Normalized detection cost at a fixed threshold; defaults to the Bayes
/// threshold for LLR scores.
inline double act_dcf(const ScoreSet& scores, const TrialLabels& labels,
                      const DcfParams& params = {},
                      std::optional<double> threshold = std::nullopt) {
  params.validate();
  detail::require_both_classes(labels);
  const double theta = threshold.value_or(params.bayes_threshold());
  std::size_t misses = 0, false_alarms = 0;
  for (const auto& [key, is_target] : labels.entries()) {
    const double s = scores.at(key.first, key.second);
    if (is_target && s < theta) ++misses;
    if (!is_target && s >= theta) ++false_alarms;
  }
  const double p_miss =
      static_cast<double>(misses) / static_cast<double>(labels.num_targets());
  const double p_fa = static_cast<double>(false_alarms) /
                      static_cast<double>(labels.num_nontargets());
  return detail::normalized_dcf(p_miss, p_fa, params);
}

/// Cost of log-likelihood ratio, in bits.  Scores are read as natural-log
/// likelihood ratios and clamped to [-700, 700] before exponentiation.
inline double cllr(const ScoreSet& scores, const TrialLabels& labels) {
  detail::require_both_classes(labels);
  double sum_target = 0.0, sum_nontarget = 0.0;
  for (const auto& [key, is_target] : labels.entries()) {
    const double s =
        std::clamp(scores.at(key.first, key.second), -700.0, 700.0);
    if (is_target)
      sum_target += detail::softplus(-s);
    else
      sum_nontarget += detail::softplus(s);
  }
  const double mean_target =
      sum_target / static_cast<double>(labels.num_targets());
  const double mean_nontarget =
      sum_nontarget / static_cast<double>(labels.num_nontargets());
  return (mean_target + mean_nontarget) / (2.0 * std::numbers::ln2);
}

/// Mean, over enrollment models with at least one target, of the precision
/// among that model's R highest-scored trials, R being its target count.
/// Descending-score ties are broken by ascending test id.
inline double avg_rprec(const ScoreSet& scores, const TrialLabels& labels) {
  struct Row {
    double score;
    std::string test;
    bool target;
  };
  std::map<std::string, std::vector<Row>> by_model;
  for (const auto& [key, is_target] : labels.entries())
    by_model[key.first].push_back(
        {scores.at(key.first, key.second), key.second, is_target});

  double sum = 0.0;
  std::size_t qualifying = 0;
  for (auto& [model, rows] : by_model) {
    std::size_t num_targets = 0;
    for (const auto& r : rows) num_targets += r.target ? 1 : 0;
    if (num_targets == 0) continue;
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.test < b.test;
    });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < num_targets; ++i) hits += rows[i].target ? 1 : 0;
    sum += static_cast<double>(hits) / static_cast<double>(num_targets);
    ++qualifying;
  }
  require(qualifying > 0, "no enrollment model has a target trial");
  return sum / static_cast<double>(qualifying);
}

/// The five Table-style summary columns plus class counts.
struct MetricReport {
  double eer = 0.0;
  double min_dcf = 0.0;
  double act_dcf = 0.0;
  double avg_rprec = 0.0;
  double cllr = 0.0;
  std::size_t num_targets = 0;
  std::size_t num_nontargets = 0;
};

inline MetricReport evaluate_scores(const ScoreSet& scores,
                                    const TrialLabels& labels,
                                    const DcfParams& params = {},
                                    std::optional<double> threshold =
                                        std::nullopt) {
  MetricReport report;
  report.eer = eer(scores, labels);
  report.min_dcf = min_dcf(scores, labels, params);
  report.act_dcf = act_dcf(scores, labels, params, threshold);
  report.avg_rprec = avg_rprec(scores, labels);
  report.cllr = cllr(scores, labels);
  report.num_targets = labels.num_targets();
  report.num_nontargets = labels.num_nontargets();
  return report;
}

}  // namespace svkit
