// tests/support/metric_oracles.hpp

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

// Brute-force metric implementations used only as test oracles.  They share
// the metric definitions with the library but take a different computational
// route: misses and false alarms are recounted from scratch with a full pass
// at every candidate threshold, and rankings are formed by repeated
// max-extraction instead of sorting.  Keep this file independent of
// svkit/metrics.hpp internals.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "svkit/scores.hpp"

namespace oracle {

struct Trial {
  std::string enroll;
  std::string test;
  double score;
  bool target;
};

inline std::vector<Trial> join(const svkit::ScoreSet& scores,
                               const svkit::TrialLabels& labels) {
  std::vector<Trial> trials;
  for (const auto& [key, is_target] : labels.entries())
    trials.push_back(
        {key.first, key.second, scores.at(key.first, key.second), is_target});
  return trials;
}

// Error rates of the rule "accept iff score >= threshold", by full recount.
inline std::pair<double, double> rates_at(const std::vector<Trial>& trials,
                                          double threshold) {
  std::size_t n_t = 0, n_n = 0, misses = 0, false_alarms = 0;
  for (const auto& t : trials) {
    if (t.target) {
      ++n_t;
      if (t.score < threshold) ++misses;
    } else {
      ++n_n;
      if (t.score >= threshold) ++false_alarms;
    }
  }
  return {static_cast<double>(misses) / static_cast<double>(n_t),
          static_cast<double>(false_alarms) / static_cast<double>(n_n)};
}

inline std::vector<double> candidate_thresholds(
    const std::vector<Trial>& trials) {
  std::set<double> distinct;
  for (const auto& t : trials) distinct.insert(t.score);
  std::vector<double> thresholds(distinct.begin(), distinct.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  return thresholds;
}

inline double eer(const std::vector<Trial>& trials) {
  const auto thresholds = candidate_thresholds(trials);
  double prev_miss = 0.0, prev_d = 0.0;
  bool have_prev = false;
  for (double theta : thresholds) {
    const auto [miss, fa] = rates_at(trials, theta);
    const double d = miss - fa;
    if (d >= 0.0) {
      if (!have_prev || d == prev_d) return miss;
      const double alpha = -prev_d / (d - prev_d);
      return prev_miss + alpha * (miss - prev_miss);
    }
    prev_miss = miss;
    prev_d = d;
    have_prev = true;
  }
  return 1.0;
}

inline double normalized_dcf(double miss, double fa, double p_target,
                             double c_miss, double c_fa) {
  return (c_miss * p_target * miss + c_fa * (1.0 - p_target) * fa) /
         std::min(c_miss * p_target, c_fa * (1.0 - p_target));
}

inline double min_dcf(const std::vector<Trial>& trials, double p_target = 0.01,
                      double c_miss = 1.0, double c_fa = 1.0) {
  double best = std::numeric_limits<double>::infinity();
  for (double theta : candidate_thresholds(trials)) {
    const auto [miss, fa] = rates_at(trials, theta);
    best = std::min(best, normalized_dcf(miss, fa, p_target, c_miss, c_fa));
  }
  return best;
}

inline double act_dcf(const std::vector<Trial>& trials, double threshold,
                      double p_target = 0.01, double c_miss = 1.0,
                      double c_fa = 1.0) {
  const auto [miss, fa] = rates_at(trials, threshold);
  return normalized_dcf(miss, fa, p_target, c_miss, c_fa);
}

inline double cllr(const std::vector<Trial>& trials) {
  double sum_t = 0.0, sum_n = 0.0;
  std::size_t n_t = 0, n_n = 0;
  for (const auto& t : trials) {
    const double s = std::clamp(t.score, -700.0, 700.0);
    if (t.target) {
      sum_t += std::log1p(std::exp(-s));
      ++n_t;
    } else {
      sum_n += std::log1p(std::exp(s));
      ++n_n;
    }
  }
  return (sum_t / static_cast<double>(n_t) +
          sum_n / static_cast<double>(n_n)) /
         (2.0 * std::numbers::ln2);
}

// Per-model R-precision by repeated max-extraction (score descending, ties by
// ascending test id), averaged over models with at least one target.
inline double avg_rprec(const std::vector<Trial>& trials) {
  std::map<std::string, std::vector<Trial>> by_model;
  for (const auto& t : trials) by_model[t.enroll].push_back(t);

  double sum = 0.0;
  std::size_t qualifying = 0;
  for (auto& [model, rows] : by_model) {
    std::size_t num_targets = 0;
    for (const auto& r : rows) num_targets += r.target ? 1 : 0;
    if (num_targets == 0) continue;
    std::vector<Trial> remaining = rows;
    std::size_t hits = 0;
    for (std::size_t rank = 0; rank < num_targets; ++rank) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < remaining.size(); ++i) {
        const bool better =
            remaining[i].score > remaining[best].score ||
            (remaining[i].score == remaining[best].score &&
             remaining[i].test < remaining[best].test);
        if (better) best = i;
      }
      hits += remaining[best].target ? 1 : 0;
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    sum += static_cast<double>(hits) / static_cast<double>(num_targets);
    ++qualifying;
  }
  return sum / static_cast<double>(qualifying);
}

}  // namespace oracle
