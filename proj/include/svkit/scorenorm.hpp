// svkit/scorenorm.hpp

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
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "svkit/backend.hpp"
#include "svkit/common.hpp"
#include "svkit/mixtures.hpp"
#include "svkit/scores.hpp"

namespace svkit {

/// Cohort-derived normalization parameters with a record of how they were
/// chosen.
struct NormParams {
  double mu_star = 0.0;
  double sigma_star = 1.0;  // floored at kSigmaFloor

  struct Provenance {
    std::size_t pooled_count = 0;
    std::vector<double> cluster_means;       // descending
    std::vector<std::size_t> cluster_sizes;  // aligned with cluster_means
    std::size_t retained_clusters = 0;
    std::size_t retained_count = 0;
    int chosen_component = -1;  // -1 when the z-norm fallback was used
    bool fallback_zscore = false;
  } provenance;
};

constexpr double kSigmaFloor = 1e-8;

/// PLDA scores of one (processed) embedding against every cohort member, in
/// cohort row order.
inline Vector cohort_scores(const PldaScorer& scorer, const Vector& target,
                            const EmbeddingSet& cohort) {
  require(cohort.size() > 0, "cohort scores: empty cohort");
  Vector scores(cohort.size());
  for (Eigen::Index i = 0; i < cohort.size(); ++i)
    scores[i] = scorer.score(target, cohort.vectors.row(i).transpose());
  return scores;
}

inline Vector cohort_scores(const PldaModel& model, const Vector& target,
                            const EmbeddingSet& cohort) {
  return cohort_scores(PldaScorer(model), target, cohort);
}

/// Conventional z-norm parameters: mean and population standard deviation.
inline NormParams zscore_params(const Vector& scores) {
  require(scores.size() >= 2, "zscore: need at least two scores");
  NormParams params;
  params.provenance.pooled_count = static_cast<std::size_t>(scores.size());
  params.mu_star = scores.mean();
  const double variance =
      (scores.array() - params.mu_star).square().mean();
  params.sigma_star = std::max(std::sqrt(variance), kSigmaFloor);
  return params;
}

struct UcsnOptions {
  Eigen::Index clusters = 4;       // K
  double keep_fraction = 0.3;      // retained-score fraction target
  Eigen::Index components = 2;     // M
  std::uint64_t seed = 0;
};

/// Unsupervised clustering score normalization: k-means over the pooled
/// cohort scores, discard of low-mean clusters, a GMM fit on what remains,
/// and the parameters of the highest-mean component.
inline NormParams ucsn_params(const Vector& pooled,
                              const UcsnOptions& options = {}) {
  const auto n = pooled.size();
  require(options.clusters >= 1 && options.components >= 1,
          "ucsn: K and M must be positive");
  require(options.keep_fraction > 0.0 && options.keep_fraction <= 1.0,
          "ucsn: keep_fraction must lie in (0, 1]");
  require(n >= std::max<Eigen::Index>(
                   {options.clusters, options.components, 10}),
          "ucsn: need at least max(K, M, 10) pooled scores, got ", n);

  NormParams params;
  params.provenance.pooled_count = static_cast<std::size_t>(n);

  Matrix column(n, 1);
  column.col(0) = pooled;
  const Rng seeds(options.seed);
  const KmeansResult km =
      kmeans(column, options.clusters, seeds.fork(1).seed());

  // Rank clusters by mean, descending.
  std::vector<std::vector<double>> members(
      static_cast<std::size_t>(options.clusters));
  for (Eigen::Index i = 0; i < n; ++i)
    members[static_cast<std::size_t>(km.assignment[static_cast<std::size_t>(i)])]
        .push_back(pooled[i]);
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  auto cluster_mean = [&](std::size_t c) {
    const auto& m = members[c];
    return m.empty()
               ? -std::numeric_limits<double>::infinity()
               : std::accumulate(m.begin(), m.end(), 0.0) /
                     static_cast<double>(m.size());
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cluster_mean(a) > cluster_mean(b);
  });

  // Retain top-mean clusters until the keep fraction is met; the top cluster
  // is always retained.
  std::vector<double> retained;
  const double needed = options.keep_fraction * static_cast<double>(n);
  for (std::size_t c : order) {
    if (!retained.empty() && static_cast<double>(retained.size()) >= needed)
      break;
    retained.insert(retained.end(), members[c].begin(), members[c].end());
    params.provenance.retained_clusters += 1;
  }
  for (std::size_t c : order) {
    params.provenance.cluster_means.push_back(cluster_mean(c));
    params.provenance.cluster_sizes.push_back(members[c].size());
  }
  params.provenance.retained_count = retained.size();

  Vector retained_vec(static_cast<Eigen::Index>(retained.size()));
  for (std::size_t i = 0; i < retained.size(); ++i)
    retained_vec[static_cast<Eigen::Index>(i)] = retained[i];

  // Degenerate retained sets (too few scores for the GMM, or no spread)
  // fall back to plain statistics of the retained scores.
  const double retained_mean = retained_vec.mean();
  const double retained_sd = std::sqrt(
      (retained_vec.array() - retained_mean).square().mean());
  if (static_cast<Eigen::Index>(retained.size()) <
          std::max<Eigen::Index>(options.components, 2) ||
      retained_sd < kSigmaFloor) {
    params.mu_star = retained_mean;
    params.sigma_star = std::max(retained_sd, kSigmaFloor);
    params.provenance.fallback_zscore = true;
    return params;
  }

  Matrix retained_col(retained_vec.size(), 1);
  retained_col.col(0) = retained_vec;
  GmmEmOptions gmm_options;
  gmm_options.max_iter = 100;
  gmm_options.tol = 1e-12;
  const GaussianMixture gmm =
      train_gmm(retained_col, options.components, CovKind::kDiagonal,
                seeds.fork(2).seed(), gmm_options);

  Eigen::Index best = 0;
  gmm.means.col(0).maxCoeff(&best);
  params.mu_star = gmm.means(best, 0);
  params.sigma_star = std::max(
      std::sqrt(gmm.diag_covs[static_cast<std::size_t>(best)][0]),
      kSigmaFloor);
  params.provenance.chosen_component = static_cast<int>(best);
  return params;
}

/// Applies s' = (s - mu*) / sigma* per enroll model; in symmetric (s-norm)
/// mode the enroll-side and test-side normalized scores are averaged.
inline ScoreSet apply_norm(
    const ScoreSet& scores,
    const std::map<std::string, NormParams>& params_by_enroll,
    bool symmetric = false,
    const std::map<std::string, NormParams>* params_by_test = nullptr) {
  if (symmetric)
    require(params_by_test != nullptr,
            "apply_norm: symmetric mode needs test-side parameters");
  ScoreSet out;
  for (const auto& entry : scores.entries()) {
    const auto it = params_by_enroll.find(entry.enroll);
    if (it == params_by_enroll.end())
      throw Error(message("apply_norm: no parameters for enroll id '",
                          entry.enroll, "'"));
    const NormParams& e = it->second;
    double normalized = (entry.score - e.mu_star) / e.sigma_star;
    if (symmetric) {
      const auto jt = params_by_test->find(entry.test);
      if (jt == params_by_test->end())
        throw Error(message("apply_norm: no parameters for test id '",
                            entry.test, "'"));
      const NormParams& t = jt->second;
      normalized =
          0.5 * (normalized + (entry.score - t.mu_star) / t.sigma_star);
    }
    out.add(entry.enroll, entry.test, normalized);
  }
  return out;
}

enum class NormMethod { kZNorm, kSNorm, kUcsn };
enum class NormScope { kPerModel, kGlobal };

inline NormMethod norm_method_from_string(const std::string& name) {
  if (name == "z") return NormMethod::kZNorm;
  if (name == "s") return NormMethod::kSNorm;
  if (name == "ucsn") return NormMethod::kUcsn;
  throw ParamError(message("unknown normalization method '", name, "'"));
}

struct NormalizationResult {
  ScoreSet scores;
  std::map<std::string, NormParams> enroll_params;
  std::map<std::string, NormParams> test_params;
};

/// End-to-end normalization of a score set against a cohort.  Embeddings must
/// already be backend-processed; enroll (and, for s-norm, test) sets must
/// cover every id appearing in `raw`.  Per-model scope estimates parameters
/// from each model's own cohort scores; global scope pools all of them first.
inline NormalizationResult normalize_scores(
    const ScoreSet& raw, const PldaScorer& scorer,
    const EmbeddingSet& enroll, const EmbeddingSet& test,
    const EmbeddingSet& cohort, NormMethod method,
    NormScope scope = NormScope::kPerModel, const UcsnOptions& ucsn = {},
    bool ucsn_symmetric = false) {
  require(cohort.size() > 0, "normalize: empty cohort");
  const bool symmetric = method == NormMethod::kSNorm || ucsn_symmetric;

  auto params_for = [&](const Vector& pooled) {
    return method == NormMethod::kUcsn ? ucsn_params(pooled, ucsn)
                                       : zscore_params(pooled);
  };

  auto side_params = [&](const EmbeddingSet& side,
                         const std::vector<std::string>& wanted_ids) {
    std::map<std::string, Vector> per_model;
    std::map<std::string, Eigen::Index> row_of;
    for (Eigen::Index i = 0; i < side.size(); ++i)
      row_of[side.utterance_id[static_cast<std::size_t>(i)]] = i;
    for (const auto& id : wanted_ids) {
      const auto it = row_of.find(id);
      if (it == row_of.end())
        throw Error(message("normalize: no embedding for id '", id, "'"));
      per_model.emplace(
          id, cohort_scores(scorer, side.vectors.row(it->second).transpose(),
                            cohort));
    }
    std::map<std::string, NormParams> params;
    if (scope == NormScope::kGlobal) {
      Vector pooled(static_cast<Eigen::Index>(per_model.size()) *
                    cohort.size());
      Eigen::Index at = 0;
      for (const auto& [id, scores] : per_model) {
        pooled.segment(at, scores.size()) = scores;
        at += scores.size();
      }
      const NormParams shared = params_for(pooled);
      for (const auto& [id, scores] : per_model) params.emplace(id, shared);
    } else {
      for (const auto& [id, scores] : per_model)
        params.emplace(id, params_for(scores));
    }
    return params;
  };

  std::vector<std::string> enroll_ids, test_ids;
  {
    std::map<std::string, bool> seen_e, seen_t;
    for (const auto& entry : raw.entries()) {
      if (seen_e.emplace(entry.enroll, true).second)
        enroll_ids.push_back(entry.enroll);
      if (seen_t.emplace(entry.test, true).second)
        test_ids.push_back(entry.test);
    }
  }

  NormalizationResult result;
  result.enroll_params = side_params(enroll, enroll_ids);
  if (symmetric) result.test_params = side_params(test, test_ids);
  result.scores = apply_norm(raw, result.enroll_params, symmetric,
                             symmetric ? &result.test_params : nullptr);
  return result;
}

}  // namespace svkit
