// svkit/synthetic.hpp

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

#include <cstdint>
#include <string>
#include <vector>

#include "svkit/backend.hpp"
#include "svkit/common.hpp"
#include "svkit/scores.hpp"

namespace svkit {

/// Isotropic between/within generative world: speaker offsets
/// y ~ N(0, B_scale I), utterances x = y + e with e ~ N(0, W_scale I).
struct SyntheticWorldSpec {
  Eigen::Index n_speakers = 200;
  Eigen::Index utts_per_speaker = 10;
  Eigen::Index dim = 50;
  double b_scale = 1.0;
  double w_scale = 0.5;
  std::uint64_t seed = 0;
  // 0 selects every same-speaker pair as a target plus an equal number of
  // cross-speaker nontargets.
  Eigen::Index n_trials = 0;
  Eigen::Index cohort_speakers = 0;
  Eigen::Index cohort_utts_per_speaker = 1;

  void validate() const {
    require(n_speakers >= 2, "synthetic world: need at least two speakers");
    require(utts_per_speaker >= 1 && dim >= 1,
            "synthetic world: sizes must be positive");
    require(b_scale > 0.0 && w_scale >= 0.0,
            "synthetic world: scales must be positive (W may be zero)");
    require(n_trials >= 0 && cohort_speakers >= 0,
            "synthetic world: counts must be non-negative");
  }
};

struct SyntheticWorld {
  EmbeddingSet train;
  EmbeddingSet eval;
  EmbeddingSet cohort;   // empty unless cohort_speakers > 0
  TrialList trials;      // labeled, over eval utterance ids
};

namespace detail {

inline EmbeddingSet sample_population(Rng rng, const SyntheticWorldSpec& spec,
                                      Eigen::Index n_speakers,
                                      Eigen::Index utts_per_speaker,
                                      const std::string& prefix) {
  EmbeddingSet set;
  set.vectors.resize(n_speakers * utts_per_speaker, spec.dim);
  const double b_sd = std::sqrt(spec.b_scale);
  const double w_sd = std::sqrt(spec.w_scale);
  Eigen::Index row = 0;
  for (Eigen::Index s = 0; s < n_speakers; ++s) {
    const std::string speaker = prefix + std::to_string(s);
    const Vector offset = b_sd * rng.gaussian_vector(spec.dim);
    for (Eigen::Index u = 0; u < utts_per_speaker; ++u) {
      set.vectors.row(row++) =
          (offset + w_sd * rng.gaussian_vector(spec.dim)).transpose();
      set.speaker_label.push_back(speaker);
      set.utterance_id.push_back(speaker + "-u" + std::to_string(u));
    }
  }
  return set;
}

}  // namespace detail

/// Deterministic per seed: the same spec always produces bit-identical
/// embeddings and trials.
inline SyntheticWorld synth_world(const SyntheticWorldSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);

  SyntheticWorld world;
  world.train = detail::sample_population(
      root.fork(1), spec, spec.n_speakers, spec.utts_per_speaker, "trn");
  world.eval = detail::sample_population(
      root.fork(2), spec, spec.n_speakers, spec.utts_per_speaker, "spk");
  if (spec.cohort_speakers > 0)
    world.cohort = detail::sample_population(root.fork(3), spec,
                                             spec.cohort_speakers,
                                             spec.cohort_utts_per_speaker,
                                             "coh");

  // Balanced labeled trials over the eval utterances.
  Rng trial_rng = root.fork(4);
  const Eigen::Index s_count = spec.n_speakers;
  const Eigen::Index u_count = spec.utts_per_speaker;

  std::vector<std::pair<Eigen::Index, Eigen::Index>> target_pairs;
  for (Eigen::Index s = 0; s < s_count; ++s)
    for (Eigen::Index a = 0; a < u_count; ++a)
      for (Eigen::Index b = a + 1; b < u_count; ++b)
        target_pairs.push_back({s * u_count + a, s * u_count + b});

  Eigen::Index per_class;
  if (spec.n_trials == 0) {
    per_class = static_cast<Eigen::Index>(target_pairs.size());
  } else {
    per_class = spec.n_trials / 2;
    require(per_class >= 1, "synthetic world: need at least two trials");
    require(per_class <= static_cast<Eigen::Index>(target_pairs.size()),
            "synthetic world: not enough same-speaker pairs for ",
            spec.n_trials, " trials (have ", 2 * target_pairs.size(), ")");
  }

  // Seeded partial shuffle, then a deterministic prefix.
  for (std::size_t i = target_pairs.size(); i > 1; --i)
    std::swap(target_pairs[i - 1],
              target_pairs[static_cast<std::size_t>(trial_rng.uniform_int(i))]);
  target_pairs.resize(static_cast<std::size_t>(per_class));

  std::set<std::pair<Eigen::Index, Eigen::Index>> used;
  for (const auto& p : target_pairs) used.insert(p);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> nontarget_pairs;
  while (static_cast<Eigen::Index>(nontarget_pairs.size()) < per_class) {
    const auto sa = static_cast<Eigen::Index>(
        trial_rng.uniform_int(static_cast<std::uint64_t>(s_count)));
    const auto sb = static_cast<Eigen::Index>(
        trial_rng.uniform_int(static_cast<std::uint64_t>(s_count)));
    if (sa == sb) continue;
    const auto ua = static_cast<Eigen::Index>(
        trial_rng.uniform_int(static_cast<std::uint64_t>(u_count)));
    const auto ub = static_cast<Eigen::Index>(
        trial_rng.uniform_int(static_cast<std::uint64_t>(u_count)));
    const std::pair<Eigen::Index, Eigen::Index> pair{sa * u_count + ua,
                                                     sb * u_count + ub};
    if (!used.insert(pair).second) continue;
    nontarget_pairs.push_back(pair);
  }

  for (const auto& [a, b] : target_pairs)
    world.trials.add(world.eval.utterance_id[static_cast<std::size_t>(a)],
                     world.eval.utterance_id[static_cast<std::size_t>(b)],
                     true);
  for (const auto& [a, b] : nontarget_pairs)
    world.trials.add(world.eval.utterance_id[static_cast<std::size_t>(a)],
                     world.eval.utterance_id[static_cast<std::size_t>(b)],
                     false);
  return world;
}

}  // namespace svkit
