// svkit/experiment.hpp

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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "svkit/backend.hpp"
#include "svkit/common.hpp"
#include "svkit/fusion.hpp"
#include "svkit/io.hpp"
#include "svkit/metrics.hpp"
#include "svkit/scorenorm.hpp"
#include "svkit/synthetic.hpp"

namespace svkit {

/// Fusion presets: equal-weight fusion; per-system clustering normalization
/// followed by tuned-weight fusion; tuned-weight fusion of raw scores.
enum class ExperimentPreset { kSystem1, kSystem2, kSystem3 };

inline ExperimentPreset preset_from_string(const std::string& name) {
  if (name == "system1") return ExperimentPreset::kSystem1;
  if (name == "system2") return ExperimentPreset::kSystem2;
  if (name == "system3") return ExperimentPreset::kSystem3;
  throw ParamError(message("unknown preset '", name, "'"));
}

struct ExperimentResult {
  MetricReport report;
  std::vector<std::string> artifacts;  // paths relative to the output dir
};

namespace detail {

// Failures are re-raised with the stage name so an aborted run reports where.
template <typename F>
auto run_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error(message("stage '", stage, "': ", e.what()));
  }
}

}  // namespace detail

/// Runs a declared experiment: build or load sub-system scores, apply the
/// preset's normalization/fusion, evaluate against the labeled trials, and
/// write every intermediate artifact plus a manifest into out_dir.
inline ExperimentResult run_experiment(const Config& config,
                                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto preset = preset_from_string(config.get_or("preset", "system1"));
  const std::string mode = config.get_or("mode", "synth");
  const std::uint64_t seed = config.as_u64_or("seed", 0);

  ExperimentResult result;
  auto artifact_path = [&](const std::string& name) {
    result.artifacts.push_back(name);
    return (fs::path(out_dir) / name).string();
  };

  DcfParams dcf_params;
  dcf_params.p_target = config.as_double_or("ptar", 0.01);
  dcf_params.c_miss = config.as_double_or("cmiss", 1.0);
  dcf_params.c_fa = config.as_double_or("cfa", 1.0);

  std::vector<ScoreSet> system_scores;
  TrialLabels labels;
  // Populated in synth mode; required there for system2 normalization.
  EmbeddingSet eval_set, cohort_set;
  std::vector<BackendModel> backends;

  if (mode == "synth") {
    SyntheticWorldSpec spec;
    spec.n_speakers = config.as_int_or("world.n_speakers", 200);
    spec.utts_per_speaker = config.as_int_or("world.utts_per_speaker", 10);
    spec.dim = config.as_int_or("world.dim", 50);
    spec.b_scale = config.as_double_or("world.b_scale", 1.0);
    spec.w_scale = config.as_double_or("world.w_scale", 0.5);
    spec.n_trials = config.as_int_or("world.n_trials", 0);
    spec.cohort_speakers = config.as_int_or("world.cohort_speakers", 0);
    spec.seed = seed;

    const SyntheticWorld world =
        detail::run_stage("synth", [&] { return synth_world(spec); });
    labels = TrialLabels::from_trials(world.trials);
    eval_set = world.eval;
    cohort_set = world.cohort;

    detail::run_stage("write-world", [&] {
      write_embedding_archive(artifact_path("train.vvec"),
                              world.train.utterance_id, world.train.vectors);
      write_embedding_archive(artifact_path("eval.vvec"),
                              world.eval.utterance_id, world.eval.vectors);
      if (world.cohort.size() > 0)
        write_embedding_archive(artifact_path("cohort.vvec"),
                                world.cohort.utterance_id,
                                world.cohort.vectors);
      write_trials(artifact_path("trials.txt"), world.trials);
      return 0;
    });

    // Sub-systems: one backend per configured LDA dimension.
    std::vector<std::string> lda_dims =
        config.has("system.lda_dims") ? config.as_list("system.lda_dims")
                                      : std::vector<std::string>{"40"};
    const int plda_iters =
        static_cast<int>(config.as_int_or("plda_iters", 10));
    for (std::size_t s = 0; s < lda_dims.size(); ++s) {
      const auto lda_dim = static_cast<Eigen::Index>(std::stol(lda_dims[s]));
      const std::string tag = "system" + std::to_string(s + 1);
      detail::run_stage(tag, [&] {
        const BackendTransform transform =
            fit_transform(world.train, lda_dim);
        const EmbeddingSet processed_train =
            apply_transform(transform, world.train);
        PldaTrainOptions plda_options;
        plda_options.iters = plda_iters;
        BackendModel backend{transform,
                             plda_train(processed_train, plda_options)};
        write_backend_model(artifact_path(tag + "-backend.vbkd"), backend);

        const EmbeddingSet processed_eval =
            apply_transform(transform, world.eval);
        std::map<std::string, Eigen::Index> row_of;
        for (Eigen::Index i = 0; i < processed_eval.size(); ++i)
          row_of[processed_eval.utterance_id[static_cast<std::size_t>(i)]] = i;
        const PldaScorer scorer(backend.plda);
        ScoreSet scores;
        for (const auto& e : world.trials.entries())
          scores.add(e.enroll, e.test,
                     scorer.score(
                         processed_eval.vectors.row(row_of.at(e.enroll))
                             .transpose(),
                         processed_eval.vectors.row(row_of.at(e.test))
                             .transpose()));
        write_scores(artifact_path(tag + "-scores.txt"), scores);
        system_scores.push_back(std::move(scores));
        backends.push_back(std::move(backend));
        return 0;
      });
    }
  } else if (mode == "scores") {
    const std::vector<std::string> files = config.as_list("scores");
    require(!files.empty(), "experiment: no score files configured");
    for (const auto& f : files)
      system_scores.push_back(
          detail::run_stage("read-scores", [&] { return read_scores(f); }));
    const TrialList trials = detail::run_stage(
        "read-trials", [&] { return read_trials(config.get("trials")); });
    labels = TrialLabels::from_trials(trials);
    require(preset != ExperimentPreset::kSystem2,
            "experiment: preset system2 needs embeddings and a backend; use "
            "mode = synth");
  } else {
    throw ParamError(message("experiment: unknown mode '", mode, "'"));
  }

  // Preset-specific normalization of each sub-system.
  if (preset == ExperimentPreset::kSystem2) {
    require(cohort_set.size() > 0,
            "experiment: system2 needs world.cohort_speakers > 0");
    UcsnOptions ucsn;
    ucsn.clusters = config.as_int_or("norm.K", 4);
    ucsn.keep_fraction = config.as_double_or("norm.keep", 0.3);
    ucsn.components = config.as_int_or("norm.M", 2);
    ucsn.seed = config.as_u64_or("norm.seed", seed + 1);
    const NormScope scope =
        config.get_or("norm.scope", "per-model") == "global"
            ? NormScope::kGlobal
            : NormScope::kPerModel;
    for (std::size_t s = 0; s < system_scores.size(); ++s) {
      const std::string tag = "system" + std::to_string(s + 1);
      system_scores[s] = detail::run_stage(tag + "-normalize", [&] {
        const BackendModel& backend = backends[s];
        const EmbeddingSet processed_eval =
            apply_transform(backend.transform, eval_set);
        const EmbeddingSet processed_cohort =
            apply_transform(backend.transform, cohort_set);
        const PldaScorer scorer(backend.plda);
        auto normalized = normalize_scores(
            system_scores[s], scorer, processed_eval, processed_eval,
            processed_cohort, NormMethod::kUcsn, scope, ucsn);
        write_scores(artifact_path(tag + "-normalized.txt"),
                     normalized.scores);
        return normalized.scores;
      });
    }
  }

  // Fusion.
  const double grid_step = config.as_double_or("grid_step", 0.05);
  const FusionCriterion criterion =
      config.get_or("criterion", "mindcf") == "eer" ? FusionCriterion::kEer
                                                    : FusionCriterion::kMinDcf;
  const FusionWeights weights = detail::run_stage("fuse", [&] {
    if (preset == ExperimentPreset::kSystem1)
      return FusionWeights::equal(
          static_cast<Eigen::Index>(system_scores.size()));
    return tune_weights(system_scores, labels, grid_step, criterion,
                        dcf_params);
  });
  const ScoreSet fused = fuse(system_scores, weights);
  write_scores(artifact_path("fused-scores.txt"), fused);

  // Evaluation.
  result.report = detail::run_stage(
      "evaluate", [&] { return evaluate_scores(fused, labels, dcf_params); });

  // Manifest: resolved config, its hash, seeds, weights, artifacts, metrics.
  nlohmann::json manifest;
  manifest["config"] = config.entries();
  {
    std::ostringstream hash_hex;
    hash_hex << std::hex << config.hash();
    manifest["config_hash"] = hash_hex.str();
  }
  manifest["seed"] = seed;
  manifest["preset"] = config.get_or("preset", "system1");
  manifest["fusion_weights"] = std::vector<double>(
      weights.weights.data(), weights.weights.data() + weights.weights.size());
  manifest["artifacts"] = result.artifacts;
  manifest["metrics"] = {
      {"eer", result.report.eer},       {"min_dcf", result.report.min_dcf},
      {"act_dcf", result.report.act_dcf}, {"avg_rprec", result.report.avg_rprec},
      {"cllr", result.report.cllr},
      {"num_targets", result.report.num_targets},
      {"num_nontargets", result.report.num_nontargets}};
  {
    std::ofstream os(fs::path(out_dir) / "manifest.json");
    os << manifest.dump(2) << '\n';
    result.artifacts.push_back("manifest.json");
  }
  return result;
}

}  // namespace svkit
