// tools/svkit.cpp

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

// Command-line front end.  One subcommand per pipeline stage; exit code 0 on
// success, 1 with a stage-tagged message on stderr otherwise.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "svkit/augment.hpp"
#include "svkit/backend.hpp"
#include "svkit/experiment.hpp"
#include "svkit/fusion.hpp"
#include "svkit/io.hpp"
#include "svkit/ivector.hpp"
#include "svkit/metrics.hpp"
#include "svkit/mixtures.hpp"
#include "svkit/pooling.hpp"
#include "svkit/scorenorm.hpp"
#include "svkit/synthetic.hpp"

namespace {

namespace fs = std::filesystem;

// "id path" rows, in file order.
std::vector<std::pair<std::string, std::string>> read_wav_list(
    const std::string& path) {
  std::ifstream is(path);
  if (!is) throw svkit::Error("cannot open wav list '" + path + "'");
  std::vector<std::pair<std::string, std::string>> items;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream parts(line);
    std::string id, file;
    if (!(parts >> id >> file))
      throw svkit::FormatError(svkit::message("wav list '", path,
                                              "': malformed line ",
                                              line_number));
    items.emplace_back(std::move(id), std::move(file));
  }
  return items;
}

svkit::FeaturePipeline pipeline_from_config(const svkit::Config& config) {
  svkit::FeaturePipeline p;
  p.mfcc.win_s = config.as_double_or("frame.window_s", 0.025);
  p.mfcc.hop_s = config.as_double_or("frame.hop_s", 0.010);
  p.mfcc.n_mels = static_cast<int>(config.as_int_or("mfcc.n_mels", 30));
  p.mfcc.fmin = config.as_double_or("mfcc.fmin", 20.0);
  p.mfcc.fmax = config.as_double_or("mfcc.fmax", 7600.0);
  p.mfcc.n_ceps = static_cast<int>(config.as_int_or("mfcc.n_ceps", 30));
  p.mfcc.include_c0 = config.as_bool_or("mfcc.include_c0", true);
  p.mfcc.preemphasis = config.as_double_or("mfcc.preemphasis", 0.97);
  const std::string window = config.get_or("mfcc.window", "hamming");
  if (window == "hamming")
    p.mfcc.window = svkit::WindowKind::kHamming;
  else if (window == "hann")
    p.mfcc.window = svkit::WindowKind::kHann;
  else if (window == "rectangular")
    p.mfcc.window = svkit::WindowKind::kRectangular;
  else
    throw svkit::ParamError("unknown window kind '" + window + "'");
  p.delta_order = static_cast<int>(config.as_int_or("deltas.order", 2));
  p.delta_context = static_cast<int>(config.as_int_or("deltas.context", 2));
  p.cmn_window_s = config.as_double_or("cmn.window_s", 3.0);
  p.vad = config.as_bool_or("vad.enabled", true);
  p.vad_threshold_offset = config.as_double_or("vad.threshold_offset", -1.3);
  return p;
}

std::map<std::string, std::string> optional_map(const std::string& path) {
  std::map<std::string, std::string> mapping;
  if (!path.empty()) mapping = svkit::read_two_column_map(path);
  return mapping;
}

svkit::EmbeddingSet load_embedding_set(const std::string& path,
                                       const std::string& utt2spk_path) {
  const auto archive = svkit::read_embedding_archive(path);
  if (utt2spk_path.empty()) return svkit::to_embedding_set(archive);
  const auto mapping = optional_map(utt2spk_path);
  return svkit::to_embedding_set(archive, &mapping);
}

void print_report(const svkit::MetricReport& report) {
  std::cout << std::setprecision(4) << std::fixed;
  std::cout << "EER       " << report.eer << '\n'
            << "Min DCF   " << report.min_dcf << '\n'
            << "Act DCF   " << report.act_dcf << '\n'
            << "avgRPrec  " << report.avg_rprec << '\n'
            << "Cllr      " << report.cllr << '\n'
            << "targets " << report.num_targets << "  nontargets "
            << report.num_nontargets << '\n';
}

nlohmann::json report_json(const svkit::MetricReport& report) {
  return {{"eer", report.eer},
          {"min_dcf", report.min_dcf},
          {"act_dcf", report.act_dcf},
          {"avg_rprec", report.avg_rprec},
          {"cllr", report.cllr},
          {"num_targets", report.num_targets},
          {"num_nontargets", report.num_nontargets}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speaker verification backend toolkit"};
  app.require_subcommand(1);

  // ---- extract ----
  auto* extract = app.add_subcommand(
      "extract", "MFCC/delta/CMN/VAD features from a wav list");
  std::string extract_config, extract_wav_list, extract_out;
  extract->add_option("--config", extract_config,
                      "feature configuration file");
  extract->add_option("--wav-list", extract_wav_list, "lines of: id path")
      ->required();
  extract->add_option("--out", extract_out, "output feature archive")
      ->required();

  // ---- augment ----
  auto* augment = app.add_subcommand(
      "augment", "reverb/music/noise augmentation of a wav list");
  std::string augment_mode, augment_wav_list, augment_out_dir;
  std::string augment_rir_list, augment_noise_list, augment_out_list;
  double augment_snr_lo = 5.0, augment_snr_hi = 15.0, augment_interval = 1.0;
  std::uint64_t augment_seed = 0;
  augment->add_option("--mode", augment_mode, "reverb|music|noise")
      ->required();
  augment->add_option("--wav-list", augment_wav_list, "lines of: id path")
      ->required();
  augment->add_option("--out-dir", augment_out_dir, "output directory")
      ->required();
  augment->add_option("--rir-list", augment_rir_list,
                      "RIR wav list (reverb mode)");
  augment->add_option("--noise-list", augment_noise_list,
                      "noise wav list (music/noise modes)");
  augment->add_option("--out-list", augment_out_list,
                      "write an 'id path' list of the outputs");
  augment->add_option("--snr-lo", augment_snr_lo, "lower SNR bound (dB)");
  augment->add_option("--snr-hi", augment_snr_hi, "upper SNR bound (dB)");
  augment->add_option("--interval", augment_interval,
                      "noise onset interval (s)");
  augment->add_option("--seed", augment_seed, "random seed");

  // ---- train-ubm ----
  auto* train_ubm =
      app.add_subcommand("train-ubm", "GMM-UBM from a feature archive");
  std::string ubm_feats, ubm_cov = "full", ubm_out;
  long ubm_k = 64;
  long ubm_iters = 20;
  std::uint64_t ubm_seed = 0;
  train_ubm->add_option("--feats", ubm_feats, "feature archive")->required();
  train_ubm->add_option("--num-gauss", ubm_k, "mixture components")
      ->required();
  train_ubm->add_option("--cov", ubm_cov, "full|diag");
  train_ubm->add_option("--iters", ubm_iters, "EM iterations");
  train_ubm->add_option("--seed", ubm_seed, "random seed");
  train_ubm->add_option("--out", ubm_out, "output model file")->required();

  // ---- accumulate-stats ----
  auto* acc_stats = app.add_subcommand(
      "accumulate-stats", "Baum-Welch statistics against a UBM");
  std::string stats_feats, stats_ubm, stats_out;
  acc_stats->add_option("--feats", stats_feats, "feature archive")
      ->required();
  acc_stats->add_option("--ubm", stats_ubm, "UBM model file")->required();
  acc_stats->add_option("--out", stats_out, "output statistics archive")
      ->required();

  // ---- train-ivector ----
  auto* train_iv = app.add_subcommand(
      "train-ivector", "total-variability subspace from statistics");
  std::string tv_stats, tv_ubm, tv_out;
  long tv_rank = 600;
  long tv_iters = 5;
  std::uint64_t tv_seed = 0;
  train_iv->add_option("--stats", tv_stats, "statistics archive")->required();
  train_iv->add_option("--ubm", tv_ubm, "UBM model file")->required();
  train_iv->add_option("--rank", tv_rank, "i-vector dimension")->required();
  train_iv->add_option("--iters", tv_iters, "EM iterations");
  train_iv->add_option("--seed", tv_seed, "random seed");
  train_iv->add_option("--out", tv_out, "output model file")->required();

  // ---- extract-ivector ----
  auto* extract_iv =
      app.add_subcommand("extract-ivector", "i-vectors from statistics");
  std::string xiv_stats, xiv_model, xiv_out;
  extract_iv->add_option("--stats", xiv_stats, "statistics archive")
      ->required();
  extract_iv->add_option("--model", xiv_model, "total-variability model")
      ->required();
  extract_iv->add_option("--out", xiv_out, "output embedding archive")
      ->required();

  // ---- pool ----
  auto* pool = app.add_subcommand(
      "pool", "network-free pooled embeddings straight from features");
  std::string pool_mode = "stats", pool_in, pool_out;
  long pool_attn_dim = 16;
  std::uint64_t pool_seed = 0;
  pool->add_option("--mode", pool_mode,
                   "stats|high-order|attention:learned|attention:split|"
                   "attention:parameter-free|attention:gated");
  pool->add_option("--in", pool_in, "feature archive")->required();
  pool->add_option("--out", pool_out, "output embedding archive")->required();
  pool->add_option("--attn-dim", pool_attn_dim,
                   "attention bottleneck dimension");
  pool->add_option("--seed", pool_seed,
                   "seed for the randomly drawn attention parameters");

  // ---- train-backend ----
  auto* train_be = app.add_subcommand(
      "train-backend", "centering + LDA + length-norm + PLDA");
  std::string be_embeddings, be_utt2spk, be_durations, be_out;
  long be_lda_dim = 200;
  long be_plda_iters = 10;
  long be_max_recordings = 0;
  train_be->add_option("--embeddings", be_embeddings, "embedding archive")
      ->required();
  train_be->add_option("--lda-dim", be_lda_dim, "LDA output dimension");
  train_be->add_option("--plda-iters", be_plda_iters, "PLDA EM iterations");
  train_be->add_option("--utt2spk", be_utt2spk,
                       "speaker map (default: id prefix before '-')");
  train_be->add_option("--durations", be_durations,
                       "'id seconds' map for the longest-K pre-filter");
  train_be->add_option("--max-recordings", be_max_recordings,
                       "keep only the K longest recordings (0 = all)");
  train_be->add_option("--out", be_out, "output backend model")->required();

  // ---- score ----
  auto* score = app.add_subcommand("score", "PLDA trial scoring");
  std::string score_model, score_enroll, score_test, score_trials, score_out;
  std::string score_enroll_utt2spk;
  score->add_option("--model", score_model, "backend model")->required();
  score->add_option("--enroll", score_enroll, "enrollment embedding archive")
      ->required();
  score->add_option("--test", score_test, "test embedding archive")
      ->required();
  score->add_option("--trials", score_trials, "trial list")->required();
  score->add_option("--enroll-utt2spk", score_enroll_utt2spk,
                    "multi-session map: enrollment utterances to model ids");
  score->add_option("--out", score_out, "output score file")->required();

  // ---- normalize ----
  auto* normalize =
      app.add_subcommand("normalize", "cohort-based score normalization");
  std::string norm_scores, norm_model, norm_enroll, norm_test, norm_cohort;
  std::string norm_method = "ucsn", norm_scope = "per-model", norm_out;
  std::string norm_provenance;
  long norm_k = 4, norm_m = 2;
  double norm_keep = 0.3;
  std::uint64_t norm_seed = 0;
  bool norm_symmetric = false;
  normalize->add_option("--scores", norm_scores, "raw score file")
      ->required();
  normalize->add_option("--model", norm_model, "backend model")->required();
  normalize->add_option("--enroll", norm_enroll, "enrollment archive")
      ->required();
  normalize->add_option("--test", norm_test,
                        "test archive (required for s-norm / --symmetric)");
  normalize->add_option("--cohort", norm_cohort, "cohort embedding archive")
      ->required();
  normalize->add_option("--method", norm_method, "z|s|ucsn");
  normalize->add_option("--K", norm_k, "k-means clusters");
  normalize->add_option("--keep", norm_keep, "retained-score fraction");
  normalize->add_option("--M", norm_m, "GMM components");
  normalize->add_option("--seed", norm_seed, "clustering seed");
  normalize->add_option("--scope", norm_scope, "per-model|global");
  normalize->add_flag("--symmetric", norm_symmetric,
                      "apply UCSN on both sides (s-norm style)");
  normalize->add_option("--out", norm_out, "output score file")->required();
  normalize->add_option("--provenance", norm_provenance,
                        "JSON sidecar with clustering details");

  // ---- fuse ----
  auto* fuse_cmd = app.add_subcommand("fuse", "score-level fusion");
  std::vector<std::string> fuse_scores;
  std::string fuse_weights = "equal", fuse_dev_trials, fuse_out;
  std::vector<std::string> fuse_dev_scores;
  std::string fuse_criterion = "mindcf";
  double fuse_grid_step = 0.05;
  double fuse_ptar = 0.01, fuse_cmiss = 1.0, fuse_cfa = 1.0;
  fuse_cmd->add_option("--scores", fuse_scores, "sub-system score files")
      ->required()
      ->expected(-1);
  fuse_cmd->add_option("--weights", fuse_weights, "equal|tuned");
  fuse_cmd->add_option("--dev-scores", fuse_dev_scores,
                       "dev score files (tuned mode; defaults to --scores)")
      ->expected(-1);
  fuse_cmd->add_option("--dev-trials", fuse_dev_trials,
                       "labeled dev trials (tuned mode)");
  fuse_cmd->add_option("--criterion", fuse_criterion, "mindcf|eer");
  fuse_cmd->add_option("--grid-step", fuse_grid_step, "simplex grid step");
  fuse_cmd->add_option("--ptar", fuse_ptar, "target prior");
  fuse_cmd->add_option("--cmiss", fuse_cmiss, "miss cost");
  fuse_cmd->add_option("--cfa", fuse_cfa, "false-alarm cost");
  fuse_cmd->add_option("--out", fuse_out, "output score file")->required();

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand(
      "evaluate", "EER / DCF / avgRPrec / Cllr report");
  std::string eval_scores, eval_trials, eval_json;
  double eval_ptar = 0.01, eval_cmiss = 1.0, eval_cfa = 1.0;
  double eval_threshold = std::numeric_limits<double>::quiet_NaN();
  evaluate->add_option("--scores", eval_scores, "score file")->required();
  evaluate->add_option("--trials", eval_trials, "labeled trial list")
      ->required();
  evaluate->add_option("--ptar", eval_ptar, "target prior");
  evaluate->add_option("--cmiss", eval_cmiss, "miss cost");
  evaluate->add_option("--cfa", eval_cfa, "false-alarm cost");
  evaluate->add_option("--threshold", eval_threshold,
                       "actual-DCF threshold (default: Bayes for LLRs)");
  evaluate->add_option("--json", eval_json, "also write a JSON report");

  // ---- synth-world ----
  auto* synth = app.add_subcommand(
      "synth-world", "synthetic embeddings + labeled trials");
  long sw_speakers = 200, sw_utts = 10, sw_dim = 50, sw_trials = 0;
  long sw_cohort = 0;
  double sw_b = 1.0, sw_w = 0.5;
  std::uint64_t sw_seed = 0;
  std::string sw_prefix;
  synth->add_option("--n-speakers", sw_speakers, "speakers per split");
  synth->add_option("--utts-per-speaker", sw_utts, "utterances per speaker");
  synth->add_option("--dim", sw_dim, "embedding dimension");
  synth->add_option("--b-scale", sw_b, "between-speaker variance");
  synth->add_option("--w-scale", sw_w, "within-speaker variance");
  synth->add_option("--n-trials", sw_trials, "trial count (0 = all targets)");
  synth->add_option("--cohort-speakers", sw_cohort, "cohort speakers");
  synth->add_option("--seed", sw_seed, "random seed");
  synth->add_option("--out-prefix", sw_prefix, "output path prefix")
      ->required();

  // ---- run ----
  auto* run = app.add_subcommand("run", "run a declared experiment");
  std::string run_config, run_out_dir;
  run->add_option("--config", run_config, "experiment configuration")
      ->required();
  run->add_option("--out-dir", run_out_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) {
      const svkit::Config config =
          extract_config.empty() ? svkit::Config::from_string("")
                                 : svkit::Config::load(extract_config);
      const svkit::FeaturePipeline pipeline = pipeline_from_config(config);
      std::vector<std::pair<std::string, svkit::FeatureMatrix>> features;
      for (const auto& [id, path] : read_wav_list(extract_wav_list)) {
        const svkit::AudioSignal signal = svkit::read_wav(path);
        features.emplace_back(id, svkit::extract_features(signal, pipeline));
      }
      svkit::write_feature_archive(extract_out, features);
      std::cout << "wrote " << features.size() << " feature matrices to "
                << extract_out << '\n';
    } else if (*augment) {
      fs::create_directories(augment_out_dir);
      svkit::Rng rng(augment_seed);
      std::vector<svkit::AudioSignal> pool;
      if (augment_mode == "reverb") {
        if (augment_rir_list.empty())
          throw svkit::ParamError("reverb mode needs --rir-list");
        for (const auto& [id, path] : read_wav_list(augment_rir_list))
          pool.push_back(svkit::read_wav(path));
      } else if (augment_mode == "music" || augment_mode == "noise") {
        if (augment_noise_list.empty())
          throw svkit::ParamError(augment_mode + " mode needs --noise-list");
        for (const auto& [id, path] : read_wav_list(augment_noise_list))
          pool.push_back(svkit::read_wav(path));
      } else {
        throw svkit::ParamError("unknown augment mode '" + augment_mode +
                                "'");
      }
      std::ofstream out_list;
      if (!augment_out_list.empty()) out_list.open(augment_out_list);
      for (const auto& [id, path] : read_wav_list(augment_wav_list)) {
        const svkit::AudioSignal speech = svkit::read_wav(path);
        svkit::AudioSignal augmented;
        if (augment_mode == "reverb") {
          const auto& rir = pool[static_cast<std::size_t>(
              rng.uniform_int(pool.size()))];
          // No additive noise in reverb mode.
          augmented = svkit::reverberate(speech, rir);
        } else if (augment_mode == "music") {
          const auto& noise = pool[static_cast<std::size_t>(
              rng.uniform_int(pool.size()))];
          const double snr = rng.uniform(augment_snr_lo, augment_snr_hi);
          augmented = svkit::mix_at_snr(speech, noise, snr);
        } else {
          const double snr = rng.uniform(augment_snr_lo, augment_snr_hi);
          augmented = svkit::add_interval_noise(
              speech, pool, snr, augment_interval,
              rng.fork(svkit::fnv1a64(id)).seed());
        }
        for (auto& v : augmented.samples) v = std::clamp(v, -1.0, 1.0);
        const std::string out_path =
            (fs::path(augment_out_dir) / (id + "-" + augment_mode + ".wav"))
                .string();
        svkit::write_wav(augmented, out_path);
        if (out_list.is_open())
          out_list << id << '-' << augment_mode << ' ' << out_path << '\n';
      }
    } else if (*train_ubm) {
      const auto features = svkit::read_feature_archive(ubm_feats);
      Eigen::Index total_frames = 0, dim = 0;
      for (const auto& [id, f] : features) {
        total_frames += f.num_frames();
        dim = f.dim();
      }
      svkit::Matrix data(total_frames, dim);
      Eigen::Index row = 0;
      for (const auto& [id, f] : features) {
        data.middleRows(row, f.num_frames()) = f.frames;
        row += f.num_frames();
      }
      svkit::GmmEmOptions options;
      options.max_iter = static_cast<int>(ubm_iters);
      const svkit::GaussianMixture ubm = svkit::train_gmm(
          data, ubm_k,
          ubm_cov == "diag" ? svkit::CovKind::kDiagonal
                            : svkit::CovKind::kFull,
          ubm_seed, options);
      svkit::write_gmm(ubm_out, ubm);
      std::cout << "trained " << ubm_k << "-component " << ubm_cov
                << " UBM on " << total_frames << " frames\n";
    } else if (*acc_stats) {
      const auto ubm = svkit::read_gmm(stats_ubm);
      const auto features = svkit::read_feature_archive(stats_feats);
      std::vector<svkit::BaumWelchStats> stats;
      for (const auto& [id, f] : features)
        stats.push_back(svkit::accumulate_stats(f, ubm, id));
      svkit::write_stats_archive(stats_out, stats);
      std::cout << "accumulated statistics for " << stats.size()
                << " utterances\n";
    } else if (*train_iv) {
      const auto ubm = svkit::read_gmm(tv_ubm);
      const auto stats = svkit::read_stats_archive(tv_stats);
      svkit::TvTrainOptions options;
      options.iters = static_cast<int>(tv_iters);
      const auto model = svkit::train_total_variability(
          stats, ubm, tv_rank, tv_seed, options);
      svkit::write_tv_model(tv_out, model);
      std::cout << "trained rank-" << tv_rank
                << " total-variability model on " << stats.size()
                << " utterances\n";
    } else if (*extract_iv) {
      const auto model = svkit::read_tv_model(xiv_model);
      const auto stats = svkit::read_stats_archive(xiv_stats);
      std::vector<std::string> ids;
      svkit::Matrix vectors(static_cast<Eigen::Index>(stats.size()),
                            model.rank());
      for (std::size_t i = 0; i < stats.size(); ++i) {
        const svkit::IVector iv = svkit::extract_ivector(stats[i], model);
        ids.push_back(iv.utterance_id);
        vectors.row(static_cast<Eigen::Index>(i)) = iv.w.transpose();
      }
      svkit::write_embedding_archive(xiv_out, ids, vectors);
      std::cout << "extracted " << ids.size() << " i-vectors\n";
    } else if (*pool) {
      const auto mode = svkit::pooling_mode_from_string(pool_mode);
      const auto features = svkit::read_feature_archive(pool_in);
      if (features.empty()) throw svkit::ParamError("empty feature archive");
      std::vector<std::string> ids;
      svkit::Matrix vectors;
      svkit::AttentionParams params;
      bool params_ready = false;
      for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& [id, f] = features[i];
        if (!params_ready && svkit::pooling_needs_params(mode)) {
          params = svkit::random_attention_params(mode, f.dim(),
                                                  pool_attn_dim, pool_seed);
          params_ready = true;
        }
        const svkit::Vector pooled = svkit::pool_forward(
            f.frames, mode,
            svkit::pooling_needs_params(mode) ? &params : nullptr);
        if (vectors.rows() == 0)
          vectors.resize(static_cast<Eigen::Index>(features.size()),
                         pooled.size());
        vectors.row(static_cast<Eigen::Index>(i)) = pooled.transpose();
        ids.push_back(id);
      }
      svkit::write_embedding_archive(pool_out, ids, vectors);
      std::cout << "pooled " << ids.size() << " segments with mode "
                << pool_mode << '\n';
    } else if (*train_be) {
      svkit::EmbeddingSet train =
          load_embedding_set(be_embeddings, be_utt2spk);
      if (be_max_recordings > 0) {
        if (be_durations.empty())
          throw svkit::ParamError("--max-recordings needs --durations");
        const auto durations_map = optional_map(be_durations);
        std::vector<double> durations;
        for (const auto& id : train.utterance_id) {
          const auto it = durations_map.find(id);
          if (it == durations_map.end())
            throw svkit::Error("no duration for utterance '" + id + "'");
          durations.push_back(std::stod(it->second));
        }
        train = svkit::select_longest(
            train, durations, static_cast<std::size_t>(be_max_recordings));
      }
      const svkit::BackendTransform transform =
          svkit::fit_transform(train, be_lda_dim);
      const svkit::EmbeddingSet processed =
          svkit::apply_transform(transform, train);
      svkit::PldaTrainOptions options;
      options.iters = static_cast<int>(be_plda_iters);
      const svkit::BackendModel model{transform,
                                      svkit::plda_train(processed, options)};
      svkit::write_backend_model(be_out, model);
      std::cout << "trained backend on " << train.size() << " embeddings ("
                << "lda " << be_lda_dim << ")\n";
    } else if (*score) {
      const auto model = svkit::read_backend_model(score_model);
      const auto enroll_archive = svkit::read_embedding_archive(score_enroll);
      const auto test_archive = svkit::read_embedding_archive(score_test);
      const auto trials = svkit::read_trials(score_trials);
      const svkit::PldaScorer scorer(model.plda);

      // Multi-session enrollment: average processed embeddings per model id.
      std::map<std::string, svkit::Vector> enroll_vectors;
      if (!score_enroll_utt2spk.empty()) {
        const auto mapping = svkit::read_two_column_map(score_enroll_utt2spk);
        std::map<std::string, std::pair<svkit::Vector, double>> sums;
        for (std::size_t i = 0; i < enroll_archive.ids.size(); ++i) {
          const auto it = mapping.find(enroll_archive.ids[i]);
          if (it == mapping.end())
            throw svkit::Error("no model id for enrollment utterance '" +
                               enroll_archive.ids[i] + "'");
          const svkit::Vector processed = svkit::apply_transform(
              model.transform,
              enroll_archive.vectors.row(static_cast<Eigen::Index>(i))
                  .transpose());
          auto [entry, inserted] = sums.try_emplace(
              it->second, std::make_pair(processed, 1.0));
          if (!inserted) {
            entry->second.first += processed;
            entry->second.second += 1.0;
          }
        }
        for (auto& [id, sum] : sums)
          enroll_vectors[id] = sum.first / sum.second;
      } else {
        for (std::size_t i = 0; i < enroll_archive.ids.size(); ++i)
          enroll_vectors[enroll_archive.ids[i]] = svkit::apply_transform(
              model.transform,
              enroll_archive.vectors.row(static_cast<Eigen::Index>(i))
                  .transpose());
      }
      std::map<std::string, svkit::Vector> test_vectors;
      for (std::size_t i = 0; i < test_archive.ids.size(); ++i)
        test_vectors[test_archive.ids[i]] = svkit::apply_transform(
            model.transform,
            test_archive.vectors.row(static_cast<Eigen::Index>(i))
                .transpose());

      svkit::ScoreSet scores;
      for (const auto& t : trials.entries()) {
        const auto e = enroll_vectors.find(t.enroll);
        if (e == enroll_vectors.end())
          throw svkit::Error("no enrollment embedding for '" + t.enroll +
                             "'");
        const auto s = test_vectors.find(t.test);
        if (s == test_vectors.end())
          throw svkit::Error("no test embedding for '" + t.test + "'");
        scores.add(t.enroll, t.test, scorer.score(e->second, s->second));
      }
      svkit::write_scores(score_out, scores);
      std::cout << "scored " << scores.size() << " trials\n";
    } else if (*normalize) {
      const auto model = svkit::read_backend_model(norm_model);
      const auto raw = svkit::read_scores(norm_scores);
      const auto method = svkit::norm_method_from_string(norm_method);
      const bool needs_test =
          method == svkit::NormMethod::kSNorm || norm_symmetric;
      if (needs_test && norm_test.empty())
        throw svkit::ParamError("--method s / --symmetric need --test");

      auto process = [&](const std::string& path) {
        const auto archive = svkit::read_embedding_archive(path);
        svkit::EmbeddingSet set = svkit::to_embedding_set(archive);
        return svkit::apply_transform(model.transform, set);
      };
      const svkit::EmbeddingSet enroll = process(norm_enroll);
      const svkit::EmbeddingSet test =
          needs_test ? process(norm_test) : svkit::EmbeddingSet{};
      const svkit::EmbeddingSet cohort = process(norm_cohort);

      svkit::UcsnOptions ucsn;
      ucsn.clusters = norm_k;
      ucsn.keep_fraction = norm_keep;
      ucsn.components = norm_m;
      ucsn.seed = norm_seed;
      const svkit::PldaScorer scorer(model.plda);
      const auto result = svkit::normalize_scores(
          raw, scorer, enroll, test, cohort, method,
          norm_scope == "global" ? svkit::NormScope::kGlobal
                                 : svkit::NormScope::kPerModel,
          ucsn, norm_symmetric);
      svkit::write_scores(norm_out, result.scores);

      if (!norm_provenance.empty()) {
        nlohmann::json sidecar;
        auto side_json = [](const std::map<std::string, svkit::NormParams>&
                                params) {
          nlohmann::json out;
          for (const auto& [id, p] : params) {
            out[id] = {{"mu_star", p.mu_star},
                       {"sigma_star", p.sigma_star},
                       {"pooled_count", p.provenance.pooled_count},
                       {"cluster_means", p.provenance.cluster_means},
                       {"cluster_sizes", p.provenance.cluster_sizes},
                       {"retained_clusters", p.provenance.retained_clusters},
                       {"retained_count", p.provenance.retained_count},
                       {"chosen_component", p.provenance.chosen_component},
                       {"fallback_zscore", p.provenance.fallback_zscore}};
          }
          return out;
        };
        sidecar["method"] = norm_method;
        sidecar["scope"] = norm_scope;
        sidecar["K"] = norm_k;
        sidecar["keep_fraction"] = norm_keep;
        sidecar["M"] = norm_m;
        sidecar["seed"] = norm_seed;
        sidecar["enroll"] = side_json(result.enroll_params);
        if (needs_test) sidecar["test"] = side_json(result.test_params);
        std::ofstream os(norm_provenance);
        os << sidecar.dump(2) << '\n';
      }
      std::cout << "normalized " << result.scores.size() << " scores ("
                << norm_method << ", " << norm_scope << ")\n";
    } else if (*fuse_cmd) {
      std::vector<svkit::ScoreSet> systems;
      for (const auto& f : fuse_scores)
        systems.push_back(svkit::read_scores(f));
      svkit::FusionWeights weights;
      if (fuse_weights == "equal") {
        weights = svkit::FusionWeights::equal(
            static_cast<Eigen::Index>(systems.size()));
      } else if (fuse_weights == "tuned") {
        if (fuse_dev_trials.empty())
          throw svkit::ParamError("tuned fusion needs --dev-trials");
        std::vector<svkit::ScoreSet> dev;
        if (fuse_dev_scores.empty())
          dev = systems;
        else
          for (const auto& f : fuse_dev_scores)
            dev.push_back(svkit::read_scores(f));
        const auto labels = svkit::TrialLabels::from_trials(
            svkit::read_trials(fuse_dev_trials));
        svkit::DcfParams params;
        params.p_target = fuse_ptar;
        params.c_miss = fuse_cmiss;
        params.c_fa = fuse_cfa;
        weights = svkit::tune_weights(
            dev, labels, fuse_grid_step,
            fuse_criterion == "eer" ? svkit::FusionCriterion::kEer
                                    : svkit::FusionCriterion::kMinDcf,
            params);
      } else {
        throw svkit::ParamError("unknown --weights '" + fuse_weights + "'");
      }
      svkit::write_scores(fuse_out, svkit::fuse(systems, weights));
      std::cout << "fused " << systems.size() << " systems with weights";
      for (Eigen::Index i = 0; i < weights.weights.size(); ++i)
        std::cout << ' ' << weights.weights[i];
      std::cout << '\n';
    } else if (*evaluate) {
      const auto scores = svkit::read_scores(eval_scores);
      const auto labels =
          svkit::TrialLabels::from_trials(svkit::read_trials(eval_trials));
      svkit::DcfParams params;
      params.p_target = eval_ptar;
      params.c_miss = eval_cmiss;
      params.c_fa = eval_cfa;
      std::optional<double> threshold;
      if (!std::isnan(eval_threshold)) threshold = eval_threshold;
      const auto report =
          svkit::evaluate_scores(scores, labels, params, threshold);
      print_report(report);
      if (!eval_json.empty()) {
        std::ofstream os(eval_json);
        os << report_json(report).dump(2) << '\n';
      }
    } else if (*synth) {
      svkit::SyntheticWorldSpec spec;
      spec.n_speakers = sw_speakers;
      spec.utts_per_speaker = sw_utts;
      spec.dim = sw_dim;
      spec.b_scale = sw_b;
      spec.w_scale = sw_w;
      spec.seed = sw_seed;
      spec.n_trials = sw_trials;
      spec.cohort_speakers = sw_cohort;
      const auto world = svkit::synth_world(spec);
      svkit::write_embedding_archive(sw_prefix + "-train.vvec",
                                     world.train.utterance_id,
                                     world.train.vectors);
      svkit::write_embedding_archive(sw_prefix + "-eval.vvec",
                                     world.eval.utterance_id,
                                     world.eval.vectors);
      if (world.cohort.size() > 0)
        svkit::write_embedding_archive(sw_prefix + "-cohort.vvec",
                                       world.cohort.utterance_id,
                                       world.cohort.vectors);
      svkit::write_trials(sw_prefix + "-trials.txt", world.trials);
      std::cout << "wrote world '" << sw_prefix << "' with "
                << world.trials.size() << " trials\n";
    } else if (*run) {
      const auto config = svkit::Config::load(run_config);
      const auto result = svkit::run_experiment(config, run_out_dir);
      print_report(result.report);
      std::cout << "artifacts in " << run_out_dir << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
