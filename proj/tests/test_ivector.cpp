// tests/test_ivector.cpp

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

#include "svkit/ivector.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using svkit::BaumWelchStats;
using svkit::CovKind;
using svkit::FeatureMatrix;
using svkit::GaussianMixture;
using svkit::Matrix;
using svkit::Rng;
using svkit::TotalVariabilityModel;
using svkit::Vector;

namespace {

GaussianMixture make_diag_ubm(Rng& rng, Eigen::Index k, Eigen::Index d,
                              double var = 1.0, bool zero_means = false) {
  GaussianMixture ubm;
  ubm.cov_kind = CovKind::kDiagonal;
  ubm.weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
  ubm.means = zero_means ? Matrix::Zero(k, d)
                         : Matrix(3.0 * rng.gaussian_matrix(k, d));
  for (Eigen::Index c = 0; c < k; ++c)
    ubm.diag_covs.push_back(Vector::Constant(d, var));
  ubm.validate();
  return ubm;
}

// Synthetic statistics drawn from the generative model: per utterance a
// latent w*, soft counts from a random split of total frames, and centered
// first-order stats N_c T*_c w* plus sqrt(N_c) Sigma^(1/2) noise.
struct SyntheticTvWorld {
  GaussianMixture ubm;
  Matrix t_true;  // (K*D) x R
  std::vector<BaumWelchStats> stats;
  std::vector<Vector> latents;
};

SyntheticTvWorld make_tv_world(Rng& rng, Eigen::Index k, Eigen::Index d,
                               Eigen::Index r, int num_utterances,
                               double noise_var = 1.0) {
  SyntheticTvWorld world;
  world.ubm = make_diag_ubm(rng, k, d, noise_var);
  world.t_true = rng.gaussian_matrix(k * d, r);
  for (int u = 0; u < num_utterances; ++u) {
    Vector w = rng.gaussian_vector(r);
    Vector counts(k);
    for (Eigen::Index c = 0; c < k; ++c)
      counts[c] = 20.0 + 60.0 * rng.uniform();
    BaumWelchStats s;
    s.utterance_id = "utt" + std::to_string(u);
    s.zero_order = counts;
    s.first_order.resize(k, d);
    for (Eigen::Index c = 0; c < k; ++c) {
      const Vector signal =
          counts[c] * (world.t_true.block(c * d, 0, d, r) * w);
      const Vector noise = std::sqrt(counts[c] * noise_var) *
                           rng.gaussian_vector(d);
      s.first_order.row(c) =
          (signal + noise +
           counts[c] * world.ubm.means.row(c).transpose())
              .transpose();
    }
    world.stats.push_back(std::move(s));
    world.latents.push_back(std::move(w));
  }
  return world;
}

// Largest principal angle (degrees) between the column spans of two
// equally-sized matrices.
double max_principal_angle_deg(const Matrix& a, const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qa(a), qb(b);
  const Matrix q1 =
      qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix q2 =
      qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(q1.transpose() * q2);
  const double min_sv =
      std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(min_sv) * 180.0 / M_PI;
}

// Explicit dense construction of the posterior system L w = T^T Sigma^-1 F~,
// solved by QR.  Independent of the library's workspace/LLT path.
Vector dense_posterior_mean(const BaumWelchStats& stats,
                            const TotalVariabilityModel& model) {
  const Eigen::Index k = model.num_components();
  const Eigen::Index d = model.dim();
  const Eigen::Index r = model.rank();
  Matrix l = Matrix::Identity(r, r);
  Vector rhs = Vector::Zero(r);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Matrix t_c = model.t.block(c * d, 0, d, r);
    const Matrix sigma_inv =
        model.ubm.diag_covs[static_cast<std::size_t>(c)]
            .cwiseInverse()
            .asDiagonal();
    const Vector centered =
        stats.first_order.row(c).transpose() -
        stats.zero_order[c] * model.ubm.means.row(c).transpose();
    l += stats.zero_order[c] * t_c.transpose() * sigma_inv * t_c;
    rhs += t_c.transpose() * sigma_inv * centered;
  }
  return l.colPivHouseholderQr().solve(rhs);
}

}  // namespace

TEST_CASE("single-component stats reduce to frame count and column sums",
          "[ivector]") {
  Rng rng(1);
  const auto ubm = make_diag_ubm(rng, 1, 4);
  FeatureMatrix feats;
  feats.frames = rng.gaussian_matrix(17, 4);
  const BaumWelchStats stats = svkit::accumulate_stats(feats, ubm, "u");
  CHECK(stats.zero_order[0] == Catch::Approx(17.0).epsilon(1e-12));
  CHECK((stats.first_order.row(0).transpose() -
         feats.frames.colwise().sum().transpose())
            .norm() < 1e-10);
}

TEST_CASE("soft counts sum to the number of frames", "[ivector]") {
  Rng rng(2);
  const auto ubm = make_diag_ubm(rng, 8, 3);
  FeatureMatrix feats;
  feats.frames = rng.gaussian_matrix(203, 3);
  const BaumWelchStats stats = svkit::accumulate_stats(feats, ubm);
  CHECK(std::abs(stats.zero_order.sum() - 203.0) < 1e-6);
}

TEST_CASE("statistics match a direct responsibility-weighted loop",
          "[ivector]") {
  Rng rng(3);
  const auto ubm = make_diag_ubm(rng, 2, 3);
  FeatureMatrix feats;
  feats.frames = rng.gaussian_matrix(3, 3);
  const BaumWelchStats stats = svkit::accumulate_stats(feats, ubm);

  const Matrix gammas = svkit::gmm_posteriors(ubm, feats.frames);
  Vector n = Vector::Zero(2);
  Matrix f = Matrix::Zero(2, 3);
  for (Eigen::Index t = 0; t < 3; ++t)
    for (Eigen::Index c = 0; c < 2; ++c) {
      n[c] += gammas(t, c);
      f.row(c) += gammas(t, c) * feats.frames.row(t);
    }
  CHECK((stats.zero_order - n).norm() < 1e-12);
  CHECK((stats.first_order - f).norm() < 1e-12);
}

TEST_CASE("stats reject mismatched dimensions", "[ivector]") {
  Rng rng(4);
  const auto ubm = make_diag_ubm(rng, 2, 3);
  FeatureMatrix feats;
  feats.frames = rng.gaussian_matrix(5, 4);
  CHECK_THROWS_AS(svkit::accumulate_stats(feats, ubm), svkit::ParamError);
}

TEST_CASE("zero statistics leave the subspace unchanged and extract to zero",
          "[ivector]") {
  Rng rng(5);
  const auto ubm = make_diag_ubm(rng, 3, 4, 1.0, /*zero_means=*/true);

  std::vector<BaumWelchStats> stats(4);
  for (auto& s : stats) {
    s.zero_order = Vector::Constant(3, 10.0);
    s.first_order = Matrix::Zero(3, 4);  // centered stats vanish (zero means)
  }
  svkit::TvTrainOptions options;
  options.iters = 3;
  const TotalVariabilityModel model =
      svkit::train_total_variability(stats, ubm, 2, 7, options);

  Rng rng_init(7);
  // Reproduce the seeded initializer: the trained T must equal it.
  double avg_std = 1.0;
  const Matrix init = options.init_scale * avg_std *
                      rng_init.gaussian_matrix(12, 2);
  CHECK((model.t - init).cwiseAbs().maxCoeff() == 0.0);

  const svkit::IVector w = svkit::extract_ivector(stats[0], model);
  CHECK(w.w.norm() == 0.0);
}

TEST_CASE("the trained subspace recovers the generating span", "[ivector]") {
  Rng rng(6);
  auto world = make_tv_world(rng, 4, 5, 3, 500);
  svkit::TvTrainOptions options;
  options.iters = 10;
  std::vector<double> history;
  const TotalVariabilityModel model = svkit::train_total_variability(
      world.stats, world.ubm, 3, 11, options, &history);

  CHECK(max_principal_angle_deg(model.t, world.t_true) < 5.0);

  REQUIRE(history.size() == 10);
  for (std::size_t i = 1; i < history.size(); ++i)
    CHECK(history[i] >= history[i - 1] - 1e-8 * std::abs(history[i - 1]));
}

TEST_CASE("extraction matches an explicit dense solve", "[ivector]") {
  Rng rng(7);
  auto world = make_tv_world(rng, 3, 4, 2, 40);
  svkit::TvTrainOptions options;
  options.iters = 4;
  const TotalVariabilityModel model = svkit::train_total_variability(
      world.stats, world.ubm, 2, 13, options);

  for (int u = 0; u < 10; ++u) {
    const Vector fast = svkit::extract_ivector(world.stats[u], model).w;
    const Vector dense = dense_posterior_mean(world.stats[u], model);
    CHECK((fast - dense).norm() <= 1e-8 * dense.norm());
  }
}

TEST_CASE("scalar rank-one case obeys the closed form", "[ivector]") {
  GaussianMixture ubm;
  ubm.cov_kind = CovKind::kDiagonal;
  ubm.weights = Vector::Ones(1);
  ubm.means = Matrix::Zero(1, 1);
  const double sigma2 = 0.8;
  ubm.diag_covs.push_back(Vector::Constant(1, sigma2));

  TotalVariabilityModel model;
  model.ubm = ubm;
  model.t = Matrix::Constant(1, 1, 0.6);
  const double t = 0.6;

  double prev = 0.0;
  for (double f : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    BaumWelchStats stats;
    stats.zero_order = Vector::Constant(1, 20.0);
    stats.first_order = Matrix::Constant(1, 1, f);
    const double w = svkit::extract_ivector(stats, model).w[0];
    const double closed =
        (t / sigma2) * f / (1.0 + 20.0 * t * t / sigma2);
    CHECK(w == Catch::Approx(closed).epsilon(1e-12));
    CHECK(w > prev);  // monotone in the scalar statistic
    prev = w;
  }
}

TEST_CASE("posterior precision has eigenvalues at least one", "[ivector]") {
  Rng rng(8);
  auto world = make_tv_world(rng, 4, 3, 3, 20);
  const TotalVariabilityModel model = svkit::train_total_variability(
      world.stats, world.ubm, 3, 17, {});
  const svkit::detail::TvWorkspace workspace(model.t, model.ubm);
  for (const auto& s : world.stats) {
    const auto post =
        svkit::detail::tv_posterior(s, model.ubm, workspace, model.rank());
    Eigen::SelfAdjointEigenSolver<Matrix> es(post.precision);
    CHECK(es.eigenvalues().minCoeff() >= 1.0 - 1e-12);
  }
}

TEST_CASE("extraction is linear in the centered statistics", "[ivector]") {
  Rng rng(9);
  auto world = make_tv_world(rng, 3, 4, 2, 5);
  // Zero-mean UBM so scaling F scales the centered stats directly.
  world.ubm.means.setZero();
  const TotalVariabilityModel model = svkit::train_total_variability(
      world.stats, world.ubm, 2, 23, {});

  BaumWelchStats stats = world.stats[0];
  const Vector w1 = svkit::extract_ivector(stats, model).w;
  stats.first_order *= 2.5;
  const Vector w2 = svkit::extract_ivector(stats, model).w;
  CHECK((w2 - 2.5 * w1).norm() < 1e-10 * w1.norm());
}

TEST_CASE("training rejects ranks beyond the supervector dimension",
          "[ivector]") {
  Rng rng(10);
  auto world = make_tv_world(rng, 2, 2, 2, 5);
  CHECK_THROWS_AS(
      svkit::train_total_variability(world.stats, world.ubm, 5, 1, {}),
      svkit::ParamError);
}
