// svkit/ivector.hpp

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

#include "svkit/common.hpp"
#include "svkit/frontend.hpp"
#include "svkit/mixtures.hpp"

namespace svkit {

/// Zero- and first-order sufficient statistics of an utterance against a UBM.
struct BaumWelchStats {
  Vector zero_order;   // K soft counts N_c
  Matrix first_order;  // K x D responsibility-weighted feature sums F_c
  std::string utterance_id;

  Eigen::Index num_components() const { return zero_order.size(); }
  Eigen::Index dim() const { return first_order.cols(); }
};

/// N_c = sum_t gamma_t(c), F_c = sum_t gamma_t(c) x_t.
inline BaumWelchStats accumulate_stats(const FeatureMatrix& features,
                                       const GaussianMixture& ubm,
                                       std::string utterance_id = "") {
  require(features.dim() == ubm.dim(), "stats: feature dim ", features.dim(),
          " does not match UBM dim ", ubm.dim());
  BaumWelchStats stats;
  stats.utterance_id = std::move(utterance_id);
  if (features.num_frames() == 0) {
    stats.zero_order = Vector::Zero(ubm.num_components());
    stats.first_order = Matrix::Zero(ubm.num_components(), ubm.dim());
    return stats;
  }
  const Matrix posteriors = gmm_posteriors(ubm, features.frames);
  stats.zero_order = posteriors.colwise().sum().transpose();
  stats.first_order = posteriors.transpose() * features.frames;
  return stats;
}

/// Total-variability model: per-component D x R loadings stacked into a
/// (K*D) x R matrix, plus the UBM whose means and covariances center and
/// whiten the statistics.
struct TotalVariabilityModel {
  Matrix t;  // (K*D) x R, rows [c*D, (c+1)*D) belong to component c
  GaussianMixture ubm;

  Eigen::Index rank() const { return t.cols(); }
  Eigen::Index num_components() const { return ubm.num_components(); }
  Eigen::Index dim() const { return ubm.dim(); }

  Eigen::Block<const Matrix> component(Eigen::Index c) const {
    return t.block(c * dim(), 0, dim(), rank());
  }
};

struct IVector {
  Vector w;
  std::string utterance_id;
};

namespace detail {

// Per-component inverse-covariance products reused across utterances:
// G_c = Sigma_c^-1 T_c and H_c = T_c^T Sigma_c^-1 T_c.
struct TvWorkspace {
  std::vector<Matrix> sigma_inv_t;   // K of D x R
  std::vector<Matrix> t_sigma_inv_t;  // K of R x R

  TvWorkspace(const Matrix& t, const GaussianMixture& ubm) {
    const Eigen::Index k = ubm.num_components();
    const Eigen::Index d = ubm.dim();
    const Eigen::Index r = t.cols();
    sigma_inv_t.reserve(static_cast<std::size_t>(k));
    t_sigma_inv_t.reserve(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto t_c = t.block(c * d, 0, d, r);
      Matrix g;
      if (ubm.cov_kind == CovKind::kDiagonal) {
        g = ubm.diag_covs[static_cast<std::size_t>(c)]
                .cwiseInverse()
                .asDiagonal() *
            t_c;
      } else {
        g = Eigen::LLT<Matrix>(ubm.full_covs[static_cast<std::size_t>(c)])
                .solve(t_c);
      }
      t_sigma_inv_t.push_back(t_c.transpose() * g);
      sigma_inv_t.push_back(std::move(g));
    }
  }
};

// Centered first-order stats: F_c - N_c mu_c, as a K x D matrix.
inline Matrix centered_stats(const BaumWelchStats& stats,
                             const GaussianMixture& ubm) {
  return stats.first_order -
         stats.zero_order.asDiagonal() * ubm.means;
}

struct TvPosterior {
  Vector mean;       // R
  Matrix precision;  // L = I + sum_c N_c H_c
  Vector linear;     // T^T Sigma^-1 F~
  Matrix covariance; // L^-1
};

inline TvPosterior tv_posterior(const BaumWelchStats& stats,
                                const GaussianMixture& ubm,
                                const TvWorkspace& workspace,
                                Eigen::Index rank) {
  const Eigen::Index k = ubm.num_components();
  TvPosterior post;
  post.precision = Matrix::Identity(rank, rank);
  post.linear = Vector::Zero(rank);
  const Matrix centered = centered_stats(stats, ubm);
  for (Eigen::Index c = 0; c < k; ++c) {
    post.precision +=
        stats.zero_order[c] * workspace.t_sigma_inv_t[static_cast<std::size_t>(c)];
    post.linear += workspace.sigma_inv_t[static_cast<std::size_t>(c)]
                       .transpose() *
                   centered.row(c).transpose();
  }
  Eigen::LLT<Matrix> llt(post.precision);
  require(llt.info() == Eigen::Success,
          "total variability: posterior precision not positive definite");
  post.mean = llt.solve(post.linear);
  post.covariance = llt.solve(Matrix::Identity(rank, rank));
  return post;
}

inline double tv_objective_term(const TvPosterior& post) {
  const Eigen::LLT<Matrix> llt(post.precision);
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * logdet + 0.5 * post.mean.dot(post.linear);
}

}  // namespace detail

struct TvTrainOptions {
  int iters = 5;
  double init_scale = 0.1;  // times the average UBM standard deviation
};

/// EM for the total-variability subspace over centered Baum-Welch statistics.
/// UBM covariances are held fixed.  The per-iteration objective (the
/// T-dependent part of the marginal log-likelihood, evaluated before each
/// M-step) is appended to *history and is non-decreasing.
inline TotalVariabilityModel train_total_variability(
    const std::vector<BaumWelchStats>& stats, const GaussianMixture& ubm,
    Eigen::Index rank, std::uint64_t seed, const TvTrainOptions& options = {},
    std::vector<double>* history = nullptr) {
  const Eigen::Index k = ubm.num_components();
  const Eigen::Index d = ubm.dim();
  require(rank >= 1, "total variability: rank must be positive");
  require(rank <= k * d, "total variability: rank ", rank,
          " exceeds supervector dimension ", k * d);
  require(!stats.empty(), "total variability: no statistics");
  for (const auto& s : stats)
    require(s.num_components() == k && s.dim() == d,
            "total variability: statistics shape mismatch");

  // Seeded Gaussian start, scaled relative to the data spread implied by the
  // UBM covariances.
  double avg_std = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    if (ubm.cov_kind == CovKind::kDiagonal)
      avg_std += ubm.diag_covs[static_cast<std::size_t>(c)]
                     .array()
                     .sqrt()
                     .mean();
    else
      avg_std += ubm.full_covs[static_cast<std::size_t>(c)]
                     .diagonal()
                     .array()
                     .sqrt()
                     .mean();
  }
  avg_std /= static_cast<double>(k);

  Rng rng(seed);
  TotalVariabilityModel model;
  model.ubm = ubm;
  model.t = options.init_scale * avg_std * rng.gaussian_matrix(k * d, rank);

  for (int iter = 0; iter < options.iters; ++iter) {
    const detail::TvWorkspace workspace(model.t, ubm);
    std::vector<Matrix> acc_a(static_cast<std::size_t>(k),
                              Matrix::Zero(rank, rank));
    std::vector<Matrix> acc_c(static_cast<std::size_t>(k),
                              Matrix::Zero(d, rank));
    double objective = 0.0;
    for (const auto& s : stats) {
      const auto post = detail::tv_posterior(s, ubm, workspace, rank);
      objective += detail::tv_objective_term(post);
      const Matrix second_moment =
          post.covariance + post.mean * post.mean.transpose();
      const Matrix centered = detail::centered_stats(s, ubm);
      for (Eigen::Index c = 0; c < k; ++c) {
        acc_a[static_cast<std::size_t>(c)] +=
            s.zero_order[c] * second_moment;
        acc_c[static_cast<std::size_t>(c)] +=
            centered.row(c).transpose() * post.mean.transpose();
      }
    }
    if (history) history->push_back(objective);

    for (Eigen::Index c = 0; c < k; ++c) {
      const Matrix& a = acc_a[static_cast<std::size_t>(c)];
      const Matrix& c_acc = acc_c[static_cast<std::size_t>(c)];
      // No signal for this component: keep the previous loadings.
      if (a.norm() < 1e-12 || c_acc.norm() == 0.0) continue;
      model.t.block(c * d, 0, d, rank) =
          a.ldlt().solve(c_acc.transpose()).transpose();
    }
  }
  return model;
}

/// Posterior mean of the latent factor given an utterance's statistics.
inline IVector extract_ivector(const BaumWelchStats& stats,
                               const TotalVariabilityModel& model) {
  require(stats.num_components() == model.num_components() &&
              stats.dim() == model.dim(),
          "i-vector: statistics do not match the model");
  const detail::TvWorkspace workspace(model.t, model.ubm);
  const auto post =
      detail::tv_posterior(stats, model.ubm, workspace, model.rank());
  return {post.mean, stats.utterance_id};
}

}  // namespace svkit
