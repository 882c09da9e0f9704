// svkit/mixtures.hpp

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
#include <limits>
#include <vector>

#include "svkit/common.hpp"

namespace svkit {

struct KmeansResult {
  Matrix centroids;                      // K x D
  std::vector<Eigen::Index> assignment;  // length N, values in [0, K)
  double distortion = 0.0;               // sum of squared distances
  std::vector<double> distortion_history;
};

struct KmeansOptions {
  int max_iter = 100;
  double tol = 1e-8;  // stop when max centroid movement falls below this
};

namespace detail {

inline Eigen::Index nearest_centroid(const Matrix& centroids,
                                     const Vector& point) {
  Eigen::Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
    const double d = (centroids.row(k).transpose() - point).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  return best;
}

// k-means++ seeding: each next centroid is drawn with probability
// proportional to squared distance from the nearest already-chosen one.
inline Matrix kmeans_plus_plus(const Matrix& points, Eigen::Index k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(
      rng.uniform_int(static_cast<std::uint64_t>(n))));
  Vector dist2 = (points.rowwise() - centroids.row(0))
                     .rowwise()
                     .squaredNorm();
  for (Eigen::Index c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen;
    if (total <= 0.0) {
      chosen = static_cast<Eigen::Index>(
          rng.uniform_int(static_cast<std::uint64_t>(n)));
    } else {
      double ticket = rng.uniform() * total;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        ticket -= dist2[i];
        if (ticket <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(chosen);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace detail

/// Lloyd iterations from a k-means++ start.  Empty clusters are re-seeded at
/// the point farthest from its current centroid; the recorded distortion is
/// non-increasing across iterations.
inline KmeansResult kmeans(const Matrix& points, Eigen::Index k,
                           std::uint64_t seed,
                           const KmeansOptions& options = {}) {
  const Eigen::Index n = points.rows();
  require(k >= 1, "kmeans: K must be at least 1");
  require(n >= k, "kmeans: need at least K points (K=", k, ", N=", n, ")");
  require(points.allFinite(), "kmeans: non-finite input");

  Rng rng(seed);
  Matrix centroids = detail::kmeans_plus_plus(points, k, rng);
  std::vector<Eigen::Index> assignment(static_cast<std::size_t>(n), 0);
  std::vector<double> history;

  auto assign_and_repair = [&]() {
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index a =
          detail::nearest_centroid(centroids, points.row(i).transpose());
      assignment[static_cast<std::size_t>(i)] = a;
      ++counts[static_cast<std::size_t>(a)];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Re-seed the empty cluster at the point with the largest distance to
      // its own centroid, excluding points that are alone in their cluster.
      Eigen::Index farthest = -1;
      double farthest_dist = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index a = assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(a)] <= 1) continue;
        const double d =
            (points.row(i) - centroids.row(a)).squaredNorm();
        if (d > farthest_dist) {
          farthest_dist = d;
          farthest = i;
        }
      }
      require(farthest >= 0, "kmeans: cannot repair empty cluster");
      const Eigen::Index old =
          assignment[static_cast<std::size_t>(farthest)];
      --counts[static_cast<std::size_t>(old)];
      assignment[static_cast<std::size_t>(farthest)] = c;
      ++counts[static_cast<std::size_t>(c)];
      centroids.row(c) = points.row(farthest);
    }
  };

  auto distortion = [&]() {
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      d += (points.row(i) -
            centroids.row(assignment[static_cast<std::size_t>(i)]))
               .squaredNorm();
    return d;
  };

  for (int iter = 0; iter < options.max_iter; ++iter) {
    assign_and_repair();
    history.push_back(distortion());

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
      counts[static_cast<std::size_t>(
          assignment[static_cast<std::size_t>(i)])] += 1.0;
    }
    double movement = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const Vector updated =
          sums.row(c).transpose() / counts[static_cast<std::size_t>(c)];
      movement = std::max(
          movement, (updated - centroids.row(c).transpose()).norm());
      centroids.row(c) = updated.transpose();
    }
    if (movement < options.tol) break;
  }

  assign_and_repair();
  KmeansResult result;
  result.distortion = distortion();
  history.push_back(result.distortion);
  result.centroids = std::move(centroids);
  result.assignment = std::move(assignment);
  result.distortion_history = std::move(history);
  return result;
}

enum class CovKind { kDiagonal, kFull };

/// Weighted Gaussian mixture with diagonal or full covariances.  Serves both
/// as acoustic UBM and as a 1-D score-distribution model.
struct GaussianMixture {
  Vector weights;                 // K, positive, sums to 1
  Matrix means;                   // K x D
  std::vector<Vector> diag_covs;  // K vectors of length D (diagonal kind)
  std::vector<Matrix> full_covs;  // K matrices D x D (full kind)
  CovKind cov_kind = CovKind::kDiagonal;

  Eigen::Index num_components() const { return weights.size(); }
  Eigen::Index dim() const { return means.cols(); }

  void validate() const {
    const Eigen::Index k = num_components();
    require(k >= 1 && means.rows() == k, "mixture: inconsistent sizes");
    require(std::abs(weights.sum() - 1.0) < 1e-10,
            "mixture: weights must sum to 1");
    require(weights.minCoeff() > 0.0, "mixture: weights must be positive");
    if (cov_kind == CovKind::kDiagonal) {
      require(static_cast<Eigen::Index>(diag_covs.size()) == k,
              "mixture: missing diagonal covariances");
      for (const auto& v : diag_covs)
        require(v.size() == dim() && v.minCoeff() > 0.0,
                "mixture: diagonal covariances must be positive");
    } else {
      require(static_cast<Eigen::Index>(full_covs.size()) == k,
              "mixture: missing full covariances");
      for (const auto& m : full_covs) {
        require(m.rows() == dim() && m.cols() == dim(),
                "mixture: covariance shape mismatch");
        require((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-8,
                "mixture: covariance not symmetric");
        Eigen::LLT<Matrix> llt(m);
        require(llt.info() == Eigen::Success,
                "mixture: covariance not positive definite");
      }
    }
  }
};

namespace detail {

// Per-component Cholesky/normalizer cache for density evaluation.
struct GmmDensity {
  const GaussianMixture* gmm;
  std::vector<Vector> inv_diag;        // diagonal kind
  std::vector<Eigen::LLT<Matrix>> llt;  // full kind
  Vector log_norm;  // log w_k - 0.5 (D log 2pi + logdet)

  explicit GmmDensity(const GaussianMixture& g) : gmm(&g) {
    const Eigen::Index k = g.num_components();
    const double d = static_cast<double>(g.dim());
    log_norm.resize(k);
    if (g.cov_kind == CovKind::kDiagonal) {
      inv_diag.resize(static_cast<std::size_t>(k));
      for (Eigen::Index c = 0; c < k; ++c) {
        const Vector& var = g.diag_covs[static_cast<std::size_t>(c)];
        inv_diag[static_cast<std::size_t>(c)] = var.cwiseInverse();
        log_norm[c] = std::log(g.weights[c]) -
                      0.5 * (d * std::log(2.0 * M_PI) +
                             var.array().log().sum());
      }
    } else {
      llt.reserve(static_cast<std::size_t>(k));
      for (Eigen::Index c = 0; c < k; ++c) {
        llt.emplace_back(g.full_covs[static_cast<std::size_t>(c)]);
        require(llt.back().info() == Eigen::Success,
                "gmm density: covariance not positive definite");
        const double logdet =
            2.0 * llt.back().matrixL().toDenseMatrix().diagonal().array().log()
                      .sum();
        log_norm[c] =
            std::log(g.weights[c]) -
            0.5 * (d * std::log(2.0 * M_PI) + logdet);
      }
    }
  }

  // N x K matrix of log(w_k N(x_i; mu_k, Sigma_k)).
  Matrix weighted_log_densities(const Matrix& data) const {
    const Eigen::Index n = data.rows();
    const Eigen::Index k = gmm->num_components();
    Matrix out(n, k);
    if (gmm->cov_kind == CovKind::kDiagonal) {
      for (Eigen::Index c = 0; c < k; ++c) {
        const auto centered =
            (data.rowwise() - gmm->means.row(c)).array();
        out.col(c) =
            (-0.5 *
             (centered.square().rowwise() *
              inv_diag[static_cast<std::size_t>(c)].transpose().array())
                 .rowwise()
                 .sum())
                .matrix();
        out.col(c).array() += log_norm[c];
      }
    } else {
      for (Eigen::Index c = 0; c < k; ++c) {
        const Matrix centered =
            (data.rowwise() - gmm->means.row(c)).transpose();  // D x N
        const Matrix whitened =
            llt[static_cast<std::size_t>(c)].matrixL().solve(centered);
        out.col(c) = -0.5 * whitened.colwise().squaredNorm().transpose();
        out.col(c).array() += log_norm[c];
      }
    }
    return out;
  }
};

}  // namespace detail

/// Responsibilities: N x K, each row non-negative and summing to 1.
/// Computed in the log domain with log-sum-exp.
inline Matrix gmm_posteriors(const GaussianMixture& gmm, const Matrix& data) {
  require(data.cols() == gmm.dim(), "gmm_posteriors: dimension mismatch (",
          data.cols(), " vs ", gmm.dim(), ")");
  const detail::GmmDensity density(gmm);
  Matrix logs = density.weighted_log_densities(data);
  for (Eigen::Index i = 0; i < logs.rows(); ++i) {
    const double lse = log_sum_exp(logs.row(i).transpose());
    logs.row(i) = (logs.row(i).array() - lse).exp();
  }
  return logs;
}

/// Total data log-likelihood under the mixture.
inline double gmm_loglik(const GaussianMixture& gmm, const Matrix& data) {
  require(data.cols() == gmm.dim(), "gmm_loglik: dimension mismatch (",
          data.cols(), " vs ", gmm.dim(), ")");
  const detail::GmmDensity density(gmm);
  const Matrix logs = density.weighted_log_densities(data);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logs.rows(); ++i)
    total += log_sum_exp(logs.row(i).transpose());
  return total;
}

struct GmmEmOptions {
  int max_iter = 50;
  double tol = 1e-6;  // relative log-likelihood improvement stopping rule
  // Covariance flooring: diagonal variances at diag_floor_scale times the
  // per-dimension data variance, full-covariance eigenvalues at
  // full_floor_scale * trace/D.  The absolute backstop keeps EM defined on
  // degenerate data.
  double diag_floor_scale = 1e-4;
  double full_floor_scale = 1e-6;
  double abs_floor = 1e-12;
};

/// Mixture initialization from a k-means partition: cluster fractions,
/// centroids, and per-cluster ML covariances (floored).
inline GaussianMixture gmm_init_from_kmeans(const Matrix& data,
                                            const KmeansResult& km,
                                            CovKind cov_kind,
                                            const GmmEmOptions& options = {}) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  const Eigen::Index k = km.centroids.rows();

  Vector data_var = ((data.rowwise() - data.colwise().mean())
                         .array()
                         .square()
                         .colwise()
                         .mean())
                        .transpose();
  const Vector diag_floor =
      (options.diag_floor_scale * data_var.array() + options.abs_floor)
          .matrix();

  GaussianMixture gmm;
  gmm.cov_kind = cov_kind;
  gmm.weights.resize(k);
  gmm.means = km.centroids;
  for (Eigen::Index c = 0; c < k; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i)
      if (km.assignment[static_cast<std::size_t>(i)] == c) members.push_back(i);
    gmm.weights[c] =
        static_cast<double>(members.size()) / static_cast<double>(n);
    Matrix centered(static_cast<Eigen::Index>(members.size()), d);
    for (std::size_t j = 0; j < members.size(); ++j)
      centered.row(static_cast<Eigen::Index>(j)) =
          data.row(members[j]) - gmm.means.row(c);
    if (cov_kind == CovKind::kDiagonal) {
      Vector var = members.empty()
                       ? data_var
                       : centered.array().square().colwise().mean()
                             .transpose().matrix();
      gmm.diag_covs.push_back(var.cwiseMax(diag_floor));
    } else {
      Matrix cov = members.empty()
                       ? Matrix(data_var.asDiagonal())
                       : Matrix((centered.transpose() * centered) /
                                static_cast<double>(members.size()));
      cov = 0.5 * (cov + cov.transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
      const double floor = std::max(
          options.full_floor_scale * cov.trace() / static_cast<double>(d),
          options.abs_floor);
      const Vector evals = es.eigenvalues().cwiseMax(floor);
      gmm.full_covs.push_back(es.eigenvectors() * evals.asDiagonal() *
                              es.eigenvectors().transpose());
    }
  }
  // Guard against empty clusters surviving upstream repair.
  const double weight_floor = 1.0 / (100.0 * static_cast<double>(n));
  gmm.weights = gmm.weights.cwiseMax(weight_floor);
  gmm.weights /= gmm.weights.sum();
  return gmm;
}

/// EM from an explicit starting mixture.  The per-iteration total data
/// log-likelihood (evaluated before each M-step) is appended to *history and
/// is non-decreasing up to numerical slack.
inline GaussianMixture gmm_em(const Matrix& data, const GaussianMixture& init,
                              const GmmEmOptions& options = {},
                              std::vector<double>* history = nullptr) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  const Eigen::Index k = init.num_components();
  require(data.allFinite(), "gmm_em: non-finite input");
  require(n >= k, "gmm_em: need at least K points");
  require(init.dim() == d, "gmm_em: init dimension mismatch");
  if (init.cov_kind == CovKind::kFull)
    require(n > d, "gmm_em: full covariance needs more points than dimensions");

  Vector data_var = ((data.rowwise() - data.colwise().mean())
                         .array()
                         .square()
                         .colwise()
                         .mean())
                        .transpose();
  const Vector diag_floor =
      (options.diag_floor_scale * data_var.array() + options.abs_floor)
          .matrix();

  GaussianMixture gmm = init;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const detail::GmmDensity density(gmm);
    Matrix logs = density.weighted_log_densities(data);
    double ll = 0.0;
    Matrix resp(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lse = log_sum_exp(logs.row(i).transpose());
      ll += lse;
      resp.row(i) = (logs.row(i).array() - lse).exp();
    }
    if (history) history->push_back(ll);

    // M-step.
    const Vector counts = resp.colwise().sum().transpose();
    gmm.weights = counts / static_cast<double>(n);
    gmm.weights /= gmm.weights.sum();
    for (Eigen::Index c = 0; c < k; ++c) {
      const double nk = counts[c];
      const Vector mean = (resp.col(c).transpose() * data).transpose() / nk;
      gmm.means.row(c) = mean.transpose();
      if (gmm.cov_kind == CovKind::kDiagonal) {
        const Vector second =
            (resp.col(c).transpose() * data.cwiseProduct(data)).transpose() /
            nk;
        Vector var = second - mean.cwiseProduct(mean);
        gmm.diag_covs[static_cast<std::size_t>(c)] = var.cwiseMax(diag_floor);
      } else {
        Matrix scatter = Matrix::Zero(d, d);
        // resp-weighted outer products via a scaled copy of the data.
        const Matrix weighted =
            data.array().colwise() * resp.col(c).array();
        scatter = (weighted.transpose() * data) / nk;
        Matrix cov = scatter - mean * mean.transpose();
        cov = 0.5 * (cov + cov.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        const double floor = std::max(
            options.full_floor_scale * cov.trace() / static_cast<double>(d),
            options.abs_floor);
        const Vector evals = es.eigenvalues().cwiseMax(floor);
        gmm.full_covs[static_cast<std::size_t>(c)] =
            es.eigenvectors() * evals.asDiagonal() *
            es.eigenvectors().transpose();
      }
    }

    if (std::isfinite(prev_ll) &&
        std::abs(ll - prev_ll) < options.tol * std::abs(prev_ll))
      break;
    prev_ll = ll;
  }
  return gmm;
}

inline GaussianMixture gmm_em(const Matrix& data, const KmeansResult& init,
                              CovKind cov_kind,
                              const GmmEmOptions& options = {},
                              std::vector<double>* history = nullptr) {
  return gmm_em(data, gmm_init_from_kmeans(data, init, cov_kind, options),
                options, history);
}

/// k-means++ start followed by EM; the standard training entry point.
inline GaussianMixture train_gmm(const Matrix& data, Eigen::Index k,
                                 CovKind cov_kind, std::uint64_t seed,
                                 const GmmEmOptions& options = {},
                                 std::vector<double>* history = nullptr) {
  const KmeansResult km = kmeans(data, k, seed);
  return gmm_em(data, km, cov_kind, options, history);
}

}  // namespace svkit
