// tests/test_mixtures.cpp

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

#include "svkit/mixtures.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using svkit::CovKind;
using svkit::GaussianMixture;
using svkit::GmmEmOptions;
using svkit::KmeansOptions;
using svkit::Matrix;
using svkit::Rng;
using svkit::Vector;

namespace {

// Naive per-point mixture density, no log-domain tricks.  Oracle only.
double naive_loglik(const GaussianMixture& gmm, const Matrix& data) {
  const Eigen::Index d = gmm.dim();
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double p = 0.0;
    for (Eigen::Index c = 0; c < gmm.num_components(); ++c) {
      const Vector diff =
          data.row(i).transpose() - gmm.means.row(c).transpose();
      double quad, logdet;
      if (gmm.cov_kind == CovKind::kDiagonal) {
        const Vector& var = gmm.diag_covs[static_cast<std::size_t>(c)];
        quad = (diff.array().square() / var.array()).sum();
        logdet = var.array().log().sum();
      } else {
        const Matrix& cov = gmm.full_covs[static_cast<std::size_t>(c)];
        quad = diff.dot(cov.inverse() * diff);
        logdet = std::log(cov.determinant());
      }
      p += gmm.weights[c] *
           std::exp(-0.5 * (static_cast<double>(d) * std::log(2.0 * M_PI) +
                            logdet + quad));
    }
    total += std::log(p);
  }
  return total;
}

Matrix gaussian_blob(Rng& rng, Eigen::Index n, const Vector& center,
                     double sigma) {
  Matrix out(n, center.size());
  for (Eigen::Index i = 0; i < n; ++i)
    out.row(i) = (center + sigma * rng.gaussian_vector(center.size()))
                     .transpose();
  return out;
}

}  // namespace

TEST_CASE("kmeans with one cluster finds the global mean", "[mixtures]") {
  Rng rng(11);
  const Matrix points = rng.gaussian_matrix(50, 3);
  const auto result = svkit::kmeans(points, 1, 7);
  const Vector mean = points.colwise().mean().transpose();
  CHECK((result.centroids.row(0).transpose() - mean).norm() < 1e-12);
  for (auto a : result.assignment) CHECK(a == 0);
}

TEST_CASE("kmeans with K equal to N reaches zero distortion", "[mixtures]") {
  Rng rng(12);
  Matrix points = rng.gaussian_matrix(8, 2);
  const auto result = svkit::kmeans(points, 8, 3);
  CHECK(result.distortion < 1e-20);
}

TEST_CASE("kmeans recovers two well-separated 1-D blobs", "[mixtures]") {
  Rng rng(13);
  Matrix points(200, 1);
  points.topRows(100) = gaussian_blob(rng, 100, Vector::Zero(1), 0.1);
  points.bottomRows(100) =
      gaussian_blob(rng, 100, Vector::Constant(1, 10.0), 0.1);
  const auto result = svkit::kmeans(points, 2, 5);
  double lo = result.centroids.col(0).minCoeff();
  double hi = result.centroids.col(0).maxCoeff();
  CHECK(std::abs(lo - 0.0) < 0.1);
  CHECK(std::abs(hi - 10.0) < 0.1);
}

TEST_CASE("kmeans distortion is non-increasing and matches its definition",
          "[mixtures]") {
  Rng rng(14);
  const Matrix points = rng.gaussian_matrix(120, 4);
  const auto result = svkit::kmeans(points, 6, 21);
  for (std::size_t i = 1; i < result.distortion_history.size(); ++i)
    CHECK(result.distortion_history[i] <=
          result.distortion_history[i - 1] + 1e-9);
  double direct = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    direct += (points.row(i) -
               result.centroids.row(
                   result.assignment[static_cast<std::size_t>(i)]))
                  .squaredNorm();
  CHECK(result.distortion == Catch::Approx(direct).epsilon(1e-12));
}

TEST_CASE("kmeans rejects K larger than N", "[mixtures]") {
  Matrix points = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(svkit::kmeans(points, 4, 0), svkit::ParamError);
}

TEST_CASE("kmeans is deterministic for a fixed seed", "[mixtures]") {
  Rng rng(15);
  const Matrix points = rng.gaussian_matrix(60, 3);
  const auto a = svkit::kmeans(points, 4, 99);
  const auto b = svkit::kmeans(points, 4, 99);
  CHECK(a.centroids == b.centroids);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("single-component EM recovers the ML Gaussian", "[mixtures]") {
  Rng rng(16);
  const Matrix data = gaussian_blob(rng, 300, Vector::Constant(3, 2.0), 1.5);
  const Vector mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - mean.transpose();

  SECTION("diagonal") {
    const auto gmm = svkit::train_gmm(data, 1, CovKind::kDiagonal, 1);
    const Vector var =
        centered.array().square().colwise().mean().transpose();
    CHECK((gmm.means.row(0).transpose() - mean).norm() < 1e-10);
    CHECK((gmm.diag_covs[0] - var).norm() < 1e-10);
  }
  SECTION("full") {
    const auto gmm = svkit::train_gmm(data, 1, CovKind::kFull, 1);
    const Matrix cov =
        (centered.transpose() * centered) / static_cast<double>(data.rows());
    CHECK((gmm.means.row(0).transpose() - mean).norm() < 1e-10);
    CHECK((gmm.full_covs[0] - cov).norm() < 1e-8);
  }
}

TEST_CASE("EM separates a known 1-D two-component mixture", "[mixtures]") {
  Rng rng(17);
  Matrix data(2000, 1);
  for (Eigen::Index i = 0; i < 2000; ++i) {
    const double center = (rng.uniform() < 0.5) ? -4.0 : 4.0;
    data(i, 0) = center + rng.gaussian();
  }
  const auto gmm = svkit::train_gmm(data, 2, CovKind::kDiagonal, 3);
  double lo = gmm.means.col(0).minCoeff();
  double hi = gmm.means.col(0).maxCoeff();
  CHECK(std::abs(lo + 4.0) < 0.3);
  CHECK(std::abs(hi - 4.0) < 0.3);
  CHECK(std::abs(gmm.weights[0] - 0.5) < 0.05);
  CHECK(std::abs(gmm.weights[1] - 0.5) < 0.05);
}

TEST_CASE("EM log-likelihood is non-decreasing", "[mixtures]") {
  Rng rng(18);
  Matrix data(400, 3);
  data.topRows(200) = gaussian_blob(rng, 200, Vector::Zero(3), 1.0);
  data.bottomRows(200) =
      gaussian_blob(rng, 200, Vector::Constant(3, 3.0), 2.0);

  for (CovKind kind : {CovKind::kDiagonal, CovKind::kFull}) {
    std::vector<double> history;
    GmmEmOptions options;
    options.max_iter = 20;
    options.tol = 0.0;
    svkit::train_gmm(data, 8, kind, 5, options, &history);
    REQUIRE(history.size() == 20);
    for (std::size_t i = 1; i < history.size(); ++i)
      CHECK(history[i] >= history[i - 1] - 1e-8 * std::abs(history[i - 1]));
  }
}

TEST_CASE("posteriors are all ones for a single component", "[mixtures]") {
  Rng rng(19);
  const Matrix data = rng.gaussian_matrix(20, 2);
  const auto gmm = svkit::train_gmm(data, 1, CovKind::kDiagonal, 0);
  const Matrix post = svkit::gmm_posteriors(gmm, data);
  CHECK((post.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("posterior rows sum to one and peak at the owning component",
          "[mixtures]") {
  GaussianMixture gmm;
  gmm.cov_kind = CovKind::kDiagonal;
  gmm.weights = Vector::Constant(2, 0.5);
  gmm.means = Matrix(2, 2);
  gmm.means << -10.0, -10.0, 10.0, 10.0;
  gmm.diag_covs = {Vector::Ones(2), Vector::Ones(2)};
  gmm.validate();

  Rng rng(20);
  const Matrix data = rng.gaussian_matrix(50, 2);
  const Matrix post = svkit::gmm_posteriors(gmm, data);
  for (Eigen::Index i = 0; i < post.rows(); ++i)
    CHECK(std::abs(post.row(i).sum() - 1.0) < 1e-10);

  Matrix at_mean(1, 2);
  at_mean << 10.0, 10.0;
  CHECK(svkit::gmm_posteriors(gmm, at_mean)(0, 1) > 0.99);
}

TEST_CASE("standard normal log-density at the origin", "[mixtures]") {
  GaussianMixture gmm;
  gmm.cov_kind = CovKind::kDiagonal;
  gmm.weights = Vector::Ones(1);
  gmm.means = Matrix::Zero(1, 1);
  gmm.diag_covs = {Vector::Ones(1)};
  Matrix x = Matrix::Zero(1, 1);
  CHECK(svkit::gmm_loglik(gmm, x) ==
        Catch::Approx(-0.9189385332046727).epsilon(1e-12));
}

TEST_CASE("log-likelihood is additive over duplicated data", "[mixtures]") {
  Rng rng(21);
  const Matrix data = rng.gaussian_matrix(40, 2);
  const auto gmm = svkit::train_gmm(data, 3, CovKind::kDiagonal, 9);
  Matrix doubled(80, 2);
  doubled << data, data;
  CHECK(svkit::gmm_loglik(gmm, doubled) ==
        Catch::Approx(2.0 * svkit::gmm_loglik(gmm, data)).epsilon(1e-12));
}

TEST_CASE("log-likelihood matches the naive density oracle", "[mixtures]") {
  Rng rng(22);
  const Matrix data = rng.gaussian_matrix(100, 3);
  for (CovKind kind : {CovKind::kDiagonal, CovKind::kFull}) {
    const auto gmm = svkit::train_gmm(data, 4, kind, 31);
    const double fast = svkit::gmm_loglik(gmm, data);
    const double naive = naive_loglik(gmm, data);
    CHECK(std::abs(fast - naive) <= 1e-10 * std::abs(naive));
  }
}

TEST_CASE("M-step keeps weights on the simplex and covariances symmetric",
          "[mixtures]") {
  Rng rng(23);
  Matrix data(300, 4);
  data.topRows(150) = gaussian_blob(rng, 150, Vector::Zero(4), 1.0);
  data.bottomRows(150) =
      gaussian_blob(rng, 150, Vector::Constant(4, 2.5), 0.7);
  const auto gmm = svkit::train_gmm(data, 5, CovKind::kFull, 77);
  CHECK(std::abs(gmm.weights.sum() - 1.0) < 1e-12);
  CHECK(gmm.weights.minCoeff() > 0.0);
  for (const auto& cov : gmm.full_covs)
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  gmm.validate();
}

TEST_CASE("full covariance EM requires more points than dimensions",
          "[mixtures]") {
  Rng rng(24);
  const Matrix data = rng.gaussian_matrix(3, 5);
  GaussianMixture init;
  init.cov_kind = CovKind::kFull;
  init.weights = Vector::Ones(1);
  init.means = Matrix::Zero(1, 5);
  init.full_covs = {Matrix::Identity(5, 5)};
  CHECK_THROWS_AS(svkit::gmm_em(data, init), svkit::ParamError);
}
