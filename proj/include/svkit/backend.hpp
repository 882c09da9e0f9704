// svkit/backend.hpp

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
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "svkit/common.hpp"

namespace svkit {

/// Labeled embedding collection: one row per utterance.
struct EmbeddingSet {
  Matrix vectors;                           // N x D
  std::vector<std::string> speaker_label;   // N
  std::vector<std::string> utterance_id;    // N

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }

  void add(const Vector& v, std::string speaker, std::string utterance) {
    require(!speaker.empty(), "embedding set: empty speaker label");
    if (vectors.rows() == 0 && vectors.cols() == 0)
      vectors.resize(0, v.size());
    require(v.size() == vectors.cols(), "embedding set: dimension mismatch");
    vectors.conservativeResize(vectors.rows() + 1, Eigen::NoChange);
    vectors.row(vectors.rows() - 1) = v.transpose();
    speaker_label.push_back(std::move(speaker));
    utterance_id.push_back(std::move(utterance));
  }

  void validate() const {
    require(static_cast<Eigen::Index>(speaker_label.size()) == size() &&
                static_cast<Eigen::Index>(utterance_id.size()) == size(),
            "embedding set: label count mismatch");
    require(vectors.allFinite(), "embedding set: non-finite vectors");
    for (const auto& s : speaker_label)
      require(!s.empty(), "embedding set: empty speaker label");
  }

  /// Row indices grouped by speaker, in label-sorted order.
  std::map<std::string, std::vector<Eigen::Index>> by_speaker() const {
    std::map<std::string, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < size(); ++i)
      groups[speaker_label[static_cast<std::size_t>(i)]].push_back(i);
    return groups;
  }
};

/// Keeps the max_count longest utterances (training-set pre-filter).
/// Ties keep the earlier row.
inline EmbeddingSet select_longest(const EmbeddingSet& set,
                                   const std::vector<double>& durations,
                                   std::size_t max_count) {
  set.validate();
  require(durations.size() == static_cast<std::size_t>(set.size()),
          "select_longest: need one duration per embedding");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(set.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return durations[static_cast<std::size_t>(a)] >
                            durations[static_cast<std::size_t>(b)];
                   });
  if (order.size() > max_count) order.resize(max_count);
  std::sort(order.begin(), order.end());  // preserve original row order

  EmbeddingSet out;
  out.vectors.resize(static_cast<Eigen::Index>(order.size()), set.dim());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.vectors.row(static_cast<Eigen::Index>(i)) = set.vectors.row(order[i]);
    out.speaker_label.push_back(
        set.speaker_label[static_cast<std::size_t>(order[i])]);
    out.utterance_id.push_back(
        set.utterance_id[static_cast<std::size_t>(order[i])]);
  }
  return out;
}

/// Centering + LDA projection + length normalization target.
struct BackendTransform {
  Vector global_mean;  // D
  Matrix lda;          // D' x D
  double target_norm = 0.0;  // defaults to sqrt(D') at fit time

  Eigen::Index input_dim() const { return lda.cols(); }
  Eigen::Index output_dim() const { return lda.rows(); }
};

namespace detail {

struct Scatters {
  Matrix within;   // S_w, averaged over N
  Matrix between;  // S_b, averaged over N
  Vector mean;
};

inline Scatters class_scatters(const EmbeddingSet& set) {
  const Eigen::Index n = set.size();
  const Eigen::Index d = set.dim();
  Scatters s;
  s.mean = set.vectors.colwise().mean().transpose();
  s.within = Matrix::Zero(d, d);
  s.between = Matrix::Zero(d, d);
  for (const auto& [label, rows] : set.by_speaker()) {
    Vector class_mean = Vector::Zero(d);
    for (Eigen::Index i : rows)
      class_mean += set.vectors.row(i).transpose();
    class_mean /= static_cast<double>(rows.size());
    for (Eigen::Index i : rows) {
      const Vector c = set.vectors.row(i).transpose() - class_mean;
      s.within += c * c.transpose();
    }
    const Vector m = class_mean - s.mean;
    s.between += static_cast<double>(rows.size()) * m * m.transpose();
  }
  s.within /= static_cast<double>(n);
  s.between /= static_cast<double>(n);
  return s;
}

inline Matrix floor_spd(const Matrix& m, double floor_scale, double abs_floor) {
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const double floor = std::max(
      floor_scale * sym.trace() / static_cast<double>(sym.rows()), abs_floor);
  const Vector evals = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Fits global centering plus LDA by solving S_b u = lambda S_w u via
/// S_w-whitening; S_w is ridge-regularized by 1e-6 tr(S_w)/D.
inline BackendTransform fit_transform(const EmbeddingSet& train,
                                      Eigen::Index lda_dim) {
  train.validate();
  const Eigen::Index d = train.dim();
  const auto groups = train.by_speaker();
  const auto n_speakers = static_cast<Eigen::Index>(groups.size());
  require(n_speakers >= 2, "lda: need at least two speakers");
  require(lda_dim >= 1, "lda: dimension must be positive");
  require(lda_dim <= std::min(d, n_speakers - 1), "lda: dimension ", lda_dim,
          " exceeds min(D, n_speakers - 1) = ",
          std::min(d, n_speakers - 1));

  const auto scatters = detail::class_scatters(train);
  Matrix s_w = scatters.within;
  s_w += (1e-6 * s_w.trace() / static_cast<double>(d)) *
         Matrix::Identity(d, d);

  const Eigen::LLT<Matrix> llt(s_w);
  require(llt.info() == Eigen::Success, "lda: within-class scatter not SPD");
  const Matrix l_inv =
      llt.matrixL().solve(Matrix::Identity(d, d));
  Matrix m = l_inv * scatters.between * l_inv.transpose();
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);

  BackendTransform transform;
  transform.global_mean = scatters.mean;
  transform.lda.resize(lda_dim, d);
  // Eigenvalues ascend; take the top lda_dim in descending order.
  for (Eigen::Index r = 0; r < lda_dim; ++r)
    transform.lda.row(r) =
        es.eigenvectors().col(d - 1 - r).transpose() * l_inv;
  transform.target_norm = std::sqrt(static_cast<double>(lda_dim));
  return transform;
}

/// Centering + LDA without length normalization.
inline Vector project(const BackendTransform& t, const Vector& x) {
  require(x.size() == t.input_dim(), "transform: dimension mismatch");
  return t.lda * (x - t.global_mean);
}

/// Full transform: project, then rescale to the target norm.
inline Vector apply_transform(const BackendTransform& t, const Vector& x) {
  Vector y = project(t, x);
  const double norm = y.norm();
  require(norm > 0.0, "transform: zero vector after projection");
  return (t.target_norm / norm) * y;
}

inline EmbeddingSet apply_transform(const BackendTransform& t,
                                    const EmbeddingSet& set) {
  EmbeddingSet out;
  out.vectors.resize(set.size(), t.output_dim());
  for (Eigen::Index i = 0; i < set.size(); ++i)
    out.vectors.row(i) =
        apply_transform(t, set.vectors.row(i).transpose()).transpose();
  out.speaker_label = set.speaker_label;
  out.utterance_id = set.utterance_id;
  return out;
}

/// Two-covariance PLDA: x = mu + y + e with y ~ N(0, B) between speakers and
/// e ~ N(0, W) within.
struct PldaModel {
  Vector mu;
  Matrix b;
  Matrix w;

  Eigen::Index dim() const { return mu.size(); }
};

struct PldaTrainOptions {
  int iters = 10;
  // Covariance flooring, as in the mixture module: eigenvalues at
  // floor_scale * trace/D with an absolute backstop.
  double floor_scale = 1e-6;
  double abs_floor = 1e-10;
};

namespace detail {

// Marginal log-likelihood of all speakers under (mu, B, W).  Uses the
// per-speaker decomposition: sqrt(n) zbar ~ N(0, W + nB) and the n-1
// within-speaker directions ~ N(0, W).
inline double plda_marginal_loglik(
    const Matrix& vectors,
    const std::map<std::string, std::vector<Eigen::Index>>& groups,
    const Vector& mu, const Matrix& b, const Matrix& w) {
  const Eigen::Index d = mu.size();
  const double log2pi = std::log(2.0 * M_PI);

  const Eigen::LLT<Matrix> llt_w(w);
  const double logdet_w =
      2.0 * llt_w.matrixL().toDenseMatrix().diagonal().array().log().sum();

  // Factorizations of W + nB per distinct speaker size.
  std::map<Eigen::Index, std::pair<Eigen::LLT<Matrix>, double>> by_count;
  for (const auto& [label, rows] : groups) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (by_count.count(n)) continue;
    Matrix cov = w + static_cast<double>(n) * b;
    Eigen::LLT<Matrix> llt(cov);
    const double logdet =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    by_count.emplace(n, std::make_pair(std::move(llt), logdet));
  }

  double total = 0.0;
  for (const auto& [label, rows] : groups) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const double nd = static_cast<double>(n);
    Vector zbar = Vector::Zero(d);
    for (Eigen::Index i : rows)
      zbar += vectors.row(i).transpose() - mu;
    zbar /= nd;
    Matrix s_within = Matrix::Zero(d, d);
    for (Eigen::Index i : rows) {
      const Vector c = vectors.row(i).transpose() - mu - zbar;
      s_within += c * c.transpose();
    }
    const auto& [llt_nb, logdet_nb] = by_count.at(n);
    total += -0.5 * (nd * static_cast<double>(d) * log2pi + logdet_nb +
                     (nd - 1.0) * logdet_w +
                     nd * zbar.dot(llt_nb.solve(zbar)) +
                     (llt_w.solve(s_within)).trace());
  }
  return total;
}

}  // namespace detail

/// EM for the two-covariance model on a (post-transform) embedding set.
/// The per-iteration marginal log-likelihood (evaluated before each M-step)
/// is appended to *history and is non-decreasing.  With singleton speakers
/// only B + W is identifiable; the split between them is then arbitrary.
inline PldaModel plda_train(const EmbeddingSet& train,
                            const PldaTrainOptions& options = {},
                            std::vector<double>* history = nullptr) {
  train.validate();
  const Eigen::Index n = train.size();
  const Eigen::Index d = train.dim();
  const auto groups = train.by_speaker();
  const auto n_speakers = static_cast<Eigen::Index>(groups.size());
  require(n_speakers >= 2, "plda: need at least two speakers");

  PldaModel model;
  model.mu = train.vectors.colwise().mean().transpose();

  // Moment-based start: class scatters, floored to stay positive definite
  // with a scale taken from the data so degenerate scatters still give a
  // workable starting point.
  const auto scatters = detail::class_scatters(train);
  const double scale_hint =
      (scatters.within.trace() + scatters.between.trace()) /
      static_cast<double>(d);
  model.w = detail::floor_spd(scatters.within, options.floor_scale,
                              options.abs_floor + 1e-3 * scale_hint);
  model.b = detail::floor_spd(scatters.between, options.floor_scale,
                              options.abs_floor + 1e-3 * scale_hint);

  // Per-speaker fixed quantities.
  struct SpeakerStats {
    double count;
    Vector sum;  // sum of x - mu
  };
  std::vector<SpeakerStats> speakers;
  Matrix total_scatter = Matrix::Zero(d, d);  // sum (x - mu)(x - mu)^T
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector z = train.vectors.row(i).transpose() - model.mu;
    total_scatter += z * z.transpose();
  }
  for (const auto& [label, rows] : groups) {
    SpeakerStats s;
    s.count = static_cast<double>(rows.size());
    s.sum = Vector::Zero(d);
    for (Eigen::Index i : rows)
      s.sum += train.vectors.row(i).transpose() - model.mu;
    speakers.push_back(std::move(s));
  }

  for (int iter = 0; iter < options.iters; ++iter) {
    if (history)
      history->push_back(detail::plda_marginal_loglik(
          train.vectors, groups, model.mu, model.b, model.w));

    const Eigen::LLT<Matrix> llt_b(model.b);
    const Eigen::LLT<Matrix> llt_w(model.w);
    require(llt_b.info() == Eigen::Success && llt_w.info() == Eigen::Success,
            "plda: covariance lost positive definiteness");
    const Matrix b_inv = llt_b.solve(Matrix::Identity(d, d));
    const Matrix w_inv = llt_w.solve(Matrix::Identity(d, d));

    // Posterior covariance per distinct speaker size.
    std::map<double, Matrix> posterior_cov;  // P_i^-1
    for (const auto& s : speakers) {
      if (posterior_cov.count(s.count)) continue;
      const Matrix precision = b_inv + s.count * w_inv;
      posterior_cov.emplace(
          s.count, Matrix(precision.llt().solve(Matrix::Identity(d, d))));
    }

    Matrix b_acc = Matrix::Zero(d, d);
    Matrix w_acc = total_scatter;
    for (const auto& s : speakers) {
      const Matrix& p_inv = posterior_cov.at(s.count);
      const Vector y = p_inv * (w_inv * s.sum);
      b_acc += y * y.transpose() + p_inv;
      w_acc += -s.sum * y.transpose() - y * s.sum.transpose() +
               s.count * (y * y.transpose() + p_inv);
    }
    model.b = detail::floor_spd(b_acc / static_cast<double>(n_speakers),
                                options.floor_scale, options.abs_floor);
    model.w = detail::floor_spd(w_acc / static_cast<double>(n),
                                options.floor_scale, options.abs_floor);
  }
  return model;
}

/// Trial scoring with precomputed factorizations.  The joint same-speaker
/// covariance [[B+W, B], [B, B+W]] decouples, in the rotated coordinates
/// (e+t)/sqrt(2) and (e-t)/sqrt(2), into W + 2B and W; the different-speaker
/// hypothesis gives B + W in both.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& model)
      : mu_(model.mu),
        total_(model.b + model.w),
        sum_cov_(model.w + 2.0 * model.b),
        llt_total_(total_),
        llt_sum_(sum_cov_),
        llt_w_(model.w) {
    require(llt_total_.info() == Eigen::Success &&
                llt_sum_.info() == Eigen::Success &&
                llt_w_.info() == Eigen::Success,
            "plda scorer: covariances must be positive definite");
    log_const_ = logdet(llt_total_) - 0.5 * logdet(llt_sum_) -
                 0.5 * logdet(llt_w_);
  }

  double score(const Vector& enroll, const Vector& test) const {
    require(enroll.size() == mu_.size() && test.size() == mu_.size(),
            "plda scorer: dimension mismatch");
    const Vector ze = enroll - mu_;
    const Vector zt = test - mu_;
    const Vector u = (ze + zt) / std::numbers::sqrt2;
    const Vector v = (ze - zt) / std::numbers::sqrt2;
    // Grouped so that B = 0 cancels exactly.
    const double quad =
        (u.dot(llt_total_.solve(u)) - u.dot(llt_sum_.solve(u))) +
        (v.dot(llt_total_.solve(v)) - v.dot(llt_w_.solve(v)));
    return 0.5 * quad + log_const_;
  }

 private:
  static double logdet(const Eigen::LLT<Matrix>& llt) {
    return 2.0 *
           llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  Vector mu_;
  Matrix total_;
  Matrix sum_cov_;
  Eigen::LLT<Matrix> llt_total_;
  Eigen::LLT<Matrix> llt_sum_;
  Eigen::LLT<Matrix> llt_w_;
  double log_const_ = 0.0;
};

/// Same-speaker vs different-speaker log-likelihood ratio.
inline double plda_score(const PldaModel& model, const Vector& enroll,
                         const Vector& test) {
  return PldaScorer(model).score(enroll, test);
}

}  // namespace svkit
