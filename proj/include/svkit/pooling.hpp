// svkit/pooling.hpp

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
#include <optional>
#include <string>

#include "svkit/common.hpp"

namespace svkit {

/// Epsilon inside every pooled standard deviation; keeps constant frames
/// differentiable.
constexpr double kPoolEpsilon = 1e-6;

/// Frame-to-segment pooling operators.  The attention variants differ in how
/// the per-frame scores e_t are produced; statistics are always the
/// softmax-weighted mean and standard deviation.
enum class PoolingMode {
  kStats,
  kHighOrder,
  kAttentionLearned,
  kAttentionSplit,
  kAttentionParameterFree,
  kAttentionGated,
};

inline bool pooling_needs_params(PoolingMode mode) {
  return mode == PoolingMode::kAttentionLearned ||
         mode == PoolingMode::kAttentionSplit ||
         mode == PoolingMode::kAttentionGated;
}

inline PoolingMode pooling_mode_from_string(const std::string& name) {
  if (name == "stats") return PoolingMode::kStats;
  if (name == "high-order") return PoolingMode::kHighOrder;
  if (name == "attention:learned") return PoolingMode::kAttentionLearned;
  if (name == "attention:split") return PoolingMode::kAttentionSplit;
  if (name == "attention:parameter-free")
    return PoolingMode::kAttentionParameterFree;
  if (name == "attention:gated") return PoolingMode::kAttentionGated;
  throw ParamError(message("unknown pooling mode '", name, "'"));
}

/// Parameters of the learned attention variants.  The learned and split
/// modes use (w, b, v); the gated mode uses (gate_w, gate_b, gate_u).
struct AttentionParams {
  Matrix w;       // D_a x D_in
  Vector b;       // D_a
  Vector v;       // D_a
  Matrix gate_w;  // D x D
  Vector gate_b;  // D
  Vector gate_u;  // D
};

/// Seeded Gaussian parameters with the right shapes for a mode.
inline AttentionParams random_attention_params(PoolingMode mode,
                                               Eigen::Index dim,
                                               Eigen::Index attn_dim,
                                               std::uint64_t seed) {
  Rng rng(seed);
  AttentionParams params;
  switch (mode) {
    case PoolingMode::kAttentionLearned:
      params.w = rng.gaussian_matrix(attn_dim, dim);
      params.b = rng.gaussian_vector(attn_dim);
      params.v = rng.gaussian_vector(attn_dim);
      break;
    case PoolingMode::kAttentionSplit:
      require(dim % 2 == 0, "split attention: dimension must be even");
      params.w = rng.gaussian_matrix(attn_dim, dim / 2);
      params.b = rng.gaussian_vector(attn_dim);
      params.v = rng.gaussian_vector(attn_dim);
      break;
    case PoolingMode::kAttentionGated:
      params.gate_w = rng.gaussian_matrix(dim, dim);
      params.gate_b = rng.gaussian_vector(dim);
      params.gate_u = rng.gaussian_vector(dim);
      break;
    default:
      break;
  }
  return params;
}

inline Vector softmax(const Vector& scores) {
  const double m = scores.maxCoeff();
  Vector w = (scores.array() - m).exp();
  return w / w.sum();
}

/// Segment mean and standard deviation: output is mu || sigma, length 2D.
inline Vector stats_pool(const Matrix& h) {
  require(h.rows() >= 1, "stats pool: need at least one frame");
  const double t = static_cast<double>(h.rows());
  const Vector mean = h.colwise().mean().transpose();
  const Vector second = h.cwiseProduct(h).colwise().sum().transpose() / t;
  const Vector sd =
      (second - mean.cwiseProduct(mean)).array().max(0.0) + kPoolEpsilon;
  Vector out(2 * h.cols());
  out << mean, sd.cwiseSqrt();
  return out;
}

/// Mean, standard deviation, skewness, and kurtosis per dimension: length 4D.
/// Kurtosis is the plain standardized fourth moment (about 3 for Gaussian
/// frames), not excess.
inline Vector high_order_pool(const Matrix& h) {
  require(h.rows() >= 2, "high-order pool: need at least two frames");
  const Eigen::Index d = h.cols();
  const double t = static_cast<double>(h.rows());
  const Vector mean = h.colwise().mean().transpose();
  const Matrix centered = h.rowwise() - mean.transpose();
  const Vector s2 = centered.array().square().colwise().sum().transpose();
  const Vector s3 = centered.array().cube().colwise().sum().transpose();
  const Vector s4 =
      centered.array().square().square().colwise().sum().transpose();
  const Vector variance = (s2 / t).cwiseMax(0.0);
  const Vector sd = (variance.array() + kPoolEpsilon).sqrt();

  Vector out(4 * d);
  out.segment(0, d) = mean;
  out.segment(d, d) = sd;
  out.segment(2 * d, d) =
      (s3.array() / t / sd.array().pow(3)).matrix();
  out.segment(3 * d, d) =
      (s4.array() / t / sd.array().pow(4)).matrix();
  return out;
}

struct AttentionPooled {
  Vector pooled;   // weighted mu || weighted sigma
  Vector weights;  // T, non-negative, sums to 1
  Vector scores;   // T, pre-softmax
};

namespace detail {

struct AttentionForward {
  Vector scores;   // T
  Vector weights;  // T
  Matrix stats_source;  // T x D_stats (h, its second half, or gated h)
  // Mode scratch reused by the backward pass.
  Matrix tanh_a;   // T x D_a (learned/split)
  Matrix gates;    // T x D (gated)
};

inline void check_attention_params(PoolingMode mode, const Matrix& h,
                                   const AttentionParams* params) {
  if (!pooling_needs_params(mode)) return;
  require(params != nullptr, "attention pool: this mode requires parameters");
  const Eigen::Index d = h.cols();
  if (mode == PoolingMode::kAttentionLearned ||
      mode == PoolingMode::kAttentionSplit) {
    const Eigen::Index d_in =
        mode == PoolingMode::kAttentionSplit ? d / 2 : d;
    if (mode == PoolingMode::kAttentionSplit)
      require(d % 2 == 0, "split attention: feature dimension must be even");
    require(params->w.cols() == d_in && params->w.rows() >= 1,
            "attention pool: W must be D_a x ", d_in);
    require(params->b.size() == params->w.rows(),
            "attention pool: b length mismatch");
    require(params->v.size() == params->w.rows(),
            "attention pool: v length mismatch");
  } else {
    require(params->gate_w.rows() == d && params->gate_w.cols() == d,
            "gated attention: gate_W must be D x D");
    require(params->gate_b.size() == d, "gated attention: gate_b mismatch");
    require(params->gate_u.size() == d, "gated attention: gate_u mismatch");
  }
}

inline AttentionForward attention_forward(const Matrix& h, PoolingMode mode,
                                          const AttentionParams* params) {
  require(h.rows() >= 1, "attention pool: need at least one frame");
  check_attention_params(mode, h, params);
  const Eigen::Index t_count = h.rows();
  const Eigen::Index d = h.cols();

  AttentionForward fwd;
  switch (mode) {
    case PoolingMode::kAttentionLearned: {
      const Matrix pre =
          (h * params->w.transpose()).rowwise() + params->b.transpose();
      fwd.tanh_a = pre.array().tanh();
      fwd.scores = fwd.tanh_a * params->v;
      fwd.stats_source = h;
      break;
    }
    case PoolingMode::kAttentionSplit: {
      const Matrix attn_part = h.leftCols(d / 2);
      const Matrix pre = (attn_part * params->w.transpose()).rowwise() +
                         params->b.transpose();
      fwd.tanh_a = pre.array().tanh();
      fwd.scores = fwd.tanh_a * params->v;
      fwd.stats_source = h.rightCols(d / 2);
      break;
    }
    case PoolingMode::kAttentionParameterFree: {
      fwd.scores = h.rowwise().mean();
      fwd.stats_source = h;
      break;
    }
    case PoolingMode::kAttentionGated: {
      const Matrix pre = (h * params->gate_w.transpose()).rowwise() +
                         params->gate_b.transpose();
      fwd.gates = (1.0 / (1.0 + (-pre.array()).exp())).matrix();
      fwd.stats_source = h.cwiseProduct(fwd.gates);
      fwd.scores = fwd.gates * params->gate_u;
      break;
    }
    default:
      throw ParamError("attention pool: not an attention mode");
  }
  fwd.weights = softmax(fwd.scores);
  (void)t_count;
  return fwd;
}

inline Vector weighted_stats(const Matrix& x, const Vector& weights) {
  const Vector mean = x.transpose() * weights;
  const Vector second = x.cwiseProduct(x).transpose() * weights;
  const Vector variance =
      (second - mean.cwiseProduct(mean)).cwiseMax(0.0);
  Vector out(2 * x.cols());
  out << mean, (variance.array() + kPoolEpsilon).sqrt().matrix();
  return out;
}

}  // namespace detail

/// Attentive statistics pooling.  Scores per mode:
///   learned:        e_t = v' tanh(W h_t + b)
///   split:          same, applied to the first half of each frame; the
///                   statistics use the second half
///   parameter_free: e_t = mean over dimensions of h_t
///   gated:          g_t = sigmoid(gate_W h_t + gate_b), stats over h_t * g_t,
///                   e_t = gate_u' g_t
inline AttentionPooled attention_pool(const Matrix& h, PoolingMode mode,
                                      const AttentionParams* params = nullptr) {
  const auto fwd = detail::attention_forward(h, mode, params);
  return {detail::weighted_stats(fwd.stats_source, fwd.weights), fwd.weights,
          fwd.scores};
}

/// Forward dispatch across every pooling flavor.
inline Vector pool_forward(const Matrix& h, PoolingMode mode,
                           const AttentionParams* params = nullptr) {
  switch (mode) {
    case PoolingMode::kStats:
      return stats_pool(h);
    case PoolingMode::kHighOrder:
      return high_order_pool(h);
    default:
      return attention_pool(h, mode, params).pooled;
  }
}

/// Gradients of pool_forward with respect to the frames and, where present,
/// the attention parameters.
struct PoolGradients {
  Matrix dh;
  AttentionParams dparams;
  bool has_param_grads = false;
};

inline PoolGradients pool_backward(const Matrix& h, PoolingMode mode,
                                   const AttentionParams* params,
                                   const Vector& upstream) {
  const Eigen::Index t_count = h.rows();
  const Eigen::Index d = h.cols();
  const double t = static_cast<double>(t_count);
  PoolGradients grads;
  grads.dh = Matrix::Zero(t_count, d);

  if (mode == PoolingMode::kStats) {
    require(upstream.size() == 2 * d, "pool backward: upstream must be 2D");
    const Vector out = stats_pool(h);
    const Vector mean = out.segment(0, d);
    const Vector sd = out.segment(d, d);
    const Vector g_mean = upstream.segment(0, d);
    const Vector g_sd = upstream.segment(d, d);
    for (Eigen::Index i = 0; i < t_count; ++i)
      grads.dh.row(i) =
          (g_mean / t +
           g_sd.cwiseProduct(
               (h.row(i).transpose() - mean).cwiseQuotient(t * sd)))
              .transpose();
    return grads;
  }

  if (mode == PoolingMode::kHighOrder) {
    require(upstream.size() == 4 * d, "pool backward: upstream must be 4D");
    require(t_count >= 2, "pool backward: need at least two frames");
    const Vector mean = h.colwise().mean().transpose();
    const Matrix centered = h.rowwise() - mean.transpose();
    const Vector s2 = centered.array().square().colwise().sum().transpose();
    const Vector s3 = centered.array().cube().colwise().sum().transpose();
    const Vector s4 =
        centered.array().square().square().colwise().sum().transpose();
    const Vector sd = ((s2 / t).array() + kPoolEpsilon).sqrt();

    const Vector g_mean = upstream.segment(0, d);
    const Vector g_sd = upstream.segment(d, d);
    const Vector g_skew = upstream.segment(2 * d, d);
    const Vector g_kurt = upstream.segment(3 * d, d);

    for (Eigen::Index i = 0; i < t_count; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double c = centered(i, j);
        const double s = sd[j];
        double g = g_mean[j] / t;
        g += g_sd[j] * c / (t * s);
        g += g_skew[j] * ((3.0 * c * c - 3.0 * s2[j] / t) / (t * s * s * s) -
                          3.0 * s3[j] * c / (t * t * std::pow(s, 5)));
        g += g_kurt[j] *
             ((4.0 * c * c * c - 4.0 * s3[j] / t) / (t * std::pow(s, 4)) -
              4.0 * s4[j] * c / (t * t * std::pow(s, 6)));
        grads.dh(i, j) = g;
      }
    }
    return grads;
  }

  // Attention modes.
  const auto fwd = detail::attention_forward(h, mode, params);
  const Matrix& x = fwd.stats_source;
  const Eigen::Index d_stats = x.cols();
  require(upstream.size() == 2 * d_stats,
          "pool backward: upstream must be twice the statistics dimension");

  const Vector mean = x.transpose() * fwd.weights;
  const Vector second = x.cwiseProduct(x).transpose() * fwd.weights;
  const Vector sd = ((second - mean.cwiseProduct(mean)).cwiseMax(0.0).array() +
                     kPoolEpsilon)
                        .sqrt();
  const Vector g_mean_up = upstream.segment(0, d_stats);
  const Vector g_sd_up = upstream.segment(d_stats, d_stats);

  const Vector g_second = g_sd_up.cwiseQuotient(2.0 * sd);
  const Vector g_mean_total =
      g_mean_up - g_sd_up.cwiseProduct(mean).cwiseQuotient(sd);

  // d(out)/d(w_t) and the direct statistics-path gradient on x.
  Vector q(t_count);
  Matrix gx(t_count, d_stats);
  for (Eigen::Index i = 0; i < t_count; ++i) {
    const Vector xi = x.row(i).transpose();
    q[i] = g_mean_total.dot(xi) + g_second.dot(xi.cwiseProduct(xi));
    gx.row(i) = fwd.weights[i] *
                (g_mean_total + 2.0 * g_second.cwiseProduct(xi)).transpose();
  }
  const double q_bar = fwd.weights.dot(q);
  const Vector g_scores =
      fwd.weights.cwiseProduct(q - Vector::Constant(t_count, q_bar));

  switch (mode) {
    case PoolingMode::kAttentionLearned:
    case PoolingMode::kAttentionSplit: {
      const Eigen::Index d_in =
          mode == PoolingMode::kAttentionSplit ? d / 2 : d;
      const Matrix attn_input =
          mode == PoolingMode::kAttentionSplit ? Matrix(h.leftCols(d_in))
                                               : h;
      grads.dparams.w = Matrix::Zero(params->w.rows(), params->w.cols());
      grads.dparams.b = Vector::Zero(params->b.size());
      grads.dparams.v = Vector::Zero(params->v.size());
      grads.has_param_grads = true;
      for (Eigen::Index i = 0; i < t_count; ++i) {
        const Vector tanh_i = fwd.tanh_a.row(i).transpose();
        grads.dparams.v += g_scores[i] * tanh_i;
        const Vector g_pre =
            g_scores[i] *
            params->v.cwiseProduct(
                (1.0 - tanh_i.array().square()).matrix());
        grads.dparams.w += g_pre * attn_input.row(i);
        grads.dparams.b += g_pre;
        const Vector g_attn_input = params->w.transpose() * g_pre;
        if (mode == PoolingMode::kAttentionSplit) {
          grads.dh.row(i).segment(0, d_in) += g_attn_input.transpose();
          grads.dh.row(i).segment(d_in, d_in) += gx.row(i);
        } else {
          grads.dh.row(i) += g_attn_input.transpose() + gx.row(i);
        }
      }
      break;
    }
    case PoolingMode::kAttentionParameterFree: {
      for (Eigen::Index i = 0; i < t_count; ++i)
        grads.dh.row(i) =
            gx.row(i).array() + g_scores[i] / static_cast<double>(d);
      break;
    }
    case PoolingMode::kAttentionGated: {
      grads.dparams.gate_w =
          Matrix::Zero(params->gate_w.rows(), params->gate_w.cols());
      grads.dparams.gate_b = Vector::Zero(params->gate_b.size());
      grads.dparams.gate_u = Vector::Zero(params->gate_u.size());
      grads.has_param_grads = true;
      for (Eigen::Index i = 0; i < t_count; ++i) {
        const Vector gate_i = fwd.gates.row(i).transpose();
        const Vector hi = h.row(i).transpose();
        Vector g_gate = gx.row(i).transpose().cwiseProduct(hi);
        g_gate += g_scores[i] * params->gate_u;
        grads.dparams.gate_u += g_scores[i] * gate_i;
        const Vector g_pre = g_gate.cwiseProduct(gate_i).cwiseProduct(
            (1.0 - gate_i.array()).matrix());
        grads.dparams.gate_w += g_pre * h.row(i);
        grads.dparams.gate_b += g_pre;
        grads.dh.row(i) +=
            (gx.row(i).transpose().cwiseProduct(gate_i) +
             params->gate_w.transpose() * g_pre)
                .transpose();
      }
      break;
    }
    default:
      throw ParamError("pool backward: unsupported mode");
  }
  return grads;
}

/// Weighted sum of the classification and reconstruction losses.
inline double combine_multitask_loss(double ce, double mse, double w_ce = 0.7,
                                     double w_mse = 0.3) {
  require(w_ce >= 0.0 && w_mse >= 0.0,
          "multitask loss: weights must be non-negative");
  return w_ce * ce + w_mse * mse;
}

}  // namespace svkit
