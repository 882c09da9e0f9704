// svkit/frontend.hpp

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

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "svkit/audio.hpp"
#include "svkit/common.hpp"

namespace svkit {

/// T frames by D coefficients, one row per frame.
struct FeatureMatrix {
  Matrix frames;             // T x D
  double frame_shift = 0.01;  // seconds
  std::string meta;

  Eigen::Index num_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

struct VadMask {
  std::vector<bool> keep;
  std::size_t num_kept() const {
    std::size_t n = 0;
    for (bool k : keep) n += k ? 1 : 0;
    return n;
  }
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 complex FFT; size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  require(n > 0 && (n & (n - 1)) == 0, "fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI /
                       static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

}  // namespace detail

/// Slices a signal into overlapping frames: frame t covers samples
/// [t*hop, t*hop + window).  Signals shorter than one window yield T = 0.
inline Matrix frame_signal(const AudioSignal& signal, double win_s,
                           double hop_s) {
  require(hop_s > 0.0 && win_s > 0.0, "framing: window and hop must be positive");
  require(win_s >= hop_s, "framing: window must be at least the hop");
  signal.validate();
  const auto window =
      static_cast<Eigen::Index>(std::lround(win_s * signal.sample_rate));
  const auto hop =
      static_cast<Eigen::Index>(std::lround(hop_s * signal.sample_rate));
  require(window >= 1 && hop >= 1, "framing: window shorter than one sample");

  const auto n = static_cast<Eigen::Index>(signal.samples.size());
  const Eigen::Index t = n < window ? 0 : (n - window) / hop + 1;
  Matrix frames(t, window);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < window; ++j)
      frames(i, j) = signal.samples[static_cast<std::size_t>(i * hop + j)];
  return frames;
}

enum class WindowKind { kHamming, kHann, kRectangular };

struct MfccConfig {
  double win_s = 0.025;
  double hop_s = 0.010;
  int n_mels = 30;
  double fmin = 20.0;
  double fmax = 7600.0;
  int n_ceps = 30;
  bool include_c0 = true;
  double preemphasis = 0.97;
  WindowKind window = WindowKind::kHamming;
  double log_floor = 1e-10;
};

/// Triangular mel-scale filterbank over FFT bins [0, nfft/2].
class MelFilterbank {
 public:
  static double hz_to_mel(double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
  }
  static double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  }

  MelFilterbank(int n_mels, std::size_t nfft, int sample_rate, double fmin,
                double fmax)
      : weights_(n_mels, static_cast<Eigen::Index>(nfft / 2 + 1)),
        centers_(n_mels) {
    require(n_mels >= 1, "filterbank: need at least one filter");
    require(fmin >= 0.0 && fmin < fmax, "filterbank: need 0 <= fmin < fmax");
    require(fmax <= sample_rate / 2.0 + 1e-9,
            "filterbank: fmax ", fmax, " Hz exceeds Nyquist ",
            sample_rate / 2.0, " Hz");
    const double mel_lo = hz_to_mel(fmin);
    const double mel_hi = hz_to_mel(fmax);
    std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
      edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                        static_cast<double>(n_mels + 1));
    for (int m = 0; m < n_mels; ++m)
      centers_[m] = edges[static_cast<std::size_t>(m) + 1];

    weights_.setZero();
    const double bin_hz =
        static_cast<double>(sample_rate) / static_cast<double>(nfft);
    for (int m = 0; m < n_mels; ++m) {
      const double left = edges[static_cast<std::size_t>(m)];
      const double center = edges[static_cast<std::size_t>(m) + 1];
      const double right = edges[static_cast<std::size_t>(m) + 2];
      for (Eigen::Index b = 0; b < weights_.cols(); ++b) {
        const double f = bin_hz * static_cast<double>(b);
        double w = 0.0;
        if (f > left && f < center)
          w = (f - left) / (center - left);
        else if (f >= center && f < right)
          w = (right - f) / (right - center);
        weights_(m, b) = w;
      }
    }
  }

  const Matrix& weights() const { return weights_; }
  double center_freq(int m) const { return centers_[m]; }

  Vector apply(const Vector& power_spectrum) const {
    return weights_ * power_spectrum;
  }

 private:
  Matrix weights_;  // n_mels x (nfft/2 + 1)
  Vector centers_;
};

namespace detail {

inline Vector window_function(WindowKind kind, Eigen::Index n) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = 2.0 * M_PI * static_cast<double>(i) /
                     static_cast<double>(n - 1);
    switch (kind) {
      case WindowKind::kHamming:
        w[i] = 0.54 - 0.46 * std::cos(x);
        break;
      case WindowKind::kHann:
        w[i] = 0.5 - 0.5 * std::cos(x);
        break;
      case WindowKind::kRectangular:
        w[i] = 1.0;
        break;
    }
  }
  return w;
}

// Per-frame pre-emphasis, Kaldi-style: x[0] is damped against itself.
inline void preemphasize(Vector& frame, double coeff) {
  if (coeff == 0.0) return;
  for (Eigen::Index i = frame.size() - 1; i > 0; --i)
    frame[i] -= coeff * frame[i - 1];
  frame[0] -= coeff * frame[0];
}

inline Vector power_spectrum(const Vector& frame, std::size_t nfft) {
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (Eigen::Index i = 0; i < frame.size(); ++i)
    buf[static_cast<std::size_t>(i)] = {frame[i], 0.0};
  fft_radix2(buf, false);
  Vector power(static_cast<Eigen::Index>(nfft / 2 + 1));
  for (Eigen::Index b = 0; b < power.size(); ++b)
    power[b] = std::norm(buf[static_cast<std::size_t>(b)]);
  return power;
}

// Orthonormal DCT-II matrix (rows = coefficients).
inline Matrix dct_matrix(int n_coeffs, int n_inputs) {
  Matrix dct(n_coeffs, n_inputs);
  const double norm0 = std::sqrt(1.0 / n_inputs);
  const double norm = std::sqrt(2.0 / n_inputs);
  for (int k = 0; k < n_coeffs; ++k)
    for (int m = 0; m < n_inputs; ++m)
      dct(k, m) = (k == 0 ? norm0 : norm) *
                  std::cos(M_PI * k * (2.0 * m + 1.0) / (2.0 * n_inputs));
  return dct;
}

}  // namespace detail

/// Pre-emphasized, windowed, FFT'd mel filterbank energies: T x n_mels.
inline Matrix mel_energies(const AudioSignal& signal, const MfccConfig& cfg) {
  require(cfg.n_mels >= 1, "mfcc: n_mels must be positive");
  Matrix frames = frame_signal(signal, cfg.win_s, cfg.hop_s);
  const auto window_samples = frames.cols();
  const std::size_t nfft =
      detail::next_pow2(static_cast<std::size_t>(window_samples));
  const Vector window = detail::window_function(cfg.window, window_samples);
  const MelFilterbank bank(cfg.n_mels, nfft, signal.sample_rate, cfg.fmin,
                           cfg.fmax);

  Matrix energies(frames.rows(), cfg.n_mels);
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    Vector frame = frames.row(t).transpose();
    detail::preemphasize(frame, cfg.preemphasis);
    frame.array() *= window.array();
    energies.row(t) =
        bank.apply(detail::power_spectrum(frame, nfft)).transpose();
  }
  return energies;
}

/// MFCC pipeline: pre-emphasis, window, power spectrum, mel filterbank,
/// floored log, DCT-II.  Output rows are n_ceps wide; with include_c0 the
/// first coefficient is c0 (a log-energy proxy), otherwise coefficients
/// start at c1.
inline FeatureMatrix mfcc(const AudioSignal& signal, const MfccConfig& cfg) {
  require(cfg.n_ceps >= 1, "mfcc: n_ceps must be positive");
  require(cfg.n_ceps + (cfg.include_c0 ? 0 : 1) <= cfg.n_mels,
          "mfcc: n_ceps (", cfg.n_ceps, ") too large for ", cfg.n_mels,
          " mel filters");
  Matrix energies = mel_energies(signal, cfg);
  const Matrix log_energies =
      energies.array().max(cfg.log_floor).log().matrix();

  const int first = cfg.include_c0 ? 0 : 1;
  const Matrix dct = detail::dct_matrix(first + cfg.n_ceps, cfg.n_mels)
                         .bottomRows(cfg.n_ceps);

  FeatureMatrix features;
  features.frames = log_energies * dct.transpose();
  features.frame_shift = cfg.hop_s;
  features.meta = message("mfcc:n_ceps=", cfg.n_ceps,
                          ",c0=", cfg.include_c0 ? 1 : 0);
  return features;
}

/// Appends delta (and delta-delta) features computed by the standard
/// regression formula over +-context frames with edge replication.
inline FeatureMatrix add_deltas(const FeatureMatrix& features, int order,
                                int context = 2) {
  require(order == 1 || order == 2, "deltas: order must be 1 or 2");
  require(context >= 1, "deltas: context must be positive");
  require(features.num_frames() >= 1, "deltas: need at least one frame");

  const Eigen::Index t_count = features.num_frames();
  const Eigen::Index d = features.dim();
  double denom = 0.0;
  for (int i = 1; i <= context; ++i) denom += 2.0 * i * i;

  auto regress = [&](const Matrix& source) {
    Matrix out(t_count, d);
    for (Eigen::Index t = 0; t < t_count; ++t) {
      Vector acc = Vector::Zero(d);
      for (int i = 1; i <= context; ++i) {
        const Eigen::Index hi = std::min<Eigen::Index>(t + i, t_count - 1);
        const Eigen::Index lo = std::max<Eigen::Index>(t - i, 0);
        acc += static_cast<double>(i) *
               (source.row(hi) - source.row(lo)).transpose();
      }
      out.row(t) = (acc / denom).transpose();
    }
    return out;
  };

  const Matrix delta = regress(features.frames);
  FeatureMatrix out;
  out.frame_shift = features.frame_shift;
  out.meta = features.meta + message(",deltas=", order);
  if (order == 1) {
    out.frames.resize(t_count, 2 * d);
    out.frames << features.frames, delta;
  } else {
    const Matrix delta2 = regress(delta);
    out.frames.resize(t_count, 3 * d);
    out.frames << features.frames, delta, delta2;
  }
  return out;
}

/// Subtracts, per dimension, the mean of a centered edge-truncated sliding
/// window (window length in seconds, converted via the frame shift).
inline FeatureMatrix sliding_cmn(const FeatureMatrix& features,
                                 double window_s) {
  require(window_s > 0.0, "cmn: window must be positive");
  const auto window = static_cast<Eigen::Index>(
      std::lround(window_s / features.frame_shift));
  require(window >= 1, "cmn: window shorter than one frame");

  const Eigen::Index t_count = features.num_frames();
  const Eigen::Index d = features.dim();
  FeatureMatrix out;
  out.frame_shift = features.frame_shift;
  out.meta = features.meta + ",cmn";
  out.frames.resize(t_count, d);
  if (t_count == 0) return out;

  // Prefix sums over frames: prefix.row(t) = sum of rows [0, t).
  Matrix prefix = Matrix::Zero(t_count + 1, d);
  for (Eigen::Index t = 0; t < t_count; ++t)
    prefix.row(t + 1) = prefix.row(t) + features.frames.row(t);

  const Eigen::Index left = (window - 1) / 2;
  for (Eigen::Index t = 0; t < t_count; ++t) {
    const Eigen::Index begin = std::max<Eigen::Index>(0, t - left);
    const Eigen::Index end = std::min<Eigen::Index>(t_count, t - left + window);
    const auto mean = (prefix.row(end) - prefix.row(begin)) /
                      static_cast<double>(end - begin);
    out.frames.row(t) = features.frames.row(t) - mean;
  }
  return out;
}

/// Energy VAD over feature column 0 (c0 / log-energy): keep frames whose
/// log-energy exceeds the utterance mean plus the offset.
inline VadMask energy_vad(const FeatureMatrix& features,
                          double threshold_offset = -1.3) {
  VadMask mask;
  const Eigen::Index t_count = features.num_frames();
  mask.keep.resize(static_cast<std::size_t>(t_count));
  if (t_count == 0) return mask;
  require(features.dim() >= 1, "vad: empty feature dimension");
  const double mean = features.frames.col(0).mean();
  for (Eigen::Index t = 0; t < t_count; ++t)
    mask.keep[static_cast<std::size_t>(t)] =
        features.frames(t, 0) > mean + threshold_offset;
  return mask;
}

/// Drops masked-out frames.
inline FeatureMatrix apply_vad(const FeatureMatrix& features,
                               const VadMask& mask) {
  require(static_cast<Eigen::Index>(mask.keep.size()) ==
              features.num_frames(),
          "vad: mask length ", mask.keep.size(), " does not match ",
          features.num_frames(), " frames");
  FeatureMatrix out;
  out.frame_shift = features.frame_shift;
  out.meta = features.meta + ",vad";
  out.frames.resize(static_cast<Eigen::Index>(mask.num_kept()),
                    features.dim());
  Eigen::Index row = 0;
  for (Eigen::Index t = 0; t < features.num_frames(); ++t)
    if (mask.keep[static_cast<std::size_t>(t)])
      out.frames.row(row++) = features.frames.row(t);
  return out;
}

/// Standard front-end chain: MFCC, deltas, sliding CMN, then frame dropping
/// by an energy VAD computed on the raw cepstra.
struct FeaturePipeline {
  MfccConfig mfcc;
  int delta_order = 2;      // 0 disables
  int delta_context = 2;
  double cmn_window_s = 3.0;  // <= 0 disables
  bool vad = true;
  double vad_threshold_offset = -1.3;
};

inline FeatureMatrix extract_features(const AudioSignal& signal,
                                      const FeaturePipeline& pipeline) {
  FeatureMatrix base = mfcc(signal, pipeline.mfcc);
  const VadMask mask = pipeline.vad
                           ? energy_vad(base, pipeline.vad_threshold_offset)
                           : VadMask{std::vector<bool>(
                                 static_cast<std::size_t>(base.num_frames()),
                                 true)};
  FeatureMatrix features = std::move(base);
  if (pipeline.delta_order > 0)
    features = add_deltas(features, pipeline.delta_order,
                          pipeline.delta_context);
  if (pipeline.cmn_window_s > 0.0)
    features = sliding_cmn(features, pipeline.cmn_window_s);
  return apply_vad(features, mask);
}

}  // namespace svkit
