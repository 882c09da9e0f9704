// svkit/augment.hpp

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
#include <cstdint>
#include <vector>

#include "svkit/audio.hpp"
#include "svkit/common.hpp"
#include "svkit/frontend.hpp"

namespace svkit {

namespace detail {

// Small kernels convolve directly (exact, keeps impulse responses bit-clean);
// longer ones go through the FFT.
constexpr std::size_t kDirectConvMaxTaps = 16;

inline std::vector<double> convolve_direct(const std::vector<double>& x,
                                           const std::vector<double>& h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += x[i] * h[j];
  return y;
}

inline std::vector<double> convolve_fft(const std::vector<double>& x,
                                        const std::vector<double>& h) {
  const std::size_t out_len = x.size() + h.size() - 1;
  const std::size_t nfft = next_pow2(out_len);
  std::vector<std::complex<double>> a(nfft, {0.0, 0.0});
  std::vector<std::complex<double>> b(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
  for (std::size_t i = 0; i < h.size(); ++i) b[i] = {h[i], 0.0};
  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t i = 0; i < nfft; ++i) a[i] *= b[i];
  fft_radix2(a, true);
  std::vector<double> y(out_len);
  for (std::size_t i = 0; i < out_len; ++i) y[i] = a[i].real();
  return y;
}

inline double mean_power(const std::vector<double>& samples,
                         std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += samples[i] * samples[i];
  return acc / static_cast<double>(end - begin);
}

inline double mean_power(const std::vector<double>& samples) {
  return mean_power(samples, 0, samples.size());
}

}  // namespace detail

/// Trims or cyclically repeats the noise to exactly n samples.
inline std::vector<double> fit_to_length(const std::vector<double>& noise,
                                         std::size_t n) {
  require(!noise.empty(), "augment: empty noise signal");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = noise[i % noise.size()];
  return out;
}

/// Convolves speech with a room impulse response, truncates to the original
/// length, and peak-renormalizes only if the result exceeds full scale.
inline AudioSignal reverberate(const AudioSignal& speech,
                               const AudioSignal& rir) {
  speech.validate();
  rir.validate();
  require(speech.sample_rate == rir.sample_rate,
          "reverberate: sample rate mismatch (", speech.sample_rate, " vs ",
          rir.sample_rate, ")");
  require(!speech.samples.empty() && !rir.samples.empty(),
          "reverberate: empty input");

  std::vector<double> full =
      rir.samples.size() <= detail::kDirectConvMaxTaps
          ? detail::convolve_direct(speech.samples, rir.samples)
          : detail::convolve_fft(speech.samples, rir.samples);
  full.resize(speech.samples.size());

  double peak = 0.0;
  for (double v : full) peak = std::max(peak, std::abs(v));
  if (peak > 1.0)
    for (double& v : full) v /= peak;

  return {std::move(full), speech.sample_rate};
}

/// Adds noise scaled so that 10*log10(P_speech / (g^2 P_noise)) == snr_db,
/// powers measured over the full signals.  The noise is trimmed or repeated
/// to the speech duration first.
inline AudioSignal mix_at_snr(const AudioSignal& speech,
                              const AudioSignal& noise, double snr_db) {
  speech.validate();
  noise.validate();
  require(speech.sample_rate == noise.sample_rate,
          "mix: sample rate mismatch (", speech.sample_rate, " vs ",
          noise.sample_rate, ")");
  require(!speech.samples.empty(), "mix: empty speech");

  const std::vector<double> fitted =
      fit_to_length(noise.samples, speech.samples.size());
  const double p_speech = detail::mean_power(speech.samples);
  const double p_noise = detail::mean_power(fitted);
  require(p_speech > 0.0, "mix: speech has zero power");
  require(p_noise > 0.0, "mix: noise has zero power");

  const double gain =
      std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  AudioSignal out{speech.samples, speech.sample_rate};
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] += gain * fitted[i];
  return out;
}

/// Places one randomly chosen noise snippet at every interval boundary, each
/// scaled to the target SNR against the speech it overlaps.  Segments where
/// either the snippet or the overlapped speech has zero power are left
/// untouched (the SNR is undefined there).
inline AudioSignal add_interval_noise(const AudioSignal& speech,
                                      const std::vector<AudioSignal>& pool,
                                      double snr_db, double interval_s,
                                      std::uint64_t seed) {
  speech.validate();
  require(!pool.empty(), "interval noise: empty noise pool");
  require(interval_s > 0.0, "interval noise: interval must be positive");
  for (const auto& noise : pool) {
    noise.validate();
    require(noise.sample_rate == speech.sample_rate,
            "interval noise: sample rate mismatch");
    require(!noise.samples.empty(), "interval noise: empty pool entry");
  }

  const std::size_t n = speech.samples.size();
  const auto interval = static_cast<std::size_t>(
      std::lround(interval_s * speech.sample_rate));
  require(interval >= 1, "interval noise: interval shorter than one sample");

  Rng rng(seed);
  AudioSignal out{speech.samples, speech.sample_rate};
  for (std::size_t onset = 0; onset < n; onset += interval) {
    const auto& snippet =
        pool[static_cast<std::size_t>(rng.uniform_int(pool.size()))];
    const std::size_t len = std::min(snippet.samples.size(), n - onset);
    const double p_speech = detail::mean_power(speech.samples, onset,
                                               onset + len);
    const double p_noise = detail::mean_power(snippet.samples, 0, len);
    if (p_speech <= 0.0 || p_noise <= 0.0) continue;
    const double gain =
        std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
    for (std::size_t i = 0; i < len; ++i)
      out.samples[onset + i] += gain * snippet.samples[i];
  }
  return out;
}

}  // namespace svkit
