// tests/test_augment.cpp

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

#include "svkit/augment.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using svkit::AudioSignal;
using svkit::Rng;

namespace {

AudioSignal random_signal(Rng& rng, int sample_rate, std::size_t n,
                          double amplitude) {
  AudioSignal s;
  s.sample_rate = sample_rate;
  s.samples.resize(n);
  for (auto& v : s.samples) v = amplitude * (2.0 * rng.uniform() - 1.0);
  return s;
}

double mean_power(const std::vector<double>& x, std::size_t begin,
                  std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return acc / static_cast<double>(end - begin);
}

double measured_snr_db(const AudioSignal& mixed, const AudioSignal& speech,
                       std::size_t begin, std::size_t end) {
  double p_speech = mean_power(speech.samples, begin, end);
  std::vector<double> added(end - begin);
  for (std::size_t i = begin; i < end; ++i)
    added[i - begin] = mixed.samples[i] - speech.samples[i];
  double p_added = mean_power(added, 0, added.size());
  return 10.0 * std::log10(p_speech / p_added);
}

}  // namespace

TEST_CASE("reverberation with a unit impulse is the identity", "[augment]") {
  Rng rng(1);
  const AudioSignal speech = random_signal(rng, 16000, 2000, 0.5);
  AudioSignal rir;
  rir.sample_rate = 16000;
  rir.samples = {1.0};
  const AudioSignal out = svkit::reverberate(speech, rir);
  CHECK(out.samples == speech.samples);  // bit-level
}

TEST_CASE("a delayed impulse shifts the signal", "[augment]") {
  Rng rng(2);
  const AudioSignal speech = random_signal(rng, 16000, 500, 0.5);
  AudioSignal rir;
  rir.sample_rate = 16000;
  rir.samples = {0.0, 0.0, 0.0, 1.0};
  const AudioSignal out = svkit::reverberate(speech, rir);
  for (std::size_t i = 0; i < 3; ++i) CHECK(out.samples[i] == 0.0);
  for (std::size_t i = 3; i < out.samples.size(); ++i)
    CHECK(out.samples[i] == speech.samples[i - 3]);
}

TEST_CASE("fft convolution matches the naive convolution oracle",
          "[augment]") {
  Rng rng(3);
  const AudioSignal speech = random_signal(rng, 16000, 1000, 0.4);
  for (std::size_t taps : {64u, 200u}) {
    AudioSignal rir;
    rir.sample_rate = 16000;
    rir.samples.resize(taps);
    for (auto& v : rir.samples) v = 0.02 * (2.0 * rng.uniform() - 1.0);
    rir.samples[0] = 0.5;  // keep the peak below full scale

    const AudioSignal out = svkit::reverberate(speech, rir);

    std::vector<double> naive(speech.samples.size(), 0.0);
    for (std::size_t i = 0; i < speech.samples.size(); ++i)
      for (std::size_t j = 0; j < taps && i + j < naive.size(); ++j)
        naive[i + j] += speech.samples[i] * rir.samples[j];

    double scale = 0.0;
    for (double v : naive) scale = std::max(scale, std::abs(v));
    REQUIRE(scale <= 1.0);  // no renormalization in this configuration
    for (std::size_t i = 0; i < naive.size(); ++i)
      CHECK(std::abs(out.samples[i] - naive[i]) <= 1e-10 * scale);
  }
}

TEST_CASE("reverberation renormalizes only when exceeding full scale",
          "[augment]") {
  AudioSignal speech;
  speech.sample_rate = 16000;
  speech.samples.assign(100, 0.9);
  AudioSignal rir;
  rir.sample_rate = 16000;
  rir.samples = {1.0, 1.0, 1.0};  // gain 3 on the plateau
  const AudioSignal out = svkit::reverberate(speech, rir);
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  CHECK(peak == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("reverberation rejects mismatched sample rates", "[augment]") {
  Rng rng(4);
  const AudioSignal speech = random_signal(rng, 16000, 100, 0.5);
  AudioSignal rir = random_signal(rng, 8000, 10, 0.5);
  CHECK_THROWS_AS(svkit::reverberate(speech, rir), svkit::ParamError);
}

TEST_CASE("mixing at 0 dB makes the scaled noise power equal speech power",
          "[augment]") {
  Rng rng(5);
  const AudioSignal speech = random_signal(rng, 16000, 4000, 0.5);
  const AudioSignal noise = random_signal(rng, 16000, 4000, 0.2);
  const AudioSignal mixed = svkit::mix_at_snr(speech, noise, 0.0);
  std::vector<double> added(speech.samples.size());
  for (std::size_t i = 0; i < added.size(); ++i)
    added[i] = mixed.samples[i] - speech.samples[i];
  const double p_speech = mean_power(speech.samples, 0, added.size());
  const double p_added = mean_power(added, 0, added.size());
  CHECK(p_added == Catch::Approx(p_speech).epsilon(1e-12));
}

TEST_CASE("re-measured SNR matches the request across the working range",
          "[augment]") {
  Rng rng(6);
  const AudioSignal speech = random_signal(rng, 16000, 8000, 0.5);
  const AudioSignal noise = random_signal(rng, 16000, 3000, 0.3);  // tiled
  for (double snr : {-10.0, -3.0, 0.0, 5.0, 10.0, 15.0, 30.0}) {
    const AudioSignal mixed = svkit::mix_at_snr(speech, noise, snr);
    const double measured =
        measured_snr_db(mixed, speech, 0, speech.samples.size());
    CHECK(std::abs(measured - snr) < 1e-6);
  }
}

TEST_CASE("mixing rejects zero-power inputs", "[augment]") {
  Rng rng(7);
  const AudioSignal speech = random_signal(rng, 16000, 100, 0.5);
  AudioSignal silence;
  silence.sample_rate = 16000;
  silence.samples.assign(100, 0.0);
  CHECK_THROWS_AS(svkit::mix_at_snr(speech, silence, 10.0),
                  svkit::ParamError);
  CHECK_THROWS_AS(svkit::mix_at_snr(silence, speech, 10.0),
                  svkit::ParamError);
}

TEST_CASE("interval noise places onsets at whole-second boundaries",
          "[augment]") {
  Rng rng(8);
  const int rate = 8000;
  const AudioSignal speech = random_signal(rng, rate, 28000, 0.5);  // 3.5 s
  AudioSignal snippet = random_signal(rng, rate, 2400, 0.3);        // 0.3 s
  const AudioSignal out =
      svkit::add_interval_noise(speech, {snippet}, 10.0, 1.0, 42);

  const std::vector<std::pair<std::size_t, std::size_t>> segments = {
      {0, 2400}, {8000, 10400}, {16000, 18400}, {24000, 26400}};
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    bool inside = false;
    for (const auto& [b, e] : segments) inside |= (i >= b && i < e);
    if (inside) continue;
    CHECK(out.samples[i] == speech.samples[i]);
  }
  for (const auto& [b, e] : segments) {
    double diff = 0.0;
    for (std::size_t i = b; i < e; ++i)
      diff = std::max(diff, std::abs(out.samples[i] - speech.samples[i]));
    CHECK(diff > 0.0);
  }
}

TEST_CASE("an all-zero noise pool leaves the speech untouched", "[augment]") {
  Rng rng(9);
  const AudioSignal speech = random_signal(rng, 8000, 12000, 0.5);
  AudioSignal silence;
  silence.sample_rate = 8000;
  silence.samples.assign(4000, 0.0);
  const AudioSignal out =
      svkit::add_interval_noise(speech, {silence}, 10.0, 1.0, 7);
  CHECK(out.samples == speech.samples);
}

TEST_CASE("per-segment SNR is honored for a single onset", "[augment]") {
  Rng rng(10);
  const int rate = 8000;
  const AudioSignal speech = random_signal(rng, rate, 6400, 0.5);  // 0.8 s
  const AudioSignal snippet = random_signal(rng, rate, 3200, 0.2);
  const double snr = 7.5;
  const AudioSignal out =
      svkit::add_interval_noise(speech, {snippet}, snr, 1.0, 3);
  // One onset at t = 0 covering the snippet length.
  const double measured = measured_snr_db(out, speech, 0, 3200);
  CHECK(std::abs(measured - snr) < 1e-6);
  for (std::size_t i = 3200; i < out.samples.size(); ++i)
    CHECK(out.samples[i] == speech.samples[i]);
}

TEST_CASE("interval noise is deterministic per seed", "[augment]") {
  Rng rng(11);
  const AudioSignal speech = random_signal(rng, 8000, 20000, 0.5);
  std::vector<AudioSignal> pool;
  for (int i = 0; i < 4; ++i) pool.push_back(random_signal(rng, 8000, 2000, 0.3));
  const AudioSignal a = svkit::add_interval_noise(speech, pool, 5.0, 1.0, 99);
  const AudioSignal b = svkit::add_interval_noise(speech, pool, 5.0, 1.0, 99);
  CHECK(a.samples == b.samples);
  const AudioSignal c = svkit::add_interval_noise(speech, pool, 5.0, 1.0, 100);
  CHECK(a.samples != c.samples);
}

TEST_CASE("interval noise requires a non-empty pool", "[augment]") {
  Rng rng(12);
  const AudioSignal speech = random_signal(rng, 8000, 1000, 0.5);
  CHECK_THROWS_AS(svkit::add_interval_noise(speech, {}, 10.0, 1.0, 0),
                  svkit::ParamError);
}
