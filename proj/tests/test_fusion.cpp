// tests/test_fusion.cpp

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

#include "svkit/fusion.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "support/test_util.hpp"

using svkit::FusionWeights;
using svkit::Rng;
using svkit::ScoreSet;
using svkit::TrialLabels;
using svkit::Vector;

namespace {

ScoreSet with_scores(const ScoreSet& base, double scale, double shift,
                     double noise, Rng& rng) {
  ScoreSet out;
  for (const auto& e : base.entries())
    out.add(e.enroll, e.test, scale * e.score + shift + noise * rng.gaussian());
  return out;
}

}  // namespace

TEST_CASE("fusing a single system with weight one is the identity",
          "[fusion]") {
  Rng rng(1);
  auto [scores, labels] = test_util::random_trials(rng, 3, 4, 8, 1.0);
  const ScoreSet fused = svkit::fuse({scores}, FusionWeights::equal(1));
  for (const auto& e : scores.entries())
    CHECK(fused.at(e.enroll, e.test) == e.score);
}

TEST_CASE("equal weights over identical systems reproduce the input",
          "[fusion]") {
  Rng rng(2);
  auto [scores, labels] = test_util::random_trials(rng, 3, 4, 8, 1.0);
  const ScoreSet fused =
      svkit::fuse({scores, scores, scores}, FusionWeights::equal(3));
  for (const auto& e : scores.entries())
    CHECK(fused.at(e.enroll, e.test) == Catch::Approx(e.score).epsilon(1e-14));
}

TEST_CASE("weighted fusion matches a per-key loop", "[fusion]") {
  Rng rng(3);
  auto [a, labels] = test_util::random_trials(rng, 4, 3, 10, 1.0);
  const ScoreSet b = with_scores(a, 0.5, 1.0, 0.2, rng);
  const ScoreSet c = with_scores(a, -0.2, 0.0, 0.5, rng);
  FusionWeights w;
  w.weights = Vector(3);
  w.weights << 0.5, 0.3, 0.2;
  const ScoreSet fused = svkit::fuse({a, b, c}, w);
  for (const auto& e : a.entries()) {
    const double expected = 0.5 * a.at(e.enroll, e.test) +
                            0.3 * b.at(e.enroll, e.test) +
                            0.2 * c.at(e.enroll, e.test);
    CHECK(std::abs(fused.at(e.enroll, e.test) - expected) < 1e-12);
  }
}

TEST_CASE("fusion is linear in the input scores", "[fusion]") {
  Rng rng(4);
  auto [a, labels] = test_util::random_trials(rng, 4, 3, 10, 1.0);
  const ScoreSet b = with_scores(a, 1.0, 0.5, 0.3, rng);
  FusionWeights w;
  w.weights = Vector(2);
  w.weights << 0.7, 0.3;
  const ScoreSet fused = svkit::fuse({a, b}, w);
  const ScoreSet a2 = with_scores(a, 3.0, 0.0, 0.0, rng);
  const ScoreSet b2 = with_scores(b, 3.0, 0.0, 0.0, rng);
  const ScoreSet fused2 = svkit::fuse({a2, b2}, w);
  for (const auto& e : fused.entries())
    CHECK(fused2.at(e.enroll, e.test) ==
          Catch::Approx(3.0 * e.score).epsilon(1e-12));
}

TEST_CASE("fusion rejects mismatched trial sets naming the divergent key",
          "[fusion]") {
  ScoreSet a, b;
  a.add("m", "x", 1.0);
  a.add("m", "y", 2.0);
  b.add("m", "x", 1.0);
  b.add("m", "z", 2.0);
  try {
    svkit::fuse({a, b}, FusionWeights::equal(2));
    FAIL("expected an error");
  } catch (const svkit::ParamError& e) {
    CHECK(std::string(e.what()).find("(m, y)") != std::string::npos);
  }
}

TEST_CASE("tuning a single system returns weight one", "[fusion]") {
  Rng rng(5);
  auto [scores, labels] = test_util::random_trials(rng, 4, 3, 10, 2.0);
  const FusionWeights w = svkit::tune_weights({scores}, labels);
  REQUIRE(w.weights.size() == 1);
  CHECK(w.weights[0] == 1.0);
}

TEST_CASE("tuned weights never lose to equal weights on the dev criterion",
          "[fusion]") {
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    auto [informative, labels] =
        test_util::random_trials(rng, 5, 4, 16, 2.5);
    // A pure-noise second system.
    ScoreSet noise;
    for (const auto& e : informative.entries())
      noise.add(e.enroll, e.test, rng.gaussian());

    const std::vector<ScoreSet> systems = {informative, noise};
    const FusionWeights tuned = svkit::tune_weights(systems, labels, 0.05);
    const double tuned_dcf =
        svkit::min_dcf(svkit::fuse(systems, tuned), labels);
    const double equal_dcf = svkit::min_dcf(
        svkit::fuse(systems, FusionWeights::equal(2)), labels);
    CHECK(tuned_dcf <= equal_dcf);
    // The informative system should dominate.
    CHECK(tuned.weights[0] >= 0.5);
  }
}

TEST_CASE("ties between identical systems break toward uniform weights",
          "[fusion]") {
  Rng rng(7);
  auto [scores, labels] = test_util::random_trials(rng, 5, 4, 16, 2.0);
  const FusionWeights w = svkit::tune_weights({scores, scores}, labels, 0.05);
  CHECK(w.weights[0] == 0.5);
  CHECK(w.weights[1] == 0.5);
}

TEST_CASE("tuning supports the EER criterion", "[fusion]") {
  Rng rng(8);
  auto [a, labels] = test_util::random_trials(rng, 5, 4, 16, 2.0);
  ScoreSet noise;
  for (const auto& e : a.entries()) noise.add(e.enroll, e.test, rng.gaussian());
  const FusionWeights w = svkit::tune_weights(
      {a, noise}, labels, 0.1, svkit::FusionCriterion::kEer);
  const double tuned_eer = svkit::eer(svkit::fuse({a, noise}, w), labels);
  const double equal_eer =
      svkit::eer(svkit::fuse({a, noise}, FusionWeights::equal(2)), labels);
  CHECK(tuned_eer <= equal_eer);
}

TEST_CASE("weights always sum to one", "[fusion]") {
  Rng rng(9);
  auto [a, labels] = test_util::random_trials(rng, 4, 3, 12, 1.5);
  const ScoreSet b = with_scores(a, 0.8, 0.1, 0.4, rng);
  const ScoreSet c = with_scores(a, 0.3, -0.2, 0.8, rng);
  const FusionWeights w = svkit::tune_weights({a, b, c}, labels, 0.1);
  CHECK(std::abs(w.weights.sum() - 1.0) < 1e-12);
  CHECK(w.weights.minCoeff() >= 0.0);
}
