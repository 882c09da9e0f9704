// svkit/scores.hpp

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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svkit/common.hpp"

namespace svkit {

/// (enroll_id, test_id).
using TrialKey = std::pair<std::string, std::string>;

struct ScoreEntry {
  std::string enroll;
  std::string test;
  double score;
};

/// Real-valued scores keyed by trial.  Keys are unique; insertion order is
/// preserved so that score files round-trip.
class ScoreSet {
 public:
  void add(std::string enroll, std::string test, double score) {
    require(std::isfinite(score), "non-finite score for trial (", enroll, ", ",
            test, ")");
    TrialKey key{enroll, test};
    auto [it, inserted] = index_.emplace(std::move(key), entries_.size());
    if (!inserted)
      throw ParamError(
          message("duplicate trial (", enroll, ", ", test, ")"));
    entries_.push_back({std::move(enroll), std::move(test), score});
  }

  bool contains(const std::string& enroll, const std::string& test) const {
    return index_.count({enroll, test}) != 0;
  }

  double at(const std::string& enroll, const std::string& test) const {
    auto it = index_.find({enroll, test});
    if (it == index_.end())
      throw Error(message("missing score for trial (", enroll, ", ", test,
                          ")"));
    return entries_[it->second].score;
  }

  const std::vector<ScoreEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// True when both sets score exactly the same trial keys.  On mismatch,
  /// *first_divergent (if given) names the first key, in sorted order, that is
  /// present in exactly one of the two sets.
  bool same_keys(const ScoreSet& other, TrialKey* first_divergent = nullptr) const {
    auto a = index_.begin();
    auto b = other.index_.begin();
    while (a != index_.end() && b != other.index_.end()) {
      if (a->first != b->first) {
        if (first_divergent)
          *first_divergent = std::min(a->first, b->first);
        return false;
      }
      ++a;
      ++b;
    }
    if (a != index_.end() || b != other.index_.end()) {
      if (first_divergent)
        *first_divergent = (a != index_.end()) ? a->first : b->first;
      return false;
    }
    return true;
  }

 private:
  std::vector<ScoreEntry> entries_;
  std::map<TrialKey, std::size_t> index_;
};

struct TrialEntry {
  std::string enroll;
  std::string test;
  std::optional<bool> target;  // empty for unlabeled trial lists
};

/// Rows of (enroll, test[, label]) with unique keys, in file order.
class TrialList {
 public:
  void add(std::string enroll, std::string test,
           std::optional<bool> target = std::nullopt) {
    TrialKey key{enroll, test};
    auto [it, inserted] = index_.emplace(std::move(key), entries_.size());
    if (!inserted)
      throw ParamError(message("duplicate trial (", enroll, ", ", test, ")"));
    entries_.push_back({std::move(enroll), std::move(test), target});
  }

  const std::vector<TrialEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<TrialEntry> entries_;
  std::map<TrialKey, std::size_t> index_;
};

/// Ground-truth target/nontarget labels per trial.
class TrialLabels {
 public:
  static TrialLabels from_trials(const TrialList& trials) {
    TrialLabels labels;
    for (const auto& e : trials.entries()) {
      require(e.target.has_value(), "trial (", e.enroll, ", ", e.test,
              ") has no label");
      labels.add(e.enroll, e.test, *e.target);
    }
    return labels;
  }

  void add(const std::string& enroll, const std::string& test, bool target) {
    auto [it, inserted] = entries_.emplace(TrialKey{enroll, test}, target);
    if (!inserted)
      throw ParamError(message("duplicate trial (", enroll, ", ", test, ")"));
    if (target)
      ++num_targets_;
    else
      ++num_nontargets_;
  }

  bool target(const std::string& enroll, const std::string& test) const {
    auto it = entries_.find({enroll, test});
    if (it == entries_.end())
      throw Error(message("missing label for trial (", enroll, ", ", test,
                          ")"));
    return it->second;
  }

  const std::map<TrialKey, bool>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t num_targets() const { return num_targets_; }
  std::size_t num_nontargets() const { return num_nontargets_; }

 private:
  std::map<TrialKey, bool> entries_;
  std::size_t num_targets_ = 0;
  std::size_t num_nontargets_ = 0;
};

}  // namespace svkit
