// svkit/io.hpp

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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "svkit/backend.hpp"
#include "svkit/common.hpp"
#include "svkit/frontend.hpp"
#include "svkit/ivector.hpp"
#include "svkit/mixtures.hpp"
#include "svkit/scores.hpp"

namespace svkit {

// ---------------------------------------------------------------------------
// Little-endian binary primitives.  All toolkit binary formats are built from
// these; on read, truncation raises a FormatError with the byte offset.
// ---------------------------------------------------------------------------
namespace bin {

inline void fail_at(std::istream& is, const std::string& what) {
  throw FormatError(message(what, " at byte ",
                            static_cast<long long>(is.tellg())));
}

template <typename T>
void write_raw(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is, const char* what) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) fail_at(is, message("truncated ", what));
  return value;
}

inline void write_u32(std::ostream& os, std::uint32_t v) { write_raw(os, v); }
inline void write_u64(std::ostream& os, std::uint64_t v) { write_raw(os, v); }
inline void write_f32(std::ostream& os, float v) { write_raw(os, v); }
inline void write_f64(std::ostream& os, double v) { write_raw(os, v); }
inline std::uint32_t read_u32(std::istream& is, const char* what = "u32") {
  return read_raw<std::uint32_t>(is, what);
}
inline std::uint64_t read_u64(std::istream& is, const char* what = "u64") {
  return read_raw<std::uint64_t>(is, what);
}
inline float read_f32(std::istream& is, const char* what = "f32") {
  return read_raw<float>(is, what);
}
inline double read_f64(std::istream& is, const char* what = "f64") {
  return read_raw<double>(is, what);
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  const std::uint32_t n = read_u32(is, "string length");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) fail_at(is, "truncated string");
  return s;
}

inline void write_magic(std::ostream& os, const char magic[4],
                        std::uint32_t version) {
  os.write(magic, 4);
  write_u32(os, version);
}

inline void expect_magic(std::istream& is, const char magic[4],
                         std::uint32_t version, const std::string& kind) {
  char got[4];
  is.read(got, 4);
  if (!is || std::memcmp(got, magic, 4) != 0)
    throw FormatError(message("not a ", kind, " file (bad magic)"));
  const std::uint32_t v = read_u32(is, "version");
  if (v != version)
    throw FormatError(
        message(kind, ": unsupported version ", v, " (expected ", version,
                ")"));
}

inline void write_vector_f64(std::ostream& os, const Vector& v) {
  write_u64(os, static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(os, v[i]);
}

inline Vector read_vector_f64(std::istream& is) {
  const auto n = static_cast<Eigen::Index>(read_u64(is, "vector size"));
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = read_f64(is);
  return v;
}

inline void write_matrix_f64(std::ostream& os, const Matrix& m) {
  write_u64(os, static_cast<std::uint64_t>(m.rows()));
  write_u64(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(os, m(r, c));
}

inline Matrix read_matrix_f64(std::istream& is) {
  const auto rows = static_cast<Eigen::Index>(read_u64(is, "matrix rows"));
  const auto cols = static_cast<Eigen::Index>(read_u64(is, "matrix cols"));
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_f64(is);
  return m;
}

}  // namespace bin

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(message("cannot write '", path, "'"));
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(message("cannot open '", path, "'"));
  return is;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Embedding archive: magic VVEC, version, count, dim; records of (id,
// little-endian IEEE-754 float32 vector).
// ---------------------------------------------------------------------------

struct EmbeddingArchive {
  std::vector<std::string> ids;
  Matrix vectors;  // count x dim (float32 values held as doubles)
};

inline void write_embedding_archive(std::ostream& os,
                                    const std::vector<std::string>& ids,
                                    const Matrix& vectors) {
  require(static_cast<Eigen::Index>(ids.size()) == vectors.rows(),
          "embedding archive: id/vector count mismatch");
  bin::write_magic(os, "VVEC", 1);
  bin::write_u64(os, ids.size());
  bin::write_u32(os, static_cast<std::uint32_t>(vectors.cols()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    bin::write_string(os, ids[i]);
    for (Eigen::Index j = 0; j < vectors.cols(); ++j)
      bin::write_f32(os,
                     static_cast<float>(vectors(static_cast<Eigen::Index>(i),
                                                j)));
  }
}

inline EmbeddingArchive read_embedding_archive(std::istream& is) {
  bin::expect_magic(is, "VVEC", 1, "embedding archive");
  const auto count = static_cast<Eigen::Index>(bin::read_u64(is, "count"));
  const auto dim = static_cast<Eigen::Index>(bin::read_u32(is, "dim"));
  EmbeddingArchive archive;
  archive.vectors.resize(count, dim);
  std::set<std::string> seen;
  for (Eigen::Index i = 0; i < count; ++i) {
    std::string id = bin::read_string(is);
    if (!seen.insert(id).second)
      throw FormatError(message("embedding archive: duplicate id '", id, "'"));
    archive.ids.push_back(std::move(id));
    for (Eigen::Index j = 0; j < dim; ++j)
      archive.vectors(i, j) = static_cast<double>(bin::read_f32(is));
  }
  return archive;
}

inline void write_embedding_archive(const std::string& path,
                                    const std::vector<std::string>& ids,
                                    const Matrix& vectors) {
  auto os = detail::open_out(path);
  write_embedding_archive(os, ids, vectors);
}

inline EmbeddingArchive read_embedding_archive(const std::string& path) {
  auto is = detail::open_in(path);
  return read_embedding_archive(is);
}

/// Default speaker labeling for archives without a speaker map: everything
/// before the first '-' of the utterance id.
inline std::string speaker_from_id(const std::string& id) {
  const auto dash = id.find('-');
  return dash == std::string::npos ? id : id.substr(0, dash);
}

inline EmbeddingSet to_embedding_set(
    const EmbeddingArchive& archive,
    const std::map<std::string, std::string>* utt2spk = nullptr) {
  EmbeddingSet set;
  set.vectors = archive.vectors;
  for (const auto& id : archive.ids) {
    std::string speaker;
    if (utt2spk) {
      const auto it = utt2spk->find(id);
      if (it == utt2spk->end())
        throw Error(message("no speaker mapping for utterance '", id, "'"));
      speaker = it->second;
    } else {
      speaker = speaker_from_id(id);
    }
    set.speaker_label.push_back(std::move(speaker));
    set.utterance_id.push_back(id);
  }
  set.validate();
  return set;
}

// ---------------------------------------------------------------------------
// Feature archive: magic VFEA; records of (id, T, D, frame_shift, float32
// row-major frames).
// ---------------------------------------------------------------------------

inline void write_feature_archive(
    std::ostream& os,
    const std::vector<std::pair<std::string, FeatureMatrix>>& features) {
  bin::write_magic(os, "VFEA", 1);
  bin::write_u64(os, features.size());
  for (const auto& [id, feat] : features) {
    bin::write_string(os, id);
    bin::write_u32(os, static_cast<std::uint32_t>(feat.num_frames()));
    bin::write_u32(os, static_cast<std::uint32_t>(feat.dim()));
    bin::write_f64(os, feat.frame_shift);
    for (Eigen::Index t = 0; t < feat.num_frames(); ++t)
      for (Eigen::Index d = 0; d < feat.dim(); ++d)
        bin::write_f32(os, static_cast<float>(feat.frames(t, d)));
  }
}

inline std::vector<std::pair<std::string, FeatureMatrix>> read_feature_archive(
    std::istream& is) {
  bin::expect_magic(is, "VFEA", 1, "feature archive");
  const std::uint64_t count = bin::read_u64(is, "count");
  std::vector<std::pair<std::string, FeatureMatrix>> features;
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id = bin::read_string(is);
    if (!seen.insert(id).second)
      throw FormatError(message("feature archive: duplicate id '", id, "'"));
    FeatureMatrix feat;
    const auto rows = static_cast<Eigen::Index>(bin::read_u32(is, "rows"));
    const auto cols = static_cast<Eigen::Index>(bin::read_u32(is, "cols"));
    feat.frame_shift = bin::read_f64(is, "frame shift");
    feat.frames.resize(rows, cols);
    for (Eigen::Index t = 0; t < rows; ++t)
      for (Eigen::Index d = 0; d < cols; ++d)
        feat.frames(t, d) = static_cast<double>(bin::read_f32(is));
    features.emplace_back(std::move(id), std::move(feat));
  }
  return features;
}

inline void write_feature_archive(
    const std::string& path,
    const std::vector<std::pair<std::string, FeatureMatrix>>& features) {
  auto os = detail::open_out(path);
  write_feature_archive(os, features);
}

inline std::vector<std::pair<std::string, FeatureMatrix>> read_feature_archive(
    const std::string& path) {
  auto is = detail::open_in(path);
  return read_feature_archive(is);
}

// ---------------------------------------------------------------------------
// Baum-Welch statistics archive: magic VBWS; records of (id, K, D, N, F).
// ---------------------------------------------------------------------------

inline void write_stats_archive(std::ostream& os,
                                const std::vector<BaumWelchStats>& stats) {
  bin::write_magic(os, "VBWS", 1);
  bin::write_u64(os, stats.size());
  for (const auto& s : stats) {
    bin::write_string(os, s.utterance_id);
    bin::write_u32(os, static_cast<std::uint32_t>(s.num_components()));
    bin::write_u32(os, static_cast<std::uint32_t>(s.dim()));
    for (Eigen::Index c = 0; c < s.num_components(); ++c)
      bin::write_f64(os, s.zero_order[c]);
    for (Eigen::Index c = 0; c < s.num_components(); ++c)
      for (Eigen::Index d = 0; d < s.dim(); ++d)
        bin::write_f64(os, s.first_order(c, d));
  }
}

inline std::vector<BaumWelchStats> read_stats_archive(std::istream& is) {
  bin::expect_magic(is, "VBWS", 1, "statistics archive");
  const std::uint64_t count = bin::read_u64(is, "count");
  std::vector<BaumWelchStats> stats;
  for (std::uint64_t i = 0; i < count; ++i) {
    BaumWelchStats s;
    s.utterance_id = bin::read_string(is);
    const auto k = static_cast<Eigen::Index>(bin::read_u32(is, "components"));
    const auto d = static_cast<Eigen::Index>(bin::read_u32(is, "dim"));
    s.zero_order.resize(k);
    for (Eigen::Index c = 0; c < k; ++c) s.zero_order[c] = bin::read_f64(is);
    s.first_order.resize(k, d);
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index j = 0; j < d; ++j)
        s.first_order(c, j) = bin::read_f64(is);
    stats.push_back(std::move(s));
  }
  return stats;
}

inline void write_stats_archive(const std::string& path,
                                const std::vector<BaumWelchStats>& stats) {
  auto os = detail::open_out(path);
  write_stats_archive(os, stats);
}

inline std::vector<BaumWelchStats> read_stats_archive(
    const std::string& path) {
  auto is = detail::open_in(path);
  return read_stats_archive(is);
}

// ---------------------------------------------------------------------------
// Model serialization.
// ---------------------------------------------------------------------------

inline void write_gmm(std::ostream& os, const GaussianMixture& gmm) {
  bin::write_magic(os, "VGMM", 1);
  bin::write_u32(os, gmm.cov_kind == CovKind::kDiagonal ? 0u : 1u);
  bin::write_u32(os, static_cast<std::uint32_t>(gmm.num_components()));
  bin::write_u32(os, static_cast<std::uint32_t>(gmm.dim()));
  bin::write_vector_f64(os, gmm.weights);
  bin::write_matrix_f64(os, gmm.means);
  if (gmm.cov_kind == CovKind::kDiagonal)
    for (const auto& v : gmm.diag_covs) bin::write_vector_f64(os, v);
  else
    for (const auto& m : gmm.full_covs) bin::write_matrix_f64(os, m);
}

inline GaussianMixture read_gmm(std::istream& is) {
  bin::expect_magic(is, "VGMM", 1, "mixture model");
  GaussianMixture gmm;
  gmm.cov_kind =
      bin::read_u32(is, "cov kind") == 0 ? CovKind::kDiagonal : CovKind::kFull;
  const auto k = static_cast<Eigen::Index>(bin::read_u32(is, "components"));
  static_cast<void>(bin::read_u32(is, "dim"));
  gmm.weights = bin::read_vector_f64(is);
  gmm.means = bin::read_matrix_f64(is);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (gmm.cov_kind == CovKind::kDiagonal)
      gmm.diag_covs.push_back(bin::read_vector_f64(is));
    else
      gmm.full_covs.push_back(bin::read_matrix_f64(is));
  }
  gmm.validate();
  return gmm;
}

inline void write_gmm(const std::string& path, const GaussianMixture& gmm) {
  auto os = detail::open_out(path);
  write_gmm(os, gmm);
}

inline GaussianMixture read_gmm(const std::string& path) {
  auto is = detail::open_in(path);
  return read_gmm(is);
}

inline void write_tv_model(std::ostream& os,
                           const TotalVariabilityModel& model) {
  bin::write_magic(os, "VTVM", 1);
  bin::write_matrix_f64(os, model.t);
  write_gmm(os, model.ubm);
}

inline TotalVariabilityModel read_tv_model(std::istream& is) {
  bin::expect_magic(is, "VTVM", 1, "total variability model");
  TotalVariabilityModel model;
  model.t = bin::read_matrix_f64(is);
  model.ubm = read_gmm(is);
  return model;
}

inline void write_tv_model(const std::string& path,
                           const TotalVariabilityModel& model) {
  auto os = detail::open_out(path);
  write_tv_model(os, model);
}

inline TotalVariabilityModel read_tv_model(const std::string& path) {
  auto is = detail::open_in(path);
  return read_tv_model(is);
}

/// Backend bundle: the centering/LDA/length-norm transform plus the PLDA
/// model trained on transformed embeddings.
struct BackendModel {
  BackendTransform transform;
  PldaModel plda;
};

inline void write_backend_model(std::ostream& os, const BackendModel& model) {
  bin::write_magic(os, "VBKD", 1);
  bin::write_vector_f64(os, model.transform.global_mean);
  bin::write_matrix_f64(os, model.transform.lda);
  bin::write_f64(os, model.transform.target_norm);
  bin::write_vector_f64(os, model.plda.mu);
  bin::write_matrix_f64(os, model.plda.b);
  bin::write_matrix_f64(os, model.plda.w);
}

inline BackendModel read_backend_model(std::istream& is) {
  bin::expect_magic(is, "VBKD", 1, "backend model");
  BackendModel model;
  model.transform.global_mean = bin::read_vector_f64(is);
  model.transform.lda = bin::read_matrix_f64(is);
  model.transform.target_norm = bin::read_f64(is);
  model.plda.mu = bin::read_vector_f64(is);
  model.plda.b = bin::read_matrix_f64(is);
  model.plda.w = bin::read_matrix_f64(is);
  return model;
}

inline void write_backend_model(const std::string& path,
                                const BackendModel& model) {
  auto os = detail::open_out(path);
  write_backend_model(os, model);
}

inline BackendModel read_backend_model(const std::string& path) {
  auto is = detail::open_in(path);
  return read_backend_model(is);
}

// ---------------------------------------------------------------------------
// Text formats: scores ("enroll test score") and trials
// ("enroll test [target|nontarget]").
// ---------------------------------------------------------------------------

inline void write_scores(std::ostream& os, const ScoreSet& scores) {
  os << std::setprecision(17);
  for (const auto& e : scores.entries())
    os << e.enroll << ' ' << e.test << ' ' << e.score << '\n';
}

inline ScoreSet read_scores(std::istream& is) {
  ScoreSet scores;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream parts(line);
    std::string enroll, test;
    double score;
    if (!(parts >> enroll >> test >> score))
      throw FormatError(
          message("scores: malformed line ", line_number, ": '", line, "'"));
    std::string extra;
    if (parts >> extra)
      throw FormatError(
          message("scores: trailing tokens on line ", line_number));
    scores.add(std::move(enroll), std::move(test), score);
  }
  return scores;
}

inline void write_scores(const std::string& path, const ScoreSet& scores) {
  auto os = detail::open_out(path);
  write_scores(os, scores);
}

inline ScoreSet read_scores(const std::string& path) {
  auto is = detail::open_in(path);
  return read_scores(is);
}

inline void write_trials(std::ostream& os, const TrialList& trials) {
  for (const auto& e : trials.entries()) {
    os << e.enroll << ' ' << e.test;
    if (e.target.has_value())
      os << ' ' << (*e.target ? "target" : "nontarget");
    os << '\n';
  }
}

inline TrialList read_trials(std::istream& is) {
  TrialList trials;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream parts(line);
    std::string enroll, test, label;
    if (!(parts >> enroll >> test))
      throw FormatError(
          message("trials: malformed line ", line_number, ": '", line, "'"));
    std::optional<bool> target;
    if (parts >> label) {
      if (label == "target")
        target = true;
      else if (label == "nontarget")
        target = false;
      else
        throw FormatError(message("trials: bad label '", label, "' on line ",
                                  line_number));
    }
    std::string extra;
    if (parts >> extra)
      throw FormatError(
          message("trials: trailing tokens on line ", line_number));
    trials.add(std::move(enroll), std::move(test), target);
  }
  return trials;
}

inline void write_trials(const std::string& path, const TrialList& trials) {
  auto os = detail::open_out(path);
  write_trials(os, trials);
}

inline TrialList read_trials(const std::string& path) {
  auto is = detail::open_in(path);
  return read_trials(is);
}

/// "utt spk" or "id value" two-column maps.
inline std::map<std::string, std::string> read_two_column_map(
    const std::string& path) {
  auto is = detail::open_in(path);
  std::map<std::string, std::string> mapping;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream parts(line);
    std::string key, value;
    if (!(parts >> key >> value))
      throw FormatError(message("'", path, "': malformed line ", line_number));
    mapping[key] = value;
  }
  return mapping;
}

// ---------------------------------------------------------------------------
// Flat key-value configuration with include support.
// ---------------------------------------------------------------------------

class Config {
 public:
  static Config from_string(const std::string& text) {
    Config config;
    std::istringstream is(text);
    config.parse(is, "");
    return config;
  }

  static Config load(const std::string& path) {
    Config config;
    auto is = detail::open_in(path);
    config.parse(is, std::filesystem::path(path).parent_path().string());
    return config;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
      throw ParamError(message("config: missing key '", key, "'"));
    return it->second;
  }

  std::string get_or(const std::string& key,
                     const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  double as_double(const std::string& key) const {
    return std::stod(get(key));
  }
  double as_double_or(const std::string& key, double fallback) const {
    return has(key) ? as_double(key) : fallback;
  }
  long as_int(const std::string& key) const { return std::stol(get(key)); }
  long as_int_or(const std::string& key, long fallback) const {
    return has(key) ? as_int(key) : fallback;
  }
  std::uint64_t as_u64_or(const std::string& key,
                          std::uint64_t fallback) const {
    return has(key) ? std::stoull(get(key)) : fallback;
  }
  bool as_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParamError(message("config: '", key, "' is not a boolean: '", v,
                             "'"));
  }

  /// Whitespace-separated list value.
  std::vector<std::string> as_list(const std::string& key) const {
    std::istringstream is(get(key));
    std::vector<std::string> items;
    std::string item;
    while (is >> item) items.push_back(item);
    return items;
  }

  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  /// Sorted "key = value" lines; the input to the config hash.
  std::string canonical() const {
    std::ostringstream os;
    for (const auto& [key, value] : entries_)
      os << key << " = " << value << '\n';
    return os.str();
  }

  std::uint64_t hash() const { return fnv1a64(canonical()); }

 private:
  void parse(std::istream& is, const std::string& base_dir) {
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(is, line)) {
      ++line_number;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '#') continue;
      if (line.compare(first, 8, "include ") == 0) {
        std::string rel = line.substr(first + 8);
        const auto start = rel.find_first_not_of(" \t");
        const auto stop = rel.find_last_not_of(" \t\r");
        rel = rel.substr(start, stop - start + 1);
        const std::filesystem::path target =
            std::filesystem::path(rel).is_absolute()
                ? std::filesystem::path(rel)
                : std::filesystem::path(base_dir) / rel;
        auto nested = detail::open_in(target.string());
        parse(nested, target.parent_path().string());
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw FormatError(
            message("config: line ", line_number, " has no '=': '", line,
                    "'"));
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      require(!key.empty(), "config: empty key on line ", line_number);
      entries_[key] = value;  // later keys (and includes) override
    }
  }

  std::map<std::string, std::string> entries_;
};

}  // namespace svkit
