// Copyright 2026 The fic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fic {

// N x D real features stored row-major, with optional per-row identity labels.
struct FeatureSet {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<std::uint32_t> labels;  // empty when absent
  std::string source;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
  bool has_labels() const { return !labels.empty(); }

  // D x N column view (one feature per column).
  Eigen::Map<const Eigen::MatrixXd> columns() const {
    return {values.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count)};
  }
  static FeatureSet from_columns(const Eigen::MatrixXd& cols, std::vector<std::uint32_t> labels = {},
                                 std::string source = {});

  // Rows [first, first + n) as a new set.
  FeatureSet slice(std::size_t first, std::size_t n) const;
  FeatureSet select(std::span<const std::size_t> rows) const;

  // Throws ShapeError / Error on shape mismatch or non-finite values.
  void validate() const;

  bool operator==(const FeatureSet& other) const = default;
};

struct VerificationPair {
  std::size_t a = 0;
  std::size_t b = 0;
  bool same = false;

  bool operator==(const VerificationPair&) const = default;
};
using VerificationPairs = std::vector<VerificationPair>;

// --- feature files --------------------------------------------------------

// Binary "FEA1" container: f32 data, optional u32 labels.
std::vector<std::uint8_t> encode_features(const FeatureSet& set);
FeatureSet decode_features(std::span<const std::uint8_t> bytes);

// CSV: optional header "f0,...,f{D-1}[,label]"; without a header there are no labels.
std::string features_to_csv(const FeatureSet& set);
FeatureSet features_from_csv(const std::string& text);

// Dispatches on extension: ".csv" is text, anything else binary.
FeatureSet read_features(const std::filesystem::path& path);
void write_features(const std::filesystem::path& path, const FeatureSet& set);

// --- pairs files ----------------------------------------------------------

std::string pairs_to_csv(const VerificationPairs& pairs);
VerificationPairs pairs_from_csv(const std::string& text);
VerificationPairs read_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path, const VerificationPairs& pairs);
// Throws ProtocolError if an index is out of range or a pair repeats a row.
void validate_pairs(const VerificationPairs& pairs, std::size_t count);

// --- synthetic data -------------------------------------------------------

struct SyntheticConfig {
  std::size_t identities = 200;
  std::size_t per_identity = 50;
  std::size_t dim = 128;
  double within_class_sigma = 0.15;
  std::uint64_t seed = 42;
};

// Identity means uniform on the unit sphere; each sample is mean plus
// isotropic Gaussian noise, L2-normalized. Rows are grouped by identity.
FeatureSet gen_synthetic(const SyntheticConfig& config);

// Seeded same/different-identity pairs without duplicate unordered pairs.
VerificationPairs gen_pairs(const FeatureSet& features, std::size_t n_pos, std::size_t n_neg,
                            std::uint64_t seed);

// Splits by identity: labels whose rank among distinct labels falls in the
// first `fraction` go to the first set.
std::pair<FeatureSet, FeatureSet> split_by_identity(const FeatureSet& features, double fraction);

// --- statistics -----------------------------------------------------------

struct DimStats {
  std::size_t dim = 0;
  std::vector<double> edges;  // bins + 1
  std::vector<std::size_t> counts;
  double mean = 0.0;
  double stddev = 0.0;
};

std::vector<DimStats> dim_stats(const FeatureSet& features, std::span<const std::size_t> dims,
                                std::size_t bins);
std::string dim_stats_csv(const std::vector<DimStats>& stats);

}  // namespace fic
