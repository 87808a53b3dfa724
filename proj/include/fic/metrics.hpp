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
#include <span>
#include <vector>

#include "fic/data.hpp"

namespace fic {

// Negative squared Euclidean distance between L2-normalized rows; in [-4, 0],
// higher means more similar. Throws DegenerateFeature on a zero-norm row.
std::vector<double> pair_scores(const FeatureSet& features, const VerificationPairs& pairs);

std::vector<bool> pair_labels(const VerificationPairs& pairs);

struct KFoldResult {
  double accuracy = 0.0;               // pooled held-out accuracy
  std::vector<double> thresholds;      // per fold; "same" iff score > threshold
  std::vector<double> fold_accuracy;
};

// Stratified seeded fold assignment: positives and negatives are shuffled
// separately and dealt round-robin.
std::vector<std::size_t> stratified_folds(const std::vector<bool>& labels, std::size_t k, std::uint64_t seed);

// Per fold, picks the threshold maximizing accuracy on the other folds over
// candidates {-inf, midpoints of consecutive distinct scores, +inf} (ties go
// to the lowest threshold) and scores the held-out fold.
KFoldResult kfold_accuracy(std::span<const double> scores, const std::vector<bool>& labels,
                           std::span<const std::size_t> folds, std::size_t k);
KFoldResult kfold_accuracy(std::span<const double> scores, const std::vector<bool>& labels, std::size_t k,
                           std::uint64_t seed);

// Mann-Whitney statistic with ties counted 1/2.
double roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

// Crossing of FNR and FPR over the candidate thresholds, linearly
// interpolated between adjacent candidates.
double eer_raw(std::span<const double> scores, const std::vector<bool>& labels);

struct EerResult {
  double eer = 0.0;
  bool flipped = false;  // scores were negated because AUC < 0.5
};

EerResult eer(std::span<const double> scores, const std::vector<bool>& labels);

struct VerificationMetrics {
  double accuracy = 0.0;
  double auc = 0.0;
  double eer = 0.0;
  bool flipped = false;
};

VerificationMetrics evaluate_verification(const FeatureSet& features, const VerificationPairs& pairs,
                                          std::size_t folds, std::uint64_t seed);

}  // namespace fic
