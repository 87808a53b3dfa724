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

#include "fic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fic/error.hpp"

namespace fic {

namespace {

void check_both_classes(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  const auto pos = std::count(labels.begin(), labels.end(), true);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
    throw ProtocolError("verification metrics need both positive and negative pairs");
  }
}

std::vector<std::size_t> sorted_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

// Best training threshold over `rows`; ties resolve to the smallest.
double select_threshold(std::span<const double> scores, const std::vector<bool>& labels,
                        std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::size_t pos_total = 0;
  for (auto i : rows) pos_total += labels[i];
  // Threshold -inf: everything predicted "same".
  std::size_t best_correct = pos_total;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t neg_below = 0, pos_below = 0;
  for (std::size_t i = 0; i < rows.size();) {
    const double s = scores[rows[i]];
    while (i < rows.size() && scores[rows[i]] == s) {
      (labels[rows[i]] ? pos_below : neg_below) += 1;
      ++i;
    }
    const std::size_t correct = neg_below + (pos_total - pos_below);
    if (correct > best_correct) {
      best_correct = correct;
      best = i < rows.size() ? 0.5 * (s + scores[rows[i]]) : std::numeric_limits<double>::infinity();
    }
  }
  return best;
}

}  // namespace

std::vector<double> pair_scores(const FeatureSet& features, const VerificationPairs& pairs) {
  validate_pairs(pairs, features.count);
  std::vector<double> inv_norm(features.count, 0.0);
  std::vector<bool> seen(features.count, false);
  auto norm_of = [&](std::size_t i) {
    if (!seen[i]) {
      double n2 = 0.0;
      for (double v : features.row(i)) n2 += v * v;
      if (!(n2 > 0.0)) throw DegenerateFeature("row " + std::to_string(i) + " has zero norm");
      inv_norm[i] = 1.0 / std::sqrt(n2);
      seen[i] = true;
    }
    return inv_norm[i];
  };
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const double na = norm_of(p.a), nb = norm_of(p.b);
    auto a = features.row(p.a), b = features.row(p.b);
    double d2 = 0.0;
    for (std::size_t j = 0; j < features.dim; ++j) {
      const double e = a[j] * na - b[j] * nb;
      d2 += e * e;
    }
    out.push_back(-d2);
  }
  return out;
}

std::vector<bool> pair_labels(const VerificationPairs& pairs) {
  std::vector<bool> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = pairs[i].same;
  return out;
}

std::vector<std::size_t> stratified_folds(const std::vector<bool>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ProtocolError("k-fold evaluation needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> folds(labels.size());
  for (std::size_t i = 0; i < pos.size(); ++i) folds[pos[i]] = i % k;
  for (std::size_t i = 0; i < neg.size(); ++i) folds[neg[i]] = i % k;
  return folds;
}

KFoldResult kfold_accuracy(std::span<const double> scores, const std::vector<bool>& labels,
                           std::span<const std::size_t> folds, std::size_t k) {
  if (k < 2) throw ProtocolError("k-fold evaluation needs k >= 2");
  if (folds.size() != scores.size() || labels.size() != scores.size()) {
    throw ShapeError("scores, labels and folds differ in length");
  }
  std::vector<std::size_t> pos(k, 0), neg(k, 0);
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (folds[i] >= k) throw ProtocolError("fold index out of range");
    (labels[i] ? pos : neg)[folds[i]] += 1;
  }
  for (std::size_t f = 0; f < k; ++f) {
    if (pos[f] == 0 || neg[f] == 0) {
      throw ProtocolError("fold " + std::to_string(f) + " does not contain both positive and negative pairs");
    }
  }
  KFoldResult result;
  std::size_t correct_total = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test : train).push_back(i);
    const double t = select_threshold(scores, labels, std::move(train));
    std::size_t correct = 0;
    for (auto i : test) correct += (scores[i] > t) == labels[i];
    correct_total += correct;
    result.thresholds.push_back(t);
    result.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  result.accuracy = static_cast<double>(correct_total) / static_cast<double>(scores.size());
  return result;
}

KFoldResult kfold_accuracy(std::span<const double> scores, const std::vector<bool>& labels, std::size_t k,
                           std::uint64_t seed) {
  const auto folds = stratified_folds(labels, k, seed);
  return kfold_accuracy(scores, labels, folds, k);
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  check_both_classes(scores, labels);
  const auto order = sorted_order(scores);
  double pos_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        pos_rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(scores.size()) - n_pos;
  return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double eer_raw(std::span<const double> scores, const std::vector<bool>& labels) {
  check_both_classes(scores, labels);
  const auto order = sorted_order(scores);
  const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const double n_neg = static_cast<double>(labels.size()) - n_pos;
  double prev_fnr = 0.0, prev_fpr = 1.0;  // threshold -inf
  std::size_t pos_le = 0, neg_le = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] ? pos_le : neg_le) += 1;
      ++i;
    }
    const double fnr = static_cast<double>(pos_le) / n_pos;
    const double fpr = (n_neg - static_cast<double>(neg_le)) / n_neg;
    if (fnr >= fpr) {
      if (fnr == fpr) return fnr;
      const double d_prev = prev_fnr - prev_fpr;  // < 0
      const double d_cur = fnr - fpr;             // > 0
      const double alpha = -d_prev / (d_cur - d_prev);
      return prev_fnr + alpha * (fnr - prev_fnr);
    }
    prev_fnr = fnr;
    prev_fpr = fpr;
  }
  return 1.0;  // unreachable: the last candidate has FNR = 1, FPR = 0
}

EerResult eer(std::span<const double> scores, const std::vector<bool>& labels) {
  if (roc_auc(scores, labels) >= 0.5) return {eer_raw(scores, labels), false};
  std::vector<double> negated(scores.begin(), scores.end());
  for (double& s : negated) s = -s;
  return {eer_raw(negated, labels), true};
}

VerificationMetrics evaluate_verification(const FeatureSet& features, const VerificationPairs& pairs,
                                          std::size_t folds, std::uint64_t seed) {
  const auto scores = pair_scores(features, pairs);
  const auto labels = pair_labels(pairs);
  VerificationMetrics m;
  m.accuracy = kfold_accuracy(scores, labels, folds, seed).accuracy;
  m.auc = roc_auc(scores, labels);
  const auto e = eer(scores, labels);
  m.eer = e.eer;
  m.flipped = e.flipped;
  return m;
}

}  // namespace fic
