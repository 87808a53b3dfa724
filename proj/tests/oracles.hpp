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

// Reference implementations used only by tests. They favour obviousness over
// speed and share no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace fic::oracle {

// Fraction of (positive, negative) pairs ordered correctly; ties count 1/2.
inline double auc_pairwise(std::span<const double> scores, const std::vector<bool>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

struct Rates {
  double fnr;
  double fpr;
};

// "Same" iff score > t.
inline Rates rates_at(std::span<const double> scores, const std::vector<bool>& labels, double t) {
  double pos = 0, neg = 0, fn = 0, fp = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool accept = scores[i] > t;
    if (labels[i]) {
      pos += 1;
      if (!accept) fn += 1;
    } else {
      neg += 1;
      if (accept) fp += 1;
    }
  }
  return {fn / pos, fp / neg};
}

// Walk thresholds -inf, then every distinct score ascending; return the first
// point where FNR >= FPR, interpolated on the segment from the previous point.
inline double eer_sweep(std::span<const double> scores, const std::vector<bool>& labels) {
  std::set<double> distinct(scores.begin(), scores.end());
  std::vector<double> thresholds{-std::numeric_limits<double>::infinity()};
  thresholds.insert(thresholds.end(), distinct.begin(), distinct.end());
  Rates prev = rates_at(scores, labels, thresholds[0]);
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    const Rates cur = rates_at(scores, labels, thresholds[i]);
    if (cur.fnr >= cur.fpr) {
      if (cur.fnr == cur.fpr) return cur.fnr;
      const double a = (prev.fpr - prev.fnr) / ((cur.fnr - prev.fnr) - (cur.fpr - prev.fpr));
      return prev.fnr + a * (cur.fnr - prev.fnr);
    }
    prev = cur;
  }
  return 1.0;
}

inline double accuracy_at(const std::vector<double>& scores, const std::vector<bool>& labels,
                          const std::vector<std::size_t>& idx, double t) {
  double correct = 0;
  for (auto i : idx) correct += ((scores[i] > t) == labels[i]) ? 1.0 : 0.0;
  return correct / static_cast<double>(idx.size());
}

// Held-out accuracy pooled over folds, thresholds chosen by exhaustive scan of
// -inf, midpoints of distinct training scores, +inf (first maximum wins).
inline double kfold_brute(const std::vector<double>& scores, const std::vector<bool>& labels,
                          const std::vector<std::size_t>& folds, std::size_t k) {
  double correct = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < scores.size(); ++i) (folds[i] == f ? test : train).push_back(i);
    std::set<double> distinct;
    for (auto i : train) distinct.insert(scores[i]);
    std::vector<double> sorted(distinct.begin(), distinct.end());
    std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    candidates.push_back(std::numeric_limits<double>::infinity());
    double best_t = candidates[0], best = -1;
    for (double t : candidates) {
      const double acc = accuracy_at(scores, labels, train, t);
      if (acc > best) {
        best = acc;
        best_t = t;
      }
    }
    correct += accuracy_at(scores, labels, test, best_t) * static_cast<double>(test.size());
  }
  return correct / static_cast<double>(scores.size());
}

// Ideal code length of a symbol stream under per-dimension add-1 adaptive
// counts, halved (rounding up) once a table's total exceeds 2^16.
inline double adaptive_code_length(std::span<const std::int32_t> symbols, std::size_t width,
                                   std::int32_t min_symbol, std::int32_t max_symbol) {
  const std::size_t n = static_cast<std::size_t>(max_symbol - min_symbol + 1);
  std::vector<std::vector<std::uint64_t>> freq(width, std::vector<std::uint64_t>(n, 1));
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    auto& table = freq[i % width];
    std::uint64_t total = 0;
    for (auto f : table) total += f;
    const auto s = static_cast<std::size_t>(symbols[i] - min_symbol);
    bits -= std::log2(static_cast<double>(table[s]) / static_cast<double>(total));
    table[s] += 1;
    if (total + 1 > (std::uint64_t{1} << 16)) {
      for (auto& f : table) f = (f + 1) / 2;
    }
  }
  return bits;
}

// Closed-form first Adam step for parameter p with gradient g.
inline double adam_first_step(double p, double g, double lr, double b1, double b2, double eps) {
  const double m_hat = ((1 - b1) * g) / (1 - b1);
  const double v_hat = ((1 - b2) * g * g) / (1 - b2);
  return p - lr * m_hat / (std::sqrt(v_hat) + eps);
}

}  // namespace fic::oracle
