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
#include "fic/entropy.hpp"

namespace fic {

// q_step = 2^((qp - 4) / 6 - 10).
double qstep_from_qp(int qp);

// floor(f / step), corrected so that 0 <= f - c * step < step holds for the
// products sq_dequantize actually forms.
std::vector<std::int64_t> sq_quantize_step(std::span<const double> f, double step);
std::vector<double> sq_dequantize_step(std::span<const std::int64_t> c, double step);

std::vector<std::int64_t> sq_quantize(std::span<const double> f, int qp);
std::vector<double> sq_dequantize(std::span<const std::int64_t> c, int qp);

// Reconstruction of a whole set at `qp`, without entropy coding.
FeatureSet sq_reconstruct(const FeatureSet& features, int qp);

struct SqResult {
  FeatureBitstream bitstream;
  RateReport rate;
  FeatureSet reconstructed;
};

// Quantizes every feature, fits the alphabet to the observed symbol range
// (widened to contain 0), and codes the symbols with the adaptive coder.
// Model id is "SQ<qp>".
SqResult sq_codec_rate(const FeatureSet& features, int qp);

// Inverse of sq_codec_rate's coding step: dequantized features.
FeatureSet sq_decode(const FeatureBitstream& bs, int qp);

}  // namespace fic
