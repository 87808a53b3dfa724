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
#include <memory>
#include <string>
#include <vector>

#include "fic/codec.hpp"
#include "fic/data.hpp"
#include "fic/enhance.hpp"
#include "fic/entropy.hpp"
#include "fic/metrics.hpp"

namespace fic {

// Learned-codec bitstream helpers shared by the CLI and the sweep.
FeatureBitstream pro_compress(const CodecModel& codec, const FeatureSet& features);
FeatureSet pro_decompress(const CodecModel& codec, const FeatureBitstream& bs);
// Dec_high(Enh(c_low)) from a low-rate bitstream.
FeatureSet pro_enhanced_decompress(const EnhancerModel& enh, const CodecModel& high, const FeatureBitstream& bs);

struct PipelineOutput {
  FeatureBitstream bitstream;
  FeatureSet reconstructed;
};

class Pipeline {
 public:
  virtual ~Pipeline() = default;
  virtual std::string label() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual PipelineOutput run(const FeatureSet& features) const = 0;
};

std::unique_ptr<Pipeline> make_sq_pipeline(int qp, std::size_t feature_dim);
std::unique_ptr<Pipeline> make_sqe_pipeline(SqeModel sqe);
std::unique_ptr<Pipeline> make_pro_pipeline(CodecModel codec);
std::unique_ptr<Pipeline> make_pro_e_pipeline(CodecModel low, EnhancerModel enh, CodecModel high);

struct RatePoint {
  std::string label;
  double bits_per_dim = 0.0;  // +inf for the uncompressed reference
  double bits_per_feature = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
  double eer = 0.0;
  bool eer_flipped = false;
};

struct SweepResult {
  std::vector<RatePoint> points;                 // reference row first, then pipelines in order
  std::vector<FeatureBitstream> bitstreams;      // one per pipeline, same order
};

// Compresses, reconstructs and scores every pipeline; row 0 is the
// uncompressed reference labelled "raw".
SweepResult run_sweep(const FeatureSet& features, const VerificationPairs& pairs,
                      const std::vector<std::unique_ptr<Pipeline>>& pipelines, std::size_t folds,
                      std::uint64_t seed);

// "label,bits_per_dim,bits_per_feature,accuracy,auc,eer", 6 decimals; the
// reference row reports its rates as "inf".
std::string sweep_csv(const std::vector<RatePoint>& points);

}  // namespace fic
