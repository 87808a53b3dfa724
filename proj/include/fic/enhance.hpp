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
#include <string>
#include <vector>

#include "fic/codec.hpp"
#include "fic/data.hpp"
#include "fic/nn/layers.hpp"
#include "fic/nn/tape.hpp"

namespace fic {

// Maps a rounded low-rate latent into the high-rate decoder's input domain:
//   Enh(c) = clip(r_clip * Net(c / r_clip), -r_clip, r_clip)
// with Net = FC(M->H_e) -> GDN -> FC(H_e->M).
struct EnhancerModel {
  nn::Sequential net;
  double r_clip = 20.0;
  std::string source_model_id;
  std::string target_model_id;

  std::size_t latent_dim() const { return net.in(); }
  std::size_t hidden_dim() const;

  static EnhancerModel create(std::size_t latent_dim, std::size_t hidden_dim, double r_clip,
                              std::string source_id, std::string target_id, std::uint64_t seed);
  // Net(x) = x exactly (identity FCs, identity GDN).
  static EnhancerModel identity(std::size_t latent_dim, double r_clip, std::string source_id,
                                std::string target_id);

  std::vector<nn::ParamBlock> parameters();
  void project();
  void validate() const;

  bool operator==(const EnhancerModel&) const = default;
};

LatentCode enhance_latent(const EnhancerModel& enh, const LatentCode& c_low);
nn::Matrix enhance_batch(const EnhancerModel& enh, const nn::Matrix& c_low);

struct EnhancerLoss {
  double loss = 0.0;  // batch mean of ||Enh(c_low)/r - c_high/r||^2
  nn::Gradients gradients;
};

EnhancerLoss enhancer_loss(const EnhancerModel& enh, const nn::Matrix& c_low, const nn::Matrix& c_high,
                           bool with_gradients = true);

// Teacher-student training pairs: rounded low-rate codes and continuous
// clipped (noise-free) high-rate codes of the same features.
struct LatentPairs {
  nn::Matrix c_low;
  nn::Matrix c_high;
};

LatentPairs make_latent_pairs(const CodecModel& low, const CodecModel& high, const FeatureSet& features);

struct TrainedEnhancer {
  EnhancerModel model;
  std::vector<double> epoch_loss;
};

// Throws ConfigError unless both codecs share M, D and r_clip.
TrainedEnhancer train_enhancer(const CodecModel& low, const CodecModel& high, const FeatureSet& features,
                               const TrainConfig& config);

// SQ-E: additive residual block FC(D->D) -> GDN -> FC(D->D) over the SQ
// reconstruction.
struct SqeModel {
  nn::Sequential block;
  int qp = 0;

  std::size_t dim() const { return block.in(); }

  // Glorot first layer, zero last layer: starts as the identity map.
  static SqeModel create(std::size_t dim, int qp, std::uint64_t seed);
  static SqeModel zeros(std::size_t dim, int qp);

  std::vector<nn::ParamBlock> parameters();
  void project();
  void validate() const;

  bool operator==(const SqeModel&) const = default;
};

std::vector<double> apply_sqe(const SqeModel& sqe, std::span<const double> f_sq);
nn::Matrix apply_sqe_batch(const SqeModel& sqe, const nn::Matrix& f_sq);

struct SqeLoss {
  double loss = 0.0;  // batch mean of ||SQE(f_sq) - f_raw||^2
  nn::Gradients gradients;
};

SqeLoss sqe_loss(const SqeModel& sqe, const nn::Matrix& f_sq, const nn::Matrix& f_raw,
                 bool with_gradients = true);

struct TrainedSqe {
  SqeModel model;
  std::vector<double> epoch_loss;
};

TrainedSqe train_sqe(const FeatureSet& features, int qp, const TrainConfig& config);

}  // namespace fic
