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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fic/data.hpp"
#include "fic/nn/layers.hpp"
#include "fic/nn/tape.hpp"

namespace fic {

// A latent vector of width M. Continuous codes are clipped reals; quantized
// codes hold integers (stored as doubles) in [-round(r_clip), round(r_clip)].
struct LatentCode {
  std::vector<double> values;
  bool quantized = false;

  std::vector<std::int32_t> symbols() const;
  static LatentCode from_symbols(std::span<const std::int32_t> symbols);

  bool operator==(const LatentCode&) const = default;
};

struct TrainConfig {
  double lambda = 1e-4;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  std::size_t epochs = 40;
  double r_clip = 20.0;
  double noise_half_width = 0.5;
  std::uint64_t seed = 42;
};

struct CodecShape {
  std::size_t feature_dim = 128;
  std::size_t latent_dim = 32;
  std::size_t hidden_dim = 128;
};

// Encoder FC(D->H) -> GDN -> FC(H->M); decoder FC(M->H) -> IGDN -> FC(H->D).
struct CodecModel {
  nn::Sequential encoder;
  nn::Sequential decoder;
  std::size_t feature_dim = 0;
  std::size_t latent_dim = 0;
  std::size_t hidden_dim = 0;
  double lambda = 0.0;
  double r_clip = 20.0;
  std::string model_id;

  static CodecModel create(const CodecShape& shape, double lambda, double r_clip, std::string model_id,
                           std::uint64_t seed);

  // Encoder blocks followed by decoder blocks; matches rd_loss gradients.
  std::vector<nn::ParamBlock> parameters();
  void project();
  void validate() const;
  std::int32_t symbol_bound() const;

  bool operator==(const CodecModel&) const = default;
};

enum class EncodeMode { kTrain, kInfer };

// Rounds to nearest, ties away from zero.
double round_half_away(double v);

LatentCode clip_latent(const LatentCode& c, double r_clip);
LatentCode train_noise(const LatentCode& c, double half_width, std::uint64_t seed);
LatentCode quantize_latent(const LatentCode& c);

// Train mode: clip(clip(Enc(f)) + U(-h, h)) with h = half_width, seeded.
// Infer mode: round(clip(Enc(f))).
LatentCode encode_feature(const CodecModel& model, std::span<const double> f, EncodeMode mode,
                          std::uint64_t seed = 0, double half_width = 0.5);
std::vector<double> decode_latent(const CodecModel& model, const LatentCode& c);

// Batched variants over D x N and M x N column matrices. `noise` (train mode
// only) must be M x N.
nn::Matrix encode_batch(const CodecModel& model, const nn::Matrix& features, EncodeMode mode,
                        const nn::Matrix* noise = nullptr);
nn::Matrix decode_batch(const CodecModel& model, const nn::Matrix& latents);

// Uniform noise in [-half_width, half_width), drawn column by column.
nn::Matrix draw_noise(std::size_t rows, std::size_t cols, double half_width, std::mt19937_64& rng);

struct RdLoss {
  double loss = 0.0;  // batch mean of ||f - f_rec||^2 + lambda * ||c||_1
  double mse = 0.0;   // batch mean of ||f - f_rec||^2
  double l1 = 0.0;    // batch mean of ||c||_1
  nn::Gradients gradients;
};

// Rate-distortion loss on the train-mode latent with the given noise
// realization. Gradients follow CodecModel::parameters() order.
RdLoss rd_loss(const CodecModel& model, const nn::Matrix& features, const nn::Matrix& noise,
               bool with_gradients = true);
RdLoss rd_loss(const CodecModel& model, std::span<const double> f, std::uint64_t seed);

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double mean_mse = 0.0;
  double mean_l1 = 0.0;
};

struct TrainedCodec {
  CodecModel model;
  std::vector<EpochStats> log;
};

TrainedCodec train_codec(const FeatureSet& features, const TrainConfig& config, const CodecShape& shape,
                         std::string model_id);

// "epoch,mean_loss,mean_mse,mean_l1"
std::string training_log_csv(const std::vector<EpochStats>& log);

namespace detail {

// Gathers columns `order[first .. first+n)` of a column matrix.
nn::Matrix gather_columns(const nn::Matrix& src, std::span<const std::size_t> order);

// Derives independent seeds for sub-streams of one configured seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace detail

}  // namespace fic
