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

#include "fic/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fic/error.hpp"
#include "fic/nn/adam.hpp"

namespace fic {

namespace detail {

nn::Matrix gather_columns(const nn::Matrix& src, std::span<const std::size_t> order) {
  nn::Matrix out(src.rows(), static_cast<Eigen::Index>(order.size()));
  for (std::size_t j = 0; j < order.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = src.col(static_cast<Eigen::Index>(order[j]));
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace detail

std::vector<std::int32_t> LatentCode::symbols() const {
  std::vector<std::int32_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = static_cast<std::int32_t>(values[i]);
  return out;
}

LatentCode LatentCode::from_symbols(std::span<const std::int32_t> symbols) {
  return {std::vector<double>(symbols.begin(), symbols.end()), true};
}

CodecModel CodecModel::create(const CodecShape& shape, double lambda, double r_clip, std::string model_id,
                              std::uint64_t seed) {
  if (shape.feature_dim == 0 || shape.latent_dim == 0 || shape.hidden_dim == 0) {
    throw InvalidDimension("codec dimensions must be positive");
  }
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(r_clip > 0.0)) throw ConfigError("r_clip must be positive");
  using nn::GdnLayer;
  using nn::GdnMode;
  const auto d = shape.feature_dim, m = shape.latent_dim, h = shape.hidden_dim;
  CodecModel model;
  model.encoder = nn::Sequential({nn::xavier_init(d, h, detail::derive_seed(seed, 1)),
                                  GdnLayer::create(h, GdnMode::kForward),
                                  nn::xavier_init(h, m, detail::derive_seed(seed, 2))});
  model.decoder = nn::Sequential({nn::xavier_init(m, h, detail::derive_seed(seed, 3)),
                                  GdnLayer::create(h, GdnMode::kInverse),
                                  nn::xavier_init(h, d, detail::derive_seed(seed, 4))});
  model.feature_dim = d;
  model.latent_dim = m;
  model.hidden_dim = h;
  model.lambda = lambda;
  model.r_clip = r_clip;
  model.model_id = std::move(model_id);
  return model;
}

std::vector<nn::ParamBlock> CodecModel::parameters() {
  auto out = encoder.parameters("enc");
  auto dec = decoder.parameters("dec");
  out.insert(out.end(), dec.begin(), dec.end());
  return out;
}

void CodecModel::project() {
  encoder.project();
  decoder.project();
}

void CodecModel::validate() const {
  if (encoder.layers().size() != 3 || decoder.layers().size() != 3) throw ShapeError("codec must have 3+3 layers");
  if (encoder.in() != feature_dim || encoder.out() != latent_dim || decoder.in() != latent_dim ||
      decoder.out() != feature_dim || nn::out_width(encoder.layers()[0]) != hidden_dim ||
      nn::out_width(decoder.layers()[0]) != hidden_dim) {
    throw ShapeError("codec layer shapes are inconsistent with D/M/H");
  }
  if (!(r_clip > 0.0) || !(lambda > 0.0)) throw ConfigError("codec r_clip and lambda must be positive");
}

std::int32_t CodecModel::symbol_bound() const { return static_cast<std::int32_t>(round_half_away(r_clip)); }

double round_half_away(double v) { return std::round(v); }

LatentCode clip_latent(const LatentCode& c, double r_clip) {
  LatentCode out = c;
  for (double& v : out.values) v = std::clamp(v, -r_clip, r_clip);
  return out;
}

LatentCode train_noise(const LatentCode& c, double half_width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  LatentCode out = c;
  out.quantized = false;
  for (double& v : out.values) v += u(rng);
  return out;
}

LatentCode quantize_latent(const LatentCode& c) {
  LatentCode out = c;
  for (double& v : out.values) v = round_half_away(v);
  out.quantized = true;
  return out;
}

nn::Matrix draw_noise(std::size_t rows, std::size_t cols, double half_width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  nn::Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = u(rng);
  }
  return out;
}

nn::Matrix encode_batch(const CodecModel& model, const nn::Matrix& features, EncodeMode mode,
                        const nn::Matrix* noise) {
  if (features.rows() != static_cast<Eigen::Index>(model.feature_dim)) {
    throw ShapeError("feature width " + std::to_string(features.rows()) + " does not match codec D=" +
                     std::to_string(model.feature_dim));
  }
  const double r = model.r_clip;
  nn::Matrix c = model.encoder.forward(features).cwiseMax(-r).cwiseMin(r);
  if (mode == EncodeMode::kInfer) return c.unaryExpr([](double v) { return round_half_away(v); });
  if (noise == nullptr || noise->rows() != c.rows() || noise->cols() != c.cols()) {
    throw ShapeError("train-mode encoding needs an M x N noise matrix");
  }
  return (c + *noise).cwiseMax(-r).cwiseMin(r);
}

nn::Matrix decode_batch(const CodecModel& model, const nn::Matrix& latents) {
  if (latents.rows() != static_cast<Eigen::Index>(model.latent_dim)) {
    throw ShapeError("latent width " + std::to_string(latents.rows()) + " does not match codec M=" +
                     std::to_string(model.latent_dim));
  }
  return model.decoder.forward(latents);
}

LatentCode encode_feature(const CodecModel& model, std::span<const double> f, EncodeMode mode,
                          std::uint64_t seed, double half_width) {
  if (f.size() != model.feature_dim) {
    throw ShapeError("feature has " + std::to_string(f.size()) + " components, codec expects " +
                     std::to_string(model.feature_dim));
  }
  const nn::Matrix x = Eigen::Map<const nn::Matrix>(f.data(), static_cast<Eigen::Index>(f.size()), 1);
  nn::Matrix c;
  if (mode == EncodeMode::kTrain) {
    std::mt19937_64 rng(seed);
    const nn::Matrix noise = draw_noise(model.latent_dim, 1, half_width, rng);
    c = encode_batch(model, x, mode, &noise);
  } else {
    c = encode_batch(model, x, mode);
  }
  return {std::vector<double>(c.data(), c.data() + c.size()), mode == EncodeMode::kInfer};
}

std::vector<double> decode_latent(const CodecModel& model, const LatentCode& c) {
  if (c.values.size() != model.latent_dim) {
    throw ShapeError("latent has " + std::to_string(c.values.size()) + " components, codec expects " +
                     std::to_string(model.latent_dim));
  }
  const nn::Matrix z = Eigen::Map<const nn::Matrix>(c.values.data(), static_cast<Eigen::Index>(c.values.size()), 1);
  const nn::Matrix f = decode_batch(model, z);
  return {f.data(), f.data() + f.size()};
}

RdLoss rd_loss(const CodecModel& model, const nn::Matrix& features, const nn::Matrix& noise,
               bool with_gradients) {
  if (features.rows() != static_cast<Eigen::Index>(model.feature_dim)) throw ShapeError("rd_loss: feature width");
  if (noise.rows() != static_cast<Eigen::Index>(model.latent_dim) || noise.cols() != features.cols()) {
    throw ShapeError("rd_loss: noise must be M x batch");
  }
  const double r = model.r_clip;
  const double batch = static_cast<double>(features.cols());

  nn::GradientTape enc_tape, dec_tape;
  nn::GradientTape* et = with_gradients ? &enc_tape : nullptr;
  nn::GradientTape* dt = with_gradients ? &dec_tape : nullptr;
  const nn::Matrix z = model.encoder.forward(features, et);
  const nn::Matrix clipped = z.cwiseMax(-r).cwiseMin(r);
  const nn::Matrix noisy = clipped + noise;
  const nn::Matrix c = noisy.cwiseMax(-r).cwiseMin(r);
  const nn::Matrix rec = model.decoder.forward(c, dt);
  const nn::Matrix diff = rec - features;

  RdLoss out;
  out.mse = diff.squaredNorm() / batch;
  out.l1 = c.cwiseAbs().sum() / batch;
  out.loss = out.mse + model.lambda * out.l1;
  if (!std::isfinite(out.loss)) throw DivergenceError("non-finite rate-distortion loss");
  if (!with_gradients) return out;

  const nn::TapeGradients dec_grads = nn::backward(dec_tape, (2.0 / batch) * diff);
  // d|c|/dc with the subgradient at 0 taken as 0.
  const nn::Matrix sign = c.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); });
  nn::Matrix dc = dec_grads.input + (model.lambda / batch) * sign;
  const auto pass = [r](double v) { return (v > -r && v < r) ? 1.0 : 0.0; };
  const nn::Matrix dz = dc.cwiseProduct(noisy.unaryExpr(pass)).cwiseProduct(z.unaryExpr(pass));
  const nn::TapeGradients enc_grads = nn::backward(enc_tape, dz);

  nn::append_gradients(enc_grads, out.gradients);
  nn::append_gradients(dec_grads, out.gradients);
  return out;
}

RdLoss rd_loss(const CodecModel& model, std::span<const double> f, std::uint64_t seed) {
  if (f.size() != model.feature_dim) throw ShapeError("rd_loss: feature width");
  const nn::Matrix x = Eigen::Map<const nn::Matrix>(f.data(), static_cast<Eigen::Index>(f.size()), 1);
  std::mt19937_64 rng(seed);
  const nn::Matrix noise = draw_noise(model.latent_dim, 1, 0.5, rng);
  return rd_loss(model, x, noise);
}

TrainedCodec train_codec(const FeatureSet& features, const TrainConfig& config, const CodecShape& shape,
                         std::string model_id) {
  features.validate();
  if (config.batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(config.noise_half_width > 0.0)) throw ConfigError("noise half-width must be positive");
  CodecShape s = shape;
  s.feature_dim = features.dim;
  TrainedCodec result{CodecModel::create(s, config.lambda, config.r_clip, std::move(model_id), config.seed), {}};
  CodecModel& model = result.model;

  const nn::Matrix data = features.columns();
  nn::AdamState adam;
  adam.config.learning_rate = config.learning_rate;
  std::mt19937_64 shuffle_rng(detail::derive_seed(config.seed, 10));
  std::mt19937_64 noise_rng(detail::derive_seed(config.seed, 11));
  std::vector<std::size_t> order(features.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto params = model.parameters();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochStats stats{epoch + 1, 0.0, 0.0, 0.0};
    std::size_t step = 0;
    for (std::size_t first = 0; first < order.size(); first += config.batch_size, ++step) {
      const std::size_t n = std::min(config.batch_size, order.size() - first);
      const nn::Matrix batch = detail::gather_columns(data, std::span(order).subspan(first, n));
      const nn::Matrix noise = draw_noise(model.latent_dim, n, config.noise_half_width, noise_rng);
      RdLoss loss;
      try {
        loss = rd_loss(model, batch, noise);
        nn::adam_step(adam, params, loss.gradients);
      } catch (const DivergenceError& e) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) + ", step " +
                              std::to_string(step) + ": " + e.what());
      }
      model.project();
      const double w = static_cast<double>(n);
      stats.mean_loss += loss.loss * w;
      stats.mean_mse += loss.mse * w;
      stats.mean_l1 += loss.l1 * w;
    }
    const double total = static_cast<double>(order.size());
    stats.mean_loss /= total;
    stats.mean_mse /= total;
    stats.mean_l1 /= total;
    result.log.push_back(stats);
  }
  return result;
}

std::string training_log_csv(const std::vector<EpochStats>& log) {
  std::string out = "epoch,mean_loss,mean_mse,mean_l1\n";
  char buf[128];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g\n", e.epoch, e.mean_loss, e.mean_mse, e.mean_l1);
    out += buf;
  }
  return out;
}

}  // namespace fic
