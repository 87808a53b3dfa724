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

#include "fic/enhance.hpp"

#include <cmath>

#include "fic/error.hpp"
#include "fic/sq.hpp"
#include "training.hpp"

namespace fic {

std::size_t EnhancerModel::hidden_dim() const { return nn::out_width(net.layers().front()); }

EnhancerModel EnhancerModel::create(std::size_t latent_dim, std::size_t hidden_dim, double r_clip,
                                    std::string source_id, std::string target_id, std::uint64_t seed) {
  if (latent_dim == 0 || hidden_dim == 0) throw InvalidDimension("enhancer dimensions must be positive");
  if (!(r_clip > 0.0)) throw ConfigError("r_clip must be positive");
  EnhancerModel enh;
  enh.net = nn::Sequential({nn::xavier_init(latent_dim, hidden_dim, detail::derive_seed(seed, 31)),
                            nn::GdnLayer::create(hidden_dim, nn::GdnMode::kForward),
                            nn::xavier_init(hidden_dim, latent_dim, detail::derive_seed(seed, 32))});
  enh.r_clip = r_clip;
  enh.source_model_id = std::move(source_id);
  enh.target_model_id = std::move(target_id);
  return enh;
}

EnhancerModel EnhancerModel::identity(std::size_t latent_dim, double r_clip, std::string source_id,
                                      std::string target_id) {
  EnhancerModel enh;
  enh.net = nn::Sequential({nn::DenseLayer::identity(latent_dim),
                            nn::GdnLayer::identity(latent_dim, nn::GdnMode::kForward),
                            nn::DenseLayer::identity(latent_dim)});
  enh.r_clip = r_clip;
  enh.source_model_id = std::move(source_id);
  enh.target_model_id = std::move(target_id);
  return enh;
}

std::vector<nn::ParamBlock> EnhancerModel::parameters() { return net.parameters("enh"); }

void EnhancerModel::project() { net.project(); }

void EnhancerModel::validate() const {
  if (net.layers().size() != 3 || net.in() != net.out()) throw ShapeError("enhancer must map M -> H_e -> M");
  if (!(r_clip > 0.0)) throw ConfigError("enhancer r_clip must be positive");
}

nn::Matrix enhance_batch(const EnhancerModel& enh, const nn::Matrix& c_low) {
  if (c_low.rows() != static_cast<Eigen::Index>(enh.latent_dim())) {
    throw ShapeError("latent width " + std::to_string(c_low.rows()) + " does not match enhancer M=" +
                     std::to_string(enh.latent_dim()));
  }
  const double r = enh.r_clip;
  return (r * enh.net.forward(c_low / r)).cwiseMax(-r).cwiseMin(r);
}

LatentCode enhance_latent(const EnhancerModel& enh, const LatentCode& c_low) {
  const nn::Matrix x =
      Eigen::Map<const nn::Matrix>(c_low.values.data(), static_cast<Eigen::Index>(c_low.values.size()), 1);
  const nn::Matrix y = enhance_batch(enh, x);
  return {std::vector<double>(y.data(), y.data() + y.size()), false};
}

EnhancerLoss enhancer_loss(const EnhancerModel& enh, const nn::Matrix& c_low, const nn::Matrix& c_high,
                           bool with_gradients) {
  if (c_low.rows() != static_cast<Eigen::Index>(enh.latent_dim()) || c_high.rows() != c_low.rows() ||
      c_high.cols() != c_low.cols()) {
    throw ShapeError("enhancer loss: latent batches must both be M x B");
  }
  const double r = enh.r_clip;
  const double batch = static_cast<double>(c_low.cols());
  nn::GradientTape tape;
  const nn::Matrix out = enh.net.forward(c_low / r, with_gradients ? &tape : nullptr);
  // Enh(c)/r = clip(Net(c/r), -1, 1)
  const nn::Matrix y = out.cwiseMax(-1.0).cwiseMin(1.0);
  const nn::Matrix diff = y - c_high / r;
  EnhancerLoss result;
  result.loss = diff.squaredNorm() / batch;
  if (!std::isfinite(result.loss)) throw DivergenceError("non-finite enhancer loss");
  if (!with_gradients) return result;
  const nn::Matrix pass = out.unaryExpr([](double v) { return (v > -1.0 && v < 1.0) ? 1.0 : 0.0; });
  const auto grads = nn::backward(tape, ((2.0 / batch) * diff).cwiseProduct(pass));
  nn::append_gradients(grads, result.gradients);
  return result;
}

LatentPairs make_latent_pairs(const CodecModel& low, const CodecModel& high, const FeatureSet& features) {
  const nn::Matrix f = features.columns();
  const double r = high.r_clip;
  return {encode_batch(low, f, EncodeMode::kInfer), high.encoder.forward(f).cwiseMax(-r).cwiseMin(r)};
}

TrainedEnhancer train_enhancer(const CodecModel& low, const CodecModel& high, const FeatureSet& features,
                               const TrainConfig& config) {
  if (low.latent_dim != high.latent_dim) {
    throw ConfigError("low- and high-rate codecs have different latent widths (" +
                      std::to_string(low.latent_dim) + " vs " + std::to_string(high.latent_dim) + ")");
  }
  if (low.r_clip != high.r_clip) throw ConfigError("low- and high-rate codecs use different r_clip");
  if (low.feature_dim != high.feature_dim) throw ConfigError("low- and high-rate codecs differ in D");
  features.validate();
  if (features.dim != low.feature_dim) throw ConfigError("feature width does not match the codecs");

  const LatentPairs pairs = make_latent_pairs(low, high, features);
  TrainedEnhancer result{EnhancerModel::create(low.latent_dim, low.latent_dim, low.r_clip, low.model_id,
                                               high.model_id, config.seed),
                         {}};
  EnhancerModel& enh = result.model;
  auto params = enh.parameters();
  result.epoch_loss = detail::minibatch_descent(
      features.count, config, params,
      [&](std::span<const std::size_t> rows) {
        auto loss = enhancer_loss(enh, detail::gather_columns(pairs.c_low, rows),
                                  detail::gather_columns(pairs.c_high, rows));
        return std::make_pair(loss.loss, std::move(loss.gradients));
      },
      [&] { enh.project(); });
  return result;
}

SqeModel SqeModel::create(std::size_t dim, int qp, std::uint64_t seed) {
  SqeModel sqe;
  sqe.block = nn::Sequential({nn::xavier_init(dim, dim, detail::derive_seed(seed, 41)),
                              nn::GdnLayer::create(dim, nn::GdnMode::kForward), nn::DenseLayer::zeros(dim, dim)});
  sqe.qp = qp;
  return sqe;
}

SqeModel SqeModel::zeros(std::size_t dim, int qp) {
  SqeModel sqe;
  sqe.block = nn::Sequential({nn::DenseLayer::zeros(dim, dim), nn::GdnLayer::create(dim, nn::GdnMode::kForward),
                              nn::DenseLayer::zeros(dim, dim)});
  sqe.qp = qp;
  return sqe;
}

std::vector<nn::ParamBlock> SqeModel::parameters() { return block.parameters("sqe"); }

void SqeModel::project() { block.project(); }

void SqeModel::validate() const {
  if (block.layers().size() != 3 || block.in() != block.out() || nn::out_width(block.layers()[0]) != block.in()) {
    throw ShapeError("SQ-E block must map D -> D -> D");
  }
}

nn::Matrix apply_sqe_batch(const SqeModel& sqe, const nn::Matrix& f_sq) {
  if (f_sq.rows() != static_cast<Eigen::Index>(sqe.dim())) {
    throw ShapeError("feature width " + std::to_string(f_sq.rows()) + " does not match SQ-E D=" +
                     std::to_string(sqe.dim()));
  }
  return f_sq + sqe.block.forward(f_sq);
}

std::vector<double> apply_sqe(const SqeModel& sqe, std::span<const double> f_sq) {
  const nn::Matrix x = Eigen::Map<const nn::Matrix>(f_sq.data(), static_cast<Eigen::Index>(f_sq.size()), 1);
  const nn::Matrix y = apply_sqe_batch(sqe, x);
  return {y.data(), y.data() + y.size()};
}

SqeLoss sqe_loss(const SqeModel& sqe, const nn::Matrix& f_sq, const nn::Matrix& f_raw, bool with_gradients) {
  if (f_sq.rows() != static_cast<Eigen::Index>(sqe.dim()) || f_raw.rows() != f_sq.rows() ||
      f_raw.cols() != f_sq.cols()) {
    throw ShapeError("SQ-E loss: batches must both be D x B");
  }
  const double batch = static_cast<double>(f_sq.cols());
  nn::GradientTape tape;
  const nn::Matrix diff = f_sq + sqe.block.forward(f_sq, with_gradients ? &tape : nullptr) - f_raw;
  SqeLoss result;
  result.loss = diff.squaredNorm() / batch;
  if (!std::isfinite(result.loss)) throw DivergenceError("non-finite SQ-E loss");
  if (!with_gradients) return result;
  nn::append_gradients(nn::backward(tape, (2.0 / batch) * diff), result.gradients);
  return result;
}

TrainedSqe train_sqe(const FeatureSet& features, int qp, const TrainConfig& config) {
  features.validate();
  const nn::Matrix raw = features.columns();
  const FeatureSet rec = sq_reconstruct(features, qp);
  const nn::Matrix sq = rec.columns();
  TrainedSqe result{SqeModel::create(features.dim, qp, config.seed), {}};
  SqeModel& sqe = result.model;
  auto params = sqe.parameters();
  result.epoch_loss = detail::minibatch_descent(
      features.count, config, params,
      [&](std::span<const std::size_t> rows) {
        auto loss = sqe_loss(sqe, detail::gather_columns(sq, rows), detail::gather_columns(raw, rows));
        return std::make_pair(loss.loss, std::move(loss.gradients));
      },
      [&] { sqe.project(); });
  return result;
}

}  // namespace fic
