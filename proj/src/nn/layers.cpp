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

#include "fic/nn/layers.hpp"

#include <cmath>
#include <random>

#include "fic/error.hpp"

namespace fic::nn {

DenseLayer DenseLayer::zeros(std::size_t fan_in, std::size_t fan_out) {
  if (fan_in == 0 || fan_out == 0) throw InvalidDimension("dense layer dimensions must be positive");
  return {Matrix::Zero(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in)),
          Vector::Zero(static_cast<Eigen::Index>(fan_out))};
}

DenseLayer DenseLayer::identity(std::size_t width) {
  auto layer = zeros(width, width);
  layer.weights.setIdentity();
  return layer;
}

void DenseLayer::validate() const {
  if (weights.rows() == 0 || weights.cols() == 0) throw ShapeError("dense layer has an empty weight matrix");
  if (bias.size() != weights.rows()) throw ShapeError("dense bias length does not match output width");
  if (!weights.allFinite() || !bias.allFinite()) throw Error("dense layer has non-finite parameters");
}

bool DenseLayer::operator==(const DenseLayer& other) const {
  return weights.rows() == other.weights.rows() && weights.cols() == other.weights.cols() &&
         weights == other.weights && bias == other.bias;
}

GdnLayer GdnLayer::create(std::size_t width, GdnMode mode) {
  auto layer = identity(width, mode);
  layer.gamma.diagonal().setConstant(1e-3);
  return layer;
}

GdnLayer GdnLayer::identity(std::size_t width, GdnMode mode) {
  if (width == 0) throw InvalidDimension("GDN width must be positive");
  const auto n = static_cast<Eigen::Index>(width);
  return {Vector::Ones(n), Matrix::Zero(n, n), mode, kBetaFloor};
}

void GdnLayer::project() {
  beta = beta.cwiseMax(beta_floor);
  gamma = gamma.cwiseMax(0.0);
}

void GdnLayer::validate() const {
  if (gamma.rows() != beta.size() || gamma.cols() != beta.size()) {
    throw ShapeError("GDN gamma must be square with side equal to beta's length");
  }
  if (!(beta_floor > 0.0)) throw Error("GDN beta_floor must be positive");
  if ((beta.array() < beta_floor).any()) throw Error("GDN beta below floor");
  if ((gamma.array() < 0.0).any()) throw Error("GDN gamma has negative entries");
  if (!beta.allFinite() || !gamma.allFinite()) throw Error("GDN layer has non-finite parameters");
}

bool GdnLayer::operator==(const GdnLayer& other) const {
  return mode == other.mode && beta_floor == other.beta_floor && beta.size() == other.beta.size() &&
         beta == other.beta && gamma == other.gamma;
}

DenseLayer xavier_init(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed) {
  auto layer = DenseLayer::zeros(fan_in, fan_out);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = dist(rng);
  }
  return layer;
}

Matrix forward(const DenseLayer& layer, const Matrix& x) {
  if (x.rows() != layer.weights.cols()) {
    throw ShapeError("dense input has " + std::to_string(x.rows()) + " rows, layer expects " +
                     std::to_string(layer.weights.cols()));
  }
  Matrix y = layer.weights * x;
  y.colwise() += layer.bias;
  return y;
}

namespace {

Matrix gdn_norm(const GdnLayer& layer, const Matrix& x) {
  Matrix s = layer.gamma * x.cwiseAbs2();
  s.colwise() += layer.beta;
  return s;
}

}  // namespace

Matrix forward(const GdnLayer& layer, const Matrix& x) {
  if (x.rows() != layer.beta.size()) {
    throw ShapeError("GDN input has " + std::to_string(x.rows()) + " rows, layer width is " +
                     std::to_string(layer.beta.size()));
  }
  const Matrix s = gdn_norm(layer, x);
  if (layer.mode == GdnMode::kForward) return x.cwiseQuotient(s.cwiseSqrt());
  return x.cwiseProduct(s.cwiseSqrt());
}

std::size_t in_width(const Layer& layer) {
  return std::visit(
      [](const auto& l) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, DenseLayer>) {
          return l.in();
        } else {
          return l.width();
        }
      },
      layer);
}

std::size_t out_width(const Layer& layer) {
  return std::visit(
      [](const auto& l) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, DenseLayer>) {
          return l.out();
        } else {
          return l.width();
        }
      },
      layer);
}

void append_params(Layer& layer, const std::string& prefix, std::vector<ParamBlock>& out) {
  if (auto* d = std::get_if<DenseLayer>(&layer)) {
    out.push_back({prefix + ".weights", {d->weights.data(), static_cast<std::size_t>(d->weights.size())}});
    out.push_back({prefix + ".bias", {d->bias.data(), static_cast<std::size_t>(d->bias.size())}});
  } else {
    auto& g = std::get<GdnLayer>(layer);
    out.push_back({prefix + ".beta", {g.beta.data(), static_cast<std::size_t>(g.beta.size())}});
    out.push_back({prefix + ".gamma", {g.gamma.data(), static_cast<std::size_t>(g.gamma.size())}});
  }
}

}  // namespace fic::nn
