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
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fic::nn {

// Batches are column-major: one sample per column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A named, mutable view of one contiguous parameter array.
struct ParamBlock {
  std::string name;
  std::span<double> values;
};

// Gradients laid out congruently with a list of ParamBlocks.
using Gradients = std::vector<std::vector<double>>;

inline constexpr double kBetaFloor = 1e-6;

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out

  std::size_t in() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out() const { return static_cast<std::size_t>(weights.rows()); }

  // All-zero layer of the given shape.
  static DenseLayer zeros(std::size_t fan_in, std::size_t fan_out);
  static DenseLayer identity(std::size_t width);

  void validate() const;
  bool operator==(const DenseLayer& other) const;
};

enum class GdnMode : std::uint8_t { kForward = 0, kInverse = 1 };

// Generalized divisive normalization over a vector of width n:
//   forward: y_i = x_i / sqrt(beta_i + sum_j gamma_ij x_j^2)
//   inverse: y_i = x_i * sqrt(beta_i + sum_j gamma_ij x_j^2)
// beta >= beta_floor and gamma >= 0 are restored by project() after updates.
struct GdnLayer {
  Vector beta;
  Matrix gamma;
  GdnMode mode = GdnMode::kForward;
  double beta_floor = kBetaFloor;

  std::size_t width() const { return static_cast<std::size_t>(beta.size()); }

  // beta = 1, gamma = 1e-3 * I.
  static GdnLayer create(std::size_t width, GdnMode mode);
  // beta = 1, gamma = 0: the identity map in both modes.
  static GdnLayer identity(std::size_t width, GdnMode mode);

  void project();
  void validate() const;
  bool operator==(const GdnLayer& other) const;
};

using Layer = std::variant<DenseLayer, GdnLayer>;

// Glorot-uniform weights in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero bias.
DenseLayer xavier_init(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed);

Matrix forward(const DenseLayer& layer, const Matrix& x);
Matrix forward(const GdnLayer& layer, const Matrix& x);

std::size_t in_width(const Layer& layer);
std::size_t out_width(const Layer& layer);

// Appends the layer's parameter blocks (weights, bias | beta, gamma).
void append_params(Layer& layer, const std::string& prefix, std::vector<ParamBlock>& out);

}  // namespace fic::nn
