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

#include <string>
#include <variant>
#include <vector>

#include "fic/nn/layers.hpp"

namespace fic::nn {

// Records the activations of one forward pass so that backward() can compute
// parameter and input gradients. Entries hold non-owning pointers to the
// layers, which must outlive the tape. Single pass, single owner.
class GradientTape {
 public:
  struct Entry {
    std::variant<const DenseLayer*, const GdnLayer*> layer;
    Matrix input;
    Matrix norm;  // GDN only: beta + gamma * x^2
  };

  void record(const DenseLayer& layer, const Matrix& input);
  void record(const GdnLayer& layer, const Matrix& input, Matrix norm);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  const Matrix& output_shape_hint() const { return last_output_; }
  void set_output(const Matrix& out) { last_output_ = out; }

 private:
  std::vector<Entry> entries_;
  Matrix last_output_;
};

struct DenseGradient {
  Matrix weights;
  Vector bias;
};

struct GdnGradient {
  Vector beta;
  Matrix gamma;
};

using LayerGradient = std::variant<DenseGradient, GdnGradient>;

struct TapeGradients {
  std::vector<LayerGradient> layers;  // tape order
  Matrix input;
};

// Forward passes that optionally record onto a tape.
Matrix dense_forward(const DenseLayer& layer, const Matrix& x, GradientTape* tape = nullptr);
Matrix gdn_forward(const GdnLayer& layer, const Matrix& x, GradientTape* tape = nullptr);

// Exact gradients of sum(output_grad .* output) with respect to every
// recorded layer's parameters and the pass input. Gradients are summed over
// the batch columns.
TapeGradients backward(const GradientTape& tape, const Matrix& output_grad);

// Flattens layer gradients in tape order, matching Sequential::parameters().
void append_gradients(const TapeGradients& grads, Gradients& out);

// A fixed chain of layers.
class Sequential {
 public:
  Sequential() = default;
  explicit Sequential(std::vector<Layer> layers);

  Matrix forward(const Matrix& x, GradientTape* tape = nullptr) const;

  std::vector<ParamBlock> parameters(const std::string& prefix);
  // Restores GDN parameter constraints after an optimizer step.
  void project();

  std::size_t in() const;
  std::size_t out() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  bool operator==(const Sequential& other) const = default;

 private:
  std::vector<Layer> layers_;
};

}  // namespace fic::nn
