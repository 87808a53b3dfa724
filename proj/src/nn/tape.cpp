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

#include "fic/nn/tape.hpp"

#include "fic/error.hpp"

namespace fic::nn {

void GradientTape::record(const DenseLayer& layer, const Matrix& input) {
  entries_.push_back({&layer, input, {}});
}

void GradientTape::record(const GdnLayer& layer, const Matrix& input, Matrix norm) {
  entries_.push_back({&layer, input, std::move(norm)});
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, GradientTape* tape) {
  Matrix y = forward(layer, x);
  if (tape != nullptr) {
    tape->record(layer, x);
    tape->set_output(y);
  }
  return y;
}

Matrix gdn_forward(const GdnLayer& layer, const Matrix& x, GradientTape* tape) {
  if (tape == nullptr) return forward(layer, x);
  if (x.rows() != layer.beta.size()) throw ShapeError("GDN input width mismatch");
  Matrix s = layer.gamma * x.cwiseAbs2();
  s.colwise() += layer.beta;
  Matrix y = layer.mode == GdnMode::kForward ? Matrix(x.cwiseQuotient(s.cwiseSqrt()))
                                             : Matrix(x.cwiseProduct(s.cwiseSqrt()));
  tape->record(layer, x, std::move(s));
  tape->set_output(y);
  return y;
}

namespace {

DenseGradient dense_backward(const DenseLayer& layer, const Matrix& x, const Matrix& g, Matrix& dx) {
  DenseGradient out{g * x.transpose(), g.rowwise().sum()};
  dx = layer.weights.transpose() * g;
  return out;
}

// y = x .* s^p with s = beta + gamma * x^2 and p = -1/2 (GDN) or +1/2 (IGDN).
GdnGradient gdn_backward(const GdnLayer& layer, const Matrix& x, const Matrix& s, const Matrix& g,
                         Matrix& dx) {
  const double p = layer.mode == GdnMode::kForward ? -0.5 : 0.5;
  const Matrix sp = p < 0 ? Matrix(s.cwiseSqrt().cwiseInverse()) : Matrix(s.cwiseSqrt());
  // dL/ds = g .* x .* p * s^(p-1)
  const Matrix ds = (g.array() * x.array() * p * sp.array() / s.array()).matrix();
  const Matrix x2 = x.cwiseAbs2();
  GdnGradient out{ds.rowwise().sum(), ds * x2.transpose()};
  dx = g.cwiseProduct(sp) + 2.0 * x.cwiseProduct(layer.gamma.transpose() * ds);
  return out;
}

}  // namespace

TapeGradients backward(const GradientTape& tape, const Matrix& output_grad) {
  if (tape.empty()) throw ShapeError("backward on an empty tape");
  const Matrix& last = tape.output_shape_hint();
  if (output_grad.rows() != last.rows() || output_grad.cols() != last.cols()) {
    throw ShapeError("output gradient is " + std::to_string(output_grad.rows()) + "x" +
                     std::to_string(output_grad.cols()) + ", recorded output is " +
                     std::to_string(last.rows()) + "x" + std::to_string(last.cols()));
  }
  const auto& entries = tape.entries();
  TapeGradients result;
  result.layers.resize(entries.size());
  Matrix g = output_grad;
  for (std::size_t k = entries.size(); k-- > 0;) {
    const auto& e = entries[k];
    Matrix dx;
    if (const auto* const* d = std::get_if<const DenseLayer*>(&e.layer)) {
      result.layers[k] = dense_backward(**d, e.input, g, dx);
    } else {
      const GdnLayer* gdn = std::get<const GdnLayer*>(e.layer);
      result.layers[k] = gdn_backward(*gdn, e.input, e.norm, g, dx);
    }
    g = std::move(dx);
  }
  result.input = std::move(g);
  return result;
}

void append_gradients(const TapeGradients& grads, Gradients& out) {
  auto push = [&out](const auto& m) { out.emplace_back(m.data(), m.data() + m.size()); };
  for (const auto& lg : grads.layers) {
    if (const auto* d = std::get_if<DenseGradient>(&lg)) {
      push(d->weights);
      push(d->bias);
    } else {
      const auto& g = std::get<GdnGradient>(lg);
      push(g.beta);
      push(g.gamma);
    }
  }
}

Sequential::Sequential(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("empty network");
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    if (out_width(layers_[i - 1]) != in_width(layers_[i])) {
      throw ShapeError("layer " + std::to_string(i) + " input width does not match previous output");
    }
  }
}

Matrix Sequential::forward(const Matrix& x, GradientTape* tape) const {
  Matrix h = x;
  for (const auto& layer : layers_) {
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      h = dense_forward(*d, h, tape);
    } else {
      h = gdn_forward(std::get<GdnLayer>(layer), h, tape);
    }
  }
  return h;
}

std::vector<ParamBlock> Sequential::parameters(const std::string& prefix) {
  std::vector<ParamBlock> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    append_params(layers_[i], prefix + "." + std::to_string(i), out);
  }
  return out;
}

void Sequential::project() {
  for (auto& layer : layers_) {
    if (auto* g = std::get_if<GdnLayer>(&layer)) g->project();
  }
}

std::size_t Sequential::in() const { return layers_.empty() ? 0 : in_width(layers_.front()); }

std::size_t Sequential::out() const { return layers_.empty() ? 0 : out_width(layers_.back()); }

}  // namespace fic::nn
