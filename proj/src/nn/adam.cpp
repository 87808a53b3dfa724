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

#include "fic/nn/adam.hpp"

#include <cmath>

#include "fic/error.hpp"

namespace fic::nn {

void adam_step(AdamState& state, std::span<const ParamBlock> params, const Gradients& grads) {
  if (grads.size() != params.size()) {
    throw ShapeError("adam: " + std::to_string(grads.size()) + " gradient blocks for " +
                     std::to_string(params.size()) + " parameter blocks");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (grads[b].size() != params[b].values.size()) {
      throw ShapeError("adam: gradient block " + params[b].name + " has wrong length");
    }
    for (double g : grads[b]) {
      if (!std::isfinite(g)) throw DivergenceError("non-finite gradient in block " + params[b].name);
    }
  }
  if (state.step == 0 && state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.values.size(), 0.0);
      state.second_moment.emplace_back(p.values.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) throw ShapeError("adam: state tracks a different parameter set");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (state.first_moment[b].size() != params[b].values.size()) {
      throw ShapeError("adam: state block " + params[b].name + " has wrong length");
    }
  }

  ++state.step;
  const auto& cfg = state.config;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto values = params[b].values;
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    const auto& g = grads[b];
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace fic::nn
