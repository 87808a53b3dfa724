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

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fic/codec.hpp"
#include "fic/nn/layers.hpp"

namespace fic::detail {

using BatchLoss = std::function<std::pair<double, nn::Gradients>(std::span<const std::size_t> rows)>;

// Seeded shuffled mini-batch Adam over `n` samples. Returns the per-epoch
// mean loss; throws DivergenceError naming epoch and step on a non-finite loss.
std::vector<double> minibatch_descent(std::size_t n, const TrainConfig& config,
                                      std::span<const nn::ParamBlock> params, const BatchLoss& batch_loss,
                                      const std::function<void()>& project);

}  // namespace fic::detail
