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

#include "training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fic/error.hpp"
#include "fic/nn/adam.hpp"

namespace fic::detail {

std::vector<double> minibatch_descent(std::size_t n, const TrainConfig& config,
                                      std::span<const nn::ParamBlock> params, const BatchLoss& batch_loss,
                                      const std::function<void()>& project) {
  if (n == 0) throw ConfigError("no training samples");
  if (config.batch_size == 0) throw ConfigError("batch size must be positive");
  nn::AdamState adam;
  adam.config.learning_rate = config.learning_rate;
  std::mt19937_64 rng(derive_seed(config.seed, 20));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> epoch_loss;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    std::size_t step = 0;
    for (std::size_t first = 0; first < n; first += config.batch_size, ++step) {
      const std::size_t b = std::min(config.batch_size, n - first);
      try {
        auto [loss, grads] = batch_loss(std::span<const std::size_t>(order).subspan(first, b));
        if (!std::isfinite(loss)) throw DivergenceError("non-finite loss");
        nn::adam_step(adam, params, grads);
        sum += loss * static_cast<double>(b);
      } catch (const DivergenceError& e) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) + ", step " +
                              std::to_string(step) + ": " + e.what());
      }
      project();
    }
    epoch_loss.push_back(sum / static_cast<double>(n));
  }
  return epoch_loss;
}

}  // namespace fic::detail
