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
#include <string>
#include <vector>

#include "fic/nn/layers.hpp"
#include "fic/nn/tape.hpp"

namespace fic::nn {

struct BlockError {
  std::string name;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  std::size_t count = 0;
};

struct GradCheckReport {
  std::vector<BlockError> blocks;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// |a - n| / max(|a|, |n|, floor). The floor keeps gradients that are zero up
// to finite-difference noise from reporting spurious relative errors.
double relative_error(double analytic, double numeric, double floor = 1e-6);

// Compares `analytic` against central differences of `loss` taken by
// perturbing each parameter in place (restored afterwards). Failure to meet
// the tolerance is reported, not thrown.
GradCheckReport grad_check(std::span<const ParamBlock> params, const std::function<double()>& loss,
                           const Gradients& analytic, double tolerance, double step = 1e-5);

// A scalar loss of a network output: returns the value and writes dL/dout.
using OutputLoss = std::function<double(const Matrix& output, Matrix* grad)>;

// Gradient check of a Sequential under `loss`, covering every parameter block
// plus the network input (reported as block "input").
GradCheckReport grad_check(Sequential& network, const OutputLoss& loss, const Matrix& input,
                           double tolerance, double step = 1e-5);

}  // namespace fic::nn
