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

#include "fic/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "fic/error.hpp"

namespace fic::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(std::span<const ParamBlock> params, const std::function<double()>& loss,
                           const Gradients& analytic, double tolerance, double step) {
  if (analytic.size() != params.size()) throw ShapeError("grad_check: block count mismatch");
  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto values = params[b].values;
    if (analytic[b].size() != values.size()) throw ShapeError("grad_check: block " + params[b].name + " size");
    BlockError err{params[b].name, 0.0, 0.0, values.size()};
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = loss();
      values[i] = saved - step;
      const double down = loss();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double rel = relative_error(analytic[b][i], numeric);
      err.max_rel_error = std::max(err.max_rel_error, rel);
      sum += rel;
    }
    if (!values.empty()) err.mean_rel_error = sum / static_cast<double>(values.size());
    report.max_rel_error = std::max(report.max_rel_error, err.max_rel_error);
    report.blocks.push_back(std::move(err));
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

GradCheckReport grad_check(Sequential& network, const OutputLoss& loss, const Matrix& input,
                           double tolerance, double step) {
  GradientTape tape;
  const Matrix out = network.forward(input, &tape);
  Matrix dout;
  loss(out, &dout);
  const TapeGradients tg = backward(tape, dout);

  Matrix probe = input;
  auto params = network.parameters("net");
  params.push_back({"input", {probe.data(), static_cast<std::size_t>(probe.size())}});
  Gradients analytic;
  append_gradients(tg, analytic);
  analytic.emplace_back(tg.input.data(), tg.input.data() + tg.input.size());

  auto eval = [&]() { return loss(network.forward(probe), nullptr); };
  return grad_check(params, eval, analytic, tolerance, step);
}

}  // namespace fic::nn
