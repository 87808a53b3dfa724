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

#include "fic/sq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fic/error.hpp"

namespace fic {

double qstep_from_qp(int qp) { return std::exp2(static_cast<double>(qp - 4) / 6.0 - 10.0); }

std::vector<std::int64_t> sq_quantize_step(std::span<const double> f, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("quantization step must be positive and finite");
  std::vector<std::int64_t> out(f.size());
  constexpr double kLimit = 9.0e15;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw Error("non-finite value at component " + std::to_string(i));
    const double q = std::floor(f[i] / step);
    if (std::abs(q) > kLimit) throw ConfigError("quantized value overflows; use a larger qp");
    auto c = static_cast<std::int64_t>(q);
    // f / step is rounded; nudge c so the floor sandwich holds exactly.
    if (static_cast<double>(c) * step > f[i]) --c;
    if (static_cast<double>(c + 1) * step <= f[i]) ++c;
    out[i] = c;
  }
  return out;
}

std::vector<double> sq_dequantize_step(std::span<const std::int64_t> c, double step) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = static_cast<double>(c[i]) * step;
  return out;
}

std::vector<std::int64_t> sq_quantize(std::span<const double> f, int qp) {
  return sq_quantize_step(f, qstep_from_qp(qp));
}

std::vector<double> sq_dequantize(std::span<const std::int64_t> c, int qp) {
  return sq_dequantize_step(c, qstep_from_qp(qp));
}

FeatureSet sq_reconstruct(const FeatureSet& features, int qp) {
  FeatureSet out = features;
  const auto c = sq_quantize(features.values, qp);
  out.values = sq_dequantize(c, qp);
  return out;
}

SqResult sq_codec_rate(const FeatureSet& features, int qp) {
  features.validate();
  const auto c = sq_quantize(features.values, qp);
  const auto [lo_it, hi_it] = std::minmax_element(c.begin(), c.end());
  const std::int64_t lo = std::min<std::int64_t>(*lo_it, 0);
  std::int64_t hi = std::max<std::int64_t>(*hi_it, 0);
  if (lo == 0 && hi == 0) hi = 1;
  if (lo < std::numeric_limits<std::int16_t>::min() || hi > std::numeric_limits<std::int16_t>::max() ||
      static_cast<std::size_t>(hi - lo + 1) > kMaxAlphabet) {
    throw ConfigError("SQ symbols span [" + std::to_string(lo) + ", " + std::to_string(hi) + "] at qp " +
                      std::to_string(qp) + ", beyond the bitstream alphabet limits; use a larger qp");
  }
  const SymbolAlphabet alphabet{static_cast<std::int32_t>(lo), static_cast<std::int32_t>(hi)};
  std::vector<std::int32_t> symbols(c.begin(), c.end());
  SqResult result;
  result.bitstream = ac_encode(symbols, features.count, features.dim, alphabet, "SQ" + std::to_string(qp));
  result.rate = measure_rate(result.bitstream, features.dim);
  result.reconstructed = features;
  result.reconstructed.values = sq_dequantize(c, qp);
  return result;
}

FeatureSet sq_decode(const FeatureBitstream& bs, int qp) {
  const auto symbols = ac_decode_symbols(bs);
  std::vector<std::int64_t> c(symbols.begin(), symbols.end());
  FeatureSet out;
  out.count = bs.count;
  out.dim = bs.width;
  out.values = sq_dequantize(c, qp);
  return out;
}

}  // namespace fic
