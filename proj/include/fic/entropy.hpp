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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fic/codec.hpp"

namespace fic {

struct SymbolAlphabet {
  std::int32_t min_symbol = -20;
  std::int32_t max_symbol = 20;

  std::size_t size() const { return static_cast<std::size_t>(max_symbol - min_symbol + 1); }
  bool contains(std::int64_t s) const { return s >= min_symbol && s <= max_symbol; }
  // min <= 0 <= max, size >= 2 and size within the coder's frequency budget.
  void validate() const;

  static SymbolAlphabet symmetric(std::int32_t bound) { return {-bound, bound}; }

  bool operator==(const SymbolAlphabet&) const = default;
};

// Largest alphabet the 16-bit frequency budget supports.
inline constexpr std::size_t kMaxAlphabet = std::size_t{1} << 15;
inline constexpr std::uint32_t kMaxTotal = std::uint32_t{1} << 16;

// Per-dimension adaptive frequency tables with add-one smoothing: every count
// starts at 1 and grows by 1 per coded symbol. A table whose total exceeds
// kMaxTotal is halved (rounding up), which keeps every count >= 1.
class AdaptiveModel {
 public:
  AdaptiveModel(std::size_t dims, SymbolAlphabet alphabet);

  std::uint32_t frequency(std::size_t dim, std::size_t index) const { return freq_[dim][index]; }
  std::uint32_t cumulative(std::size_t dim, std::size_t index) const;
  std::uint32_t total(std::size_t dim) const { return totals_[dim]; }
  // Index whose cumulative interval contains `target`.
  std::size_t find(std::size_t dim, std::uint32_t target) const;
  void update(std::size_t dim, std::size_t index);

  std::size_t dims() const { return freq_.size(); }
  const SymbolAlphabet& alphabet() const { return alphabet_; }

  bool operator==(const AdaptiveModel& other) const { return freq_ == other.freq_; }

 private:
  void rebuild(std::size_t dim);

  SymbolAlphabet alphabet_;
  std::vector<std::vector<std::uint32_t>> freq_;
  std::vector<std::vector<std::uint32_t>> tree_;  // Fenwick, 1-based
  std::vector<std::uint32_t> totals_;
};

// 32-bit range coder with carry propagation. Intervals are renormalized
// whenever the range drops below 2^24, so totals up to 2^16 keep >= 8 bits
// of per-symbol precision.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);
  // Emits the shortest tail that pins the final interval; trailing zero
  // bytes are dropped because the decoder reads zeros past the end.
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  bool has_cache_ = false;
  std::uint64_t pending_ = 0;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);
  std::uint32_t target(std::uint32_t total);
  void consume(std::uint32_t cum, std::uint32_t freq);

 private:
  std::uint8_t next();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t total_ = 1;
};

struct FeatureBitstream {
  std::string model_id;
  std::uint32_t count = 0;         // N codes
  std::uint16_t width = 0;         // M symbols per code
  SymbolAlphabet alphabet;
  std::uint64_t payload_bits = 0;  // 8 * payload.size()
  std::vector<std::uint8_t> payload;

  bool operator==(const FeatureBitstream&) const = default;
};

// Codes `count` x `width` symbols laid out code-major (code 0 dims 0..M-1,
// then code 1, ...). Dimension j of every code shares one adaptive table.
FeatureBitstream ac_encode(std::span<const std::int32_t> symbols, std::size_t count, std::size_t width,
                           const SymbolAlphabet& alphabet, const std::string& model_id);
FeatureBitstream ac_encode(std::span<const LatentCode> codes, const SymbolAlphabet& alphabet,
                           const std::string& model_id);

// Decodes and verifies that the payload is the canonical encoding of the
// decoded symbols, so corrupted payloads fail instead of decoding silently.
std::vector<std::int32_t> ac_decode_symbols(const FeatureBitstream& bs);
std::vector<LatentCode> ac_decode(const FeatureBitstream& bs);
// As above, additionally requiring the header alphabet to equal `alphabet`.
std::vector<LatentCode> ac_decode(const FeatureBitstream& bs, const SymbolAlphabet& alphabet);

struct RateReport {
  std::uint64_t payload_bits = 0;
  double bits_per_feature = 0.0;
  double bits_per_dim = 0.0;
};

RateReport measure_rate(const FeatureBitstream& bs, std::size_t feature_dim);

// "FCB1" container.
std::vector<std::uint8_t> encode_bitstream(const FeatureBitstream& bs);
FeatureBitstream decode_bitstream(std::span<const std::uint8_t> bytes);
FeatureBitstream read_bitstream(const std::filesystem::path& path);
void write_bitstream(const std::filesystem::path& path, const FeatureBitstream& bs);

}  // namespace fic
