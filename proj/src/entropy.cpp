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

#include "fic/entropy.hpp"

#include <algorithm>

#include "fic/binary_io.hpp"
#include "fic/error.hpp"

namespace fic {

namespace {

constexpr std::uint16_t kBitstreamVersion = 1;
constexpr std::uint32_t kTop = 1u << 24;

}  // namespace

void SymbolAlphabet::validate() const {
  if (min_symbol > 0 || max_symbol < 0 || max_symbol - min_symbol < 1) {
    throw ConfigError("alphabet [" + std::to_string(min_symbol) + ", " + std::to_string(max_symbol) +
                      "] must contain 0 and at least 2 symbols");
  }
  if (size() > kMaxAlphabet) {
    throw ConfigError("alphabet of " + std::to_string(size()) + " symbols exceeds the coder limit of " +
                      std::to_string(kMaxAlphabet));
  }
}

AdaptiveModel::AdaptiveModel(std::size_t dims, SymbolAlphabet alphabet) : alphabet_(alphabet) {
  alphabet_.validate();
  const std::size_t n = alphabet_.size();
  freq_.assign(dims, std::vector<std::uint32_t>(n, 1));
  tree_.assign(dims, std::vector<std::uint32_t>(n + 1, 0));
  totals_.assign(dims, static_cast<std::uint32_t>(n));
  for (std::size_t d = 0; d < dims; ++d) rebuild(d);
}

void AdaptiveModel::rebuild(std::size_t dim) {
  auto& tree = tree_[dim];
  const auto& f = freq_[dim];
  std::fill(tree.begin(), tree.end(), 0);
  std::uint32_t total = 0;
  for (std::size_t i = 1; i < tree.size(); ++i) {
    tree[i] += f[i - 1];
    total += f[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent < tree.size()) tree[parent] += tree[i];
  }
  totals_[dim] = total;
}

std::uint32_t AdaptiveModel::cumulative(std::size_t dim, std::size_t index) const {
  const auto& tree = tree_[dim];
  std::uint32_t sum = 0;
  for (std::size_t i = index; i > 0; i -= i & (~i + 1)) sum += tree[i];
  return sum;
}

std::size_t AdaptiveModel::find(std::size_t dim, std::uint32_t target) const {
  const auto& tree = tree_[dim];
  std::size_t pos = 0;
  std::size_t step = 1;
  while (step * 2 < tree.size()) step *= 2;
  for (; step > 0; step /= 2) {
    if (pos + step < tree.size() && tree[pos + step] <= target) {
      pos += step;
      target -= tree[pos];
    }
  }
  return pos;
}

void AdaptiveModel::update(std::size_t dim, std::size_t index) {
  freq_[dim][index] += 1;
  totals_[dim] += 1;
  if (totals_[dim] > kMaxTotal) {
    for (auto& f : freq_[dim]) f = (f + 1) / 2;
    rebuild(dim);
    return;
  }
  auto& tree = tree_[dim];
  for (std::size_t i = index + 1; i < tree.size(); i += i & (~i + 1)) tree[i] += 1;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
  // Exact split: floor(range * cum / total) loses under one unit per symbol.
  const std::uint64_t lo = static_cast<std::uint64_t>(range_) * cum / total;
  const std::uint64_t hi = static_cast<std::uint64_t>(range_) * (cum + freq) / total;
  low_ += lo;
  range_ = static_cast<std::uint32_t>(hi - lo);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  if (low_ < 0xFF000000ull || low_ > 0xFFFFFFFFull) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    // The interval never leaves [0, 1), so the leading byte a classic coder
    // emits here would always be zero; it is omitted.
    if (has_cache_) out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
    for (; pending_ > 0; --pending_) out_.push_back(static_cast<std::uint8_t>(0xFF + carry));
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
    has_cache_ = true;
  } else {
    ++pending_;
  }
  low_ = (low_ << 8) & 0xFFFFFFFFull;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  const std::uint64_t high = low_ + range_;
  for (std::uint64_t mask : {0xFFFFFFFFull, 0xFFFFFFull, 0xFFFFull, 0xFFull, 0ull}) {
    const std::uint64_t x = (low_ + mask) & ~mask;
    if (x < high) {
      low_ = x;
      break;
    }
  }
  for (int i = 0; i < 5; ++i) shift_low();
  while (!out_.empty() && out_.back() == 0) out_.pop_back();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next();
}

std::uint8_t RangeDecoder::next() { return pos_ < bytes_.size() ? bytes_[pos_++] : 0; }

std::uint32_t RangeDecoder::target(std::uint32_t total) {
  total_ = total;
  // Largest t with floor(range * t / total) <= code.
  const std::uint64_t t = ((static_cast<std::uint64_t>(code_) + 1) * total - 1) / range_;
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(t, total - 1));
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq) {
  const std::uint64_t lo = static_cast<std::uint64_t>(range_) * cum / total_;
  const std::uint64_t hi = static_cast<std::uint64_t>(range_) * (cum + freq) / total_;
  code_ -= static_cast<std::uint32_t>(lo);
  range_ = static_cast<std::uint32_t>(hi - lo);
  while (range_ < kTop) {
    code_ = (code_ << 8) | next();
    range_ <<= 8;
  }
}

FeatureBitstream ac_encode(std::span<const std::int32_t> symbols, std::size_t count, std::size_t width,
                           const SymbolAlphabet& alphabet, const std::string& model_id) {
  alphabet.validate();
  if (width == 0 || width > UINT16_MAX) throw ConfigError("code width must be in [1, 65535]");
  if (count > UINT32_MAX) throw ConfigError("too many codes for one bitstream");
  if (symbols.size() != count * width) {
    throw ShapeError("expected " + std::to_string(count * width) + " symbols, got " +
                     std::to_string(symbols.size()));
  }
  AdaptiveModel model(width, alphabet);
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::int32_t s = symbols[i];
    if (!alphabet.contains(s)) {
      throw EncodeError(i, "value " + std::to_string(s) + " outside alphabet [" +
                               std::to_string(alphabet.min_symbol) + ", " + std::to_string(alphabet.max_symbol) +
                               "] (code " + std::to_string(i / width) + ", dim " + std::to_string(i % width) + ")");
    }
    const std::size_t dim = i % width;
    const auto idx = static_cast<std::size_t>(s - alphabet.min_symbol);
    enc.encode(model.cumulative(dim, idx), model.frequency(dim, idx), model.total(dim));
    model.update(dim, idx);
  }
  FeatureBitstream bs;
  bs.model_id = model_id;
  bs.count = static_cast<std::uint32_t>(count);
  bs.width = static_cast<std::uint16_t>(width);
  bs.alphabet = alphabet;
  bs.payload = enc.finish();
  bs.payload_bits = 8 * static_cast<std::uint64_t>(bs.payload.size());
  return bs;
}

FeatureBitstream ac_encode(std::span<const LatentCode> codes, const SymbolAlphabet& alphabet,
                           const std::string& model_id) {
  const std::size_t width = codes.empty() ? 1 : codes.front().values.size();
  std::vector<std::int32_t> symbols;
  symbols.reserve(codes.size() * width);
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const auto& c = codes[k];
    if (c.values.size() != width) throw ShapeError("code " + std::to_string(k) + " has a different width");
    if (!c.quantized) throw ConfigError("code " + std::to_string(k) + " is not quantized");
    for (double v : c.values) {
      if (v != static_cast<double>(static_cast<std::int64_t>(v)) || !alphabet.contains(static_cast<std::int64_t>(v))) {
        throw EncodeError(symbols.size(), "latent value outside the integer alphabet");
      }
      symbols.push_back(static_cast<std::int32_t>(v));
    }
  }
  return ac_encode(symbols, codes.size(), width, alphabet, model_id);
}

std::vector<std::int32_t> ac_decode_symbols(const FeatureBitstream& bs) {
  bs.alphabet.validate();
  if (bs.width == 0) throw FormatError(0, "bitstream declares zero code width");
  if (bs.payload_bits != 8 * static_cast<std::uint64_t>(bs.payload.size())) {
    throw FormatError(0, "payload_bits does not match payload length");
  }
  const std::size_t n = static_cast<std::size_t>(bs.count) * bs.width;
  if (n > (std::size_t{1} << 31)) throw FormatError(0, "bitstream declares an implausible symbol count");
  AdaptiveModel model(bs.width, bs.alphabet);
  RangeDecoder dec(bs.payload);
  std::vector<std::int32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t dim = i % bs.width;
    const std::uint32_t target = dec.target(model.total(dim));
    const std::size_t idx = model.find(dim, target);
    dec.consume(model.cumulative(dim, idx), model.frequency(dim, idx));
    model.update(dim, idx);
    out[i] = bs.alphabet.min_symbol + static_cast<std::int32_t>(idx);
  }
  const auto canonical = ac_encode(out, bs.count, bs.width, bs.alphabet, bs.model_id);
  if (canonical.payload != bs.payload) {
    throw FormatError(0, "payload is not a valid encoding of " + std::to_string(n) + " symbols (corrupt)");
  }
  return out;
}

std::vector<LatentCode> ac_decode(const FeatureBitstream& bs) {
  const auto symbols = ac_decode_symbols(bs);
  std::vector<LatentCode> out;
  out.reserve(bs.count);
  for (std::size_t k = 0; k < bs.count; ++k) {
    out.push_back(LatentCode::from_symbols(std::span(symbols).subspan(k * bs.width, bs.width)));
  }
  return out;
}

std::vector<LatentCode> ac_decode(const FeatureBitstream& bs, const SymbolAlphabet& alphabet) {
  if (!(bs.alphabet == alphabet)) throw FormatError(0, "bitstream alphabet differs from the expected alphabet");
  return ac_decode(bs);
}

RateReport measure_rate(const FeatureBitstream& bs, std::size_t feature_dim) {
  RateReport r;
  r.payload_bits = bs.payload_bits;
  if (bs.count == 0 || feature_dim == 0) return r;
  r.bits_per_feature = static_cast<double>(bs.payload_bits) / static_cast<double>(bs.count);
  r.bits_per_dim = r.bits_per_feature / static_cast<double>(feature_dim);
  return r;
}

std::vector<std::uint8_t> encode_bitstream(const FeatureBitstream& bs) {
  if (bs.alphabet.min_symbol < INT16_MIN || bs.alphabet.max_symbol > INT16_MAX) {
    throw ConfigError("alphabet bounds do not fit the i16 header fields");
  }
  ByteWriter w;
  w.magic("FCB1");
  w.u16(kBitstreamVersion);
  w.short_string(bs.model_id);
  w.u32(bs.count);
  w.u16(bs.width);
  w.i16(static_cast<std::int16_t>(bs.alphabet.min_symbol));
  w.i16(static_cast<std::int16_t>(bs.alphabet.max_symbol));
  w.u64(bs.payload_bits);
  w.raw(bs.payload);
  return w.take();
}

FeatureBitstream decode_bitstream(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("FCB1");
  const std::size_t version_at = r.offset();
  if (const auto v = r.u16(); v != kBitstreamVersion) {
    throw FormatError(version_at, "unsupported bitstream version " + std::to_string(v));
  }
  FeatureBitstream bs;
  bs.model_id = r.short_string();
  bs.count = r.u32();
  const std::size_t width_at = r.offset();
  bs.width = r.u16();
  if (bs.width == 0) throw FormatError(width_at, "code width must be positive");
  const std::size_t alpha_at = r.offset();
  bs.alphabet.min_symbol = r.i16();
  bs.alphabet.max_symbol = r.i16();
  try {
    bs.alphabet.validate();
  } catch (const ConfigError& e) {
    throw FormatError(alpha_at, e.what());
  }
  const std::size_t bits_at = r.offset();
  bs.payload_bits = r.u64();
  if (bs.payload_bits % 8 != 0) throw FormatError(bits_at, "payload_bits is not a whole number of bytes");
  if (bs.payload_bits / 8 != r.remaining()) {
    throw FormatError(bits_at, "payload_bits declares " + std::to_string(bs.payload_bits / 8) +
                                   " bytes but " + std::to_string(r.remaining()) + " follow");
  }
  auto payload = r.raw(static_cast<std::size_t>(bs.payload_bits / 8));
  bs.payload.assign(payload.begin(), payload.end());
  return bs;
}

FeatureBitstream read_bitstream(const std::filesystem::path& path) { return decode_bitstream(read_file(path)); }

void write_bitstream(const std::filesystem::path& path, const FeatureBitstream& bs) {
  write_file_atomic(path, encode_bitstream(bs));
}

}  // namespace fic
