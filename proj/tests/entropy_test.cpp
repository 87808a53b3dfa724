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

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fic/binary_io.hpp"
#include "fic/entropy.hpp"
#include "fic/error.hpp"
#include "oracles.hpp"

namespace fic {
namespace {

struct Case {
  std::size_t count;
  std::size_t width;
  SymbolAlphabet alphabet;
  std::vector<std::int32_t> symbols;
};

// Random length, width, alphabet and one of several source shapes.
Case random_case(std::mt19937_64& rng) {
  Case c;
  c.count = std::uniform_int_distribution<std::size_t>(0, 300)(rng);
  c.width = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
  const int lo = std::uniform_int_distribution<int>(-60, 0)(rng);
  const int hi = std::uniform_int_distribution<int>(lo == 0 ? 1 : 0, 60)(rng);
  c.alphabet = {lo, hi};
  const int shape = static_cast<int>(rng() % 4);
  std::normal_distribution<double> narrow(0.0, 1.5);
  std::uniform_int_distribution<int> uniform(lo, hi);
  std::geometric_distribution<int> geo(0.6);
  for (std::size_t i = 0; i < c.count * c.width; ++i) {
    int s = 0;
    if (shape == 0) s = uniform(rng);
    if (shape == 1) s = static_cast<int>(std::lround(narrow(rng)));
    if (shape == 2) s = (rng() & 1 ? 1 : -1) * geo(rng);
    if (shape == 3) s = (i % 7 == 0) ? hi : lo;
    c.symbols.push_back(std::clamp(s, lo, hi));
  }
  return c;
}

TEST(RangeCoder, RoundTripAndModelBoundOnRandomCases) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Case c = random_case(rng);
    const auto bs = ac_encode(c.symbols, c.count, c.width, c.alphabet, "rt");
    ASSERT_EQ(ac_decode_symbols(bs), c.symbols) << "trial " << trial;
    const double ideal = oracle::adaptive_code_length(c.symbols, c.width, c.alphabet.min_symbol,
                                                      c.alphabet.max_symbol);
    EXPECT_LE(static_cast<double>(bs.payload_bits), ideal + 64.0) << "trial " << trial;
    EXPECT_EQ(bs.payload_bits, 8 * bs.payload.size());
  }
}

TEST(RangeCoder, ConstantSourceIsNearlyFree) {
  const std::vector<std::int32_t> zeros(10'000, 0);
  const auto bs = ac_encode(zeros, 10'000, 1, {-20, 20}, "z");
  EXPECT_LE(static_cast<double>(bs.payload_bits) / 10'000.0, 0.15);
  EXPECT_EQ(ac_decode_symbols(bs), zeros);
}

TEST(RangeCoder, UniformSourceNearEntropy) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(-20, 20);
  std::vector<std::int32_t> s(10'000);
  for (auto& v : s) v = u(rng);
  const auto bs = ac_encode(s, 10'000, 1, {-20, 20}, "u");
  const double entropy = 10'000.0 * std::log2(41.0);
  EXPECT_NEAR(static_cast<double>(bs.payload_bits), entropy, 0.02 * entropy);
}

TEST(RangeCoder, LongSkewedStreamTriggersRescaling) {
  std::mt19937_64 rng(12);
  std::geometric_distribution<int> geo(0.3);
  std::vector<std::int32_t> s(200'000);
  for (auto& v : s) v = std::min(geo(rng), 20);
  const auto bs = ac_encode(s, s.size(), 1, {-20, 20}, "long");
  EXPECT_EQ(ac_decode_symbols(bs), s);
  EXPECT_LE(static_cast<double>(bs.payload_bits), oracle::adaptive_code_length(s, 1, -20, 20) + 64.0);
}

TEST(RangeCoder, EmptyStream) {
  const auto bs = ac_encode(std::vector<std::int32_t>{}, 0, 32, {-20, 20}, "e");
  EXPECT_LE(bs.payload_bits, 40u);
  EXPECT_TRUE(ac_decode(bs).empty());
}

TEST(RangeCoder, OutOfAlphabetNamesPosition) {
  std::vector<std::int32_t> s{0, 1, 2, 21, 0};
  try {
    ac_encode(s, 1, 5, {-20, 20}, "x");
    FAIL() << "expected EncodeError";
  } catch (const EncodeError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
}

TEST(RangeCoder, CorruptionNeverDecodesSilentlyToOriginal) {
  std::mt19937_64 rng(99);
  int detected = 0, changed = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Case c = random_case(rng);
    if (c.count == 0) continue;
    auto bs = ac_encode(c.symbols, c.count, c.width, c.alphabet, "c");
    if (bs.payload.empty()) continue;
    const std::size_t at = rng() % bs.payload.size();
    bs.payload[at] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    try {
      EXPECT_NE(ac_decode_symbols(bs), c.symbols) << "trial " << trial;
      ++changed;
    } catch (const FormatError&) {
      ++detected;
    }
  }
  EXPECT_GT(detected + changed, 200);
}

TEST(AdaptiveModel, TablesStayPositiveAndConsistent) {
  AdaptiveModel m(2, {-3, 3});
  std::mt19937_64 rng(7);
  for (int i = 0; i < 70'000; ++i) {
    m.update(0, rng() % 2);  // concentrates dim 0 on two symbols, forcing halving
    m.update(1, rng() % 7);
  }
  for (std::size_t d = 0; d < 2; ++d) {
    std::uint32_t running = 0;
    for (std::size_t s = 0; s < 7; ++s) {
      EXPECT_GE(m.frequency(d, s), 1u);
      EXPECT_EQ(m.cumulative(d, s), running);
      for (std::uint32_t t : {running, running + m.frequency(d, s) - 1}) EXPECT_EQ(m.find(d, t), s);
      running += m.frequency(d, s);
    }
    EXPECT_EQ(m.total(d), running);
    EXPECT_LE(m.total(d), kMaxTotal);
  }
}

TEST(AdaptiveModel, IdenticalHistoriesGiveIdenticalTables) {
  AdaptiveModel a(3, {-20, 20}), b(3, {-20, 20});
  std::mt19937_64 rng(17);
  for (int i = 0; i < 5000; ++i) {
    const std::size_t d = i % 3, s = rng() % 41;
    a.update(d, s);
    b.update(d, s);
  }
  EXPECT_EQ(a, b);
}

TEST(Alphabet, Validation) {
  EXPECT_THROW(SymbolAlphabet({1, 5}).validate(), ConfigError);
  EXPECT_THROW(SymbolAlphabet({0, 0}).validate(), ConfigError);
  EXPECT_THROW(SymbolAlphabet({-20000, 20000}).validate(), ConfigError);
  EXPECT_NO_THROW(SymbolAlphabet::symmetric(20).validate());
  EXPECT_EQ(SymbolAlphabet{}.size(), 41u);
}

TEST(Rate, Arithmetic) {
  FeatureBitstream bs;
  bs.count = 8;
  bs.width = 32;
  bs.payload.resize(128);
  bs.payload_bits = 1024;
  const auto r = measure_rate(bs, 128);
  EXPECT_EQ(r.payload_bits, 1024u);
  EXPECT_DOUBLE_EQ(r.bits_per_feature, 128.0);
  EXPECT_DOUBLE_EQ(r.bits_per_dim, 1.0);
  bs.count = 1;
  EXPECT_DOUBLE_EQ(measure_rate(bs, 128).bits_per_feature, 1024.0);
}

TEST(Rate, AdaptiveModelAmortizes) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<std::int32_t> once(100 * 16);
  for (auto& v : once) v = std::clamp(static_cast<int>(std::lround(n(rng))), -20, 20);
  std::vector<std::int32_t> twice = once;
  twice.insert(twice.end(), once.begin(), once.end());
  const double single = measure_rate(ac_encode(once, 100, 16, {}, "a"), 16).bits_per_feature;
  const double doubled = measure_rate(ac_encode(twice, 200, 16, {}, "a"), 16).bits_per_feature;
  EXPECT_NEAR(doubled, single, 0.1 * single);
}

TEST(Container, RoundTripsBitwise) {
  std::mt19937_64 rng(41);
  std::vector<std::int32_t> s(50 * 8);
  for (auto& v : s) v = static_cast<std::int32_t>(rng() % 11) - 5;
  const auto bs = ac_encode(s, 50, 8, {-5, 5}, "PRO-L0");
  const auto bytes = encode_bitstream(bs);
  EXPECT_EQ(decode_bitstream(bytes), bs);
  EXPECT_EQ(encode_bitstream(decode_bitstream(bytes)), bytes);

  const auto path = std::filesystem::temp_directory_path() / "fic_container_test.fcb";
  write_bitstream(path, bs);
  EXPECT_EQ(read_file(path), bytes);
  EXPECT_EQ(read_bitstream(path), bs);
  std::filesystem::remove(path);
}

TEST(Container, TruncationAndMagicFailWithOffsets) {
  const std::vector<std::int32_t> s{1, 2, 3, 4};
  const auto bytes = encode_bitstream(ac_encode(s, 2, 2, {}, "t"));
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    EXPECT_THROW(decode_bitstream(std::span(bytes).first(len)), FormatError) << "length " << len;
  }
  auto bad = bytes;
  bad[0] = 'X';
  try {
    decode_bitstream(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(decode_bitstream(extra), FormatError);
}

TEST(Container, AlphabetMismatchIsRejected) {
  const std::vector<std::int32_t> s{1, 2};
  const auto bs = ac_encode(s, 1, 2, {-5, 5}, "t");
  EXPECT_THROW(ac_decode(bs, SymbolAlphabet{-20, 20}), FormatError);
  EXPECT_EQ(ac_decode(bs, SymbolAlphabet{-5, 5}).size(), 1u);
}

}  // namespace
}  // namespace fic
