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
#include <cstring>
#include <filesystem>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "fic/binary_io.hpp"
#include "fic/data.hpp"
#include "fic/error.hpp"
#include "fic/metrics.hpp"

namespace fic {
namespace {

namespace fs = std::filesystem;

constexpr std::size_t kHeaderBytes = 13;  // magic, version, N, D, flags

// Round every value through f32 so the binary form is exact.
FeatureSet storable(FeatureSet s) {
  for (auto& v : s.values) v = static_cast<float>(v);
  return s;
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("fic_data_test_" + name); }

TEST(FeatureFile, BinaryRoundTripIsBitwise) {
  const auto set = storable(gen_synthetic({5, 4, 12, 0.15, 1}));
  const auto bytes = encode_features(set);
  EXPECT_EQ(bytes.size(), kHeaderBytes + 20 * 12 * 4 + 20 * 4);
  const auto back = decode_features(bytes);
  EXPECT_EQ(back.values, set.values);
  EXPECT_EQ(back.labels, set.labels);
  EXPECT_EQ(encode_features(back), bytes);

  const auto path = temp("rt.fea");
  write_features(path, set);
  EXPECT_EQ(read_file(path), bytes);
  EXPECT_EQ(read_features(path).values, set.values);
  fs::remove(path);
}

TEST(FeatureFile, UnlabelledRoundTrip) {
  auto set = storable(gen_synthetic({2, 3, 4, 0.1, 2}));
  set.labels.clear();
  const auto back = decode_features(encode_features(set));
  EXPECT_FALSE(back.has_labels());
  EXPECT_EQ(back.values, set.values);
}

TEST(FeatureFile, TruncationFails) {
  const auto set = storable(gen_synthetic({3, 1, 4, 0.1, 3}));  // N = 3
  const auto bytes = encode_features(set);
  // Drop the last row's data and the labels: the file still declares N = 3.
  const std::size_t two_rows = kHeaderBytes + 2 * 4 * 4;
  EXPECT_THROW(decode_features(std::span(bytes).first(two_rows)), FormatError);
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    EXPECT_THROW(decode_features(std::span(bytes).first(len)), FormatError) << len;
  }
}

TEST(FeatureFile, BadMagicAndVersion) {
  auto bytes = encode_features(storable(gen_synthetic({2, 2, 3, 0.1, 4})));
  auto bad = bytes;
  bad[1] = 'X';
  EXPECT_THROW(decode_features(bad), FormatError);
  bad = bytes;
  bad[4] = 9;
  try {
    decode_features(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(FeatureFile, NanIsRejectedWithRowAndColumn) {
  auto bytes = encode_features(storable(gen_synthetic({2, 2, 3, 0.1, 5})));
  const float nan = std::nanf("");
  const std::size_t at = kHeaderBytes + 4 * (2 * 3 + 1);  // row 2, column 1
  std::memcpy(bytes.data() + at, &nan, 4);
  try {
    decode_features(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), at);
    EXPECT_NE(std::string(e.what()).find("row 2, column 1"), std::string::npos);
  }
}

TEST(FeatureFile, CsvMatchesBinary) {
  const auto set = storable(gen_synthetic({4, 3, 6, 0.15, 6}));
  const auto from_csv = features_from_csv(features_to_csv(set));
  const auto from_bin = decode_features(encode_features(set));
  EXPECT_EQ(from_csv.values, from_bin.values);
  EXPECT_EQ(from_csv.labels, from_bin.labels);

  const auto path = temp("rt.csv");
  write_features(path, set);
  EXPECT_EQ(read_features(path).values, set.values);
  fs::remove(path);
}

TEST(FeatureFile, CsvWithoutHeaderOrLabels) {
  const auto set = features_from_csv("0.5,-0.25\n1,2\n");
  EXPECT_EQ(set.count, 2u);
  EXPECT_EQ(set.dim, 2u);
  EXPECT_FALSE(set.has_labels());
  EXPECT_EQ(set.values, (std::vector<double>{0.5, -0.25, 1, 2}));
  EXPECT_THROW(features_from_csv("1,2\n3\n"), FormatError);
  EXPECT_THROW(features_from_csv("1,nan\n"), FormatError);
}

TEST(Synthetic, UnitNormAndRange) {
  const auto set = gen_synthetic({30, 5, 64, 0.15, 42});
  ASSERT_EQ(set.count, 150u);
  for (std::size_t i = 0; i < set.count; ++i) {
    double sq = 0.0;
    for (double v : set.row(i)) {
      EXPECT_LE(std::abs(v), 1.0);
      sq += v * v;
    }
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-9);
  }
  EXPECT_EQ(set, gen_synthetic({30, 5, 64, 0.15, 42}));
}

TEST(Synthetic, ZeroSigmaCollapsesIdentities) {
  const auto set = gen_synthetic({4, 6, 8, 0.0, 3});
  for (std::size_t i = 1; i < set.count; ++i) {
    if (set.labels[i] == set.labels[i - 1]) {
      EXPECT_TRUE(std::equal(set.row(i).begin(), set.row(i).end(), set.row(i - 1).begin()));
    }
  }
}

TEST(Synthetic, DefaultBenchmarkSeparatesIdentities) {
  const auto set = gen_synthetic({});
  ASSERT_EQ(set.count, 10'000u);
  ASSERT_EQ(set.dim, 128u);
  const auto pairs = gen_pairs(set, 2000, 2000, 42);
  const auto scores = pair_scores(set, pairs);
  double intra = 0, inter = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) (pairs[i].same ? intra : inter) += scores[i];
  EXPECT_GT(intra / 2000.0, inter / 2000.0);

  std::vector<std::size_t> dims(128);
  std::iota(dims.begin(), dims.end(), std::size_t{0});
  for (const auto& s : dim_stats(set, dims, 20)) EXPECT_NEAR(s.mean, 0.0, 0.05) << "dim " << s.dim;
}

TEST(Pairs, ConstructionInvariants) {
  const auto set = gen_synthetic({10, 4, 8, 0.1, 7});
  for (auto [pos, neg] : {std::pair{20, 30}, std::pair{60, 700}}) {  // sampled and enumerated paths
    const auto pairs = gen_pairs(set, pos, neg, 9);
    ASSERT_EQ(pairs.size(), static_cast<std::size_t>(pos + neg));
    std::set<std::pair<std::size_t, std::size_t>> seen;
    int n_pos = 0;
    for (const auto& p : pairs) {
      EXPECT_EQ(p.same, set.labels[p.a] == set.labels[p.b]);
      EXPECT_TRUE(seen.insert({std::min(p.a, p.b), std::max(p.a, p.b)}).second);
      n_pos += p.same;
    }
    EXPECT_EQ(n_pos, pos);
    EXPECT_EQ(pairs, gen_pairs(set, pos, neg, 9));
  }
  EXPECT_THROW(gen_pairs(set, 61, 0, 1), ProtocolError);  // only 10 * C(4,2) = 60 exist
}

TEST(Pairs, CsvRoundTripAndValidation) {
  const VerificationPairs pairs{{0, 1, true}, {2, 5, false}};
  const auto text = pairs_to_csv(pairs);
  EXPECT_EQ(text, "index_a,index_b,same\n0,1,1\n2,5,0\n");
  EXPECT_EQ(pairs_from_csv(text), pairs);
  EXPECT_THROW(pairs_from_csv("index_a,index_b,same\n0,1,2\n"), FormatError);
  EXPECT_THROW(validate_pairs(pairs, 5), ProtocolError);
  EXPECT_THROW(validate_pairs({{3, 3, true}}, 5), ProtocolError);
  EXPECT_NO_THROW(validate_pairs(pairs, 6));
}

TEST(Split, IdentityDisjoint) {
  const auto set = gen_synthetic({10, 3, 4, 0.1, 8});
  const auto [train, test] = split_by_identity(set, 0.8);
  EXPECT_EQ(train.count + test.count, set.count);
  const std::set<std::uint32_t> a(train.labels.begin(), train.labels.end());
  for (auto l : test.labels) EXPECT_EQ(a.count(l), 0u);
}

TEST(Stats, HistogramAccounting) {
  FeatureSet set;
  set.count = 5;
  set.dim = 2;
  set.values = {0.3, 0.0, 0.3, 0.5, 0.3, 1.0, 0.3, -1.0, 0.3, 0.25};
  const std::vector<std::size_t> dims{0, 1};
  const auto stats = dim_stats(set, dims, 4);
  EXPECT_EQ(stats[0].stddev, 0.0);
  EXPECT_DOUBLE_EQ(stats[0].mean, 0.3);
  EXPECT_EQ(std::count_if(stats[0].counts.begin(), stats[0].counts.end(), [](auto c) { return c > 0; }), 1);
  EXPECT_EQ(std::accumulate(stats[1].counts.begin(), stats[1].counts.end(), std::size_t{0}), 5u);
  EXPECT_EQ(stats[1].edges.front(), -1.0);
  EXPECT_EQ(stats[1].edges.back(), 1.0);
  const std::vector<std::size_t> bad{2};
  EXPECT_THROW(dim_stats(set, bad, 4), ShapeError);
  const auto csv = dim_stats_csv(stats);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dim,mean,stddev,bin,lo,hi,count");
}

}  // namespace
}  // namespace fic
