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

#include <filesystem>

#include <gtest/gtest.h>

#include "fic/binary_io.hpp"
#include "fic/codec.hpp"
#include "fic/enhance.hpp"
#include "fic/error.hpp"
#include "fic/model_io.hpp"

namespace fic {
namespace {

namespace fs = std::filesystem;

template <typename Decode>
void expect_every_truncation_fails(const std::vector<std::uint8_t>& bytes, Decode decode) {
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    EXPECT_THROW(decode(std::span(bytes).first(len)), FormatError) << "length " << len;
  }
}

TEST(CodecFile, RoundTripIsBitwise) {
  const auto model = CodecModel::create({16, 4, 8}, 1e-5, 20.0, "L1", 3);
  const auto bytes = encode_codec(model);
  EXPECT_EQ(decode_codec(bytes), model);
  EXPECT_EQ(encode_codec(decode_codec(bytes)), bytes);

  const auto path = fs::temp_directory_path() / "fic_model_io_test.fcm";
  save_model(model, path);
  EXPECT_EQ(read_file(path), bytes);
  EXPECT_EQ(load_model(path), model);
  fs::remove(path);
}

TEST(CodecFile, TruncationMagicAndTrailingBytes) {
  const auto bytes = encode_codec(CodecModel::create({6, 2, 4}, 1e-4, 20.0, "t", 1));
  expect_every_truncation_fails(bytes, [](auto b) { return decode_codec(b); });
  auto bad = bytes;
  bad[3] = '9';
  EXPECT_THROW(decode_codec(bad), FormatError);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(decode_codec(bad), FormatError);
}

TEST(CodecFile, InvalidParametersAreRejected) {
  auto model = CodecModel::create({6, 2, 4}, 1e-4, 20.0, "t", 1);
  auto& gdn = std::get<nn::GdnLayer>(model.encoder.layers()[1]);
  gdn.gamma(0, 0) = -1.0;
  EXPECT_THROW(decode_codec(encode_codec(model)), FormatError);
}

TEST(CodecFile, MissingFileIsAnError) {
  EXPECT_THROW(load_model(fs::temp_directory_path() / "fic_no_such_model.fcm"), Error);
}

TEST(EnhancerFile, RoundTripIsBitwise) {
  const auto enh = EnhancerModel::create(4, 4, 20.0, "L0", "L3", 8);
  const auto bytes = encode_enhancer(enh);
  EXPECT_EQ(decode_enhancer(bytes), enh);
  EXPECT_EQ(encode_enhancer(decode_enhancer(bytes)), bytes);
  expect_every_truncation_fails(bytes, [](auto b) { return decode_enhancer(b); });
  EXPECT_THROW(decode_codec(bytes), FormatError);
}

TEST(SqeFile, RoundTripIsBitwise) {
  auto sqe = SqeModel::create(5, 58, 4);
  std::get<nn::DenseLayer>(sqe.block.layers()[2]) = nn::xavier_init(5, 5, 9);
  const auto bytes = encode_sqe(sqe);
  EXPECT_EQ(decode_sqe(bytes), sqe);
  EXPECT_EQ(encode_sqe(decode_sqe(bytes)), bytes);
  expect_every_truncation_fails(bytes, [](auto b) { return decode_sqe(b); });
}

}  // namespace
}  // namespace fic
