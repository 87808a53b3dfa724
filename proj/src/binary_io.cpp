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

#include "fic/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "fic/error.hpp"

namespace fic {

void ByteWriter::u16(std::uint16_t v) {
  for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::magic(std::string_view tag) {
  for (char c : tag) bytes_.push_back(static_cast<std::uint8_t>(c));
}

void ByteWriter::short_string(std::string_view s) {
  if (s.size() > 255) throw ConfigError("identifier longer than 255 bytes: " + std::string(s));
  u8(static_cast<std::uint8_t>(s.size()));
  magic(s);
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteWriter::f64_array(std::span<const double> values) {
  for (double v : values) f64(v);
}

std::span<const std::uint8_t> ByteReader::need(std::size_t n) {
  if (remaining() < n) {
    throw FormatError(offset_, "truncated: need " + std::to_string(n) + " bytes, have " +
                                   std::to_string(remaining()));
  }
  auto out = data_.subspan(offset_, n);
  offset_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return need(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = need(2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t ByteReader::u32() {
  auto b = need(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = need(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

void ByteReader::expect_magic(std::string_view tag) {
  const std::size_t at = offset_;
  auto b = need(tag.size());
  for (std::size_t i = 0; i < tag.size(); ++i) {
    if (b[i] != static_cast<std::uint8_t>(tag[i])) {
      throw FormatError(at, "bad magic, expected \"" + std::string(tag) + "\"");
    }
  }
}

std::string ByteReader::short_string() {
  const std::size_t n = u8();
  auto b = need(n);
  return std::string(b.begin(), b.end());
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) { return need(n); }

void ByteReader::f64_array(std::span<double> out) {
  for (double& v : out) v = f64();
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    throw FormatError(offset_, std::to_string(remaining()) + " trailing bytes");
  }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error("short write to " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace fic
