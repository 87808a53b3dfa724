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
#include <vector>

#include "fic/codec.hpp"
#include "fic/enhance.hpp"

namespace fic {

// Little-endian containers; parameter blocks are f64, row-major, in layer
// order (FC weights then bias, GDN beta then gamma).
//   "FCM1": version u16, D u16, M u16, H u16, r_clip f64, lambda f64, model_id
//   "FCE1": version u16, M u16, H_e u16, r_clip f64, source id, target id
//   "FCS1": version u16, D u16, qp i16
// Identifiers are a u8 length followed by UTF-8 bytes.

std::vector<std::uint8_t> encode_codec(const CodecModel& model);
CodecModel decode_codec(std::span<const std::uint8_t> bytes);
void save_model(const CodecModel& model, const std::filesystem::path& path);
CodecModel load_model(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_enhancer(const EnhancerModel& model);
EnhancerModel decode_enhancer(std::span<const std::uint8_t> bytes);
void save_enhancer(const EnhancerModel& model, const std::filesystem::path& path);
EnhancerModel load_enhancer(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_sqe(const SqeModel& model);
SqeModel decode_sqe(std::span<const std::uint8_t> bytes);
void save_sqe(const SqeModel& model, const std::filesystem::path& path);
SqeModel load_sqe(const std::filesystem::path& path);

}  // namespace fic
