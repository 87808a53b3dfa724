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

#include "fic/model_io.hpp"

#include <cmath>

#include "fic/binary_io.hpp"
#include "fic/error.hpp"

namespace fic {

namespace {

constexpr std::uint16_t kModelVersion = 1;

void write_matrix(ByteWriter& w, const nn::Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  }
}

void read_matrix(ByteReader& r, nn::Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const std::size_t at = r.offset();
      m(i, j) = r.f64();
      if (!std::isfinite(m(i, j))) throw FormatError(at, "non-finite parameter");
    }
  }
}

void write_network(ByteWriter& w, const nn::Sequential& net) {
  for (const auto& layer : net.layers()) {
    if (const auto* d = std::get_if<nn::DenseLayer>(&layer)) {
      write_matrix(w, d->weights);
      write_matrix(w, d->bias);
    } else {
      const auto& g = std::get<nn::GdnLayer>(layer);
      write_matrix(w, g.beta);
      write_matrix(w, g.gamma);
    }
  }
}

// Fills a pre-shaped network in place.
void read_network(ByteReader& r, nn::Sequential& net) {
  for (auto& layer : net.layers()) {
    if (auto* d = std::get_if<nn::DenseLayer>(&layer)) {
      read_matrix(r, d->weights);
      nn::Matrix b(d->bias.size(), 1);
      read_matrix(r, b);
      d->bias = b.col(0);
    } else {
      auto& g = std::get<nn::GdnLayer>(layer);
      const std::size_t at = r.offset();
      nn::Matrix beta(g.beta.size(), 1);
      read_matrix(r, beta);
      g.beta = beta.col(0);
      read_matrix(r, g.gamma);
      if ((g.beta.array() < g.beta_floor).any() || (g.gamma.array() < 0.0).any()) {
        throw FormatError(at, "GDN parameters violate beta >= floor / gamma >= 0");
      }
    }
  }
}

std::uint16_t checked_u16(std::size_t v, const char* what) {
  if (v == 0 || v > UINT16_MAX) throw ConfigError(std::string(what) + " does not fit the u16 header field");
  return static_cast<std::uint16_t>(v);
}

std::size_t read_dim(ByteReader& r, const char* what) {
  const std::size_t at = r.offset();
  const std::size_t v = r.u16();
  if (v == 0) throw FormatError(at, std::string(what) + " must be positive");
  return v;
}

double read_positive(ByteReader& r, const char* what) {
  const std::size_t at = r.offset();
  const double v = r.f64();
  if (!(v > 0.0) || !std::isfinite(v)) throw FormatError(at, std::string(what) + " must be positive and finite");
  return v;
}

void read_header(ByteReader& r, std::string_view magic) {
  r.expect_magic(magic);
  const std::size_t at = r.offset();
  if (const auto v = r.u16(); v != kModelVersion) {
    throw FormatError(at, "unsupported model version " + std::to_string(v));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_codec(const CodecModel& model) {
  model.validate();
  ByteWriter w;
  w.magic("FCM1");
  w.u16(kModelVersion);
  w.u16(checked_u16(model.feature_dim, "D"));
  w.u16(checked_u16(model.latent_dim, "M"));
  w.u16(checked_u16(model.hidden_dim, "H"));
  w.f64(model.r_clip);
  w.f64(model.lambda);
  w.short_string(model.model_id);
  write_network(w, model.encoder);
  write_network(w, model.decoder);
  return w.take();
}

CodecModel decode_codec(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  read_header(r, "FCM1");
  CodecShape shape;
  shape.feature_dim = read_dim(r, "D");
  shape.latent_dim = read_dim(r, "M");
  shape.hidden_dim = read_dim(r, "H");
  const double r_clip = read_positive(r, "r_clip");
  const double lambda = read_positive(r, "lambda");
  std::string id = r.short_string();
  CodecModel model = CodecModel::create(shape, lambda, r_clip, std::move(id), 0);
  read_network(r, model.encoder);
  read_network(r, model.decoder);
  r.expect_end();
  return model;
}

void save_model(const CodecModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_codec(model));
}

CodecModel load_model(const std::filesystem::path& path) { return decode_codec(read_file(path)); }

std::vector<std::uint8_t> encode_enhancer(const EnhancerModel& model) {
  model.validate();
  ByteWriter w;
  w.magic("FCE1");
  w.u16(kModelVersion);
  w.u16(checked_u16(model.latent_dim(), "M"));
  w.u16(checked_u16(model.hidden_dim(), "H_e"));
  w.f64(model.r_clip);
  w.short_string(model.source_model_id);
  w.short_string(model.target_model_id);
  write_network(w, model.net);
  return w.take();
}

EnhancerModel decode_enhancer(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  read_header(r, "FCE1");
  const std::size_t m = read_dim(r, "M");
  const std::size_t h = read_dim(r, "H_e");
  const double r_clip = read_positive(r, "r_clip");
  std::string source = r.short_string();
  std::string target = r.short_string();
  EnhancerModel model = EnhancerModel::create(m, h, r_clip, std::move(source), std::move(target), 0);
  read_network(r, model.net);
  r.expect_end();
  return model;
}

void save_enhancer(const EnhancerModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, encode_enhancer(model));
}

EnhancerModel load_enhancer(const std::filesystem::path& path) { return decode_enhancer(read_file(path)); }

std::vector<std::uint8_t> encode_sqe(const SqeModel& model) {
  model.validate();
  if (model.qp < INT16_MIN || model.qp > INT16_MAX) throw ConfigError("qp does not fit the i16 header field");
  ByteWriter w;
  w.magic("FCS1");
  w.u16(kModelVersion);
  w.u16(checked_u16(model.dim(), "D"));
  w.i16(static_cast<std::int16_t>(model.qp));
  write_network(w, model.block);
  return w.take();
}

SqeModel decode_sqe(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  read_header(r, "FCS1");
  const std::size_t d = read_dim(r, "D");
  const int qp = r.i16();
  SqeModel model = SqeModel::zeros(d, qp);
  read_network(r, model.block);
  r.expect_end();
  return model;
}

void save_sqe(const SqeModel& model, const std::filesystem::path& path) { write_file_atomic(path, encode_sqe(model)); }

SqeModel load_sqe(const std::filesystem::path& path) { return decode_sqe(read_file(path)); }

}  // namespace fic
