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

#include "fic/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "fic/error.hpp"
#include "fic/sq.hpp"

namespace fic {

FeatureBitstream pro_compress(const CodecModel& codec, const FeatureSet& features) {
  features.validate();
  if (features.dim != codec.feature_dim) {
    throw ConfigError("features have D=" + std::to_string(features.dim) + " but codec " + codec.model_id +
                      " expects D=" + std::to_string(codec.feature_dim));
  }
  const nn::Matrix c = encode_batch(codec, features.columns(), EncodeMode::kInfer);
  std::vector<std::int32_t> symbols(static_cast<std::size_t>(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) symbols[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(c.data()[i]);
  return ac_encode(symbols, features.count, codec.latent_dim, SymbolAlphabet::symmetric(codec.symbol_bound()),
                   codec.model_id);
}

namespace {

nn::Matrix decode_latents(const FeatureBitstream& bs, std::size_t latent_dim, const std::string& expected_id) {
  if (bs.width != latent_dim) {
    throw ConfigError("bitstream width " + std::to_string(bs.width) + " does not match latent width " +
                      std::to_string(latent_dim));
  }
  if (bs.model_id != expected_id) {
    throw ConfigError("bitstream was produced by model \"" + bs.model_id + "\", not \"" + expected_id + "\"");
  }
  const auto symbols = ac_decode_symbols(bs);
  nn::Matrix c(static_cast<Eigen::Index>(bs.width), static_cast<Eigen::Index>(bs.count));
  for (std::size_t i = 0; i < symbols.size(); ++i) c.data()[i] = symbols[i];
  return c;
}

}  // namespace

FeatureSet pro_decompress(const CodecModel& codec, const FeatureBitstream& bs) {
  return FeatureSet::from_columns(decode_batch(codec, decode_latents(bs, codec.latent_dim, codec.model_id)));
}

FeatureSet pro_enhanced_decompress(const EnhancerModel& enh, const CodecModel& high, const FeatureBitstream& bs) {
  if (enh.target_model_id != high.model_id) {
    throw ConfigError("enhancer targets \"" + enh.target_model_id + "\", not \"" + high.model_id + "\"");
  }
  if (enh.latent_dim() != high.latent_dim) throw ConfigError("enhancer and high-rate codec differ in M");
  const nn::Matrix c_low = decode_latents(bs, enh.latent_dim(), enh.source_model_id);
  return FeatureSet::from_columns(decode_batch(high, enhance_batch(enh, c_low)));
}

namespace {

FeatureSet with_labels_of(FeatureSet rec, const FeatureSet& src) {
  rec.labels = src.labels;
  rec.source = src.source;
  return rec;
}

class SqPipeline : public Pipeline {
 public:
  SqPipeline(int qp, std::size_t dim) : qp_(qp), dim_(dim) {}
  std::string label() const override { return "SQ" + std::to_string(qp_); }
  std::size_t feature_dim() const override { return dim_; }
  PipelineOutput run(const FeatureSet& features) const override {
    auto r = sq_codec_rate(features, qp_);
    return {std::move(r.bitstream), std::move(r.reconstructed)};
  }

 private:
  int qp_;
  std::size_t dim_;
};

class SqePipeline : public Pipeline {
 public:
  explicit SqePipeline(SqeModel sqe) : sqe_(std::move(sqe)) {}
  std::string label() const override { return "SQE" + std::to_string(sqe_.qp); }
  std::size_t feature_dim() const override { return sqe_.dim(); }
  PipelineOutput run(const FeatureSet& features) const override {
    auto r = sq_codec_rate(features, sqe_.qp);
    FeatureSet rec = FeatureSet::from_columns(apply_sqe_batch(sqe_, r.reconstructed.columns()));
    return {std::move(r.bitstream), with_labels_of(std::move(rec), features)};
  }

 private:
  SqeModel sqe_;
};

class ProPipeline : public Pipeline {
 public:
  explicit ProPipeline(CodecModel codec) : codec_(std::move(codec)) {}
  std::string label() const override { return "PRO-" + codec_.model_id; }
  std::size_t feature_dim() const override { return codec_.feature_dim; }
  PipelineOutput run(const FeatureSet& features) const override {
    auto bs = pro_compress(codec_, features);
    auto rec = pro_decompress(codec_, bs);
    return {std::move(bs), with_labels_of(std::move(rec), features)};
  }

 private:
  CodecModel codec_;
};

class ProEPipeline : public Pipeline {
 public:
  ProEPipeline(CodecModel low, EnhancerModel enh, CodecModel high)
      : low_(std::move(low)), enh_(std::move(enh)), high_(std::move(high)) {
    if (enh_.source_model_id != low_.model_id || enh_.target_model_id != high_.model_id) {
      throw ConfigError("enhancer " + enh_.source_model_id + "->" + enh_.target_model_id +
                        " does not connect codecs " + low_.model_id + " and " + high_.model_id);
    }
  }
  std::string label() const override { return "PRO-E-" + low_.model_id + "-" + high_.model_id; }
  std::size_t feature_dim() const override { return low_.feature_dim; }
  PipelineOutput run(const FeatureSet& features) const override {
    auto bs = pro_compress(low_, features);
    auto rec = pro_enhanced_decompress(enh_, high_, bs);
    return {std::move(bs), with_labels_of(std::move(rec), features)};
  }

 private:
  CodecModel low_;
  EnhancerModel enh_;
  CodecModel high_;
};

}  // namespace

std::unique_ptr<Pipeline> make_sq_pipeline(int qp, std::size_t feature_dim) {
  return std::make_unique<SqPipeline>(qp, feature_dim);
}
std::unique_ptr<Pipeline> make_sqe_pipeline(SqeModel sqe) { return std::make_unique<SqePipeline>(std::move(sqe)); }
std::unique_ptr<Pipeline> make_pro_pipeline(CodecModel codec) {
  return std::make_unique<ProPipeline>(std::move(codec));
}
std::unique_ptr<Pipeline> make_pro_e_pipeline(CodecModel low, EnhancerModel enh, CodecModel high) {
  return std::make_unique<ProEPipeline>(std::move(low), std::move(enh), std::move(high));
}

SweepResult run_sweep(const FeatureSet& features, const VerificationPairs& pairs,
                      const std::vector<std::unique_ptr<Pipeline>>& pipelines, std::size_t folds,
                      std::uint64_t seed) {
  features.validate();
  for (const auto& p : pipelines) {
    if (p->feature_dim() != features.dim) {
      throw ConfigError("pipeline " + p->label() + " expects D=" + std::to_string(p->feature_dim()) +
                        ", features have D=" + std::to_string(features.dim));
    }
  }
  SweepResult result;
  auto score = [&](const std::string& label, const FeatureSet& set, double bpd, double bpf) {
    const auto m = evaluate_verification(set, pairs, folds, seed);
    result.points.push_back({label, bpd, bpf, m.accuracy, m.auc, m.eer, m.flipped});
  };
  const double inf = std::numeric_limits<double>::infinity();
  score("raw", features, inf, inf);
  for (const auto& p : pipelines) {
    auto out = p->run(features);
    const auto rate = measure_rate(out.bitstream, features.dim);
    score(p->label(), out.reconstructed, rate.bits_per_dim, rate.bits_per_feature);
    result.bitstreams.push_back(std::move(out.bitstream));
  }
  return result;
}

std::string sweep_csv(const std::vector<RatePoint>& points) {
  std::string out = "label,bits_per_dim,bits_per_feature,accuracy,auc,eer\n";
  char buf[256];
  auto rate = [](double v) {
    if (std::isinf(v)) return std::string("inf");
    char b[64];
    std::snprintf(b, sizeof b, "%.6f", v);
    return std::string(b);
  };
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.6f,%.6f,%.6f\n", p.label.c_str(), rate(p.bits_per_dim).c_str(),
                  rate(p.bits_per_feature).c_str(), p.accuracy, p.auc, p.eer);
    out += buf;
  }
  return out;
}

}  // namespace fic
