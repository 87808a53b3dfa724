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

// Command-line front end: synthesize data, train codecs and enhancers,
// compress/decompress, evaluate, and run rate-accuracy sweeps. Every command
// writes a JSON run manifest next to its outputs.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fic/binary_io.hpp"
#include "fic/codec.hpp"
#include "fic/data.hpp"
#include "fic/enhance.hpp"
#include "fic/entropy.hpp"
#include "fic/error.hpp"
#include "fic/metrics.hpp"
#include "fic/model_io.hpp"
#include "fic/sq.hpp"
#include "fic/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "fic 1.0.0";

struct Options {
  std::string features, pairs, out, bitstream, low, high, id = "L0";
  std::vector<std::string> models, enhancers, sqes;
  std::vector<int> qps;
  std::uint64_t seed = 42;
  double lambda = 1e-4, lr = 1e-4, r_clip = 20.0, noise = 0.5, sigma = 0.15;
  std::size_t epochs = 40, batch_size = 32, latent_dim = 32, hidden_dim = 128, folds = 10;
  std::size_t identities = 200, per_identity = 50, dim = 128, n_pos = 3000, n_neg = 3000, bins = 50;
  std::vector<std::size_t> dims{0, 1, 2, 3};
};

struct Run {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

fic::TrainConfig train_config(const Options& o) {
  fic::TrainConfig c;
  c.lambda = o.lambda;
  c.learning_rate = o.lr;
  c.batch_size = o.batch_size;
  c.epochs = o.epochs;
  c.r_clip = o.r_clip;
  c.noise_half_width = o.noise;
  c.seed = o.seed;
  return c;
}

json config_of(const CLI::App* sub) {
  json cfg = json::object();
  for (const auto* opt : sub->get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    const auto& results = opt->results();
    if (results.empty()) {
      const auto def = opt->get_default_str();
      if (!def.empty()) cfg[name] = def;
    } else if (opt->get_expected_max() > 1 || results.size() > 1) {
      cfg[name] = results;
    } else {
      cfg[name] = results.front();
    }
  }
  return cfg;
}

void write_manifest(const fs::path& path, const Run& run, const CLI::App* sub, const Options& o,
                    const std::vector<std::string>& argv, double seconds) {
  json m;
  m["command"] = run.command;
  m["argv"] = argv;
  m["config"] = config_of(sub);
  m["seed"] = o.seed;
  m["inputs"] = run.inputs;
  m["outputs"] = run.outputs;
  m["tool_version"] = kVersion;
  m["wall_clock_seconds"] = seconds;
  fic::write_text_atomic(path, m.dump(2) + "\n");
}

fic::FeatureSet load_features(const Options& o, Run& run) {
  if (o.features.empty()) throw fic::ConfigError("--features is required");
  run.inputs.push_back(o.features);
  auto set = fic::read_features(o.features);
  set.validate();
  return set;
}

fic::VerificationPairs load_pairs(const Options& o, Run& run, std::size_t count) {
  if (o.pairs.empty()) throw fic::ConfigError("--pairs is required");
  run.inputs.push_back(o.pairs);
  auto pairs = fic::read_pairs(o.pairs);
  fic::validate_pairs(pairs, count);
  return pairs;
}

void require_out(const Options& o) {
  if (o.out.empty()) throw fic::ConfigError("--out is required");
}

int single_qp(const Options& o) {
  if (o.qps.size() != 1) throw fic::ConfigError("exactly one --qp is expected");
  return o.qps.front();
}

// Each command returns the manifest path.
fs::path cmd_gen_synthetic(const Options& o, Run& run) {
  require_out(o);
  fic::SyntheticConfig cfg{o.identities, o.per_identity, o.dim, o.sigma, o.seed};
  const auto set = fic::gen_synthetic(cfg);
  fic::VerificationPairs pairs;
  if (!o.pairs.empty()) pairs = fic::gen_pairs(set, o.n_pos, o.n_neg, o.seed);
  fic::write_features(o.out, set);
  run.outputs.push_back(o.out);
  if (!o.pairs.empty()) {
    fic::write_pairs(o.pairs, pairs);
    run.outputs.push_back(o.pairs);
  }
  return o.out + ".manifest.json";
}

fs::path cmd_stats(const Options& o, Run& run) {
  require_out(o);
  const auto set = load_features(o, run);
  const auto stats = fic::dim_stats(set, o.dims, o.bins);
  fic::write_text_atomic(o.out, fic::dim_stats_csv(stats));
  run.outputs.push_back(o.out);
  for (const auto& s : stats) std::printf("dim %zu: mean %.6f std %.6f\n", s.dim, s.mean, s.stddev);
  return o.out + ".manifest.json";
}

fs::path cmd_train_codec(const Options& o, Run& run) {
  require_out(o);
  const auto set = load_features(o, run);
  fic::CodecShape shape{set.dim, o.latent_dim, o.hidden_dim};
  const auto trained = fic::train_codec(set, train_config(o), shape, o.id);
  const std::string log_path = o.out + ".log.csv";
  fic::save_model(trained.model, o.out);
  fic::write_text_atomic(log_path, fic::training_log_csv(trained.log));
  run.outputs = {o.out, log_path};
  const auto& last = trained.log.empty() ? fic::EpochStats{} : trained.log.back();
  std::printf("trained %s: loss %.6f mse %.6f l1 %.4f\n", o.id.c_str(), last.mean_loss, last.mean_mse,
              last.mean_l1);
  return o.out + ".manifest.json";
}

fs::path cmd_train_enhancer(const Options& o, Run& run) {
  require_out(o);
  if (o.low.empty() || o.high.empty()) throw fic::ConfigError("--low and --high codec models are required");
  const auto set = load_features(o, run);
  run.inputs.push_back(o.low);
  run.inputs.push_back(o.high);
  const auto low = fic::load_model(o.low);
  const auto high = fic::load_model(o.high);
  const auto trained = fic::train_enhancer(low, high, set, train_config(o));
  fic::save_enhancer(trained.model, o.out);
  run.outputs.push_back(o.out);
  std::printf("enhancer %s -> %s: loss %.6f\n", low.model_id.c_str(), high.model_id.c_str(),
              trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.back());
  return o.out + ".manifest.json";
}

fs::path cmd_train_sqe(const Options& o, Run& run) {
  require_out(o);
  const auto set = load_features(o, run);
  const auto trained = fic::train_sqe(set, single_qp(o), train_config(o));
  fic::save_sqe(trained.model, o.out);
  run.outputs.push_back(o.out);
  std::printf("SQ-E qp %d: loss %.6f\n", trained.model.qp, trained.epoch_loss.empty() ? 0.0 : trained.epoch_loss.back());
  return o.out + ".manifest.json";
}

fs::path cmd_compress(const Options& o, Run& run) {
  require_out(o);
  const auto set = load_features(o, run);
  fic::FeatureBitstream bs;
  if (!o.models.empty()) {
    if (o.models.size() != 1 || !o.qps.empty()) throw fic::ConfigError("give exactly one of --model or --qp");
    run.inputs.push_back(o.models.front());
    bs = fic::pro_compress(fic::load_model(o.models.front()), set);
  } else {
    bs = fic::sq_codec_rate(set, single_qp(o)).bitstream;
  }
  fic::write_bitstream(o.out, bs);
  run.outputs.push_back(o.out);
  const auto rate = fic::measure_rate(bs, set.dim);
  std::printf("%llu bits, %.6f bits/feature, %.6f bits/dim\n", static_cast<unsigned long long>(rate.payload_bits),
              rate.bits_per_feature, rate.bits_per_dim);
  return o.out + ".manifest.json";
}

fs::path cmd_decompress(const Options& o, Run& run) {
  require_out(o);
  if (o.bitstream.empty()) throw fic::ConfigError("--bitstream is required");
  run.inputs.push_back(o.bitstream);
  const auto bs = fic::read_bitstream(o.bitstream);
  fic::FeatureSet rec;
  if (!o.models.empty()) {
    if (o.models.size() != 1 || !o.qps.empty()) throw fic::ConfigError("give exactly one of --model or --qp");
    run.inputs.push_back(o.models.front());
    rec = fic::pro_decompress(fic::load_model(o.models.front()), bs);
  } else {
    rec = fic::sq_decode(bs, single_qp(o));
  }
  fic::write_features(o.out, rec);
  run.outputs.push_back(o.out);
  return o.out + ".manifest.json";
}

fs::path cmd_enhance(const Options& o, Run& run) {
  require_out(o);
  if (o.bitstream.empty() || o.enhancers.size() != 1 || o.models.size() != 1) {
    throw fic::ConfigError("enhance needs --bitstream, one --enhancer and one --model (high-rate codec)");
  }
  run.inputs = {o.bitstream, o.enhancers.front(), o.models.front()};
  const auto bs = fic::read_bitstream(o.bitstream);
  const auto enh = fic::load_enhancer(o.enhancers.front());
  const auto high = fic::load_model(o.models.front());
  const auto rec = fic::pro_enhanced_decompress(enh, high, bs);
  fic::write_features(o.out, rec);
  run.outputs.push_back(o.out);
  return o.out + ".manifest.json";
}

fs::path cmd_evaluate(const Options& o, Run& run) {
  const auto set = load_features(o, run);
  const auto pairs = load_pairs(o, run, set.count);
  const auto m = fic::evaluate_verification(set, pairs, o.folds, o.seed);
  char line[160];
  std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", m.accuracy, m.auc, m.eer);
  std::printf("accuracy %.6f auc %.6f eer %.6f%s\n", m.accuracy, m.auc, m.eer,
              m.flipped ? " (score orientation flipped)" : "");
  if (o.out.empty()) return o.features + ".evaluate.manifest.json";
  fic::write_text_atomic(o.out, std::string("accuracy,auc,eer\n") + line);
  run.outputs.push_back(o.out);
  return o.out + ".manifest.json";
}

fs::path cmd_sweep(const Options& o, Run& run) {
  require_out(o);
  const auto set = load_features(o, run);
  const auto pairs = load_pairs(o, run, set.count);

  std::vector<fic::CodecModel> codecs;
  for (const auto& path : o.models) {
    run.inputs.push_back(path);
    codecs.push_back(fic::load_model(path));
  }
  auto find_codec = [&](const std::string& id) -> const fic::CodecModel& {
    for (const auto& c : codecs) {
      if (c.model_id == id) return c;
    }
    throw fic::ConfigError("no --model with id \"" + id + "\" for the enhancer");
  };
  std::vector<std::unique_ptr<fic::Pipeline>> pipelines;
  for (const auto& c : codecs) pipelines.push_back(fic::make_pro_pipeline(c));
  for (const auto& path : o.enhancers) {
    run.inputs.push_back(path);
    auto enh = fic::load_enhancer(path);
    const auto& low = find_codec(enh.source_model_id);
    const auto& high = find_codec(enh.target_model_id);
    pipelines.push_back(fic::make_pro_e_pipeline(low, std::move(enh), high));
  }
  for (int qp : o.qps) pipelines.push_back(fic::make_sq_pipeline(qp, set.dim));
  for (const auto& path : o.sqes) {
    run.inputs.push_back(path);
    pipelines.push_back(fic::make_sqe_pipeline(fic::load_sqe(path)));
  }

  const auto result = fic::run_sweep(set, pairs, pipelines, o.folds, o.seed);
  const std::string csv = fic::sweep_csv(result.points);

  const fs::path dir(o.out);
  fs::create_directories(dir / "bitstreams");
  for (std::size_t i = 0; i < pipelines.size(); ++i) {
    const auto path = dir / "bitstreams" / (pipelines[i]->label() + ".fcb");
    fic::write_bitstream(path, result.bitstreams[i]);
    run.outputs.push_back(path.string());
  }
  fic::write_text_atomic(dir / "sweep.csv", csv);
  run.outputs.push_back((dir / "sweep.csv").string());
  std::cout << csv;
  return dir / "manifest.json";
}

void add_train_flags(CLI::App* sub, Options& o) {
  sub->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--batch-size", o.batch_size, "Mini-batch size")->capture_default_str();
  sub->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Learned feature compression toolkit", "fic"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::map<CLI::App*, std::function<fs::path(const Options&, Run&)>> handlers;
  auto sub = [&](const char* name, const char* help, auto fn) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--seed", o.seed, "Seed for all randomness")->capture_default_str();
    handlers[s] = fn;
    return s;
  };

  auto* gen = sub("gen-synthetic", "Generate a synthetic identity-clustered feature set", cmd_gen_synthetic);
  gen->add_option("--out", o.out, "Output feature file")->required();
  gen->add_option("--pairs", o.pairs, "Also write verification pairs here");
  gen->add_option("--identities", o.identities)->capture_default_str();
  gen->add_option("--per-identity", o.per_identity)->capture_default_str();
  gen->add_option("--dim", o.dim)->capture_default_str();
  gen->add_option("--sigma", o.sigma, "Within-identity noise")->capture_default_str();
  gen->add_option("--n-pos", o.n_pos)->capture_default_str();
  gen->add_option("--n-neg", o.n_neg)->capture_default_str();

  auto* stats = sub("stats", "Per-dimension histograms, means and standard deviations", cmd_stats);
  stats->add_option("--features", o.features)->required();
  stats->add_option("--dims", o.dims, "Dimension indices")->delimiter(',');
  stats->add_option("--bins", o.bins)->capture_default_str();
  stats->add_option("--out", o.out, "Output CSV")->required();

  auto* tc = sub("train-codec", "Train an end-to-end rate-distortion codec", cmd_train_codec);
  tc->add_option("--features", o.features)->required();
  tc->add_option("--out", o.out, "Output model (FCM1)")->required();
  tc->add_option("--lambda", o.lambda, "Rate weight")->capture_default_str();
  tc->add_option("--latent-dim", o.latent_dim)->capture_default_str();
  tc->add_option("--hidden-dim", o.hidden_dim)->capture_default_str();
  tc->add_option("--r-clip", o.r_clip, "Latent clipping threshold")->capture_default_str();
  tc->add_option("--noise", o.noise, "Training noise half-width")->capture_default_str();
  tc->add_option("--id", o.id, "Model identifier")->capture_default_str();
  add_train_flags(tc, o);

  auto* te = sub("train-enhancer", "Train a latent enhancer from a low- to a high-rate codec", cmd_train_enhancer);
  te->add_option("--features", o.features)->required();
  te->add_option("--low", o.low, "Low-rate codec model")->required();
  te->add_option("--high", o.high, "High-rate codec model")->required();
  te->add_option("--out", o.out, "Output enhancer (FCE1)")->required();
  add_train_flags(te, o);

  auto* ts = sub("train-sqe", "Train the residual enhancer for scalar-quantized features", cmd_train_sqe);
  ts->add_option("--features", o.features)->required();
  ts->add_option("--qp", o.qps, "Quantization parameter")->required();
  ts->add_option("--out", o.out, "Output model (FCS1)")->required();
  add_train_flags(ts, o);

  auto* comp = sub("compress", "Encode features with a codec model or SQ", cmd_compress);
  comp->add_option("--features", o.features)->required();
  comp->add_option("--model", o.models, "Codec model");
  comp->add_option("--qp", o.qps, "SQ quantization parameter");
  comp->add_option("--out", o.out, "Output bitstream (FCB1)")->required();

  auto* dec = sub("decompress", "Decode a bitstream back to features", cmd_decompress);
  dec->add_option("--bitstream", o.bitstream)->required();
  dec->add_option("--model", o.models, "Codec model");
  dec->add_option("--qp", o.qps, "SQ quantization parameter");
  dec->add_option("--out", o.out, "Output features")->required();

  auto* enh = sub("enhance", "Decode a low-rate bitstream through the enhancer and high-rate decoder", cmd_enhance);
  enh->add_option("--bitstream", o.bitstream)->required();
  enh->add_option("--enhancer", o.enhancers)->required();
  enh->add_option("--model", o.models, "High-rate codec model")->required();
  enh->add_option("--out", o.out, "Output features")->required();

  auto* ev = sub("evaluate", "Verification accuracy, ROC-AUC and EER", cmd_evaluate);
  ev->add_option("--features", o.features)->required();
  ev->add_option("--pairs", o.pairs)->required();
  ev->add_option("--folds", o.folds)->capture_default_str();
  ev->add_option("--out", o.out, "Optional metrics CSV");

  auto* sw = sub("sweep", "Rate-accuracy table over codecs, enhancers and SQ points", cmd_sweep);
  sw->add_option("--features", o.features)->required();
  sw->add_option("--pairs", o.pairs)->required();
  sw->add_option("--model", o.models, "Codec models (repeatable)");
  sw->add_option("--enhancer", o.enhancers, "Enhancers (repeatable)");
  sw->add_option("--sqe", o.sqes, "SQ-E models (repeatable)");
  sw->add_option("--qp", o.qps, "SQ points (repeatable)");
  sw->add_option("--folds", o.folds)->capture_default_str();
  sw->add_option("--out", o.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Run run{chosen->get_name(), {}, {}};
  const std::vector<std::string> args(argv, argv + argc);
  const auto start = std::chrono::steady_clock::now();
  try {
    const fs::path manifest = handlers.at(chosen)(o, run);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest, run, chosen, o, args, seconds);
  } catch (const fic::Error& e) {
    std::cerr << "fic " << run.command << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fic " << run.command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
