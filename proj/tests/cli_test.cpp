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

// Drives the fic executable as a subprocess.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#include "fic/binary_io.hpp"
#include "fic/data.hpp"
#include "fic/entropy.hpp"
#include "fic/model_io.hpp"
#include "fic/sq.hpp"
#include "fic/sweep.hpp"

namespace fic {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fic_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" FIC_CLI_PATH "' " + args + " > log.txt 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  fs::path at(const std::string& name) const { return dir_ / name; }
  std::string read(const std::string& name) const {
    std::ifstream in(at(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void make_data() {
    ASSERT_EQ(run("gen-synthetic --out f.fea --pairs p.csv --identities 12 --per-identity 6 --dim 16 "
                  "--n-pos 60 --n-neg 60"),
              0);
  }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("evaluate --features a --pairs b --bogus"), 2);
  EXPECT_EQ(run("compress --features a"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, MissingInputExitsOneWithoutOutputs) {
  EXPECT_EQ(run("train-codec --features missing.fea --out m.fcm --epochs 1"), 1);
  EXPECT_NE(read("log.txt").find("missing.fea"), std::string::npos);
  EXPECT_FALSE(fs::exists(at("m.fcm")));
  EXPECT_FALSE(fs::exists(at("m.fcm.log.csv")));
  EXPECT_FALSE(fs::exists(at("m.fcm.manifest.json")));
  EXPECT_FALSE(fs::exists(at("m.fcm.tmp")));
}

TEST_F(Cli, CompressDecompressMatchesInProcessDecode) {
  make_data();
  ASSERT_EQ(run("train-codec --features f.fea --out m.fcm --epochs 2 --latent-dim 4 --hidden-dim 8 --id L0"), 0);
  ASSERT_EQ(run("compress --features f.fea --model m.fcm --out f.fcb"), 0);
  ASSERT_EQ(run("decompress --bitstream f.fcb --model m.fcm --out r.fea"), 0);

  const auto model = load_model(at("m.fcm"));
  const auto features = read_features(at("f.fea"));
  const auto bs = pro_compress(model, features);
  EXPECT_EQ(read_bitstream(at("f.fcb")), bs);
  const auto direct = pro_decompress(model, bs);
  EXPECT_EQ(read_file(at("r.fea")), encode_features(direct));

  const auto manifest = nlohmann::json::parse(read("m.fcm.manifest.json"));
  for (const char* key : {"command", "config", "argv", "seed", "inputs", "outputs", "tool_version",
                          "wall_clock_seconds"}) {
    EXPECT_TRUE(manifest.contains(key)) << key;
  }
  EXPECT_EQ(manifest["command"], "train-codec");
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["config"]["latent-dim"], "4");
}

TEST_F(Cli, SqCompressRoundTrip) {
  make_data();
  ASSERT_EQ(run("compress --features f.fea --qp 40 --out s.fcb"), 0);
  ASSERT_EQ(run("decompress --bitstream s.fcb --qp 40 --out s.fea"), 0);
  EXPECT_EQ(read_features(at("s.fea")).values, sq_reconstruct(read_features(at("f.fea")), 40).values);
  EXPECT_EQ(run("compress --features f.fea --qp 40 --qp 41 --out t.fcb"), 1);
  EXPECT_FALSE(fs::exists(at("t.fcb")));
}

TEST_F(Cli, SweepEmitsOneRowPerPipelinePlusReference) {
  make_data();
  const std::string common = " --features f.fea --epochs 1 --latent-dim 4 --hidden-dim 8";
  const char* lambdas[] = {"1e-4", "1e-5", "1e-6", "1e-7"};
  std::string models;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "L" + std::to_string(i);
    ASSERT_EQ(run("train-codec" + common + " --lambda " + lambdas[i] + " --id " + id + " --out " + id + ".fcm"), 0);
    models += " --model " + id + ".fcm";
  }
  ASSERT_EQ(run("train-enhancer --features f.fea --low L0.fcm --high L3.fcm --out e.fce --epochs 1"), 0);
  ASSERT_EQ(run("train-sqe --features f.fea --qp 58 --out s.fcs --epochs 1"), 0);
  ASSERT_EQ(run("sweep --features f.fea --pairs p.csv" + models +
                " --enhancer e.fce --sqe s.fcs --qp 4 --qp 22 --qp 40 --qp 58 --qp 64 --folds 5 --out sw"),
            0) << read("log.txt");

  std::istringstream csv(read("sw/sweep.csv"));
  std::string line;
  std::vector<std::string> labels;
  std::getline(csv, line);
  EXPECT_EQ(line, "label,bits_per_dim,bits_per_feature,accuracy,auc,eer");
  while (std::getline(csv, line)) labels.push_back(line.substr(0, line.find(',')));
  ASSERT_EQ(labels.size(), 12u);
  EXPECT_EQ(labels.front(), "raw");
  EXPECT_EQ(labels[5], "PRO-E-L0-L3");
  EXPECT_EQ(labels.back(), "SQE58");
  EXPECT_TRUE(fs::exists(at("sw/manifest.json")));
  EXPECT_TRUE(fs::exists(at("sw/bitstreams/PRO-E-L0-L3.fcb")));
}

TEST_F(Cli, EnhancerForUnknownCodecIsADomainError) {
  make_data();
  const std::string common = " --features f.fea --epochs 1 --latent-dim 4 --hidden-dim 8";
  ASSERT_EQ(run("train-codec" + common + " --id A --out a.fcm"), 0);
  ASSERT_EQ(run("train-codec" + common + " --id B --out b.fcm"), 0);
  ASSERT_EQ(run("train-enhancer --features f.fea --low a.fcm --high b.fcm --out e.fce --epochs 1"), 0);
  EXPECT_EQ(run("sweep --features f.fea --pairs p.csv --model a.fcm --enhancer e.fce --out sw"), 1);
  EXPECT_FALSE(fs::exists(at("sw")));
}

}  // namespace
}  // namespace fic
