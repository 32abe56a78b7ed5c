/* Copyright 2026 The HomoGuard Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Drives the homoguard executable as a user would and checks exit codes
// and outputs.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string output;
};

CliRun Cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + HOMOGUARD_CLI + "' " + args + " 2>&1";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  for (size_t n; (n = std::fread(buf, 1, sizeof(buf), pipe)) > 0;) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / ("hg_cli_test_" + std::to_string(::getpid())));
    fs::remove_all(*dir_);
    fs::create_directories(*dir_);
    const CliRun r = Cli("generate --seed 3 --count 4 --dc 256 --out '" + (*dir_ / "data").string() + "'");
    ASSERT_EQ(r.code, 0) << r.output;
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }
  static fs::path Dir() { return *dir_; }
  static std::string Manifest() { return "'" + (*dir_ / "data" / "manifest.json").string() + "'"; }

 private:
  static fs::path* dir_;
};

fs::path* CliTest::dir_ = nullptr;

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Cli("--help").code, 0);
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("frobnicate").code, 2);
  EXPECT_EQ(Cli("evaluate --manifest x.json").code, 2);  // --out missing
  EXPECT_EQ(Cli("evaluate --manifest " + Manifest() + " --out o --method magic").code, 2);
}

TEST_F(CliTest, GenerateWritesManifest) {
  EXPECT_TRUE(fs::exists(Dir() / "data" / "manifest.json"));
  EXPECT_TRUE(fs::exists(Dir() / "data" / "images" / "s000003_thr.pgm"));
}

TEST_F(CliTest, InfeasibleDcIsConfigError) {
  const CliRun r = Cli("generate --count 1 --dc 9000 --out '" + (Dir() / "bad").string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("InfeasibleDc"), std::string::npos) << r.output;
}

TEST_F(CliTest, SeedEnvironmentOverridesFlag) {
  const std::string a = (Dir() / "env_a").string(), b = (Dir() / "env_b").string();
  ASSERT_EQ(Cli("generate --seed 1 --count 1 --dc 256 --out '" + a + "'", "HOMOGUARD_SEED=3").code, 0);
  ASSERT_EQ(Cli("generate --seed 3 --count 1 --dc 256 --out '" + b + "'").code, 0);
  EXPECT_EQ(Slurp(fs::path(a) / "images" / "s000000_thr.pgm"),
            Slurp(fs::path(b) / "images" / "s000000_thr.pgm"));
  EXPECT_EQ(Slurp(fs::path(a) / "images" / "s000000_thr.pgm"),
            Slurp(Dir() / "data" / "images" / "s000000_thr.pgm"));
  EXPECT_EQ(Cli("generate --count 1 --out '" + a + "'", "HOMOGUARD_SEED=abc").code, 2);
}

TEST_F(CliTest, EvaluateRocHistAblate) {
  const std::string out = (Dir() / "eval").string();
  CliRun r = Cli("evaluate --manifest " + Manifest() + " --out '" + out +
              "' --estimator oracle --oracle-sigma 3 --oc 32");
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"records.json", "records.csv", "table.json", "table.csv"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  }
  r = Cli("hist --records '" + out + "/records.json' --bin-width 5 --max 100");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(fs::path(out) / "hist.csv"));

  // The roc command needs both labels; a very low threshold makes every
  // sample a failure, which is a configuration problem.
  r = Cli("roc --records '" + out + "/records.json' --error-threshold 0.000001");
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_NE(r.output.find("DegenerateLabels"), std::string::npos);

  r = Cli("ablate --manifest " + Manifest() + " --axis early-stopping --values none,2 --estimator oracle --out '" +
          (Dir() / "ablation.json").string() + "'");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(Dir() / "ablation.json"));
  r = Cli("ablate --manifest " + Manifest() + " --axis depth --values 1 --out x.json");
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, MissingManifestIsConfigError) {
  EXPECT_EQ(Cli("evaluate --manifest '" + (Dir() / "nope.json").string() + "' --out o").code, 2);
}

TEST_F(CliTest, EstimatorFailureExitCode) {
  const std::string est = std::string("external:'") + HOMOGUARD_FAKE_ESTIMATOR + "' --fault crash --fault-at 0";
  const CliRun r = Cli("evaluate --manifest " + Manifest() + " --out '" + (Dir() / "ext").string() +
                    "' --estimator \"" + est + "\"");
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_TRUE(fs::exists(Dir() / "ext" / "records.json"));
}

TEST_F(CliTest, ExternalEstimatorHappyPath) {
  const std::string est = std::string("external:'") + HOMOGUARD_FAKE_ESTIMATOR + "' --mode constant --value 1,1";
  const CliRun r = Cli("evaluate --manifest " + Manifest() + " --out '" + (Dir() / "ext_ok").string() +
                    "' --method none --estimator \"" + est + "\"");
  EXPECT_EQ(r.code, 0) << r.output;
}

}  // namespace
