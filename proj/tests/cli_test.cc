// Copyright 2026 The Fairlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fairlab/gamegen.h"
#include "fairlab/io.h"

namespace fairlab {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(FAIRLAB_CLI) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (size_t n; (n = fread(buf, 1, sizeof(buf), pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fairlab_cli_" + std::to_string(getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

TEST_F(CliTest, ValidateExitCodes) {
  const std::string good =
      write("good.toml", game_to_toml(cl_family_exact(FamilyParams::of(0.01, 0.01))));
  EXPECT_EQ(run("validate " + good).code, 0);
  EXPECT_EQ(run("validate --game " + good).code, 0);
  // Parses, but the limit game breaks full support.
  const std::string limit =
      write("limit.toml", game_to_toml(cl_family_exact({Rational(0), Rational(0), true})));
  EXPECT_EQ(run("validate " + limit).code, 1);
  const std::string broken = write("broken.toml", "[features\n");
  EXPECT_EQ(run("validate " + broken).code, 2);
  EXPECT_EQ(run("validate /nonexistent.toml").code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("nosuchcommand").code, 2);
  EXPECT_EQ(run("control --gen family:1/100,1/100 --control zz").code, 2);
  EXPECT_EQ(run("analyze --gen family:1/100,1/100 --format xml").code, 2);
  EXPECT_EQ(run("analyze --gen family:1,1").code, 2);
}

std::map<std::string, std::vector<std::string>> csv_sections(const std::string& text) {
  std::map<std::string, std::vector<std::string>> out;
  std::string current;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# ", 0) == 0) {
      current = line.substr(2);
    } else {
      out[current].push_back(line);
    }
  }
  return out;
}

TEST_F(CliTest, AnalyzeCsvAgreesWithJson) {
  const CliResult json = run("analyze --gen family:1/100,1/100 --format json");
  const CliResult csv = run("analyze --gen family:1/100,1/100 --format csv");
  ASSERT_EQ(json.code, 0);
  ASSERT_EQ(csv.code, 0);
  const Json report = Json::parse(json.out);
  const auto sections = csv_sections(csv.out);
  const auto& pts = sections.at("intersections.csv");
  const Json& jpts = report["intersections"];
  ASSERT_EQ(pts.size(), jpts.size() + 1);
  for (size_t k = 0; k < jpts.size(); ++k) {
    std::istringstream row(pts[k + 1]);
    std::string label, l, c;
    std::getline(row, label, ',');
    std::getline(row, l, ',');
    std::getline(row, c, ',');
    EXPECT_EQ(label, jpts[k]["label"].get<std::string>());
    EXPECT_EQ(std::stod(l), jpts[k]["l"].get<double>());
    EXPECT_EQ(std::stod(c), jpts[k]["c"].get<double>());
  }
  EXPECT_EQ(sections.at("equilibria.csv").size(), report["equilibria"].size() + 1);
}

TEST_F(CliTest, ReportIsByteIdenticalAcrossRuns) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run("analyze --gen family:1/100,1/100 --out " + a.string()).code, 0);
  ASSERT_EQ(run("analyze --gen family:1/100,1/100 --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "tables" / "intersections.csv"), slurp(b / "tables" / "intersections.csv"));
  EXPECT_TRUE(fs::exists(a / "plots" / "curves.svg"));
  const Json meta = Json::parse(slurp(a / "meta.json"));
  EXPECT_TRUE(meta.contains("fairlab_version"));
  EXPECT_TRUE(meta.contains("generated_at"));
  EXPECT_TRUE(meta.contains("argv"));
  EXPECT_TRUE(meta.contains("seed"));
}

TEST_F(CliTest, EqualOpportunityIsIdeal) {
  EXPECT_EQ(run("ideal --gen family:1/100,1/100 --control eo").code, 0);
  EXPECT_EQ(run("ideal --gen family:1/100,1/100 --control un").code, 1);
}

TEST_F(CliTest, GenFamilyWritesAValidGame) {
  const std::string path = (dir_ / "fam.toml").string();
  ASSERT_EQ(run("gen family --gamma 1/100 --delta 1/50 --out " + path).code, 0);
  const ExactGameSpec g = parse_game_toml_exact(slurp(path));
  EXPECT_EQ(g.law.p_proxy[0][0][1], Rational(1, 50));
  const CliResult stdout_run = run("gen family --gamma 1/100 --delta 1/50");
  EXPECT_EQ(stdout_run.out, slurp(path));
  EXPECT_EQ(run("gen family --gamma 0 --delta 0").code, 2);
  EXPECT_EQ(run("gen family --gamma 0 --delta 0 --limit").code, 0);
}

TEST_F(CliTest, GenReverseRoundTrip) {
  const FamilyParams p = FamilyParams::of(0.01, 0.01);
  const GameSpec g = cl_family(p);
  const CostThresholdPair c = family_threshold(p);
  const auto [mu, f] = colorblind_aggregate(mu_re(g, c), f_re(g, c));
  const std::string input = write(
      "in.json", to_json(ReverseGameInput{g.features, family_colorblind_policy(), mu, f, 0.5}).dump());
  const std::string out = (dir_ / "rev.toml").string();
  ASSERT_EQ(run("gen reverse --input " + input + " --out " + out).code, 0);
  EXPECT_EQ(run("validate " + out).code, 0);
  EXPECT_EQ(run("gen reverse --input " + write("bad.json", "{")).code, 2);
}

}  // namespace
}  // namespace fairlab
