//------------------------------------------------------------------------------
//
//   Copyright 2026 The mechlab Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "mechlab/cli.hpp"
#include "mechlab/instances.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace mechlab::cli {
namespace {

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "mechlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Invocation r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// The CSV row whose name matches, or empty.
std::string row(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(name + ",", 0) == 0) return line;
  return {};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("mechlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }

  std::filesystem::path dir_;
};

constexpr const char* kTwoBuyers = R"({"m":1,"buyers":[{"types":[{"values":["2"],"prob":"1"}]},
                                                 {"types":[{"values":["2"],"prob":"1"}]}]})";
constexpr const char* kTwoTypes = R"({"m":2,"buyers":[{"types":[{"values":["3","1"],"prob":"1/2"},
                                                             {"values":["1","3"],"prob":"1/2"}]}]})";

TEST(Cli, CsvHeaderCarriesVersionConfigAndSeed) {
  const Invocation r = run({"gap", "--m", "4"});
  EXPECT_EQ(r.out.rfind("# mechlab " MECHLAB_VERSION "\n# config: gap --m=4\n# seed: 0\n", 0), 0U) << r.out;
  EXPECT_NE(r.out.find("name,lhs,rhs,relation,pass\n"), std::string::npos);
}

TEST(Cli, GapReportsProfitMismatchAsAssertionFailure) {
  const Invocation r = run({"gap", "--m", "16"});
  EXPECT_EQ(r.code, kExitAssertion);
  EXPECT_EQ(row(r.out, "SProfit_c"), "SProfit_c,32767/16384,2,<=,true");
  EXPECT_EQ(row(r.out, "menu profit at c == (m-1)/2"), "menu profit at c == (m-1)/2,53247/32768,15/2,==,false");
  EXPECT_NE(r.err.find("assertion failed"), std::string::npos);
}

TEST_F(CliFiles, SequentialTwoBuyerExample) {
  const std::string inst = write("two.json", kTwoBuyers);
  const Invocation r = run({"sequential", "--instance", inst, "--order", "0,1", "--pricing-out", path("p.json")});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find(",true"), std::string::npos);
  EXPECT_EQ(r.out.find(",false"), std::string::npos);
  ASSERT_TRUE(std::filesystem::exists(path("p.json")));
  const Invocation again = run({"sequential", "--instance", inst, "--pricing", path("p.json"), "--mode", "mc", "--trials",
                         "20000", "--seed", "5"});
  EXPECT_EQ(again.code, kExitOk) << again.out << again.err;
}

TEST_F(CliFiles, ValidateMalformedFileExitsTwo) {
  const std::string bad = write("bad.json", R"({"m":1,"buyers":[{"types":[{"values":["1"],"prob":"1/0"}]}]})");
  const Invocation r = run({"validate", "--instance", bad});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_NE(r.err.find("prob"), std::string::npos) << r.err;
  EXPECT_EQ(run({"validate", "--instance", path("missing.json")}).code, kExitParse);
  EXPECT_EQ(run({"validate", "--bogus"}).code, kExitParse);
}

TEST_F(CliFiles, ValidateReportsInvariantViolations) {
  const std::string light = write("light.json", R"({"m":1,"buyers":[{"types":[{"values":["1"],"prob":"9/10"}]}]})");
  const Invocation r = run({"validate", "--instance", light});
  EXPECT_NE(r.code, kExitOk);
  EXPECT_NE((r.out + r.err).find("distribution mass != 1"), std::string::npos) << r.out << r.err;
  const std::string ok = write("ok.json", kTwoTypes);
  EXPECT_EQ(run({"validate", "--instance", ok}).code, kExitOk);
}

TEST_F(CliFiles, GuardLimitExitsThree) {
  write_instance(dir_ / "gap.json", gap_instance(8).instance);
  const Invocation r = run({"opt-pricing", "--instance", path("gap.json"), "--guard-mappings", "10"});
  EXPECT_EQ(r.code, kExitGuard);
}

TEST_F(CliFiles, CheckBuyManyWitness) {
  const std::string menu = write("m.json", R"({"m":2,"options":[{"lottery":["1","0"],"price":"1"},
      {"lottery":["0","1"],"price":"1"},{"lottery":["1/2","1/2"],"price":"3"}]})");
  const Invocation r = run({"check-buy-many", "--menu", menu});
  EXPECT_EQ(r.code, kExitAssertion);
  write_menu(dir_ / "gap.json", gap_instance(4).menu);
  EXPECT_EQ(run({"check-buy-many", "--menu", path("gap.json")}).code, kExitOk);
}

TEST_F(CliFiles, AnalysisCommandsOnWorkedExample) {
  const std::string inst = write("t.json", kTwoTypes);
  const Invocation opt = run({"opt-pricing", "--instance", inst});
  EXPECT_EQ(opt.code, kExitOk) << opt.err;
  EXPECT_NE(opt.out.find(",3,"), std::string::npos) << opt.out;
  EXPECT_EQ(run({"exante", "--instance", inst, "--x", "1/4,1/2"}).code, kExitOk);
  EXPECT_EQ(run({"subgradient", "--instance", inst, "--x", "1/2,1/4", "--trials", "5", "--seed", "2"}).code,
            kExitOk);
  const Invocation dec = run({"decompose", "--instance", inst, "--prices", "2,2", "--x", "1/4,1/2", "--availability",
                       "0+1:1"});
  EXPECT_EQ(dec.code, kExitOk) << dec.out << dec.err;
  EXPECT_EQ(run({"decompose", "--instance", inst, "--prices", "2,2", "--x", "3/4,0"}).code, kExitParse);
  write_menu(dir_ / "menu.json", LotteryMenu{2, {{{Rational(1), Rational(0)}, Rational(2)}}});
  const Invocation pb = run({"profit-bound", "--instance", inst, "--menu", path("menu.json"), "--costs", "0,1"});
  EXPECT_EQ(pb.code, kExitOk) << pb.out << pb.err;
}

TEST(Cli, SweepIsReproducibleAcrossThreadCounts) {
  setenv("MECHLAB_THREADS", "1", 1);
  const Invocation one = run({"sweep", "--trials", "6", "--seed", "3", "--m", "3"});
  setenv("MECHLAB_THREADS", "4", 1);
  const Invocation four = run({"sweep", "--trials", "6", "--seed", "3", "--m", "3"});
  unsetenv("MECHLAB_THREADS");
  EXPECT_EQ(one.code, kExitOk) << one.out;
  EXPECT_EQ(one.out, four.out);
  setenv("MECHLAB_THREADS", "zero", 1);
  EXPECT_EQ(run({"sweep", "--trials", "1"}).code, kExitParse);
  unsetenv("MECHLAB_THREADS");
}

}  // namespace
}  // namespace mechlab::cli
