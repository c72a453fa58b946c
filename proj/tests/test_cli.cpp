#include <gtest/gtest.h>

#include <filesystem>
#include <tilepeps/io.hpp>

#include "cli_run.hpp"
#include "support.hpp"

using namespace tilepeps;
using namespace tilepeps::testing;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tilepeps_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, AnswersOnDataFiles) {
  struct Case {
    std::string args, result;
  };
  const std::vector<Case> cases{
      {"count --instance " + data_file("monochrome_2x2.json"), "1"},
      {"count --instance " + data_file("empty_2x2.json"), "0"},
      {"solve --instance " + data_file("monochrome_2x2.json"), "solvable"},
      {"solve --instance " + data_file("conflict_2x2.json"), "unsolvable"},
      {"torus-count --tileset " + data_file("stripe.json") + " --lx 2 --ly 3", "0"},
      {"torus-count --tileset " + data_file("two_monochrome.json") + " --lx 3 --ly 4", "2"},
      {"zero-test-torus --tileset " + data_file("stripe.json") + " --lx 2 --ly 2", "nonzero"},
      {"zero-test-torus --tileset " + data_file("stripe.json") + " --lx 2 --ly 3", "zero"},
      {"energy --instance " + data_file("monochrome_2x2.json") + " --config " + data_file("monochrome_2x2_config.json"),
       "0"},
      {"ground-energy --instance " + data_file("empty_2x2.json"), "12"},
      {"clh --instance " + data_file("empty_2x2.json"), "NO"},
      {"clh --instance " + data_file("monochrome_2x2.json"), "YES"},
      {"check-parent --tileset " + data_file("two_monochrome.json"), "true"},
      {"check-parent --tileset " + data_file("stripe.json") + " --orientation vertical", "true"},
      {"verify-pipeline --machine " + data_file("immediate_accept.json") + " --rows 2 --cols 1", "positive"},
      {"verify-pipeline --machine " + data_file("eraser.json") + " --word 1 --rows 2 --cols 2", "negative"},
  };
  for (const auto& c : cases) {
    const auto r = run_cli(c.args);
    EXPECT_EQ(r.code, 0) << c.args;
    EXPECT_EQ(r.result, c.result) << c.args;
  }
}

TEST_F(Cli, UsageAndInputErrors) {
  for (const std::string& args : std::vector<std::string>{"", "bogus", "count", "count --instance " + data_file("no_such.json"),
                                 "torus-count --tileset " + data_file("stripe.json") + " --lx 0 --ly 2",
                                 "zero-test-torus --tileset x --lx 1 --ly 1 --bad-flag"}) {
    const auto r = run_cli(args);
    EXPECT_EQ(r.code, 1) << args;
    EXPECT_EQ(r.result, "error") << args;
  }
}

TEST_F(Cli, BudgetExceededExitsTwo) {
  const auto flag = run_cli("--budget-cells 4 ground-energy --instance " + data_file("ladder_3x3.json"));
  EXPECT_EQ(flag.code, 2);
  EXPECT_EQ(flag.result, "budget-exceeded");
  const auto env = run_cli("ground-energy --instance " + data_file("ladder_3x3.json"), "TILEPEPS_BUDGET_CELLS=4");
  EXPECT_EQ(env.code, 2);
  EXPECT_EQ(env.result, "budget-exceeded");
  EXPECT_EQ(run_cli("ground-energy --instance " + data_file("ladder_3x3.json")).code, 0);
}

TEST_F(Cli, EmptyTileSetGridIsZero) {
  ASSERT_EQ(run_cli("build-peps --instance " + data_file("empty_2x2.json") + " --out " + tmp("g.json")).result,
            "grid 2x2");
  EXPECT_EQ(run_cli("zero-test --grid " + tmp("g.json")).result, "zero");
  EXPECT_EQ(run_cli("zero-test --order columns --grid " + tmp("g.json")).result, "zero");
}

TEST_F(Cli, CompiledInstancesAreConsistent) {
  for (const auto& [file, tm] : {std::pair{"eraser.json", eraser()}, std::pair{"nd_two_state.json", nd_two_state()}})
    for (const auto& w : all_words(tm, 2))
      for (std::size_t h = 2; h <= 4; ++h) {
        const std::size_t l = 3;
        std::string word;
        for (const auto& s : w) word += s;
        const auto inst = tmp("inst.json"), grid = tmp("grid.json");
        const auto c = run_cli("compile-tm --machine " + data_file(file) + (word.empty() ? "" : " --word " + word) +
                               " --rows " + std::to_string(h) + " --cols " + std::to_string(l) + " --out " + inst);
        ASSERT_EQ(c.code, 0);
        const bool accepts = accepts_within(tm, w, h - 1, l, true).accepted;
        EXPECT_EQ(run_cli("solve --instance " + inst).result, accepts ? "solvable" : "unsolvable");
        ASSERT_EQ(run_cli("build-peps --instance " + inst + " --out " + grid).code, 0);
        EXPECT_EQ(run_cli("zero-test --grid " + grid).result, accepts ? "nonzero" : "zero");
      }
}

TEST_F(Cli, CountsMatchLibrary) {
  for (const auto& inst : corpus(12)) {
    io::write_json_file(tmp("i.json"), io::instance_to_json(inst));
    EXPECT_EQ(run_cli("count --instance " + tmp("i.json")).result, count(inst).str());
  }
}

TEST_F(Cli, OperatorFilesFeedDominates) {
  ASSERT_EQ(run_cli("parent-term --tileset " + data_file("two_monochrome.json") + " --out " + tmp("h.json")).result,
            "dim=256 kernel=2");
  io::write_json_file(tmp("zero.json"), io::operator_to_json(OperatorMatrix::zero(256)));
  EXPECT_EQ(run_cli("dominates --h1 " + tmp("h.json") + " --h2 " + tmp("zero.json")).result, "true");
  EXPECT_EQ(run_cli("dominates --h1 " + tmp("zero.json") + " --h2 " + tmp("h.json")).result, "false");
  EXPECT_EQ(run_cli("check-parent --tileset " + data_file("two_monochrome.json") + " --operator " + tmp("zero.json"))
                .result,
            "false");
}
