// Drives the built flexnav binary through its subcommands.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(FLEXNAV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / "fx_cli";
        fs::remove_all(dir_);
        fs::create_directories(dir_ / "graphs");
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenRunEvalTraceWorkEndToEnd) {
    ASSERT_EQ(run_cli("gen --nodes 12 --floors 2 --seed 9 --out " +
                      (dir_ / "graphs/house.json").string()),
              0);
    ASSERT_TRUE(fs::exists(dir_ / "graphs/house.json"));

    {
        std::ofstream out(dir_ / "episodes.json");
        out << R"({"episodes": [
          {"id": "cli1", "scan": "house", "instruction": "go to the lamp",
           "start": "f0n00", "goals": ["f1n01"], "target_object": "lamp"}
        ]})";
    }
    {
        std::ofstream out(dir_ / "config.json");
        out << R"({"seed": 3, "parallelism": 2, "guidance_context_mode": "multi"})";
    }
    ASSERT_EQ(run_cli("run --graphs " + (dir_ / "graphs").string() + " --episodes " +
                      (dir_ / "episodes.json").string() + " --config " +
                      (dir_ / "config.json").string() + " --out " +
                      (dir_ / "out").string() + " --providers mock"),
              0);
    EXPECT_TRUE(fs::exists(dir_ / "out/results.jsonl"));
    EXPECT_TRUE(fs::exists(dir_ / "out/summary.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out/traces/cli1.json"));

    EXPECT_EQ(run_cli("eval --results " + (dir_ / "out/results.jsonl").string()), 0);

    ASSERT_EQ(run_cli("trace --run " + (dir_ / "out").string() + " --graphs " +
                      (dir_ / "graphs").string() + " --episode cli1 --out " +
                      (dir_ / "cli1.dot").string()),
              0);
    auto dot = testsupport::read_file(dir_ / "cli1.dot");
    EXPECT_NE(dot.find("graph trajectory {"), std::string::npos);
    EXPECT_NE(dot.find("fillcolor=green"), std::string::npos);
}

TEST_F(CliTest, RecordThenReplayMatches) {
    ASSERT_EQ(run_cli("gen --nodes 10 --floors 2 --seed 4 --out " +
                      (dir_ / "graphs/h.json").string()),
              0);
    {
        std::ofstream out(dir_ / "episodes.json");
        out << R"({"episodes": [
          {"id": "r1", "scan": "h", "instruction": "go to the chair",
           "start": "f0n00", "goals": ["f0n04"], "target_object": "chair"}
        ]})";
    }
    std::string common = "run --graphs " + (dir_ / "graphs").string() + " --episodes " +
                         (dir_ / "episodes.json").string();
    ASSERT_EQ(run_cli(common + " --out " + (dir_ / "out1").string() +
                      " --providers mock --record " + (dir_ / "rec").string()),
              0);
    ASSERT_EQ(run_cli(common + " --out " + (dir_ / "out2").string() +
                      " --providers replay:" + (dir_ / "rec").string()),
              0);
    EXPECT_EQ(testsupport::read_file(dir_ / "out1/results.jsonl"),
              testsupport::read_file(dir_ / "out2/results.jsonl"));
}

TEST_F(CliTest, UnknownProviderModeFails) {
    ASSERT_EQ(run_cli("gen --nodes 6 --floors 1 --seed 1 --out " +
                      (dir_ / "graphs/g.json").string()),
              0);
    {
        std::ofstream out(dir_ / "episodes.json");
        out << R"({"episodes": []})";
    }
    EXPECT_NE(run_cli("run --graphs " + (dir_ / "graphs").string() + " --episodes " +
                      (dir_ / "episodes.json").string() + " --out " +
                      (dir_ / "out").string() + " --providers wished"),
              0);
}

TEST_F(CliTest, MissingEpisodeInTraceFails) {
    ASSERT_EQ(run_cli("gen --nodes 6 --floors 1 --seed 1 --out " +
                      (dir_ / "graphs/g.json").string()),
              0);
    {
        std::ofstream out(dir_ / "episodes.json");
        out << R"({"episodes": [
          {"id": "only", "scan": "g", "instruction": "go to the table",
           "start": "f0n00", "goals": ["f0n02"], "target_object": "table"}
        ]})";
    }
    ASSERT_EQ(run_cli("run --graphs " + (dir_ / "graphs").string() + " --episodes " +
                      (dir_ / "episodes.json").string() + " --out " +
                      (dir_ / "out").string()),
              0);
    EXPECT_NE(run_cli("trace --run " + (dir_ / "out").string() + " --graphs " +
                      (dir_ / "graphs").string() + " --episode ghost --out " +
                      (dir_ / "g.dot").string()),
              0);
}
