#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sentishape/harness.hpp"
#include "sentishape/stub_scorer.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "sshape_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(SENTISHAPE_CLI) + " " + args + " >" + (kScratch / "stdout").string() +
                          " 2>" + (kScratch / "stderr").string() + " </dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
  void TearDown() override { fs::remove_all(kScratch); }
  std::string at(const std::string& name) const { return (kScratch / name).string(); }
};

}  // namespace

TEST_F(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_NE(slurp(kScratch / "stdout").find("train"), std::string::npos);
}

TEST_F(Cli, UnknownSubcommandIsAUsageError) { EXPECT_EQ(run("juggle"), 2); }

TEST_F(Cli, GenerateRolloutFitAnalyze) {
  ASSERT_EQ(run("gen-games --kind tree --count 30 --out " + at("games")), 0);
  EXPECT_EQ(run("gen-games --kind tree --count 30 --out " + at("games")), 1);
  ASSERT_EQ(run("rollout " + at("games") + " --policy walkthrough --out " + at("wins.jsonl")), 0);
  ASSERT_EQ(run("rollout " + at("games") + " --policy random -n 3 --seed 2 --out " + at("rand.jsonl")), 0);
  ASSERT_EQ(run("fit-nb --pos " + at("wins.jsonl") + " --neg " + at("rand.jsonl") + " --out " + at("nb.json")), 0);
  EXPECT_TRUE(fs::exists(at("nb.json")));
  ASSERT_EQ(run("analyze " + at("wins.jsonl") + " " + at("rand.jsonl") + " --scorer nb:" + at("nb.json") +
                " --out " + at("an")),
            0);
  for (const char* f : {"trajectory_sentiment.csv", "correlations.csv", "last_k.csv"}) {
    EXPECT_TRUE(fs::exists(kScratch / "an" / f)) << f;
  }
}

TEST_F(Cli, TrainFlagsOverrideTheConfigFile) {
  std::ofstream(at("cfg.json")) << R"({"epochs": 5, "gen": {"kind": "chain", "count": 1},
    "agent": {"embed_dim": 4, "hidden_dim": 4, "mlp_dim": 4, "batch_size": 4}})";
  ASSERT_EQ(run("train --config " + at("cfg.json") + " --epochs 2 --out " + at("run")), 0);
  const auto cfg = sshape::RunConfig::from_json(slurp(kScratch / "run" / "run_config.json"));
  EXPECT_EQ(cfg.epochs, 2);
  EXPECT_EQ(cfg.games.kind, sshape::GameKind::Chain);
  EXPECT_EQ(cfg.agent.hidden_dim, 4);
}

TEST_F(Cli, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(run("train --gate maybe --out " + at("run")), 2);
  EXPECT_EQ(run("train --scale -1 --out " + at("run")), 2);
  EXPECT_EQ(run("train --scorer bert --out " + at("run")), 2);
  EXPECT_EQ(run("fit-nb --pos a --neg b --alpha 0 --out " + at("nb.json")), 2);
}

TEST_F(Cli, MissingInputExitsWithOne) {
  EXPECT_EQ(run("rollout " + at("absent.json") + " --out " + at("x.jsonl")), 1);
}

TEST_F(Cli, PlayReadsCommandsFromStdin) {
  ASSERT_EQ(run("gen-games --kind chain --count 1 --out " + at("g")), 0);
  EXPECT_EQ(run("play " + at("g/chain-0.json") + " --save " + at("p.jsonl")), 0);
  EXPECT_TRUE(fs::exists(at("p.jsonl")));
}

TEST_F(Cli, CheckScorerAgainstAConformingServer) {
  sshape::StubScorerServer server(sshape::StubScorerServer::protocol_handler([](std::string_view) { return 0.25; }));
  EXPECT_EQ(run("check-scorer --endpoint " + server.endpoint() + " --transcript " SENTISHAPE_TEST_DATA
                "/scorer_golden.jsonl"),
            0);
  EXPECT_NE(slurp(kScratch / "stdout").find("20/20"), std::string::npos);
}
