#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>

#include "guirec/bundled_data.hpp"
#include "guirec/session_io.hpp"
#include "guirec/simulator.hpp"
#include "guirec/table_recommender.hpp"
#include "test_support.hpp"

using namespace guirec;
using guirec::testing::fixture;
using guirec::testing::slurp;
using guirec::testing::TempDir;

namespace {

// Runs the CLI with `args`, stdout and stderr to files in `dir`; returns the exit status.
int run(const std::string& args, const TempDir& dir) {
  const std::string cmd = std::string("\"") + GUIREC_CLI_PATH + "\" " + args + " > \"" + (dir / "stdout").string() +
                          "\" 2> \"" + (dir / "stderr").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::string ingest_args(const std::filesystem::path& out) {
  return "ingest --events " + q(fixture("recorded_events.csv")) + " --seed-catalog " +
         q(fixture("recorded_seed_catalog.csv")) + " --out-dir " + q(out);
}

}  // namespace

TEST(Cli, IngestReproducesRecordedFixtureAndWritesManifest) {
  TempDir dir("cli-ingest");
  ASSERT_EQ(run(ingest_args(dir / "out"), dir), 0) << slurp(dir / "stderr");
  EXPECT_EQ(slurp(dir / "out" / "sessions.csv"), slurp(fixture("recorded_sessions.csv")));

  const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "ingest");
  EXPECT_EQ(manifest["options"]["events"], fixture("recorded_events.csv").string());
  EXPECT_EQ(manifest["outputs"], nlohmann::json::array({"sessions.csv", "catalog.csv"}));
  EXPECT_TRUE(manifest.contains("artifact_version"));
}

TEST(Cli, ReplayReproducesOutputs) {
  TempDir dir("cli-replay");
  ASSERT_EQ(run(ingest_args(dir / "a"), dir), 0);
  ASSERT_EQ(run("replay " + q(dir / "a" / "manifest.json") + " --out-dir " + q(dir / "b"), dir), 0)
      << slurp(dir / "stderr");
  for (const char* f : {"sessions.csv", "catalog.csv"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}

TEST(Cli, ExitCodesByCategory) {
  TempDir dir("cli-codes");
  EXPECT_EQ(run("", dir), 2);
  EXPECT_EQ(run("train --sessions x.csv", dir), 2);  // --catalog missing
  EXPECT_EQ(run("ingest --events " + q(dir / "absent.csv") + " --out-dir " + q(dir / "o"), dir), 3);
  EXPECT_NE(slurp(dir / "stderr").find("absent.csv"), std::string::npos);

  write_file(dir / "bad.csv", "session_key,timestamp,page,element_locator,action_type,input_data\nk,notanumber,/p,//a,click,\n");
  EXPECT_EQ(run("ingest --events " + q(dir / "bad.csv") + " --out-dir " + q(dir / "o"), dir), 4);
  EXPECT_NE(slurp(dir / "stderr").find("line 2"), std::string::npos);

  write_file(dir / "cat.csv", "action_id,page,element_locator,action_type\n1,/p,//a,click\n");
  write_file(dir / "ses.csv", "session_id,action_ids,start_timestamp\n1,1 9,10\n");
  EXPECT_EQ(run("eval --sessions " + q(dir / "ses.csv") + " --catalog " + q(dir / "cat.csv") + " --out-dir " +
                    q(dir / "o"),
                dir),
            5);

  ASSERT_EQ(run(ingest_args(dir / "t1"), dir), 0);
  EXPECT_EQ(run("train --sessions " + q(dir / "t1" / "sessions.csv") + " --catalog " + q(dir / "t1" / "catalog.csv") +
                    " --loss hinge --out-dir " + q(dir / "o"),
                dir),
            2);
  EXPECT_EQ(run("simulate --policy recommender_guided --out-dir " + q(dir / "o"), dir), 2);
  write_file(dir / "broken.json", "{\"subcommand\": ");
  EXPECT_EQ(run("replay " + q(dir / "broken.json"), dir), 4);
}

TEST(Cli, EvalPerfectOracleScoresOneAtCutoffOne) {
  TempDir dir("cli-eval");
  auto log = guirec::testing::make_log({{1, 2, 3, 4}, {5, 6, 7}, {8, 9, 10, 11, 12}, {13, 14}, {15, 16, 17, 18}}, 25);
  save_session_log(log, dir / "sessions.csv", dir / "catalog.csv");
  {
    std::ofstream out(dir / "oracle.table", std::ios::binary);
    save_table(out, fit_transition_table(log));
  }
  ASSERT_EQ(run("eval --no-split --model " + q(dir / "oracle.table") + " --sessions " + q(dir / "sessions.csv") +
                    " --catalog " + q(dir / "catalog.csv") + " --out-dir " + q(dir / "o"),
                dir),
            0)
      << slurp(dir / "stderr");
  const auto csv = slurp(dir / "o" / "eval.csv");
  EXPECT_NE(csv.find("\noracle,1,1.000000,1.000000,1.000000,13,0\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\nknn,1,"), std::string::npos);
  EXPECT_NE(slurp(dir / "stdout").find("oracle"), std::string::npos);
}

TEST(Cli, SynthTrainEvalPipeline) {
  TempDir dir("cli-pipe");
  const auto log = guirec::testing::random_log(21, 30, 12, 10);
  save_session_log(log, dir / "sessions.csv", dir / "catalog.csv");
  ASSERT_EQ(run("synth --sessions " + q(dir / "sessions.csv") + " --catalog " + q(dir / "catalog.csv") +
                    " --n-sessions 40 --pad-catalog 20 --seed 5 --out-dir " + q(dir / "s"),
                dir),
            0)
      << slurp(dir / "stderr");
  const auto augmented = load_session_log(dir / "s" / "sessions.csv", dir / "s" / "catalog.csv");
  EXPECT_EQ(augmented.sessions.size(), 70u);
  EXPECT_EQ(augmented.catalog.size(), 20u);

  ASSERT_EQ(run("train --sessions " + q(dir / "s" / "sessions.csv") + " --catalog " + q(dir / "s" / "catalog.csv") +
                    " --cell lstm --loss bpr --hidden-size 6 --batch-size 4 --epochs 3 --out-dir " + q(dir / "m") +
                    " --model-name lstm.bin",
                dir),
            0)
      << slurp(dir / "stderr");
  EXPECT_EQ(count_lines(slurp(dir / "m" / "loss_trace.csv")), 4u);
  ASSERT_EQ(run("eval --model " + q(dir / "m" / "lstm.bin") + " --sessions " + q(dir / "s" / "sessions.csv") +
                    " --catalog " + q(dir / "s" / "catalog.csv") + " --cutoffs 1,3 --out-dir " + q(dir / "e"),
                dir),
            0)
      << slurp(dir / "stderr");
  const auto csv = slurp(dir / "e" / "eval.csv");
  EXPECT_EQ(count_lines(csv), 5u);  // header + 2 models x 2 cutoffs
  EXPECT_NE(csv.find("\nlstm,3,"), std::string::npos);
}

TEST(Cli, SimulateMonkeyAndGuided) {
  TempDir dir("cli-sim");
  const auto gui = load_gui_model(bundled::mini_hub_model());
  ActionCatalog catalog;
  register_gui_actions(gui, catalog);
  const auto scripted = record_scripted_sessions(gui, parse_scripts(bundled::mini_hub_scripts()), catalog);
  save_session_log(scripted, dir / "sessions.csv", dir / "catalog.csv");
  {
    std::ofstream out(dir / "guide.table", std::ios::binary);
    save_table(out, fit_transition_table(scripted));
  }

  ASSERT_EQ(run("simulate --episodes 40 --seed 3 --out-dir " + q(dir / "monkey"), dir), 0) << slurp(dir / "stderr");
  EXPECT_EQ(count_lines(slurp(dir / "monkey" / "episodes.csv")), 41u);
  ASSERT_EQ(run("simulate --episodes 40 --seed 3 --policy recommender_guided --model " + q(dir / "guide.table") +
                    " --catalog " + q(dir / "catalog.csv") + " --out-dir " + q(dir / "guided"),
                dir),
            0)
      << slurp(dir / "stderr");
  EXPECT_NE(slurp(dir / "stdout").find("recommender_guided: 40 episodes"), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesDefaults) {
  TempDir dir("cli-config");
  write_file(dir / "run.ini", "[simulate]\nepisodes=7\nsteps=5\n");
  ASSERT_EQ(run("--config " + q(dir / "run.ini") + " simulate --out-dir " + q(dir / "o"), dir), 0)
      << slurp(dir / "stderr");
  EXPECT_EQ(count_lines(slurp(dir / "o" / "episodes.csv")), 8u);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "o" / "manifest.json"))["options"]["episodes"], 7);
}
