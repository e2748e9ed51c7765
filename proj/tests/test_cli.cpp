#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "reasonforge/cli.hpp"
#include "reasonforge/corpus.hpp"
#include "support.hpp"

using namespace rforge;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / ("rf_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::vector<Json> jsonl(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(Json::parse(line));
  }
  return out;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"budget", "--total", "1e9"}).code == 2);
  auto domain = cli({"budget", "--total", "1e9", "--beta", "1.5"});
  CHECK(domain.code == 1);
  CHECK(domain.err.find("BetaOutOfRange") != std::string::npos);
  CHECK(cli({"evaluate", "--gold", "/nonexistent", "--rollouts", "/nonexistent"}).code == 1);
  CHECK(cli({"budget", "table", "--preset", "table6"}).code != 0);
}

TEST_CASE("budget commands") {
  auto table = cli({"budget", "table", "--preset", "table5"});
  REQUIRE(table.code == 0);
  CHECK(table.out.find("4.20") != std::string::npos);
  CHECK(table.out.find("38147") != std::string::npos);
  auto csv = cli({"budget", "table", "--preset", "table5", "--csv"});
  CHECK(csv.out.find("1.05,2000,50,51.2,1600,10,1000,25,400,40") != std::string::npos);

  auto plan = Json::parse(cli({"budget", "--total", "4194304000", "--beta", "1"}).out);
  CHECK(plan["rl_steps"] == "200");
  CHECK(plan["rl_samples"] == "204800");
  auto no_ref = Json::parse(cli({"budget", "--total", "4194304000", "--beta", "1", "--gamma", "0"}).out);
  CHECK(no_ref["rl_samples"] == "256000");
  auto grid = cli({"budget", "table", "--totals", "1e9,2e9", "--betas", "0,0.5", "--csv"});
  CHECK(grid.code == 0);
  CHECK(std::count(grid.out.begin(), grid.out.end(), '\n') == 5);
}

TEST_CASE("selfcheck") {
  auto r = cli({"selfcheck", "--n", "1000", "--seed", "7", "--threads", "4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1000/1000 verified") != std::string::npos);
}

TEST_CASE("generate, dedup, evaluate, reward and analyze") {
  auto dir = scratch();
  auto corpus = (dir / "post.jsonl").string();
  auto gen = cli({"generate", "--preset", "competence-post-op11-14", "--budget", "120", "--seed", "5", "--out", corpus,
                  "--threads", "2"});
  REQUIRE_MESSAGE(gen.code == 0, gen.err);
  auto meta = Json::parse(rftest::read_file(corpus + ".meta.json"));
  CHECK(meta["seed"] == 5);
  CHECK(meta["seedSource"] == "flag");
  CHECK(meta["records"] == 120);
  auto first = rftest::read_file(corpus);

  auto again = (dir / "again.jsonl").string();
  ::setenv("REASON_FORGE_SEED", "5", 1);
  REQUIRE(cli({"generate", "--preset", "competence-post-op11-14", "--budget", "120", "--out", again}).code == 0);
  ::unsetenv("REASON_FORGE_SEED");
  CHECK(rftest::read_file(again) == first);
  CHECK(Json::parse(rftest::read_file(again + ".meta.json"))["seedSource"] == "env");

  auto deduped = (dir / "dedup.jsonl").string();
  auto dropped = (dir / "dropped.jsonl").string();
  auto d = cli({"dedup", "--in", corpus, again, "--out", deduped, "--dropped", dropped, "--scope", "across-splits"});
  REQUIRE(d.code == 0);
  CHECK(read_corpus(deduped).size() == 120);
  CHECK(read_corpus(dropped).size() == 120);

  auto gold = read_corpus(corpus);
  std::string rollouts;
  for (const auto& r : gold) {
    rollouts += dump_compact(rollout_to_json({r.id, 0, r.solution + " [answer]" + r.answer + "[/answer]"})) + "\n";
    rollouts += dump_compact(rollout_to_json({r.id, 1, ""})) + "\n";
  }
  auto rollout_path = (dir / "rollouts.jsonl").string();
  write_text(rollout_path, rollouts);

  auto report_path = (dir / "report.jsonl").string();
  auto ev = cli({"evaluate", "--gold", corpus, "--rollouts", rollout_path, "--k", "1,2", "--out", report_path});
  REQUIRE_MESSAGE(ev.code == 0, ev.err);
  auto report = jsonl(rftest::read_file(report_path));
  std::size_t samples = 0, cells = 0;
  for (const auto& j : report) {
    if (j["type"] == "sample") ++samples;
    if (j["type"] == "cell") {
      ++cells;
      CHECK(j["bucket"] == "OOD-edge");
      CHECK(j["pass_at_k"]["1"] == "0.500000");
      CHECK(j["pass_at_k"]["2"] == "1.000000");
    }
  }
  CHECK(samples == 240);
  CHECK(cells == 3);
  CHECK(cli({"evaluate", "--gold", corpus, "--rollouts", rollout_path, "--k", "3"}).code == 1);

  auto rw = cli({"reward", "--gold", corpus, "--rollouts", rollout_path, "--reward", "strict"});
  REQUIRE(rw.code == 0);
  auto rows = jsonl(rw.out);
  auto direct = reward_rollouts(gold, read_rollouts(rollout_path), reward_preset("strict"));
  REQUIRE(rows.size() == direct.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == direct[i]);
  CHECK(rows[0]["reward"] == "1.000000");
  CHECK(rows[1]["reward"] == "0.000000");
  CHECK(cli({"reward", "--gold", corpus, "--rollouts", rollout_path, "--alpha", "2"}).code == 1);

  auto sim = cli({"analyze", "similarity", "--gold", corpus, "--rollouts", rollout_path});
  REQUIRE_MESSAGE(sim.code == 0, sim.err);
  CHECK(sim.out.find("op11-20,0.95,1.00,120,1.000000") != std::string::npos);
  auto errs = cli({"analyze", "errors", "--report", report_path});
  REQUIRE(errs.code == 0);
  CHECK(errs.out.find("MISSING_NODE,") != std::string::npos);
  CHECK(errs.out.find("WRONG_VALUE,0,") != std::string::npos);

  fs::remove_all(dir);
}

TEST_CASE("config files feed reward and budget defaults") {
  auto dir = scratch();
  auto cfg = (dir / "cfg.json").string();
  write_text(cfg, R"({"budget": {"gamma": 0}, "reward": {"preset": "strict"}})");
  auto plan = Json::parse(cli({"--config", cfg, "budget", "--total", "4194304000", "--beta", "1"}).out);
  CHECK(plan["rl_samples"] == "256000");
  write_text(cfg, "{broken");
  CHECK(cli({"--config", cfg, "budget", "--total", "1e9", "--beta", "0"}).code != 0);
  fs::remove_all(dir);
}
