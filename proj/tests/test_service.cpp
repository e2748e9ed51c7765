#include <unistd.h>

#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "doctest.h"
#include "reasonforge/cli.hpp"
#include "reasonforge/corpus.hpp"
#include "reasonforge/service.hpp"
#include "support.hpp"

using namespace rforge;

namespace {

std::vector<CorpusRecord> small_corpus(std::uint64_t n) {
  RecipeSpec spec;
  spec.budget = n;
  spec.seed = 12;
  spec.mixture = {{2, 20, {{"A", 1.0 / 3}, {"B", 1.0 / 3}, {"C", 1.0 / 3}}, 1.0}};
  return build_corpus(spec, TemplateRegistry::builtin(), 4);
}

// Gold solutions, truncations, single-digit corruptions and empty outputs.
std::vector<Rollout> rollouts_for(const std::vector<CorpusRecord>& corpus, std::size_t per, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Rollout> out;
  for (const auto& r : corpus) {
    for (std::size_t i = 0; i < per; ++i) {
      std::string text = r.solution + "\n[answer]" + r.answer + "[/answer]";
      switch (rng.uniform(0, 3)) {
        case 0: break;
        case 1: text = text.substr(0, static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(text.size())))); break;
        case 2: {
          auto pos = text.find_first_of("0123456789", static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(text.size()) - 1)));
          if (pos != std::string::npos) text[pos] = text[pos] == '9' ? '1' : static_cast<char>(text[pos] + 1);
          break;
        }
        default: text.clear();
      }
      out.push_back({r.id, i, text});
    }
  }
  return out;
}

Json request_for(const Rollout& r, const std::string& id) {
  return Json{{"v", "v1"}, {"id", id}, {"corpus_id", r.problem_id}, {"solution", r.output_text}};
}

}  // namespace

TEST_CASE("ping and malformed requests") {
  Service svc;
  auto pong = Json::parse(svc.handle_line(R"({"v":"v1","id":"a","op":"ping"})"));
  CHECK(pong["ok"] == true);
  CHECK(pong["id"] == "a");

  auto bad = Json::parse(svc.handle_line("{not json"));
  CHECK(bad["ok"] == false);
  CHECK(bad["id"] == "unknown");
  CHECK(bad["v"] == "v1");

  auto version = Json::parse(svc.handle_line(R"({"v":"v0","id":7})"));
  CHECK(version["ok"] == false);
  CHECK(version["id"] == 7);

  auto both = svc.handle(Json{{"v", "v1"}, {"id", "b"}, {"gold", Json::object()}, {"corpus_id", "x"}, {"solution", ""}});
  CHECK(both["ok"] == false);
  CHECK(both["id"] == "b");
  auto missing = svc.handle(Json{{"v", "v1"}, {"id", "c"}, {"corpus_id", "x"}, {"solution", ""}});
  CHECK(missing["error"].get<std::string>().find("corpus_id") != std::string::npos);
  auto broken_gold = svc.handle(Json{{"v", "v1"}, {"id", "d"}, {"gold", Json{{"nodes", 3}}}, {"solution", ""}});
  CHECK(broken_gold["ok"] == false);
  CHECK(Json::parse(svc.handle_line("[1,2]"))["ok"] == false);
  CHECK(Json::parse(svc.handle_line(""))["id"] == "unknown");
}

TEST_CASE("worked example over the wire") {
  Service svc;
  auto gold = rftest::worked_gold();
  Json req{{"v", "v1"}, {"id", "w"}, {"gold", graph_to_json(gold)}, {"solution", rftest::worked_solution()},
           {"reward", {{"preset", "strict"}}}};
  auto resp = svc.handle(req);
  CHECK(resp["ok"] == true);
  CHECK(resp["process_acc"] == "1.000000");
  CHECK(resp["verified_correct"] == true);
  CHECK(resp["reward"] == "1.000000");
  CHECK(resp["failures"]["MISSING_NODE"] == 0);

  req["solution"] = "";
  auto empty = svc.handle(req);
  CHECK(empty["process_acc"] == "0.000000");
  CHECK(empty["reward"] == "0.000000");
  CHECK(empty["failures"]["MISSING_NODE"] == 9);

  req["solution"] = rftest::worked_solution();
  req["gold_answer"] = 3;
  CHECK(svc.handle(req)["answer_correct"] == false);
}

TEST_CASE("service responses equal the batch reward path") {
  auto corpus = small_corpus(200);
  auto rollouts = rollouts_for(corpus, 5, 8);
  const auto cfg = reward_preset("mix_0.2");
  auto batch = reward_rollouts(corpus, rollouts, cfg, 4);
  Service svc(corpus, cfg);
  REQUIRE(batch.size() == rollouts.size());
  std::size_t verified = 0;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    auto resp = svc.handle(request_for(rollouts[i], std::to_string(i)));
    REQUIRE(resp["ok"] == true);
    for (const char* key : {"process_acc", "answer_correct", "verified_correct", "reward", "failures", "parse_warnings"}) {
      REQUIRE(resp[key] == batch[i][key]);
    }
    verified += resp["verified_correct"].get<bool>();
  }
  CHECK(verified > 0);
  CHECK(verified < rollouts.size());
}

TEST_CASE("concurrent streaming keeps ids matched") {
  auto corpus = small_corpus(60);
  auto rollouts = rollouts_for(corpus, 20, 9);
  Service svc(corpus, reward_preset("pv_only"));
  std::map<std::string, std::string> expected;
  std::string input;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    auto req = request_for(rollouts[i], "r" + std::to_string(i));
    expected["r" + std::to_string(i)] = dump_compact(svc.handle(req));
    input += dump_compact(req) + "\n";
  }
  input += "garbage line\n";

  int fds[2];
  REQUIRE(pipe(fds) == 0);
  std::thread writer([&] {
    std::size_t off = 0;
    while (off < input.size()) {
      auto n = write(fds[1], input.data() + off, input.size() - off);
      if (n <= 0) break;
      off += static_cast<std::size_t>(n);
    }
    close(fds[1]);
  });
  std::mutex mu;
  std::vector<std::string> lines;
  reset_stop();
  svc.run(fds[0], [&](const std::string& line) {
    std::lock_guard lock(mu);
    lines.push_back(line);
  }, 8);
  writer.join();
  close(fds[0]);

  REQUIRE(lines.size() == rollouts.size() + 1);
  std::set<std::string> seen;
  std::size_t unknown = 0;
  for (const auto& line : lines) {
    auto j = Json::parse(line);
    auto id = j["id"].get<std::string>();
    if (id == "unknown") {
      ++unknown;
      continue;
    }
    REQUIRE(seen.insert(id).second);
    REQUIRE(line == expected.at(id));
  }
  CHECK(unknown == 1);
  CHECK(seen.size() == rollouts.size());
}

TEST_CASE("stop request drains and returns") {
  Service svc;
  int fds[2];
  REQUIRE(pipe(fds) == 0);
  std::string ping = R"({"v":"v1","id":"p","op":"ping"})" "\n";
  REQUIRE(write(fds[1], ping.data(), ping.size()) == static_cast<ssize_t>(ping.size()));
  std::vector<std::string> lines;
  std::mutex mu;
  reset_stop();
  std::thread runner([&] {
    svc.run(fds[0], [&](const std::string& l) {
      std::lock_guard lock(mu);
      lines.push_back(l);
    }, 2);
  });
  while (true) {
    {
      std::lock_guard lock(mu);
      if (!lines.empty()) break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  request_stop();
  runner.join();
  reset_stop();
  close(fds[0]);
  close(fds[1]);
  CHECK(lines.size() == 1);
  CHECK_FALSE(stop_requested());
}
