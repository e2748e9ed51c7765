#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reasonforge/corpus.hpp"
#include "reasonforge/graph_json.hpp"
#include "reasonforge/reward.hpp"
#include "reasonforge/verifier.hpp"

namespace rforge {

inline constexpr std::string_view kWireVersion = "v1";

/// Numeric fields shared by the service response and the batch reward output.
Json score_fields(const EvalResult& result, const Rational& reward_value, std::size_t parse_warnings);

/// Parses, verifies and rewards one solution; returns score_fields().
Json score_solution(const DependencyGraph& gold, std::int64_t gold_answer, std::string_view solution,
                    std::string_view answer_text, const RewardConfig& cfg);

/// Stateless request handler over an optional read-only gold corpus.
///
/// Request:  {"v":"v1", "id", "gold" | "corpus_id", "gold_answer"?, "solution", "answer"?, "reward"?}
///           {"v":"v1", "id", "op":"ping"}
/// Response: {"v":"v1", "id", "ok":true, "process_acc", "answer_correct", "verified_correct",
///            "reward", "failures", "parse_warnings"}
///           {"v":"v1", "id", "ok":false, "error"} with id "unknown" when none could be read.
class Service {
 public:
  explicit Service(std::vector<CorpusRecord> corpus = {}, RewardConfig reward = {});

  Json handle(const Json& request) const;
  /// Never throws.
  std::string handle_line(std::string_view line) const;

  /// Reads newline-delimited requests from `fd` until EOF or stop(), scoring
  /// them on `workers` threads. Responses go to `sink` as they complete, one
  /// call per line; in-flight requests are drained before returning.
  void run(int fd, const std::function<void(const std::string&)>& sink, unsigned workers) const;

  /// Accepts connections on a unix socket at `path` until stop().
  void serve_unix(const std::string& path, unsigned workers) const;

  std::size_t corpus_size() const { return by_id_.size(); }

 private:
  std::vector<CorpusRecord> corpus_;
  std::unordered_map<std::string, const CorpusRecord*> by_id_;
  RewardConfig reward_;
};

/// Async-signal-safe stop request observed by Service::run/serve_unix.
void request_stop() noexcept;
void reset_stop() noexcept;
bool stop_requested() noexcept;

/// Routes SIGINT and SIGTERM to request_stop().
void install_stop_handlers();

}  // namespace rforge
