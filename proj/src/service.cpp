#include "reasonforge/service.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <csignal>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "reasonforge/error.hpp"

namespace rforge {

namespace {

volatile std::sig_atomic_t g_stop = 0;

extern "C" void on_stop_signal(int) { g_stop = 1; }

Json error_response(const Json& id, const std::string& message) {
  Json j;
  j["v"] = kWireVersion;
  j["id"] = id;
  j["ok"] = false;
  j["error"] = message;
  return j;
}

// Fixed-size pool draining a FIFO of request lines.
class LinePool {
 public:
  LinePool(unsigned workers, std::function<void(const std::string&)> work) : work_(std::move(work)) {
    for (unsigned i = 0; i < std::max(1u, workers); ++i) threads_.emplace_back([this] { loop(); });
  }
  ~LinePool() { finish(); }

  void push(std::string line) {
    std::unique_lock lock(mu_);
    room_.wait(lock, [&] { return queue_.size() < kCapacity; });
    queue_.push_back(std::move(line));
    ready_.notify_one();
  }

  void finish() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    ready_.notify_all();
    for (auto& t : threads_) {
      if (t.joinable()) t.join();
    }
  }

 private:
  static constexpr std::size_t kCapacity = 4096;

  void loop() {
    for (;;) {
      std::string line;
      {
        std::unique_lock lock(mu_);
        ready_.wait(lock, [&] { return closed_ || !queue_.empty(); });
        if (queue_.empty()) return;
        line = std::move(queue_.front());
        queue_.pop_front();
        room_.notify_one();
      }
      work_(line);
    }
  }

  std::function<void(const std::string&)> work_;
  std::mutex mu_;
  std::condition_variable ready_;
  std::condition_variable room_;
  std::deque<std::string> queue_;
  bool closed_ = false;
  std::vector<std::thread> threads_;
};

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

void request_stop() noexcept { g_stop = 1; }
void reset_stop() noexcept { g_stop = 0; }
bool stop_requested() noexcept { return g_stop != 0; }

void install_stop_handlers() {
  struct sigaction sa {};
  sa.sa_handler = on_stop_signal;
  sigemptyset(&sa.sa_mask);
  sigaction(SIGTERM, &sa, nullptr);
  sigaction(SIGINT, &sa, nullptr);
  std::signal(SIGPIPE, SIG_IGN);
}

Json score_fields(const EvalResult& result, const Rational& reward_value, std::size_t parse_warnings) {
  Json j;
  j["process_acc"] = to_decimal(result.process_acc);
  j["answer_correct"] = result.answer_correct;
  j["verified_correct"] = result.verified_correct;
  j["reward"] = to_decimal(reward_value);
  auto counts = result.failure_counts();
  Json failures = Json::object();
  for (Failure f : {Failure::MissingNode, Failure::WrongParents, Failure::WrongValue}) {
    failures[std::string(failure_name(f))] = counts.count(f) ? counts.at(f) : 0;
  }
  j["failures"] = std::move(failures);
  j["parse_warnings"] = parse_warnings;
  return j;
}

Json score_solution(const DependencyGraph& gold, std::int64_t gold_answer, std::string_view solution,
                    std::string_view answer_text, const RewardConfig& cfg) {
  ParsedTrace trace = parse_trace(solution, answer_text);
  EvalResult result = evaluate_trace(gold, trace, gold_answer);
  return score_fields(result, reward(result, cfg), trace.warnings.size());
}

Service::Service(std::vector<CorpusRecord> corpus, RewardConfig reward)
    : corpus_(std::move(corpus)), reward_(std::move(reward)) {
  reward_.check();
  for (const auto& r : corpus_) by_id_.try_emplace(r.id, &r);
}

Json Service::handle(const Json& request) const {
  Json id = "unknown";
  try {
    if (!request.is_object()) return error_response(id, "request must be an object");
    if (request.contains("id") && (request["id"].is_string() || request["id"].is_number_integer())) {
      id = request["id"];
    }
    if (request.value("v", std::string()) != kWireVersion) return error_response(id, "unsupported wire version");

    Json out;
    out["v"] = kWireVersion;
    out["id"] = id;
    if (request.contains("op")) {
      if (request["op"] != "ping") return error_response(id, "unknown op");
      out["ok"] = true;
      out["pong"] = true;
      return out;
    }

    const bool has_gold = request.contains("gold");
    const bool has_ref = request.contains("corpus_id");
    if (has_gold == has_ref) return error_response(id, "exactly one of gold / corpus_id is required");
    DependencyGraph gold;
    if (has_gold) {
      gold = graph_from_json(request["gold"]);
    } else {
      auto it = by_id_.find(request["corpus_id"].get<std::string>());
      if (it == by_id_.end()) return error_response(id, "unknown corpus_id");
      gold = it->second->graph;
    }
    if (!request.contains("solution") || !request["solution"].is_string()) {
      return error_response(id, "solution must be a string");
    }
    const std::int64_t gold_answer = request.value("gold_answer", gold.answer);
    const RewardConfig cfg = request.contains("reward") ? reward_config_from_json(request["reward"]) : reward_;
    cfg.check();
    const std::string answer = request.value("answer", std::string());

    out["ok"] = true;
    out.update(score_solution(gold, gold_answer, request["solution"].get<std::string>(), answer, cfg));
    return out;
  } catch (const Error& e) {
    return error_response(id, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(id, e.what());
  }
}

std::string Service::handle_line(std::string_view line) const {
  try {
    Json request = Json::parse(line);
    return dump_compact(handle(request));
  } catch (const nlohmann::json::exception&) {
    return dump_compact(error_response("unknown", "malformed request"));
  } catch (const std::exception& e) {
    return dump_compact(error_response("unknown", e.what()));
  }
}

void Service::run(int fd, const std::function<void(const std::string&)>& sink, unsigned workers) const {
  std::mutex out_mu;
  LinePool pool(workers, [&](const std::string& line) {
    std::string response = handle_line(line);
    std::lock_guard lock(out_mu);
    sink(response);
  });

  std::string buffer;
  char chunk[65536];
  auto flush_lines = [&] {
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string line = buffer.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) pool.push(std::move(line));
    }
    buffer.erase(0, start);
  };

  while (!stop_requested()) {
    pollfd p{fd, POLLIN, 0};
    int ready = ::poll(&p, 1, 100);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    flush_lines();
  }
  if (!stop_requested() && buffer.find_first_not_of(" \t\r\n") != std::string::npos) {
    buffer.push_back('\n');
    flush_lines();
  }
  pool.finish();
}

void Service::serve_unix(const std::string& path, unsigned workers) const {
  sockaddr_un addr{};
  if (path.size() >= sizeof addr.sun_path) throw Error(Errc::InvalidArgument, "socket path too long");
  int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listener < 0) throw Error(Errc::Io, std::string("socket: ") + std::strerror(errno));
  addr.sun_family = AF_UNIX;
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  ::unlink(path.c_str());
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listener, 64) < 0) {
    int err = errno;
    ::close(listener);
    throw Error(Errc::Io, "cannot listen on " + path + ": " + std::strerror(err));
  }

  std::vector<std::thread> sessions;
  while (!stop_requested()) {
    pollfd p{listener, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    int conn = ::accept(listener, nullptr, nullptr);
    if (conn < 0) continue;
    sessions.emplace_back([this, conn, workers] {
      run(conn, [conn](const std::string& line) { write_all(conn, line + "\n"); }, workers);
      ::close(conn);
    });
  }
  for (auto& t : sessions) t.join();
  ::close(listener);
  ::unlink(path.c_str());
}

}  // namespace rforge
