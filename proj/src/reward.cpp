#include "reasonforge/reward.hpp"

#include "reasonforge/error.hpp"

namespace rforge {

void RewardConfig::check() const {
  if (alpha < 0 || alpha > 1) throw Error(Errc::InvalidArgument, "alpha must lie in [0,1]");
}

RewardConfig reward_preset(std::string_view name) {
  if (name == "outcome_only") return {Rational(1), RewardMode::Composite};
  if (name == "pv_only") return {Rational(0), RewardMode::Composite};
  if (name == "mix_0.2") return {Rational(1, 5), RewardMode::Composite};
  if (name == "strict") return {Rational(1), RewardMode::Strict};
  throw Error(Errc::InvalidArgument, "unknown reward preset '" + std::string(name) + "'");
}

RewardConfig reward_config_from_json(const Json& j) {
  if (j.is_string()) return reward_preset(j.get<std::string>());
  if (!j.is_object()) throw Error(Errc::InvalidArgument, "reward config must be an object or preset name");
  if (j.contains("preset")) return reward_preset(j["preset"].get<std::string>());
  RewardConfig cfg;
  if (j.contains("alpha")) {
    const auto& a = j["alpha"];
    if (a.is_string()) {
      cfg.alpha = parse_rational(a.get<std::string>());
    } else if (a.is_number_integer()) {
      cfg.alpha = Rational(a.get<long long>());
    } else if (a.is_number()) {
      cfg.alpha = parse_rational(a.dump());
    } else {
      throw Error(Errc::InvalidArgument, "alpha must be a number");
    }
  }
  if (j.contains("mode")) {
    auto m = j["mode"].get<std::string>();
    if (m == "COMPOSITE") {
      cfg.mode = RewardMode::Composite;
    } else if (m == "STRICT") {
      cfg.mode = RewardMode::Strict;
    } else {
      throw Error(Errc::InvalidArgument, "mode must be COMPOSITE or STRICT");
    }
  }
  cfg.check();
  return cfg;
}

Rational outcome_reward(const EvalResult& r) { return r.answer_correct ? 1 : 0; }

Rational process_reward(const EvalResult& r) { return r.process_acc; }

Rational reward(bool answer_correct, const Rational& process_acc, const RewardConfig& cfg) {
  const Rational out = answer_correct ? 1 : 0;
  if (cfg.mode == RewardMode::Strict) return process_acc == 1 ? out : Rational(0);
  return cfg.alpha * out + (1 - cfg.alpha) * process_acc;
}

Rational reward(const EvalResult& r, const RewardConfig& cfg) { return reward(r.answer_correct, r.process_acc, cfg); }

}  // namespace rforge
