#pragma once

#include <string>
#include <string_view>

#include "reasonforge/graph_json.hpp"
#include "reasonforge/rational.hpp"
#include "reasonforge/verifier.hpp"

namespace rforge {

enum class RewardMode { Composite, Strict };

struct RewardConfig {
  Rational alpha = 1;
  RewardMode mode = RewardMode::Composite;

  /// Throws InvalidArgument unless alpha lies in [0, 1].
  void check() const;
};

/// outcome_only (alpha 1), pv_only (alpha 0), mix_0.2, strict.
RewardConfig reward_preset(std::string_view name);
/// {"preset": name} or {"alpha": "0.2", "mode": "COMPOSITE"|"STRICT"}.
RewardConfig reward_config_from_json(const Json& j);

Rational outcome_reward(const EvalResult& r);
Rational process_reward(const EvalResult& r);
Rational reward(const EvalResult& r, const RewardConfig& cfg);

/// Same formulas on the two summary quantities alone.
Rational reward(bool answer_correct, const Rational& process_acc, const RewardConfig& cfg);

}  // namespace rforge
