#pragma once

#include <string>
#include <vector>

#include "reasonforge/graph_json.hpp"
#include "reasonforge/rational.hpp"

namespace rforge {

struct BudgetConstants {
  Rational params = 100'000'000;          ///< non-embedding parameters
  BigInt rollouts = 6;                    ///< samples per prompt
  BigInt seq_len = 2048;                  ///< tokens per rollout
  int gamma = 1;                          ///< 1 when a reference-model pass is paid
  BigInt rl_batch = 1024;                 ///< prompts per RL step
  BigInt mid_tokens_per_step = 524'288;   ///< mid-training tokens per optimizer step
  BigInt mid_seq_len = 2048;              ///< informational

  /// Throws InvalidArgument.
  void check() const;
};

BudgetConstants budget_constants_from_json(const Json& j, BudgetConstants base = {});

/// 6 * P * T.
Rational train_flops(const Rational& params, const Rational& tokens);
/// (8 + 2 gamma) * P * N * r * L.
Rational rl_flops(const BudgetConstants& c, const BigInt& samples);
/// (4 + gamma) / 3 * N * r * L.
Rational rl_token_equivalent(const BudgetConstants& c, const BigInt& samples);

struct BudgetPlan {
  Rational total;
  Rational beta;
  Rational mid_tokens;
  Rational rl_tokens;
  BigInt rl_samples;
  BigInt rl_steps;
  BigInt mid_steps;
};

/// Splits `total` token-equivalents: (1 - beta) to mid-training, beta to RL.
/// Counts round half to even. Throws BetaOutOfRange / InvalidArgument.
BudgetPlan allocate(const Rational& total, const Rational& beta, const BudgetConstants& c);

/// Row-major grid: one plan per (total, beta).
std::vector<BudgetPlan> plan_table(const std::vector<Rational>& totals, const std::vector<Rational>& betas,
                                   const BudgetConstants& c);

Json to_json(const BudgetPlan& p);
std::string plans_csv(const std::vector<BudgetPlan>& plans);

/// The seven-budget comparison grid: mid-only, RL-only (steps and thousands
/// of samples) and three mixed ratios.
struct ComparisonRow {
  std::string label;
  Rational total;
  std::vector<Rational> cells;  ///< 9 numeric columns
};

std::vector<Rational> comparison_totals();
std::vector<std::string> comparison_columns();
std::vector<ComparisonRow> comparison_table(const BudgetConstants& c);
std::string comparison_text(const std::vector<ComparisonRow>& rows);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace rforge
