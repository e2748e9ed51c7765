#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "reasonforge/budget.hpp"
#include "reasonforge/reward.hpp"
#include "reasonforge/rng.hpp"
#include "reasonforge/verifier.hpp"

namespace rftest {

using rforge::Rational;

/// Fraction of k-subsets of n samples (the first c correct) containing a correct one.
inline Rational pass_at_k_enumerated(std::uint64_t n, std::uint64_t c, std::uint64_t k) {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  const std::uint64_t correct_mask = (std::uint64_t{1} << c) - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::uint64_t>(__builtin_popcountll(mask)) != k) continue;
    ++total;
    hits += (mask & correct_mask) != 0;
  }
  return Rational(hits, total);
}

/// Number of (n, c, k) with n <= max_n where the estimator disagrees with enumeration.
inline std::size_t pass_at_k_mismatches(std::uint64_t max_n) {
  std::size_t bad = 0;
  for (std::uint64_t n = 1; n <= max_n; ++n) {
    for (std::uint64_t c = 0; c <= n; ++c) {
      for (std::uint64_t k = 1; k <= n; ++k) bad += rforge::pass_at_k(n, c, k) != pass_at_k_enumerated(n, c, k);
    }
  }
  return bad;
}

inline rforge::EvalResult random_eval_result(rforge::Rng& rng) {
  rforge::EvalResult r;
  const auto nodes = rng.uniform(1, 40);
  std::int64_t ok = rng.bernoulli(0.3) ? nodes : rng.uniform(0, nodes);
  for (std::int64_t i = 0; i < nodes; ++i) {
    auto f = i < ok ? rforge::Failure::Ok : static_cast<rforge::Failure>(rng.uniform(1, 3));
    r.per_node.push_back({static_cast<rforge::NodeId>(i), f});
  }
  r.process_acc = Rational(ok, nodes);
  r.answer_correct = rng.bernoulli(0.5);
  r.verified_correct = r.answer_correct && ok == nodes;
  return r;
}

inline Rational random_alpha(rforge::Rng& rng) {
  switch (rng.uniform(0, 3)) {
    case 0: return 0;
    case 1: return 1;
    default: {
      const auto den = rng.uniform(1, 1000);
      return Rational(rng.uniform(0, den), den);
    }
  }
}

/// Checks boundedness, the alpha in {0, 1} identities, strict dominance and
/// monotonicity in process accuracy on `count` random results. Each violated
/// clause is reported through `on_violation` and counted.
inline std::size_t reward_violations(std::size_t count, std::uint64_t seed,
                                      const std::function<void(const std::string&)>& on_violation = {}) {
  using namespace rforge;
  Rng rng(seed);
  std::size_t bad = 0;
  auto fail = [&](const std::string& what) {
    ++bad;
    if (on_violation) on_violation(what);
  };
  const RewardConfig strict{1, RewardMode::Strict};
  for (std::size_t i = 0; i < count; ++i) {
    const auto r = random_eval_result(rng);
    const RewardConfig cfg{random_alpha(rng), RewardMode::Composite};
    const Rational composite = reward(r, cfg);
    const Rational s = reward(r, strict);
    if (composite < 0 || composite > 1 || s < 0 || s > 1) fail("bounds");
    if (reward(r, RewardConfig{1, RewardMode::Composite}) != outcome_reward(r)) fail("alpha=1");
    if (reward(r, RewardConfig{0, RewardMode::Composite}) != process_reward(r)) fail("alpha=0");
    if (s > composite) fail("strict dominance");
    if (s != (r.verified_correct ? 1 : 0)) fail("strict identity");
    const Rational bumped = r.process_acc + (1 - r.process_acc) * Rational(rng.uniform(0, 8), 8);
    if (reward(r.answer_correct, bumped, cfg) < composite) fail("monotone process accuracy");
    if (reward(r.answer_correct, bumped, strict) < s) fail("monotone strict");
  }
  return bad;
}

struct GridRow {
  const char* label;
  double cells[9];
};

/// Published planning grid: mid-only steps, RL-only steps and thousands of
/// samples, then (mid, RL) steps at RL shares 0.2, 0.5 and 0.8.
inline constexpr GridRow kPlanningGrid[] = {
    {"1.05", {2000, 50, 51.2, 1600, 10, 1000, 25, 400, 40}},
    {"2.10", {4000, 100, 102.4, 3200, 20, 2000, 50, 800, 80}},
    {"4.20", {8000, 200, 204.8, 6400, 40, 4000, 100, 1600, 160}},
    {"8.40", {16000, 400, 409.6, 12800, 80, 8000, 200, 3200, 320}},
    {"12.58", {24000, 600, 614.4, 19200, 120, 12000, 300, 4800, 480}},
    {"16.78", {32000, 800, 819.2, 25600, 160, 16000, 400, 6400, 640}},
    {"20.00", {38147, 954, 976.6, 30517, 191, 19073, 477, 7629, 763}},
};

/// Cells differing from the published grid by more than one unit of the
/// printed precision (0.1 for the sample column, 1 elsewhere).
inline std::vector<std::string> grid_mismatches(const std::vector<rforge::ComparisonRow>& rows) {
  std::vector<std::string> out;
  if (rows.size() != std::size(kPlanningGrid)) return {"row count " + std::to_string(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& want = kPlanningGrid[i];
    if (rows[i].label != want.label) out.push_back("label " + rows[i].label);
    for (std::size_t j = 0; j < 9; ++j) {
      const double unit = j == 2 ? 0.1 : 1.0;
      const double printed = j == 2 ? std::round(rforge::to_double(rows[i].cells[j]) * 10) / 10
                                    : rforge::to_double(rows[i].cells[j]);
      if (std::abs(printed - want.cells[j]) > unit + 1e-9) {
        out.push_back(std::string(want.label) + " column " + std::to_string(j) + ": " + rforge::to_decimal(rows[i].cells[j], 1));
      }
    }
  }
  return out;
}

}  // namespace rftest
