#include "reasonforge/budget.hpp"

#include <iomanip>
#include <sstream>

#include "reasonforge/error.hpp"

namespace rforge {

void BudgetConstants::check() const {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidArgument, "budget constants: " + m); };
  if (params <= 0) bad("P must be positive");
  if (rollouts <= 0 || seq_len <= 0 || rl_batch <= 0 || mid_tokens_per_step <= 0 || mid_seq_len <= 0) {
    bad("all sizes must be positive");
  }
  if (gamma != 0 && gamma != 1) bad("gamma must be 0 or 1");
}

BudgetConstants budget_constants_from_json(const Json& j, BudgetConstants c) {
  auto num = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_string() ? parse_rational(v.get<std::string>()) : parse_rational(v.dump());
  };
  auto integer = [&](const char* key) {
    Rational q = num(key);
    if (denominator(q) != 1) throw Error(Errc::InvalidArgument, std::string(key) + " must be an integer");
    return numerator(q);
  };
  try {
    if (j.contains("params")) c.params = num("params");
    if (j.contains("rollouts")) c.rollouts = integer("rollouts");
    if (j.contains("seqLen")) c.seq_len = integer("seqLen");
    if (j.contains("gamma")) c.gamma = static_cast<int>(integer("gamma"));
    if (j.contains("rlBatch")) c.rl_batch = integer("rlBatch");
    if (j.contains("midTokensPerStep")) c.mid_tokens_per_step = integer("midTokensPerStep");
    if (j.contains("midSeqLen")) c.mid_seq_len = integer("midSeqLen");
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("budget constants: ") + e.what());
  }
  c.check();
  return c;
}

Rational train_flops(const Rational& params, const Rational& tokens) { return 6 * params * tokens; }

Rational rl_flops(const BudgetConstants& c, const BigInt& samples) {
  return Rational(8 + 2 * c.gamma) * c.params * Rational(samples * c.rollouts * c.seq_len);
}

Rational rl_token_equivalent(const BudgetConstants& c, const BigInt& samples) {
  return Rational(4 + c.gamma, 3) * Rational(samples * c.rollouts * c.seq_len);
}

BudgetPlan allocate(const Rational& total, const Rational& beta, const BudgetConstants& c) {
  c.check();
  if (beta < 0 || beta > 1) throw Error(Errc::BetaOutOfRange, "beta=" + to_decimal(beta) + " outside [0,1]");
  if (total <= 0) throw Error(Errc::InvalidArgument, "total budget must be positive");
  BudgetPlan p;
  p.total = total;
  p.beta = beta;
  p.mid_tokens = (1 - beta) * total;
  p.rl_tokens = beta * total;
  p.rl_samples = round_half_even(p.rl_tokens / (Rational(4 + c.gamma, 3) * Rational(c.rollouts * c.seq_len)));
  p.rl_steps = round_half_even(Rational(p.rl_samples, c.rl_batch));
  p.mid_steps = round_half_even(p.mid_tokens / Rational(c.mid_tokens_per_step));
  return p;
}

std::vector<BudgetPlan> plan_table(const std::vector<Rational>& totals, const std::vector<Rational>& betas,
                                   const BudgetConstants& c) {
  if (totals.empty() || betas.empty()) throw Error(Errc::InvalidArgument, "plan table needs totals and betas");
  std::vector<BudgetPlan> out;
  for (const auto& t : totals) {
    for (const auto& b : betas) out.push_back(allocate(t, b, c));
  }
  return out;
}

Json to_json(const BudgetPlan& p) {
  Json j;
  j["total"] = to_decimal(p.total, 0);
  j["beta"] = to_decimal(p.beta, 6);
  j["mid_tokens"] = to_decimal(p.mid_tokens, 0);
  j["rl_tokens"] = to_decimal(p.rl_tokens, 0);
  j["rl_samples"] = p.rl_samples.str();
  j["rl_steps"] = p.rl_steps.str();
  j["mid_steps"] = p.mid_steps.str();
  return j;
}

std::string plans_csv(const std::vector<BudgetPlan>& plans) {
  std::ostringstream out;
  out << "total,beta,mid_tokens,rl_tokens,rl_samples,rl_steps,mid_steps\n";
  for (const auto& p : plans) {
    out << to_decimal(p.total, 0) << ',' << to_decimal(p.beta, 6) << ',' << to_decimal(p.mid_tokens, 0) << ','
        << to_decimal(p.rl_tokens, 0) << ',' << p.rl_samples << ',' << p.rl_steps << ',' << p.mid_steps << '\n';
  }
  return out.str();
}

std::vector<Rational> comparison_totals() {
  const Rational base = 1'048'576'000;  // 1000 * 2^20
  return {base, 2 * base, 4 * base, 8 * base, 12 * base, 16 * base, Rational(20'000'000'000LL)};
}

std::vector<std::string> comparison_columns() {
  return {"mid_b0", "rl_b1", "samples_k_b1", "mid_b0.2", "rl_b0.2", "mid_b0.5", "rl_b0.5", "mid_b0.8", "rl_b0.8"};
}

std::vector<ComparisonRow> comparison_table(const BudgetConstants& c) {
  std::vector<ComparisonRow> rows;
  const std::vector<Rational> mixed = {Rational(1, 5), Rational(1, 2), Rational(4, 5)};
  // Row labels follow the doubling series (2.10 -> 4.20 -> 8.40) rather than
  // rounding each power-of-two total independently.
  const std::vector<std::string> labels = {"1.05", "2.10", "4.20", "8.40", "12.58", "16.78", "20.00"};
  const auto totals = comparison_totals();
  for (std::size_t i = 0; i < totals.size(); ++i) {
    const Rational& t = totals[i];
    ComparisonRow row;
    row.total = t;
    row.label = labels[i];
    row.cells.push_back(Rational(allocate(t, 0, c).mid_steps));
    auto rl_only = allocate(t, 1, c);
    row.cells.push_back(Rational(rl_only.rl_steps));
    row.cells.push_back(Rational(rl_only.rl_samples) / 1000);
    for (const auto& b : mixed) {
      auto p = allocate(t, b, c);
      row.cells.push_back(Rational(p.mid_steps));
      row.cells.push_back(Rational(p.rl_steps));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string cell_text(const Rational& v, std::size_t column) { return to_decimal(v, column == 2 ? 1 : 0); }

}  // namespace

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << std::setw(8) << "total_B";
  for (const auto& c : comparison_columns()) out << std::setw(14) << c;
  out << '\n';
  for (const auto& r : rows) {
    out << std::setw(8) << r.label;
    for (std::size_t i = 0; i < r.cells.size(); ++i) out << std::setw(14) << cell_text(r.cells[i], i);
    out << '\n';
  }
  return out.str();
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "total_B";
  for (const auto& c : comparison_columns()) out << ',' << c;
  out << '\n';
  for (const auto& r : rows) {
    out << r.label;
    for (std::size_t i = 0; i < r.cells.size(); ++i) out << ',' << cell_text(r.cells[i], i);
    out << '\n';
  }
  return out.str();
}

}  // namespace rforge
