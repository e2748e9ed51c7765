#include "reasonforge/trace_parser.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>

#include "reasonforge/text.hpp"

namespace rforge {

const PredictedNode* ParsedTrace::find(const std::string& role_key) const {
  for (const auto& n : nodes) {
    if (n.role_key == role_key) return &n;
  }
  return nullptr;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// --- numeric literals ----------------------------------------------------------

struct Literal {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<std::int64_t> value;  ///< absent when fractional or out of range
};

std::optional<std::int64_t> parse_int(std::string_view digits, bool negative) {
  std::int64_t v = 0;
  for (char c : digits) {
    if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, c - '0', &v)) return std::nullopt;
  }
  return negative ? -v : v;
}

std::vector<Literal> scan_literals(std::string_view s) {
  std::vector<Literal> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_digit(s[i]) || (i > 0 && (is_ident_char(s[i - 1]) || s[i - 1] == '.'))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    std::string_view whole = s.substr(b, i - b);
    bool integral = true;
    if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
      std::size_t f = i + 1;
      while (f < s.size() && is_digit(s[f])) {
        if (s[f] != '0') integral = false;
        ++f;
      }
      i = f;
    }
    bool negative = b > 0 && s[b - 1] == '-' && (b == 1 || !(is_ident_char(s[b - 2]) || s[b - 2] == ')'));
    Literal lit{negative ? b - 1 : b, i, std::nullopt};
    if (integral) lit.value = parse_int(whole, negative);
    out.push_back(lit);
  }
  return out;
}

std::optional<std::int64_t> last_literal(std::string_view s) {
  auto lits = scan_literals(s);
  if (lits.empty()) return std::nullopt;
  return lits.back().value;
}

// --- tokens ---------------------------------------------------------------------

enum class Tok { Num, Ident, Op, LParen, RParen, Eq, Junk };

struct Token {
  Tok kind = Tok::Junk;
  std::string text;
  char op = 0;
  std::optional<std::int64_t> num;
  bool spaced = false;  ///< whitespace precedes the token
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  bool spaced = false;
  auto push = [&](Tok k, std::string text, char op = 0) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.op = op;
    t.spaced = spaced;
    out.push_back(std::move(t));
    spaced = false;
  };
  while (i < s.size()) {
    char c = s[i];
    if (is_space(c)) {
      spaced = true;
      ++i;
      continue;
    }
    if (is_digit(c)) {
      std::size_t b = i;
      while (i < s.size() && is_digit(s[i])) ++i;
      std::string_view digits = s.substr(b, i - b);
      bool integral = true;
      if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
        ++i;
        while (i < s.size() && is_digit(s[i])) {
          if (s[i] != '0') integral = false;
          ++i;
        }
      }
      push(Tok::Num, std::string(s.substr(b, i - b)));
      if (integral) out.back().num = parse_int(digits, false);
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t b = i;
      while (i < s.size() && is_ident_char(s[i])) ++i;
      push(Tok::Ident, std::string(s.substr(b, i - b)));
      continue;
    }
    auto utf8 = [&](std::string_view seq) { return s.substr(i, seq.size()) == seq; };
    if (c == '+' || c == '-' || c == '*' || c == '/') {
      push(Tok::Op, std::string(1, c), c);
      ++i;
    } else if (utf8("\xC3\x97") || utf8("\xC2\xB7")) {  // multiplication sign, middle dot
      push(Tok::Op, "*", '*');
      i += 2;
    } else if (utf8("\xC3\xB7")) {  // division sign
      push(Tok::Op, "/", '/');
      i += 2;
    } else if (utf8("\xE2\x88\x92") || utf8("\xE2\x80\x93")) {  // minus sign, en dash
      push(Tok::Op, "-", '-');
      i += 3;
    } else if (c == '(') {
      push(Tok::LParen, "(");
      ++i;
    } else if (c == ')') {
      push(Tok::RParen, ")");
      ++i;
    } else if (c == '=') {
      push(Tok::Eq, "=");
      ++i;
    } else {
      push(Tok::Junk, std::string(1, c));
      ++i;
    }
  }
  return out;
}

// --- expressions ------------------------------------------------------------------

struct Expr {
  enum Kind { Num, Ident, Neg, Bin, Paren } kind = Num;
  std::optional<std::int64_t> num;
  std::string name;
  char op = 0;
  std::unique_ptr<Expr> lhs, rhs;
};

using ExprPtr = std::unique_ptr<Expr>;

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t b, std::size_t e) : t_(toks), pos_(b), end_(e) {}

  // Null unless the whole range is one expression.
  ExprPtr parse_all() {
    auto e = expr(0);
    if (!e || pos_ != end_) return nullptr;
    return e;
  }

 private:
  static constexpr int kMaxDepth = 200;

  const Token* peek() const { return pos_ < end_ ? &t_[pos_] : nullptr; }
  bool at_op(char op) const { return peek() && peek()->kind == Tok::Op && peek()->op == op; }

  ExprPtr expr(int depth) {
    auto left = term(depth);
    while (left && (at_op('+') || at_op('-'))) {
      char op = t_[pos_++].op;
      auto right = term(depth);
      if (!right) return nullptr;
      left = bin(op, std::move(left), std::move(right));
    }
    return left;
  }

  ExprPtr term(int depth) {
    auto left = unary(depth);
    while (left) {
      if (at_op('*') || at_op('/')) {
        char op = t_[pos_++].op;
        auto right = unary(depth);
        if (!right) return nullptr;
        left = bin(op, std::move(left), std::move(right));
      } else if (ends_in_number(*left) && peek() && !peek()->spaced &&
                 (peek()->kind == Tok::Ident || peek()->kind == Tok::LParen)) {
        auto right = primary(depth);
        if (!right) return nullptr;
        left = bin('*', std::move(left), std::move(right));
      } else {
        break;
      }
    }
    return left;
  }

  ExprPtr unary(int depth) {
    if (depth > kMaxDepth) return nullptr;
    if (at_op('-')) {
      ++pos_;
      auto inner = unary(depth + 1);
      if (!inner) return nullptr;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Neg;
      e->lhs = std::move(inner);
      return e;
    }
    if (at_op('+')) {
      ++pos_;
      return unary(depth + 1);
    }
    return primary(depth);
  }

  ExprPtr primary(int depth) {
    const Token* tok = peek();
    if (!tok) return nullptr;
    if (tok->kind == Tok::Num) {
      ++pos_;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Num;
      e->num = tok->num;
      return e;
    }
    if (tok->kind == Tok::Ident) {
      ++pos_;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Ident;
      e->name = tok->text;
      return e;
    }
    if (tok->kind == Tok::LParen && depth < kMaxDepth) {
      ++pos_;
      auto inner = expr(depth + 1);
      if (!inner || !peek() || peek()->kind != Tok::RParen) return nullptr;
      ++pos_;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Paren;
      e->lhs = std::move(inner);
      return e;
    }
    return nullptr;
  }

  // Implicit multiplication applies to a literal coefficient: "2x", "3(x + 1)".
  static bool ends_in_number(const Expr& e) {
    return e.kind == Expr::Num || (e.kind == Expr::Neg && e.lhs->kind == Expr::Num);
  }

  static ExprPtr bin(char op, ExprPtr a, ExprPtr b) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Bin;
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
  }

  const std::vector<Token>& t_;
  std::size_t pos_, end_;
};

template <typename Lookup>
std::optional<LinearValue> eval(const Expr& e, const Lookup& lookup) {
  switch (e.kind) {
    case Expr::Num:
      if (!e.num) return std::nullopt;
      return LinearValue::number(*e.num);
    case Expr::Ident: return lookup(e.name);
    case Expr::Paren: return eval(*e.lhs, lookup);
    case Expr::Neg: {
      auto v = eval(*e.lhs, lookup);
      if (!v) return std::nullopt;
      return lin_neg(*v);
    }
    case Expr::Bin: {
      auto a = eval(*e.lhs, lookup);
      if (!a) return std::nullopt;
      auto b = eval(*e.rhs, lookup);
      if (!b) return std::nullopt;
      switch (e.op) {
        case '+': return lin_add(*a, *b);
        case '-': return lin_sub(*a, *b);
        case '*': return lin_mul(*a, *b);
        default: return lin_div(*a, *b);
      }
    }
  }
  return std::nullopt;
}

void collect_idents(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Ident) out.push_back(e.name);
  if (e.lhs) collect_idents(*e.lhs, out);
  if (e.rhs) collect_idents(*e.rhs, out);
}

void collect_ops(const Expr& e, std::set<char>& out) {
  if (e.kind == Expr::Bin) out.insert(e.op);
  if (e.lhs) collect_ops(*e.lhs, out);
  if (e.rhs) collect_ops(*e.rhs, out);
}

void collect_parens(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Paren) out.push_back(&e);
  if (e.lhs) collect_parens(*e.lhs, out);
  if (e.rhs) collect_parens(*e.rhs, out);
}

bool mentions(const Expr& e, const std::string& name) {
  if (e.kind == Expr::Ident && e.name == name) return true;
  return (e.lhs && mentions(*e.lhs, name)) || (e.rhs && mentions(*e.rhs, name));
}

// --- chains -------------------------------------------------------------------------

constexpr std::size_t kMaxGroupTokens = 256;

ExprPtr longest_suffix(const std::vector<Token>& t, std::size_t b, std::size_t e) {
  if (e - b > kMaxGroupTokens) b = e - kMaxGroupTokens;
  for (std::size_t s = b; s < e; ++s) {
    if (auto x = ExprParser(t, s, e).parse_all()) return x;
  }
  return nullptr;
}

ExprPtr longest_prefix(const std::vector<Token>& t, std::size_t b, std::size_t e) {
  if (e - b > kMaxGroupTokens) e = b + kMaxGroupTokens;
  for (std::size_t s = e; s > b; --s) {
    if (auto x = ExprParser(t, b, s).parse_all()) return x;
  }
  return nullptr;
}

using Chain = std::vector<ExprPtr>;

// Splits a segment's tokens at '=' into maximal runs of parseable terms.
std::vector<Chain> chains_of(const std::vector<Token>& t) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i].kind == Tok::Eq) {
      groups.emplace_back(start, i);
      start = i + 1;
    }
  }
  std::vector<Chain> out;
  if (groups.size() < 2) return out;
  Chain cur;
  auto close = [&]() {
    if (cur.size() >= 2) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto [b, e] = groups[g];
    if (g == 0) {
      if (auto x = longest_suffix(t, b, e)) cur.push_back(std::move(x));
      continue;
    }
    if (g + 1 == groups.size()) {
      if (auto x = longest_prefix(t, b, e)) cur.push_back(std::move(x));
      close();
      continue;
    }
    if (e - b <= kMaxGroupTokens) {
      if (auto whole = ExprParser(t, b, e).parse_all()) {
        cur.push_back(std::move(whole));
        continue;
      }
    }
    if (auto x = longest_prefix(t, b, e)) cur.push_back(std::move(x));
    close();
    if (auto x = longest_suffix(t, b, e)) cur.push_back(std::move(x));
  }
  return out;
}

// Sub-statements of a step body. LaTeX product/quotient commands become
// operators; any other command, sentence punctuation and math delimiters split.
std::vector<std::string> statements(std::string_view body) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&]() {
    if (!trim(cur).empty()) out.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '\\') {
      std::size_t j = i + 1;
      while (j < body.size() && std::isalpha(static_cast<unsigned char>(body[j]))) ++j;
      std::string_view cmd = body.substr(i + 1, j - i - 1);
      if (cmd == "times" || cmd == "cdot") {
        cur += " * ";
      } else if (cmd == "div") {
        cur += " / ";
      } else {
        flush();
      }
      i = (j == i + 1) ? i + 1 : j - 1;  // skip "\[" style escapes entirely
      continue;
    }
    bool split = c == ';' || c == ',' || c == ':' || c == '\n' || c == '\r' || c == '$' || c == '?' || c == '!';
    if (c == '.') split = !(i > 0 && i + 1 < body.size() && is_digit(body[i - 1]) && is_digit(body[i + 1]));
    if (split) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

struct Header {
  std::string role;
  std::string var;
  bool unknown = false;
  std::size_t body_begin = 0;
};

std::optional<Header> parse_header(std::string_view s) {
  if (s.substr(0, 6) != "Define") return std::nullopt;
  std::size_t i = 6;
  if (i >= s.size() || !is_space(s[i])) return std::nullopt;
  while (i < s.size() && is_space(s[i])) ++i;
  const std::size_t role_begin = i;
  for (std::size_t k = role_begin + 1; k + 3 < s.size(); ++k) {
    if (!is_space(s[k]) || s[k + 1] != 'a' || s[k + 2] != 's' || !is_space(s[k + 3])) continue;
    std::size_t j = k + 3;
    while (j < s.size() && is_space(s[j])) ++j;
    if (j < s.size() && s[j] == '$') ++j;
    if (j >= s.size() || !is_ident_start(s[j])) continue;
    std::size_t vb = j;
    while (j < s.size() && is_ident_char(s[j])) ++j;
    Header h;
    h.role = trim(s.substr(role_begin, k - role_begin));
    h.var = std::string(s.substr(vb, j - vb));
    if (j < s.size() && s[j] == '$') ++j;
    std::size_t m = j;
    while (m < s.size() && is_space(s[m])) ++m;
    if (s.substr(m, 9) == "(unknown)") {
      h.unknown = true;
      j = m + 9;
    }
    h.body_begin = j;
    if (h.role.empty()) return std::nullopt;
    return h;
  }
  return std::nullopt;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

struct Helper {
  std::optional<LinearValue> value;
  std::vector<std::string> deps;
  std::set<char> ops;
};

std::optional<Op> op_from_symbols(const std::set<char>& ops, bool has_deps) {
  if (!has_deps) return Op::Leaf;
  if (ops.empty()) return Op::Sum;
  if (ops.size() > 1) return std::nullopt;
  switch (*ops.begin()) {
    case '+': return Op::Sum;
    case '-': return Op::Sub;
    case '*': return Op::Mul;
    default: return Op::Div;
  }
}

}  // namespace

std::vector<std::string> segment(std::string_view text) {
  for (std::string_view marker : {"[/solution]", "[answer]"}) {
    auto pos = text.find(marker);
    if (pos != std::string_view::npos) text = text.substr(0, pos);
  }
  std::vector<std::size_t> starts;
  for (std::size_t pos = text.find("Define"); pos != std::string_view::npos; pos = text.find("Define", pos + 1)) {
    bool word_start = pos == 0 || !is_ident_char(text[pos - 1]);
    bool followed = pos + 6 < text.size() && is_space(text[pos + 6]);
    if (word_start && followed) starts.push_back(pos);
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::size_t end = i + 1 < starts.size() ? starts[i + 1] : text.size();
    out.emplace_back(text.substr(starts[i], end - starts[i]));
  }
  return out;
}

ParsedStep parse_step(std::string_view text, const TraceEnv& env) {
  ParsedStep step;
  step.raw = std::string(text);
  auto header = parse_header(text);
  if (!header) {
    step.warnings.push_back("step without 'Define <role> as <var>' header");
    if (auto lit = last_literal(text)) step.value = LinearValue::number(*lit);
    return step;
  }
  step.role = header->role;
  step.role_key = normalize_role(header->role);
  step.var = header->var;
  step.is_unknown = header->unknown;
  const std::string_view body = text.substr(header->body_begin);
  const std::string unknown_name = step.is_unknown ? step.var : env.unknown.value_or("");

  std::map<std::string, Helper> helpers;
  std::optional<LinearValue> target_value;
  if (step.is_unknown) target_value = LinearValue::unknown();
  std::optional<LinearValue> target_chain_value, other_chain_value;
  bool saw_target_chain = false;
  std::set<char> step_ops;

  auto lookup = [&](const std::string& name) -> std::optional<LinearValue> {
    if (name == step.var) return target_value;
    if (auto h = helpers.find(name); h != helpers.end()) return h->second.value;
    if (!unknown_name.empty() && name == unknown_name) return LinearValue::unknown();
    if (auto v = env.vars.find(name); v != env.vars.end()) return v->second.value;
    return std::nullopt;
  };

  // Variables and operators read by a defining expression.
  auto analyse = [&](const Expr& e, std::vector<std::string>& deps, std::set<char>& ops) {
    std::vector<std::string> names;
    collect_idents(e, names);
    collect_ops(e, ops);
    for (const auto& n : names) {
      if (n == step.var) continue;
      if (auto h = helpers.find(n); h != helpers.end()) {
        for (const auto& d : h->second.deps) push_unique(deps, d);
        ops.insert(h->second.ops.begin(), h->second.ops.end());
      } else if (env.vars.count(n) || (!unknown_name.empty() && n == unknown_name && !step.is_unknown)) {
        push_unique(deps, n);
      } else {
        step.warnings.push_back("undefined identifier '" + n + "'");
      }
    }
    // A parenthesized symbolic operand equal to exactly one known variable
    // stands for that variable, as in "x + (x + 2)" with m = x + 2.
    std::vector<const Expr*> parens;
    collect_parens(e, parens);
    for (const Expr* p : parens) {
      auto v = eval(*p, lookup);
      if (!v || v->numeric()) continue;
      std::vector<std::string> hits;
      for (const auto& [name, info] : env.vars) {
        if (info.value && *info.value == *v && name != step.var) hits.push_back(name);
      }
      if (hits.size() == 1) push_unique(deps, hits[0]);
    }
  };

  for (const auto& stmt : statements(body)) {
    auto toks = tokenize(stmt);
    for (auto& chain : chains_of(toks)) {
      const Expr& first = *chain[0];
      enum { Target, HelperDef, Resolution, Anonymous } kind = Anonymous;
      if (first.kind == Expr::Ident && first.name == step.var) {
        kind = Target;
      } else if (first.kind == Expr::Ident && first.name != unknown_name && !env.vars.count(first.name)) {
        kind = HelperDef;
      } else {
        bool res = !unknown_name.empty() && std::any_of(chain.begin(), chain.end(), [&](const ExprPtr& t) {
          return mentions(*t, unknown_name);
        });
        if (res) kind = Resolution;
      }

      std::vector<std::optional<LinearValue>> vals;
      for (const auto& term : chain) vals.push_back(eval(*term, lookup));

      // Terms with differing x coefficients fix the unknown.
      std::optional<LinearValue> base;
      for (const auto& v : vals) {
        if (!v) continue;
        if (!base) {
          base = v;
          continue;
        }
        if (v->coeff == base->coeff) {
          if (v->constant != base->constant) step.warnings.push_back("inconsistent equality chain");
          continue;
        }
        std::int64_t num = v->constant - base->constant, den = base->coeff - v->coeff;
        if (den != 0 && num % den == 0) {
          if (!step.pin) {
            step.pin = num / den;
          } else if (*step.pin != num / den) {
            step.warnings.push_back("conflicting values for the unknown");
          }
        } else {
          step.warnings.push_back("equation has no integer solution");
        }
        break;
      }

      std::optional<LinearValue> last_rhs;
      for (std::size_t i = vals.size(); i-- > 1;) {
        if (vals[i]) {
          last_rhs = vals[i];
          break;
        }
      }

      if (kind == Resolution) continue;
      const Expr& defining = (kind == Anonymous) ? *chain[0] : *chain[1];
      std::vector<std::string> deps;
      std::set<char> ops;
      analyse(defining, deps, ops);

      std::optional<LinearValue> last_any = last_rhs;
      if (!last_any && vals[0]) last_any = vals[0];
      if (last_any) other_chain_value = last_any;

      if (kind == HelperDef) {
        helpers[first.name] = Helper{last_rhs, deps, ops};
        continue;
      }
      for (const auto& d : deps) push_unique(step.dependencies, d);
      step_ops.insert(ops.begin(), ops.end());
      if (kind == Target) {
        saw_target_chain = true;
        if (last_rhs) {
          target_chain_value = last_rhs;
          target_value = last_rhs;
        }
      }
    }
  }

  if (step.is_unknown) {
    step.value = LinearValue::unknown();
  } else if (saw_target_chain && target_chain_value) {
    step.value = target_chain_value;
  } else if (other_chain_value) {
    step.value = other_chain_value;
  } else if (auto lit = last_literal(body)) {
    step.value = LinearValue::number(*lit);
    step.warnings.push_back("value for '" + step.var + "' taken from a bare literal");
  }
  if (!step.value) step.warnings.push_back("no value for '" + step.var + "'");

  step.op_hint = step.is_unknown ? std::optional<Op>(Op::Leaf) : op_from_symbols(step_ops, !step.dependencies.empty());
  for (const auto& d : step.dependencies) {
    auto it = env.vars.find(d);
    step.parent_roles.push_back(it != env.vars.end() ? it->second.role_key : std::string());
  }
  return step;
}

std::optional<std::int64_t> extract_answer(std::string_view text) {
  auto close = text.rfind("[/answer]");
  if (close != std::string_view::npos) {
    auto open = text.rfind("[answer]", close);
    if (open != std::string_view::npos) {
      auto inner = text.substr(open + 8, close - open - 8);
      auto lits = scan_literals(inner);
      if (!lits.empty()) return lits.front().value;
    }
  }
  return last_literal(text);
}

ParsedTrace parse_trace(std::string_view solution, std::string_view answer_text) {
  ParsedTrace trace;
  TraceEnv env;
  std::map<std::string, std::size_t> node_index;
  std::vector<std::optional<LinearValue>> node_values;

  for (const auto& text : segment(solution)) {
    ParsedStep step = parse_step(text, env);
    for (const auto& w : step.warnings) trace.warnings.push_back(step.var + ": " + w);
    if (step.var.empty()) {
      trace.steps.push_back(std::move(step));
      continue;
    }
    if (step.pin) {
      if (!trace.unknown_value) {
        trace.unknown_value = step.pin;
      } else if (*trace.unknown_value != *step.pin) {
        trace.warnings.push_back(step.var + ": unknown already resolved to " + std::to_string(*trace.unknown_value));
      }
    }
    if (step.is_unknown) {
      if (env.unknown && *env.unknown != step.var) trace.warnings.push_back("second unknown '" + step.var + "'");
      env.unknown = step.var;
      trace.unknown_var = step.var;
    }
    env.vars[step.var] = VarInfo{step.value, step.role_key};

    PredictedNode node{step.role, step.role_key, step.parent_roles, std::nullopt, step.op_hint};
    if (auto it = node_index.find(step.role_key); it != node_index.end()) {
      trace.warnings.push_back("role '" + step.role + "' redefined; last definition wins");
      trace.nodes[it->second] = node;
      node_values[it->second] = step.value;
    } else {
      node_index[step.role_key] = trace.nodes.size();
      trace.nodes.push_back(node);
      node_values.push_back(step.value);
    }
    trace.steps.push_back(std::move(step));
  }

  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const auto& v = node_values[i];
    if (!v) continue;
    if (v->numeric()) {
      trace.nodes[i].value = v->constant;
    } else if (trace.unknown_value) {
      trace.nodes[i].value = v->at(*trace.unknown_value);
    } else {
      trace.warnings.push_back("'" + trace.nodes[i].role + "' stays symbolic: unknown never resolved");
    }
  }

  std::string full(solution);
  if (!answer_text.empty()) full += "\n" + std::string(answer_text);
  trace.final_answer = extract_answer(full);
  return trace;
}

std::optional<Structure> trace_structure(const ParsedTrace& trace) {
  Structure s;
  std::map<std::string, std::uint32_t> index;
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) index[trace.nodes[i].role_key] = static_cast<std::uint32_t>(i);
  for (const auto& n : trace.nodes) {
    if (!n.op) return std::nullopt;
    StructNode sn;
    sn.op = *n.op;
    for (const auto& p : n.parent_roles) {
      auto it = index.find(p);
      if (it == index.end()) return std::nullopt;
      sn.parents.push_back(it->second);
    }
    s.nodes.push_back(std::move(sn));
  }
  return s;
}

}  // namespace rforge
