#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hogsos/detail/lexer.hpp"
#include "hogsos/error.hpp"
#include "hogsos/term.hpp"

namespace hogsos {

// Operands of an n-ary symbol are numbered 1..n; an OperandSet is a subset
// of them stored as a bitmask (operand i is bit i-1).
class OperandSet {
 public:
  static constexpr std::size_t max_arity = 16;

  constexpr OperandSet() = default;
  constexpr explicit OperandSet(std::uint32_t mask) : mask_(mask) {}
  static OperandSet of(std::initializer_list<std::size_t> operands) {
    OperandSet s;
    for (auto i : operands) s.insert(i);
    return s;
  }

  constexpr bool contains(std::size_t operand) const { return (mask_ >> (operand - 1)) & 1u; }
  constexpr void insert(std::size_t operand) { mask_ |= 1u << (operand - 1); }
  constexpr std::uint32_t mask() const { return mask_; }
  constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(mask_)); }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 1; i <= max_arity; ++i) {
      if (!contains(i)) continue;
      if (!first) out += ',';
      first = false;
      out += std::to_string(i);
    }
    return out + "}";
  }

  friend constexpr auto operator<=>(OperandSet, OperandSet) = default;

 private:
  std::uint32_t mask_ = 0;
};

enum class Mode { det, nd };

inline std::string_view to_string(Mode m) { return m == Mode::det ? "det" : "nd"; }

// ---------------------------------------------------------------------------
// Sugared rules, as written in a .hos file

// `x -> y` (label empty) or `x -[z]-> y`.
struct Premise {
  std::string operand;
  std::optional<std::string> label;
  std::string output;
};

enum class Shape { red, lab };

struct SugaredRule {
  std::string name;
  std::string op;
  std::vector<std::string> operands;
  std::vector<Premise> premises;
  Shape shape = Shape::red;
  std::optional<std::string> label_var;  // set iff shape == lab
  Term conclusion = Term::hole();
};

struct SugaredSpec {
  Signature sig;
  Mode mode = Mode::det;
  std::vector<SugaredRule> rules;
};

// ---------------------------------------------------------------------------
// Strict rules
//
// A strict rule for an n-ary symbol f and operand set W has the complete
// premise list fixed by (n, W, shape): operands in W reduce to y_j, every
// other operand x_i is applied to each x_j (and to the label x for labeled
// conclusions) yielding y_i^{x_j} and y_i^x. Only the conclusion varies, so
// it is all a HORule stores. Its metavariables use the canonical names
//   x, x<i>, y<j>, y<i>^x<j>, y<i>^x

namespace var_names {
inline std::string label() { return "x"; }
inline std::string operand(std::size_t i) { return "x" + std::to_string(i); }
inline std::string reduct(std::size_t j) { return "y" + std::to_string(j); }
inline std::string applied(std::size_t i, std::size_t j) { return "y" + std::to_string(i) + "^x" + std::to_string(j); }
inline std::string applied_to_label(std::size_t i) { return "y" + std::to_string(i) + "^x"; }
}  // namespace var_names

// How a canonical metavariable is bound when a rule fires.
struct VarRole {
  enum class Kind { label, operand, reduct, applied, applied_to_label };
  Kind kind;
  std::size_t i = 0;  // operand index (1-based)
  std::size_t j = 0;  // argument operand for `applied`
};

namespace detail {

inline std::optional<std::size_t> parse_index(std::string_view s) {
  if (s.empty() || s.size() > 3) return std::nullopt;
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  if (v == 0 || s[0] == '0') return std::nullopt;
  return v;
}

}  // namespace detail

inline std::optional<VarRole> parse_var_role(std::string_view name) {
  using K = VarRole::Kind;
  if (name == "x") return VarRole{K::label};
  if (name.starts_with('x')) {
    if (auto i = detail::parse_index(name.substr(1))) return VarRole{K::operand, *i};
    return std::nullopt;
  }
  if (!name.starts_with('y')) return std::nullopt;
  const auto caret = name.find('^');
  const auto i = detail::parse_index(name.substr(1, caret == std::string_view::npos ? name.npos : caret - 1));
  if (!i) return std::nullopt;
  if (caret == std::string_view::npos) return VarRole{K::reduct, *i};
  const auto rest = name.substr(caret + 1);
  if (rest == "x") return VarRole{K::applied_to_label, *i};
  if (!rest.starts_with('x')) return std::nullopt;
  if (auto j = detail::parse_index(rest.substr(1))) return VarRole{K::applied, *i, *j};
  return std::nullopt;
}

// The metavariables a conclusion may mention for (arity, W, shape).
inline std::set<std::string, std::less<>> allowed_vars(std::size_t arity, OperandSet w, Shape shape) {
  std::set<std::string, std::less<>> out;
  for (std::size_t i = 1; i <= arity; ++i) {
    out.insert(var_names::operand(i));
    if (w.contains(i)) {
      out.insert(var_names::reduct(i));
    } else {
      for (std::size_t j = 1; j <= arity; ++j) out.insert(var_names::applied(i, j));
      if (shape == Shape::lab) out.insert(var_names::applied_to_label(i));
    }
  }
  if (shape == Shape::lab) out.insert(var_names::label());
  return out;
}

struct HORule {
  std::string op;
  OperandSet w;
  Shape shape = Shape::red;
  Term conclusion = Term::hole();
  std::string origin;  // sugared rule it came from

  friend bool operator==(const HORule& a, const HORule& b) {
    return a.op == b.op && a.w == b.w && a.shape == b.shape && a.conclusion == b.conclusion;
  }
};

// A set of strict rules over a signature, indexed by (symbol, W).
class HOSpec {
 public:
  HOSpec(Signature sig, Mode mode, std::vector<HORule> rules)
      : sig_(std::move(sig)), mode_(mode), rules_(std::move(rules)) {
    table_.resize(sig_.size());
    for (std::size_t s = 0; s < sig_.size(); ++s) {
      const auto arity = sig_.symbols()[s].arity;
      if (arity <= OperandSet::max_arity) table_[s].resize(std::size_t{1} << arity);
    }
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      const auto& rule = rules_[r];
      const auto s = sig_.index_of(rule.op);
      if (!s || rule.w.mask() >= table_[*s].size()) continue;
      table_[*s][rule.w.mask()].push_back(r);
    }
  }

  const Signature& sig() const noexcept { return sig_; }
  Mode mode() const noexcept { return mode_; }
  const std::vector<HORule>& rules() const noexcept { return rules_; }

  // Rules for (op, W); empty when none or op is unknown.
  std::vector<const HORule*> lookup(std::string_view op, OperandSet w) const {
    std::vector<const HORule*> out;
    if (auto s = sig_.index_of(op)) lookup_into(*s, w, out);
    return out;
  }

  void lookup_into(std::size_t symbol_index, OperandSet w, std::vector<const HORule*>& out) const {
    const auto& row = table_[symbol_index];
    if (w.mask() >= row.size()) return;
    for (auto r : row[w.mask()]) out.push_back(&rules_[r]);
  }

  // Symbols with more than one rule for some W (only possible in nd mode).
  std::set<std::string> choice_symbols() const {
    std::set<std::string> out;
    for (std::size_t s = 0; s < table_.size(); ++s)
      for (const auto& cell : table_[s])
        if (cell.size() > 1) out.insert(sig_.symbols()[s].name);
    return out;
  }

  HOSpec with_mode(Mode mode) const { return HOSpec(sig_, mode, rules_); }

 private:
  Signature sig_;
  Mode mode_;
  std::vector<HORule> rules_;
  std::vector<std::vector<std::vector<std::size_t>>> table_;
};

// Checks the format's invariants: every conclusion uses only the variables
// its (arity, W, shape) allows, and each (op, W) has exactly one rule (det)
// or at least one (nd). Returns every violation; empty means valid.
inline std::vector<Diagnostic> validate(const HOSpec& spec) {
  std::vector<Diagnostic> out;
  const auto& sig = spec.sig();
  for (const auto& rule : spec.rules()) {
    const auto idx = sig.index_of(rule.op);
    if (!idx) {
      out.push_back({rule.op, rule.w.to_string(), "rule '" + rule.origin + "' for undeclared symbol"});
      continue;
    }
    const auto arity = sig.symbols()[*idx].arity;
    if (arity > OperandSet::max_arity || rule.w.mask() >= (std::uint32_t{1} << arity)) {
      out.push_back({rule.op, rule.w.to_string(), "operand set out of range for arity " + std::to_string(arity)});
      continue;
    }
    try {
      check_term(rule.conclusion, sig);
    } catch (const TermError& e) {
      out.push_back({rule.op, rule.w.to_string(), "rule '" + rule.origin + "': " + e.what()});
    }
    const auto allowed = allowed_vars(arity, rule.w, rule.shape);
    for (const auto& v : vars_of(rule.conclusion))
      if (!allowed.contains(v))
        out.push_back({rule.op, rule.w.to_string(),
                       "rule '" + rule.origin + "': illegal conclusion variable '" + v + "'"});
  }
  for (const auto& sym : sig.symbols()) {
    if (sym.arity > OperandSet::max_arity) {
      out.push_back({sym.name, "", "arity exceeds " + std::to_string(OperandSet::max_arity)});
      continue;
    }
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << sym.arity); ++m) {
      const OperandSet w(m);
      const auto n = spec.lookup(sym.name, w).size();
      if (n == 0) out.push_back({sym.name, w.to_string(), "gap: no rule"});
      if (n > 1 && spec.mode() == Mode::det)
        out.push_back({sym.name, w.to_string(), "overlap: " + std::to_string(n) + " rules"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view src) : lex_(src) {}

  SugaredSpec parse() {
    SugaredSpec spec;
    expect_keyword("sig");
    lex_.expect(Tok::lbrace, "'{'");
    do {
      const Token name = lex_.expect(Tok::ident, "a symbol name");
      lex_.expect(Tok::slash, "'/'");
      const Token arity = lex_.expect(Tok::nat, "an arity");
      lex_.expect(Tok::semicolon, "';'");
      if (spec.sig.contains(name.text)) lex_.fail_at(name.offset, "duplicate symbol '" + name.text + "'");
      if (name.text == hole_name) lex_.fail_at(name.offset, "the hole cannot be a symbol");
      spec.sig.add(name.text, std::stoul(arity.text));
    } while (lex_.peek().kind == Tok::ident);
    lex_.expect(Tok::rbrace, "'}'");

    expect_keyword("mode");
    const Token mode = lex_.expect(Tok::ident, "'det' or 'nd'");
    if (mode.text == "det") {
      spec.mode = Mode::det;
    } else if (mode.text == "nd") {
      spec.mode = Mode::nd;
    } else {
      lex_.fail_at(mode.offset, "expected 'det' or 'nd', found '" + mode.text + "'");
    }
    lex_.expect(Tok::semicolon, "';'");

    expect_keyword("rules");
    lex_.expect(Tok::lbrace, "'{'");
    std::set<std::string> names;
    while (lex_.peek().kind == Tok::ident && lex_.peek().text == "rule") {
      const auto at = lex_.peek().offset;
      auto rule = parse_rule(spec.sig);
      if (!names.insert(rule.name).second) lex_.fail_at(at, "duplicate rule name '" + rule.name + "'");
      spec.rules.push_back(std::move(rule));
    }
    lex_.expect(Tok::rbrace, "'}'");
    if (lex_.peek().kind != Tok::end) lex_.fail("unexpected " + Lexer::describe(lex_.peek()));
    return spec;
  }

 private:
  void expect_keyword(std::string_view kw) {
    const Token t = lex_.peek();
    if (t.kind != Tok::ident || t.text != kw) lex_.fail("expected '" + std::string(kw) + "'");
    lex_.next();
  }

  SugaredRule parse_rule(const Signature& sig) {
    expect_keyword("rule");
    SugaredRule rule;
    rule.name = lex_.expect(Tok::ident, "a rule name").text;
    lex_.expect(Tok::colon, "':'");

    struct RawPremise {
      Premise premise;
      std::size_t offset;
    };
    std::vector<RawPremise> raw;
    if (lex_.peek().kind != Tok::turnstile) {
      do {
        const Token operand = lex_.expect(Tok::ident, "a premise operand");
        Premise p{operand.text, std::nullopt, {}};
        if (lex_.accept(Tok::label_open)) {
          p.label = lex_.expect(Tok::ident, "a premise label").text;
          lex_.expect(Tok::label_close, "']->'");
        } else {
          lex_.expect(Tok::arrow, "'->' or '-['");
        }
        p.output = lex_.expect(Tok::ident, "a premise output").text;
        raw.push_back({std::move(p), operand.offset});
      } while (lex_.accept(Tok::comma));
    }
    lex_.expect(Tok::turnstile, "'|-'");

    const Token op = lex_.expect(Tok::ident, "an operation symbol");
    const auto idx = sig.index_of(op.text);
    if (!idx) lex_.fail_at(op.offset, "unknown symbol '" + op.text + "'");
    rule.op = op.text;
    if (lex_.accept(Tok::lparen)) {
      do {
        rule.operands.push_back(lex_.expect(Tok::ident, "an operand variable").text);
      } while (lex_.accept(Tok::comma));
      lex_.expect(Tok::rparen, "')'");
    }
    const auto arity = sig.symbols()[*idx].arity;
    if (rule.operands.size() != arity)
      lex_.fail_at(op.offset, "arity mismatch: '" + op.text + "' expects " + std::to_string(arity) +
                                  " operand(s), got " + std::to_string(rule.operands.size()));

    if (lex_.accept(Tok::long_arrow)) {
      rule.shape = Shape::red;
    } else if (lex_.accept(Tok::fun_open)) {
      rule.shape = Shape::lab;
      rule.label_var = lex_.expect(Tok::ident, "a label variable").text;
      lex_.expect(Tok::fun_close, "']=>'");
    } else {
      lex_.fail("expected '-->' or '=['");
    }

    rule.conclusion = TermParser(lex_, sig, VarPolicy::open).parse();
    lex_.expect(Tok::semicolon, "';'");

    // Scope checks on names.
    std::set<std::string> bound;
    auto bind = [&](const std::string& v, std::size_t at) {
      if (sig.contains(v)) lex_.fail_at(at, "metavariable '" + v + "' clashes with a symbol");
      if (v == hole_name) lex_.fail_at(at, "the hole cannot be a rule variable");
      if (!bound.insert(v).second) lex_.fail_at(at, "metavariable '" + v + "' bound twice");
    };
    for (const auto& v : rule.operands) bind(v, op.offset);
    if (rule.label_var) bind(*rule.label_var, op.offset);
    for (const auto& [p, at] : raw) {
      if (std::find(rule.operands.begin(), rule.operands.end(), p.operand) == rule.operands.end())
        lex_.fail_at(at, "premise operand '" + p.operand + "' is not an operand of " + rule.op);
      if (p.label) {
        const bool is_label = rule.label_var && *p.label == *rule.label_var;
        const bool is_operand =
            std::find(rule.operands.begin(), rule.operands.end(), *p.label) != rule.operands.end();
        if (!is_label && !is_operand)
          lex_.fail_at(at, "premise label '" + *p.label + "' is neither the rule label nor an operand");
      }
    }
    for (const auto& [p, at] : raw) bind(p.output, at);
    for (auto& r : raw) rule.premises.push_back(std::move(r.premise));
    return rule;
  }

  Lexer lex_;
};

}  // namespace detail

inline SugaredSpec parse_spec(std::string_view src) { return detail::SpecParser(src).parse(); }

// ---------------------------------------------------------------------------
// Desugaring

// Expands sugared rules into strict rules without validating coverage.
// Rule-local problems (mixed premise kinds, illegal conclusion variables) are
// appended to diagnostics.
inline HOSpec expand(const SugaredSpec& s, std::vector<Diagnostic>& diagnostics) {
  std::vector<HORule> out;
  for (const auto& rule : s.rules) {
    const std::size_t n = rule.operands.size();
    auto position = [&](const std::string& v) -> std::size_t {
      for (std::size_t i = 0; i < n; ++i)
        if (rule.operands[i] == v) return i + 1;
      return 0;
    };

    bool ok = true;
    std::vector<int> kind(n + 1, 0);  // 0 unmentioned, 1 reducing, 2 function
    Substitution rename;
    for (std::size_t i = 1; i <= n; ++i) rename.emplace(rule.operands[i - 1], Term::var(var_names::operand(i)));
    if (rule.label_var) rename.emplace(*rule.label_var, Term::var(var_names::label()));

    for (const auto& p : rule.premises) {
      const auto i = position(p.operand);
      const int k = p.label ? 2 : 1;
      if (kind[i] != 0 && kind[i] != k) {
        diagnostics.push_back({rule.op, "", "rule '" + rule.name + "': operand '" + p.operand +
                                                "' has both reducing and labeled premises"});
        ok = false;
      }
      if (kind[i] == 1 && k == 1) {
        diagnostics.push_back(
            {rule.op, "", "rule '" + rule.name + "': operand '" + p.operand + "' has two reducing premises"});
        ok = false;
      }
      kind[i] = k;
      std::string canonical;
      if (!p.label) {
        canonical = var_names::reduct(i);
      } else if (rule.label_var && *p.label == *rule.label_var) {
        canonical = var_names::applied_to_label(i);
      } else {
        canonical = var_names::applied(i, position(*p.label));
      }
      rename.insert_or_assign(p.output, Term::var(canonical));
    }
    if (!ok) continue;

    const Term conclusion = substitute_some(rule.conclusion, rename);
    std::vector<std::size_t> free_ops;
    OperandSet base;
    for (std::size_t i = 1; i <= n; ++i) {
      if (kind[i] == 1) base.insert(i);
      if (kind[i] == 0) free_ops.push_back(i);
    }
    // Each unmentioned operand is expanded both ways.
    for (std::uint32_t choice = 0; choice < (std::uint32_t{1} << free_ops.size()); ++choice) {
      OperandSet w = base;
      for (std::size_t b = 0; b < free_ops.size(); ++b)
        if ((choice >> b) & 1u) w.insert(free_ops[b]);
      const auto allowed = allowed_vars(n, w, rule.shape);
      bool legal = true;
      for (const auto& v : vars_of(conclusion)) {
        if (allowed.contains(v)) continue;
        legal = false;
        diagnostics.push_back({rule.op, w.to_string(),
                               "rule '" + rule.name + "': illegal conclusion variable '" + v + "'"});
      }
      if (legal) out.push_back(HORule{rule.op, w, rule.shape, conclusion, rule.name});
    }
  }
  return HOSpec(s.sig, s.mode, std::move(out));
}

// Expands and validates; throws SpecError listing every problem.
inline HOSpec desugar(const SugaredSpec& s) {
  std::vector<Diagnostic> diagnostics;
  HOSpec spec = expand(s, diagnostics);
  auto more = validate(spec);
  diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  if (!diagnostics.empty()) throw SpecError(std::move(diagnostics));
  return spec;
}

inline HOSpec load_spec(std::string_view src) { return desugar(parse_spec(src)); }

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

// Canonical metavariable names contain '^', which the rule grammar does not
// accept; y<i>^x<j> is written y<i>_x<j> in rendered rules.
inline std::string surface_name(std::string name) {
  for (auto& c : name)
    if (c == '^') c = '_';
  return name;
}

inline Term surface_term(const Term& t) {
  if (t.is_var()) return Term::var(surface_name(t.name()));
  std::vector<Term> args;
  for (const auto& a : t.args()) args.push_back(surface_term(a));
  return Term::op(t.name(), std::move(args));
}

}  // namespace detail

// One strict rule in the rule grammar, with its full premise list.
inline std::string render_rule(const HORule& rule, std::size_t arity, const std::string& name) {
  std::vector<std::string> premises;
  for (std::size_t i = 1; i <= arity; ++i) {
    const auto xi = var_names::operand(i);
    if (rule.w.contains(i)) {
      premises.push_back(xi + " -> " + var_names::reduct(i));
      continue;
    }
    for (std::size_t j = 1; j <= arity; ++j)
      premises.push_back(xi + " -[" + var_names::operand(j) + "]-> " +
                         detail::surface_name(var_names::applied(i, j)));
    if (rule.shape == Shape::lab)
      premises.push_back(xi + " -[x]-> " + detail::surface_name(var_names::applied_to_label(i)));
  }
  std::string out = "rule " + name + ":";
  for (std::size_t k = 0; k < premises.size(); ++k) out += (k == 0 ? " " : ", ") + premises[k];
  out += " |- " + rule.op;
  if (arity > 0) {
    out += "(";
    for (std::size_t i = 1; i <= arity; ++i) out += (i == 1 ? "" : ", ") + var_names::operand(i);
    out += ")";
  }
  out += rule.shape == Shape::red ? " --> " : " =[x]=> ";
  out += render(detail::surface_term(rule.conclusion));
  return out + ";";
}

// The whole strict specification in the rule grammar; desugaring it yields
// the same rules.
inline std::string render_spec(const HOSpec& spec) {
  std::string out = "sig {";
  for (const auto& s : spec.sig().symbols()) out += " " + s.name + "/" + std::to_string(s.arity) + ";";
  out += " }\nmode " + std::string(to_string(spec.mode())) + ";\nrules {\n";
  std::size_t k = 0;
  for (const auto& rule : spec.rules()) {
    out += "  " + render_rule(rule, spec.sig().arity(rule.op), "r" + std::to_string(k++)) + "\n";
  }
  return out + "}\n";
}

}  // namespace hogsos
