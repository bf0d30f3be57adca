#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hogsos/detail/lexer.hpp"
#include "hogsos/error.hpp"

namespace hogsos {

// The reserved metavariable that marks the hole of a context or of a
// function-behaviour template. `_HOLE_` is accepted as an ASCII alias.
inline const std::string hole_name{detail::middle_dot};
inline constexpr std::string_view hole_alias = "_HOLE_";

// Operation symbols and their arities, in declaration order. Declaration
// order is significant: it drives the canonical term order.
class Signature {
 public:
  struct Symbol {
    std::string name;
    std::size_t arity = 0;
    friend bool operator==(const Symbol&, const Symbol&) = default;
  };

  Signature() = default;
  Signature(std::initializer_list<Symbol> symbols) {
    for (const auto& s : symbols) add(s.name, s.arity);
  }

  void add(std::string name, std::size_t arity) {
    if (name.empty()) throw TermError("empty symbol name");
    if (index_of(name)) throw TermError("duplicate symbol '" + name + "'");
    symbols_.push_back(Symbol{std::move(name), arity});
  }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i].name == name) return i;
    return std::nullopt;
  }

  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  std::size_t arity(std::string_view name) const {
    auto i = index_of(name);
    if (!i) throw TermError("unknown symbol '" + std::string(name) + "'");
    return symbols_[*i].arity;
  }

  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<Symbol> symbols_;
};

// A first-order term: a metavariable or an operation symbol applied to
// arguments. Immutable and cheap to copy; subterms are shared. Equality is
// structural.
class Term {
 public:
  enum class Kind { var, op };

  static Term var(std::string name);
  static Term op(std::string symbol, std::vector<Term> args = {});
  static Term hole() { return var(hole_name); }

  Kind kind() const noexcept;
  bool is_var() const noexcept { return kind() == Kind::var; }
  bool is_op() const noexcept { return kind() == Kind::op; }
  bool is_hole() const noexcept;

  // Variable name or operation symbol.
  const std::string& name() const noexcept;
  std::span<const Term> args() const noexcept;
  const Term& arg(std::size_t i) const { return args()[i]; }

  // Node count.
  std::size_t size() const noexcept;
  bool closed() const noexcept;
  std::size_t hash() const noexcept;

  friend bool operator==(const Term& a, const Term& b);
  // Structural total order (size, then name, then arguments). Independent of
  // any signature; see canonical_less for the declaration-order variant.
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  Kind kind;
  std::string name;
  std::vector<Term> args;
  std::size_t size;
  std::size_t hash;
  bool closed;
};

inline Term Term::var(std::string name) {
  if (name == hole_alias) name = hole_name;
  const std::size_t h = std::hash<std::string>{}(name) * 31 + 7;
  return Term(std::make_shared<const Node>(Node{Kind::var, std::move(name), {}, 1, h, false}));
}

inline Term Term::op(std::string symbol, std::vector<Term> args) {
  std::size_t size = 1;
  std::size_t h = std::hash<std::string>{}(symbol);
  bool closed = true;
  for (const auto& a : args) {
    size += a.size();
    h = h * 1000003u ^ a.hash();
    closed = closed && a.closed();
  }
  return Term(std::make_shared<const Node>(Node{Kind::op, std::move(symbol), std::move(args), size, h, closed}));
}

inline Term::Kind Term::kind() const noexcept { return node_->kind; }
inline bool Term::is_hole() const noexcept { return is_var() && node_->name == hole_name; }
inline const std::string& Term::name() const noexcept { return node_->name; }
inline std::span<const Term> Term::args() const noexcept { return node_->args; }
inline std::size_t Term::size() const noexcept { return node_->size; }
inline bool Term::closed() const noexcept { return node_->closed; }
inline std::size_t Term::hash() const noexcept { return node_->hash; }

inline bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind() || a.name() != b.name()) return false;
  return std::equal(a.args().begin(), a.args().end(), b.args().begin(), b.args().end());
}

inline std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.name() <=> b.name(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.args().begin(), a.args().end(), b.args().begin(),
                                                b.args().end());
}

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

// Finite map from metavariable names to terms.
using Substitution = std::map<std::string, Term, std::less<>>;

// ---------------------------------------------------------------------------
// Inspection

inline void collect_vars(const Term& t, std::set<std::string, std::less<>>& out) {
  if (t.is_var()) {
    out.insert(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

inline std::set<std::string, std::less<>> vars_of(const Term& t) {
  std::set<std::string, std::less<>> out;
  collect_vars(t, out);
  return out;
}

inline std::size_t count_var(const Term& t, std::string_view name) {
  if (t.is_var()) return t.name() == name ? 1 : 0;
  std::size_t n = 0;
  for (const auto& a : t.args()) n += count_var(a, name);
  return n;
}

inline std::size_t term_size(const Term& t) noexcept { return t.size(); }

// Throws TermError if an operation node is not declared in sig or has the
// wrong number of arguments.
inline void check_term(const Term& t, const Signature& sig) {
  if (t.is_var()) return;
  const auto idx = sig.index_of(t.name());
  if (!idx) throw TermError("unknown symbol '" + t.name() + "'");
  const auto arity = sig.symbols()[*idx].arity;
  if (t.args().size() != arity)
    throw TermError("arity mismatch: '" + t.name() + "' expects " + std::to_string(arity) + " argument(s), got " +
                    std::to_string(t.args().size()));
  for (const auto& a : t.args()) check_term(a, sig);
}

// ---------------------------------------------------------------------------
// Substitution

namespace detail {

template <bool Strict>
Term substitute_impl(const Term& t, const Substitution& binding) {
  if (t.is_var()) {
    if (auto it = binding.find(t.name()); it != binding.end()) return it->second;
    if constexpr (Strict) throw TermError("unbound metavariable '" + t.name() + "'");
    return t;
  }
  if (t.closed()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(substitute_impl<Strict>(a, binding));
  return Term::op(t.name(), std::move(args));
}

}  // namespace detail

// Simultaneous replacement of every metavariable; each must be bound.
inline Term substitute(const Term& t, const Substitution& binding) {
  return detail::substitute_impl<true>(t, binding);
}

// As substitute, but metavariables outside the binding's domain are kept.
inline Term substitute_some(const Term& t, const Substitution& binding) {
  return detail::substitute_impl<false>(t, binding);
}

// Replaces every occurrence of one metavariable.
inline Term replace_var(const Term& t, std::string_view name, const Term& with) {
  if (t.is_var()) return t.name() == name ? with : t;
  if (t.closed()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(replace_var(a, name, with));
  return Term::op(t.name(), std::move(args));
}

// ---------------------------------------------------------------------------
// Single-hole contexts

// A term in which the hole occurs at most once.
class Context {
 public:
  explicit Context(Term term) : term_(std::move(term)) {
    if (count_var(term_, hole_name) > 1) throw TermError("context has more than one hole");
  }
  static Context trivial() { return Context(Term::hole()); }

  const Term& term() const noexcept { return term_; }
  bool has_hole() const { return count_var(term_, hole_name) == 1; }

  friend bool operator==(const Context&, const Context&) = default;

 private:
  Term term_;
};

inline Term plug(const Context& c, const Term& t) { return replace_var(c.term(), hole_name, t); }

// compose(c, c')[t] == c[c'[t]].
inline Context compose(const Context& outer, const Context& inner) {
  return Context(replace_var(outer.term(), hole_name, inner.term()));
}

// ---------------------------------------------------------------------------
// Rendering and parsing

// Canonical prefix rendering: `f(a,b)`, constants and variables bare.
inline void render_to(const Term& t, std::string& out) {
  out += t.name();
  if (t.is_var() || t.args().empty()) return;
  out += '(';
  bool first = true;
  for (const auto& a : t.args()) {
    if (!first) out += ',';
    first = false;
    render_to(a, out);
  }
  out += ')';
}

inline std::string render(const Term& t) {
  std::string out;
  render_to(t, out);
  return out;
}

inline constexpr std::string_view app_symbol = "app";
inline constexpr std::string_view choice_symbol = "plus";

namespace detail {

inline bool is_app(const Term& t) { return t.is_op() && t.name() == app_symbol && t.args().size() == 2; }
inline bool is_choice(const Term& t) {
  return t.is_op() && t.name() == choice_symbol && t.args().size() == 2;
}

inline void render_pretty_to(const Term& t, std::string& out);

inline void render_operand(const Term& t, std::string& out, bool parenthesize_app) {
  const bool paren = is_choice(t) || (parenthesize_app && is_app(t));
  if (paren) out += '(';
  render_pretty_to(t, out);
  if (paren) out += ')';
}

inline void render_pretty_to(const Term& t, std::string& out) {
  if (is_app(t)) {
    render_operand(t.arg(0), out, false);
    out += ' ';
    render_operand(t.arg(1), out, true);
    return;
  }
  if (is_choice(t)) {
    render_pretty_to(t.arg(0), out);
    out += " + ";
    const bool paren = is_choice(t.arg(1));
    if (paren) out += '(';
    render_pretty_to(t.arg(1), out);
    if (paren) out += ')';
    return;
  }
  out += t.name();
  if (t.is_var() || t.args().empty()) return;
  out += '(';
  bool first = true;
  for (const auto& a : t.args()) {
    if (!first) out += ", ";
    first = false;
    render_pretty_to(a, out);
  }
  out += ')';
}

}  // namespace detail

// Human-oriented rendering using juxtaposition for `app` and infix `+` for
// `plus`; parses back to the same term under a signature declaring them.
inline std::string render_pretty(const Term& t) {
  std::string out;
  detail::render_pretty_to(t, out);
  return out;
}

enum class VarPolicy { closed, open };

namespace detail {

// Recursive-descent parser for the term grammar:
//   choice ::= apps ('+' apps)*          (when the signature declares plus/2)
//   apps   ::= atom atom*                (juxtaposition, when app/2 is declared)
//   atom   ::= IDENT | IDENT '(' choice (',' choice)* ')' | '(' choice ')'
class TermParser {
 public:
  TermParser(Lexer& lex, const Signature& sig, VarPolicy policy)
      : lex_(lex),
        sig_(sig),
        policy_(policy),
        has_app_(sig.contains(app_symbol) && sig.arity(app_symbol) == 2),
        has_choice_(sig.contains(choice_symbol) && sig.arity(choice_symbol) == 2) {}

  Term parse() { return parse_choice(); }

 private:
  bool atom_follows() const {
    const auto k = lex_.peek().kind;
    return k == Tok::ident || k == Tok::lparen;
  }

  Term parse_choice() {
    Term lhs = parse_apps();
    while (lex_.peek().kind == Tok::plus) {
      if (!has_choice_) lex_.fail("infix choice requires the signature to declare plus/2");
      lex_.next();
      Term rhs = parse_apps();
      lhs = Term::op(std::string(choice_symbol), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Term parse_apps() {
    Term lhs = parse_atom();
    while (atom_follows()) {
      if (!has_app_) lex_.fail("juxtaposition requires the signature to declare app/2");
      Term rhs = parse_atom();
      lhs = Term::op(std::string(app_symbol), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  Term parse_atom() {
    if (lex_.accept(Tok::lparen)) {
      Term t = parse_choice();
      lex_.expect(Tok::rparen, "')'");
      return t;
    }
    const Token id = lex_.expect(Tok::ident, "a term");
    const auto idx = sig_.index_of(id.text);
    if (!idx) {
      if (lex_.peek().kind == Tok::lparen) lex_.fail_at(id.offset, "unknown symbol '" + id.text + "'");
      if (policy_ == VarPolicy::closed) lex_.fail_at(id.offset, "unknown symbol '" + id.text + "'");
      return Term::var(id.text);
    }
    const std::size_t arity = sig_.symbols()[*idx].arity;
    std::vector<Term> args;
    if (lex_.peek().kind == Tok::lparen && arity > 0) {
      lex_.next();
      args.push_back(parse_choice());
      while (lex_.accept(Tok::comma)) args.push_back(parse_choice());
      lex_.expect(Tok::rparen, "')'");
    }
    if (args.size() != arity)
      lex_.fail_at(id.offset, "arity mismatch: '" + id.text + "' expects " + std::to_string(arity) +
                                  " argument(s), got " + std::to_string(args.size()));
    return Term::op(id.text, std::move(args));
  }

  Lexer& lex_;
  const Signature& sig_;
  VarPolicy policy_;
  bool has_app_;
  bool has_choice_;
};

}  // namespace detail

// Parses a term over sig. Identifiers not declared in sig are metavariables,
// allowed only under VarPolicy::open.
inline Term parse_term(std::string_view src, const Signature& sig, VarPolicy policy = VarPolicy::closed) {
  detail::Lexer lex(src);
  Term t = detail::TermParser(lex, sig, policy).parse();
  if (lex.peek().kind != detail::Tok::end) lex.fail("unexpected " + detail::Lexer::describe(lex.peek()));
  return t;
}

inline Context parse_context(std::string_view src, const Signature& sig) {
  return Context(parse_term(src, sig, VarPolicy::open));
}

// ---------------------------------------------------------------------------
// Canonical order and enumeration

// Size-major order, then symbol declaration order, then arguments
// left-to-right under the same order. Variables precede operations.
inline bool canonical_less(const Signature& sig, const Term& a, const Term& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.kind() != b.kind()) return a.is_var();
  if (a.is_var()) return a.name() < b.name();
  if (a.name() != b.name()) {
    const auto ia = sig.index_of(a.name()), ib = sig.index_of(b.name());
    if (ia && ib) return *ia < *ib;
    return a.name() < b.name();
  }
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (canonical_less(sig, a.arg(i), b.arg(i))) return true;
    if (canonical_less(sig, b.arg(i), a.arg(i))) return false;
  }
  return false;
}

// Every closed term of node count <= max_size, in canonical order.
inline std::vector<Term> enumerate_closed(const Signature& sig, std::size_t max_size) {
  if (max_size == 0) throw TermError("max_size must be positive");
  // by_size[s] = all closed terms with exactly s nodes.
  std::vector<std::vector<Term>> by_size(max_size + 1);
  for (std::size_t s = 1; s <= max_size; ++s) {
    auto& bucket = by_size[s];
    for (const auto& sym : sig.symbols()) {
      const std::size_t k = sym.arity;
      if (k == 0) {
        if (s == 1) bucket.push_back(Term::op(sym.name));
        continue;
      }
      if (s < k + 1) continue;
      // Distribute s-1 nodes over k arguments, each getting at least one.
      auto emit_all = [&](const std::vector<std::size_t>& sizes) {
        std::vector<Term> args;
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
          if (i == k) {
            bucket.push_back(Term::op(sym.name, args));
            return;
          }
          for (const auto& t : by_size[sizes[i]]) {
            args.push_back(t);
            rec(i + 1);
            args.pop_back();
          }
        };
        rec(0);
      };
      std::vector<std::size_t> sizes(k);
      std::function<void(std::size_t, std::size_t)> split = [&](std::size_t i, std::size_t remaining) {
        if (i + 1 == k) {
          sizes[i] = remaining;
          emit_all(sizes);
          return;
        }
        for (std::size_t take = 1; take + (k - i - 1) <= remaining; ++take) {
          sizes[i] = take;
          split(i + 1, remaining - take);
        }
      };
      split(0, s - 1);
    }
    std::sort(bucket.begin(), bucket.end(),
              [&](const Term& a, const Term& b) { return canonical_less(sig, a, b); });
  }
  std::vector<Term> out;
  for (std::size_t s = 1; s <= max_size; ++s) out.insert(out.end(), by_size[s].begin(), by_size[s].end());
  return out;
}

}  // namespace hogsos

template <>
struct std::hash<hogsos::Term> {
  std::size_t operator()(const hogsos::Term& t) const noexcept { return t.hash(); }
};
