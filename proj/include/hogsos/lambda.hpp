#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hogsos/behavior.hpp"
#include "hogsos/detail/lexer.hpp"
#include "hogsos/engine.hpp"
#include "hogsos/error.hpp"

namespace hogsos {

// De Bruijn body. Inside a binder index 0 is the bound variable; at the top
// level index i is context position i.
class DbTerm {
 public:
  enum class Kind { var, lam, app };

  static DbTerm var(std::size_t i);
  static DbTerm lam(DbTerm body);
  static DbTerm app(DbTerm f, DbTerm a);

  Kind kind() const noexcept;
  bool is_var() const noexcept { return kind() == Kind::var; }
  bool is_lam() const noexcept { return kind() == Kind::lam; }
  bool is_app() const noexcept { return kind() == Kind::app; }

  std::size_t index() const;
  const DbTerm& body() const;
  const DbTerm& fun() const;
  const DbTerm& arg() const;

  std::size_t size() const noexcept;
  std::size_t hash() const noexcept;
  // Least context size in which the term is well formed.
  std::size_t bound() const noexcept;

  friend bool operator==(const DbTerm& a, const DbTerm& b);
  // Canonical order: Var < Lam < App, then indices, then children.
  friend std::strong_ordering operator<=>(const DbTerm& a, const DbTerm& b);

 private:
  struct Node;

  static std::size_t mix(std::size_t a, std::size_t b) { return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)); }

  explicit DbTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct DbTerm::Node {
  Kind kind = Kind::var;
  std::size_t index = 0;
  std::optional<DbTerm> left, right;
  std::size_t size = 1;
  std::size_t hash = 0;
  std::size_t bound = 0;
};

inline DbTerm DbTerm::var(std::size_t i) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::var;
  n->index = i;
  n->bound = i + 1;
  n->hash = std::hash<std::size_t>{}(i) * 0x9e3779b97f4a7c15ULL + 1;
  return DbTerm(std::move(n));
}

inline DbTerm DbTerm::lam(DbTerm body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::lam;
  n->size = 1 + body.size();
  n->bound = body.bound() == 0 ? 0 : body.bound() - 1;
  n->hash = mix(0x51ed27, body.hash());
  n->left = std::move(body);
  return DbTerm(std::move(n));
}

inline DbTerm DbTerm::app(DbTerm f, DbTerm a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::app;
  n->size = 1 + f.size() + a.size();
  n->bound = std::max(f.bound(), a.bound());
  n->hash = mix(mix(0x2545f4, f.hash()), a.hash());
  n->left = std::move(f);
  n->right = std::move(a);
  return DbTerm(std::move(n));
}

inline DbTerm::Kind DbTerm::kind() const noexcept { return node_->kind; }
inline std::size_t DbTerm::index() const { return node_->index; }
inline const DbTerm& DbTerm::body() const { return *node_->left; }
inline const DbTerm& DbTerm::fun() const { return *node_->left; }
inline const DbTerm& DbTerm::arg() const { return *node_->right; }
inline std::size_t DbTerm::size() const noexcept { return node_->size; }
inline std::size_t DbTerm::hash() const noexcept { return node_->hash; }
inline std::size_t DbTerm::bound() const noexcept { return node_->bound; }

inline bool operator==(const DbTerm& a, const DbTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case DbTerm::Kind::var: return a.index() == b.index();
    case DbTerm::Kind::lam: return a.body() == b.body();
    case DbTerm::Kind::app: return a.fun() == b.fun() && a.arg() == b.arg();
  }
  return false;
}

inline std::strong_ordering operator<=>(const DbTerm& a, const DbTerm& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case DbTerm::Kind::var: return a.index() <=> b.index();
    case DbTerm::Kind::lam: return a.body() <=> b.body();
    case DbTerm::Kind::app:
      if (auto c = a.fun() <=> b.fun(); c != 0) return c;
      return a.arg() <=> b.arg();
  }
  return std::strong_ordering::equal;
}

// A term of Λ(ctx).
class LambdaTerm {
 public:
  LambdaTerm(std::size_t ctx, DbTerm body) : ctx_(ctx), body_(std::move(body)) {
    if (body_.bound() > ctx_)
      throw TermError("index " + std::to_string(body_.bound() - 1) + " out of range for context " + std::to_string(ctx_));
  }

  static LambdaTerm var(std::size_t ctx, std::size_t i) { return {ctx, DbTerm::var(i)}; }
  static LambdaTerm lam(const LambdaTerm& body) {
    if (body.ctx() == 0) throw TermError("abstraction body needs a non-empty context");
    return {body.ctx() - 1, DbTerm::lam(body.body())};
  }
  static LambdaTerm app(const LambdaTerm& f, const LambdaTerm& a) {
    if (f.ctx() != a.ctx()) throw TermError("application of terms in different contexts");
    return {f.ctx(), DbTerm::app(f.body(), a.body())};
  }

  std::size_t ctx() const noexcept { return ctx_; }
  const DbTerm& body() const noexcept { return body_; }
  bool closed() const noexcept { return ctx_ == 0; }
  std::size_t size() const noexcept { return body_.size(); }

  friend bool operator==(const LambdaTerm&, const LambdaTerm&) = default;
  friend std::strong_ordering operator<=>(const LambdaTerm& a, const LambdaTerm& b) {
    if (auto c = a.ctx_ <=> b.ctx_; c != 0) return c;
    return a.body_ <=> b.body_;
  }

 private:
  std::size_t ctx_;
  DbTerm body_;
};

}  // namespace hogsos

template <>
struct std::hash<hogsos::DbTerm> {
  std::size_t operator()(const hogsos::DbTerm& t) const noexcept { return t.hash(); }
};

template <>
struct std::hash<hogsos::LambdaTerm> {
  std::size_t operator()(const hogsos::LambdaTerm& t) const noexcept { return t.body().hash() * 31 + t.ctx(); }
};

namespace hogsos {

using LambdaBehavior = BasicBehavior<LambdaTerm>;

// ---------------------------------------------------------------------------
// Renaming and substitution

namespace detail {

inline DbTerm rename_at(const DbTerm& t, const std::vector<std::size_t>& r, std::size_t k) {
  if (t.bound() <= k) return t;
  switch (t.kind()) {
    case DbTerm::Kind::var: return DbTerm::var(r[t.index() - k] + k);
    case DbTerm::Kind::lam: return DbTerm::lam(rename_at(t.body(), r, k + 1));
    case DbTerm::Kind::app: return DbTerm::app(rename_at(t.fun(), r, k), rename_at(t.arg(), r, k));
  }
  return t;
}

inline DbTerm shift_by(const DbTerm& t, std::size_t by, std::size_t k = 0) {
  if (by == 0 || t.bound() <= k) return t;
  switch (t.kind()) {
    case DbTerm::Kind::var: return DbTerm::var(t.index() + by);
    case DbTerm::Kind::lam: return DbTerm::lam(shift_by(t.body(), by, k + 1));
    case DbTerm::Kind::app: return DbTerm::app(shift_by(t.fun(), by, k), shift_by(t.arg(), by, k));
  }
  return t;
}

inline DbTerm subst_at(const DbTerm& t, const std::vector<DbTerm>& u, std::size_t k) {
  if (t.bound() <= k) return t;
  switch (t.kind()) {
    case DbTerm::Kind::var: return shift_by(u[t.index() - k], k);
    case DbTerm::Kind::lam: return DbTerm::lam(subst_at(t.body(), u, k + 1));
    case DbTerm::Kind::app: return DbTerm::app(subst_at(t.fun(), u, k), subst_at(t.arg(), u, k));
  }
  return t;
}

// Replaces index k by e (shifted under binders) and closes the gap above it.
inline DbTerm instantiate_at(const DbTerm& t, const DbTerm& e, std::size_t k) {
  if (t.bound() <= k) return t;
  switch (t.kind()) {
    case DbTerm::Kind::var:
      if (t.index() == k) return shift_by(e, k);
      return DbTerm::var(t.index() - 1);
    case DbTerm::Kind::lam: return DbTerm::lam(instantiate_at(t.body(), e, k + 1));
    case DbTerm::Kind::app: return DbTerm::app(instantiate_at(t.fun(), e, k), instantiate_at(t.arg(), e, k));
  }
  return t;
}

}  // namespace detail

// Functorial action of r : n -> m.
inline LambdaTerm rename(const LambdaTerm& t, const std::vector<std::size_t>& r, std::size_t m) {
  if (r.size() != t.ctx()) throw TermError("renaming has " + std::to_string(r.size()) + " entries for context " +
                                           std::to_string(t.ctx()));
  for (auto v : r)
    if (v >= m) throw TermError("renaming target " + std::to_string(v) + " out of range " + std::to_string(m));
  return {m, detail::rename_at(t.body(), r, 0)};
}

inline std::vector<std::size_t> identity_renaming(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

// Inclusion Λ(n) -> Λ(m), m >= n; positions keep their index.
inline LambdaTerm weaken(const LambdaTerm& t, std::size_t m) {
  if (m < t.ctx()) throw TermError("cannot weaken into a smaller context");
  return {m, t.body()};
}

// Λ(n) -> Λ(n+1), i -> i+1, freeing position 0.
inline LambdaTerm shift(const LambdaTerm& t) { return {t.ctx() + 1, detail::shift_by(t.body(), 1)}; }

// t[u_0, ..., u_{n-1}]; all u_i in Λ(m). `m` is needed only when n = 0.
inline LambdaTerm subst_sim(const LambdaTerm& t, const std::vector<LambdaTerm>& u,
                            std::optional<std::size_t> m = std::nullopt) {
  if (u.size() != t.ctx())
    throw TermError("substitution of length " + std::to_string(u.size()) + " for context " + std::to_string(t.ctx()));
  const std::size_t target = m ? *m : (u.empty() ? 0 : u.front().ctx());
  std::vector<DbTerm> bodies;
  bodies.reserve(u.size());
  for (const auto& x : u) {
    if (x.ctx() != target) throw TermError("substitution terms live in different contexts");
    bodies.push_back(x.body());
  }
  return {target, detail::subst_at(t.body(), bodies, 0)};
}

// Applies a function body b ∈ Λ(n+1) to e ∈ Λ(n).
inline LambdaTerm beta(const LambdaTerm& b, const LambdaTerm& e) {
  if (b.ctx() != e.ctx() + 1) throw TermError("argument context does not match function body");
  return {e.ctx(), detail::instantiate_at(b.body(), e.body(), 0)};
}

// ---------------------------------------------------------------------------
// Steppers

enum class Strategy { cbn, cbv };

inline std::string_view to_string(Strategy s) { return s == Strategy::cbn ? "cbn" : "cbv"; }

// Memoizing stepper for one session.
class LambdaEngine {
 public:
  explicit LambdaEngine(Strategy s) : strategy_(s) {}

  Strategy strategy() const noexcept { return strategy_; }

  const LambdaBehavior& step(const LambdaTerm& t) {
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    LambdaBehavior b = compute(t);
    return memo_.emplace(t, std::move(b)).first->second;
  }

 private:
  LambdaBehavior compute(const LambdaTerm& t) {
    const DbTerm& x = t.body();
    const std::size_t n = t.ctx();
    switch (x.kind()) {
      case DbTerm::Kind::var: return LambdaBehavior::stuck();
      case DbTerm::Kind::lam: return LambdaBehavior::fun({n + 1, x.body()});
      case DbTerm::Kind::app: break;
    }
    const LambdaTerm t1{n, x.fun()};
    const LambdaTerm t2{n, x.arg()};
    const LambdaBehavior b1 = step(t1);
    if (b1.is_stuck()) return LambdaBehavior::stuck();
    if (b1.is_reduce()) return LambdaBehavior::reduce({n, DbTerm::app(b1.next().body(), x.arg())});
    if (strategy_ == Strategy::cbv) {
      const LambdaBehavior b2 = step(t2);
      if (b2.is_reduce()) return LambdaBehavior::reduce({n, DbTerm::app(x.fun(), b2.next().body())});
    }
    return LambdaBehavior::reduce(beta(b1.body(), t2));
  }

  Strategy strategy_;
  std::unordered_map<LambdaTerm, LambdaBehavior> memo_;
};

inline LambdaBehavior step_cbn(const LambdaTerm& t) { return LambdaEngine(Strategy::cbn).step(t); }
inline LambdaBehavior step_cbv(const LambdaTerm& t) { return LambdaEngine(Strategy::cbv).step(t); }

using LambdaTraceEvent = BasicTraceEvent<LambdaTerm>;
using LambdaTrace = BasicTrace<LambdaTerm>;

inline LambdaTrace trace(LambdaEngine& engine, const LambdaTerm& t, std::size_t max_steps) {
  return trace_with<LambdaTerm>(t, max_steps, [&](const LambdaTerm& s) { return engine.step(s); });
}

// ---------------------------------------------------------------------------
// Named syntax

// Free variable names by position: a, b, ..., z, a1, b1, ...
inline std::string free_name(std::size_t i) {
  std::string s(1, static_cast<char>('a' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

inline std::vector<std::string> free_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(free_name(i));
  return out;
}

namespace detail {

inline std::string binder_name(std::size_t depth) {
  static constexpr std::string_view base[] = {"x", "y", "z", "w", "u", "v"};
  std::string s(base[depth % 6]);
  if (depth >= 6) s += std::to_string(depth / 6);
  return s;
}

inline void render_named(const DbTerm& t, std::size_t depth, std::string& out) {
  switch (t.kind()) {
    case DbTerm::Kind::var:
      out += t.index() < depth ? binder_name(depth - 1 - t.index()) : free_name(t.index() - depth);
      return;
    case DbTerm::Kind::lam:
      out += "\\" + binder_name(depth) + ". ";
      render_named(t.body(), depth + 1, out);
      return;
    case DbTerm::Kind::app: {
      const bool paren_fun = t.fun().is_lam();
      if (paren_fun) out += '(';
      render_named(t.fun(), depth, out);
      if (paren_fun) out += ')';
      out += ' ';
      const bool paren_arg = !t.arg().is_var();
      if (paren_arg) out += '(';
      render_named(t.arg(), depth, out);
      if (paren_arg) out += ')';
      return;
    }
  }
}

inline void render_db(const DbTerm& t, std::string& out) {
  switch (t.kind()) {
    case DbTerm::Kind::var: out += "@" + std::to_string(t.index()); return;
    case DbTerm::Kind::lam:
      out += "lam(";
      render_db(t.body(), out);
      out += ')';
      return;
    case DbTerm::Kind::app:
      out += "app(";
      render_db(t.fun(), out);
      out += ',';
      render_db(t.arg(), out);
      out += ')';
      return;
  }
}

class NamedParser {
 public:
  NamedParser(std::string_view src, std::vector<std::string>& free, bool allow_free)
      : lex_(src), free_(free), allow_free_(allow_free) {}

  DbTerm parse() {
    DbTerm t = term();
    if (lex_.peek().kind != Tok::end) lex_.fail("unexpected " + Lexer::describe(lex_.peek()));
    return t;
  }

 private:
  bool atom_start() const {
    const auto k = lex_.peek().kind;
    return k == Tok::ident || k == Tok::lparen || k == Tok::backslash;
  }

  DbTerm term() {
    DbTerm t = atom();
    while (atom_start()) {
      if (lex_.peek().kind == Tok::backslash) return DbTerm::app(t, atom());
      t = DbTerm::app(t, atom());
    }
    return t;
  }

  DbTerm atom() {
    const Token tok = lex_.next();
    switch (tok.kind) {
      case Tok::ident: return variable(tok);
      case Tok::lparen: {
        DbTerm t = term();
        lex_.expect(Tok::rparen, "')'");
        return t;
      }
      case Tok::backslash: {
        const Token name = lex_.expect(Tok::ident, "binder name");
        lex_.expect(Tok::dot, "'.'");
        bound_.push_back(name.text);
        DbTerm body = term();
        bound_.pop_back();
        return DbTerm::lam(std::move(body));
      }
      default: lex_.fail_at(tok.offset, "expected a term, found " + Lexer::describe(tok));
    }
  }

  DbTerm variable(const Token& tok) {
    for (std::size_t k = bound_.size(); k-- > 0;)
      if (bound_[k] == tok.text) return DbTerm::var(bound_.size() - 1 - k);
    auto it = std::find(free_.begin(), free_.end(), tok.text);
    if (it == free_.end()) {
      if (!allow_free_) lex_.fail_at(tok.offset, "unbound variable '" + tok.text + "'");
      free_.push_back(tok.text);
      it = free_.end() - 1;
    }
    return DbTerm::var(bound_.size() + static_cast<std::size_t>(it - free_.begin()));
  }

  Lexer lex_;
  std::vector<std::string>& free_;
  bool allow_free_;
  std::vector<std::string> bound_;
};

class DbParser {
 public:
  explicit DbParser(std::string_view src) : lex_(src) {}

  LambdaTerm parse() {
    std::size_t ctx = 0;
    if (lex_.peek().kind == Tok::ident && lex_.peek().text == "ctx") {
      lex_.next();
      lex_.expect(Tok::equals, "'='");
      ctx = std::stoul(lex_.expect(Tok::nat, "context size").text);
    }
    const std::size_t start = lex_.peek().offset;
    DbTerm t = term();
    if (lex_.peek().kind != Tok::end) lex_.fail("unexpected " + Lexer::describe(lex_.peek()));
    if (t.bound() > ctx) lex_.fail_at(start, "free index " + std::to_string(t.bound() - 1) + " needs ctx=" +
                                                 std::to_string(t.bound()) + " or more");
    return {ctx, t};
  }

 private:
  DbTerm term() {
    const Token tok = lex_.next();
    if (tok.kind == Tok::at) return DbTerm::var(std::stoul(lex_.expect(Tok::nat, "index").text));
    if (tok.kind == Tok::ident && tok.text == "lam") {
      lex_.expect(Tok::lparen, "'('");
      DbTerm b = term();
      lex_.expect(Tok::rparen, "')'");
      return DbTerm::lam(std::move(b));
    }
    if (tok.kind == Tok::ident && tok.text == "app") {
      lex_.expect(Tok::lparen, "'('");
      DbTerm f = term();
      lex_.expect(Tok::comma, "','");
      DbTerm a = term();
      lex_.expect(Tok::rparen, "')'");
      return DbTerm::app(std::move(f), std::move(a));
    }
    lex_.fail_at(tok.offset, "expected '@N', 'lam' or 'app', found " + Lexer::describe(tok));
  }

  Lexer lex_;
};

}  // namespace detail

inline std::string render_lambda(const LambdaTerm& t) {
  std::string out;
  detail::render_named(t.body(), 0, out);
  return out;
}

inline std::string render_debruijn(const LambdaTerm& t, bool header = true) {
  std::string out;
  if (header && t.ctx() > 0) out += "ctx=" + std::to_string(t.ctx()) + " ";
  detail::render_db(t.body(), out);
  return out;
}

enum class LambdaSyntax { named, debruijn };

// Named parsing with an explicit free-name table. Names already in `free`
// keep their positions; new ones are appended in first-use order unless
// allow_free is false. The context is the table's final size.
inline LambdaTerm parse_lambda(std::string_view src, std::vector<std::string>& free, bool allow_free = true) {
  DbTerm body = detail::NamedParser(src, free, allow_free).parse();
  return {free.size(), std::move(body)};
}

inline LambdaTerm parse_lambda(std::string_view src, LambdaSyntax syntax = LambdaSyntax::named) {
  if (syntax == LambdaSyntax::debruijn) return detail::DbParser(src).parse();
  std::vector<std::string> free;
  return parse_lambda(src, free);
}

// Two terms over one shared free-name table, both in the joint context.
inline std::pair<LambdaTerm, LambdaTerm> parse_lambda_pair(std::string_view a, std::string_view b) {
  std::vector<std::string> free;
  auto ta = parse_lambda(a, free);
  auto tb = parse_lambda(b, free);
  return {weaken(ta, free.size()), tb};
}

// Ω = (λx.x x)(λx.x x); Θ = B B with B = λx.x x x.
inline LambdaTerm omega() {
  const DbTerm d = DbTerm::lam(DbTerm::app(DbTerm::var(0), DbTerm::var(0)));
  return {0, DbTerm::app(d, d)};
}

inline LambdaTerm theta() {
  const DbTerm b = DbTerm::lam(DbTerm::app(DbTerm::app(DbTerm::var(0), DbTerm::var(0)), DbTerm::var(0)));
  return {0, DbTerm::app(b, b)};
}

inline std::optional<LambdaTerm> lambda_alias(std::string_view name) {
  if (name == "OMEGA") return omega();
  if (name == "THETA") return theta();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

inline const std::vector<DbTerm>& db_of_size(std::size_t n, std::size_t size,
                                             std::vector<std::vector<std::vector<DbTerm>>>& table) {
  // table[n][size] for context n
  if (table.size() <= n) table.resize(n + 1);
  auto& row = table[n];
  if (row.size() <= size) row.resize(size + 1);
  static const std::vector<DbTerm> empty;
  if (size == 0) return empty;
  if (!row[size].empty() || size == 1) {
    if (size == 1 && row[1].empty())
      for (std::size_t i = 0; i < n; ++i) row[1].push_back(DbTerm::var(i));
    return row[size];
  }
  std::vector<DbTerm> out;
  for (const auto& b : db_of_size(n + 1, size - 1, table)) out.push_back(DbTerm::lam(b));
  for (std::size_t ls = 1; ls + 1 < size; ++ls) {
    const auto fs = db_of_size(n, ls, table);
    const auto as = db_of_size(n, size - 1 - ls, table);
    for (const auto& f : fs)
      for (const auto& a : as) out.push_back(DbTerm::app(f, a));
  }
  table[n][size] = std::move(out);
  return table[n][size];
}

}  // namespace detail

// All terms of Λ(n) with at most max_size nodes, ordered by size and then
// canonically.
inline std::vector<LambdaTerm> enumerate_lambda(std::size_t n, std::size_t max_size) {
  std::vector<std::vector<std::vector<DbTerm>>> table;
  std::vector<LambdaTerm> out;
  for (std::size_t s = 1; s <= max_size; ++s) {
    auto bucket = detail::db_of_size(n, s, table);
    std::sort(bucket.begin(), bucket.end());
    for (auto& b : bucket) out.emplace_back(n, std::move(b));
  }
  return out;
}

}  // namespace hogsos
