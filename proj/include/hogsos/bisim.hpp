#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hogsos/engine.hpp"
#include "hogsos/spec.hpp"
#include "hogsos/term.hpp"

namespace hogsos {

enum class MoveKind { reduce, apply, subst, rename };

inline std::string_view to_string(MoveKind m) {
  switch (m) {
    case MoveKind::reduce: return "reduce";
    case MoveKind::apply: return "apply";
    case MoveKind::subst: return "subst";
    case MoveKind::rename: return "rename";
  }
  return "?";
}

// One attacker move in a distinguishing witness. `apply` carries the
// argument, `subst` a closing tuple, `rename` a variable map (position i
// goes to renaming[i]) into a context of size `target`.
template <class T>
struct BasicMove {
  MoveKind kind = MoveKind::reduce;
  std::optional<T> arg;
  std::vector<T> tuple;
  std::vector<std::size_t> renaming;
  std::size_t target = 0;

  static BasicMove reduce() { return {}; }
  static BasicMove apply(T e) { return {MoveKind::apply, std::move(e), {}, {}, 0}; }
  static BasicMove subst(std::vector<T> u) { return {MoveKind::subst, std::nullopt, std::move(u), {}, 0}; }
  static BasicMove rename(std::vector<std::size_t> r, std::size_t m) {
    return {MoveKind::rename, std::nullopt, {}, std::move(r), m};
  }

  friend bool operator==(const BasicMove&, const BasicMove&) = default;
};

enum class Mismatch { kind, nd_unmatched };

inline std::string_view to_string(Mismatch m) { return m == Mismatch::kind ? "kind" : "nd_unmatched"; }

using Move = BasicMove<Term>;

// Attacker tree refuting a nondeterministic pair: the attacker picks
// `choice` on `side`; every same-kind reply of the defender is answered by a
// response (with the argument used, for functions) and a subtree. A node
// with no responses is a choice the defender cannot match at all.
struct NdWitness {
  enum class Side { left, right };
  struct Response {
    Behavior reply;
    std::optional<Term> arg;
    std::shared_ptr<const NdWitness> sub;
  };
  Side side = Side::left;
  Behavior choice = Behavior::stuck();
  std::vector<Response> responses;
  std::size_t cost = 1;
};

template <class T>
struct BasicVerdict {
  bool distinguished = false;
  std::size_t depth = 0;
  std::size_t pool_size = 0;
  std::vector<BasicMove<T>> witness;
  Mismatch mismatch = Mismatch::kind;
  std::shared_ptr<const NdWitness> certificate;  // nondeterministic checks only
  std::size_t tuples_tried = 0;                  // open-term checks only

  bool no_counterexample() const noexcept { return !distinguished; }
};

using Verdict = BasicVerdict<Term>;

struct CheckConfig {
  std::size_t depth = 5;
  std::vector<Term> pool;
};

// enumerate_closed(sig, max_size) followed by extras not already present.
inline std::vector<Term> default_pool(const Signature& sig, std::size_t max_size, const std::vector<Term>& extras = {}) {
  auto pool = enumerate_closed(sig, max_size);
  for (const auto& e : extras)
    if (std::find(pool.begin(), pool.end(), e) == pool.end()) pool.push_back(e);
  return pool;
}

namespace detail {

inline std::size_t hash_mix(std::size_t a, std::size_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

template <class S>
struct PairHash {
  std::size_t operator()(const std::pair<S, S>& k) const {
    return hash_mix(std::hash<S>{}(k.first), std::hash<S>{}(k.second));
  }
};

inline void check_depth(std::size_t depth) {
  if (depth == 0) throw ConfigError("depth must be at least 1");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generic bounded checker

// Bounded on-the-fly bisimulation check over a system providing
//   State, Arg, step(s) (a behaviour with kind()), next(s, b),
//   apply(s, b, e), arguments(s), equal(p, q),
// and optionally
//   extra_moves(p, q, visit) calling visit(move, p2, q2, cost),
// enabled by has_extra_moves.
// Failure witnesses are cached with their depth cost; successes only when
// they do not lean on an assumption further down the stack. One checker can
// serve many queries on the same system.
template <class Sys>
class BoundedChecker {
 public:
  using State = typename Sys::State;
  using Arg = typename Sys::Arg;
  using MoveT = BasicMove<Arg>;

  struct Failure {
    std::size_t cost = 1;
    std::vector<MoveT> reversed;  // last move first
  };

  explicit BoundedChecker(Sys& sys) : sys_(sys) {}

  std::optional<std::vector<MoveT>> run(const State& p, const State& q, std::size_t depth) {
    stack_.clear();
    auto r = go(p, q, depth);
    if (!r.fail) return std::nullopt;
    std::vector<MoveT> moves(r.fail->reversed.rbegin(), r.fail->reversed.rend());
    return moves;
  }

 private:
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  using Key = std::pair<State, State>;

  struct Res {
    std::shared_ptr<const Failure> fail;
    std::size_t low = none;
  };

  static Res ok(std::size_t low = none) { return {nullptr, low}; }

  static std::shared_ptr<const Failure> extend(const Failure& f, MoveT m, std::size_t cost) {
    auto g = std::make_shared<Failure>(f);
    g->reversed.push_back(std::move(m));
    g->cost += cost;
    return g;
  }

  Res go(const State& p, const State& q, std::size_t depth) {
    if (sys_.equal(p, q)) return ok();
    Key key{p, q};
    if (auto it = stack_.find(key); it != stack_.end()) return ok(it->second);
    if (depth == 0) return ok();
    if (auto it = failures_.find(key); it != failures_.end() && it->second->cost <= depth) return {it->second, none};
    if (auto it = successes_.find(key); it != successes_.end() && it->second >= depth) return ok();

    const std::size_t index = stack_.size();
    stack_.emplace(key, index);
    Res res = expand(p, q, depth);
    stack_.erase(key);

    if (res.fail) {
      auto& slot = failures_[key];
      if (!slot || slot->cost > res.fail->cost) slot = res.fail;
      res.low = none;
    } else if (res.low >= index) {
      auto& best = successes_[key];
      best = std::max(best, depth);
      res.low = none;
    }
    return res;
  }

  Res expand(const State& p, const State& q, std::size_t depth) {
    const auto bp = sys_.step(p);
    const auto bq = sys_.step(q);
    std::size_t low = none;
    if (bp.kind() != bq.kind()) return {std::make_shared<Failure>(), none};

    if (bp.is_reduce()) {
      auto r = go(sys_.next(p, bp), sys_.next(q, bq), depth - 1);
      if (r.fail) return {extend(*r.fail, MoveT::reduce(), 1), none};
      low = std::min(low, r.low);
    } else if (bp.is_fun()) {
      const auto& args = sys_.arguments(p);
      if (args.empty()) throw ConfigError("argument pool is empty but both sides are functions");
      for (const auto& e : args) {
        auto r = go(sys_.apply(p, bp, e), sys_.apply(q, bq, e), depth - 1);
        if (r.fail) return {extend(*r.fail, MoveT::apply(e), 1), none};
        low = std::min(low, r.low);
      }
    }

    if constexpr (Sys::has_extra_moves) {
      std::shared_ptr<const Failure> found;
      sys_.extra_moves(p, q, [&](MoveT m, const State& p2, const State& q2, std::size_t cost) {
        if (found || cost > depth) return;
        auto r = go(p2, q2, depth - cost);
        if (r.fail)
          found = extend(*r.fail, std::move(m), cost);
        else
          low = std::min(low, r.low);
      });
      if (found) return {found, none};
    }
    return ok(low);
  }

  Sys& sys_;
  std::unordered_map<Key, std::size_t, detail::PairHash<State>> stack_;
  std::unordered_map<Key, std::shared_ptr<const Failure>, detail::PairHash<State>> failures_;
  std::unordered_map<Key, std::size_t, detail::PairHash<State>> successes_;
};

// Replays a witness against a system; true iff every move is enabled on
// both sides and the final pair differs in kind.
template <class Sys>
bool replay_with(Sys& sys, typename Sys::State p, typename Sys::State q,
                 const std::vector<BasicMove<typename Sys::Arg>>& moves) {
  for (const auto& m : moves) {
    const auto bp = sys.step(p);
    const auto bq = sys.step(q);
    switch (m.kind) {
      case MoveKind::reduce:
        if (!bp.is_reduce() || !bq.is_reduce()) return false;
        p = sys.next(p, bp);
        q = sys.next(q, bq);
        break;
      case MoveKind::apply:
        if (!bp.is_fun() || !bq.is_fun() || !m.arg) return false;
        p = sys.apply(p, bp, *m.arg);
        q = sys.apply(q, bq, *m.arg);
        break;
      case MoveKind::subst:
      case MoveKind::rename:
        if constexpr (Sys::has_extra_moves) {
          auto p2 = sys.replay_extra(m, p);
          auto q2 = sys.replay_extra(m, q);
          if (!p2 || !q2) return false;
          p = std::move(*p2);
          q = std::move(*q2);
        } else {
          return false;
        }
        break;
    }
  }
  return sys.step(p).kind() != sys.step(q).kind();
}

// ---------------------------------------------------------------------------
// First-order systems

struct XclSystem {
  using State = Term;
  using Arg = Term;
  static constexpr bool has_extra_moves = false;

  Engine& engine;
  const std::vector<Term>& pool;

  const Behavior& step(const Term& t) { return engine.step(t); }
  const Term& next(const Term&, const Behavior& b) const { return b.next(); }
  Term apply(const Term&, const Behavior& b, const Term& e) const { return apply_fun(b, e); }
  const std::vector<Term>& arguments(const Term&) const { return pool; }
  static bool equal(const Term& a, const Term& b) { return a == b; }
};

inline void require_closed(const HOSpec& spec, const Term& t) {
  check_term(t, spec.sig());
  if (!t.closed()) throw TermError("term is not closed: " + render(t));
}

// Deterministic bounded check sharing one engine and checker across calls.
class Checker {
 public:
  Checker(const HOSpec& spec, CheckConfig cfg)
      : spec_(spec), cfg_(std::move(cfg)), engine_(spec), sys_{engine_, cfg_.pool}, checker_(sys_) {
    detail::check_depth(cfg_.depth);
    if (spec.mode() != Mode::det) throw ConfigError("deterministic check needs a det spec");
  }

  Verdict check(const Term& p, const Term& q) {
    require_closed(spec_, p);
    require_closed(spec_, q);
    Verdict v;
    v.depth = cfg_.depth;
    v.pool_size = cfg_.pool.size();
    if (auto w = checker_.run(p, q, cfg_.depth)) {
      v.distinguished = true;
      v.witness = std::move(*w);
    }
    return v;
  }

  Engine& engine() noexcept { return engine_; }
  const CheckConfig& config() const noexcept { return cfg_; }

 private:
  const HOSpec& spec_;
  CheckConfig cfg_;
  Engine engine_;
  XclSystem sys_;
  BoundedChecker<XclSystem> checker_;
};

inline Verdict check(const HOSpec& spec, const Term& p, const Term& q, const CheckConfig& cfg) {
  return Checker(spec, cfg).check(p, q);
}

inline bool replay(const HOSpec& spec, const Term& p, const Term& q, const std::vector<Move>& moves) {
  Engine engine(spec);
  std::vector<Term> no_pool;
  XclSystem sys{engine, no_pool};
  return replay_with(sys, p, q, moves);
}

// ---------------------------------------------------------------------------
// Nondeterministic check

class NdChecker {
 public:
  NdChecker(const HOSpec& spec, CheckConfig cfg) : spec_(spec), cfg_(std::move(cfg)), engine_(spec) {
    detail::check_depth(cfg_.depth);
  }

  Verdict check(const Term& p, const Term& q) {
    require_closed(spec_, p);
    require_closed(spec_, q);
    stack_.clear();
    Verdict v;
    v.depth = cfg_.depth;
    v.pool_size = cfg_.pool.size();
    v.mismatch = Mismatch::nd_unmatched;
    if (auto r = go(p, q, cfg_.depth); r.fail) {
      v.distinguished = true;
      v.certificate = r.fail;
      v.witness = principal_path(*r.fail);
    }
    return v;
  }

  // Along the first response of every node.
  static std::vector<Move> principal_path(const NdWitness& w) {
    std::vector<Move> out;
    for (const NdWitness* n = &w; n;) {
      if (n->choice.is_reduce())
        out.push_back(Move::reduce());
      else if (n->choice.is_fun() && !n->responses.empty())
        out.push_back(Move::apply(*n->responses.front().arg));
      n = n->responses.empty() ? nullptr : n->responses.front().sub.get();
    }
    return out;
  }

  Engine& engine() noexcept { return engine_; }

 private:
  static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  using Key = std::pair<Term, Term>;
  using Node = std::shared_ptr<const NdWitness>;

  struct Res {
    Node fail;
    std::size_t low = none;
  };

  Res go(const Term& p, const Term& q, std::size_t depth) {
    if (p == q) return {};
    Key key{p, q};
    if (auto it = stack_.find(key); it != stack_.end()) return {nullptr, it->second};
    if (depth == 0) return {};
    if (auto it = failures_.find(key); it != failures_.end() && it->second->cost <= depth) return {it->second};
    if (auto it = successes_.find(key); it != successes_.end() && it->second >= depth) return {};

    const std::size_t index = stack_.size();
    stack_.emplace(key, index);
    Res res = expand(p, q, depth);
    stack_.erase(key);
    if (res.fail) {
      auto& slot = failures_[key];
      if (!slot || slot->cost > res.fail->cost) slot = res.fail;
      res.low = none;
    } else if (res.low >= index) {
      auto& best = successes_[key];
      best = std::max(best, depth);
      res.low = none;
    }
    return res;
  }

  Res expand(const Term& p, const Term& q, std::size_t depth) {
    const BehaviorSet left = engine_.step_nd(p);
    const BehaviorSet right = engine_.step_nd(q);
    std::size_t low = none;
    for (auto side : {NdWitness::Side::left, NdWitness::Side::right}) {
      const bool from_left = side == NdWitness::Side::left;
      const auto& attacker = from_left ? left : right;
      const auto& defender = from_left ? right : left;
      for (const auto& a : attacker) {
        auto node = std::make_shared<NdWitness>();
        node->side = side;
        node->choice = a;
        bool matched = false;
        for (const auto& b : defender) {
          if (b.kind() != a.kind()) continue;
          if (a.is_stuck()) {
            matched = true;
            break;
          }
          auto attempt = match(a, b, from_left, depth, low);
          if (!attempt.sub) {
            matched = true;
            break;
          }
          node->cost = std::max(node->cost, attempt.sub->cost + 1);
          node->responses.push_back(std::move(attempt));
        }
        if (!matched) return {node};
      }
    }
    return {nullptr, low};
  }

  // Empty `sub` means b answers a at this depth.
  NdWitness::Response match(const Behavior& a, const Behavior& b, bool from_left, std::size_t depth, std::size_t& low) {
    auto oriented = [&](const Term& x, const Term& y) { return from_left ? go(x, y, depth - 1) : go(y, x, depth - 1); };
    if (a.is_reduce()) {
      auto r = oriented(a.next(), b.next());
      if (r.fail) return {b, std::nullopt, r.fail};
      low = std::min(low, r.low);
      return {b, std::nullopt, nullptr};
    }
    if (cfg_.pool.empty()) throw ConfigError("argument pool is empty but both sides are functions");
    for (const auto& e : cfg_.pool) {
      auto r = oriented(apply_fun(a, e), apply_fun(b, e));
      if (r.fail) return {b, e, r.fail};
      low = std::min(low, r.low);
    }
    return {b, std::nullopt, nullptr};
  }

  const HOSpec& spec_;
  CheckConfig cfg_;
  Engine engine_;
  std::unordered_map<Key, std::size_t, detail::PairHash<Term>> stack_;
  std::unordered_map<Key, Node, detail::PairHash<Term>> failures_;
  std::unordered_map<Key, std::size_t, detail::PairHash<Term>> successes_;
};

inline Verdict check_nd(const HOSpec& spec, const Term& p, const Term& q, const CheckConfig& cfg) {
  return NdChecker(spec, cfg).check(p, q);
}

// Verifies an attacker tree against the engine.
inline bool replay_nd(Engine& engine, const Term& p, const Term& q, const NdWitness& w) {
  const BehaviorSet left = engine.step_nd(p);
  const BehaviorSet right = engine.step_nd(q);
  const bool from_left = w.side == NdWitness::Side::left;
  const auto& attacker = from_left ? left : right;
  const auto& defender = from_left ? right : left;
  if (std::find(attacker.begin(), attacker.end(), w.choice) == attacker.end()) return false;
  for (const auto& b : defender) {
    if (b.kind() != w.choice.kind()) continue;
    auto it = std::find_if(w.responses.begin(), w.responses.end(), [&](const auto& r) { return r.reply == b; });
    if (it == w.responses.end() || !it->sub) return false;
    if (b.is_stuck() || (b.is_fun() && !it->arg)) return false;
    const Term x = b.is_reduce() ? w.choice.next() : apply_fun(w.choice, *it->arg);
    const Term y = b.is_reduce() ? b.next() : apply_fun(b, *it->arg);
    if (!(from_left ? replay_nd(engine, x, y, *it->sub) : replay_nd(engine, y, x, *it->sub))) return false;
  }
  return true;
}

inline bool replay_nd(const HOSpec& spec, const Term& p, const Term& q, const NdWitness& w) {
  Engine engine(spec);
  return replay_nd(engine, p, q, w);
}

// ---------------------------------------------------------------------------
// Congruence probe

// mt19937_64 with an unbiased bounded draw that does not depend on the
// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ConfigError("empty range");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x;
    do x = gen_();
    while (x > limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

struct ProbeConfig {
  std::size_t n_contexts = 100;
  std::size_t ctx_size = 5;
  std::uint64_t seed = 0;
};

template <class T>
struct BasicAnomaly {
  std::string context;
  BasicVerdict<T> verdict;
};

template <class T>
struct BasicProbeReport {
  std::vector<BasicAnomaly<T>> anomalies;
  std::size_t contexts_tried = 0;
  std::uint64_t seed = 0;
  std::optional<BasicVerdict<T>> refused;  // set when the inputs are already distinguished
};

using ProbeReport = BasicProbeReport<Term>;

inline void check_probe_config(const ProbeConfig& pc) {
  if (pc.n_contexts == 0) throw ConfigError("number of contexts must be positive");
  if (pc.ctx_size == 0) throw ConfigError("context size must be positive");
}

// Random single-hole context of size at most ctx_size: the hole, wrapped
// repeatedly in some operator whose other operands come from `fillers`.
inline Context sample_context(Rng& rng, const Signature& sig, const std::vector<Term>& fillers, std::size_t ctx_size) {
  std::vector<const Signature::Symbol*> wrappers;
  for (const auto& s : sig.symbols())
    if (s.arity > 0) wrappers.push_back(&s);
  const std::size_t target = 1 + rng.below(ctx_size);
  Term c = Term::hole();
  if (wrappers.empty()) return Context(c);
  for (std::size_t misses = 0; c.size() < target && misses < 8;) {
    const auto& f = *wrappers[rng.below(wrappers.size())];
    const std::size_t pos = rng.below(f.arity);
    if (f.arity > 1 && fillers.empty()) {
      ++misses;
      continue;
    }
    std::vector<Term> args;
    std::size_t size = 1;
    for (std::size_t i = 0; i < f.arity; ++i) {
      args.push_back(i == pos ? c : fillers[rng.below(fillers.size())]);
      size += args.back().size();
    }
    if (size > target) {
      ++misses;
      continue;
    }
    c = Term::op(f.name, std::move(args));
  }
  return Context(c);
}

// Checks C[p] against C[q] for sampled contexts C. Deterministic or
// nondeterministic checking follows the spec's mode.
inline ProbeReport congruence_probe(const HOSpec& spec, const Term& p, const Term& q, const ProbeConfig& pc,
                                    const CheckConfig& cfg) {
  check_probe_config(pc);
  ProbeReport report;
  report.seed = pc.seed;
  std::function<Verdict(const Term&, const Term&)> run;
  std::optional<Checker> det;
  std::optional<NdChecker> nd;
  if (spec.mode() == Mode::det) {
    det.emplace(spec, cfg);
    run = [&](const Term& a, const Term& b) { return det->check(a, b); };
  } else {
    nd.emplace(spec, cfg);
    run = [&](const Term& a, const Term& b) { return nd->check(a, b); };
  }
  if (auto v = run(p, q); v.distinguished) {
    report.refused = std::move(v);
    return report;
  }
  Rng rng(pc.seed);
  for (std::size_t k = 0; k < pc.n_contexts; ++k) {
    const Context c = sample_context(rng, spec.sig(), cfg.pool, pc.ctx_size);
    ++report.contexts_tried;
    auto v = run(plug(c, p), plug(c, q));
    if (v.distinguished) report.anomalies.push_back({render_pretty(c.term()), std::move(v)});
  }
  return report;
}

}  // namespace hogsos
