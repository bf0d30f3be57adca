#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hogsos/bisim.hpp"
#include "hogsos/lambda.hpp"

namespace hogsos {

using LambdaMove = BasicMove<LambdaTerm>;
using LambdaVerdict = BasicVerdict<LambdaTerm>;
using LambdaProbeReport = BasicProbeReport<LambdaTerm>;

struct LambdaCheckConfig {
  std::size_t depth = 5;
  std::vector<LambdaTerm> pool;  // closed arguments
};

// enumerate_lambda(0, max_size), then Ω if asked, then extras.
inline std::vector<LambdaTerm> default_lambda_pool(std::size_t max_size = 4, bool include_omega = false,
                                                   const std::vector<LambdaTerm>& extras = {}) {
  auto pool = enumerate_lambda(0, max_size);
  std::vector<LambdaTerm> more = extras;
  if (include_omega) more.insert(more.begin(), omega());
  for (const auto& e : more) {
    if (!e.closed()) throw TermError("pool terms must be closed: " + render_lambda(e));
    if (std::find(pool.begin(), pool.end(), e) == pool.end()) pool.push_back(e);
  }
  return pool;
}

namespace detail {

inline void check_pool_closed(const std::vector<LambdaTerm>& pool) {
  for (const auto& e : pool)
    if (!e.closed()) throw ConfigError("pool terms must be closed: " + render_lambda(e));
}

// Tuples of pool^n in lexicographic order, first component slowest.
inline std::vector<std::vector<LambdaTerm>> closing_tuples(std::size_t n, const std::vector<LambdaTerm>& pool,
                                                           std::size_t limit) {
  std::vector<std::vector<LambdaTerm>> out;
  if (n == 0) return {{}};
  if (pool.empty()) throw ConfigError("closing pool is empty for an open term");
  std::vector<std::size_t> digits(n, 0);
  while (out.size() < limit) {
    std::vector<LambdaTerm> u;
    for (auto d : digits) u.push_back(pool[d]);
    out.push_back(std::move(u));
    std::size_t k = n;
    while (k > 0 && ++digits[k - 1] == pool.size()) digits[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

}  // namespace detail

// Closed λ-terms under a stepper, arguments from a fixed closed pool.
struct ClosedLambdaSystem {
  using State = LambdaTerm;
  using Arg = LambdaTerm;
  static constexpr bool has_extra_moves = false;

  LambdaEngine& engine;
  const std::vector<LambdaTerm>& pool;

  const LambdaBehavior& step(const LambdaTerm& t) { return engine.step(t); }
  const LambdaTerm& next(const LambdaTerm&, const LambdaBehavior& b) const { return b.next(); }
  LambdaTerm apply(const LambdaTerm&, const LambdaBehavior& b, const LambdaTerm& e) const { return beta(b.body(), e); }
  const std::vector<LambdaTerm>& arguments(const LambdaTerm&) const { return pool; }
  static bool equal(const LambdaTerm& a, const LambdaTerm& b) { return a == b; }
};

// Strong applicative bisimilarity, bounded; open terms are closed by
// substitution first. One instance shares its caches across queries.
class AppChecker {
 public:
  AppChecker(Strategy s, LambdaCheckConfig cfg)
      : cfg_(std::move(cfg)), engine_(s), sys_{engine_, cfg_.pool}, checker_(sys_) {
    detail::check_depth(cfg_.depth);
    detail::check_pool_closed(cfg_.pool);
  }

  LambdaVerdict closed(const LambdaTerm& t1, const LambdaTerm& t2) {
    if (!t1.closed() || !t2.closed()) throw TermError("applicative check needs closed terms");
    LambdaVerdict v = blank();
    if (auto w = checker_.run(t1, t2, cfg_.depth)) {
      v.distinguished = true;
      v.witness = std::move(*w);
    }
    return v;
  }

  LambdaVerdict open(const LambdaTerm& t1, const LambdaTerm& t2, const std::vector<LambdaTerm>& closing_pool,
                     std::size_t limit) {
    if (t1.ctx() != t2.ctx()) throw TermError("terms live in different contexts");
    if (limit == 0) throw ConfigError("tuple limit must be positive");
    detail::check_pool_closed(closing_pool);
    LambdaVerdict v = blank();
    for (auto& u : detail::closing_tuples(t1.ctx(), closing_pool, limit)) {
      ++v.tuples_tried;
      auto w = checker_.run(subst_sim(t1, u, 0), subst_sim(t2, u, 0), cfg_.depth);
      if (!w) continue;
      v.distinguished = true;
      if (t1.ctx() > 0) v.witness.push_back(LambdaMove::subst(std::move(u)));
      v.witness.insert(v.witness.end(), w->begin(), w->end());
      break;
    }
    return v;
  }

  LambdaEngine& engine() noexcept { return engine_; }

 private:
  LambdaVerdict blank() const {
    LambdaVerdict v;
    v.depth = cfg_.depth;
    v.pool_size = cfg_.pool.size();
    return v;
  }

  LambdaCheckConfig cfg_;
  LambdaEngine engine_;
  ClosedLambdaSystem sys_;
  BoundedChecker<ClosedLambdaSystem> checker_;
};

inline LambdaVerdict app_bisim_closed(const LambdaTerm& t1, const LambdaTerm& t2, Strategy s,
                                      const LambdaCheckConfig& cfg) {
  return AppChecker(s, cfg).closed(t1, t2);
}

inline LambdaVerdict app_bisim_open(const LambdaTerm& t1, const LambdaTerm& t2, Strategy s,
                                    const LambdaCheckConfig& cfg, const std::vector<LambdaTerm>& closing_pool,
                                    std::size_t limit) {
  return AppChecker(s, cfg).open(t1, t2, closing_pool, limit);
}

// ---------------------------------------------------------------------------
// Coalgebraic check on open terms

struct CoState {
  LambdaTerm term;
  std::size_t budget = 0;  // renamings still allowed on this path

  friend bool operator==(const CoState&, const CoState&) = default;
};

}  // namespace hogsos

template <>
struct std::hash<hogsos::CoState> {
  std::size_t operator()(const hogsos::CoState& s) const noexcept {
    return std::hash<hogsos::LambdaTerm>{}(s.term) * 7 + s.budget;
  }
};

namespace hogsos {

struct CoalgConfig {
  std::vector<LambdaTerm> subst_pool;  // closed terms for the substitution clause
  std::size_t subst_limit = 64;        // tuples per state
  std::size_t renaming_budget = 1;     // renamings per path
};

// Open terms with the substitution and renaming clauses as extra moves.
// Substitutions land in closed terms and cost no depth; renamings cost one.
// Function behaviours are tested on the closed pool and on the variables of
// the current context.
class CoalgSystem {
 public:
  using State = CoState;
  using Arg = LambdaTerm;
  static constexpr bool has_extra_moves = true;

  CoalgSystem(LambdaEngine& engine, const std::vector<LambdaTerm>& pool, const CoalgConfig& cc)
      : engine_(engine), pool_(pool), cc_(cc) {}

  const LambdaBehavior& step(const CoState& s) { return engine_.step(s.term); }
  CoState next(const CoState& s, const LambdaBehavior& b) const { return {b.next(), s.budget}; }
  CoState apply(const CoState& s, const LambdaBehavior& b, const LambdaTerm& e) const {
    return {beta(b.body(), e), s.budget};
  }
  static bool equal(const CoState& a, const CoState& b) { return a.term == b.term; }

  const std::vector<LambdaTerm>& arguments(const CoState& s) {
    const std::size_t n = s.term.ctx();
    auto it = args_.find(n);
    if (it != args_.end()) return it->second;
    std::vector<LambdaTerm> out;
    for (const auto& e : pool_) out.push_back(weaken(e, n));
    for (std::size_t i = 0; i < n; ++i) out.push_back(LambdaTerm::var(n, i));
    return args_.emplace(n, std::move(out)).first->second;
  }

  template <class Visit>
  void extra_moves(const CoState& p, const CoState& q, Visit&& visit) {
    const std::size_t n = p.term.ctx();
    if (n > 0)
      for (auto& u : detail::closing_tuples(n, cc_.subst_pool, cc_.subst_limit))
        visit(LambdaMove::subst(u), CoState{subst_sim(p.term, u, 0), p.budget},
              CoState{subst_sim(q.term, u, 0), q.budget}, 0);
    if (p.budget == 0) return;
    for (std::size_t m = 1; m <= n + 1; ++m) {
      std::vector<std::size_t> r(n, 0);
      for (;;) {
        if (!(m == n && r == identity_renaming(n)))
          visit(LambdaMove::rename(r, m), CoState{rename(p.term, r, m), p.budget - 1},
                CoState{rename(q.term, r, m), q.budget - 1}, 1);
        std::size_t k = n;
        while (k > 0 && ++r[k - 1] == m) r[--k] = 0;
        if (k == 0) break;
      }
    }
  }

  std::optional<CoState> replay_extra(const LambdaMove& m, const CoState& s) const {
    try {
      if (m.kind == MoveKind::subst) return CoState{subst_sim(s.term, m.tuple, 0), s.budget};
      return CoState{rename(s.term, m.renaming, m.target), s.budget};
    } catch (const TermError&) {
      return std::nullopt;
    }
  }

 private:
  LambdaEngine& engine_;
  const std::vector<LambdaTerm>& pool_;
  const CoalgConfig& cc_;
  std::unordered_map<std::size_t, std::vector<LambdaTerm>> args_;
};

inline LambdaVerdict coalg_bisim(const LambdaTerm& t1, const LambdaTerm& t2, Strategy s, const LambdaCheckConfig& cfg,
                                 const CoalgConfig& cc) {
  if (t1.ctx() != t2.ctx()) throw TermError("terms live in different contexts");
  detail::check_depth(cfg.depth);
  detail::check_pool_closed(cfg.pool);
  detail::check_pool_closed(cc.subst_pool);
  if (t1.ctx() > 0 && cc.subst_pool.empty()) throw ConfigError("substitution pool is empty for an open term");
  LambdaEngine engine(s);
  CoalgSystem sys(engine, cfg.pool, cc);
  BoundedChecker<CoalgSystem> checker(sys);
  LambdaVerdict v;
  v.depth = cfg.depth;
  v.pool_size = cfg.pool.size();
  if (auto w = checker.run({t1, cc.renaming_budget}, {t2, cc.renaming_budget}, cfg.depth)) {
    v.distinguished = true;
    v.witness = std::move(*w);
  }
  return v;
}

// Replays any λ witness (closed, open or coalgebraic).
inline bool replay_lambda(Strategy s, const LambdaTerm& t1, const LambdaTerm& t2, const std::vector<LambdaMove>& moves) {
  LambdaEngine engine(s);
  std::vector<LambdaTerm> no_pool;
  CoalgConfig cc;
  CoalgSystem sys(engine, no_pool, cc);
  return replay_with(sys, CoState{t1, 0}, CoState{t2, 0}, moves);
}

// ---------------------------------------------------------------------------
// λ congruence probe

namespace detail {

// Plugs t into a context given as a list of frames from the hole outwards.
struct LambdaFrame {
  enum class Kind { lam, app_left, app_right } kind;
  std::optional<DbTerm> other;  // closed sibling for applications
};

inline DbTerm plug_frames(const std::vector<LambdaFrame>& frames, const DbTerm& t) {
  std::size_t binders = 0;
  for (const auto& f : frames)
    if (f.kind == LambdaFrame::Kind::lam) ++binders;
  DbTerm cur = shift_by(t, binders);
  for (const auto& f : frames) {
    switch (f.kind) {
      case LambdaFrame::Kind::lam: cur = DbTerm::lam(cur); break;
      case LambdaFrame::Kind::app_left: cur = DbTerm::app(cur, *f.other); break;
      case LambdaFrame::Kind::app_right: cur = DbTerm::app(*f.other, cur); break;
    }
  }
  return cur;
}

inline std::string render_frames(const std::vector<LambdaFrame>& frames) {
  std::string out = "_";
  for (const auto& f : frames) {
    switch (f.kind) {
      case LambdaFrame::Kind::lam: out = "lam(" + out + ")"; break;
      case LambdaFrame::Kind::app_left: out = "app(" + out + "," + render_debruijn({0, *f.other}) + ")"; break;
      case LambdaFrame::Kind::app_right: out = "app(" + render_debruijn({0, *f.other}) + "," + out + ")"; break;
    }
  }
  return out;
}

}  // namespace detail

// Samples contexts hole | λ.C | C e | e C with closed e from the pool, of at
// most ctx_size nodes (hole counted as one), and checks C[t1] against C[t2].
// Free variables of open inputs stay free: binders in C do not capture them.
inline LambdaProbeReport lambda_congruence_probe(const LambdaTerm& t1, const LambdaTerm& t2, Strategy s,
                                                 const ProbeConfig& pc, const LambdaCheckConfig& cfg,
                                                 const std::vector<LambdaTerm>& closing_pool, std::size_t limit) {
  check_probe_config(pc);
  if (t1.ctx() != t2.ctx()) throw TermError("terms live in different contexts");
  AppChecker checker(s, cfg);
  LambdaProbeReport report;
  report.seed = pc.seed;
  if (auto v = checker.open(t1, t2, closing_pool, limit); v.distinguished) {
    report.refused = std::move(v);
    return report;
  }
  Rng rng(pc.seed);
  const std::size_t n = t1.ctx();
  for (std::size_t k = 0; k < pc.n_contexts; ++k) {
    std::vector<detail::LambdaFrame> frames;
    const std::size_t target = 1 + rng.below(pc.ctx_size);
    std::size_t size = 1;
    for (std::size_t misses = 0; size < target && misses < 8;) {
      const auto kind = static_cast<detail::LambdaFrame::Kind>(rng.below(3));
      if (kind == detail::LambdaFrame::Kind::lam) {
        frames.push_back({kind, std::nullopt});
        ++size;
        continue;
      }
      if (cfg.pool.empty()) {
        ++misses;
        continue;
      }
      const DbTerm& e = cfg.pool[rng.below(cfg.pool.size())].body();
      if (size + 1 + e.size() > target) {
        ++misses;
        continue;
      }
      frames.push_back({kind, e});
      size += 1 + e.size();
    }
    ++report.contexts_tried;
    const LambdaTerm c1{n, detail::plug_frames(frames, t1.body())};
    const LambdaTerm c2{n, detail::plug_frames(frames, t2.body())};
    auto v = checker.open(c1, c2, closing_pool, limit);
    if (v.distinguished) report.anomalies.push_back({detail::render_frames(frames), std::move(v)});
  }
  return report;
}

}  // namespace hogsos
