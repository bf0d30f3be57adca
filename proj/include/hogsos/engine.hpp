#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hogsos/behavior.hpp"
#include "hogsos/spec.hpp"
#include "hogsos/term.hpp"

namespace hogsos {

// Behaviour of a closed term. A function behaviour carries a template whose
// only metavariable is the hole; applying it fills the hole (possibly in
// several places, or none).
using Behavior = BasicBehavior<Term>;

// Finite, duplicate-free, sorted set of behaviours (nondeterministic mode).
using BehaviorSet = std::vector<Behavior>;

inline Term apply_fun(const Behavior& b, const Term& arg) {
  if (!b.is_fun()) throw Error("apply_fun on a " + std::string(to_string(b.kind())) + " behaviour");
  return replace_var(b.body(), hole_name, arg);
}

// Runs the operational model of a validated specification: the behaviour of
// f(t1..tn) is computed from the behaviours of t1..tn by firing the rule for
// f and the set W of reducing operands. Holds a memo table, so one Engine
// serves one session; the spec must outlive it.
class Engine {
 public:
  explicit Engine(const HOSpec& spec) : spec_(spec) {
    for (std::size_t s = 0; s < spec.sig().size(); ++s) symbol_index_.emplace(spec.sig().symbols()[s].name, s);
    for (const auto& rule : spec.rules()) {
      std::vector<std::pair<std::string, VarRole>> roles;
      for (const auto& v : vars_of(rule.conclusion)) {
        auto role = parse_var_role(v);
        if (!role) throw TermError("rule conclusion uses non-canonical variable '" + v + "'");
        roles.emplace_back(v, *role);
      }
      roles_.emplace(&rule, std::move(roles));
    }
  }

  const HOSpec& spec() const noexcept { return spec_; }

  // Deterministic step. Requires exactly one rule per (symbol, W).
  const Behavior& step(const Term& t) {
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    if (!t.closed()) throw TermError("step on open term " + render(t));
    const std::size_t n = t.args().size();
    std::vector<Behavior> operands;
    operands.reserve(n);
    for (const auto& a : t.args()) operands.push_back(step(a));

    Behavior result = Behavior::stuck();
    bool any_stuck = false;
    for (const auto& b : operands) any_stuck = any_stuck || b.is_stuck();
    if (!any_stuck) {
      rules_.clear();
      spec_.lookup_into(symbol(t), reducing_set(operands), rules_);
      if (rules_.size() != 1)
        throw Error("no unique rule for " + t.name() + " " + reducing_set(operands).to_string() + " (" +
                    std::to_string(rules_.size()) + " rules)");
      result = fire(*rules_.front(), t, operands);
    }
    return memo_.emplace(t, std::move(result)).first->second;
  }

  // Nondeterministic step: every way of choosing one behaviour per operand,
  // combined with every rule for the induced W.
  const BehaviorSet& step_nd(const Term& t) {
    if (auto it = memo_nd_.find(t); it != memo_nd_.end()) return it->second;
    if (!t.closed()) throw TermError("step on open term " + render(t));
    const std::size_t n = t.args().size();
    std::vector<BehaviorSet> sets;
    sets.reserve(n);
    for (const auto& a : t.args()) sets.push_back(step_nd(a));

    BehaviorSet result;
    std::vector<Behavior> chosen;
    std::vector<const HORule*> rules;
    auto rec = [&](auto& self, std::size_t i) -> void {
      if (i == n) {
        for (const auto& b : chosen)
          if (b.is_stuck()) return;
        rules.clear();
        spec_.lookup_into(symbol(t), reducing_set(chosen), rules);
        for (const auto* r : rules) result.push_back(fire(*r, t, chosen));
        return;
      }
      for (const auto& b : sets[i]) {
        chosen.push_back(b);
        self(self, i + 1);
        chosen.pop_back();
      }
    };
    rec(rec, 0);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return memo_nd_.emplace(t, std::move(result)).first->second;
  }

  std::size_t memo_size() const noexcept { return memo_.size() + memo_nd_.size(); }

 private:
  std::size_t symbol(const Term& t) const {
    auto it = symbol_index_.find(t.name());
    if (it == symbol_index_.end()) throw TermError("unknown symbol '" + t.name() + "'");
    return it->second;
  }

  static OperandSet reducing_set(const std::vector<Behavior>& operands) {
    OperandSet w;
    for (std::size_t i = 0; i < operands.size(); ++i)
      if (operands[i].is_reduce()) w.insert(i + 1);
    return w;
  }

  // Instantiates a rule's conclusion: x_i is the i-th operand, y_j its
  // reduct, y_i^{x_j} the i-th operand's function applied to the j-th
  // operand. For labeled conclusions the label x and y_i^x stay symbolic as
  // the hole, giving a template.
  Behavior fire(const HORule& rule, const Term& t, const std::vector<Behavior>& operands) const {
    Substitution binding;
    for (const auto& [name, role] : roles_.at(&rule)) {
      using K = VarRole::Kind;
      switch (role.kind) {
        case K::label: binding.emplace(name, Term::hole()); break;
        case K::operand: binding.emplace(name, t.arg(role.i - 1)); break;
        case K::reduct: binding.emplace(name, operands[role.i - 1].next()); break;
        case K::applied: binding.emplace(name, apply_fun(operands[role.i - 1], t.arg(role.j - 1))); break;
        case K::applied_to_label: binding.emplace(name, operands[role.i - 1].body()); break;
      }
    }
    Term out = substitute(rule.conclusion, binding);
    return rule.shape == Shape::red ? Behavior::reduce(std::move(out)) : Behavior::fun(std::move(out));
  }

  const HOSpec& spec_;
  std::unordered_map<std::string, std::size_t> symbol_index_;
  std::unordered_map<const HORule*, std::vector<std::pair<std::string, VarRole>>> roles_;
  std::unordered_map<Term, Behavior, TermHash> memo_;
  std::unordered_map<Term, BehaviorSet, TermHash> memo_nd_;
  std::vector<const HORule*> rules_;
};

inline Behavior step(const HOSpec& spec, const Term& t) { return Engine(spec).step(t); }
inline BehaviorSet step_nd(const HOSpec& spec, const Term& t) { return Engine(spec).step_nd(t); }

// ---------------------------------------------------------------------------
// Tracing

enum class TraceEnd { fun, stuck, cutoff };

inline std::string_view to_string(TraceEnd e) {
  switch (e) {
    case TraceEnd::fun: return "fun";
    case TraceEnd::stuck: return "stuck";
    case TraceEnd::cutoff: return "cutoff";
  }
  return "?";
}

template <class T>
struct BasicTraceEvent {
  T state;
  BehaviorKind kind;
  std::optional<T> successor;  // reduct or function body; empty when stuck
};

template <class T>
struct BasicTrace {
  std::vector<BasicTraceEvent<T>> events;
  TraceEnd end = TraceEnd::cutoff;
};

using TraceEvent = BasicTraceEvent<Term>;
using Trace = BasicTrace<Term>;

// Follows reductions from `start`; stops at the first function or stuck
// state (recorded as the final event) or after max_steps reductions.
template <class T, class StepFn>
BasicTrace<T> trace_with(const T& start, std::size_t max_steps, StepFn&& step_fn) {
  BasicTrace<T> out;
  T state = start;
  for (std::size_t reductions = 0;;) {
    const auto b = step_fn(state);
    if (!b.is_reduce()) {
      out.events.push_back({state, b.kind(), b.term()});
      out.end = b.is_fun() ? TraceEnd::fun : TraceEnd::stuck;
      return out;
    }
    if (reductions == max_steps) {
      out.end = TraceEnd::cutoff;
      return out;
    }
    out.events.push_back({state, b.kind(), b.term()});
    ++reductions;
    state = b.next();
  }
}

inline Trace trace(Engine& engine, const Term& t, std::size_t max_steps) {
  return trace_with<Term>(t, max_steps, [&](const Term& s) { return engine.step(s); });
}

inline Trace trace(const HOSpec& spec, const Term& t, std::size_t max_steps) {
  Engine engine(spec);
  return trace(engine, t, max_steps);
}

}  // namespace hogsos
