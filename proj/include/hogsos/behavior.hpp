#pragma once

#include <compare>
#include <optional>
#include <string_view>
#include <utility>

#include "hogsos/error.hpp"

namespace hogsos {

enum class BehaviorKind { reduce, fun, stuck };

inline std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::reduce: return "reduce";
    case BehaviorKind::fun: return "fun";
    case BehaviorKind::stuck: return "stuck";
  }
  return "?";
}

// One-step observation of a state: it reduces to `next`, it is a function
// whose result on an argument is given intensionally by `body`, or it is
// stuck. What `body` means depends on the language (a hole template for
// first-order terms, an abstraction body for lambda terms).
template <class T>
class BasicBehavior {
 public:
  static BasicBehavior reduce(T next) { return BasicBehavior(BehaviorKind::reduce, std::move(next)); }
  static BasicBehavior fun(T body) { return BasicBehavior(BehaviorKind::fun, std::move(body)); }
  static BasicBehavior stuck() { return BasicBehavior(BehaviorKind::stuck, std::nullopt); }

  BehaviorKind kind() const noexcept { return kind_; }
  bool is_reduce() const noexcept { return kind_ == BehaviorKind::reduce; }
  bool is_fun() const noexcept { return kind_ == BehaviorKind::fun; }
  bool is_stuck() const noexcept { return kind_ == BehaviorKind::stuck; }

  const T& next() const {
    if (!is_reduce()) throw Error("behaviour is not a reduction");
    return *term_;
  }
  const T& body() const {
    if (!is_fun()) throw Error("behaviour is not a function");
    return *term_;
  }
  // The carried term, if any.
  const std::optional<T>& term() const noexcept { return term_; }

  friend bool operator==(const BasicBehavior&, const BasicBehavior&) = default;
  friend auto operator<=>(const BasicBehavior& a, const BasicBehavior& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (!a.term_ || !b.term_) return a.term_.has_value() <=> b.term_.has_value();
    return *a.term_ <=> *b.term_;
  }

 private:
  BasicBehavior(BehaviorKind kind, std::optional<T> term) : kind_(kind), term_(std::move(term)) {}

  BehaviorKind kind_;
  std::optional<T> term_;
};

}  // namespace hogsos
