#pragma once

#include <optional>
#include <string_view>

#include "hogsos/spec.hpp"

namespace hogsos::builtin {

// Byte-identical copies of assets/xcl.hos and assets/xcl_nd.hos.
inline constexpr std::string_view xcl_source = R"hos(sig { S/0; K/0; I/0; S'/1; K'/1; S''/2; app/2; }
mode det;
rules {
  rule s: |- S =[t]=> S'(t);
  rule s1: |- S'(p) =[t]=> S''(p, t);
  rule s2: |- S''(p, q) =[t]=> (p t) (q t);
  rule k: |- K =[t]=> K'(t);
  rule k1: |- K'(p) =[t]=> p;
  rule i: |- I =[t]=> t;
  rule app1: p -> p2 |- app(p, q) --> app(p2, q);
  rule app2: p -[q]-> r |- app(p, q) --> r;
}
)hos";

inline constexpr std::string_view xcl_nd_source = R"hos(sig { S/0; K/0; I/0; S'/1; K'/1; S''/2; app/2; plus/2; }
mode nd;
rules {
  rule s: |- S =[t]=> S'(t);
  rule s1: |- S'(p) =[t]=> S''(p, t);
  rule s2: |- S''(p, q) =[t]=> (p t) (q t);
  rule k: |- K =[t]=> K'(t);
  rule k1: |- K'(p) =[t]=> p;
  rule i: |- I =[t]=> t;
  rule app1: p -> p2 |- app(p, q) --> app(p2, q);
  rule app2: p -[q]-> r |- app(p, q) --> r;
  rule choice_l: |- plus(p, q) --> p;
  rule choice_r: |- plus(p, q) --> q;
}
)hos";

inline std::optional<std::string_view> spec_source(std::string_view name) {
  if (name == "xcl") return xcl_source;
  if (name == "xcl_nd") return xcl_nd_source;
  return std::nullopt;
}

inline const HOSpec& xcl() {
  static const HOSpec spec = load_spec(xcl_source);
  return spec;
}

inline const HOSpec& xcl_nd() {
  static const HOSpec spec = load_spec(xcl_nd_source);
  return spec;
}

}  // namespace hogsos::builtin
