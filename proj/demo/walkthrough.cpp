// A short tour: trace a combinator term, compare terms, probe contexts, and
// repeat the exercise for the lambda calculus.
#include <iostream>

#include "hogsos/hogsos.hpp"

using namespace hogsos;

namespace {

void print_trace(const Trace& tr) {
  for (const auto& e : tr.events)
    std::cout << "  " << to_string(e.kind) << "  " << render_pretty(e.state) << "  ->  " << render_pretty(*e.successor)
              << "\n";
  std::cout << "  terminal: " << to_string(tr.end) << "\n";
}

void print_verdict(const std::string& label, const Verdict& v) {
  std::cout << "  " << label << ": " << (v.distinguished ? "distinguished" : "no counterexample") << " (depth "
            << v.depth << ", pool " << v.pool_size << ")\n";
  for (const auto& m : v.witness) {
    std::cout << "    " << to_string(m.kind);
    if (m.arg) std::cout << " " << render_pretty(*m.arg);
    std::cout << "\n";
  }
}

}  // namespace

int main() {
  const HOSpec& xcl = builtin::xcl();
  std::cout << "xCL: " << xcl.rules().size() << " strict rules from " << parse_spec(builtin::xcl_source).rules.size()
            << " written ones\n\n";

  std::cout << "(S K) I\n";
  Engine engine(xcl);
  const Trace tr = trace(engine, parse_term("(S K) I", xcl.sig()), 10);
  print_trace(tr);

  const Term arg = parse_term("S K", xcl.sig());
  std::cout << "\napplying the final function to " << render_pretty(arg) << "\n";
  print_trace(trace(engine, apply_fun(engine.step(tr.events.back().state), arg), 10));

  std::cout << "\nbisimilarity\n";
  const CheckConfig cfg{10, default_pool(xcl.sig(), 3)};
  print_verdict("(S K) I vs (S K) K", check(xcl, parse_term("(S K) I", xcl.sig()), parse_term("(S K) K", xcl.sig()), cfg));
  const Verdict ik = check(xcl, parse_term("I", xcl.sig()), parse_term("K", xcl.sig()), CheckConfig{3, cfg.pool});
  print_verdict("I vs K", ik);
  std::cout << "    replays: " << std::boolalpha
            << replay(xcl, parse_term("I", xcl.sig()), parse_term("K", xcl.sig()), ik.witness) << "\n";

  const HOSpec& nd = builtin::xcl_nd();
  const CheckConfig ndcfg{6, default_pool(nd.sig(), 2)};
  print_verdict("I + K vs K + I", check_nd(nd, parse_term("I + K", nd.sig()), parse_term("K + I", nd.sig()), ndcfg));
  print_verdict("I + K vs I", check_nd(nd, parse_term("I + K", nd.sig()), parse_term("I", nd.sig()), ndcfg));

  std::cout << "\ncongruence probe, 200 contexts of size <= 8\n";
  const ProbeReport pr = congruence_probe(xcl, parse_term("(S K) I", xcl.sig()), parse_term("(S K) K", xcl.sig()),
                                          ProbeConfig{200, 8, 1}, CheckConfig{5, cfg.pool});
  std::cout << "  " << pr.anomalies.size() << " anomalies in " << pr.contexts_tried << " contexts\n";

  std::cout << "\nlambda calculus (call by name)\n";
  std::vector<std::string> free;
  const LambdaTerm id = parse_lambda("\\x.x", free, false);
  const LambdaTerm eta = parse_lambda("\\x.(\\y.y) x", free, false);
  LambdaEngine lam(Strategy::cbn);
  for (const auto& e : trace(lam, LambdaTerm::app(eta, id), 5).events)
    std::cout << "  " << to_string(e.kind) << "  " << render_lambda(e.state) << "\n";
  const auto v = app_bisim_closed(id, eta, Strategy::cbn, LambdaCheckConfig{3, {id}});
  std::cout << "  \\x.x vs \\x.(\\y.y) x: " << (v.distinguished ? "distinguished" : "no counterexample") << "\n";
  const auto w = app_bisim_closed(omega(), theta(), Strategy::cbn, LambdaCheckConfig{20, default_lambda_pool(4)});
  std::cout << "  OMEGA vs THETA: " << (w.distinguished ? "distinguished" : "no counterexample") << " at depth 20\n";

  const auto [p, q] = parse_lambda_pair("x y", "x x");
  const auto pool = default_lambda_pool(3, true);
  const auto co = coalg_bisim(p, q, Strategy::cbn, LambdaCheckConfig{4, pool}, CoalgConfig{pool, 64, 1});
  std::cout << "  x y vs x x (open): " << (co.distinguished ? "distinguished" : "no counterexample") << ", witness";
  for (const auto& m : co.witness) {
    std::cout << " " << to_string(m.kind);
    for (const auto& u : m.tuple) std::cout << " " << render_lambda(u);
  }
  std::cout << "\n";
}
