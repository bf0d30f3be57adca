#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <tuple>

#include "hogsos/hogsos.hpp"

using namespace hogsos;

namespace {

using Cell = std::tuple<std::string, std::string, std::string>;

std::set<Cell> cells(const std::vector<Diagnostic>& ds) {
  std::set<Cell> out;
  for (const auto& d : ds) out.insert({d.op, d.subset, d.reason});
  return out;
}

std::set<Cell> desugar_errors(const SugaredSpec& s) {
  try {
    desugar(s);
  } catch (const SpecError& e) {
    return cells(e.diagnostics());
  }
  return {};
}

// (op, W) pairs a sugared rule covers, read off its premises.
std::set<std::pair<std::string, std::uint32_t>> coverage(const SugaredSpec& s, const SugaredRule& r) {
  const std::size_t n = s.sig.arity(r.op);
  std::set<std::pair<std::string, std::uint32_t>> out;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    bool fits = true;
    for (const auto& p : r.premises) {
      std::size_t i = 0;
      while (r.operands[i] != p.operand) ++i;
      const bool in_w = (m >> i) & 1u;
      if (p.label ? in_w : !in_w) fits = false;
    }
    if (fits) out.insert({r.op, m});
  }
  return out;
}

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(ParseSpec, XclHasEightSugaredRules) {
  const auto s = parse_spec(builtin::xcl_source);
  EXPECT_EQ(s.rules.size(), 8u);
  EXPECT_EQ(s.mode, Mode::det);
  EXPECT_EQ(s.sig.size(), 7u);
  EXPECT_EQ(s.sig.arity("S''"), 2u);
}

TEST(ParseSpec, EmptyRulesBlock) {
  const auto s = parse_spec("sig { c/0; } mode det; rules { }");
  EXPECT_TRUE(s.rules.empty());
  EXPECT_EQ(desugar_errors(s), (std::set<Cell>{{"c", "{}", "gap: no rule"}}));
}

TEST(ParseSpec, LabelMustBeOperandOrRuleLabel) {
  EXPECT_THROW(parse_spec("sig { f/1; c/0; } mode det; rules { rule r: p -[z]-> q |- f(p) --> q; }"), ParseError);
  EXPECT_NO_THROW(parse_spec("sig { f/1; c/0; } mode det; rules { rule r: p -[x]-> q |- f(p) =[x]=> q; }"));
}

TEST(ParseSpec, SyntaxErrors) {
  EXPECT_THROW(parse_spec("sig { c/0; } mode maybe; rules { }"), ParseError);
  EXPECT_THROW(parse_spec("sig { c/0; c/1; } mode det; rules { }"), ParseError);
  EXPECT_THROW(parse_spec("sig { c/0; } mode det; rules { rule a: |- d --> c; }"), ParseError);
  EXPECT_THROW(parse_spec("sig { c/0; } mode det; rules { rule a: |- c --> c; rule a: |- c --> c; }"), ParseError);
  EXPECT_THROW(parse_spec("sig { f/1; } mode det; rules { rule a: |- f --> f; }"), ParseError);
  try {
    parse_spec("sig { c/0; }\nmode det;\nrules { rule a |- c --> c; }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Desugar, XclYieldsFifteenRules) {
  const HOSpec spec = load_spec(builtin::xcl_source);
  EXPECT_EQ(spec.rules().size(), 15u);
  std::map<std::string, std::size_t> per_op;
  for (const auto& r : spec.rules()) ++per_op[r.op];
  const std::map<std::string, std::size_t> expect{{"S", 1}, {"K", 1}, {"I", 1}, {"S'", 2},
                                                  {"K'", 2}, {"S''", 4}, {"app", 4}};
  EXPECT_EQ(per_op, expect);
}

TEST(Desugar, App2ExpandsIntoTwoRules) {
  const HOSpec spec = load_spec(builtin::xcl_source);
  std::vector<const HORule*> app2;
  for (const auto& r : spec.rules())
    if (r.origin == "app2") app2.push_back(&r);
  ASSERT_EQ(app2.size(), 2u);
  std::set<std::string> ws{app2[0]->w.to_string(), app2[1]->w.to_string()};
  EXPECT_EQ(ws, (std::set<std::string>{"{}", "{2}"}));
  for (auto* r : app2) {
    EXPECT_EQ(r->shape, Shape::red);
    EXPECT_EQ(r->conclusion, Term::var("y1^x2"));
  }
}

TEST(Desugar, DeletingApp1LeavesTwoGaps) {
  auto s = parse_spec(builtin::xcl_source);
  std::erase_if(s.rules, [](const SugaredRule& r) { return r.name == "app1"; });
  EXPECT_EQ(desugar_errors(s), (std::set<Cell>{{"app", "{1}", "gap: no rule"}, {"app", "{1,2}", "gap: no rule"}}));
}

TEST(Desugar, DeletingAnyRulePredictsGaps) {
  const auto full = parse_spec(builtin::xcl_source);
  for (std::size_t k = 0; k < full.rules.size(); ++k) {
    auto s = full;
    s.rules.erase(s.rules.begin() + static_cast<std::ptrdiff_t>(k));
    auto lost = coverage(full, full.rules[k]);
    for (const auto& r : s.rules)
      for (const auto& c : coverage(full, r)) lost.erase(c);
    std::set<Cell> expect;
    for (const auto& [op, m] : lost) expect.insert({op, OperandSet(m).to_string(), "gap: no rule"});
    EXPECT_FALSE(expect.empty());
    EXPECT_EQ(desugar_errors(s), expect) << "deleted " << full.rules[k].name;
  }
}

TEST(Desugar, DuplicatingAnyRuleOverlaps) {
  const auto full = parse_spec(builtin::xcl_source);
  for (const auto& rule : full.rules) {
    auto s = full;
    auto copy = rule;
    copy.name += "_copy";
    s.rules.push_back(copy);
    std::set<Cell> expect;
    for (const auto& [op, m] : coverage(full, rule)) expect.insert({op, OperandSet(m).to_string(), "overlap: 2 rules"});
    EXPECT_EQ(desugar_errors(s), expect) << "duplicated " << rule.name;
  }
}

TEST(Desugar, IllegalConclusionVariable) {
  const auto s = parse_spec("sig { f/1; c/0; } mode det; rules { rule r: |- f(p) --> q; rule c: |- c --> c; }");
  // the rejected rule also leaves its cells uncovered
  EXPECT_EQ(desugar_errors(s), (std::set<Cell>{{"f", "{}", "rule 'r': illegal conclusion variable 'q'"},
                                               {"f", "{1}", "rule 'r': illegal conclusion variable 'q'"},
                                               {"f", "{}", "gap: no rule"},
                                               {"f", "{1}", "gap: no rule"}}));
}

TEST(ParseSpec, ReductionRuleHasNoLabelToUse) {
  EXPECT_THROW(parse_spec("sig { f/1; c/0; } mode det; rules { rule r: p -[x]-> q |- f(p) --> q; rule c: |- c =[x]=> c; }"),
               ParseError);
}

TEST(Desugar, MixedPremiseKindsRejected) {
  const auto s = parse_spec(
      "sig { f/1; c/0; } mode det; rules { rule r: p -> q, p -[p]-> z |- f(p) --> q; rule c: |- c =[x]=> c; }");
  EXPECT_FALSE(desugar_errors(s).empty());
}

TEST(Desugar, IdempotentOnStrictSpecs) {
  for (const auto* src : {&builtin::xcl_source, &builtin::xcl_nd_source}) {
    const HOSpec spec = load_spec(*src);
    const std::string strict = render_spec(spec);
    const HOSpec again = load_spec(strict);
    EXPECT_EQ(again.rules().size(), spec.rules().size());
    for (std::size_t i = 0; i < spec.rules().size(); ++i) EXPECT_EQ(again.rules()[i], spec.rules()[i]);
    EXPECT_EQ(render_spec(again), strict);
  }
}

TEST(Validate, XclIsValid) {
  EXPECT_TRUE(validate(load_spec(builtin::xcl_source)).empty());
  EXPECT_TRUE(validate(builtin::xcl()).empty());
}

TEST(Validate, XclNdIsValid) {
  const HOSpec& nd = builtin::xcl_nd();
  EXPECT_TRUE(validate(nd).empty());
  EXPECT_EQ(nd.mode(), Mode::nd);
  EXPECT_EQ(nd.rules().size(), 23u);
  EXPECT_EQ(nd.choice_symbols(), (std::set<std::string>{"plus"}));
}

TEST(Validate, NdRulesUnderDetModeOverlap) {
  const auto ds = validate(builtin::xcl_nd().with_mode(Mode::det));
  std::set<Cell> expect;
  for (const char* w : {"{}", "{1}", "{2}", "{1,2}"}) expect.insert({"plus", w, "overlap: 2 rules"});
  EXPECT_EQ(cells(ds), expect);
}

TEST(Validate, DuplicatedAppRuleForEmptySet) {
  const HOSpec& x = builtin::xcl();
  auto rules = x.rules();
  for (const auto& r : x.rules())
    if (r.op == "app" && r.w.count() == 0) rules.push_back(r);
  const auto ds = validate(HOSpec(x.sig(), Mode::det, rules));
  EXPECT_EQ(cells(ds), (std::set<Cell>{{"app", "{}", "overlap: 2 rules"}}));
}

TEST(Lookup, AppWithReducingFunction) {
  const auto rs = builtin::xcl().lookup("app", OperandSet::of({1}));
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0]->origin, "app1");
  EXPECT_EQ(rs[0]->shape, Shape::red);
  EXPECT_EQ(rs[0]->conclusion, Term::op("app", {Term::var("y1"), Term::var("x2")}));
}

TEST(Lookup, SAxiom) {
  const auto rs = builtin::xcl().lookup("S", OperandSet{});
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0]->shape, Shape::lab);
  EXPECT_EQ(rs[0]->conclusion, Term::op("S'", {Term::var("x")}));
}

TEST(Lookup, ChoiceHasTwoRules) {
  const auto rs = builtin::xcl_nd().lookup("plus", OperandSet{});
  ASSERT_EQ(rs.size(), 2u);
  std::set<Term> concl{rs[0]->conclusion, rs[1]->conclusion};
  EXPECT_EQ(concl, (std::set<Term>{Term::var("x1"), Term::var("x2")}));
}

TEST(Lookup, UnknownSymbolIsEmpty) { EXPECT_TRUE(builtin::xcl().lookup("Y", OperandSet{}).empty()); }

TEST(Invariants, DetCoverageIsComplete) {
  const HOSpec& x = builtin::xcl();
  for (const auto& sym : x.sig().symbols()) {
    std::size_t covered = 0;
    for (std::uint32_t m = 0; m < (1u << sym.arity); ++m) {
      const auto rs = x.lookup(sym.name, OperandSet(m));
      if (!rs.empty()) ++covered;
      EXPECT_EQ(rs.size(), 1u) << sym.name << OperandSet(m).to_string();
    }
    EXPECT_EQ(covered, 1u << sym.arity);
  }
}

TEST(Invariants, ConclusionsUseAllowedVariables) {
  for (const HOSpec* s : {&builtin::xcl(), &builtin::xcl_nd()}) {
    for (const auto& r : s->rules()) {
      const auto allowed = allowed_vars(s->sig().arity(r.op), r.w, r.shape);
      for (const auto& v : vars_of(r.conclusion)) EXPECT_TRUE(allowed.contains(v)) << r.op << " " << v;
    }
  }
}

TEST(VarRoles, CanonicalNamesParse) {
  EXPECT_EQ(parse_var_role("x")->kind, VarRole::Kind::label);
  EXPECT_EQ(parse_var_role("x2")->i, 2u);
  const auto r = parse_var_role("y1^x2");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->kind, VarRole::Kind::applied);
  EXPECT_EQ(r->i, 1u);
  EXPECT_EQ(r->j, 2u);
  EXPECT_EQ(parse_var_role("y3^x")->kind, VarRole::Kind::applied_to_label);
  EXPECT_FALSE(parse_var_role("q"));
}

TEST(Assets, BuiltinsMatchShippedFiles) {
  EXPECT_EQ(read(std::string(HOGSOS_SOURCE_DIR) + "/assets/xcl.hos"), builtin::xcl_source);
  EXPECT_EQ(read(std::string(HOGSOS_SOURCE_DIR) + "/assets/xcl_nd.hos"), builtin::xcl_nd_source);
}

TEST(Diagnostics, Rendering) {
  EXPECT_EQ((Diagnostic{"app", "{1}", "gap: no rule"}.to_string()), "(app,{1}): gap: no rule");
  SpecError e({{"app", "{1}", "gap: no rule"}, {"app", "{1,2}", "gap: no rule"}});
  EXPECT_NE(std::string(e.what()).find("2 specification error(s)"), std::string::npos);
}

}  // namespace
