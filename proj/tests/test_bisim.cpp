#include <gtest/gtest.h>

#include <set>

#include "hogsos/hogsos.hpp"
#include "oracles.hpp"

using namespace hogsos;

namespace {

const HOSpec& X() { return builtin::xcl(); }
const HOSpec& ND() { return builtin::xcl_nd(); }
Term P(std::string_view s) { return parse_term(s, X().sig()); }
Term PN(std::string_view s) { return parse_term(s, ND().sig()); }

CheckConfig cfg(std::size_t depth, std::size_t pool_max) {
  return {depth, enumerate_closed(X().sig(), pool_max)};
}

// Replays a witness with the hand-written stepper instead of the engine.
bool oracle_replay(Term p, Term q, const std::vector<Move>& moves) {
  for (const auto& m : moves) {
    const auto bp = oracle::xcl_step(p), bq = oracle::xcl_step(q);
    if (bp.kind != bq.kind) return false;
    if (m.kind == MoveKind::reduce) {
      if (bp.kind != oracle::Step::reduce) return false;
      p = bp.term;
      q = bq.term;
    } else {
      if (bp.kind != oracle::Step::fun) return false;
      p = oracle::fill(bp.term, *m.arg);
      q = oracle::fill(bq.term, *m.arg);
    }
  }
  return oracle::xcl_step(p).kind != oracle::xcl_step(q).kind;
}

TEST(Check, SKIandSKKAgree) {
  const Verdict v = check(X(), P("(S K) I"), P("(S K) K"), cfg(10, 3));
  EXPECT_FALSE(v.distinguished);
  EXPECT_EQ(v.depth, 10u);
  EXPECT_EQ(v.pool_size, 39u);
}

TEST(Check, Reflexive) {
  for (const auto& t : enumerate_closed(X().sig(), 3)) EXPECT_FALSE(check(X(), t, t, cfg(3, 1)).distinguished);
}

TEST(Check, IdentityVersusConstant) {
  const Term e = P("(S K) I");
  const Verdict v = check(X(), P("I"), P("K"), CheckConfig{3, {e}});
  ASSERT_TRUE(v.distinguished);
  EXPECT_EQ(v.mismatch, Mismatch::kind);
  ASSERT_EQ(v.witness.size(), 1u);
  EXPECT_EQ(v.witness[0].kind, MoveKind::apply);
  EXPECT_EQ(*v.witness[0].arg, e);
  EXPECT_TRUE(replay(X(), P("I"), P("K"), v.witness));
  EXPECT_TRUE(oracle_replay(P("I"), P("K"), v.witness));
}

TEST(Check, IdentityVersusConstantDefaultPool) {
  const Verdict v = check(X(), P("I"), P("K"), cfg(3, 3));
  ASSERT_TRUE(v.distinguished);
  EXPECT_TRUE(replay(X(), P("I"), P("K"), v.witness));
  EXPECT_TRUE(oracle_replay(P("I"), P("K"), v.witness));
}

TEST(Check, EmptyPoolWithFunctionsIsConfigError) {
  EXPECT_THROW(check(X(), P("I"), P("K"), CheckConfig{3, {}}), ConfigError);
  // no function behaviour reached: fine without a pool
  EXPECT_FALSE(check(X(), P("I"), P("I"), CheckConfig{3, {}}).distinguished);
}

TEST(Check, ZeroDepthIsConfigError) { EXPECT_THROW(check(X(), P("I"), P("K"), cfg(0, 2)), ConfigError); }

TEST(Check, OpenTermsRejected) {
  EXPECT_THROW(check(X(), parse_term("x", X().sig(), VarPolicy::open), P("K"), cfg(2, 1)), Error);
}

TEST(Check, DetCheckerRejectsNdSpec) { EXPECT_THROW(Checker(ND(), cfg(2, 1)), Error); }

TEST(Check, ReplayRejectsBogusWitness) {
  EXPECT_FALSE(replay(X(), P("I"), P("K"), {Move::reduce()}));
  EXPECT_FALSE(replay(X(), P("I"), P("I"), {Move::apply(P("S"))}));
  EXPECT_FALSE(replay(X(), P("I"), P("K"), {Move::subst({})}));
}

TEST(Properties, SoundnessSymmetryMonotonicity) {
  const auto terms = enumerate_closed(X().sig(), 3);
  Checker small(X(), cfg(3, 2));
  Checker large(X(), cfg(5, 3));
  std::size_t distinguished = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const Term &p = terms[i], &q = terms[j];
      const Verdict v = small.check(p, q);
      const Verdict w = small.check(q, p);
      ASSERT_EQ(v.distinguished, w.distinguished) << render_pretty(p) << " / " << render_pretty(q);
      if (!v.distinguished) continue;
      ++distinguished;
      ASSERT_TRUE(replay(X(), p, q, v.witness));
      ASSERT_TRUE(oracle_replay(p, q, v.witness));
      ASSERT_TRUE(replay(X(), q, p, w.witness));
      ASSERT_EQ(v.witness.size(), w.witness.size());
      const Verdict bigger = large.check(p, q);
      ASSERT_TRUE(bigger.distinguished);
      ASSERT_TRUE(replay(X(), p, q, bigger.witness));
    }
  }
  EXPECT_GT(distinguished, 0u);
}

TEST(Properties, TransitivitySanity) {
  const auto terms = enumerate_closed(X().sig(), 3);
  Checker c(X(), cfg(4, 2));
  std::vector<std::vector<bool>> ok(terms.size(), std::vector<bool>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = 0; j < terms.size(); ++j) ok[i][j] = !c.check(terms[i], terms[j]).distinguished;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = 0; j < terms.size(); ++j)
      for (std::size_t k = 0; k < terms.size(); ++k)
        if (ok[i][j] && ok[j][k] && !ok[i][k]) ++violations;
  EXPECT_EQ(violations, 0u);
}

TEST(CheckNd, ChoiceIsCommutative) {
  const Verdict v = check_nd(ND(), PN("I + K"), PN("K + I"), CheckConfig{6, enumerate_closed(ND().sig(), 2)});
  EXPECT_FALSE(v.distinguished);
}

TEST(CheckNd, ChoiceVersusBranch) {
  const Term p = PN("I + K"), q = PN("I");
  const Verdict v = check_nd(ND(), p, q, CheckConfig{2, enumerate_closed(ND().sig(), 1)});
  ASSERT_TRUE(v.distinguished);
  EXPECT_EQ(v.mismatch, Mismatch::nd_unmatched);
  ASSERT_TRUE(v.certificate);
  EXPECT_TRUE(v.certificate->responses.empty());
  EXPECT_TRUE(v.certificate->choice.is_reduce());
  EXPECT_TRUE(replay_nd(ND(), p, q, *v.certificate));
  EXPECT_FALSE(replay_nd(ND(), p, p, *v.certificate));
}

TEST(CheckNd, IdempotentChoiceIsNotTheBranch) {
  // I + I only reduces while I is a function: distinct kinds after zero moves
  const Verdict v = check_nd(ND(), PN("I + I"), PN("I"), CheckConfig{6, enumerate_closed(ND().sig(), 1)});
  ASSERT_TRUE(v.distinguished);
  EXPECT_TRUE(replay_nd(ND(), PN("I + I"), PN("I"), *v.certificate));
  EXPECT_FALSE(check_nd(ND(), PN("I + I"), PN("I + I"), CheckConfig{6, {}}).distinguished);
  // (I + I) + I may step to I + I, which I + I cannot match
  const Verdict w = check_nd(ND(), PN("(I + I) + I"), PN("I + I"), CheckConfig{6, enumerate_closed(ND().sig(), 1)});
  ASSERT_TRUE(w.distinguished);
  EXPECT_TRUE(replay_nd(ND(), PN("(I + I) + I"), PN("I + I"), *w.certificate));
  EXPECT_FALSE(check_nd(ND(), PN("(I + K) S"), PN("(K + I) S"), CheckConfig{6, enumerate_closed(ND().sig(), 2)})
                   .distinguished);
}

TEST(CheckNd, CertificatesReplayOverCorpus) {
  const auto terms = enumerate_closed(ND().sig(), 3);
  NdChecker c(ND(), CheckConfig{3, enumerate_closed(ND().sig(), 1)});
  std::size_t seen = 0;
  for (std::size_t i = 0; i < terms.size(); i += 3) {
    for (std::size_t j = 0; j < terms.size(); j += 5) {
      const Verdict v = c.check(terms[i], terms[j]);
      const Verdict w = c.check(terms[j], terms[i]);
      ASSERT_EQ(v.distinguished, w.distinguished);
      if (!v.distinguished) continue;
      ++seen;
      ASSERT_TRUE(replay_nd(ND(), terms[i], terms[j], *v.certificate))
          << render_pretty(terms[i]) << " / " << render_pretty(terms[j]);
    }
  }
  EXPECT_GT(seen, 0u);
}

TEST(CheckNd, AgreesWithDetOnDeterministicTerms) {
  const auto terms = enumerate_closed(X().sig(), 3);
  const HOSpec as_nd = X().with_mode(Mode::nd);
  Checker det(X(), cfg(3, 2));
  NdChecker nd(as_nd, cfg(3, 2));
  for (std::size_t i = 0; i < terms.size(); i += 2)
    for (std::size_t j = 0; j < terms.size(); j += 3)
      ASSERT_EQ(det.check(terms[i], terms[j]).distinguished, nd.check(terms[i], terms[j]).distinguished);
}

TEST(Probe, SKIandSKKHaveNoAnomalies) {
  const ProbeReport r = congruence_probe(X(), P("(S K) I"), P("(S K) K"), ProbeConfig{500, 8, 42}, cfg(5, 3));
  EXPECT_FALSE(r.refused);
  EXPECT_EQ(r.contexts_tried, 500u);
  EXPECT_TRUE(r.anomalies.empty());
  EXPECT_EQ(r.seed, 42u);
}

TEST(Probe, TrivialContextReproducesCheck) {
  const ProbeReport r = congruence_probe(X(), P("(S K) I"), P("(S K) K"), ProbeConfig{20, 1, 1}, cfg(5, 3));
  EXPECT_TRUE(r.anomalies.empty());
  EXPECT_EQ(r.contexts_tried, 20u);
  Rng rng(3);
  for (int k = 0; k < 20; ++k) EXPECT_TRUE(sample_context(rng, X().sig(), cfg(1, 1).pool, 1).term().is_hole());
}

TEST(Probe, RefusesDistinguishedInputs) {
  const ProbeReport r = congruence_probe(X(), P("I"), P("S''(K,K)"), ProbeConfig{10, 5, 0}, cfg(5, 3));
  ASSERT_TRUE(r.refused);
  EXPECT_TRUE(r.refused->distinguished);
  EXPECT_TRUE(replay(X(), P("I"), P("S''(K,K)"), r.refused->witness));
  EXPECT_EQ(r.contexts_tried, 0u);
}

TEST(Probe, SampledContextsAreVariedAndBounded) {
  Rng rng(42);
  const auto pool = enumerate_closed(X().sig(), 3);
  std::set<Term> seen;
  for (int k = 0; k < 500; ++k) {
    const Context c = sample_context(rng, X().sig(), pool, 8);
    EXPECT_TRUE(c.has_hole());
    EXPECT_LE(c.term().size(), 8u);
    seen.insert(c.term());
  }
  EXPECT_GT(seen.size(), 100u);
}

TEST(Probe, SeededDeterminism) {
  auto run = [](std::uint64_t seed) {
    const ProbeReport r = congruence_probe(X(), P("I"), P("S K K"), ProbeConfig{50, 6, seed}, cfg(4, 2));
    return probe_to_json(r, [](const Term& t) { return render_pretty(t); }).dump();
  };
  EXPECT_EQ(run(9), run(9));
}

TEST(Probe, InvalidParameters) {
  EXPECT_THROW(congruence_probe(X(), P("I"), P("I"), ProbeConfig{0, 5, 0}, cfg(2, 1)), ConfigError);
  EXPECT_THROW(congruence_probe(X(), P("I"), P("I"), ProbeConfig{5, 0, 0}, cfg(2, 1)), ConfigError);
}

TEST(Probe, ReflexivePairsOnRandomTerms) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const Term p = oracle::random_term(rng, X().sig(), {}, 7);
    const ProbeReport r = congruence_probe(X(), p, p, ProbeConfig{10, 6, static_cast<std::uint64_t>(k)}, cfg(4, 2));
    EXPECT_FALSE(r.refused);
    EXPECT_TRUE(r.anomalies.empty());
  }
}

TEST(Probe, NdProbe) {
  const ProbeReport r = congruence_probe(ND(), PN("I + K"), PN("K + I"), ProbeConfig{60, 6, 4},
                                         CheckConfig{4, enumerate_closed(ND().sig(), 1)});
  EXPECT_FALSE(r.refused);
  EXPECT_TRUE(r.anomalies.empty());
}

TEST(Json, VerdictDocument) {
  auto show = [](const Term& t) { return render_pretty(t); };
  const Verdict v = check(X(), P("I"), P("K"), CheckConfig{3, {P("(S K) I")}});
  EXPECT_EQ(verdict_to_json(v, show).dump(),
            R"j({"verdict":"distinguished","depth":3,"pool_size":1,"witness":[{"move":"apply","arg":"S K I"}],"mismatch":"kind"})j");
  const Verdict ok = check(X(), P("I"), P("I"), CheckConfig{3, {}});
  EXPECT_EQ(verdict_to_json(ok, show).dump(), R"j({"verdict":"no_counterexample","depth":3,"pool_size":0})j");
  const auto back = moves_from_json<Term>(verdict_to_json(v, show).at("witness"),
                                          [](const std::string& s) { return P(s); });
  EXPECT_TRUE(replay(X(), P("I"), P("K"), back));
}

TEST(Json, NdCertificateRoundTrip) {
  const Term p = PN("(I + K) S"), q = PN("I S");
  const Verdict v = check_nd(ND(), p, q, CheckConfig{4, enumerate_closed(ND().sig(), 1)});
  ASSERT_TRUE(v.distinguished);
  const Json j = nd_witness_to_json(*v.certificate);
  auto read = [](const std::string& s) { return parse_term(s, ND().sig(), VarPolicy::open); };
  const auto back = nd_witness_from_json(j, read);
  EXPECT_TRUE(replay_nd(ND(), p, q, *back));
  EXPECT_EQ(nd_witness_to_json(*back).dump(), j.dump());
}

}  // namespace
