#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "slowfast/models/registry.hpp"
#include "slowfast/stats/harness.hpp"
#include "slowfast/stats/tests.hpp"
#include "support.hpp"

using namespace slowfast;
using testsupport::oracle;

namespace {

std::vector<double> exp_samples(double rate, int n, std::uint64_t seed) {
  Rng rng{seed};
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(exponential(rng, rate));
  return v;
}

HarnessOptions opts(std::uint64_t seed = 42) {
  HarnessOptions o;
  o.seed = seed;
  o.workers = 1;
  return o;
}

}  // namespace

TEST(KolmogorovSmirnov, ConstantMatchesOracle) {
  EXPECT_NEAR(ks_constant(0.01), oracle()["clock"]["ks_constant_001"].get<double>(), 1e-12);
  EXPECT_NEAR(ks_critical(0.01, 10000), ks_constant(0.01) / 100.0, 1e-15);
}

TEST(KolmogorovSmirnov, PassesOnTheRightLawAndFailsOnTheWrongOne) {
  const auto s = exp_samples(4.0, 100000, 1);
  EXPECT_TRUE(ks_against_cdf(s, [](double t) { return 1.0 - std::exp(-4.0 * t); }).pass);
  EXPECT_FALSE(ks_against_cdf(s, [](double t) { return 1.0 - std::exp(-3.8 * t); }).pass);
}

TEST(KolmogorovSmirnov, AllCensoredAgainstZeroMassIsZero) {
  const std::vector<double> s(100, std::numeric_limits<double>::infinity());
  EXPECT_EQ(ks_distance(s, [](double) { return 0.0; }, 5.0), 0.0);
  EXPECT_EQ(ks_distance(s, [](double) { return 0.0; }), 0.0);
}

TEST(KolmogorovSmirnov, SmallSampleCarriesANote) {
  const auto s = exp_samples(1.0, 20, 2);
  const auto r = ks_against_cdf(s, [](double t) { return 1.0 - std::exp(-t); });
  EXPECT_FALSE(r.notes.empty());
}

TEST(KolmogorovSmirnov, TwoSample) {
  const auto a = exp_samples(2.0, 20000, 3), b = exp_samples(2.0, 20000, 4), c = exp_samples(2.3, 20000, 5);
  EXPECT_TRUE(ks_two_sample(a, b).pass);
  EXPECT_FALSE(ks_two_sample(a, c).pass);
  EXPECT_EQ(ks_two_sample_distance(a, a), 0.0);
}

TEST(TotalVariation, IdenticalDisjointAndExact) {
  EmpiricalLaw a = EmpiricalLaw::categorical({"x", "y", "y", "z"});
  EXPECT_EQ(tv_distance(a, a), 0.0);
  EmpiricalLaw b = EmpiricalLaw::categorical({"u", "v"});
  EXPECT_DOUBLE_EQ(tv_distance(a, b), 1.0);
  EXPECT_NEAR(tv_distance(a, {{"x", 0.25}, {"y", 0.5}, {"z", 0.25}}), 0.0, 1e-15);
  EXPECT_NEAR(tv_distance(a, {{"x", 0.5}, {"y", 0.5}}), 0.25, 1e-15);
}

TEST(TotalVariation, MergeIsOrderInsensitive) {
  EmpiricalLaw a = EmpiricalLaw::categorical({"1", "2"});
  EmpiricalLaw b = EmpiricalLaw::categorical({"2", "3", "3"});
  EmpiricalLaw ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.counts, ba.counts);
  EXPECT_EQ(ab.size, 5U);
}

TEST(Wilson, IntervalCoversAndShrinks) {
  const auto w = wilson_interval(500, 1000);
  EXPECT_TRUE(w.contains(0.5));
  EXPECT_LT(w.upper - w.lower, 0.09);
  EXPECT_GT(w.upper - w.lower, 0.07);
  const auto zero = wilson_interval(0, 1000);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_LT(zero.upper, 0.01);
  EXPECT_DOUBLE_EQ(w.distance_to(0.2), w.lower - 0.2);
}

TEST(QuantileBins, EdgesSplitPooledSample) {
  std::vector<double> x;
  for (int k = 0; k < 1000; ++k) x.push_back(k);
  const auto edges = quantile_edges(x, 10);
  EXPECT_EQ(edges.size(), 9U);
  EXPECT_EQ(bin_label(-1.0, edges), bin_label(0.0, edges));
  EXPECT_NE(bin_label(0.0, edges), bin_label(999.0, edges));
}

TEST(Harness, JumpTimeSweepDecreasesForTheToy) {
  const auto m = build_model("two-state-toy");
  const auto rows = jump_time_convergence(m.spec, m.limit, m.start, {1, 64}, 20000, 10.0, opts());
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_NEAR(rows[0].ks, oracle()["toy"]["exact_ks_from_a"]["1"].get<double>(), 0.015);
  EXPECT_LT(rows[1].ks, rows[0].ks);
  EXPECT_TRUE(rows[1].report.pass);
}

TEST(Harness, JumpChainRejectsTooManyJumps) {
  const auto m = build_model("two-state-toy");
  EXPECT_THROW(jump_chain_convergence(m.spec, m.limit, m.start, 4, 6, {}, 100, 1.0, opts()), PreconditionError);
}

TEST(Harness, FixedTimeMarginalsAgreeAtLargeN) {
  const auto m = build_model("two-state-toy");
  const auto res = fixed_time_marginal_test(m.spec, m.limit, m.start, {0.5, 1.0}, 64, 50, 20000, opts(), 0.03);
  for (const auto& r : res.per_time) EXPECT_TRUE(r.pass) << r.name << " " << r.value;
  EXPECT_GE(res.guard_prelimit, 0.99);
}

TEST(Harness, ExtinctionEstimateCountsFinalZeros) {
  std::vector<PathSummary> s(4);
  for (auto& p : s) p.start = Index{1};
  s[0].post = {Index{0}};
  s[0].times = {1.0};
  s[1].post = {Index{2}, Index{1}, Index{0}};
  s[1].times = {0.1, 0.2, 0.3};
  s[2].termination = Termination::index_ceiling;
  s[2].post = {Index{32}};
  s[2].times = {1.0};
  const auto e = extinction_probability(s);
  EXPECT_EQ(e.interval.successes, 2U);
  EXPECT_EQ(e.ceiling_hits, 1U);
  EXPECT_THROW(extinction_probability(std::vector<PathSummary>{}), PreconditionError);
}

TEST(Harness, ExplosionGapOfTheLadder) {
  const auto m = build_model("explosion-ladder");
  const auto g = explosion_gap(m.spec, m.limit, m.start, 3.0, 8, 10000, 2000, opts());
  EXPECT_LT(g.prelimit.upper, g.limit.lower);
  EXPECT_TRUE(g.limit.contains(oracle()["ladder"]["explosion_by_3"].get<double>()));
}

TEST(Harness, OracleEquivalenceOnTheToy) {
  const auto m = build_model("two-state-toy");
  // 20k replicas per side: TV noise is about 0.4 sqrt(80 / 2e4) = 0.025
  const auto r = oracle_equivalence(m.spec, m.start, 1, 1e-4, 20000, 5.0, opts(), 20, 0.05);
  EXPECT_TRUE(r.pass) << r.value;
}

TEST(Harness, ErgodicDiagnosticStabilizes) {
  const auto toy = build_two_state_toy(1.0, 2.0, 3.0, 6.0, {{1.0}});
  const FastModel fm = toy_fast_model(toy, 0);
  const auto d = ergodic_diagnostic(fm, [&](const State& x) { return fm.rate(x); }, {1e3, 1e4, 1e5});
  EXPECT_TRUE(d.stabilized);
  EXPECT_EQ(d.estimates.size(), 3U);
}

TEST(Report, JsonAndCsvRows) {
  auto r = TestReport::make("x", "KS", 0.01, 0.02);
  r.model = "m";
  r.n = 4;
  r.sample_sizes = {10, 20};
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.to_json()["value"].get<double>(), 0.01);
  EXPECT_EQ(to_csv_row(r), "m,4,x,KS,0.01,0.02,true,10;20,0");
}
