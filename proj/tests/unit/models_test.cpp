#include <cmath>

#include <gtest/gtest.h>

#include "slowfast/engine/engine.hpp"
#include "slowfast/models/registry.hpp"
#include "slowfast/stats/tests.hpp"
#include "support.hpp"

using namespace slowfast;
using testsupport::oracle;

TEST(TwoStateToy, AnalyticSummariesMatchOracle) {
  const auto m = build_model("two-state-toy");
  const auto& o = oracle()["toy"];
  EXPECT_NEAR(m.limit.mean_rate(Index{0}), o["mean_rate"].get<double>(), 1e-12);
  const auto P = o["jump_matrix"];
  for (std::int64_t i = 0; i < 2; ++i) {
    const auto row = m.analytic_row(i);
    ASSERT_TRUE(row.has_value());
    for (const auto& [j, p] : *row)
      EXPECT_NEAR(p, P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>(), 1e-12);
  }
}

TEST(TwoStateToy, InvalidParametersAreConfigErrors) {
  EXPECT_THROW(build_model("two-state-toy", json{{"q_ab", -1.0}}), ConfigError);
  EXPECT_THROW(build_model("two-state-toy", json{{"b_a", -3.0}}), ConfigError);
  EXPECT_THROW(build_model("two-state-toy", json{{"matrix_a", {{0.5, 0.6}, {0.5, 0.5}}}}), ConfigError);
  EXPECT_THROW(build_model("two-state-toy", json{{"nonsense", 1}}), ConfigError);
}

TEST(ExplosionLadder, LimitMeanRatesAndExpectedExplosionTime) {
  const auto ladder = build_explosion_ladder(2.0);
  for (std::int64_t i = 1; i < 6; ++i) EXPECT_DOUBLE_EQ(ladder.limit.mean_rate(Index{i}), double(i * i));
  EXPECT_NEAR(ladder.expected_explosion_time(1), oracle()["ladder"]["expected_explosion_time"].get<double>(), 1e-5);
  EXPECT_TRUE(ladder.limit.analytically_explosive.value());
  EXPECT_FALSE(build_explosion_ladder(1.0).limit.analytically_explosive.value());
}

TEST(ExplosionLadder, LimitJumpChainIsDeterministic) {
  const auto m = build_model("explosion-ladder");
  Rng rng{1};
  for (std::int64_t i = 1; i < 20; ++i) EXPECT_EQ(step_jump_chain(m.limit, Index{i}, rng).value, i + 1);
}

TEST(ExplosionLadder, PrelimitWaitsAtTheRestingPoint) {
  // b(i, 0) = 0: the hazard only accumulates after the Exp(n) residence at (i, 0)
  const auto m = build_model("explosion-ladder");
  EngineConfig cfg;
  cfg.horizon = 1e6;
  cfg.max_jumps = 1;
  double sum = 0.0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    ReplicaStreams st(2, static_cast<std::uint64_t>(r));
    sum += simulate_path(m.spec, 1, m.start, cfg, st).jumps.at(0).time;
  }
  // from (1,0): Exp(1) residence, then Exp(1) at rate 1^2 -> mean 2
  EXPECT_NEAR(sum / reps, 2.0, 0.05);
}

TEST(TypedBranching, GaltonWatsonLimitMatchesOracle) {
  const auto m = build_model("typed-branching");
  const auto& o = oracle()["branching"];
  EXPECT_NEAR(m.analytic["r_bar"].get<double>(), o["r_bar"].get<double>(), 1e-12);
  EXPECT_NEAR(m.analytic["q_bar"].get<double>(), o["q_bar"].get<double>(), 1e-12);
  EXPECT_NEAR(m.analytic["extinction_probability"].get<double>(), o["extinction_one"].get<double>(), 1e-9);
  const auto two = build_model("typed-branching", json{{"start", {{"size", 2}, {"trait", 0}}}});
  EXPECT_NEAR(two.analytic["extinction_probability"].get<double>(), o["extinction_two"].get<double>(), 1e-9);
  // birth-death limit: total rate per individual r + q = 3
  EXPECT_NEAR(m.limit.mean_rate(Index{1}), 3.0, 1e-12);
  EXPECT_NEAR(m.limit.mean_rate(Index{4}), 12.0, 1e-12);
}

TEST(TypedBranching, SingleOffspringKeepsTheIndex) {
  const auto m = build_model("typed-branching", json{{"offspring_rates", {nullptr, 1.0}}, {"offspring_trait", "stationary"}});
  Rng rng{5};
  for (int k = 0; k < 100; ++k) EXPECT_EQ(step_jump_chain(m.limit, Index{3}, rng).value, 3);
  EngineConfig cfg;
  cfg.horizon = 5.0;
  ReplicaStreams st(1, 0);
  const auto rec = simulate_path(m.spec, 4, m.start, cfg, st);
  EXPECT_FALSE(rec.jumps.empty());
  for (const auto& e : rec.jumps) EXPECT_EQ(e.post.index.value, 1);
}

TEST(TypedBranching, NegativeRateIsAConfigError) {
  EXPECT_THROW(build_model("typed-branching", json{{"offspring_rates", {-1.0, nullptr, 1.0}}}), ConfigError);
}

TEST(TypedBranching, StationaryStartDrawsTraitsPerReplica) {
  const auto m = build_model("typed-branching", json{{"start", {{"size", 3}, {"trait", "stationary"}}}});
  ASSERT_TRUE(static_cast<bool>(m.start_sampler));
  int zeros = 0, total = 0;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const State x = m.start_for(42, r);
    ASSERT_EQ(x.index.value, 3);
    for (double v : x.point) {
      zeros += v == 0.0;
      ++total;
    }
  }
  EXPECT_NEAR(double(zeros) / total, 0.5, 0.03);
  EXPECT_EQ(m.start_for(42, 7).point, m.start_for(42, 7).point);
}

TEST(ContactProcess, LimitRatesMatchOracle) {
  const auto m = build_model("contact-process");
  EXPECT_NEAR(m.analytic["infection_rate"].get<double>(), oracle()["contact"]["infection_rate"].get<double>(), 1e-12);
  EXPECT_NEAR(m.analytic["healing_rate"].get<double>(), oracle()["contact"]["healing_rate"].get<double>(), 1e-12);
  EXPECT_EQ(m.start.index.value, 0b010);
  // from the middle vertex: one healing (2) and two infections (2 each)
  EXPECT_NEAR(m.limit.mean_rate(m.start.index), 6.0, 1e-12);
}

TEST(ContactProcess, IsolatedVertexOnlyHeals) {
  const auto m = build_model("contact-process", json{{"graph", {{"path", 1}}}, {"start", {{"infected", {0}}, {"load", 0}}}});
  EXPECT_NEAR(m.limit.mean_rate(Index{1}), oracle()["contact"]["healing_rate"].get<double>(), 1e-12);
  Rng rng{1};
  for (int k = 0; k < 50; ++k) EXPECT_EQ(step_jump_chain(m.limit, Index{1}, rng).value, 0);
  // all-healthy configuration: no jumps at all
  EXPECT_EQ(m.limit.mean_rate(Index{0}), 0.0);
}

TEST(ContactProcess, ClassicalSimulatorMatchesExactLaw) {
  const auto exact = oracle()["contact"]["law_t1_from_middle"];
  const Graph g = Graph::path(3);
  std::vector<int> counts(8, 0);
  Rng rng{11};
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) ++counts[static_cast<std::size_t>(simulate_classical_contact(g, 2.0, 2.0, 0b010, 1.0, rng))];
  for (std::size_t c = 0; c < 8; ++c) {
    const auto ci = wilson_interval(static_cast<std::uint64_t>(counts[c]), reps, 4.0);
    EXPECT_TRUE(ci.contains(exact[c].get<double>())) << "config " << c;
  }
}

TEST(ContactProcess, OversizedGraphIsRejected) {
  EXPECT_THROW(build_model("contact-process", json{{"graph", {{"path", 64}}}}), ConfigError);
  EXPECT_THROW(build_model("contact-process", json{{"start", {{"infected", {5}}, {"load", 0}}}}), ConfigError);
}

TEST(Oscillator, PositionIsCosineWithoutJumps) {
  const auto m = build_model("oscillator");
  const auto& o = oracle()["oscillator"]["position_at_1"];
  EngineConfig cfg;
  cfg.horizon = 1.0;
  cfg.observe_times = {1.0};
  for (std::uint64_t n = 1; n <= 10; ++n) {
    bool seen = false;
    for (std::uint64_t r = 0; r < 50 && !seen; ++r) {
      ReplicaStreams st(n, r);
      const auto rec = simulate_path(m.spec, n, m.start, cfg, st);
      if (!rec.jumps.empty()) continue;
      seen = true;
      EXPECT_NEAR(rec.snapshots.at(0).second.point[0], o[std::to_string(n)].get<double>(), 1e-12) << "n=" << n;
    }
    EXPECT_TRUE(seen);
  }
}

TEST(Oscillator, JumpTimeIsExponentialForEveryN) {
  const auto m = build_model("oscillator");
  for (std::uint64_t n : {1ULL, 7ULL}) {
    std::vector<double> t;
    for (std::uint64_t r = 0; r < 20000; ++r) {
      ReplicaStreams st(4, r);
      t.push_back(simulate_first_jump(m.spec, n, m.start, 1e9, st).tau);
    }
    const auto rep = ks_against_cdf(t, [](double x) { return 1.0 - std::exp(-x); });
    EXPECT_TRUE(rep.pass) << "n=" << n << " KS " << rep.value;
  }
}

TEST(Registry, UnknownModelListsValidNames) {
  try {
    build_model("no-such-model");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("explosion-ladder"), std::string::npos);
  }
}
