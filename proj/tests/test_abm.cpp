#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "coopdyn/abm.hpp"
#include "coopdyn/reward.hpp"
#include "oracle.hpp"

using namespace coopdyn;

namespace {

const PayoffParams kP{3.0, 0.1, 2, 0.01, 0.0};

AgentPopulation uniform_pop(std::size_t n, double z, std::uint64_t seed = 1) {
  return AgentPopulation{std::vector<double>(n, z), CounterRng(seed)};
}

}  // namespace

TEST(Episode, AllDefectPopulation) {
  for (PartnerRule r : kAllRules) {
    auto pop = uniform_pop(10, -30.0);
    for (int e = 0; e < 50; ++e) {
      const auto t = run_episode(pop, 3, r, kP);
      ASSERT_EQ(t.rewards.size(), 2u);
      // A -30 logit cooperates with probability ~1e-13, never in 50 draws here.
      EXPECT_EQ(t.rewards[0], kP.c);
      EXPECT_EQ(t.rewards[1], kP.c);
      if (r == PartnerRule::OFT || r == PartnerRule::Switch) EXPECT_TRUE(t.switches[0]);
      if (r == PartnerRule::ROFT || r == PartnerRule::Stay) EXPECT_FALSE(t.switches[0]);
    }
  }
}

TEST(Episode, AllCooperatePopulationUnderOft) {
  auto pop = uniform_pop(10, 30.0);
  for (int e = 0; e < 50; ++e) {
    const auto t = run_episode(pop, 0, PartnerRule::OFT, kP);
    EXPECT_EQ(t.rewards[0], kP.b);
    EXPECT_EQ(t.rewards[1], kP.b);
    EXPECT_FALSE(t.switches[0]);
    EXPECT_EQ(t.opponent_ids[0], t.opponent_ids[1]);
  }
}

TEST(Episode, NeverMatchesFocalAndCoversOthers) {
  auto pop = uniform_pop(5, 0.0);
  std::vector<int> seen(5, 0);
  for (int e = 0; e < 2000; ++e) {
    const auto t = run_episode(pop, 2, PartnerRule::Switch, kP);
    for (auto id : t.opponent_ids) ++seen[id];
  }
  EXPECT_EQ(seen[2], 0);
  for (int i : {0, 1, 3, 4}) EXPECT_NEAR(seen[i] / 4000.0, 0.25, 0.03);
}

TEST(Episode, TrajectoryInvariants) {
  AgentPopulation pop{{-1.0, 0.3, 2.0, -0.4, 0.9, 0.0}, CounterRng(9)};
  PayoffParams p = kP;
  p.H = 5;
  for (PartnerRule r : kAllRules)
    for (int e = 0; e < 200; ++e) {
      const auto t = run_episode(pop, 1, r, p);
      ASSERT_EQ(t.actions.size(), 5u);
      ASSERT_EQ(t.switches.size(), 4u);
      for (std::size_t h = 0; h < 5; ++h) EXPECT_EQ(t.rewards[h], payoff(t.actions[h].focal, t.actions[h].opponent, p));
      for (std::size_t h = 0; h < 4; ++h) {
        EXPECT_EQ(t.switches[h], !stay_decision(r, t.actions[h].focal, t.actions[h].opponent));
        if (!t.switches[h]) EXPECT_EQ(t.opponent_ids[h], t.opponent_ids[h + 1]);
      }
    }
}

TEST(Episode, TooSmallPopulationThrows) {
  auto pop = uniform_pop(1, 0.0);
  EXPECT_THROW(run_episode(pop, 0, PartnerRule::OFT, kP), std::invalid_argument);
}

TEST(Episode, PinnedRegressionTrajectory) {
  AgentPopulation pop{{-1.5, 0.2, 1.1, 2.4}, CounterRng(42)};
  PayoffParams p = kP;
  p.H = 6;
  const auto t = run_episode(pop, 0, PartnerRule::OFT, p);
  std::vector<std::size_t> ids(t.opponent_ids.begin(), t.opponent_ids.end());
  // 2 * (focal cooperates) + (opponent cooperates)
  std::vector<int> acts;
  for (const auto& r : t.actions) acts.push_back(2 * (r.focal == Action::C) + (r.opponent == Action::C));
  EXPECT_EQ(ids, (std::vector<std::size_t>{3, 3, 3, 2, 2, 2}));
  EXPECT_EQ(acts, (std::vector<int>{3, 1, 1, 1, 1, 1}));
  EXPECT_EQ(pop.rng.counter(), 17u);
}

TEST(Train, Deterministic) {
  SimConfig c;
  c.n_agents = 30;
  c.episodes = 20000;
  c.n_snapshots = 10;
  const auto a = train(c), b = train(c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].t, b[k].t);
    EXPECT_EQ(a[k].density.cell_mass(), b[k].density.cell_mass());
    EXPECT_EQ(a[k].mean, b[k].mean);
  }
  c.seed = 43;
  const auto d = train(c);
  EXPECT_NE(a.back().density.cell_mass(), d.back().density.cell_mass());
}

TEST(Train, ZeroLearningRateKeepsInitialHistogram) {
  SimConfig c;
  c.n_agents = 50;
  c.episodes = 5000;
  c.payoff.alpha = 0.0;
  c.n_snapshots = 5;
  const auto s = train(c);
  for (const auto& snap : s) EXPECT_EQ(snap.density.cell_mass(), s.front().density.cell_mass());
}

TEST(Train, OnlyFocalLogitChanges) {
  AgentPopulation pop = AgentPopulation::sample(InitSpec::beta(2.0, 2.0), 40, CounterRng(3));
  EpisodeTrajectory scratch;
  for (int e = 0; e < 2000; ++e) {
    const auto before = pop.logits;
    const auto focal = train_step(pop, PartnerRule::OFT, kP, scratch);
    for (std::size_t i = 0; i < pop.size(); ++i)
      if (i != focal) ASSERT_EQ(pop.logits[i], before[i]);
    ASSERT_NEAR(pop.logits[focal] - before[focal], 2.0 * reinforce_update(scratch, policy_from_logit(before[focal]), kP),
                1e-12);
  }
}

TEST(Train, SnapshotTimesAreEpisodesOverN) {
  SimConfig c;
  c.n_agents = 100;
  c.episodes = 100000;
  c.n_snapshots = 20;
  const auto marks = c.snapshot_episodes();
  EXPECT_EQ(marks.front(), 0u);
  EXPECT_EQ(marks.back(), 100000u);
  for (std::size_t i = 1; i < marks.size(); ++i) EXPECT_GT(marks[i], marks[i - 1]);
  c.snapshot_every = 25000;
  EXPECT_EQ(c.snapshot_episodes(), (std::vector<std::uint64_t>{0, 25000, 50000, 75000, 100000}));
  c.episodes = 2000;
  c.snapshot_every = 0;
  const auto s = train(c);
  EXPECT_DOUBLE_EQ(s.back().t, 20.0);
}

TEST(Train, ConfigValidation) {
  SimConfig c;
  c.n_agents = 1;
  EXPECT_THROW(train(c), std::invalid_argument);
  c.n_agents = 10;
  c.episodes = 0;
  EXPECT_THROW(train(c), std::invalid_argument);
}

TEST(Replicate, SingleRunEqualsTrain) {
  SimConfig c;
  c.n_agents = 20;
  c.episodes = 4000;
  c.n_snapshots = 5;
  const auto a = train(c), b = replicate(c, 1);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].density.cell_mass(), b[k].density.cell_mass());
  EXPECT_THROW(replicate(c, 0), std::invalid_argument);
}

TEST(Replicate, IdenticalRunsAverageToEitherRun) {
  SimConfig c;
  c.n_agents = 20;
  c.episodes = 4000;
  c.n_snapshots = 5;
  const auto a = train(c);
  const auto avg = average_series({a, a});
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].density.n_cells(); ++i)
      EXPECT_NEAR(avg[k].density.cell_mass()[i], a[k].density.cell_mass()[i], 1e-15);
}

TEST(Replicate, DeterministicAndSeedsDiffer) {
  SimConfig c;
  c.n_agents = 20;
  c.episodes = 4000;
  c.n_snapshots = 5;
  const auto a = replicate(c, 4), b = replicate(c, 4);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].density.cell_mass(), b[k].density.cell_mass());
  EXPECT_EQ(replicate_seed(42, 0), 42u);
  EXPECT_NE(replicate_seed(42, 1), replicate_seed(42, 2));
}

TEST(Replicate, StayMeanDecreasesAfterBurnIn) {
  SimConfig c;
  c.rule = PartnerRule::Stay;
  c.init = InitSpec::beta(2.0, 2.0);
  c.n_agents = 200;
  c.episodes = 200000;
  c.snapshot_every = 20000;
  const auto s = replicate(c, 10);
  for (std::size_t k = 2; k < s.size(); ++k) EXPECT_LT(s[k].mean, s[k - 1].mean) << "t=" << s[k].t;
}

TEST(FrozenStatistics, MatchesAnalyticMoments) {
  const auto law = oracle::beta_quantiles(2.0, 2.0, 2000);
  std::vector<double> logits;
  for (double y : law.points) logits.push_back(logit_from_policy(y));
  std::vector<double> xs;
  for (double z : logits) xs.push_back(policy_from_logit(z));
  const std::vector<double> w(xs.size(), 1.0);
  const auto m = MomentVector::of_points(xs, w, 4);
  for (PartnerRule r : kAllRules) {
    const auto s = frozen_update_statistics(logits, 0.3, r, kP, 400000, 77);
    const double drift = kP.alpha * 0.3 * 0.7 * delta_G(r, 2, 0.3, m, kP);
    EXPECT_NEAR(s.mean, drift, 4.0 * s.mean_se) << to_string(r);
    EXPECT_NEAR(s.variance, sigma_CC(r, 0.3, m, kP), 4.0 * s.variance_se) << to_string(r);
  }
}

TEST(FrozenStatistics, StandardErrorsMatchOracleAccumulator) {
  const auto s = frozen_update_statistics({0.0, 1.0, -1.0}, 0.5, PartnerRule::Switch, kP, 10000, 5);
  EXPECT_EQ(s.episodes, 10000u);
  EXPECT_NEAR(s.mean_se, std::sqrt(s.variance / 10000.0), 1e-15);
  EXPECT_GT(s.variance_se, 0.0);
  EXPECT_THROW(frozen_update_statistics({0.0}, 0.5, PartnerRule::OFT, kP, 1, 5), std::invalid_argument);
}
