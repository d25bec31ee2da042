#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coopdyn/game.hpp"

using namespace coopdyn;

namespace {

EpisodeTrajectory make_traj(std::initializer_list<Round> rounds, const PayoffParams& p) {
  EpisodeTrajectory t;
  for (const auto& r : rounds) {
    t.actions.push_back(r);
    t.rewards.push_back(payoff(r.focal, r.opponent, p));
  }
  return t;
}

}  // namespace

TEST(Payoff, TableEntries) {
  const PayoffParams p{3.0, 0.1, 2, 0.01, 0.0};
  EXPECT_DOUBLE_EQ(payoff(Action::C, Action::C, p), 3.0);
  EXPECT_DOUBLE_EQ(payoff(Action::D, Action::C, p), 3.1);
  EXPECT_DOUBLE_EQ(payoff(Action::C, Action::D, p), 0.0);
  EXPECT_DOUBLE_EQ(payoff(Action::D, Action::D, p), 0.1);
}

TEST(Payoff, DecompositionHoldsForAllPairs) {
  const PayoffParams p{5.0, 1.5, 2, 0.01, 0.0};
  for (Action f : {Action::C, Action::D})
    for (Action o : {Action::C, Action::D})
      EXPECT_EQ(payoff(f, o, p), p.b * (o == Action::C) + p.c * (f == Action::D));
}

TEST(Payoff, ValidateRejectsBadParameters) {
  EXPECT_THROW((PayoffParams{0.1, 0.2, 2, 0.01, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PayoffParams{3.0, 0.0, 2, 0.01, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PayoffParams{3.0, 0.1, 0, 0.01, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PayoffParams{3.0, 0.1, 2, -1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((PayoffParams{3.0, 0.1, 2, 0.0, 0.0}.validate()));
}

TEST(StayDecision, Rules) {
  EXPECT_TRUE(stay_decision(PartnerRule::OFT, Action::C, Action::C));
  EXPECT_FALSE(stay_decision(PartnerRule::OFT, Action::C, Action::D));
  EXPECT_FALSE(stay_decision(PartnerRule::OFT, Action::D, Action::C));
  EXPECT_FALSE(stay_decision(PartnerRule::OFT, Action::D, Action::D));
  EXPECT_TRUE(stay_decision(PartnerRule::ROFT, Action::D, Action::D));
  EXPECT_FALSE(stay_decision(PartnerRule::ROFT, Action::C, Action::C));
  for (Action f : {Action::C, Action::D})
    for (Action o : {Action::C, Action::D}) {
      EXPECT_TRUE(stay_decision(PartnerRule::Stay, f, o));
      EXPECT_FALSE(stay_decision(PartnerRule::Switch, f, o));
    }
}

TEST(PartnerRule, ParseAndPrint) {
  for (PartnerRule r : kAllRules) EXPECT_EQ(parse_rule(to_string(r)), r);
  EXPECT_EQ(parse_rule("roft"), PartnerRule::ROFT);
  EXPECT_THROW(parse_rule("tit-for-tat"), std::invalid_argument);
}

TEST(Policy, KnownValues) {
  EXPECT_DOUBLE_EQ(policy_from_logit(0.0), 0.5);
  EXPECT_NEAR(policy_from_logit(800.0), 1.0, 0.0);
  EXPECT_NEAR(policy_from_logit(-800.0), 0.0, 1e-300);
  EXPECT_NEAR(policy_from_logit(logit_from_policy(0.25)), 0.25, 1e-15);
}

TEST(Policy, RoundTripOverClampRange) {
  for (int i = -3000; i <= 3000; ++i) {
    const double z = i / 100.0;
    // Near the clamp, 1 - x carries only ~e^-|z| relative precision.
    EXPECT_NEAR(logit_from_policy(policy_from_logit(z)), z, 1e-15 * (2.0 + std::exp(std::abs(z)))) << z;
  }
}

TEST(Policy, MonotoneOnRandomPairs) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 10000; ++i) {
    double a = u(gen), b = u(gen);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    EXPECT_LE(policy_from_logit(a), policy_from_logit(b));
    if (b - a > 1e-9) EXPECT_LT(policy_from_logit(a), policy_from_logit(b));
  }
}

TEST(Reinforce, AllCooperateTrajectory) {
  const PayoffParams p{3.0, 0.1, 2, 0.01, 0.0};
  const auto t = make_traj({{Action::C, Action::C}, {Action::C, Action::C}}, p);
  EXPECT_NEAR(reinforce_update(t, 0.5, p), 0.045, 1e-15);
}

TEST(Reinforce, AllDefectTrajectory) {
  const PayoffParams p{3.0, 0.1, 2, 0.01, 0.0};
  const auto t = make_traj({{Action::D, Action::D}, {Action::D, Action::D}}, p);
  EXPECT_NEAR(reinforce_update(t, 0.5, p), -0.0015, 1e-15);
}

TEST(Reinforce, ZeroRewardGivesZeroUpdate) {
  const PayoffParams p{3.0, 0.1, 2, 0.01, 0.0};
  EpisodeTrajectory t;
  t.actions = {{Action::C, Action::D}, {Action::C, Action::D}};
  t.rewards = {0.0, 0.0};
  EXPECT_EQ(reinforce_update(t, 0.3, p), 0.0);
}

TEST(Reinforce, BaselineShiftsReturns) {
  PayoffParams p{3.0, 0.1, 2, 0.01, 1.0};
  const auto t = make_traj({{Action::C, Action::C}, {Action::D, Action::C}}, p);
  // R0 = 6.1, R1 = 3.1; scores 0.6 and -0.4 at x = 0.4.
  EXPECT_NEAR(reinforce_update(t, 0.4, p), 0.01 * ((6.1 - 1.0) * 0.6 + (3.1 - 1.0) * -0.4), 1e-15);
}

TEST(Reinforce, LengthMismatchThrows) {
  const PayoffParams p{3.0, 0.1, 3, 0.01, 0.0};
  const auto t = make_traj({{Action::C, Action::C}}, p);
  EXPECT_THROW(reinforce_update(t, 0.5, p), std::invalid_argument);
}

TEST(Reinforce, TwoParameterUpdateIsAntisymmetric) {
  // The psi_D increment computed from its own score function 1{a = D} - (1 - x)
  // is the negative of the psi_C increment.
  const PayoffParams p{3.0, 0.1, 2, 0.01, 0.2};
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 200; ++i) {
    const double x = (i + 0.5) / 200.0;
    EpisodeTrajectory t;
    for (int h = 0; h < 2; ++h) {
      Round r{coin(gen) ? Action::C : Action::D, coin(gen) ? Action::C : Action::D};
      t.actions.push_back(r);
      t.rewards.push_back(payoff(r.focal, r.opponent, p));
    }
    double d_psi_D = 0.0, R = 0.0;
    for (int h = 1; h >= 0; --h) {
      R += t.rewards[h];
      d_psi_D += (R - p.beta) * ((t.actions[h].focal == Action::D ? 1.0 : 0.0) - (1.0 - x));
    }
    EXPECT_NEAR(p.alpha * d_psi_D, -reinforce_update(t, x, p), 1e-15);
  }
}
