#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "coopdyn/fpe.hpp"
#include "coopdyn/meanfield.hpp"

using namespace coopdyn;

namespace {

const PayoffParams kP{3.0, 0.1, 2, 0.01, 0.0};

FpeCoefficients constant_coefficients(std::size_t n, double a, double b2) {
  return {std::vector<double>(n, a), std::vector<double>(n + 1, a), std::vector<double>(n, b2)};
}

}  // namespace

TEST(Coefficients, VanishAtBoundaries) {
  const Grid g(200);
  const auto d = init_density(InitSpec::beta(2.0, 2.0), g);
  for (PartnerRule r : kAllRules) {
    const auto c = coefficients(r, d, kP);
    const double scale = 4.0 * g.width() * g.width();
    for (std::size_t i : {std::size_t{0}, std::size_t{199}}) {
      EXPECT_LT(std::abs(c.A[i]), scale);
      EXPECT_LT(c.B2[i], scale);
    }
    EXPECT_EQ(c.A_face.front(), 0.0);
    EXPECT_EQ(c.A_face.back(), 0.0);
    for (double b : c.B2) EXPECT_GE(b, 0.0);
  }
}

TEST(Coefficients, DriftOnlyStay) {
  const Grid g(200);
  const auto d = init_density(InitSpec::beta(2.0, 2.0), g);
  const auto c = coefficients(PartnerRule::Stay, d, kP, true);
  for (std::size_t i = 0; i < 200; ++i) {
    const double x = g.center(i);
    EXPECT_NEAR(c.A[i], -4.0 * 0.01 * 0.1 * x * x * (1 - x) * (1 - x), 1e-17);
    EXPECT_EQ(c.B2[i], 0.0);
  }
}

TEST(Coefficients, FormulaAgainstDirectEvaluation) {
  const Grid g(200);
  const auto d = init_density(InitSpec::beta(2.0, 5.0), g);
  const auto m = moments(d, 8);
  for (PartnerRule r : kAllRules) {
    const auto c = coefficients(r, d, kP);
    for (std::size_t i = 0; i < 200; i += 7) {
      const double x = g.center(i);
      const double s = sigma_CC(r, x, m, kP);
      const double A = 2.0 * kP.alpha * x * x * (1 - x) * (1 - x) * delta_G(r, 2, x, m, kP) +
                       2.0 * x * (1 - x) * (1 - 2 * x) * s;
      EXPECT_NEAR(c.A[i], A, 1e-13);
      EXPECT_NEAR(c.B2[i], 4.0 * x * x * (1 - x) * (1 - x) * s, 1e-13);
    }
  }
}

TEST(Coefficients, MidpointKillsNoiseInducedDrift) {
  const Grid g(201);
  const auto d = init_density(InitSpec::beta(2.0, 2.0), g);
  const auto c = coefficients(PartnerRule::OFT, d, kP);
  EXPECT_NEAR(c.A[100], 2.0 * kP.alpha / 16.0 * (3.0 * variance(d) - 0.2), 1e-15);
}

TEST(SigmaProfile, InterpolatesExactly) {
  const Grid g(200);
  for (auto spec : {InitSpec::beta(2.0, 2.0), InitSpec::beta(2.0, 5.0), InitSpec::uniform(), InitSpec::dirac(0.3)}) {
    const auto m = moments(init_density(spec, g), 8);
    for (PartnerRule r : kAllRules) {
      const SigmaProfile prof(r, m, kP);
      for (int i = 0; i <= 100; ++i) {
        const double x = i / 100.0;
        EXPECT_NEAR(prof(x), sigma_CC(r, x, m, kP), 1e-15);
      }
    }
  }
}

TEST(Step, NoDynamicsIsIdentity) {
  const Grid g(50);
  const auto d = init_density(InitSpec::beta(2.0, 5.0), g);
  const auto next = fpe_step(d, constant_coefficients(50, 0.0, 0.0), 10.0);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(next.cell_mass()[i], d.cell_mass()[i]);
}

TEST(Step, PureAdvectionMovesMassRight) {
  const Grid g(50);
  auto c = constant_coefficients(50, 0.1, 0.0);
  c.A_face.front() = c.A_face.back() = 0.0;
  Density d = init_density(InitSpec::uniform(), g);
  const double m0 = mean(d);
  for (int s = 0; s < 100; ++s) d = fpe_step(d, c, 0.1);
  EXPECT_GT(mean(d), m0);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-12);
}

TEST(Step, CflViolationThrows) {
  const Grid g(50);
  auto c = constant_coefficients(50, 0.1, 0.0);
  const double limit = max_stable_dt(c, g);
  EXPECT_NEAR(limit, 0.02 / 0.1, 1e-15);
  const auto d = init_density(InitSpec::uniform(), g);
  EXPECT_NO_THROW(fpe_step(d, c, limit));
  EXPECT_THROW(fpe_step(d, c, 1.01 * limit), NumericalError);
  c = constant_coefficients(50, 0.0, 1e-3);
  EXPECT_NEAR(max_stable_dt(c, g, 0.5), 0.5 * 0.02 * 0.02 / 1e-3, 1e-15);
  EXPECT_EQ(max_stable_dt(constant_coefficients(50, 0.0, 0.0), g), std::numeric_limits<double>::infinity());
}

TEST(Step, MassConservedOverManySteps) {
  const Grid g(200);
  Density d = init_density(InitSpec::beta(2.0, 2.0), g);
  PayoffParams p = kP;
  p.alpha = 0.1;
  double drift = 0.0, floored = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const auto c = coefficients(PartnerRule::OFT, d, p);
    FpeStepDiagnostics sd;
    d = fpe_step(d, c, max_stable_dt(c, g, 0.5), &sd);
    drift += sd.mass_drift;
    floored += sd.floored_mass;
  }
  EXPECT_LT(drift, 1e-10);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-10);
  EXPECT_LT(floored, 1e-12);
}

TEST(Solve, StayConcentratesNearZero) {
  FpeConfig c;
  c.rule = PartnerRule::Stay;
  c.T = 5000.0;
  c.n_snapshots = 10;
  FpeDiagnostics d;
  const auto s = solve_fpe(c, &d);
  EXPECT_LT(s.back().mean, s.front().mean);
  EXPECT_GT(s.back().density.mass_in(0.0, 0.25), 0.5);
  EXPECT_LT(d.total_mass_drift, 1e-10);
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LE(s[k].mean, s[k - 1].mean + 1e-15);
}

TEST(Solve, ValidationErrors) {
  FpeConfig c;
  c.payoff.H = 3;
  EXPECT_THROW(solve_fpe(c), std::invalid_argument);
  c.drift_only = true;
  c.T = 10.0;
  EXPECT_NO_THROW(solve_fpe(c));
  c = FpeConfig{};
  c.cfl_safety = 1.5;
  EXPECT_THROW(solve_fpe(c), std::invalid_argument);
  c = FpeConfig{};
  c.T = 0.0;
  EXPECT_THROW(solve_fpe(c), std::invalid_argument);
}

TEST(Solve, ExplicitTimesAreHonoured) {
  FpeConfig c;
  c.times = {50.0, 0.0, 10.0};
  const auto s = solve_fpe(c);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].t, 0.0);
  EXPECT_EQ(s[1].t, 10.0);
  EXPECT_EQ(s[2].t, 50.0);
}

TEST(Solve, GridConvergence) {
  FpeConfig c;
  c.T = 1000.0;
  c.n_snapshots = 1;
  const auto coarse = solve_fpe(c);
  c.grid = Grid(400);
  const auto fine = solve_fpe(c);
  EXPECT_LT(wasserstein1(coarse.back().density, rebin(fine.back().density, Grid(200))), 2e-3);
}

TEST(Particles, DeterministicCharacteristicWithoutNoise) {
  FpeConfig c;
  c.rule = PartnerRule::Stay;
  c.drift_only = true;
  c.init = InitSpec::dirac(0.5);
  c.T = 1000.0;
  c.n_snapshots = 1;
  const auto s = sde_particles(c, 200, 1, 0.05);
  EXPECT_EQ(s.back().variance, 0.0);
  EXPECT_NEAR(s.back().mean, flow_stay_switch(0.5, 1000.0, kP), 0.5 * c.grid.width());
}

TEST(Particles, SeedDeterminismAndValidation) {
  FpeConfig c;
  c.T = 100.0;
  c.n_snapshots = 3;
  const auto a = sde_particles(c, 1000, 9), b = sde_particles(c, 1000, 9), d = sde_particles(c, 1000, 10);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].density.cell_mass(), b[k].density.cell_mass());
  EXPECT_NE(a.back().density.cell_mass(), d.back().density.cell_mass());
  EXPECT_THROW(sde_particles(c, 99, 1), std::invalid_argument);
}

TEST(DerivativeCheck, UniformBelowThreshold) {
  FpeConfig c;
  c.init = InitSpec::uniform();
  const auto r = mean_policy_derivative_check(c, {1e-6, 1e-5, 4e-5});
  EXPECT_TRUE(r.precondition_met);
  EXPECT_NEAR(r.delta_G0, 0.05, 1e-4);
  // I(0) = dG / 30 for the uniform law.
  EXPECT_NEAR(r.I0, r.delta_G0 / 30.0, 1e-8);
  EXPECT_NEAR(r.alpha_star, 4.34e-5, 0.01e-5);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.below_threshold);
    EXPECT_TRUE(e.positive) << e.alpha;
  }
  EXPECT_TRUE(r.all_positive());
}

TEST(DerivativeCheck, DiracFailsPrecondition) {
  FpeConfig c;
  c.init = InitSpec::dirac(0.5);
  const auto r = mean_policy_derivative_check(c, {1e-5});
  EXPECT_FALSE(r.precondition_met);
  EXPECT_NEAR(r.delta_G0, -0.2, 1e-15);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_FALSE(r.all_positive());
  EXPECT_NE(r.message.find("precondition"), std::string::npos);
}

TEST(BoundaryMass, CountsBothEnds) {
  const Grid g(100);
  std::vector<double> m(100, 0.0);
  m[0] = m[99] = m[50] = 1.0;
  EXPECT_NEAR(boundary_mass(Density(g, m), 0.02), 2.0 / 3.0, 1e-15);
}
