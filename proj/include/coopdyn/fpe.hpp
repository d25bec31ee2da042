#pragma once

// Nonlocal Fokker-Planck pipeline
//   d_t rho = -d_x[A rho] + 1/2 d_xx[B^2 rho],
//   A   = 2 alpha x^2 (1-x)^2 dG[rho] + 2 x (1-x)(1-2x) Sigma_CC,
//   B^2 = 4 x^2 (1-x)^2 Sigma_CC,
// on [0, 1] with no-flux boundaries, plus the matching particle SDE.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopdyn/errors.hpp"
#include "coopdyn/game.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/reward.hpp"
#include "coopdyn/rng.hpp"
#include "coopdyn/snapshot.hpp"

namespace coopdyn {

/// Moment order needed by the coefficient formulas for horizon H.
inline std::size_t coefficient_moment_order(int H) { return static_cast<std::size_t>(std::max(3, H + 1)); }

/// Sigma_CC(x) for fixed moments. For H = 2 it is a polynomial of degree 5
/// in x, so barycentric interpolation on 9 Chebyshev points reproduces it to
/// rounding while costing a handful of flops per evaluation.
class SigmaProfile {
 public:
  static constexpr std::size_t kNodes = 9;

  SigmaProfile() = default;

  SigmaProfile(PartnerRule rule, const MomentVector& m, const PayoffParams& p) {
    for (std::size_t j = 0; j < kNodes; ++j) {
      nodes_[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) / (kNodes - 1)));
      values_[j] = sigma_CC(rule, nodes_[j], m, p);
      weights_[j] = (j % 2 == 0 ? 1.0 : -1.0) * (j == 0 || j + 1 == kNodes ? 0.5 : 1.0);
    }
  }

  double operator()(double x) const noexcept {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < kNodes; ++j) {
      const double d = x - nodes_[j];
      if (d == 0.0) return values_[j];
      const double w = weights_[j] / d;
      num += w * values_[j];
      den += w;
    }
    return std::max(0.0, num / den);
  }

 private:
  std::array<double, kNodes> nodes_{};
  std::array<double, kNodes> values_{};
  std::array<double, kNodes> weights_{};
};

/// A(x) and B^2(x) for a frozen population law.
class DriftDiffusion {
 public:
  DriftDiffusion(PartnerRule rule, const MomentVector& m, const PayoffParams& p, bool drift_only)
      : rule_(rule), m_(m), p_(p), drift_only_(drift_only) {
    if (!drift_only && p.H != 2) throw std::invalid_argument("diffusion coefficients require H = 2");
    // dG is x-independent for H <= 2 and for the non-selective rules.
    dG_constant_ = p.H <= 2 || !is_selective(rule);
    if (dG_constant_) dG_ = delta_G(rule, p.H, 0.5, m, p);
    if (!drift_only) sigma_ = SigmaProfile(rule, m, p);
  }

  double delta_G_at(double x) const { return dG_constant_ ? dG_ : delta_G(rule_, p_.H, x, m_, p_); }
  double sigma_at(double x) const { return drift_only_ ? 0.0 : sigma_(x); }

  double A(double x) const {
    const double s = x * (1.0 - x);
    return 2.0 * p_.alpha * s * s * delta_G_at(x) + 2.0 * s * (1.0 - 2.0 * x) * sigma_at(x);
  }

  double B2(double x) const {
    const double s = x * (1.0 - x);
    return 4.0 * s * s * sigma_at(x);
  }

  const MomentVector& moments() const noexcept { return m_; }

 private:
  PartnerRule rule_;
  MomentVector m_;
  PayoffParams p_;
  bool drift_only_;
  bool dG_constant_ = true;
  double dG_ = 0.0;
  SigmaProfile sigma_;
};

struct FpeCoefficients {
  std::vector<double> A;       // at cell centres
  std::vector<double> A_face;  // at the n + 1 cell faces
  std::vector<double> B2;      // at cell centres
};

inline FpeCoefficients coefficients(PartnerRule rule, const Density& d, const PayoffParams& p,
                                    bool drift_only = false) {
  const DriftDiffusion dd(rule, moments(d, coefficient_moment_order(p.H)), p, drift_only);
  const Grid& g = d.grid();
  const std::size_t n = g.n_cells();
  FpeCoefficients c{std::vector<double>(n), std::vector<double>(n + 1), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    c.A[i] = dd.A(g.center(i));
    c.B2[i] = dd.B2(g.center(i));
  }
  for (std::size_t i = 0; i <= n; ++i) c.A_face[i] = dd.A(g.face(i));
  return c;
}

/// Largest explicit step allowed by advection and diffusion, scaled by `safety`.
/// Returns +infinity when both coefficients vanish.
inline double max_stable_dt(const FpeCoefficients& c, const Grid& g, double safety = 1.0) {
  double amax = 0.0, bmax = 0.0;
  for (double a : c.A_face) amax = std::max(amax, std::abs(a));
  for (double a : c.A) amax = std::max(amax, std::abs(a));
  for (double b : c.B2) bmax = std::max(bmax, b);
  const double dx = g.width();
  double dt = std::numeric_limits<double>::infinity();
  if (amax > 0.0) dt = std::min(dt, dx / amax);
  if (bmax > 0.0) dt = std::min(dt, dx * dx / bmax);
  return safety * dt;
}

struct FpeStepDiagnostics {
  double mass_drift = 0.0;     // |sum of updated masses - 1| before any correction
  double floored_mass = 0.0;   // total negative mass removed
};

/// One explicit finite-volume step with flux
///   J_{i+1/2} = A_{i+1/2} rho_upwind - [(B^2 rho)_{i+1} - (B^2 rho)_i] / (2 dx)
/// and J = 0 on both boundary faces.
inline Density fpe_step(const Density& d, const FpeCoefficients& c, double dt,
                        FpeStepDiagnostics* diag = nullptr) {
  const Grid& g = d.grid();
  const std::size_t n = g.n_cells();
  if (c.A.size() != n || c.B2.size() != n || c.A_face.size() != n + 1)
    throw std::invalid_argument("fpe_step: coefficients do not match grid");
  if (!(dt >= 0.0)) throw std::invalid_argument("fpe_step: dt must be >= 0");
  const double limit = max_stable_dt(c, g);
  if (dt > limit * (1.0 + 1e-12))
    throw NumericalError("fpe_step: dt = " + std::to_string(dt) + " exceeds the CFL limit " + std::to_string(limit));

  const double dx = g.width();
  const auto& m = d.cell_mass();
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t f = 1; f < n; ++f) {
    const double rl = m[f - 1] / dx, rr = m[f] / dx;
    const double a = c.A_face[f];
    const double adv = a > 0.0 ? a * rl : a * rr;
    const double dif = (c.B2[f] * rr - c.B2[f - 1] * rl) / (2.0 * dx);
    flux[f] = adv - dif;
  }
  std::vector<double> next(n);
  double total = d.left_atom() + d.right_atom();
  double floored = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = m[i] - dt * (flux[i + 1] - flux[i]);
    total += next[i];
    if (next[i] < 0.0) {
      floored -= next[i];
      next[i] = 0.0;
    }
  }
  if (diag) {
    diag->mass_drift = std::abs(total - 1.0);
    diag->floored_mass = floored;
  }
  return Density(g, std::move(next), d.left_atom(), d.right_atom());
}

struct FpeConfig {
  PartnerRule rule = PartnerRule::OFT;
  PayoffParams payoff{};
  InitSpec init{};
  Grid grid{200};
  double T = 1000.0;
  double cfl_safety = 0.5;
  bool drift_only = false;
  std::size_t n_snapshots = 100;
  /// Explicit snapshot times; when empty, snapshot_times(T, n_snapshots) is used.
  std::vector<double> times;

  void validate() const {
    payoff.validate();
    init.validate();
    if (!drift_only && payoff.H != 2) throw std::invalid_argument("FPE with diffusion requires H = 2");
    if (!(T > 0.0)) throw std::invalid_argument("FPE horizon T must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
    for (double t : times)
      if (!(t >= 0.0)) throw std::invalid_argument("snapshot times must be >= 0");
  }

  std::vector<double> resolved_times() const {
    std::vector<double> out = times.empty() ? snapshot_times(T, n_snapshots) : times;
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct FpeDiagnostics {
  std::uint64_t steps = 0;
  double max_mass_drift = 0.0;    // worst per-step raw mass error
  double total_mass_drift = 0.0;  // accumulated raw mass error
  double floored_mass = 0.0;
  double min_dt = std::numeric_limits<double>::infinity();
};

/// Mass within `fraction` of either boundary, atoms included.
inline double boundary_mass(const Density& d, double fraction = 0.02) {
  return d.mass_in(0.0, fraction) + d.mass_in(1.0 - fraction, 1.0);
}

/// Integrates from `rho0` through the sorted `times`; coefficients are
/// refreshed from the current density every step.
inline SnapshotSeries evolve_fpe(PartnerRule rule, const PayoffParams& p, Density rho, const std::vector<double>& times,
                                 double cfl_safety = 0.5, bool drift_only = false,
                                 FpeDiagnostics* diag = nullptr) {
  SnapshotSeries out;
  out.reserve(times.size());
  FpeDiagnostics local;
  double t = 0.0;
  for (double target : times) {
    while (t < target) {
      const auto c = coefficients(rule, rho, p, drift_only);
      const double limit = max_stable_dt(c, rho.grid(), cfl_safety);
      double dt = std::min(limit, target - t);
      // Avoid a sliver step right before the target.
      if (target - t - dt < 1e-9 * std::max(1.0, target)) dt = target - t;
      FpeStepDiagnostics sd;
      rho = fpe_step(rho, c, dt, &sd);
      t = (dt == target - t) ? target : t + dt;
      ++local.steps;
      local.max_mass_drift = std::max(local.max_mass_drift, sd.mass_drift);
      local.total_mass_drift += sd.mass_drift;
      local.floored_mass += sd.floored_mass;
      local.min_dt = std::min(local.min_dt, dt);
    }
    out.push_back(make_snapshot(target, rho));
  }
  if (diag) *diag = local;
  return out;
}

inline SnapshotSeries solve_fpe(const FpeConfig& config, FpeDiagnostics* diag = nullptr) {
  config.validate();
  return evolve_fpe(config.rule, config.payoff, init_density(config.init, config.grid), config.resolved_times(),
                    config.cfl_safety, config.drift_only, diag);
}

inline constexpr double kParticleClamp = 1e-9;

/// Euler-Maruyama ensemble of the mean-field SDE
///   dx = A dt + 2 x (1-x) sqrt(Sigma_CC) dW,
/// with dG and Sigma_CC taken from the ensemble's own moments each step.
inline SnapshotSeries sde_particles(const FpeConfig& config, std::size_t n_particles, std::uint64_t seed,
                                    double dt = 0.5) {
  config.validate();
  if (config.payoff.H != 2) throw std::invalid_argument("sde_particles requires H = 2");
  if (n_particles < 100) throw std::invalid_argument("sde_particles needs at least 100 particles");
  if (!(dt > 0.0)) throw std::invalid_argument("sde_particles: dt must be positive");
  CounterRng rng(seed);
  std::vector<double> xs(n_particles);
  for (double& x : xs) x = std::clamp(config.init.sample(rng), kParticleClamp, 1.0 - kParticleClamp);

  const std::size_t L = coefficient_moment_order(config.payoff.H);
  auto ensemble_moments = [&] {
    std::vector<double> mu(L, 0.0);
    for (double x : xs) {
      double pw = 1.0;
      for (std::size_t l = 0; l < L; ++l) mu[l] += (pw *= x);
    }
    for (double& v : mu) v /= static_cast<double>(xs.size());
    return MomentVector(std::move(mu));
  };

  SnapshotSeries out;
  double t = 0.0;
  for (double target : config.resolved_times()) {
    while (t < target) {
      const double h = std::min(dt, target - t);
      const DriftDiffusion dd(config.rule, ensemble_moments(), config.payoff, config.drift_only);
      const double sq = std::sqrt(h);
      for (double& x : xs) {
        const double s = x * (1.0 - x);
        const double noise = config.drift_only ? 0.0 : 2.0 * s * std::sqrt(dd.sigma_at(x)) * sq * standard_normal(rng);
        x = std::clamp(x + dd.A(x) * h + noise, kParticleClamp, 1.0 - kParticleClamp);
      }
      t = (h == target - t) ? target : t + h;
    }
    out.push_back(make_snapshot(target, histogram_of_policies(xs, config.grid)));
  }
  return out;
}

struct DerivativeCheckEntry {
  double alpha = 0.0;
  bool below_threshold = false;
  double derivative = 0.0;  // d/dt of the FPE mean at t = 0
  bool positive = false;
};

struct DerivativeCheckReport {
  bool precondition_met = false;  // dG[rho0] > 0
  double delta_G0 = 0.0;
  double I0 = 0.0;                // int x^2 (1-x)^2 dG rho0
  double alpha_star = 0.0;
  std::vector<DerivativeCheckEntry> entries;
  std::string message;

  bool all_positive() const {
    return precondition_met && std::all_of(entries.begin(), entries.end(), [](const auto& e) {
             return !e.below_threshold || e.positive;
           });
  }
};

/// For each alpha, the initial growth rate of the FPE mean by one-step
/// differencing, next to the threshold alpha* = 4 I(0) / (H^2 (H(b+c) + |beta|)^2)
/// below which the mean is guaranteed to increase initially.
inline DerivativeCheckReport mean_policy_derivative_check(const FpeConfig& config, const std::vector<double>& alphas) {
  config.validate();
  DerivativeCheckReport r;
  const Density rho0 = init_density(config.init, config.grid);
  const auto m = moments(rho0, coefficient_moment_order(config.payoff.H));
  r.delta_G0 = delta_G(config.rule, config.payoff.H, 0.5, m, config.payoff);
  r.precondition_met = r.delta_G0 > 0.0;
  if (!r.precondition_met) {
    r.message = "precondition failed: dG[rho0] = " + std::to_string(r.delta_G0) + " <= 0";
    return r;
  }
  const DriftDiffusion dd0(config.rule, m, config.payoff, true);
  r.I0 = rho0.expect([&](double x) { return x * x * (1.0 - x) * (1.0 - x) * dd0.delta_G_at(x); });
  const double H = static_cast<double>(config.payoff.H);
  const double scale = H * (config.payoff.b + config.payoff.c) + std::abs(config.payoff.beta);
  r.alpha_star = 4.0 * r.I0 / (H * H * scale * scale);
  for (double alpha : alphas) {
    PayoffParams p = config.payoff;
    p.alpha = alpha;
    const auto c = coefficients(config.rule, rho0, p, config.drift_only);
    const double dt = std::min(1e-3, max_stable_dt(c, rho0.grid(), config.cfl_safety));
    const Density rho1 = fpe_step(rho0, c, dt);
    DerivativeCheckEntry e;
    e.alpha = alpha;
    e.below_threshold = alpha < r.alpha_star;
    e.derivative = (mean(rho1) - mean(rho0)) / dt;
    e.positive = e.derivative > 0.0;
    r.entries.push_back(e);
  }
  r.message = r.all_positive() ? "mean increases initially for every alpha below alpha*"
                               : "initial mean derivative not positive for some alpha below alpha*";
  return r;
}

}  // namespace coopdyn
