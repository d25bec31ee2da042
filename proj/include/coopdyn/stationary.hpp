#pragma once

// Stationary distributions of the Fokker-Planck equation. For a frozen trial
// law eta the zero-flux solution of the regularised equation (B^2 -> B^2 + eps)
// is
//   F^eps[eta](x) ~ exp(psi(x)) / (B^2(x) + eps),  psi(x) = int_0^x 2A / (B^2 + eps),
// and a stationary law is a fixed point eta = F^eps[eta]. Fixed points are
// found by damped iteration, warm-started along a decreasing eps schedule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopdyn/errors.hpp"
#include "coopdyn/fpe.hpp"
#include "coopdyn/game.hpp"
#include "coopdyn/population.hpp"

namespace coopdyn {

inline Density fixed_point_map(const Density& eta, double epsilon, const PayoffParams& p, PartnerRule rule) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("fixed_point_map: epsilon must be positive");
  if (p.H != 2) throw std::invalid_argument("fixed_point_map requires H = 2");
  const DriftDiffusion dd(rule, moments(eta, coefficient_moment_order(p.H)), p, false);
  const Grid& g = eta.grid();
  const std::size_t n = g.n_cells();
  auto integrand = [&](double x) { return 2.0 * dd.A(x) / (dd.B2(x) + epsilon); };

  // psi at the centres: trapezoid over half cells [face_i, centre_i] and [centre_i, face_{i+1}].
  const double half = 0.5 * g.width();
  std::vector<double> logw(n);
  double psi = 0.0;
  double prev = integrand(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xc = g.center(i);
    const double fc = integrand(xc);
    psi += 0.5 * half * (prev + fc);
    logw[i] = psi - std::log(dd.B2(xc) + epsilon);
    const double ff = integrand(g.face(i + 1));
    psi += 0.5 * half * (fc + ff);
    prev = ff;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  if (!std::isfinite(top)) throw NumericalError("fixed_point_map: exponent left the representable range");
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = std::exp(logw[i] - top);
  return Density(g, std::move(mass));
}

/// Test functions for the weak residual: phi_k = s^k with s = 3x^2 - 2x^3,
/// k = 1..6, each scaled so that max |phi_k''| = 1. Every phi_k has
/// phi_k'(0) = phi_k'(1) = 0.
struct TestFunction {
  int k = 1;
  double scale = 1.0;

  double d1(double x) const {
    const double s = x * x * (3.0 - 2.0 * x);
    const double ds = 6.0 * x * (1.0 - x);
    return scale * k * std::pow(s, k - 1) * ds;
  }

  double d2(double x) const {
    const double s = x * x * (3.0 - 2.0 * x);
    const double ds = 6.0 * x * (1.0 - x);
    const double dds = 6.0 - 12.0 * x;
    const double a = k >= 2 ? k * (k - 1) * std::pow(s, k - 2) * ds * ds : 0.0;
    return scale * (a + k * std::pow(s, k - 1) * dds);
  }
};

inline std::vector<TestFunction> residual_test_functions() {
  std::vector<TestFunction> out;
  for (int k = 1; k <= 6; ++k) {
    TestFunction f{k, 1.0};
    double peak = 0.0;
    for (int j = 0; j <= 20000; ++j) peak = std::max(peak, std::abs(f.d2(j / 20000.0)));
    f.scale = 1.0 / peak;
    out.push_back(f);
  }
  return out;
}

struct WeakResidual {
  double absolute = 0.0;  // max_k |int [A phi_k' + 1/2 B^2 phi_k''] drho|
  double relative = 0.0;  // the same, each term divided by int [|A phi_k'| + 1/2 |B^2 phi_k''|] drho
};

/// Residual of the stationary weak form with diffusion B^2 + epsilon
/// (epsilon = 0 is the unregularised equation).
inline WeakResidual weak_residual(const Density& rho, const PayoffParams& p, PartnerRule rule, double epsilon = 0.0) {
  const DriftDiffusion dd(rule, moments(rho, coefficient_moment_order(p.H)), p, false);
  WeakResidual r;
  for (const auto& phi : residual_test_functions()) {
    const double value = rho.expect([&](double x) { return dd.A(x) * phi.d1(x) + 0.5 * (dd.B2(x) + epsilon) * phi.d2(x); });
    const double size =
        rho.expect([&](double x) { return std::abs(dd.A(x) * phi.d1(x)) + 0.5 * std::abs((dd.B2(x) + epsilon) * phi.d2(x)); });
    r.absolute = std::max(r.absolute, std::abs(value));
    if (size > 0.0) r.relative = std::max(r.relative, std::abs(value) / size);
  }
  return r;
}

struct StationaryConfig {
  PartnerRule rule = PartnerRule::OFT;
  PayoffParams payoff{};
  Grid grid{200};
  InitSpec init = InitSpec::uniform();
  std::vector<double> epsilon_schedule{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  double damping = 0.5;
  std::size_t max_iters = 20000;
  double tol_w1 = 1e-8;
  /// Boundary band used for the concentration diagnostic.
  double boundary_band = 0.05;

  void validate() const {
    payoff.validate();
    init.validate();
    if (payoff.H != 2) throw std::invalid_argument("stationary solver requires H = 2");
    if (epsilon_schedule.empty()) throw std::invalid_argument("epsilon schedule is empty");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
      if (!(epsilon_schedule[i] > 0.0)) throw std::invalid_argument("epsilon values must be positive");
      if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1]))
        throw std::invalid_argument("epsilon schedule must be strictly decreasing");
    }
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (!(tol_w1 > 0.0)) throw std::invalid_argument("tol_w1 must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  }
};

struct StationaryStage {
  double epsilon = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double w1_residual = 0.0;  // W1(eta, F^eps[eta]) for the returned eta
  WeakResidual weak;              // unregularised equation
  WeakResidual weak_regularised;  // equation at this stage's epsilon
  double boundary_fraction = 0.0;
};

struct StationaryResult {
  Density density;
  std::vector<StationaryStage> stages;
  std::vector<Density> stage_densities;  // converged iterate of each stage

  bool converged() const {
    return std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.converged; });
  }
  const StationaryStage& final_stage() const { return stages.back(); }
};

inline StationaryResult solve_stationary(const StationaryConfig& config) {
  config.validate();
  const double lambda = config.damping;
  Density eta = init_density(config.init, config.grid);
  StationaryResult result;
  for (double eps : config.epsilon_schedule) {
    StationaryStage stage;
    stage.epsilon = eps;
    Density image = fixed_point_map(eta, eps, config.payoff, config.rule);
    double gap = wasserstein1(eta, image);
    while (gap >= config.tol_w1 && stage.iterations < config.max_iters) {
      std::vector<double> mass(eta.n_cells());
      for (std::size_t i = 0; i < mass.size(); ++i)
        mass[i] = (1.0 - lambda) * eta.cell_mass()[i] + lambda * image.cell_mass()[i];
      eta = Density(eta.grid(), std::move(mass), (1.0 - lambda) * eta.left_atom(), (1.0 - lambda) * eta.right_atom());
      image = fixed_point_map(eta, eps, config.payoff, config.rule);
      gap = wasserstein1(eta, image);
      ++stage.iterations;
    }
    stage.converged = gap < config.tol_w1;
    stage.w1_residual = gap;
    stage.weak = weak_residual(eta, config.payoff, config.rule);
    stage.weak_regularised = weak_residual(eta, config.payoff, config.rule, eps);
    stage.boundary_fraction = eta.mass_in(0.0, config.boundary_band) + eta.mass_in(1.0 - config.boundary_band, 1.0);
    result.stages.push_back(stage);
    result.stage_densities.push_back(eta);
  }
  result.density = eta;
  return result;
}

}  // namespace coopdyn
