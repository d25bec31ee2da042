#pragma once

// Deterministic mean-field pipeline. Along the drift x' = 2 alpha x^2 (1-x)^2 dG
// the characteristic function F linearises time: F(X_t) = F(x0) + 2 alpha K(t),
// K(t) = int_0^t dG ds. With x = sigmoid(z), F(x) = 2 sinh(z) + 2 z, which is
// how F and its inverse are evaluated here.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "coopdyn/errors.hpp"
#include "coopdyn/game.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/reward.hpp"
#include "coopdyn/snapshot.hpp"

namespace coopdyn {

inline constexpr double kBoundaryClamp = 1e-12;

/// F(x) = 1/(1-x) - 1/x + 2 ln(x/(1-x)); throws outside (0, 1).
inline double F(double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("F is defined on (0, 1) only");
  x = std::clamp(x, kBoundaryClamp, 1.0 - kBoundaryClamp);
  const double z = std::log(x) - std::log1p(-x);
  return 2.0 * std::sinh(z) + 2.0 * z;
}

namespace detail {

/// Root z of 2 sinh(z) + 2 z = v by safeguarded Newton on a bracket.
inline double F_inv_logit(double v) {
  if (!std::isfinite(v)) throw std::domain_error("F_inv requires a finite argument");
  if (v == 0.0) return 0.0;
  const double s = v > 0.0 ? 1.0 : -1.0;
  const double a = std::abs(v);
  // 2 sinh|z| <= |v| and 4|z| <= |v| both hold at the root.
  double lo = 0.0;
  double hi = std::min(std::asinh(a / 2.0), a / 4.0);
  double z = hi;
  for (int it = 0; it < 200; ++it) {
    const double f = 2.0 * std::sinh(z) + 2.0 * z - a;
    if (f > 0.0) hi = z;
    else lo = z;
    double next = z - f / (2.0 * std::cosh(z) + 2.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z)) || hi - lo < 1e-15) {
      z = next;
      break;
    }
    z = next;
  }
  return s * z;
}

}  // namespace detail

/// Inverse of F; exact to rounding over the whole real line.
inline double F_inv(double v) { return policy_from_logit(detail::F_inv_logit(v)); }

/// Characteristic map X_K(x) = F^{-1}(F(x) + 2 alpha K); fixes 0 and 1.
inline double characteristic(double x, double K, double alpha) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return F_inv(F(x) + 2.0 * alpha * K);
}

/// Stay/Switch flow: F(X_t) = F(x0) - 2 alpha H c t.
inline double flow_stay_switch(double x0, double t, const PayoffParams& p) {
  return characteristic(x0, -static_cast<double>(p.H) * p.c * t, p.alpha);
}

/// Transports each cell's mass to the cell containing X_K(centre). Atoms stay put.
inline Density pushforward_density(const Density& rho0, double K, double alpha, const Grid& grid) {
  std::vector<double> mass(grid.n_cells(), 0.0);
  const Grid& src = rho0.grid();
  for (std::size_t i = 0; i < rho0.n_cells(); ++i) {
    const double m = rho0.cell_mass()[i];
    if (m == 0.0) continue;
    mass[grid.cell_of(characteristic(src.center(i), K, alpha))] += m;
  }
  return Density(grid, std::move(mass), rho0.left_atom(), rho0.right_atom());
}

/// Variance of (X_K)# rho0, with cell centres as quadrature nodes.
inline double pushed_variance(const Density& rho0, double K, double alpha) {
  double s1 = rho0.right_atom();
  double s2 = rho0.right_atom();
  const Grid& g = rho0.grid();
  for (std::size_t i = 0; i < rho0.n_cells(); ++i) {
    const double m = rho0.cell_mass()[i];
    if (m == 0.0) continue;
    const double y = characteristic(g.center(i), K, alpha);
    s1 += m * y;
    s2 += m * y * y;
  }
  return std::max(0.0, s2 - s1 * s1);
}

struct CharacteristicState {
  double K = 0.0;
  double t = 0.0;
};

/// Velocity of K for rule/payoff: dG of the pushed law.
inline double K_velocity(PartnerRule rule, const Density& rho0, double K, const PayoffParams& p) {
  if (!is_selective(rule)) return -static_cast<double>(p.H) * p.c;
  if (p.H != 2) throw std::invalid_argument("selective mean-field dynamics require H = 2");
  return p.b * pushed_variance(rho0, K, p.alpha) - 2.0 * p.c;
}

namespace detail {

inline std::vector<CharacteristicState> rk4_K(PartnerRule rule, const Density& rho0, const PayoffParams& p,
                                              double T, std::size_t steps) {
  std::vector<CharacteristicState> out;
  out.reserve(steps + 1);
  const double dt = T / static_cast<double>(steps);
  double K = 0.0;
  out.push_back({K, 0.0});
  for (std::size_t s = 0; s < steps; ++s) {
    const double k1 = K_velocity(rule, rho0, K, p);
    const double k2 = K_velocity(rule, rho0, K + 0.5 * dt * k1, p);
    const double k3 = K_velocity(rule, rho0, K + 0.5 * dt * k2, p);
    const double k4 = K_velocity(rule, rho0, K + dt * k3, p);
    K += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back({K, dt * static_cast<double>(s + 1)});
  }
  return out;
}

}  // namespace detail

/// RK4 for K' = h(K), K(0) = 0, on [0, T]. The step starts at `dt` (rounded
/// down to divide T) and is halved until two successive trajectories differ
/// by less than `tol` in sup norm on the coarser time grid.
inline std::vector<CharacteristicState> solve_K(PartnerRule rule, const Density& rho0, const PayoffParams& p,
                                                double T, double dt = 0.1, double tol = 1e-8,
                                                int max_halvings = 12) {
  p.validate();
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("solve_K requires T > 0 and dt > 0");
  if (is_selective(rule) && p.H != 2) throw std::invalid_argument("selective mean-field dynamics require H = 2");
  auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  auto coarse = detail::rk4_K(rule, rho0, p, T, steps);
  for (int k = 0; k < max_halvings; ++k) {
    auto fine = detail::rk4_K(rule, rho0, p, T, 2 * steps);
    double diff = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) diff = std::max(diff, std::abs(coarse[i].K - fine[2 * i].K));
    coarse = std::move(fine);
    steps *= 2;
    if (diff < tol) return coarse;
  }
  throw NumericalError("solve_K: step refinement did not converge");
}

/// K at time t by cubic Hermite interpolation of an RK4 trajectory.
inline double K_at(const std::vector<CharacteristicState>& traj, double t, PartnerRule rule, const Density& rho0,
                   const PayoffParams& p) {
  if (traj.size() < 2) throw std::invalid_argument("K_at: trajectory too short");
  const double dt = traj[1].t - traj[0].t;
  if (t <= 0.0) return traj.front().K;
  if (t >= traj.back().t) return traj.back().K;
  auto i = std::min(static_cast<std::size_t>(t / dt), traj.size() - 2);
  const double s = (t - traj[i].t) / dt;
  const double k0 = traj[i].K, k1 = traj[i + 1].K;
  const double d0 = dt * K_velocity(rule, rho0, k0, p);
  const double d1 = dt * K_velocity(rule, rho0, k1, p);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * k0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * k1 + (s3 - s2) * d1;
}

/// Mean-field snapshots rho(t) = (X_{K(t)})# rho0 at the given times.
inline SnapshotSeries solve_meanfield(PartnerRule rule, const Density& rho0, const PayoffParams& p,
                                      const std::vector<double>& times, double dt = 0.1) {
  if (times.empty()) throw std::invalid_argument("solve_meanfield: no snapshot times");
  const double T = *std::max_element(times.begin(), times.end());
  SnapshotSeries out;
  out.reserve(times.size());
  if (!(T > 0.0)) {
    for (double t : times) out.push_back(make_snapshot(t, rho0));
    return out;
  }
  const auto traj = solve_K(rule, rho0, p, T, dt);
  for (double t : times)
    out.push_back(make_snapshot(t, pushforward_density(rho0, K_at(traj, t, rule, rho0, p), p.alpha, rho0.grid())));
  return out;
}

}  // namespace coopdyn
