#pragma once

// Invariant suite behind `coopdyn --mode verify`. Each check is small enough
// that the whole suite runs in a few seconds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coopdyn/abm.hpp"
#include "coopdyn/fpe.hpp"
#include "coopdyn/game.hpp"
#include "coopdyn/meanfield.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/reward.hpp"
#include "coopdyn/rng.hpp"
#include "coopdyn/stationary.hpp"

namespace coopdyn {

/// Finitely supported law on [0, 1]; its moments are always feasible.
struct DiscreteLaw {
  std::vector<double> points;
  std::vector<double> weights;

  MomentVector moments(std::size_t L) const { return MomentVector::of_points(points, weights, L); }

  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
    return s;
  }

  DiscreteLaw reflected() const {
    DiscreteLaw r = *this;
    for (double& y : r.points) y = 1.0 - y;
    return r;
  }

  static DiscreteLaw random(CounterRng& rng, std::size_t max_atoms = 6) {
    DiscreteLaw law;
    const std::size_t k = 1 + static_cast<std::size_t>(uniform_index(rng, max_atoms));
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      law.points.push_back(uniform01(rng));
      law.weights.push_back(uniform01(rng) + 1e-3);
      total += law.weights.back();
    }
    for (double& w : law.weights) w /= total;
    return law;
  }
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline CheckResult check_payoffs() {
  const PayoffParams p;
  bool ok = true;
  for (Action f : {Action::C, Action::D})
    for (Action o : {Action::C, Action::D}) {
      ok &= payoff(f, o, p) == (o == Action::C ? p.b : 0.0) + (f == Action::D ? p.c : 0.0);
      ok &= stay_decision(PartnerRule::Stay, f, o) && !stay_decision(PartnerRule::Switch, f, o);
      ok &= stay_decision(PartnerRule::OFT, f, o) == (f == Action::C && o == Action::C);
      ok &= stay_decision(PartnerRule::ROFT, f, o) == (f == Action::D && o == Action::D);
    }
  return {"payoff and stay predicates", ok, ""};
}

inline CheckResult check_characteristic() {
  double worst = 0.0, anti = 0.0;
  for (int i = -500; i <= 500; ++i) {
    const double v = i / 10.0;
    worst = std::max(worst, std::abs(F(F_inv(v)) - v) / std::max(1.0, std::abs(v)));
  }
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    worst = std::max(worst, std::abs(F_inv(F(x)) - x));
    anti = std::max(anti, std::abs(F(1.0 - x) + F(x)));
  }
  return {"F / F_inv round trip and antisymmetry", worst < 1e-10 && anti < 1e-12,
          "round trip " + sci(worst) + ", antisymmetry " + sci(anti)};
}

inline CheckResult check_h2_identity(CounterRng rng) {
  const PayoffParams p;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto m = DiscreteLaw::random(rng).moments(8);
    const double x = uniform01(rng);
    for (PartnerRule r : kAllRules) {
      const double expect = is_selective(r) ? p.b * m.variance() - 2.0 * p.c : -2.0 * p.c;
      worst = std::max(worst, std::abs(delta_G(r, 2, x, m, p) - expect));
    }
  }
  return {"H = 2 reward identity", worst < 1e-12, "max error " + sci(worst)};
}

inline CheckResult check_nonnegative_delta_m(CounterRng rng) {
  double lowest = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = DiscreteLaw::random(rng).moments(8);
    const double x = uniform01(rng);
    const auto h = 1 + static_cast<std::size_t>(uniform_index(rng, 6));
    const auto k = static_cast<std::size_t>(uniform_index(rng, h));
    for (PartnerRule r : {PartnerRule::OFT, PartnerRule::ROFT}) lowest = std::min(lowest, delta_m(r, k, h, x, m));
  }
  return {"delta_m >= 0 under OFT and ROFT", lowest >= -1e-12, "min " + sci(lowest)};
}

/// E[Y g^m g^n] = E[Y g^{m+n}] against a smooth density, by Gauss-Legendre quadrature.
inline CheckResult check_self_adjoint(CounterRng rng) {
  // 40-point Gauss-Legendre nodes on [0, 1] by Newton on P_40.
  const int N = 40;
  std::vector<double> xs(N), ws(N);
  for (int i = 0; i < N; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= N; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    xs[i] = 0.5 * (1.0 - z);
    ws[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    // Random smooth density: exp of a random cubic, normalised.
    const double a1 = 4.0 * uniform01(rng) - 2.0, a2 = 4.0 * uniform01(rng) - 2.0, a3 = 4.0 * uniform01(rng) - 2.0;
    std::vector<double> w(N);
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
      w[i] = ws[i] * std::exp(a1 * xs[i] + a2 * xs[i] * xs[i] + a3 * xs[i] * xs[i] * xs[i]);
      total += w[i];
    }
    for (double& v : w) v /= total;
    const auto m = MomentVector::of_points(xs, w, 12);
    auto E = [&](auto&& f) {
      double s = 0.0;
      for (int i = 0; i < N; ++i) s += w[i] * f(xs[i]);
      return s;
    };
    for (std::size_t a = 1; a <= 7; ++a)
      for (std::size_t b = 1; a + b <= 8; ++b) {
        const auto ga = g_recursion(a, m), gb = g_recursion(b, m), gab = g_recursion(a + b, m);
        const double lhs = E([&](double y) { return y * ga(y) * gb(y); });
        const double rhs = E([&](double y) { return y * gab(y); });
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  }
  return {"self-adjointness E[Y g^m g^n] = E[Y g^(m+n)]", worst < 1e-9, "max error " + sci(worst)};
}

inline CheckResult check_reflection(CounterRng rng) {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto law = DiscreteLaw::random(rng);
    const double x = uniform01(rng);
    for (std::size_t h = 1; h <= 6; ++h)
      for (std::size_t k = 0; k < h; ++k)
        worst = std::max(worst, std::abs(delta_m(PartnerRule::ROFT, k, h, x, law.moments(8)) -
                                         delta_m(PartnerRule::OFT, k, h, 1.0 - x, law.reflected().moments(8))));
  }
  return {"OFT / ROFT reflection symmetry", worst < 1e-10, "max error " + sci(worst)};
}

inline CheckResult check_sigma_bounds(CounterRng rng) {
  PayoffParams p;
  bool ok = true;
  double ratio = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto m = DiscreteLaw::random(rng).moments(8);
    const double x = uniform01(rng);
    for (PartnerRule r : kAllRules) {
      const double s = sigma_CC(r, x, m, p);
      ok &= s >= 0.0 && s <= sigma_CC_bound(p);
      ratio = std::max(ratio, s / sigma_CC_bound(p));
    }
  }
  return {"0 <= Sigma_CC <= bound", ok, "max Sigma_CC / bound " + sci(ratio)};
}

inline CheckResult check_w1_triangle(CounterRng rng) {
  const Grid g(50);
  auto random_density = [&] {
    std::vector<double> m(g.n_cells());
    for (double& v : m) v = uniform01(rng);
    return Density(g, std::move(m), uniform01(rng) * 0.1, uniform01(rng) * 0.1);
  };
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto a = random_density(), b = random_density(), c = random_density();
    worst = std::max(worst, wasserstein1(a, c) - wasserstein1(a, b) - wasserstein1(b, c));
  }
  return {"W1 triangle inequality", worst <= 1e-12, "max violation " + sci(worst)};
}

inline CheckResult check_fpe_mass() {
  FpeConfig c;
  c.T = 200.0;
  c.n_snapshots = 3;
  FpeDiagnostics d;
  const auto s = solve_fpe(c, &d);
  const double total = std::abs(s.back().density.total_mass() - 1.0);
  return {"FPE mass conservation", d.total_mass_drift < 1e-10 && total < 1e-10,
          "accumulated raw drift " + sci(d.total_mass_drift) + " over " + std::to_string(d.steps) + " steps"};
}

inline CheckResult check_determinism() {
  SimConfig c;
  c.n_agents = 20;
  c.episodes = 5000;
  c.n_snapshots = 5;
  const auto a = train(c), b = train(c);
  bool ok = a.size() == b.size();
  for (std::size_t i = 0; ok && i < a.size(); ++i) ok = a[i].density.cell_mass() == b[i].density.cell_mass();
  return {"seeded ABM determinism", ok, ""};
}

inline CheckResult check_stationary_map(CounterRng rng) {
  const Grid g(100);
  double worst = 0.0;
  bool finite = true;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> m(g.n_cells());
    for (double& v : m) v = uniform01(rng);
    const Density eta(g, std::move(m));
    const Density out = fixed_point_map(eta, 1e-2, PayoffParams{}, PartnerRule::OFT);
    worst = std::max(worst, std::abs(out.total_mass() - 1.0));
    for (double v : out.cell_mass()) finite &= std::isfinite(v) && v >= 0.0;
  }
  return {"stationary map normalisation", finite && worst < 1e-10, "max mass error " + sci(worst)};
}

}  // namespace detail

inline std::vector<CheckResult> run_verification(std::uint64_t seed = 42) {
  std::vector<CheckResult> out;
  out.push_back(detail::check_payoffs());
  out.push_back(detail::check_characteristic());
  out.push_back(detail::check_h2_identity(split_stream(seed, 1)));
  out.push_back(detail::check_nonnegative_delta_m(split_stream(seed, 2)));
  out.push_back(detail::check_self_adjoint(split_stream(seed, 3)));
  out.push_back(detail::check_reflection(split_stream(seed, 4)));
  out.push_back(detail::check_sigma_bounds(split_stream(seed, 5)));
  out.push_back(detail::check_w1_triangle(split_stream(seed, 6)));
  out.push_back(detail::check_fpe_mass());
  out.push_back(detail::check_determinism());
  out.push_back(detail::check_stationary_map(split_stream(seed, 7)));
  return out;
}

}  // namespace coopdyn
