#pragma once

// Independent reference implementations used only by the tests. Nothing here
// calls into the library's reward or simulation code.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "coopdyn/game.hpp"

namespace oracle {

using coopdyn::PartnerRule;

struct Law {
  std::vector<double> points;
  std::vector<double> weights;

  double moment(int l) const {
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      s += weights[i] * std::pow(points[i], l);
      t += weights[i];
    }
    return s / t;
  }
};

/// Stratified quantile points of Beta(a, b) computed by bisection on a
/// numerically integrated CDF.
inline Law beta_quantiles(double a, double b, std::size_t n) {
  const std::size_t fine = 200000;
  std::vector<double> cdf(fine + 1, 0.0);
  double prev = 0.0;
  auto pdf = [&](double x) { return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0); };
  for (std::size_t i = 1; i <= fine; ++i) {
    const double x0 = (i - 1.0) / fine, x1 = static_cast<double>(i) / fine, xm = 0.5 * (x0 + x1);
    prev += (pdf(x0) + 4.0 * pdf(xm) + pdf(x1)) / (6.0 * fine);
    cdf[i] = prev;
  }
  for (double& c : cdf) c /= prev;
  Law law;
  std::size_t j = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double q = (k + 0.5) / static_cast<double>(n);
    while (cdf[j + 1] < q) ++j;
    const double frac = (q - cdf[j]) / (cdf[j + 1] - cdf[j]);
    law.points.push_back((j + frac) / fine);
    law.weights.push_back(1.0);
  }
  return law;
}

inline bool stays(PartnerRule r, bool focal_c, bool opp_c) {
  switch (r) {
    case PartnerRule::OFT: return focal_c && opp_c;
    case PartnerRule::ROFT: return !focal_c && !opp_c;
    case PartnerRule::Stay: return true;
    case PartnerRule::Switch: return false;
  }
  return false;
}

struct EpisodeSample {
  std::vector<bool> focal_c;
  std::vector<bool> opp_c;
  std::vector<double> opp_type;
  double delta_psi = 0.0;  // psi_C increment with alpha = 1
};

/// Plays one H-round episode by direct simulation. forced[h] = +1 / -1 pins
/// the focal action at round h to C / D; 0 leaves it random.
class Simulator {
 public:
  Simulator(Law law, std::uint64_t seed) : law_(std::move(law)), gen_(seed), pick_(law_.weights.begin(), law_.weights.end()) {}

  EpisodeSample play(PartnerRule rule, double x, int H, double b, double c, double beta,
                     const std::vector<int>& forced = {}) {
    EpisodeSample s;
    double y = law_.points[pick_(gen_)];
    std::vector<double> r(H);
    for (int h = 0; h < H; ++h) {
      bool fc = u_(gen_) < x;
      if (h < static_cast<int>(forced.size()) && forced[h] != 0) fc = forced[h] > 0;
      const bool oc = u_(gen_) < y;
      s.focal_c.push_back(fc);
      s.opp_c.push_back(oc);
      s.opp_type.push_back(y);
      r[h] = (oc ? b : 0.0) + (fc ? 0.0 : c);
      if (!stays(rule, fc, oc)) y = law_.points[pick_(gen_)];
    }
    double tail = 0.0;
    for (int h = H - 1; h >= 0; --h) {
      tail += r[h];
      s.delta_psi += (tail - beta) * ((s.focal_c[h] ? 1.0 : 0.0) - x);
    }
    return s;
  }

 private:
  Law law_;
  std::mt19937_64 gen_;
  std::discrete_distribution<std::size_t> pick_;
  std::uniform_real_distribution<double> u_{0.0, 1.0};
};

/// Exact mean opponent cooperation at round h when focal action at round k is
/// pinned, by propagating the distribution over opponent identities.
inline double opponent_mean(PartnerRule rule, const Law& law, double x, std::size_t k, bool k_cooperates,
                            std::size_t h) {
  const std::size_t n = law.points.size();
  double total_w = 0.0;
  for (double w : law.weights) total_w += w;
  std::vector<double> w(n), pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = w[i] = law.weights[i] / total_w;
  for (std::size_t j = 0; j < h; ++j) {
    const double pc = j == k ? (k_cooperates ? 1.0 : 0.0) : x;
    std::vector<double> next(n, 0.0);
    double leaving = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = law.points[i];
      double stay = 0.0;
      stay += pc * y * stays(rule, true, true);
      stay += pc * (1.0 - y) * stays(rule, true, false);
      stay += (1.0 - pc) * y * stays(rule, false, true);
      stay += (1.0 - pc) * (1.0 - y) * stays(rule, false, false);
      next[i] += pi[i] * stay;
      leaving += pi[i] * (1.0 - stay);
    }
    for (std::size_t i = 0; i < n; ++i) next[i] += leaving * w[i];
    pi = next;
  }
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += pi[i] * law.points[i];
  return m;
}

inline double delta_m(PartnerRule rule, const Law& law, double x, std::size_t k, std::size_t h) {
  return opponent_mean(rule, law, x, k, true, h) - opponent_mean(rule, law, x, k, false, h);
}

/// Sum over rounds of E[R^h | a_h = C] - E[R^h | a_h = D] via the exact chain.
inline double delta_G(PartnerRule rule, const Law& law, double x, int H, double b, double c) {
  double total = -c * H;
  for (int k = 0; k < H; ++k)
    for (int h = k + 1; h < H; ++h) total += b * delta_m(rule, law, x, k, h);
  return total;
}

/// Running mean / variance with standard errors.
struct Accumulator {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double v) {
    n += 1.0;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double variance() const { return m2 / (n - 1.0); }
  double se() const { return std::sqrt(variance() / n); }
};

}  // namespace oracle
