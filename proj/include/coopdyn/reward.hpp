#pragma once

// Reward structure induced by partner selection.
//
// Every expectation over the population law rho is contracted against a
// MomentVector: the conditional opponent law after h rounds is q^h(y) rho(y)
// with q^h a polynomial in y, so E[Y^j q^h(Y)] is exact given enough moments.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopdyn/game.hpp"
#include "coopdyn/population.hpp"

namespace coopdyn {

/// Raised when a computation needs more moments than the MomentVector carries.
class MomentOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Polynomial sum_j coeffs[j] y^j.
class PolyInY {
 public:
  PolyInY() : coeffs_{0.0} {}
  explicit PolyInY(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  static PolyInY constant(double v) { return PolyInY({v}); }

  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t j) const noexcept { return j < coeffs_.size() ? coeffs_[j] : 0.0; }

  double operator()(double y) const noexcept {
    double acc = 0.0;
    for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * y + coeffs_[j];
    return acc;
  }

  /// E[Y^shift q(Y)] under the law with moments m.
  double expect(const MomentVector& m, std::size_t shift = 0) const {
    if (degree() + shift > m.order())
      throw MomentOrderError("need moments up to order " + std::to_string(degree() + shift) +
                             ", have " + std::to_string(m.order()));
    double sum = 0.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) sum += coeffs_[j] * m[j + shift];
    return sum;
  }

  /// E[Y q(Y)].
  double expect_y(const MomentVector& m) const { return expect(m, 1); }

  PolyInY times_y() const {
    std::vector<double> out(coeffs_.size() + 1, 0.0);
    for (std::size_t j = 0; j < coeffs_.size(); ++j) out[j + 1] = coeffs_[j];
    return PolyInY(std::move(out));
  }

  PolyInY& operator+=(const PolyInY& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) coeffs_[j] += o.coeffs_[j];
    return *this;
  }
  PolyInY& operator*=(double s) {
    for (double& v : coeffs_) v *= s;
    return *this;
  }
  PolyInY& add_constant(double v) {
    coeffs_[0] += v;
    return *this;
  }

  friend PolyInY operator+(PolyInY a, const PolyInY& b) { return a += b; }
  friend PolyInY operator*(double s, PolyInY a) { return a *= s; }

  friend PolyInY operator*(const PolyInY& a, const PolyInY& b) {
    std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return PolyInY(std::move(out));
  }

 private:
  std::vector<double> coeffs_;
};

/// One round of the conditional opponent law, written for the relative
/// density q = rho^h(. | x) / rho. Normalisation E[q] = 1 is preserved.
inline PolyInY opponent_dist_step(PartnerRule rule, double x, const PolyInY& q, const MomentVector& m) {
  switch (rule) {
    case PartnerRule::OFT: {
      const double stay_mean = q.expect_y(m);
      return (x * q.times_y()).add_constant(1.0 - x * stay_mean);
    }
    case PartnerRule::ROFT: {
      const double stay_mean = q.expect_y(m);
      // (1 - x)(1 - y) q(y) + 1 - (1 - x)(1 - E[Y q])
      PolyInY kept = (1.0 - x) * (q + (-1.0) * q.times_y());
      return kept.add_constant(1.0 - (1.0 - x) * (1.0 - stay_mean));
    }
    case PartnerRule::Stay:
    case PartnerRule::Switch:
      return PolyInY::constant(1.0);
  }
  return PolyInY::constant(1.0);
}

/// g^1 = y - mu_1,  g^h = y g^{h-1} - E[Y g^{h-1}]. Requires 1 <= h <= L - 1.
inline PolyInY g_recursion(std::size_t h, const MomentVector& m) {
  if (h < 1) throw std::invalid_argument("g_recursion: h must be >= 1");
  if (h + 1 > m.order())
    throw MomentOrderError("g_recursion: h = " + std::to_string(h) + " needs moment order " +
                           std::to_string(h + 1));
  PolyInY g({-m[1], 1.0});
  for (std::size_t j = 2; j <= h; ++j) {
    const double shift = g.expect_y(m);
    g = g.times_y().add_constant(-shift);
  }
  return g;
}

namespace detail {

/// e[j] = E[Y g^j(Y)] for j = 1..h_max (e[0] unused).
inline std::vector<double> g_contractions(std::size_t h_max, const MomentVector& m) {
  if (h_max + 1 > m.order())
    throw MomentOrderError("need moment order " + std::to_string(h_max + 1) + " for round " +
                           std::to_string(h_max));
  std::vector<double> e(h_max + 1, 0.0);
  if (h_max == 0) return e;
  PolyInY g({-m[1], 1.0});
  e[1] = g.expect_y(m);
  for (std::size_t j = 2; j <= h_max; ++j) {
    g = g.times_y().add_constant(-e[j - 1]);
    e[j] = g.expect_y(m);
  }
  return e;
}

inline double delta_m_oft(std::size_t k, std::size_t h, double x, const std::vector<double>& e) {
  double sum = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    const std::size_t idx = h - k + j;
    sum += std::pow(x, static_cast<double>(idx - 1)) * e[idx];
  }
  return sum;
}

}  // namespace detail

/// Difference between the opponent's mean cooperation at round h after the
/// focal agent cooperated versus defected at round k < h.
inline double delta_m(PartnerRule rule, std::size_t k, std::size_t h, double x, const MomentVector& m) {
  if (h < k + 1) throw std::invalid_argument("delta_m requires h >= k + 1");
  switch (rule) {
    case PartnerRule::OFT: return detail::delta_m_oft(k, h, x, detail::g_contractions(h, m));
    case PartnerRule::ROFT:
      return detail::delta_m_oft(k, h, 1.0 - x, detail::g_contractions(h, m.reflected()));
    case PartnerRule::Stay:
    case PartnerRule::Switch:
      if (h + 1 > m.order()) throw MomentOrderError("delta_m: insufficient moment order");
      return 0.0;
  }
  return 0.0;
}

/// Episodic return difference G_C - G_D summed over all rounds of an H-round episode.
inline double delta_G(PartnerRule rule, int H, double x, const MomentVector& m, const PayoffParams& p) {
  if (H < 1) throw std::invalid_argument("delta_G requires H >= 1");
  const auto rounds = static_cast<std::size_t>(H);
  if (m.order() < rounds) throw MomentOrderError("delta_G needs moment order >= H");
  double total = -p.c * static_cast<double>(H);
  if (!is_selective(rule) || rounds < 2) return total;
  const bool reflect = rule == PartnerRule::ROFT;
  const double xe = reflect ? 1.0 - x : x;
  const auto e = detail::g_contractions(rounds - 1, reflect ? m.reflected() : m);
  for (std::size_t k = 0; k + 1 < rounds; ++k)
    for (std::size_t h = k + 1; h < rounds; ++h) total += p.b * detail::delta_m_oft(k, h, xe, e);
  return total;
}

/// (H - 1)(b Var - c) - c, a lower bound on delta_G under OFT and ROFT.
inline double delta_G_lower_bound(int H, double var, const PayoffParams& p) {
  if (H < 2) throw std::invalid_argument("delta_G_lower_bound requires H >= 2");
  return static_cast<double>(H - 1) * (p.b * var - p.c) - p.c;
}

// ---------------------------------------------------------------------------
// Two-round (H = 2) second-order statistics.
//
// Round-0 opponent Y0 ~ rho plays zeta0 ~ Ber(Y0); the round-1 opponent Y1 is
// Y0 when the pair stays, a fresh draw otherwise, and plays zeta1 ~ Ber(Y1).
// The stay decision depends on zeta0, so the reward covariance needs
// E[zeta0 zeta1 | a0] rather than E[Y0 Y1 | a0]; the two agree whenever the
// third central moment of rho vanishes.
// ---------------------------------------------------------------------------

inline constexpr std::size_t idx(Action a) noexcept { return a == Action::C ? 0 : 1; }

struct OpponentPairStats {
  double mean0 = 0.0;                      // E[Y0] = mu_1
  std::array<double, 2> mean1{};           // E[Y1 | a0]
  std::array<double, 2> types_product{};   // E[Y0 Y1 | a0]
  std::array<double, 2> action_product{};  // E[zeta0 zeta1 | a0]
};

inline OpponentPairStats opponent_pair_stats(PartnerRule rule, const MomentVector& m) {
  if (m.order() < 3) throw MomentOrderError("two-round statistics need moments up to order 3");
  const double m1 = m[1], m2 = m[2], m3 = m[3];
  const double var = m2 - m1 * m1;
  OpponentPairStats s;
  s.mean0 = m1;
  s.mean1 = {m1, m1};
  s.types_product = {m1 * m1, m1 * m1};
  s.action_product = {m1 * m1, m1 * m1};
  switch (rule) {
    case PartnerRule::OFT:
      s.mean1[idx(Action::C)] = m1 + var;
      s.types_product[idx(Action::C)] = m3 + m1 * m1 - m2 * m1;
      s.action_product[idx(Action::C)] = m2;
      break;
    case PartnerRule::ROFT:
      s.mean1[idx(Action::D)] = m1 - var;
      s.types_product[idx(Action::D)] = m2 - m3 + m1 * m2;
      break;
    case PartnerRule::Stay:
      s.types_product = {m2, m2};
      s.action_product = {m2, m2};
      break;
    case PartnerRule::Switch:
      break;
  }
  return s;
}

/// Conditional reward statistics of a two-round episode.
struct SecondMomentTable {
  PartnerRule rule = PartnerRule::OFT;
  OpponentPairStats pair;
  double mean_round1 = 0.0;                      // E[Y1] with a0 ~ Ber(x)
  std::array<std::array<double, 2>, 2> G{};      // G[h][a] = E[R^h | a_h = a]
  std::array<std::array<double, 2>, 2> var{};    // Var(R^h | a_h = a)
  std::array<std::array<double, 2>, 2> S{};      // S[h][a] = var + (G - beta)^2
  std::array<double, 2> cov_r0_r1{};             // Cov(r0, r1 | a0)
  std::array<std::array<double, 2>, 2> M{};      // M[a0][a1] = E[(R^0-beta)(R^1-beta) | a0, a1]

  double delta_G_round(std::size_t h) const { return G[h][0] - G[h][1]; }
};

inline SecondMomentTable second_moment_table(PartnerRule rule, double x, const MomentVector& m,
                                             const PayoffParams& p) {
  if (p.H != 2) throw std::invalid_argument("second moments are tabulated for H = 2 only");
  const double b = p.b, c = p.c, beta = p.beta;
  SecondMomentTable t;
  t.rule = rule;
  t.pair = opponent_pair_stats(rule, m);
  const double m1 = t.pair.mean0;
  const double focal_noise = c * c * x * (1.0 - x);
  t.mean_round1 = x * t.pair.mean1[0] + (1.0 - x) * t.pair.mean1[1];
  const double mbar = t.mean_round1;

  for (Action a : {Action::C, Action::D}) {
    const std::size_t i = idx(a);
    const double defect = a == Action::D ? 1.0 : 0.0;
    const double next = t.pair.mean1[i];
    t.cov_r0_r1[i] = b * b * (t.pair.action_product[i] - m1 * next);

    t.G[0][i] = b * m1 + c * defect + b * next + c * (1.0 - x);
    t.var[0][i] = b * b * m1 * (1.0 - m1) + b * b * next * (1.0 - next) + focal_noise + 2.0 * t.cov_r0_r1[i];
    t.G[1][i] = b * mbar + c * defect;
    t.var[1][i] = b * b * mbar * (1.0 - mbar);
    for (std::size_t h = 0; h < 2; ++h) t.S[h][i] = t.var[h][i] + (t.G[h][i] - beta) * (t.G[h][i] - beta);
  }

  for (Action a0 : {Action::C, Action::D}) {
    for (Action a1 : {Action::C, Action::D}) {
      const std::size_t i = idx(a0);
      const double d0 = a0 == Action::D ? 1.0 : 0.0;
      const double d1 = a1 == Action::D ? 1.0 : 0.0;
      const double next = t.pair.mean1[i];
      const double e_r0 = b * m1 + c * d0;
      const double e_r1 = b * next + c * d1;
      const double e_r1_sq = b * b * next + 2.0 * b * c * d1 * next + c * c * d1;
      const double e_r0_r1 =
          b * b * t.pair.action_product[i] + b * c * d1 * m1 + b * c * d0 * next + c * c * d0 * d1;
      t.M[i][idx(a1)] = e_r0_r1 + e_r1_sq - beta * e_r0 - 2.0 * beta * e_r1 + beta * beta;
    }
  }
  return t;
}

inline double second_moment_S(PartnerRule rule, int h, Action a, double x, const MomentVector& m,
                              const PayoffParams& p) {
  if (h != 0 && h != 1) throw std::invalid_argument("second_moment_S: h must be 0 or 1");
  return second_moment_table(rule, x, m, p).S[static_cast<std::size_t>(h)][idx(a)];
}

/// M^{0,1}_{a,a1} = E[(R^0 - beta)(R^1 - beta) | a_0 = a, a_1 = a1].
inline double conditional_moment_M(PartnerRule rule, Action a, Action a1, double x, const MomentVector& m,
                                   const PayoffParams& p) {
  return second_moment_table(rule, x, m, p).M[idx(a)][idx(a1)];
}

/// Variance of the per-episode psi_C increment for H = 2.
inline double sigma_CC(const SecondMomentTable& t, double x, double alpha) {
  const double xc = x, xd = 1.0 - x;
  const double w = xc * xc * xd * xd;
  double total = 0.0;
  for (std::size_t h = 0; h < 2; ++h) {
    const double dg = t.delta_G_round(h);
    total += xc * xd * xd * t.S[h][0] + xc * xc * xd * t.S[h][1] - w * dg * dg;
  }
  const double cov =
      w * (t.M[0][0] - t.M[1][0] - t.M[0][1] + t.M[1][1] - t.delta_G_round(0) * t.delta_G_round(1));
  total += 2.0 * cov;
  total *= alpha * alpha;
  if (total < -1e-12) throw std::logic_error("sigma_CC evaluated negative: " + std::to_string(total));
  return total < 0.0 ? 0.0 : total;
}

inline double sigma_CC(PartnerRule rule, double x, const MomentVector& m, const PayoffParams& p) {
  if (p.H != 2) throw std::invalid_argument("sigma_CC is available for H = 2 only");
  return sigma_CC(second_moment_table(rule, x, m, p), x, p.alpha);
}

/// alpha^2 H^2 (H (b + c) + |beta|)^2.
inline double sigma_CC_bound(const PayoffParams& p) {
  const double H = static_cast<double>(p.H);
  const double r = H * (p.b + p.c) + std::abs(p.beta);
  return p.alpha * p.alpha * H * H * r * r;
}

}  // namespace coopdyn
