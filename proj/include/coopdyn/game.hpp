#pragma once

// Stage game: Prisoner's Dilemma payoffs, partner-selection rules, the
// two-action softmax policy and the episodic REINFORCE update.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coopdyn {

enum class Action { C, D };

enum class PartnerRule { OFT, ROFT, Stay, Switch };

inline constexpr std::array<PartnerRule, 4> kAllRules{PartnerRule::OFT, PartnerRule::ROFT,
                                                      PartnerRule::Stay, PartnerRule::Switch};

inline constexpr std::string_view to_string(PartnerRule rule) noexcept {
  switch (rule) {
    case PartnerRule::OFT: return "OFT";
    case PartnerRule::ROFT: return "ROFT";
    case PartnerRule::Stay: return "Stay";
    case PartnerRule::Switch: return "Switch";
  }
  return "?";
}

inline PartnerRule parse_rule(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "oft") return PartnerRule::OFT;
  if (lower == "roft") return PartnerRule::ROFT;
  if (lower == "stay") return PartnerRule::Stay;
  if (lower == "switch") return PartnerRule::Switch;
  throw std::invalid_argument("unknown partner rule '" + std::string(name) + "'");
}

/// True for the two rules whose rematching depends on the actions played.
inline constexpr bool is_selective(PartnerRule rule) noexcept {
  return rule == PartnerRule::OFT || rule == PartnerRule::ROFT;
}

struct PayoffParams {
  double b = 3.0;
  double c = 0.1;
  int H = 2;
  double alpha = 0.01;
  double beta = 0.0;

  /// Throws std::invalid_argument unless b > c > 0, H >= 1 and alpha >= 0.
  /// alpha = 0 is accepted so that a frozen population can be simulated.
  void validate() const {
    if (!(c > 0.0) || !(b > c)) throw std::invalid_argument("payoff requires b > c > 0");
    if (H < 1) throw std::invalid_argument("episode length H must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  }

  friend bool operator==(const PayoffParams&, const PayoffParams&) = default;
};

/// Focal agent's reward for one round.
constexpr double payoff(Action focal, Action opponent, const PayoffParams& p) noexcept {
  return (opponent == Action::C ? p.b : 0.0) + (focal == Action::D ? p.c : 0.0);
}

/// Whether the current pair stays together after a round.
constexpr bool stay_decision(PartnerRule rule, Action focal, Action opponent) noexcept {
  switch (rule) {
    case PartnerRule::OFT: return focal == Action::C && opponent == Action::C;
    case PartnerRule::ROFT: return focal == Action::D && opponent == Action::D;
    case PartnerRule::Stay: return true;
    case PartnerRule::Switch: return false;
  }
  return false;
}

inline constexpr double kLogitClamp = 30.0;

/// Cooperation probability of the logit z = psi_C - psi_D.
inline double policy_from_logit(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Inverse of policy_from_logit, saturating to the logit clamp at x in {0, 1}.
inline double logit_from_policy(double x) noexcept {
  if (x <= 0.0) return -kLogitClamp;
  if (x >= 1.0) return kLogitClamp;
  return std::clamp(std::log(x) - std::log1p(-x), -kLogitClamp, kLogitClamp);
}

inline double clamp_logit(double z) noexcept { return std::clamp(z, -kLogitClamp, kLogitClamp); }

struct Round {
  Action focal;
  Action opponent;
};

struct EpisodeTrajectory {
  std::vector<Round> actions;
  std::vector<double> rewards;
  std::vector<std::size_t> opponent_ids;
  std::vector<bool> switches;  // switches[h]: partner replaced after round h
};

/// Increment of psi_C over one episode:
///   alpha * sum_h (R^h - beta) (1{a_h = C} - x),  R^h = rewards[h] + ... + rewards[H-1].
/// The defection parameter moves by the negative of this amount.
inline double reinforce_update(const EpisodeTrajectory& traj, double x, const PayoffParams& p) {
  const auto H = static_cast<std::size_t>(p.H);
  if (traj.actions.size() != H || traj.rewards.size() != H)
    throw std::invalid_argument("trajectory length does not match H");
  double reward_to_go = 0.0;
  double sum = 0.0;
  for (std::size_t h = H; h-- > 0;) {
    reward_to_go += traj.rewards[h];
    const double score = (traj.actions[h].focal == Action::C ? 1.0 : 0.0) - x;
    sum += (reward_to_go - p.beta) * score;
  }
  return p.alpha * sum;
}

}  // namespace coopdyn
