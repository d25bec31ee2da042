#pragma once

// Agent-based ground truth: N logit agents, one focal agent per episode.
//
// Matching protocol: the round-0 opponent is drawn uniformly from the other
// N - 1 agents; after each round the pair either stays (per the partner rule)
// or the focal agent draws a fresh opponent the same way, with replacement.
// Opponents never learn. Matching state is reset at every episode.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <vector>

#include "coopdyn/game.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/rng.hpp"
#include "coopdyn/snapshot.hpp"

namespace coopdyn {

struct AgentPopulation {
  std::vector<double> logits;
  CounterRng rng;

  std::size_t size() const noexcept { return logits.size(); }
  double policy(std::size_t i) const noexcept { return policy_from_logit(logits[i]); }

  static AgentPopulation sample(const InitSpec& init, std::size_t n_agents, CounterRng rng) {
    init.validate();
    AgentPopulation pop{std::vector<double>(n_agents), rng};
    for (double& z : pop.logits) z = logit_from_policy(init.sample(pop.rng));
    return pop;
  }
};

struct SimConfig {
  std::size_t n_agents = 200;
  std::uint64_t episodes = 200000;
  PartnerRule rule = PartnerRule::OFT;
  PayoffParams payoff{};
  InitSpec init{};
  std::uint64_t seed = 42;
  /// Uniform cadence in episodes; 0 selects the log-spaced schedule of n_snapshots.
  std::uint64_t snapshot_every = 0;
  std::size_t n_snapshots = 100;
  Grid grid{200};

  void validate() const {
    payoff.validate();
    init.validate();
    if (n_agents < 2) throw std::invalid_argument("population needs at least two agents");
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  }

  /// Episode counts at which snapshots are taken (always includes 0 and `episodes`).
  std::vector<std::uint64_t> snapshot_episodes() const {
    std::vector<std::uint64_t> out;
    if (snapshot_every > 0) {
      for (std::uint64_t e = 0; e < episodes; e += snapshot_every) out.push_back(e);
      out.push_back(episodes);
      return out;
    }
    const double T = static_cast<double>(episodes) / static_cast<double>(n_agents);
    for (double t : snapshot_times(T, n_snapshots)) {
      auto e = static_cast<std::uint64_t>(std::llround(t * static_cast<double>(n_agents)));
      if (e > episodes) e = episodes;
      if (out.empty() || e > out.back()) out.push_back(e);
    }
    if (out.back() != episodes) out.push_back(episodes);
    return out;
  }
};

namespace detail {

inline std::size_t draw_opponent(CounterRng& rng, std::size_t n, std::size_t focal) noexcept {
  auto j = static_cast<std::size_t>(uniform_index(rng, n - 1));
  return j >= focal ? j + 1 : j;
}

}  // namespace detail

/// Plays one H-round episode for `focal` against the population.
inline void run_episode_into(AgentPopulation& pop, std::size_t focal, PartnerRule rule, const PayoffParams& p,
                             EpisodeTrajectory& traj) {
  const std::size_t n = pop.size();
  if (n < 2) throw std::invalid_argument("run_episode needs at least two agents");
  if (focal >= n) throw std::out_of_range("focal index out of range");
  const auto H = static_cast<std::size_t>(p.H);
  traj.actions.resize(H);
  traj.rewards.resize(H);
  traj.opponent_ids.resize(H);
  traj.switches.assign(H > 0 ? H - 1 : 0, false);

  const double x = pop.policy(focal);
  std::size_t opp = detail::draw_opponent(pop.rng, n, focal);
  for (std::size_t h = 0; h < H; ++h) {
    const Action a = bernoulli(pop.rng, x) ? Action::C : Action::D;
    const Action o = bernoulli(pop.rng, pop.policy(opp)) ? Action::C : Action::D;
    traj.actions[h] = {a, o};
    traj.rewards[h] = payoff(a, o, p);
    traj.opponent_ids[h] = opp;
    if (h + 1 < H && !stay_decision(rule, a, o)) {
      traj.switches[h] = true;
      opp = detail::draw_opponent(pop.rng, n, focal);
    }
  }
}

inline EpisodeTrajectory run_episode(AgentPopulation& pop, std::size_t focal, PartnerRule rule,
                                     const PayoffParams& p) {
  EpisodeTrajectory traj;
  run_episode_into(pop, focal, rule, p, traj);
  return traj;
}

/// Draws a focal agent, plays its episode and applies the REINFORCE update to
/// its logit (z moves by twice the psi_C increment). Returns the focal index.
inline std::size_t train_step(AgentPopulation& pop, PartnerRule rule, const PayoffParams& p,
                              EpisodeTrajectory& scratch) {
  const auto focal = static_cast<std::size_t>(uniform_index(pop.rng, pop.size()));
  const double x = pop.policy(focal);
  run_episode_into(pop, focal, rule, p, scratch);
  const double d_psi = reinforce_update(scratch, x, p);
  pop.logits[focal] = clamp_logit(pop.logits[focal] + 2.0 * d_psi);
  return focal;
}

inline SnapshotSeries train(const SimConfig& config) {
  config.validate();
  AgentPopulation pop = AgentPopulation::sample(config.init, config.n_agents, CounterRng(config.seed));
  const double n = static_cast<double>(config.n_agents);
  const auto marks = config.snapshot_episodes();

  SnapshotSeries out;
  out.reserve(marks.size());
  EpisodeTrajectory scratch;
  std::uint64_t done = 0;
  for (std::uint64_t mark : marks) {
    for (; done < mark; ++done) {
#ifndef NDEBUG
      const auto before = pop.logits;
      const std::size_t focal = train_step(pop, config.rule, config.payoff, scratch);
      for (std::size_t i = 0; i < pop.size(); ++i)
        if (i != focal && pop.logits[i] != before[i]) throw std::logic_error("non-focal logit changed");
#else
      train_step(pop, config.rule, config.payoff, scratch);
#endif
    }
    out.push_back(make_snapshot(static_cast<double>(mark) / n, empirical_histogram(pop.logits, config.grid)));
  }
  return out;
}

/// Seed of replicate `run`; replicate 0 reuses the master seed.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t run) noexcept {
  return run == 0 ? master : split_stream(master, run).key();
}

/// Runs n_runs independent replicates (concurrently) and averages their snapshots.
inline SnapshotSeries replicate(const SimConfig& config, std::size_t n_runs) {
  if (n_runs < 1) throw std::invalid_argument("replicate needs n_runs >= 1");
  config.validate();
  std::vector<std::future<SnapshotSeries>> jobs;
  jobs.reserve(n_runs);
  for (std::size_t r = 0; r < n_runs; ++r) {
    SimConfig c = config;
    c.seed = replicate_seed(config.seed, r);
    jobs.push_back(std::async(std::launch::async, [c] { return train(c); }));
  }
  std::vector<SnapshotSeries> runs;
  runs.reserve(n_runs);
  for (auto& j : jobs) runs.push_back(j.get());
  if (n_runs == 1) return std::move(runs.front());
  return average_series(runs);
}

/// Sample mean and variance of the psi_C increment of a fixed focal policy
/// against a frozen population, with standard errors of both estimates.
struct UpdateStatistics {
  std::uint64_t episodes = 0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
};

/// The focal agent is appended to `population_logits` and excluded from matching.
inline UpdateStatistics frozen_update_statistics(std::vector<double> population_logits, double focal_x,
                                                 PartnerRule rule, const PayoffParams& p,
                                                 std::uint64_t episodes, std::uint64_t seed) {
  if (episodes < 2) throw std::invalid_argument("need at least two episodes");
  population_logits.push_back(logit_from_policy(focal_x));
  AgentPopulation pop{std::move(population_logits), CounterRng(seed)};
  const std::size_t focal = pop.size() - 1;
  EpisodeTrajectory traj;
  // Welford accumulation of the first four central moments.
  double n = 0.0, mean = 0.0, M2 = 0.0, M3 = 0.0, M4 = 0.0;
  for (std::uint64_t e = 0; e < episodes; ++e) {
    run_episode_into(pop, focal, rule, p, traj);
    const double v = reinforce_update(traj, focal_x, p);
    const double n1 = n;
    n += 1.0;
    const double delta = v - mean;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean += dn;
    M4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * M2 - 4.0 * dn * M3;
    M3 += term1 * dn * (n - 2.0) - 3.0 * dn * M2;
    M2 += term1;
  }
  UpdateStatistics s;
  s.episodes = episodes;
  s.mean = mean;
  s.variance = M2 / (n - 1.0);
  s.mean_se = std::sqrt(s.variance / n);
  const double mu4 = M4 / n;
  const double s2 = M2 / n;
  s.variance_se = std::sqrt(std::max(0.0, (mu4 - s2 * s2) / n));
  return s;
}

}  // namespace coopdyn
