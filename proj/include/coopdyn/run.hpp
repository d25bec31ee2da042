#pragma once

// Runs one ExperimentConfig end to end and writes its output directory.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coopdyn/abm.hpp"
#include "coopdyn/experiment.hpp"
#include "coopdyn/fpe.hpp"
#include "coopdyn/io.hpp"
#include "coopdyn/meanfield.hpp"
#include "coopdyn/stationary.hpp"
#include "coopdyn/verify.hpp"

namespace coopdyn {

struct RunOutcome {
  bool ok = true;          // false when verify finds a failing invariant
  std::string summary;
  nlohmann::ordered_json diagnostics;
};

namespace detail {

inline nlohmann::ordered_json fpe_diag_json(const FpeDiagnostics& d) {
  return {{"steps", d.steps},
          {"max_step_mass_drift", d.max_mass_drift},
          {"total_mass_drift", d.total_mass_drift},
          {"floored_mass", d.floored_mass},
          {"min_dt", d.min_dt}};
}

inline nlohmann::ordered_json series_summary(const SnapshotSeries& s, double time_scale) {
  const auto& last = s.back();
  return {{"final_t", last.t * time_scale},
          {"final_mean", last.mean},
          {"final_variance", last.variance},
          {"final_mass_below_0.1", last.density.mass_in(0.0, 0.1)},
          {"final_mass_above_0.9", last.density.mass_in(0.9, 1.0)},
          {"final_boundary_mass_2pct", boundary_mass(last.density, 0.02)}};
}

inline std::string nan_or(double v) { return std::isnan(v) ? "nan" : format_number(v); }

inline void write_meta(const std::filesystem::path& dir, const ExperimentConfig& c, const std::string& hash,
                       double wall, const nlohmann::ordered_json& diagnostics) {
  nlohmann::ordered_json meta;
  meta["config"] = to_json(c);
  meta["config_hash"] = hash;
  meta["seed"] = c.seed;
  meta["mode"] = std::string(to_string(c.mode));
  meta["version"] = kVersion;
  meta["wall_time_s"] = wall;
  meta["diagnostics"] = diagnostics;
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

/// Loads a stored ABM run, refusing runs whose rule, payoff, init or grid differ.
inline SnapshotSeries load_abm_run(const std::filesystem::path& dir, const ExperimentConfig& c) {
  const auto meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  const ExperimentConfig other = parse_config(meta.at("config").dump());
  if (comparison_settings(other) != comparison_settings(c))
    throw ConfigError("refusing to compare: " + dir.string() + " was produced with different rule/payoff/init/grid");
  auto loaded = read_series(dir);
  if (loaded.hash != meta.at("config_hash").get<std::string>())
    throw IoError(dir.string() + ": snapshots.csv hash does not match meta.json");
  for (auto& s : loaded.series) s.t /= other.time_scale;
  return loaded.series;
}

}  // namespace detail

inline RunOutcome run(const ExperimentConfig& c) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir = c.output_dir;
  const std::string hash = config_hash(c);
  const double ts = c.time_scale;
  RunOutcome r;

  switch (c.mode) {
    case Mode::abm: {
      const auto series = replicate(c.sim_config(*c.abm), c.abm->replicates);
      write_series(dir, series, hash, ts);
      r.diagnostics = detail::series_summary(series, ts);
      break;
    }
    case Mode::fpe: {
      const FpeConfig fc = c.fpe_config(*c.fpe);
      FpeDiagnostics d;
      const auto series = solve_fpe(fc, &d);
      write_series(dir, series, hash, ts);
      r.diagnostics = detail::series_summary(series, ts);
      r.diagnostics["solver"] = detail::fpe_diag_json(d);
      if (c.fpe->particles) {
        const auto particles = sde_particles(fc, c.fpe->n_particles, c.seed, c.fpe->particle_dt);
        write_series(dir / "particles", particles, hash, ts);
        double w1 = 0.0;
        for (std::size_t k = 0; k < series.size(); ++k)
          w1 = std::max(w1, wasserstein1(series[k].density, particles[k].density));
        r.diagnostics["max_w1_fpe_particles"] = w1;
      }
      break;
    }
    case Mode::meanfield: {
      const Density rho0 = init_density(c.init, c.grid);
      const auto series =
          solve_meanfield(c.rule, rho0, c.payoff, snapshot_times(c.meanfield->T, c.meanfield->n_snapshots),
                          c.meanfield->dt);
      write_series(dir, series, hash, ts);
      r.diagnostics = detail::series_summary(series, ts);
      break;
    }
    case Mode::stationary: {
      const auto result = solve_stationary(c.stationary_config(*c.stationary));
      // t is the continuation stage index.
      SnapshotSeries series;
      for (std::size_t k = 0; k < result.stage_densities.size(); ++k)
        series.push_back(make_snapshot(static_cast<double>(k), result.stage_densities[k]));
      write_series(dir, series, hash, 1.0);
      nlohmann::ordered_json stages = nlohmann::ordered_json::array();
      for (const auto& s : result.stages)
        stages.push_back({{"epsilon", s.epsilon},
                          {"iterations", s.iterations},
                          {"converged", s.converged},
                          {"w1_residual", s.w1_residual},
                          {"weak_residual", s.weak.absolute},
                          {"weak_residual_relative", s.weak.relative},
                          {"weak_residual_regularised", s.weak_regularised.absolute},
                          {"boundary_fraction", s.boundary_fraction}});
      nlohmann::ordered_json report{{"config_hash", hash},
                                    {"converged", result.converged()},
                                    {"test_functions", "phi_k = (3x^2 - 2x^3)^k, k = 1..6, scaled to max|phi_k''| = 1"},
                                    {"stages", stages}};
      write_file_atomic(dir / "residual.json", report.dump(2) + "\n");
      r.diagnostics = {{"converged", result.converged()}, {"final_mean", mean(result.density)}};
      if (!result.converged()) r.summary = "warning: fixed-point iteration did not converge at every epsilon";
      break;
    }
    case Mode::compare: {
      const auto& b = *c.compare;
      SnapshotSeries abm = b.abm_dir.empty() ? replicate(c.sim_config(b.abm), b.abm.replicates)
                                             : detail::load_abm_run(b.abm_dir, c);
      std::vector<double> times;
      for (const auto& s : abm) times.push_back(s.t);
      const Density rho0 = init_density(c.init, c.grid);
      FpeDiagnostics d;
      const auto fpe = evolve_fpe(c.rule, c.payoff, rho0, times, b.cfl_safety, false, &d);
      SnapshotSeries mf;
      if (b.meanfield) mf = solve_meanfield(c.rule, rho0, c.payoff, times);

      std::string csv = "# config_hash: " + hash + "\nt,w1_abm_fpe,w1_fpe_meanfield,mean_abm,mean_fpe,var_abm,var_fpe\n";
      double worst = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double w_af = wasserstein1(abm[k].density, fpe[k].density);
        const double w_fm = b.meanfield ? wasserstein1(fpe[k].density, mf[k].density)
                                        : std::numeric_limits<double>::quiet_NaN();
        worst = std::max(worst, w_af);
        csv += format_number(times[k] * ts) + ',' + format_number(w_af) + ',' + detail::nan_or(w_fm) + ',' +
               format_number(abm[k].mean) + ',' + format_number(fpe[k].mean) + ',' + format_number(abm[k].variance) +
               ',' + format_number(fpe[k].variance) + '\n';
      }
      write_file_atomic(dir / "compare.csv", csv);
      if (b.abm_dir.empty()) {
        write_series(dir / "abm", abm, hash, ts);
        detail::write_meta(dir / "abm", c, hash, 0.0, detail::series_summary(abm, ts));
      }
      write_series(dir / "fpe", fpe, hash, ts);
      if (b.meanfield) write_series(dir / "meanfield", mf, hash, ts);
      r.diagnostics = {{"max_w1_abm_fpe", worst},
                       {"abm", detail::series_summary(abm, ts)},
                       {"fpe", detail::series_summary(fpe, ts)},
                       {"fpe_solver", detail::fpe_diag_json(d)}};
      break;
    }
    case Mode::verify: {
      const auto checks = run_verification(c.seed);
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& chk : checks) {
        rows.push_back({{"name", chk.name}, {"passed", chk.passed}, {"detail", chk.detail}});
        r.summary += std::string(chk.passed ? "PASS " : "FAIL ") + chk.name +
                     (chk.detail.empty() ? "" : " (" + chk.detail + ")") + "\n";
        r.ok &= chk.passed;
      }
      write_file_atomic(dir / "verify.json",
                        nlohmann::ordered_json{{"config_hash", hash}, {"passed", r.ok}, {"checks", rows}}.dump(2) + "\n");
      r.diagnostics = {{"passed", r.ok}};
      break;
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_meta(dir, c, hash, wall, r.diagnostics);
  return r;
}

}  // namespace coopdyn
