// coopdyn: run an experiment configuration and write its output directory.
//
// Exit status: 0 ok, 1 verify found a failing invariant, 2 config error,
// 3 numerical failure, 4 I/O error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coopdyn/coopdyn.hpp"

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

int emit_figure_configs(const std::filesystem::path& dir) {
  for (const auto& [name, config] : coopdyn::figure_configs()) {
    coopdyn::write_file_atomic(dir / (name + ".yaml"), coopdyn::to_yaml(config));
    auto desk = coopdyn::desk_scaled(config);
    desk.name = name + "_desk";
    desk.output_dir = "out/" + desk.name;
    coopdyn::write_file_atomic(dir / (name + "_desk.yaml"), coopdyn::to_yaml(desk));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-gradient cooperation dynamics: agent-based, Fokker-Planck and mean-field pipelines"};
  std::string config_path, figure, mode, out, emit_dir;
  std::optional<std::uint64_t> seed;
  bool desk = false, print_only = false;
  app.add_option("--config", config_path, "YAML or JSON experiment configuration");
  app.add_option("--figure", figure, "use a bundled figure configuration by name (e.g. fig1_oft)");
  app.add_option("--mode", mode, "override the mode: abm, fpe, meanfield, stationary, compare, verify");
  app.add_option("--seed", seed, "override the seed");
  app.add_option("--out", out, "override the output directory");
  app.add_flag("--desk-scale", desk, "N = 200, horizon cut fivefold, at most 5 replicates");
  app.add_flag("--print-config", print_only, "print the resolved configuration and exit");
  app.add_option("--emit-figure-configs", emit_dir, "write the bundled figure configurations to DIR and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  coopdyn::ExperimentConfig config;
  try {
    if (!emit_dir.empty()) return emit_figure_configs(emit_dir);
    if (config_path.empty() == figure.empty()) throw coopdyn::ConfigError("give exactly one of --config or --figure");
    if (!figure.empty()) {
      const auto all = coopdyn::figure_configs();
      const auto it = all.find(figure);
      if (it == all.end()) throw coopdyn::ConfigError("unknown figure configuration '" + figure + "'");
      config = it->second;
    } else {
      config = coopdyn::parse_config(coopdyn::read_file(config_path));
    }
    if (desk) config = coopdyn::desk_scaled(config);
    if (!mode.empty()) config = coopdyn::with_mode(config, coopdyn::parse_mode(mode));
    if (seed) config.seed = *seed;
    if (!out.empty()) config.output_dir = out;
    config.validate();
  } catch (const coopdyn::IoError& e) {
    std::cerr << "coopdyn: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "coopdyn: config error: " << e.what() << "\n";
    return kConfig;
  }

  if (print_only) {
    std::cout << coopdyn::to_yaml(config);
    return kOk;
  }

  try {
    const auto outcome = coopdyn::run(config);
    if (!outcome.summary.empty()) std::cout << outcome.summary;
    std::cout << "wrote " << config.output_dir << " (config_hash " << coopdyn::config_hash(config) << ")\n";
    return outcome.ok ? kOk : kVerifyFailed;
  } catch (const coopdyn::ConfigError& e) {
    std::cerr << "coopdyn: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const coopdyn::IoError& e) {
    std::cerr << "coopdyn: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "coopdyn: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "coopdyn: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}
