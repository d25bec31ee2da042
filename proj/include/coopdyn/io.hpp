#pragma once

// Output files. Every file is written atomically (temp file + rename) and
// carries the hash of the resolved configuration.
//
//   snapshots.csv   "# config_hash: <hex>", then t,bin_center,density rows
//   atoms.json      per snapshot: t, left_atom, right_atom, mean, variance
//   meta.json       resolved config, hash, seed, version, wall time, diagnostics

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "coopdyn/experiment.hpp"
#include "coopdyn/population.hpp"
#include "coopdyn/snapshot.hpp"

#ifndef COOPDYN_VERSION
#define COOPDYN_VERSION "0.0.0"
#endif

namespace coopdyn {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kVersion = COOPDYN_VERSION;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of the resolved configuration; the output directory does not count.
inline std::string config_hash(ExperimentConfig c) {
  c.output_dir.clear();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(c).dump())));
  return buf;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Snapshot times are multiplied by time_scale on output.
inline std::string snapshots_csv(const SnapshotSeries& series, const std::string& hash, double time_scale = 1.0) {
  std::string out = "# config_hash: " + hash + "\nt,bin_center,density\n";
  for (const auto& s : series) {
    const std::string t = format_number(s.t * time_scale);
    const Grid& g = s.density.grid();
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      out += t;
      out += ',';
      out += format_number(g.center(i));
      out += ',';
      out += format_number(s.density.value(i));
      out += '\n';
    }
  }
  return out;
}

inline nlohmann::ordered_json atoms_json(const SnapshotSeries& series, const std::string& hash,
                                         double time_scale = 1.0) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& s : series)
    rows.push_back({{"t", s.t * time_scale},
                    {"left_atom", s.density.left_atom()},
                    {"right_atom", s.density.right_atom()},
                    {"mean", s.mean},
                    {"variance", s.variance}});
  return {{"config_hash", hash}, {"snapshots", rows}};
}

inline void write_series(const std::filesystem::path& dir, const SnapshotSeries& series, const std::string& hash,
                         double time_scale = 1.0) {
  write_file_atomic(dir / "snapshots.csv", snapshots_csv(series, hash, time_scale));
  write_file_atomic(dir / "atoms.json", atoms_json(series, hash, time_scale).dump(2) + "\n");
}

struct LoadedSeries {
  std::string hash;
  SnapshotSeries series;  // times as written (already scaled)
};

/// Reads snapshots.csv (and atoms.json when present) back into densities.
/// Means and variances come from atoms.json when it exists, since ABM
/// snapshots record them from the agents rather than the histogram.
inline LoadedSeries read_series(const std::filesystem::path& dir) {
  std::istringstream in(read_file(dir / "snapshots.csv"));
  LoadedSeries out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config_hash: ", 0) != 0)
    throw IoError("snapshots.csv: missing config hash line");
  out.hash = line.substr(15);
  if (!std::getline(in, line) || line != "t,bin_center,density") throw IoError("snapshots.csv: bad header");
  std::vector<double> ts;
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t = 0.0, x = 0.0, v = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &v) != 3) throw IoError("snapshots.csv: bad row '" + line + "'");
    if (ts.empty() || ts.back() != t) {
      ts.push_back(t);
      values.emplace_back();
    }
    values.back().push_back(v);
  }
  if (ts.empty()) throw IoError("snapshots.csv: no rows");
  std::vector<std::pair<double, double>> atoms(ts.size(), {0.0, 0.0});
  std::vector<std::pair<double, double>> stats;
  if (std::filesystem::exists(dir / "atoms.json")) {
    const auto j = nlohmann::json::parse(read_file(dir / "atoms.json"));
    const auto& rows = j.at("snapshots");
    if (rows.size() != ts.size()) throw IoError("atoms.json does not match snapshots.csv");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      atoms[k] = {rows[k].at("left_atom").get<double>(), rows[k].at("right_atom").get<double>()};
      stats.emplace_back(rows[k].at("mean").get<double>(), rows[k].at("variance").get<double>());
    }
  }
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const Grid g(values[k].size());
    if (values[k].size() != values.front().size()) throw IoError("snapshots.csv: ragged snapshot");
    std::vector<double> mass(values[k].size());
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] = values[k][i] * g.width();
    out.series.push_back(make_snapshot(ts[k], Density(g, std::move(mass), atoms[k].first, atoms[k].second)));
    if (!stats.empty()) std::tie(out.series.back().mean, out.series.back().variance) = stats[k];
  }
  return out;
}

}  // namespace coopdyn
