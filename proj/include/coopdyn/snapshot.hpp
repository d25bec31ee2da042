#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "coopdyn/population.hpp"

namespace coopdyn {

/// Common output record of every pipeline.
struct Snapshot {
  double t = 0.0;
  Density density;
  double mean = 0.0;
  double variance = 0.0;
};

using SnapshotSeries = std::vector<Snapshot>;

inline Snapshot make_snapshot(double t, Density d) {
  const auto m = moments(d, 2);
  return Snapshot{t, std::move(d), m.mean(), m.variance()};
}

/// Snapshot times on [0, T]: t = 0 followed by `count` log-spaced times from
/// T / 1000 to T, so early transients are resolved.
inline std::vector<double> snapshot_times(double T, std::size_t count) {
  if (!(T > 0.0)) throw std::invalid_argument("snapshot horizon must be positive");
  std::vector<double> out{0.0};
  if (count == 0) return out;
  if (count == 1) {
    out.push_back(T);
    return out;
  }
  const double lo = std::log10(T) - 3.0;
  const double hi = std::log10(T);
  for (std::size_t k = 0; k < count; ++k) {
    const double e = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    out.push_back(k + 1 == count ? T : std::pow(10.0, e));
  }
  return out;
}

/// Snapshot whose time is closest to t.
inline const Snapshot& nearest(const SnapshotSeries& series, double t) {
  if (series.empty()) throw std::invalid_argument("empty snapshot series");
  return *std::min_element(series.begin(), series.end(), [t](const Snapshot& a, const Snapshot& b) {
    return std::abs(a.t - t) < std::abs(b.t - t);
  });
}

/// Cell-wise average of series recorded at identical times.
inline SnapshotSeries average_series(const std::vector<SnapshotSeries>& runs) {
  if (runs.empty()) throw std::invalid_argument("average_series: no runs");
  const auto& first = runs.front();
  SnapshotSeries out;
  out.reserve(first.size());
  const double inv = 1.0 / static_cast<double>(runs.size());
  for (std::size_t k = 0; k < first.size(); ++k) {
    const Grid grid = first[k].density.grid();
    std::vector<double> mass(grid.n_cells(), 0.0);
    double left = 0.0, right = 0.0, mean = 0.0, var = 0.0;
    for (const auto& run : runs) {
      if (run.size() != first.size() || run[k].t != first[k].t)
        throw std::invalid_argument("average_series: runs recorded at different times");
      const Density& d = run[k].density;
      for (std::size_t i = 0; i < mass.size(); ++i) mass[i] += d.cell_mass()[i] * inv;
      left += d.left_atom() * inv;
      right += d.right_atom() * inv;
      mean += run[k].mean * inv;
      var += run[k].variance * inv;
    }
    out.push_back(Snapshot{first[k].t, Density(grid, std::move(mass), left, right), mean, var});
  }
  return out;
}

}  // namespace coopdyn
