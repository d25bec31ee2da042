#pragma once

// Population strategy distributions on [0, 1]: uniform finite-volume grids
// with explicit boundary atoms, moments, initial laws and the W1 metric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "coopdyn/game.hpp"
#include "coopdyn/rng.hpp"

namespace coopdyn {

class Grid {
 public:
  explicit Grid(std::size_t n_cells = 200) : n_(n_cells) {
    if (n_cells == 0) throw std::invalid_argument("grid needs at least one cell");
  }

  std::size_t n_cells() const noexcept { return n_; }
  double width() const noexcept { return 1.0 / static_cast<double>(n_); }
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) / static_cast<double>(n_); }
  double face(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(n_); }

  /// Cell containing x; x = 1 belongs to the last cell.
  std::size_t cell_of(double x) const noexcept {
    if (!(x > 0.0)) return 0;
    const auto i = static_cast<std::size_t>(x * static_cast<double>(n_));
    return std::min(i, n_ - 1);
  }

  std::vector<double> centers() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = center(i);
    return out;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
};

/// Moments mu_1..mu_L of a law on [0, 1]. Index 0 returns 1.
class MomentVector {
 public:
  MomentVector() = default;

  /// `mu` holds mu_1..mu_L.
  explicit MomentVector(std::vector<double> mu) : mu_(std::move(mu)) {
    for (double m : mu_)
      if (!std::isfinite(m)) throw std::invalid_argument("non-finite moment");
  }

  std::size_t order() const noexcept { return mu_.size(); }

  double operator[](std::size_t l) const {
    if (l == 0) return 1.0;
    if (l > mu_.size())
      throw std::out_of_range("moment order " + std::to_string(l) + " exceeds available " +
                              std::to_string(mu_.size()));
    return mu_[l - 1];
  }

  double mean() const { return (*this)[1]; }
  double variance() const { return std::max(0.0, (*this)[2] - mean() * mean()); }

  /// Moments of Z = 1 - Y.
  MomentVector reflected() const {
    std::vector<double> out(mu_.size());
    for (std::size_t l = 1; l <= mu_.size(); ++l) {
      double sum = 0.0;
      double binom = 1.0;
      for (std::size_t j = 0; j <= l; ++j) {
        sum += ((j % 2 == 0) ? 1.0 : -1.0) * binom * (*this)[j];
        binom = binom * static_cast<double>(l - j) / static_cast<double>(j + 1);
      }
      out[l - 1] = sum;
    }
    return MomentVector(std::move(out));
  }

  /// Moments of the discrete law sum_i weights[i] delta_{points[i]} (weights normalised).
  static MomentVector of_points(std::span<const double> points, std::span<const double> weights,
                                std::size_t L) {
    if (points.size() != weights.size() || points.empty())
      throw std::invalid_argument("points and weights must be non-empty and of equal size");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> mu(L, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      double power = 1.0;
      for (std::size_t l = 0; l < L; ++l) {
        power *= points[i];
        mu[l] += weights[i] * power;
      }
    }
    for (double& m : mu) m /= total;
    return MomentVector(std::move(mu));
  }

  static MomentVector of_beta(double a, double b, std::size_t L) {
    std::vector<double> mu(L);
    double m = 1.0;
    for (std::size_t l = 0; l < L; ++l) {
      m *= (a + static_cast<double>(l)) / (a + b + static_cast<double>(l));
      mu[l] = m;
    }
    return MomentVector(std::move(mu));
  }

  static MomentVector of_dirac(double p, std::size_t L) {
    std::vector<double> mu(L);
    for (std::size_t l = 0; l < L; ++l) mu[l] = std::pow(p, static_cast<double>(l + 1));
    return MomentVector(std::move(mu));
  }

  const std::vector<double>& values() const noexcept { return mu_; }

 private:
  std::vector<double> mu_;
};

struct InitSpec {
  enum class Kind { Beta, Uniform, Dirac };

  Kind kind = Kind::Beta;
  double a = 2.0;
  double b = 2.0;
  double p = 0.5;

  static InitSpec beta(double a, double b) { return {Kind::Beta, a, b, 0.5}; }
  static InitSpec uniform() { return {Kind::Uniform, 1.0, 1.0, 0.5}; }
  static InitSpec dirac(double p) { return {Kind::Dirac, 1.0, 1.0, p}; }

  void validate() const {
    if (kind == Kind::Beta && !(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)))
      throw std::invalid_argument("Beta shape parameters must be positive");
    if (kind == Kind::Dirac && !(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("Dirac location must lie in [0, 1]");
  }

  /// Closed-form moments of the law.
  MomentVector moments(std::size_t L) const {
    switch (kind) {
      case Kind::Beta: return MomentVector::of_beta(a, b, L);
      case Kind::Uniform: return MomentVector::of_beta(1.0, 1.0, L);
      case Kind::Dirac: return MomentVector::of_dirac(p, L);
    }
    return {};
  }

  double cdf(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    switch (kind) {
      case Kind::Beta: return boost::math::ibeta(a, b, x);
      case Kind::Uniform: return x;
      case Kind::Dirac: return x >= p ? 1.0 : 0.0;
    }
    return 0.0;
  }

  /// Draws a cooperation probability by inverse-CDF sampling.
  double sample(CounterRng& rng) const {
    switch (kind) {
      case Kind::Beta: return boost::math::ibeta_inv(a, b, uniform01(rng));
      case Kind::Uniform: return uniform01(rng);
      case Kind::Dirac: return p;
    }
    return p;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Beta: return "Beta(" + std::to_string(a) + "," + std::to_string(b) + ")";
      case Kind::Uniform: return "Uniform";
      case Kind::Dirac: return "Dirac(" + std::to_string(p) + ")";
    }
    return "?";
  }

  friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

/// Probability law on [0, 1]: cell masses on a uniform grid plus point masses
/// at x = 0 and x = 1. Always normalised to total mass 1.
class Density {
 public:
  Density() : Density(Grid(1), std::vector<double>{1.0}) {}

  /// Takes non-negative masses and rescales them to total 1.
  Density(Grid grid, std::vector<double> cell_mass, double left_atom = 0.0, double right_atom = 0.0)
      : grid_(grid), mass_(std::move(cell_mass)), left_(left_atom), right_(right_atom) {
    if (mass_.size() != grid_.n_cells()) throw std::invalid_argument("cell mass size does not match grid");
    double total = left_ + right_;
    for (double m : mass_) {
      if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("cell masses must be finite and >= 0");
      total += m;
    }
    if (!(left_ >= 0.0) || !(right_ >= 0.0)) throw std::invalid_argument("atoms must be >= 0");
    if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("density has no mass");
    if (total != 1.0) {
      for (double& m : mass_) m /= total;
      left_ /= total;
      right_ /= total;
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t n_cells() const noexcept { return mass_.size(); }
  const std::vector<double>& cell_mass() const noexcept { return mass_; }
  double left_atom() const noexcept { return left_; }
  double right_atom() const noexcept { return right_; }

  double total_mass() const noexcept {
    return std::accumulate(mass_.begin(), mass_.end(), 0.0) + left_ + right_;
  }

  /// Density value (mass per unit length) of cell i.
  double value(std::size_t i) const noexcept { return mass_[i] / grid_.width(); }

  /// Mass attributed to [lo, hi] using cell centres; atoms count when inside.
  double mass_in(double lo, double hi) const noexcept {
    double sum = 0.0;
    if (lo <= 0.0 && hi >= 0.0) sum += left_;
    if (lo <= 1.0 && hi >= 1.0) sum += right_;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
      const double x = grid_.center(i);
      if (x >= lo && x <= hi) sum += mass_[i];
    }
    return sum;
  }

  /// Expectation of f under the law (midpoint rule on cells).
  template <class F>
  double expect(F&& f) const {
    double sum = left_ * f(0.0) + right_ * f(1.0);
    for (std::size_t i = 0; i < mass_.size(); ++i) sum += mass_[i] * f(grid_.center(i));
    return sum;
  }

 private:
  Grid grid_;
  std::vector<double> mass_;
  double left_;
  double right_;
};

inline Density init_density(const InitSpec& spec, const Grid& grid) {
  spec.validate();
  const std::size_t n = grid.n_cells();
  std::vector<double> mass(n, 0.0);
  double left = 0.0;
  double right = 0.0;
  switch (spec.kind) {
    case InitSpec::Kind::Dirac:
      if (spec.p <= 0.0) left = 1.0;
      else if (spec.p >= 1.0) right = 1.0;
      else mass[grid.cell_of(spec.p)] = 1.0;
      break;
    case InitSpec::Kind::Uniform:
      std::fill(mass.begin(), mass.end(), grid.width());
      break;
    case InitSpec::Kind::Beta: {
      // Exact cell integrals from CDF differences.
      double prev = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double next = (i + 1 == n) ? 1.0 : spec.cdf(grid.face(i + 1));
        mass[i] = std::max(0.0, next - prev);
        prev = next;
      }
      break;
    }
  }
  return Density(grid, std::move(mass), left, right);
}

inline MomentVector moments(const Density& d, std::size_t L) {
  if (L < 1) throw std::invalid_argument("moment order must be >= 1");
  std::vector<double> mu(L, 0.0);
  const Grid& g = d.grid();
  for (std::size_t i = 0; i < d.n_cells(); ++i) {
    const double x = g.center(i);
    double power = 1.0;
    for (std::size_t l = 0; l < L; ++l) {
      power *= x;
      mu[l] += power * d.cell_mass()[i];
    }
  }
  for (double& m : mu) m += d.right_atom();
  return MomentVector(std::move(mu));
}

inline double mean(const Density& d) { return moments(d, 1)[1]; }

inline double variance(const Density& d) { return moments(d, 2).variance(); }

/// Wasserstein-1 distance: the L1 norm of the CDF difference. Mass inside a
/// cell is spread uniformly over the cell, so the CDF is piecewise linear.
inline double wasserstein1(const Density& d1, const Density& d2) {
  if (!(d1.grid() == d2.grid())) throw std::invalid_argument("wasserstein1: grid mismatch");
  const double w = d1.grid().width();
  double diff = d1.left_atom() - d2.left_atom();
  double total = 0.0;
  for (std::size_t i = 0; i < d1.n_cells(); ++i) {
    const double next = diff + d1.cell_mass()[i] - d2.cell_mass()[i];
    if ((diff >= 0.0) == (next >= 0.0)) {
      total += w * std::abs(diff + next) * 0.5;
    } else {
      total += w * (diff * diff + next * next) / (2.0 * std::abs(diff - next));
    }
    diff = next;
  }
  return total;
}

/// Histogram of the policies of a population of logits.
inline Density empirical_histogram(std::span<const double> logits, const Grid& grid) {
  if (logits.empty()) throw std::invalid_argument("empirical_histogram: empty population");
  std::vector<double> mass(grid.n_cells(), 0.0);
  const double unit = 1.0 / static_cast<double>(logits.size());
  for (double z : logits) mass[grid.cell_of(policy_from_logit(z))] += unit;
  return Density(grid, std::move(mass));
}

/// Histogram of cooperation probabilities given directly.
inline Density histogram_of_policies(std::span<const double> xs, const Grid& grid) {
  if (xs.empty()) throw std::invalid_argument("histogram_of_policies: empty input");
  std::vector<double> mass(grid.n_cells(), 0.0);
  const double unit = 1.0 / static_cast<double>(xs.size());
  for (double x : xs) mass[grid.cell_of(x)] += unit;
  return Density(grid, std::move(mass));
}

/// Re-bins a density onto a coarser grid whose cell count divides the source's.
inline Density rebin(const Density& d, const Grid& target) {
  const std::size_t n = d.n_cells();
  const std::size_t m = target.n_cells();
  if (m == 0 || n % m != 0) throw std::invalid_argument("rebin: target cell count must divide source");
  std::vector<double> mass(m, 0.0);
  const std::size_t k = n / m;
  for (std::size_t i = 0; i < n; ++i) mass[i / k] += d.cell_mass()[i];
  return Density(target, std::move(mass), d.left_atom(), d.right_atom());
}

}  // namespace coopdyn
