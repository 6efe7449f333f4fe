#pragma once

// Parameter sweeps toward a bound and power-law fits of the deficit
// |measure - bound| ~ |lambda - lambda*|^alpha.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chibounds/error.hpp"
#include "chibounds/gaussian.hpp"
#include "chibounds/spin.hpp"

namespace chibounds::saturation {

inline constexpr std::size_t min_points = 16;
inline constexpr double degenerate_deficit = 1e-14;

struct SweepRecord {
  double lambda = 0.0;
  double measure = 0.0;
  double bound = 0.0;
  double deficit = 0.0;  // |measure - bound|
};

struct SweepSeries {
  std::string family_id;
  std::vector<SweepRecord> records;
};

/// Evenly spaced grid lo:hi with n points (both ends included).
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = min_points;

  std::vector<double> points() const {
    if (n < 2 || !(hi > lo)) throw Error(ErrorKind::BadShape, "grid needs n >= 2 and hi > lo");
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
  }
};

struct MeasureBound {
  double measure = 0.0;
  double bound = 0.0;
};

inline void check_grid(std::span<const double> lambdas) {
  if (lambdas.size() < min_points) {
    throw Error(ErrorKind::WindowTooSmall, "sweep needs at least 16 grid points");
  }
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      throw Error(ErrorKind::BadShape, "grid must be strictly increasing");
    }
  }
}

/// Evaluates `family(lambda) -> MeasureBound` over the grid.
template <class Family>
SweepSeries sweep(std::string family_id, std::span<const double> lambdas, Family&& family) {
  check_grid(lambdas);
  SweepSeries series{std::move(family_id), {}};
  series.records.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const MeasureBound mb = family(lambda);
    series.records.push_back({lambda, mb.measure, mb.bound, std::abs(mb.measure - mb.bound)});
  }
  return series;
}

// Named families. Each returns a callable lambda -> MeasureBound.

/// lambda = r: E_N of the two-mode squeezed vacuum against its floor.
inline auto tmsv_family(const Tolerances& tol = {}) {
  return [tol](double r) {
    const auto rep = gaussian::entanglement_floor(gaussian::two_mode_squeezed(r, gaussian::default_r_max, tol), tol);
    return MeasureBound{rep.e_n, rep.floor};
  };
}

/// lambda = r: E_N of a squeezing network with fixed coupling against its floor.
inline auto network_family(Eigen::MatrixXd coupling, const Tolerances& tol = {}) {
  return [coupling = std::move(coupling), tol](double r) {
    const auto gs = gaussian::squeezing_network(r, coupling, gaussian::default_r_max, tol);
    const auto rep = gaussian::entanglement_floor(gs, tol);
    return MeasureBound{rep.e_n, rep.floor};
  };
}

enum class GhzBound {
  Su2Ceiling,  // 4[J^2 (1 - s^2) + J] at the state's polarization
  Heisenberg,  // 4 J^2, the ceiling's saturated value at s = 0 without the +J offset
};

/// lambda = epsilon along cos(pi/4+eps)|J,J> + sin(pi/4+eps)|J,-J>; measure is
/// the direction-maximized QFI.
inline auto ghz_sweep_family(int two_j, GhzBound bound, const Tolerances& tol = {}) {
  return [two_j, bound, tol, ops = spin::spin_operators(two_j)](double eps) {
    const auto rep = spin::su2_ceiling(spin::ghz_family(two_j, eps), ops, tol);
    const double j = 0.5 * two_j;
    return MeasureBound{rep.fq_max, bound == GhzBound::Su2Ceiling ? rep.ceiling : 4.0 * j * j};
  };
}

inline auto constant_family(double measure, double bound) {
  return [measure, bound](double) { return MeasureBound{measure, bound}; };
}

/// deficit = amplitude |lambda - lambda*|^alpha (1 + noise * eta), eta ~ N(0,1)
/// drawn from a generator seeded with `seed`. Stored as measure = deficit,
/// bound = 0.
inline SweepSeries synthesize_series(double alpha, double lambda_star, double amplitude,
                                     double noise, std::uint64_t seed,
                                     std::span<const double> lambdas) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::OutOfRange, "alpha must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  return sweep("synthetic", lambdas, [&](double lambda) {
    const double clean = amplitude * std::pow(std::abs(lambda - lambda_star), alpha);
    const double eta = normal(rng);
    return MeasureBound{clean * (1.0 + noise * eta), 0.0};
  });
}

struct FitOptions {
  std::optional<double> lambda_star_hint;
  /// Fit window in |lambda - lambda*|. Defaults to the top decade of the data.
  std::optional<std::pair<double, double>> window;
  std::size_t exclude_nearest = 3;
};

struct FitResult {
  double alpha = 0.0;
  double lambda_star = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Deficit argmin, refined by the vertex of the parabola through it and its
/// neighbours when it is interior.
inline double estimate_lambda_star(const SweepSeries& series) {
  const auto& rec = series.records;
  const auto it = std::min_element(rec.begin(), rec.end(), [](const auto& x, const auto& y) {
    return x.deficit < y.deficit;
  });
  const auto i = static_cast<std::size_t>(it - rec.begin());
  if (i == 0 || i + 1 == rec.size()) return rec[i].lambda;
  const double x0 = rec[i - 1].lambda, x1 = rec[i].lambda, x2 = rec[i + 1].lambda;
  const double y0 = rec[i - 1].deficit, y1 = rec[i].deficit, y2 = rec[i + 1].deficit;
  const double den = (x0 - x1) * (y0 - y2) - (x0 - x2) * (y0 - y1);
  if (den == 0.0) return x1;
  const double num = (x0 - x1) * (x0 - x1) * (y0 - y2) - (x0 - x2) * (x0 - x2) * (y0 - y1);
  const double vertex = x0 - 0.5 * num / den;
  return std::clamp(vertex, x0, x2);
}

/// Least-squares slope of log(deficit) against log|lambda - lambda*| over the
/// window, after dropping the points nearest lambda*.
inline FitResult fit_exponent(const SweepSeries& series, const FitOptions& opts = {}) {
  const auto& rec = series.records;
  if (rec.size() < min_points) throw Error(ErrorKind::WindowTooSmall, "series has fewer than 16 points");
  const bool degenerate = std::all_of(rec.begin(), rec.end(), [](const auto& r) {
    return !(r.deficit >= degenerate_deficit);
  });
  if (degenerate) throw Error(ErrorKind::DegenerateSeries, "all deficits below 1e-14");

  FitResult fit;
  fit.lambda_star = opts.lambda_star_hint ? *opts.lambda_star_hint : estimate_lambda_star(series);

  std::vector<std::pair<double, double>> pts;  // (distance, deficit)
  pts.reserve(rec.size());
  for (const auto& r : rec) pts.emplace_back(std::abs(r.lambda - fit.lambda_star), r.deficit);
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  const std::size_t drop = std::min(opts.exclude_nearest, pts.size());
  pts.erase(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(drop));

  const double max_dist = pts.empty() ? 0.0 : pts.back().first;
  if (opts.window) {
    fit.window_lo = opts.window->first;
    fit.window_hi = std::min(opts.window->second, max_dist);
  } else {
    fit.window_hi = max_dist;
    fit.window_lo = max_dist / 10.0;
  }

  std::vector<double> xs, ys;
  for (const auto& [dist, deficit] : pts) {
    if (dist < fit.window_lo || dist > fit.window_hi || dist <= 0.0) continue;
    if (!(deficit > 0.0)) continue;
    xs.push_back(std::log(dist));
    ys.push_back(std::log(deficit));
  }
  fit.points = xs.size();
  if (xs.size() < min_points) {
    throw Error(ErrorKind::WindowTooSmall,
                "only " + std::to_string(xs.size()) + " usable points inside the fit window");
  }

  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::WindowTooSmall, "fit window has no spread");
  fit.alpha = sxy / sxx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

}  // namespace chibounds::saturation
