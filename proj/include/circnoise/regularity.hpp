#pragma once
// Path regularity from coefficient decay, and empirical Hölder estimates from
// sampled paths.
//
// For a covariogram with nonnegative cosine coefficients a_k = c_k^2, decay
// a_k = O(k^-(1 + 2m + alpha)), 0 < alpha <= 1, gives paths in C^{m, beta} for
// every beta < alpha / 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "circnoise/error.hpp"
#include "circnoise/spectral_core.hpp"
#include "circnoise/synthesis.hpp"

namespace circnoise {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, Errc::InvalidArgument,
                  "regression needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  detail::require(sxx > 0.0, Errc::InvalidArgument, "regression abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

struct RegularityReport {
  /// d in a_k ~ k^-d, from the fitted log-log slope.
  double decay_exponent = 0.0;
  double alpha = 0.0;
  std::size_t smoothness_order = 0;
  /// Paths are C^{m, beta} for all beta < beta_sup (exclusive bound).
  double beta_sup = 0.0;
  double r_squared = 0.0;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  std::size_t window_points = 0;
  /// d - 1 is an even integer: alpha would be 0, reported as (m - 1, 1).
  bool boundary = false;
  /// d <= 1: no Hölder class follows from the decay.
  bool no_guarantee = false;
  /// Fit R^2 < 0.9.
  bool non_monotone_tail = false;
};

/// Decomposes a decay exponent d as 1 + 2m + alpha with alpha in (0, 1].
inline RegularityReport classify_decay(double d) {
  RegularityReport r;
  r.decay_exponent = d;
  if (!(d > 1.0)) {
    r.no_guarantee = true;
    return r;
  }
  const double excess = d - 1.0;
  auto m = static_cast<std::size_t>(std::floor(excess / 2.0));
  double alpha = std::min(1.0, excess - 2.0 * static_cast<double>(m));
  if (alpha <= 1e-6) {
    r.boundary = true;
    m -= 1;
    alpha = 1.0;
  } else if (std::abs(alpha - 1.0) <= 1e-12 || std::abs(excess - std::round(excess)) <= 1e-9) {
    r.boundary = true;
  }
  r.smoothness_order = m;
  r.alpha = alpha;
  r.beta_sup = alpha / 2.0;
  return r;
}

/// Least-squares decay of log c_k^2 against log k over the upper half of the
/// nonzero-coefficient index range.
inline RegularityReport predict_regularity(const SpectralSequence& seq) {
  seq.validate();
  std::vector<std::size_t> nonzero;
  for (std::size_t k = 1; k < seq.coeffs.size(); ++k) {
    if (seq.coeffs[k] > 0.0) nonzero.push_back(k);
  }
  detail::require(nonzero.size() >= 8, Errc::InsufficientTail,
                  "need at least 8 nonzero coefficients, got " + std::to_string(nonzero.size()));
  const std::size_t kmax = nonzero.back();
  std::vector<double> lx, ly;
  std::size_t lo = kmax;
  for (std::size_t k : nonzero) {
    if (2 * k < kmax) continue;
    lo = std::min(lo, k);
    lx.push_back(std::log(static_cast<double>(k)));
    ly.push_back(std::log(seq.variance(k)));
  }
  detail::require(lx.size() >= 2, Errc::InsufficientTail, "fit window holds fewer than 2 points");
  const LinearFit fit = least_squares(lx, ly);

  RegularityReport r = classify_decay(-fit.slope);
  r.r_squared = fit.r_squared;
  r.window_lo = lo;
  r.window_hi = kmax;
  r.window_points = lx.size();
  r.non_monotone_tail = fit.r_squared < 0.9;
  return r;
}

/// Dyadic lags 2^j (in grid steps) within [first, last].
inline std::vector<std::size_t> dyadic_lags(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t h = 1; h <= last; h *= 2) {
    if (h >= first) out.push_back(h);
  }
  return out;
}

/// Circular mean squared increment mean_i (x_{i+h} - x_i)^2 at each lag.
inline std::vector<double> structure_function(const SamplePath& path,
                                              std::span<const std::size_t> lags) {
  const std::size_t N = path.grid_points();
  std::vector<double> out;
  out.reserve(lags.size());
  for (std::size_t h : lags) {
    detail::require(h >= 1 && h < N, Errc::InvalidArgument, "lag outside the grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double d = path.values[(i + h) % N] - path.values[i];
      acc += d * d;
    }
    out.push_back(acc / static_cast<double>(N));
  }
  return out;
}

/// E|x_{t+h} - x_t|^2 = 2 (C(0) - C(h)) for a stationary kernel.
inline double structure_function_theory(const CovarianceKernel& kernel, double h) {
  return 2.0 * (kernel.covariogram(0.0) - kernel.covariogram(h));
}

struct HolderEstimate {
  double exponent = 0.0;
  double r_squared = 0.0;
  std::vector<std::size_t> lags;
  std::vector<double> structure;
};

/// Hölder exponent as half the log-log slope of the structure function,
/// averaged over all given paths (same grid).
inline HolderEstimate empirical_holder(std::span<const SamplePath> paths,
                                       std::span<const std::size_t> lags) {
  detail::require(!paths.empty(), Errc::InvalidArgument, "no paths");
  const std::size_t N = paths.front().grid_points();
  detail::require(N >= 1024, Errc::InvalidArgument, "empirical_holder needs N >= 1024");
  detail::require(lags.size() >= 2, Errc::InvalidArgument, "need at least two lags");

  HolderEstimate est;
  est.lags.assign(lags.begin(), lags.end());
  est.structure.assign(lags.size(), 0.0);
  for (const SamplePath& p : paths) {
    detail::require(p.grid_points() == N, Errc::LengthMismatch, "paths on different grids");
    const auto s = structure_function(p, lags);
    for (std::size_t i = 0; i < s.size(); ++i) est.structure[i] += s[i];
  }
  std::vector<double> lx, ly;
  const double dt = paths.front().t_step();
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const double s = est.structure[i] / static_cast<double>(paths.size());
    est.structure[i] = s;
    detail::require(s > 0.0, Errc::DegeneratePath, "path has zero increments");
    lx.push_back(std::log(dt * static_cast<double>(lags[i])));
    ly.push_back(std::log(s));
  }
  const LinearFit fit = least_squares(lx, ly);
  est.exponent = fit.slope / 2.0;
  est.r_squared = fit.r_squared;
  return est;
}

inline HolderEstimate empirical_holder(const SamplePath& path, std::span<const std::size_t> lags) {
  return empirical_holder(std::span<const SamplePath>(&path, 1), lags);
}

}  // namespace circnoise
