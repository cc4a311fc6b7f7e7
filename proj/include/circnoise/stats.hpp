#pragma once
// Small statistics toolkit for Monte Carlo checks: moments, correlation and
// the one-sample Kolmogorov-Smirnov test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "circnoise/error.hpp"

namespace circnoise::stats {

inline double mean(std::span<const double> x) {
  detail::require(!x.empty(), Errc::InvalidArgument, "empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> x) {
  detail::require(x.size() >= 2, Errc::InvalidArgument, "variance needs two points");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double correlation(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, Errc::InvalidArgument,
                  "correlation needs paired samples");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double chi_squared_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(dof / 2.0, x / 2.0);
}

/// sup_x |F_n(x) - F(x)|.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  detail::require(!sample.empty(), Errc::InvalidArgument, "empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic p-value of the KS statistic with the Stephens small-sample
/// correction: Q((sqrt n + 0.12 + 0.11 / sqrt n) D).
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double q = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    q += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

inline KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  const std::size_t n = sample.size();
  KsResult r;
  r.statistic = ks_statistic(std::move(sample), cdf);
  r.pvalue = ks_pvalue(r.statistic, n);
  return r;
}

}  // namespace circnoise::stats
