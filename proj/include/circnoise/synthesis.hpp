#pragma once
// Sample paths of stationary periodic processes and of their versions
// conditioned to vanish at t = 0.

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "circnoise/error.hpp"
#include "circnoise/rng.hpp"
#include "circnoise/spectral_core.hpp"

namespace circnoise {

/// One realization on the closed-open grid t_i = i L / N.
struct SamplePath {
  std::vector<double> values;
  double domain_length = 1.0;
  std::uint64_t seed = 0;
  std::string model_tag;

  std::size_t grid_points() const { return values.size(); }
  double t_step() const { return domain_length / static_cast<double>(values.size()); }
  double t(std::size_t i) const { return t_step() * static_cast<double>(i); }
};

/// Standard normal draws in consumption order Y'_0, Y_1, Y'_1, Y_2, Y'_2, ...
/// y[k - 1] holds Y_k and yp[k] holds Y'_k.
struct GaussianDraw {
  std::vector<double> y;
  std::vector<double> yp;
  std::uint64_t seed = 0;

  std::size_t size() const { return y.size(); }

  static GaussianDraw generate(std::size_t K, std::uint64_t seed) {
    GaussianDraw d;
    d.seed = seed;
    d.y.resize(K);
    d.yp.resize(K + 1);
    NormalStream normal(seed);
    d.yp[0] = normal();
    for (std::size_t k = 1; k <= K; ++k) {
      d.y[k - 1] = normal();
      d.yp[k] = normal();
    }
    return d;
  }
};

/// x_i = c_0 Y'_0 + sum_k c_k sqrt(2) (Y_k sin(2 k pi t_i / L) + Y'_k cos(2 k pi t_i / L)).
inline SamplePath sample_H(const SpectralSequence& seq, std::size_t N, const GaussianDraw& draw) {
  seq.validate();
  const std::size_t K = seq.truncation();
  detail::require(N >= 2 * (K + 1), Errc::UnderResolved,
                  "N = " + std::to_string(N) + " cannot resolve K = " + std::to_string(K));
  detail::require(draw.size() >= K, Errc::InvalidArgument, "not enough Gaussian draws");

  const detail::TrigTable trig(N);
  SamplePath path;
  path.values.assign(N, seq.coeffs[0] * draw.yp[0]);
  path.domain_length = seq.domain_length;
  path.seed = draw.seed;
  path.model_tag = "H";
  for (std::size_t k = 1; k <= K; ++k) {
    if (seq.coeffs[k] == 0.0) continue;
    const double as = std::numbers::sqrt2 * seq.coeffs[k] * draw.y[k - 1];
    const double ac = std::numbers::sqrt2 * seq.coeffs[k] * draw.yp[k];
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t idx = (k * i) % N;
      path.values[i] += as * trig.sin[idx] + ac * trig.cos[idx];
    }
  }
  return path;
}

inline SamplePath sample_H(const SpectralSequence& seq, std::size_t N, std::uint64_t seed) {
  return sample_H(seq, N, GaussianDraw::generate(seq.truncation(), seed));
}

/// Conditioned path y_i = x_i - x_0 C(t_i) / C(0): the Gaussian conditional
/// expectation correction, exact in law. y_0 is exactly 0.
inline SamplePath sample_H0(const SpectralSequence& seq, std::size_t N, const GaussianDraw& draw) {
  const double c0 = seq.total_variance();
  detail::require(c0 > 0.0, Errc::DegenerateKernel, "C(0) = 0, nothing to condition");
  SamplePath path = sample_H(seq, N, draw);
  const CovarianceKernel cov = covariogram_from_coeffs(seq);
  const double x0 = path.values[0];
  for (std::size_t i = 1; i < N; ++i) {
    path.values[i] -= x0 * cov.covariogram(path.t(i)) / c0;
  }
  path.values[0] = 0.0;
  path.model_tag = "H0";
  return path;
}

inline SamplePath sample_H0(const SpectralSequence& seq, std::size_t N, std::uint64_t seed) {
  return sample_H0(seq, N, GaussianDraw::generate(seq.truncation(), seed));
}

enum class PeriodicityKind { Periodic, Antiperiodic, Mixed };

struct Periodicity {
  PeriodicityKind kind = PeriodicityKind::Mixed;
  /// Period divisor for Periodic (paths repeat with period L/m); 0 marks a
  /// constant process.
  std::size_t m = 0;
  /// Only mixed odd/even spectra can model pure noise on the circle.
  bool pure_noise_capable() const { return kind == PeriodicityKind::Mixed; }
};

inline Periodicity classify_periodicity(const SpectralSequence& seq) {
  seq.validate();
  detail::require(!seq.all_zero(), Errc::AllZero, "all coefficients are zero");
  std::size_t g = 0;
  bool odd_only = true;
  for (std::size_t k = 1; k < seq.coeffs.size(); ++k) {
    if (seq.coeffs[k] == 0.0) continue;
    g = std::gcd(g, k);
    odd_only = odd_only && (k % 2 == 1);
  }
  if (g == 0) return {PeriodicityKind::Periodic, 0};
  if (g >= 2) return {PeriodicityKind::Periodic, g};
  if (odd_only && seq.coeffs[0] == 0.0) return {PeriodicityKind::Antiperiodic, 0};
  return {PeriodicityKind::Mixed, 0};
}

}  // namespace circnoise
