#pragma once
/*
 * spectral_core.hpp
 *
 * Spectral representation of zero-mean Gaussian stationary periodic processes
 * on [0, L) (L = 1, or L = 2 for the extended domain) and the deterministic
 * kernel algebra around it.
 *
 *   Basis on [0, L):   e_0 = 1,  e_k(t) = sqrt(2) cos(2 k pi t / L),
 *                                s_k(t) = sqrt(2) sin(2 k pi t / L),
 *   orthonormal for the averaged inner product <f, g> = (1/L) int_0^L f g.
 *
 *   Process:      x_t = c_0 Y'_0 + sum_k c_k (Y_k s_k(t) + Y'_k e_k(t))
 *   Covariogram:  C(tau) = c_0^2 + 2 sum_k c_k^2 cos(2 k pi tau / L)
 *   Conditioned:  R(s, t) = C(t - s) - C(s) C(t) / C(0)
 *
 * Two-dimensional coefficients of a kernel are averages over a uniform
 * closed-open M x M grid (composite trapezoid on a periodic domain), which is
 * exact for trigonometric polynomials below the Nyquist index.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "circnoise/error.hpp"

namespace circnoise {

// ---------------------------------------------------------------------------
// SpectralSequence
// ---------------------------------------------------------------------------

/// Nonnegative amplitudes c_0..c_K of a truncated spectrum. Index k is the
/// frequency of cos(2 k pi t / L); variances are c_k^2.
struct SpectralSequence {
  std::vector<double> coeffs;
  double domain_length = 1.0;

  SpectralSequence() = default;
  explicit SpectralSequence(std::vector<double> c, double length = 1.0)
      : coeffs(std::move(c)), domain_length(length) {
    validate();
  }

  void validate() const {
    detail::require(coeffs.size() >= 2, Errc::InvalidArgument,
                    "spectral sequence needs truncation K >= 1");
    detail::require(domain_length == 1.0 || domain_length == 2.0, Errc::InvalidArgument,
                    "domain_length must be 1 or 2");
    for (double c : coeffs) {
      detail::require(std::isfinite(c) && c >= 0.0, Errc::InvalidArgument,
                      "coefficients must be finite and nonnegative");
    }
  }

  std::size_t truncation() const { return coeffs.size() - 1; }
  double variance(std::size_t k) const { return coeffs[k] * coeffs[k]; }

  /// C(0) = c_0^2 + 2 sum_{k>=1} c_k^2.
  double total_variance() const {
    double v = coeffs[0] * coeffs[0];
    for (std::size_t k = 1; k < coeffs.size(); ++k) v += 2.0 * coeffs[k] * coeffs[k];
    return v;
  }

  bool all_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
  }
};

// ---------------------------------------------------------------------------
// CovarianceKernel
// ---------------------------------------------------------------------------

enum class KernelKind { Stationary, Conditioned };
enum class Parity { Periodic, Antiperiodic, Unspecified };

/// Immutable covariance kernel: either a covariogram C(tau) or a two-argument
/// conditioned covariance R(s, t). Cheap to copy (shared closures).
class CovarianceKernel {
 public:
  using Covariogram = std::function<double(double)>;
  using Bivariate = std::function<double(double, double)>;

  static CovarianceKernel stationary(Covariogram cov, double length = 1.0,
                                     Parity parity = Parity::Periodic,
                                     std::size_t grid_resolution = 0) {
    CovarianceKernel k;
    k.kind_ = KernelKind::Stationary;
    k.cov_ = std::make_shared<const Covariogram>(std::move(cov));
    k.length_ = length;
    k.parity_ = parity;
    k.grid_resolution_ = grid_resolution;
    return k;
  }

  static CovarianceKernel conditioned(Bivariate r, double length = 1.0,
                                      Parity parity = Parity::Unspecified,
                                      std::size_t grid_resolution = 0) {
    CovarianceKernel k;
    k.kind_ = KernelKind::Conditioned;
    k.biv_ = std::make_shared<const Bivariate>(std::move(r));
    k.length_ = length;
    k.parity_ = parity;
    k.grid_resolution_ = grid_resolution;
    return k;
  }

  KernelKind kind() const { return kind_; }
  double domain_length() const { return length_; }
  Parity parity() const { return parity_; }
  /// Resolution of the underlying table, 0 for closed-form kernels.
  std::size_t grid_resolution() const { return grid_resolution_; }

  double covariogram(double tau) const {
    detail::require(kind_ == KernelKind::Stationary, Errc::InvalidArgument,
                    "covariogram() needs a stationary kernel");
    return (*cov_)(tau);
  }

  double operator()(double s, double t) const {
    return kind_ == KernelKind::Stationary ? (*cov_)(t - s) : (*biv_)(s, t);
  }

  /// Stationary kernel this one was conditioned from, if any.
  const std::shared_ptr<const CovarianceKernel>& parent() const { return parent_; }

  /// Same kernel reinterpreted on another domain length. Used to restrict a
  /// kernel built on [0, 2] to [0, 1].
  CovarianceKernel with_domain_length(double length) const {
    CovarianceKernel k = *this;
    k.length_ = length;
    k.parent_.reset();
    return k;
  }

 private:
  friend CovarianceKernel condition_at_zero(const CovarianceKernel&, bool);

  KernelKind kind_ = KernelKind::Stationary;
  std::shared_ptr<const Covariogram> cov_;
  std::shared_ptr<const Bivariate> biv_;
  std::shared_ptr<const CovarianceKernel> parent_;
  double length_ = 1.0;
  Parity parity_ = Parity::Unspecified;
  std::size_t grid_resolution_ = 0;
};

// ---------------------------------------------------------------------------
// FourierMatrices
// ---------------------------------------------------------------------------

/// Coefficient blocks of a kernel's 2-D expansion in the sqrt(2)-scaled basis.
/// All blocks are (K+1) x (K+1) and indexed by frequency; sine indices start at
/// 1, so row/column 0 of rss, row 0 of rsc and column 0 of rcs are zero.
struct FourierMatrices {
  Eigen::MatrixXd rcc;
  Eigen::MatrixXd rss;
  Eigen::MatrixXd rsc;
  Eigen::MatrixXd rcs;
  std::size_t truncation = 0;
  double domain_length = 1.0;
  /// sum_{k>=1} rss_kk without truncation: the average of the odd-odd part of
  /// R along the diagonal.
  double sine_trace = 0.0;
  std::size_t quadrature_points = 0;
};

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

namespace detail {

/// cos(2 pi m / n) and sin(2 pi m / n) for m = 0..n-1. For even n the second
/// half is the exact negation of the first, so half-period shifts flip signs
/// bit-for-bit.
struct TrigTable {
  std::vector<double> cos;
  std::vector<double> sin;

  explicit TrigTable(std::size_t n) : cos(n), sin(n) {
    const std::size_t half = (n % 2 == 0) ? n / 2 : n;
    for (std::size_t m = 0; m < half; ++m) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
      cos[m] = std::cos(a);
      sin[m] = (m == 0) ? 0.0 : std::sin(a);
    }
    if (half != n) {
      for (std::size_t m = 0; m < half; ++m) {
        cos[m + half] = -cos[m];
        sin[m + half] = -sin[m];
      }
    }
  }
};

/// cos(2 pi k tau / L) with the argument reduced to one period first.
inline double periodic_cos(std::size_t k, double tau, double length) {
  double frac = static_cast<double>(k) * tau / length;
  frac -= std::floor(frac);
  return std::cos(2.0 * std::numbers::pi * frac);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

/// C(tau) = c_0^2 + 2 sum_k c_k^2 cos(2 k pi tau / L), evaluated exactly.
inline CovarianceKernel covariogram_from_coeffs(const SpectralSequence& seq) {
  seq.validate();
  std::vector<double> var(seq.coeffs.size());
  for (std::size_t k = 0; k < var.size(); ++k) var[k] = seq.variance(k);
  const double length = seq.domain_length;

  bool odd_only = var[0] == 0.0;
  for (std::size_t k = 2; k < var.size() && odd_only; k += 2) odd_only = var[k] == 0.0;
  const Parity parity = odd_only && length == 2.0 ? Parity::Antiperiodic : Parity::Periodic;

  return CovarianceKernel::stationary(
      [var = std::move(var), length](double tau) {
        double sum = 0.0;
        for (std::size_t k = var.size() - 1; k >= 1; --k) {
          if (var[k] != 0.0) sum += var[k] * detail::periodic_cos(k, tau, length);
        }
        return var[0] + 2.0 * sum;
      },
      length, parity);
}

struct CosineCoefficients {
  SpectralSequence sequence;
  /// True when some slightly negative cosine coefficient was clamped to 0.
  bool clamped = false;
  /// Most negative raw cosine coefficient (0 when none was negative).
  double most_negative = 0.0;
};

/// Recovers c_0..c_K from a covariogram by trapezoid quadrature at M points.
/// Negative coefficients down to -1e-10 C(0) are treated as round-off.
inline CosineCoefficients coeffs_from_covariogram(const CovarianceKernel& kernel, std::size_t K,
                                                  std::size_t M = 0) {
  detail::require(kernel.kind() == KernelKind::Stationary, Errc::InvalidArgument,
                  "coeffs_from_covariogram needs a stationary kernel");
  detail::require(K >= 1, Errc::InvalidArgument, "K must be >= 1");
  if (M == 0) {
    M = kernel.grid_resolution() ? kernel.grid_resolution() : std::max<std::size_t>(4 * K, 512);
    detail::require(M >= 4 * K, Errc::UnderResolved,
                    "kernel table has " + std::to_string(M) + " points, K = " + std::to_string(K) +
                        " needs at least 4K");
  }
  detail::require(M >= 4 * K, Errc::InvalidArgument, "quadrature needs M >= 4K");

  const double length = kernel.domain_length();
  std::vector<double> values(M);
  for (std::size_t i = 0; i < M; ++i) {
    values[i] = kernel.covariogram(length * static_cast<double>(i) / static_cast<double>(M));
  }
  const double c0 = values[0];
  const detail::TrigTable trig(M);

  CosineCoefficients out;
  std::vector<double> coeffs(K + 1);
  for (std::size_t n = 0; n <= K; ++n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) acc += values[i] * trig.cos[(n * i) % M];
    const double raw = acc / static_cast<double>(M);
    if (raw < 0.0) {
      detail::require(raw >= -1e-10 * std::abs(c0), Errc::NotPositive,
                      "cosine coefficient " + std::to_string(n) + " is negative (" +
                          std::to_string(raw) + ")");
      out.clamped = true;
      out.most_negative = std::min(out.most_negative, raw);
    }
    coeffs[n] = std::sqrt(std::max(0.0, raw));
  }
  out.sequence = SpectralSequence(std::move(coeffs), length);
  return out;
}

/// R(s, t) = C(t - s) - C(s) C(t) / C(0). Vanishes exactly on both axes.
inline CovarianceKernel condition_at_zero(const CovarianceKernel& kernel,
                                          bool allow_degenerate = false) {
  detail::require(kernel.kind() == KernelKind::Stationary, Errc::InvalidArgument,
                  "condition_at_zero needs a stationary kernel");
  const double c0 = kernel.covariogram(0.0);
  const double length = kernel.domain_length();
  if (!(c0 > 0.0)) {
    detail::require(allow_degenerate, Errc::DegenerateKernel, "C(0) = 0, nothing to condition");
    CovarianceKernel zero = CovarianceKernel::conditioned([](double, double) { return 0.0; }, length,
                                                          kernel.parity());
    return zero;
  }
  auto on_axis = [length](double u) {
    const double frac = u / length - std::floor(u / length);
    return frac == 0.0;
  };
  CovarianceKernel out = CovarianceKernel::conditioned(
      [kernel, c0, on_axis](double s, double t) {
        if (on_axis(s) || on_axis(t)) return 0.0;
        return kernel.covariogram(t - s) - kernel.covariogram(s) * kernel.covariogram(t) / c0;
      },
      length, kernel.parity());
  out.parent_ = std::make_shared<const CovarianceKernel>(kernel);
  return out;
}

/// Kernel values on the closed-open grid t_i = i L / M. Kernels conditioned from
/// a covariogram only need M covariogram evaluations.
inline Eigen::MatrixXd tabulate(const CovarianceKernel& kernel, std::size_t M) {
  detail::require(M >= 1, Errc::InvalidArgument, "grid must be nonempty");
  const double length = kernel.domain_length();
  const auto grid = [&](std::size_t i) {
    return length * static_cast<double>(i) / static_cast<double>(M);
  };
  Eigen::MatrixXd R(M, M);

  const CovarianceKernel* stationary = nullptr;
  if (kernel.kind() == KernelKind::Stationary) {
    stationary = &kernel;
  } else if (kernel.parent() && kernel.parent()->domain_length() == length) {
    stationary = kernel.parent().get();
  }
  if (stationary != nullptr) {
    std::vector<double> lag(M);
    for (std::size_t m = 0; m < M; ++m) lag[m] = stationary->covariogram(grid(m));
    const bool conditioned = kernel.kind() == KernelKind::Conditioned;
    const double c0 = lag[0];
    for (std::size_t i = 0; i < M; ++i) {
      for (std::size_t j = 0; j < M; ++j) {
        double v = lag[(j + M - i) % M];
        if (conditioned) v = (i == 0 || j == 0) ? 0.0 : v - lag[i] * lag[j] / c0;
        R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      }
    }
    return R;
  }
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = i; j < M; ++j) {
      const double v = kernel(grid(i), grid(j));
      R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      R(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return R;
}

/// All four coefficient blocks up to frequency K by M x M quadrature. M = 0
/// uses the kernel's table grid when it has one.
inline FourierMatrices fourier_matrices(const CovarianceKernel& kernel, std::size_t K,
                                        std::size_t M = 0) {
  detail::require(K >= 1, Errc::InvalidArgument, "K must be >= 1");
  if (M == 0) {
    M = kernel.grid_resolution() ? kernel.grid_resolution() : std::max<std::size_t>(4 * K, 512);
    detail::require(M >= 4 * K, Errc::UnderResolved,
                    "kernel table has " + std::to_string(M) + " points, K = " + std::to_string(K) +
                        " needs at least 4K");
  }
  detail::require(M >= 4 * K, Errc::InvalidArgument, "quadrature needs M >= 4K");

  const Eigen::MatrixXd R = tabulate(kernel, M);
  const auto n = static_cast<Eigen::Index>(K + 1);
  const auto m = static_cast<Eigen::Index>(M);
  const detail::TrigTable trig(M);

  Eigen::MatrixXd cb(n, m);
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < m; ++i) cb(0, i) = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t idx = (static_cast<std::size_t>(k) * static_cast<std::size_t>(i)) % M;
      cb(k, i) = std::numbers::sqrt2 * trig.cos[idx];
      sb(k, i) = std::numbers::sqrt2 * trig.sin[idx];
    }
  }

  const double norm = 1.0 / (static_cast<double>(M) * static_cast<double>(M));
  const Eigen::MatrixXd rc = R * cb.transpose();
  const Eigen::MatrixXd rs = R * sb.transpose();

  FourierMatrices out;
  out.rcc = norm * (cb * rc);
  out.rss = norm * (sb * rs);
  out.rsc = norm * (sb * rc);
  out.rcs = norm * (cb * rs);
  out.truncation = K;
  out.domain_length = kernel.domain_length();
  out.quadrature_points = M;

  double trace = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index r = (m - i) % m;
    trace += 0.25 * (R(i, i) - R(i, r) - R(r, i) + R(r, r));
  }
  out.sine_trace = trace / static_cast<double>(M);
  return out;
}

// ---------------------------------------------------------------------------
// closed-form kernels
// ---------------------------------------------------------------------------

/// Brownian bridge covariance min(s,t)(1 - max(s,t)) on [0, 1].
inline CovarianceKernel brownian_bridge_kernel() {
  return CovarianceKernel::conditioned(
      [](double s, double t) {
        const double lo = std::min(s, t);
        const double hi = std::max(s, t);
        return lo * (1.0 - hi);
      },
      1.0, Parity::Unspecified);
}

/// Covariogram 1/4 - |delta|/2 on (-1, 1], extended with period 2.
inline CovarianceKernel tent_covariogram() {
  return CovarianceKernel::stationary(
      [](double delta) {
        double d = delta / 2.0 - std::floor(delta / 2.0);  // in [0, 1)
        d = 2.0 * std::min(d, 1.0 - d);                      // |delta| folded to [0, 1]
        return 0.25 - 0.5 * d;
      },
      2.0, Parity::Antiperiodic);
}

/// The zero kernel (constant process conditioned to vanish).
inline CovarianceKernel zero_kernel(double length = 1.0) {
  return CovarianceKernel::conditioned([](double, double) { return 0.0; }, length);
}

}  // namespace circnoise
