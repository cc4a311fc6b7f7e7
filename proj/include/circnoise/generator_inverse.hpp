#pragma once
/*
 * generator_inverse.hpp
 *
 * Decides whether a conditioned covariance R comes from a stationary periodic
 * generator, and recovers the generator when it does.
 *
 * With generator variances q_k = c_k^2 and x = C(0) = q_0 + 2 sum q_k, the
 * coefficient blocks of R = C - C(., 0) C(0, .) / x are
 *
 *   rss = diag(q_1, q_2, ...),   rsc = rcs = 0,
 *   rcc = diag(q_0, q_1, ...) - w w^T / x,   w = (q_0, sqrt2 q_1, sqrt2 q_2, ...).
 *
 * Hence with rbar = sum_k rss_kk and u = q_0 / x:
 *   rcc_00 = x u (1 - u),   rbar = x (1 - u) / 2,
 * so u = rcc_00 / (2 rbar) and x = 4 rbar^2 / (2 rbar - rcc_00). A generator
 * exists iff the mixed blocks vanish, rss is a nonnegative diagonal,
 * rcc_00 < 2 rbar, and rcc matches the reconstruction above.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circnoise/error.hpp"
#include "circnoise/spectral_core.hpp"

namespace circnoise {

enum class GeneratorDecision { Unique, NoGenerator, Trivial };

/// Conditions in the order they are checked.
enum class GeneratorCondition {
  None,
  MixedBlocks,           // rsc, rcs null
  SineShape,             // rss diagonal, nonnegative
  SineTraceBound,        // rcc_00 < 2 rbar
  CosineReconstruction,  // rcc equals its reconstruction
};

inline std::string_view to_string(GeneratorCondition c) {
  switch (c) {
    case GeneratorCondition::None: return "none";
    case GeneratorCondition::MixedBlocks: return "mixed-blocks";
    case GeneratorCondition::SineShape: return "sine-shape";
    case GeneratorCondition::SineTraceBound: return "sine-trace-bound";
    case GeneratorCondition::CosineReconstruction: return "cosine-reconstruction";
  }
  return "unknown";
}

inline std::string_view to_string(GeneratorDecision d) {
  switch (d) {
    case GeneratorDecision::Unique: return "unique";
    case GeneratorDecision::NoGenerator: return "no-generator";
    case GeneratorDecision::Trivial: return "trivial";
  }
  return "unknown";
}

struct GeneratorDiagnostics {
  double tol = 0.0;
  double mixed_max = 0.0;
  double ss_offdiag_max = 0.0;
  /// Smallest rss diagonal entry; negative values are the negativity margin.
  double ss_min_diag = 0.0;
  double sine_trace = 0.0;
  double sine_trace_truncated = 0.0;
  /// 2 rbar - rcc_00; must exceed tol.
  double trace_margin = 0.0;
  double cc_residual = 0.0;
};

struct GeneratorVerdict {
  GeneratorDecision decision = GeneratorDecision::NoGenerator;
  GeneratorCondition failed = GeneratorCondition::None;
  std::string reason;
  /// Recovered generator spectrum (Unique only).
  SpectralSequence generator;
  /// x = C(0) of the generator.
  double total_variance = 0.0;
  /// Variance shares p_0 = q_0 / x, p_k = 2 q_k / x.
  std::vector<double> weights;
  GeneratorDiagnostics diagnostics;

  bool unique() const { return decision == GeneratorDecision::Unique; }
};

inline double default_generator_tol(const FourierMatrices& mats) {
  const auto n = mats.rss.rows();
  double trace = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) trace += mats.rss(k, k);
  return 1e-6 * (std::abs(trace) + std::abs(mats.rcc(0, 0)));
}

/// Runs the four conditions in fixed order; the first violated one is named.
/// tol <= 0 selects default_generator_tol. Kernels whose blocks are all below
/// zero_floor in magnitude get the Trivial verdict (generated by any constant).
inline GeneratorVerdict check_generator(const FourierMatrices& mats, double tol = 0.0,
                                        double zero_floor = 1e-14) {
  const Eigen::Index n = mats.rcc.rows();
  detail::require(n >= 2 && mats.rss.rows() == n && mats.rsc.rows() == n && mats.rcs.rows() == n,
                  Errc::InvalidArgument, "malformed Fourier matrices");

  GeneratorVerdict v;
  GeneratorDiagnostics& d = v.diagnostics;

  const double largest = std::max({mats.rcc.cwiseAbs().maxCoeff(), mats.rss.cwiseAbs().maxCoeff(),
                                   mats.rsc.cwiseAbs().maxCoeff(), mats.rcs.cwiseAbs().maxCoeff(),
                                   std::abs(mats.sine_trace)});
  if (largest <= zero_floor) {
    v.decision = GeneratorDecision::Trivial;
    v.reason = "kernel is identically zero; any constant process generates it";
    return v;
  }

  d.tol = tol > 0.0 ? tol : default_generator_tol(mats);
  d.mixed_max = std::max(mats.rsc.cwiseAbs().maxCoeff(), mats.rcs.cwiseAbs().maxCoeff());
  d.ss_min_diag = mats.rss(1, 1);
  for (Eigen::Index k = 1; k < n; ++k) {
    d.ss_min_diag = std::min(d.ss_min_diag, mats.rss(k, k));
    d.sine_trace_truncated += mats.rss(k, k);
    for (Eigen::Index j = 1; j < n; ++j) {
      if (j != k) d.ss_offdiag_max = std::max(d.ss_offdiag_max, std::abs(mats.rss(k, j)));
    }
  }
  d.sine_trace = mats.sine_trace;
  const double rcc00 = mats.rcc(0, 0);
  const double rbar = mats.sine_trace;
  d.trace_margin = 2.0 * rbar - rcc00;

  auto fail = [&](GeneratorCondition c, std::string why) {
    v.decision = GeneratorDecision::NoGenerator;
    v.failed = c;
    v.reason = std::move(why);
    return v;
  };

  if (d.mixed_max > d.tol) {
    return fail(GeneratorCondition::MixedBlocks,
                "mixed cos-sin blocks are not null (max " + std::to_string(d.mixed_max) + ")");
  }
  if (d.ss_offdiag_max > d.tol) {
    return fail(GeneratorCondition::SineShape, "sin-sin block is not diagonal (max off-diagonal " +
                                                   std::to_string(d.ss_offdiag_max) + ")");
  }
  if (d.ss_min_diag < -d.tol) {
    return fail(GeneratorCondition::SineShape, "sin-sin diagonal has a negative entry (" +
                                                   std::to_string(d.ss_min_diag) + ")");
  }
  if (!(d.trace_margin > d.tol)) {
    return fail(GeneratorCondition::SineTraceBound,
                "rcc_00 >= 2 sum rss_kk (margin " + std::to_string(d.trace_margin) +
                    "); the generator variance would be unbounded");
  }

  const double x = 4.0 * rbar * rbar / d.trace_margin;
  const double u = rcc00 / (2.0 * rbar);
  Eigen::VectorXd q(n);
  q(0) = std::max(0.0, u * x);
  for (Eigen::Index k = 1; k < n; ++k) q(k) = std::max(0.0, mats.rss(k, k));
  Eigen::VectorXd w = std::numbers::sqrt2 * q;
  w(0) = q(0);
  Eigen::MatrixXd predicted = -(w * w.transpose()) / x;
  predicted.diagonal() += q;
  d.cc_residual = (mats.rcc - predicted).cwiseAbs().maxCoeff();
  if (d.cc_residual > d.tol) {
    return fail(GeneratorCondition::CosineReconstruction,
                "cos-cos block does not match its reconstruction (residual " +
                    std::to_string(d.cc_residual) + ")");
  }

  std::vector<double> c(static_cast<std::size_t>(n));
  v.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    c[static_cast<std::size_t>(k)] = std::sqrt(q(k));
    v.weights[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * q(k) / x;
  }
  v.decision = GeneratorDecision::Unique;
  v.generator = SpectralSequence(std::move(c), mats.domain_length);
  v.total_variance = x;
  v.reason = "all conditions hold";
  return v;
}

// ---------------------------------------------------------------------------
// extensions of a [0, 1] kernel to [0, 2]
// ---------------------------------------------------------------------------

/// Signed reflection of R (given on [0,1]^2 with R(., 1) = 0) to [0,2]^2:
/// each argument in (1, 2] is shifted by -1 and contributes a factor `sign`.
/// sign = -1 gives the 1-antiperiodic extension, +1 the 1-periodic one.
inline CovarianceKernel extend_to_double_domain(const CovarianceKernel& kernel, double sign) {
  detail::require(kernel.domain_length() == 1.0, Errc::InvalidArgument,
                  "extension needs a kernel on [0, 1]");
  auto fold = [sign](double u, double& factor) {
    u -= 2.0 * std::floor(u / 2.0);
    if (u > 1.0) {
      factor *= sign;
      u -= 1.0;
    }
    return u;
  };
  return CovarianceKernel::conditioned(
      [kernel, fold](double s, double t) {
        double factor = 1.0;
        const double a = fold(s, factor);
        const double b = fold(t, factor);
        return factor * kernel(a, b);
      },
      2.0, sign < 0.0 ? Parity::Antiperiodic : Parity::Periodic);
}

enum class ExtensionKind { Antiperiodic, Periodic, None };

inline std::string_view to_string(ExtensionKind k) {
  switch (k) {
    case ExtensionKind::Antiperiodic: return "antiperiodic";
    case ExtensionKind::Periodic: return "periodic";
    case ExtensionKind::None: return "none";
  }
  return "unknown";
}

struct ExtensionResult {
  ExtensionKind kind = ExtensionKind::None;
  GeneratorVerdict antiperiodic;
  GeneratorVerdict periodic;
  /// max_s |R(s, 1)| measured for the precondition.
  double endpoint_residual = 0.0;

  const SpectralSequence& generator() const {
    detail::require(kind != ExtensionKind::None, Errc::InvalidArgument, "no extension found");
    return kind == ExtensionKind::Antiperiodic ? antiperiodic.generator : periodic.generator;
  }
};

/// Tries both signed extensions and returns the one admitting a generator. At
/// most one can; if both pass numerically, BothSucceed is raised.
inline ExtensionResult extension_dichotomy(const CovarianceKernel& kernel, std::size_t K,
                                           std::size_t M = 0, double tol = 0.0) {
  detail::require(kernel.kind() == KernelKind::Conditioned, Errc::InvalidArgument,
                  "extension_dichotomy needs a conditioned kernel");
  detail::require(kernel.domain_length() == 1.0, Errc::InvalidArgument,
                  "extension_dichotomy needs a kernel on [0, 1]");

  constexpr std::size_t kProbe = 256;
  double scale = 0.0;
  ExtensionResult out;
  for (std::size_t i = 0; i <= kProbe; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(kProbe);
    scale = std::max(scale, std::abs(kernel(s, s)));
    out.endpoint_residual = std::max(out.endpoint_residual, std::abs(kernel(s, 1.0)));
  }
  if (scale == 0.0) return out;
  const double pre_tol = tol > 0.0 ? tol : 1e-6 * scale;
  detail::require(out.endpoint_residual <= pre_tol, Errc::PreconditionViolated,
                  "R(s, 1) does not vanish (max " + std::to_string(out.endpoint_residual) + ")");

  out.antiperiodic =
      check_generator(fourier_matrices(extend_to_double_domain(kernel, -1.0), K, M), tol);
  out.periodic = check_generator(fourier_matrices(extend_to_double_domain(kernel, 1.0), K, M), tol);

  const bool anti = out.antiperiodic.unique();
  const bool per = out.periodic.unique();
  detail::require(!(anti && per), Errc::BothSucceed,
                  "both extensions admit a generator; tolerance too loose");
  out.kind = anti ? ExtensionKind::Antiperiodic : per ? ExtensionKind::Periodic : ExtensionKind::None;
  return out;
}

/// Generator of the antiperiodic extension of the Brownian bridge on [0, 2]:
/// c_j = 1 / (pi j) at odd frequencies j = 2k+1, k = 0..K, zero elsewhere. Its
/// covariogram is the tent 1/4 - |delta|/2.
inline SpectralSequence brownian_bridge_generator(std::size_t K) {
  std::vector<double> c(2 * K + 2, 0.0);
  for (std::size_t k = 0; k <= K; ++k) {
    const double j = static_cast<double>(2 * k + 1);
    c[2 * k + 1] = 1.0 / (std::numbers::pi * j);
  }
  return SpectralSequence(std::move(c), 2.0);
}

}  // namespace circnoise
