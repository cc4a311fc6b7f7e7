#pragma once
/*
 * mle.hpp
 *
 * Power-law model on [0, 1):
 *   x_t = sum_{k=1}^n (a / k^p) (Y_k sin(2 k pi t) + Y'_k cos(2 k pi t))
 * (plain sin/cos, no sqrt2), sampled at N = 2n + 1 points t_i = i / N. On that
 * grid the discrete sines and cosines at frequencies 1..n are exactly
 * orthogonal, so the DFT returns y1_k = (a / k^p) Y_k and y2_k = (a / k^p) Y'_k
 * up to round-off, and with o_k = y1_k^2 + y2_k^2
 *
 *   l(a, p) = -n log(2 pi) - 2n log a + 2p sum log k - (1 / 2a^2) sum k^{2p} o_k.
 *
 * For fixed p the amplitude maximizer is a^2(p) = (1 / 2n) sum k^{2p} o_k; the
 * joint estimate maximizes the profile likelihood in p.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <limits>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "circnoise/error.hpp"
#include "circnoise/rng.hpp"
#include "circnoise/spectral_core.hpp"
#include "circnoise/synthesis.hpp"

namespace circnoise {

struct PowerLawModel {
  double a = 1.0;
  double p = 1.0;
  std::size_t n = 2;

  void validate() const {
    detail::require(std::isfinite(a) && a > 0.0, Errc::InvalidArgument, "amplitude must be > 0");
    detail::require(std::isfinite(p), Errc::InvalidArgument, "exponent must be finite");
    detail::require(n >= 2, Errc::InvalidArgument, "model needs n >= 2 frequencies");
  }
  std::size_t sample_count() const { return 2 * n + 1; }
  double amplitude(std::size_t k) const { return a / std::pow(static_cast<double>(k), p); }
};

/// Per-frequency energies o_k = y1_k^2 + y2_k^2, k = 1..n (stored at k - 1).
struct FrequencyEnergies {
  std::vector<double> o;
  std::vector<double> y1;
  std::vector<double> y2;

  std::size_t n() const { return o.size(); }

  static FrequencyEnergies from_energies(std::vector<double> o) {
    FrequencyEnergies e;
    e.o = std::move(o);
    return e;
  }
};

inline SamplePath sample_model(const PowerLawModel& model, const GaussianDraw& draw) {
  model.validate();
  detail::require(draw.size() >= model.n, Errc::InvalidArgument, "not enough Gaussian draws");
  const std::size_t N = model.sample_count();
  const detail::TrigTable trig(N);
  SamplePath path;
  path.values.assign(N, 0.0);
  path.domain_length = 1.0;
  path.seed = draw.seed;
  path.model_tag = "power-law";
  for (std::size_t k = 1; k <= model.n; ++k) {
    const double amp = model.amplitude(k);
    const double as = amp * draw.y[k - 1];
    const double ac = amp * draw.yp[k];
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t idx = (k * i) % N;
      path.values[i] += as * trig.sin[idx] + ac * trig.cos[idx];
    }
  }
  return path;
}

inline SamplePath sample_model(const PowerLawModel& model, std::uint64_t seed) {
  return sample_model(model, GaussianDraw::generate(model.n, seed));
}

/// DFT of a (2n + 1)-point path at frequencies 1..n, scaled by 2 / N so that a
/// pure a sin(2 k pi t) + b cos(2 k pi t) returns (a, b) exactly.
inline FrequencyEnergies energies(const SamplePath& path, std::size_t n) {
  const std::size_t N = path.grid_points();
  detail::require(N == 2 * n + 1, Errc::LengthMismatch,
                  "path has " + std::to_string(N) + " samples, expected " + std::to_string(2 * n + 1));
  const detail::TrigTable trig(N);
  FrequencyEnergies e;
  e.o.resize(n);
  e.y1.resize(n);
  e.y2.resize(n);
  const double scale = 2.0 / static_cast<double>(N);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t idx = (k * i) % N;
      s += path.values[i] * trig.sin[idx];
      c += path.values[i] * trig.cos[idx];
    }
    e.y1[k - 1] = scale * s;
    e.y2[k - 1] = scale * c;
    e.o[k - 1] = e.y1[k - 1] * e.y1[k - 1] + e.y2[k - 1] * e.y2[k - 1];
  }
  return e;
}

inline double loglik(const FrequencyEnergies& e, double a, double p) {
  detail::require(a > 0.0, Errc::InvalidArgument, "amplitude must be > 0");
  const std::size_t n = e.n();
  double sum_log = 0.0, weighted = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double lk = std::log(static_cast<double>(k));
    sum_log += lk;
    weighted += std::exp(2.0 * p * lk) * e.o[k - 1];
  }
  const double dn = static_cast<double>(n);
  return -dn * std::log(2.0 * std::numbers::pi) - 2.0 * dn * std::log(a) + 2.0 * p * sum_log -
         weighted / (2.0 * a * a);
}

/// (dl/da, dl/dp) at (a, p).
inline std::pair<double, double> score(const FrequencyEnergies& e, double a, double p) {
  const std::size_t n = e.n();
  double w = 0.0, sp = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double lk = std::log(static_cast<double>(k));
    const double wk = std::exp(2.0 * p * lk) * e.o[k - 1];
    w += wk;
    sp += lk * (2.0 - wk / (a * a));
  }
  return {-2.0 * static_cast<double>(n) / a + w / (a * a * a), sp};
}

/// Closed-form amplitude for known p0: a^2 = (1 / 2n) sum k^{2 p0} o_k.
inline double fit_known_p(const FrequencyEnergies& e, double p0) {
  const std::size_t n = e.n();
  detail::require(n >= 1, Errc::InvalidArgument, "no energies");
  double w = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    w += std::pow(static_cast<double>(k), 2.0 * p0) * e.o[k - 1];
  }
  detail::require(w > 0.0, Errc::AllZeroEnergies, "all energies are zero");
  return std::sqrt(w / (2.0 * static_cast<double>(n)));
}

namespace detail {

/// Weighted log-frequency moments under w_k proportional to k^{2p} o_k,
/// computed with a max shift to stay finite for large |p|.
struct LogMoments {
  double mean = 0.0;
  double var = 0.0;
};

inline LogMoments log_moments(const FrequencyEnergies& e, double p) {
  const std::size_t n = e.n();
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= n; ++k) {
    if (e.o[k - 1] > 0.0) {
      shift = std::max(shift, 2.0 * p * std::log(static_cast<double>(k)) + std::log(e.o[k - 1]));
    }
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (!(e.o[k - 1] > 0.0)) continue;
    const double lk = std::log(static_cast<double>(k));
    const double wk = std::exp(2.0 * p * lk + std::log(e.o[k - 1]) - shift);
    z += wk;
    m1 += wk * lk;
    m2 += wk * lk * lk;
  }
  LogMoments m;
  m.mean = m1 / z;
  m.var = std::max(0.0, m2 / z - m.mean * m.mean);
  return m;
}

/// Finds the root of a decreasing function on [-10, 10], widening once to
/// [-20, 20], then polishes with Newton steps.
template <class F, class DF>
double decreasing_root(F f, DF df, int& iterations) {
  double lo = -10.0, hi = 10.0;
  if (!(f(lo) > 0.0 && f(hi) < 0.0)) {
    lo = -20.0;
    hi = 20.0;
    detail::require(f(lo) > 0.0 && f(hi) < 0.0, Errc::NoRoot,
                    "score has no sign change on [-20, 20]");
  }
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  iterations = static_cast<int>(max_iter);
  detail::require(max_iter < 200, Errc::NotConverged, "bracketing did not converge");
  double p = 0.5 * (bracket.first + bracket.second);
  for (int i = 0; i < 3; ++i) {
    const double d = df(p);
    if (!(d < 0.0)) break;
    const double next = p - f(p) / d;
    if (!(next >= bracket.first - 1e-12 && next <= bracket.second + 1e-12)) break;
    if (std::abs(f(next)) > std::abs(f(p))) break;
    p = next;
    ++iterations;
  }
  return p;
}

inline double sum_log(std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 2; k <= n; ++k) s += std::log(static_cast<double>(k));
  return s;
}

}  // namespace detail

struct AsymptoticScales {
  /// I_n(p0) = 4 sum log^2 k.
  double fisher_p = 0.0;
  /// 1 / sqrt(I_n): sd of p-hat when a is known.
  double scale_p = 0.0;
  /// a0 / (2 sqrt n): sd of a-hat when p is known.
  double scale_a = 0.0;
  /// 4 (sum log^2 k - (sum log k)^2 / n): information for p with a profiled out.
  double efficient_fisher_p = 0.0;
  double scale_p_joint = 0.0;
  /// Asymptotic corr(a-hat, p-hat) of the joint fit; positive.
  double predicted_correlation = 0.0;
  bool degenerate = false;
};

inline AsymptoticScales asymptotics(double a0, double p0, std::size_t n) {
  (void)p0;  // the Fisher information of this model does not depend on p0
  detail::require(a0 > 0.0 && n >= 1, Errc::InvalidArgument, "need a0 > 0 and n >= 1");
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t k = 2; k <= n; ++k) {
    const double lk = std::log(static_cast<double>(k));
    l1 += lk;
    l2 += lk * lk;
  }
  const double dn = static_cast<double>(n);
  AsymptoticScales s;
  s.fisher_p = 4.0 * l2;
  s.scale_a = a0 / (2.0 * std::sqrt(dn));
  s.efficient_fisher_p = 4.0 * (l2 - l1 * l1 / dn);
  s.degenerate = !(s.fisher_p > 0.0) || !(s.efficient_fisher_p > 1e-12 * s.fisher_p);
  if (s.fisher_p > 0.0) s.scale_p = 1.0 / std::sqrt(s.fisher_p);
  if (!s.degenerate) {
    s.scale_p_joint = 1.0 / std::sqrt(s.efficient_fisher_p);
    // a-hat - a0 ~ a0 (psi / n)(p-hat - p0) + independent N(0, a0^2 / 4n).
    const double slope = (l1 / dn) * s.scale_p_joint;
    s.predicted_correlation = slope / std::sqrt(slope * slope + 1.0 / (4.0 * dn));
  }
  return s;
}

inline AsymptoticScales asymptotics(const PowerLawModel& m) { return asymptotics(m.a, m.p, m.n); }

struct FitResult {
  double a_hat = 0.0;
  double p_hat = 0.0;
  double score_a = 0.0;
  double score_p = 0.0;
  int iterations = 0;
  bool converged = false;
  AsymptoticScales asymptotic;
};

/// Joint ML estimate by profiling a out and solving the p-score.
inline FitResult fit_joint(const FrequencyEnergies& e, double score_tol = 1e-8) {
  const std::size_t n = e.n();
  std::size_t positive = 0;
  for (std::size_t k = 1; k <= n; ++k) positive += e.o[k - 1] > 0.0 ? 1 : 0;
  detail::require(positive >= 2, Errc::InvalidArgument,
                  "joint fit needs at least two frequencies with positive energy");
  const double psi = detail::sum_log(n);
  const double dn = static_cast<double>(n);
  // profile score 2 psi - 2n E_w[log k]; derivative -4n Var_w[log k]
  auto g = [&](double p) { return 2.0 * psi - 2.0 * dn * detail::log_moments(e, p).mean; };
  auto dg = [&](double p) { return -4.0 * dn * detail::log_moments(e, p).var; };

  FitResult r;
  r.p_hat = detail::decreasing_root(g, dg, r.iterations);
  r.a_hat = fit_known_p(e, r.p_hat);
  std::tie(r.score_a, r.score_p) = score(e, r.a_hat, r.p_hat);
  r.converged = std::abs(r.score_a) < score_tol && std::abs(r.score_p) < score_tol;
  detail::require(r.converged, Errc::NotConverged,
                  "score residual (" + std::to_string(r.score_a) + ", " +
                      std::to_string(r.score_p) + ") above tolerance");
  r.asymptotic = asymptotics(r.a_hat, r.p_hat, n);
  return r;
}

/// Zero of the p-score at a known amplitude a0.
inline double fit_known_a(const FrequencyEnergies& e, double a0) {
  detail::require(a0 > 0.0, Errc::InvalidArgument, "amplitude must be > 0");
  const std::size_t n = e.n();
  auto g = [&](double p) { return score(e, a0, p).second; };
  auto dg = [&](double p) {
    double d = 0.0;
    for (std::size_t k = 2; k <= n; ++k) {
      const double lk = std::log(static_cast<double>(k));
      d -= 2.0 * lk * lk * std::exp(2.0 * p * lk) * e.o[k - 1] / (a0 * a0);
    }
    return d;
  };
  int iterations = 0;
  return detail::decreasing_root(g, dg, iterations);
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct ReplicateFit {
  std::uint64_t seed = 0;
  double a_hat = 0.0;
  double p_hat = 0.0;
  bool ok = false;
};

/// Joint fits of `replicates` independent model draws. Replicate r uses
/// derive_seed(seed, r); work is split across threads, results are ordered by r.
inline std::vector<ReplicateFit> simulate_joint_fits(const PowerLawModel& model,
                                                     std::size_t replicates, std::uint64_t seed,
                                                     unsigned threads = 0) {
  model.validate();
  std::vector<ReplicateFit> out(replicates);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, replicates)));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      ReplicateFit& f = out[r];
      f.seed = derive_seed(seed, r);
      try {
        const FitResult fit = fit_joint(energies(sample_model(model, f.seed), model.n));
        f.a_hat = fit.a_hat;
        f.p_hat = fit.p_hat;
        f.ok = true;
      } catch (const Error&) {
        f.ok = false;
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t chunk = (replicates + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(replicates, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();
  return out;
}

}  // namespace circnoise
