#pragma once
/*
 * spectrum.hpp
 *
 * Eigen-decomposition of the conditioned covariance operator
 *   (T f)(s) = int_0^L R(s, t) f(t) dt,   R = C(t - s) - C(s) C(t) / C(0),
 * in terms of the generator variances a_k = c_k^2 / C(0) (so a_0 + 2 sum a_k = 1).
 *
 *   - every a_k > 0 (k >= 1) keeps its sine eigenfunction s_k with eigenvalue a_k;
 *   - a value shared by m indices gives m - 1 even eigenfunctions supported on
 *     those indices, orthogonal to w = (1, sqrt2, sqrt2, ...);
 *   - each gap (a_(n+1), a_(n)) between consecutive distinct positive values
 *     holds exactly one more eigenvalue, the root of the secular equation
 *       S(x) = a_0^2 / (a_0 - x) + 2 sum_n a_n^2 / (a_n - x) = 1,
 *     with eigenfunction f_0 = a_0 / (a_0 - x), f_n = sqrt2 a_n / (a_n - x).
 *
 * Eigenvalues are reported in operator units: L * C(0) * (normalized value).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circnoise/error.hpp"
#include "circnoise/spectral_core.hpp"

namespace circnoise {

struct SinePair {
  double value = 0.0;
  std::size_t frequency = 0;
};

struct EvenPair {
  double value = 0.0;
  double normalized_value = 0.0;
  /// Unit-norm coefficients (f_0, f_1^c, ..., f_K^c).
  std::vector<double> coeffs;
  double secular_residual = 0.0;
};

struct MultiplicityPair {
  double value = 0.0;
  double normalized_value = 0.0;
  std::vector<std::size_t> support;
  /// m - 1 orthonormal coefficient vectors of length K + 1.
  std::vector<std::vector<double>> basis;
};

struct EigenSystem {
  std::vector<SinePair> sine_pairs;
  std::vector<EvenPair> even_pairs;
  std::vector<MultiplicityPair> multiplicity_pairs;
  /// C(0) of the input; the normalized problem has C(0) = 1.
  double variance_scale = 1.0;
  double domain_length = 1.0;
  double cluster_tol = 0.0;

  /// Multiset of all nonzero eigenvalues, descending.
  std::vector<double> eigenvalues() const {
    std::vector<double> out;
    for (const auto& p : sine_pairs) out.push_back(p.value);
    for (const auto& p : even_pairs) out.push_back(p.value);
    for (const auto& p : multiplicity_pairs) out.insert(out.end(), p.basis.size(), p.value);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }
};

namespace detail {

struct VarianceGroup {
  double value = 0.0;  // mean of the members
  double hi = 0.0;     // largest member
  double lo = 0.0;     // smallest member
  std::vector<std::size_t> members;
};

/// Distinct positive normalized variances, descending, clustered within tol.
inline std::vector<VarianceGroup> group_variances(const std::vector<double>& a, double tol) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > 0.0) idx.push_back(k);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a[i] > a[j]; });

  std::vector<VarianceGroup> groups;
  for (std::size_t k : idx) {
    if (!groups.empty()) {
      const double gap = groups.back().lo - a[k];
      if (gap < tol) {
        auto& g = groups.back();
        g.members.push_back(k);
        g.lo = a[k];
        continue;
      }
      detail::require(gap > 10.0 * tol, Errc::ClusterAmbiguity,
                      "variances " + std::to_string(groups.back().lo) + " and " +
                          std::to_string(a[k]) + " are neither equal nor separated");
    }
    groups.push_back({a[k], a[k], a[k], {k}});
  }
  for (auto& g : groups) {
    double sum = 0.0;
    for (std::size_t k : g.members) sum += a[k];
    g.value = sum / static_cast<double>(g.members.size());
    std::sort(g.members.begin(), g.members.end());
  }
  return groups;
}

/// Orthonormal basis of {v in R^m : w . v = 0} via Householder QR of w.
inline std::vector<Eigen::VectorXd> null_space_of(const Eigen::VectorXd& w) {
  const Eigen::Index m = w.size();
  const Eigen::MatrixXd wm = w;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(wm);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index j = 1; j < m; ++j) out.emplace_back(Q.col(j));
  return out;
}

}  // namespace detail

/// S(x) for normalized variances a (index 0 weighted 1, others 2).
inline double secular_function(const std::vector<double>& a, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) continue;
    s += (k == 0 ? 1.0 : 2.0) * a[k] * a[k] / (a[k] - x);
  }
  return s;
}

/// S'(x); positive away from the poles.
inline double secular_derivative(const std::vector<double>& a, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) continue;
    const double r = a[k] / (a[k] - x);
    s += (k == 0 ? 1.0 : 2.0) * r * r;
  }
  return s;
}

/// Normalized generator variances a_k = c_k^2 / C(0).
inline std::vector<double> normalized_variances(const SpectralSequence& seq) {
  const double c0 = seq.total_variance();
  detail::require(c0 > 0.0, Errc::DegenerateKernel, "C(0) = 0");
  std::vector<double> a(seq.coeffs.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = seq.variance(k) / c0;
  return a;
}

/// Full eigen-decomposition of the conditioned operator. cluster_tol <= 0
/// selects 1e-9 * a_(1) (normalized units).
inline EigenSystem conditioned_spectrum(const SpectralSequence& seq, double cluster_tol = 0.0) {
  seq.validate();
  const std::vector<double> a = normalized_variances(seq);
  const double a_max = *std::max_element(a.begin(), a.end());
  EigenSystem sys;
  sys.variance_scale = seq.total_variance();
  sys.domain_length = seq.domain_length;
  sys.cluster_tol = cluster_tol > 0.0 ? cluster_tol : 1e-9 * a_max;
  const double unit = sys.variance_scale * sys.domain_length;
  const std::size_t n = a.size();

  for (std::size_t k = 1; k < n; ++k) {
    if (a[k] > 0.0) sys.sine_pairs.push_back({unit * a[k], k});
  }

  const auto groups = detail::group_variances(a, sys.cluster_tol);

  for (const auto& g : groups) {
    if (g.members.size() < 2) continue;
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.members.size()));
    for (std::size_t i = 0; i < g.members.size(); ++i) {
      w(static_cast<Eigen::Index>(i)) = g.members[i] == 0 ? 1.0 : std::numbers::sqrt2;
    }
    MultiplicityPair mp;
    mp.value = unit * g.value;
    mp.normalized_value = g.value;
    mp.support = g.members;
    for (const Eigen::VectorXd& v : detail::null_space_of(w)) {
      std::vector<double> full(n, 0.0);
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        full[g.members[i]] = v(static_cast<Eigen::Index>(i));
      }
      mp.basis.push_back(std::move(full));
    }
    sys.multiplicity_pairs.push_back(std::move(mp));
  }

  for (std::size_t gi = 0; gi + 1 < groups.size(); ++gi) {
    const double upper = groups[gi].lo;      // nearest pole above
    const double lower = groups[gi + 1].hi;  // nearest pole below
    const double shrink = 1e-14 * (upper - lower);
    double lo = lower + shrink;
    double hi = upper - shrink;
    // S - 1 runs from -inf to +inf across the gap and is increasing.
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (secular_function(a, mid) - 1.0 < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double rlo = std::abs(secular_function(a, lo) - 1.0);
    const double rhi = std::abs(secular_function(a, hi) - 1.0);
    const double root = rlo <= rhi ? lo : hi;

    EvenPair ep;
    ep.normalized_value = root;
    ep.value = unit * root;
    ep.secular_residual = std::min(rlo, rhi);
    ep.coeffs.assign(n, 0.0);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (a[k] == 0.0) continue;
      const double f = (k == 0 ? 1.0 : std::numbers::sqrt2) * a[k] / (a[k] - root);
      ep.coeffs[k] = f;
      norm2 += f * f;
    }
    const double norm = std::sqrt(norm2);
    for (double& f : ep.coeffs) f /= norm;
    sys.even_pairs.push_back(std::move(ep));
  }
  return sys;
}

/// Brute-force check: eigenvalues of R sampled on an m x m closed-open grid,
/// symmetrized and scaled by the grid step, descending.
inline std::vector<double> operator_oracle(const CovarianceKernel& kernel, std::size_t m) {
  detail::require(m >= 100, Errc::InvalidArgument, "oracle needs m >= 100");
  Eigen::MatrixXd R = tabulate(kernel, m);
  R = 0.5 * (R + R.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
  const double step = kernel.domain_length() / static_cast<double>(m);
  std::vector<double> out(static_cast<std::size_t>(es.eigenvalues().size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = step * es.eigenvalues()(static_cast<Eigen::Index>(i));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

struct InterlacingReport {
  bool pass = true;
  bool multiplicity_branch = false;
  std::vector<std::string> violations;
};

/// Checks strict interlacing of the secular eigenvalues, m - 1 emission for
/// each repeated variance, and that nothing lies above max a or below the
/// smallest positive a.
inline InterlacingReport verify_interlacing(const EigenSystem& sys, const SpectralSequence& seq) {
  InterlacingReport rep;
  const std::vector<double> a = normalized_variances(seq);
  const auto groups = detail::group_variances(a, sys.cluster_tol);
  const double unit = sys.variance_scale * sys.domain_length;
  auto violate = [&](std::string what) {
    rep.pass = false;
    rep.violations.push_back(std::move(what));
  };

  if (groups.empty()) {
    if (!sys.even_pairs.empty()) violate("even eigenvalues without any positive variance");
    return rep;
  }
  const double top = unit * groups.front().hi;
  const double bottom = unit * groups.back().lo;

  std::vector<double> even;
  for (const auto& p : sys.even_pairs) even.push_back(p.value);
  std::sort(even.begin(), even.end(), std::greater<>());

  for (double v : even) {
    if (v > top) violate("even eigenvalue " + std::to_string(v) + " exceeds max variance");
    if (v < bottom) {
      violate("even eigenvalue " + std::to_string(v) + " is below the smallest positive variance");
    }
  }
  for (std::size_t gi = 0; gi + 1 < groups.size(); ++gi) {
    const double upper = unit * groups[gi].lo;
    const double lower = unit * groups[gi + 1].hi;
    const auto inside = std::count_if(even.begin(), even.end(),
                                      [&](double v) { return v < upper && v > lower; });
    if (inside != 1) {
      violate("gap (" + std::to_string(lower) + ", " + std::to_string(upper) + ") holds " +
              std::to_string(inside) + " even eigenvalues, expected 1");
    }
  }
  if (even.size() != groups.size() - 1) {
    violate("expected " + std::to_string(groups.size() - 1) + " secular eigenvalues, found " +
            std::to_string(even.size()));
  }

  for (const auto& g : groups) {
    if (g.members.size() < 2) continue;
    rep.multiplicity_branch = true;
    const auto it = std::find_if(sys.multiplicity_pairs.begin(), sys.multiplicity_pairs.end(),
                                 [&](const MultiplicityPair& p) { return p.support == g.members; });
    if (it == sys.multiplicity_pairs.end()) {
      violate("repeated variance " + std::to_string(unit * g.value) + " has no multiplicity pair");
      continue;
    }
    if (it->basis.size() != g.members.size() - 1) {
      violate("repeated variance " + std::to_string(unit * g.value) + " emits " +
              std::to_string(it->basis.size()) + " eigenfunctions, expected " +
              std::to_string(g.members.size() - 1));
    }
  }
  return rep;
}

}  // namespace circnoise
