// Randomized invariant checks, 100+ cases per property.

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "circnoise/circnoise.hpp"

using namespace circnoise;

namespace {

constexpr int kCases = 100;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng_.next() % (hi - lo + 1));
  }
  bool coin(double p = 0.5) { return rng_.uniform() < p; }

  /// Random spectrum with some exact zeros.
  SpectralSequence spectrum(std::size_t K, double length = 1.0, double zero_prob = 0.2) {
    std::vector<double> c(K + 1);
    for (double& x : c) x = coin(zero_prob) ? 0.0 : uniform(0.05, 1.0);
    if (std::all_of(c.begin() + 1, c.end(), [](double x) { return x == 0.0; })) c[1] = 0.5;
    return SpectralSequence(c, length);
  }

  /// Spectrum with pairwise distinct positive variances.
  SpectralSequence distinct_spectrum(std::size_t K) {
    std::vector<double> c(K + 1);
    for (double& x : c) x = uniform(0.05, 1.0);
    return SpectralSequence(c, 1.0);
  }

 private:
  SplitMix64 rng_;
};

}  // namespace

TEST(SpectralCoreProperties, CoefficientRoundTrip) {
  Gen g(1);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = g.integer(1, 64);
    const auto seq = g.spectrum(K, g.coin() ? 1.0 : 2.0);
    const auto back = coeffs_from_covariogram(covariogram_from_coeffs(seq), K, 16 * K);
    for (std::size_t k = 0; k <= K; ++k) {
      // compare variances: sqrt amplifies round-off near zero coefficients
      EXPECT_NEAR(back.sequence.variance(k), seq.variance(k), 1e-12) << i << " k=" << k;
      if (seq.coeffs[k] > 0) EXPECT_NEAR(back.sequence.coeffs[k], seq.coeffs[k], 1e-8);
    }
  }
}

TEST(SpectralCoreProperties, ConditionedKernelVanishesOnAxes) {
  Gen g(2);
  for (int i = 0; i < kCases; ++i) {
    const auto seq = g.spectrum(g.integer(1, 12));
    const auto r = condition_at_zero(covariogram_from_coeffs(seq));
    double worst = 0.0;
    for (int j = 0; j <= 64; ++j) {
      const double t = j / 64.0;
      worst = std::max({worst, std::abs(r(0.0, t)), std::abs(r(t, 0.0)), std::abs(r(1.0, t))});
    }
    EXPECT_LT(worst, 1e-12);
    for (int j = 0; j < 10; ++j) {
      const double s = g.uniform(0, 1), t = g.uniform(0, 1);
      EXPECT_NEAR(r(s, t), r(t, s), 1e-14);
    }
  }
}

TEST(SpectralCoreProperties, MixedBlocksVanishAndGridIsPsd) {
  Gen g(3);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = g.integer(1, 10);
    const auto seq = g.spectrum(K);
    const auto r = condition_at_zero(covariogram_from_coeffs(seq));
    const auto m = fourier_matrices(r, K, 128);
    const double tol = default_generator_tol(m);
    EXPECT_LT(std::max(m.rsc.cwiseAbs().maxCoeff(), m.rcs.cwiseAbs().maxCoeff()), tol);
    EXPECT_LT((m.rcc - m.rcc.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((m.rss - m.rss.transpose()).cwiseAbs().maxCoeff(), 1e-15);

    const Eigen::MatrixXd R = tabulate(r, 64) / 64.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(SpectralCoreProperties, CovariogramBoundedByZeroLag) {
  Gen g(4);
  for (int i = 0; i < kCases; ++i) {
    const auto seq = g.spectrum(g.integer(1, 20), g.coin() ? 1.0 : 2.0);
    const auto c = covariogram_from_coeffs(seq);
    const double c0 = c.covariogram(0.0);
    EXPECT_NEAR(c0, seq.total_variance(), 1e-12);
    for (int j = 0; j < 20; ++j) {
      const double tau = g.uniform(-3, 3);
      EXPECT_LE(std::abs(c.covariogram(tau)), c0 + 1e-12);
      EXPECT_NEAR(c.covariogram(tau), c.covariogram(tau + seq.domain_length), 1e-12);
    }
  }
}

TEST(SynthesisProperties, ReproducibleAndConditioned) {
  Gen g(5);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = g.integer(1, 16);
    const auto seq = g.spectrum(K);
    const std::size_t N = 2 * (K + 1) + g.integer(0, 40);
    const std::uint64_t seed = g.integer(0, 1u << 30);
    EXPECT_EQ(sample_H(seq, N, seed).values, sample_H(seq, N, seed).values);
    const auto y = sample_H0(seq, N, seed);
    EXPECT_EQ(y.values[0], 0.0);
    EXPECT_EQ(y.grid_points(), N);
    for (double v : y.values) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(SynthesisProperties, AntiperiodicPathsFlipSign) {
  Gen g(6);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = 2 * g.integer(1, 10) + 1;
    std::vector<double> c(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; k += 2) c[k] = g.uniform(0.0, 1.0);
    const SpectralSequence seq(c, 2.0);
    const std::size_t N = 2 * (2 * (K + 1) + 2 * g.integer(0, 10));
    const auto p = sample_H(seq, N, g.integer(0, 1u << 30));
    for (std::size_t j = 0; j < N / 2; ++j) EXPECT_EQ(p.values[j + N / 2], -p.values[j]);
  }
}

TEST(SynthesisProperties, StationaryVariance) {
  const auto seq = SpectralSequence({0.3, 0.6, 0.2, 0.4}, 1.0);
  const std::size_t N = 16, R = 4000;
  std::vector<double> sum2(N, 0.0);
  for (std::size_t s = 0; s < R; ++s) {
    const auto p = sample_H(seq, N, derive_seed(6, s));
    for (std::size_t i = 0; i < N; ++i) sum2[i] += p.values[i] * p.values[i];
  }
  const double c0 = seq.total_variance();
  for (double v : sum2) EXPECT_NEAR(v / R, c0, 4 * c0 * std::sqrt(2.0 / R));
}

TEST(GeneratorProperties, SoundnessRoundTrip) {
  Gen g(7);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = g.integer(1, 10);
    const auto seq = g.spectrum(K);
    const auto v = check_generator(fourier_matrices(condition_at_zero(covariogram_from_coeffs(seq)), K));
    ASSERT_TRUE(v.unique()) << i << ": " << v.reason;
    for (std::size_t k = 0; k <= K; ++k) {
      EXPECT_NEAR(v.generator.coeffs[k], seq.coeffs[k], 1e-6 * std::max(seq.coeffs[k], 1.0));
    }
    double s = 0;
    for (double w : v.weights) s += w;
    EXPECT_NEAR(s, 1.0, 1e-9);
    EXPECT_GT(v.total_variance, 0.0);
  }
}

TEST(GeneratorProperties, RandomSineEntriesBreakDiagonality) {
  Gen g(8);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = g.integer(2, 8);
    auto m = fourier_matrices(condition_at_zero(covariogram_from_coeffs(g.spectrum(K))), K);
    const auto a = static_cast<Eigen::Index>(g.integer(1, K - 1));
    const auto b = a + 1;
    m.rss(a, b) = m.rss(b, a) = g.uniform(0.01, 0.2);
    const auto v = check_generator(m);
    EXPECT_EQ(v.failed, GeneratorCondition::SineShape);
  }
}

TEST(GeneratorProperties, ExtensionOfOddGeneratorsIsAntiperiodic) {
  Gen g(9);
  for (int i = 0; i < kCases; ++i) {
    // odd generator on [0, 2]: conditioned kernel restricted to [0, 1]
    std::vector<double> c(8, 0.0);
    for (std::size_t k = 1; k < 8; k += 2) c[k] = g.uniform(0.1, 1.0);
    const auto r = condition_at_zero(covariogram_from_coeffs(SpectralSequence(c, 2.0)));
    const auto restricted = r.with_domain_length(1.0);
    const auto ext = extension_dichotomy(restricted, 8, 64);
    ASSERT_EQ(ext.kind, ExtensionKind::Antiperiodic) << i;
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(ext.generator().coeffs[k], c[k], 1e-6);
  }
}

TEST(SpectrumProperties, SecularRootsZeroSumAndInterlacing) {
  Gen g(10);
  for (int i = 0; i < kCases; ++i) {
    const auto seq = g.distinct_spectrum(g.integer(1, 12));
    const auto sys = conditioned_spectrum(seq);
    const auto a = normalized_variances(seq);
    for (const auto& p : sys.even_pairs) {
      // sign change of S - 1 within a relative 1e-12 bracket around the root
      const double x = p.normalized_value, d = 1e-12 * x;
      EXPECT_LT(secular_function(a, x - d), 1.0);
      EXPECT_GT(secular_function(a, x + d), 1.0);
      double zs = p.coeffs[0];
      for (std::size_t k = 1; k < p.coeffs.size(); ++k) zs += std::numbers::sqrt2 * p.coeffs[k];
      EXPECT_NEAR(zs, 0.0, 1e-10);
    }
    EXPECT_TRUE(verify_interlacing(sys, seq).pass) << i;
    EXPECT_EQ(sys.eigenvalues().size(), 2 * seq.truncation());
  }
}

TEST(SpectrumProperties, OracleAgreement) {
  Gen g(11);
  for (int i = 0; i < kCases; ++i) {
    const auto seq = g.spectrum(g.integer(1, 8), 1.0, 0.15);
    const auto ev = conditioned_spectrum(seq).eigenvalues();
    const auto oracle = operator_oracle(condition_at_zero(covariogram_from_coeffs(seq)), 200);
    for (std::size_t j = 0; j < ev.size(); ++j) EXPECT_NEAR(ev[j], oracle[j], 1e-3 * ev[j]) << i;
  }
}

TEST(SpectrumProperties, RepeatedVariancesEmitMMinusOne) {
  Gen g(12);
  for (int i = 0; i < kCases; ++i) {
    const std::size_t K = g.integer(2, 9);
    std::vector<double> levels = {g.uniform(0.1, 0.4), g.uniform(0.5, 0.9)};
    std::vector<double> c(K + 1);
    for (double& x : c) x = levels[g.integer(0, 1)];
    const SpectralSequence seq(c, 1.0);
    const auto sys = conditioned_spectrum(seq);
    const auto rep = verify_interlacing(sys, seq);
    EXPECT_TRUE(rep.pass) << i;
    std::size_t total = sys.sine_pairs.size() + sys.even_pairs.size();
    for (const auto& mp : sys.multiplicity_pairs) {
      EXPECT_EQ(mp.basis.size(), mp.support.size() - 1);
      total += mp.basis.size();
      for (const auto& b : mp.basis) {
        double zs = b[0];
        for (std::size_t k = 1; k < b.size(); ++k) zs += std::numbers::sqrt2 * b[k];
        EXPECT_NEAR(zs, 0.0, 1e-12);
      }
    }
    EXPECT_EQ(total, 2 * K);
  }
}

TEST(RegularityProperties, PowerLawPrediction) {
  Gen g(13);
  for (int i = 0; i < kCases; ++i) {
    const double p = g.uniform(0.55, 3.0);
    const std::size_t K = g.integer(16, 256);
    std::vector<double> c(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) c[k] = 1.3 / std::pow(double(k), p);
    const auto r = predict_regularity(SpectralSequence(c, 1.0));
    EXPECT_NEAR(r.decay_exponent, 2 * p, 1e-9);
    EXPECT_LT(r.beta_sup, r.alpha);
    EXPECT_GT(r.alpha, 0.0);
    EXPECT_LE(r.alpha, 1.0);
    const double rebuilt = 1.0 + 2.0 * double(r.smoothness_order) + r.alpha;
    if (r.alpha < 1.0) {
      EXPECT_NEAR(rebuilt, r.decay_exponent, 1e-9);
    } else {
      EXPECT_LE(rebuilt, r.decay_exponent + 1e-6);
    }
  }
}

TEST(RegularityProperties, StructureFunctionTheory) {
  Gen g(14);
  for (int i = 0; i < kCases; ++i) {
    const auto seq = g.spectrum(g.integer(1, 10));
    const auto cov = covariogram_from_coeffs(seq);
    const double h = g.uniform(0, 1);
    double direct = 0;
    for (std::size_t k = 1; k < seq.coeffs.size(); ++k) {
      direct += 4 * seq.variance(k) * (1 - std::cos(2 * std::numbers::pi * k * h));
    }
    EXPECT_NEAR(structure_function_theory(cov, h), direct, 1e-12);
  }
}

TEST(MleProperties, SpectralReductionIsExact) {
  Gen g(15);
  for (int i = 0; i < kCases; ++i) {
    const PowerLawModel m{g.uniform(0.2, 3.0), g.uniform(-1.0, 3.0), g.integer(2, 60)};
    const auto d = GaussianDraw::generate(m.n, g.integer(0, 1u << 30));
    const auto e = energies(sample_model(m, d), m.n);
    // likelihood in energy space equals the joint density of the 2n normals
    double direct = 0.0;
    for (std::size_t k = 1; k <= m.n; ++k) {
      const double sd = m.amplitude(k);
      for (double y : {e.y1[k - 1], e.y2[k - 1]}) {
        direct += -0.5 * std::log(2 * std::numbers::pi) - std::log(sd) - 0.5 * (y / sd) * (y / sd);
      }
      EXPECT_NEAR(e.y1[k - 1], sd * d.y[k - 1], 1e-12 * std::max(1.0, sd));
      EXPECT_NEAR(e.y2[k - 1], sd * d.yp[k], 1e-12 * std::max(1.0, sd));
    }
    EXPECT_NEAR(loglik(e, m.a, m.p), direct, 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST(MleProperties, ProfileConsistency) {
  Gen g(16);
  for (int i = 0; i < kCases; ++i) {
    const PowerLawModel m{g.uniform(0.2, 3.0), g.uniform(-0.5, 2.5), g.integer(8, 80)};
    const auto e = energies(sample_model(m, g.integer(0, 1u << 30)), m.n);
    const auto r = fit_joint(e);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(std::abs(r.score_a), 1e-8);
    EXPECT_LT(std::abs(r.score_p), 1e-8);
    EXPECT_NEAR(fit_known_p(e, r.p_hat), r.a_hat, 1e-12 * r.a_hat);
    const double best = loglik(e, r.a_hat, r.p_hat);
    for (double dp : {-1e-3, 1e-3}) EXPECT_LE(loglik(e, fit_known_p(e, r.p_hat + dp), r.p_hat + dp), best);
  }
}

TEST(MleProperties, NoiseFreeRecovery) {
  Gen g(17);
  for (int i = 0; i < kCases; ++i) {
    const double a = g.uniform(0.1, 5.0), p = g.uniform(-3.0, 8.0);
    const std::size_t n = g.integer(2, 100);
    std::vector<double> o(n);
    for (std::size_t k = 1; k <= n; ++k) o[k - 1] = 2 * a * a * std::pow(double(k), -2 * p);
    const auto r = fit_joint(FrequencyEnergies::from_energies(o));
    EXPECT_NEAR(r.p_hat, p, 1e-9);
    EXPECT_NEAR(r.a_hat, a, 1e-9 * a);
  }
}

TEST(IoProperties, JsonRoundTrip) {
  Gen g(18);
  for (int i = 0; i < kCases; ++i) {
    const auto seq = g.spectrum(g.integer(1, 30), g.coin() ? 1.0 : 2.0);
    const auto back = io::spectrum_from_json(io::json::parse(io::to_json(seq).dump()));
    EXPECT_EQ(back.coeffs, seq.coeffs);
    EXPECT_EQ(back.domain_length, seq.domain_length);

    const auto r = condition_at_zero(covariogram_from_coeffs(g.spectrum(g.integer(1, 5))));
    const std::size_t M = g.integer(4, 24);
    const auto table = io::kernel_from_json(io::json::parse(io::kernel_to_json(r, M).dump()));
    const auto A = tabulate(r, M), B = tabulate(table, M);
    EXPECT_LE((A - B).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, A.cwiseAbs().maxCoeff()));
  }
}
