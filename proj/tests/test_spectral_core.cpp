#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "circnoise/spectral_core.hpp"

using namespace circnoise;

namespace {
constexpr double pi = std::numbers::pi;

double tent(double d) { return 0.25 - 0.5 * std::abs(d); }
}  // namespace

TEST(SpectralSequence, RejectsInvalidInput) {
  EXPECT_THROW(SpectralSequence({1.0, -0.1}, 1.0), Error);
  EXPECT_THROW(SpectralSequence({1.0, 0.5}, 3.0), Error);
  EXPECT_THROW(SpectralSequence({}, 1.0), Error);
  EXPECT_THROW(SpectralSequence({1.0, std::nan("")}, 1.0), Error);
  const SpectralSequence s({1.0, 0.5, 0.25}, 2.0);
  EXPECT_EQ(s.truncation(), 2u);
  EXPECT_DOUBLE_EQ(s.variance(1), 0.25);
  EXPECT_DOUBLE_EQ(s.total_variance(), 1.0 + 2.0 * (0.25 + 0.0625));
}

TEST(Covariogram, ConstantSpectrum) {
  const auto k = covariogram_from_coeffs(SpectralSequence({1.0, 0.0, 0.0}, 1.0));
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.99}) EXPECT_DOUBLE_EQ(k.covariogram(t), 1.0);
}

TEST(Covariogram, SingleHarmonic) {
  const auto k = covariogram_from_coeffs(SpectralSequence({0.0, 1.0 / std::numbers::sqrt2, 0.0}, 1.0));
  EXPECT_NEAR(k.covariogram(0.0), 1.0, 1e-15);
  EXPECT_NEAR(k.covariogram(0.5), -1.0, 1e-15);
  for (double t = 0.0; t < 1.0; t += 0.0625) EXPECT_NEAR(k.covariogram(t), std::cos(2 * pi * t), 1e-14);
}

TEST(Covariogram, OddOnlyDoubleDomainIsTent) {
  std::vector<double> c(4002, 0.0);
  for (std::size_t j = 1; j < c.size(); j += 2) c[j] = 1.0 / (pi * static_cast<double>(j));
  const auto k = covariogram_from_coeffs(SpectralSequence(c, 2.0));
  EXPECT_EQ(k.parity(), Parity::Antiperiodic);
  for (double d : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) EXPECT_NEAR(k.covariogram(d), tent(d), 2e-4);
}

TEST(CoeffsFromCovariogram, Cosine) {
  const auto k = CovarianceKernel::stationary([](double t) { return std::cos(2 * pi * t); });
  const auto r = coeffs_from_covariogram(k, 2, 256);
  EXPECT_NEAR(r.sequence.coeffs[0], 0.0, 1e-7);  // sqrt of round-off
  EXPECT_NEAR(r.sequence.coeffs[1], 1.0 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(r.sequence.coeffs[2], 0.0, 1e-7);
  EXPECT_NEAR(r.sequence.variance(0), 0.0, 1e-14);
  EXPECT_NEAR(r.sequence.variance(2), 0.0, 1e-14);
}

TEST(CoeffsFromCovariogram, Constant) {
  const auto k = CovarianceKernel::stationary([](double) { return 1.0; });
  const auto r = coeffs_from_covariogram(k, 4);
  EXPECT_NEAR(r.sequence.coeffs[0], 1.0, 1e-14);
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_NEAR(r.sequence.variance(n), 0.0, 1e-14);
}

TEST(CoeffsFromCovariogram, TentOnDoubleDomain) {
  const auto r = coeffs_from_covariogram(tent_covariogram(), 11, 4096);
  for (std::size_t k = 0; k <= 5; ++k) {
    EXPECT_NEAR(r.sequence.coeffs[2 * k + 1], 1.0 / (pi * static_cast<double>(2 * k + 1)), 1e-6);
  }
  for (std::size_t k = 0; k <= 5; ++k) EXPECT_NEAR(r.sequence.variance(2 * k), 0.0, 1e-12);
}

TEST(CoeffsFromCovariogram, NegativeCoefficientRejected) {
  const auto k = CovarianceKernel::stationary([](double t) { return 1.0 - 3.0 * std::cos(2 * pi * t); });
  EXPECT_THROW(coeffs_from_covariogram(k, 2), Error);
  try {
    coeffs_from_covariogram(k, 2);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPositive);
  }
}

TEST(CoeffsFromCovariogram, RequiresEnoughQuadrature) {
  const auto k = CovarianceKernel::stationary([](double) { return 1.0; });
  EXPECT_THROW(coeffs_from_covariogram(k, 10, 39), Error);
}

TEST(ConditionAtZero, CosineGivesSinSin) {
  const auto k = CovarianceKernel::stationary([](double t) { return std::cos(2 * pi * t); });
  const auto r = condition_at_zero(k);
  for (double s = 0.0; s < 1.0; s += 0.1) {
    for (double t = 0.0; t < 1.0; t += 0.1) {
      EXPECT_NEAR(r(s, t), std::sin(2 * pi * s) * std::sin(2 * pi * t), 1e-14);
    }
  }
}

TEST(ConditionAtZero, TentGivesBrownianBridge) {
  const auto r = condition_at_zero(tent_covariogram());
  EXPECT_NEAR(r(0.25, 0.5), 0.125, 1e-15);
  for (double s = 0.0; s <= 1.0; s += 0.125) {
    for (double t = s; t <= 1.0; t += 0.125) EXPECT_NEAR(r(s, t), s * (1 - t), 1e-15);
  }
}

TEST(ConditionAtZero, ConstantGivesZero) {
  const auto r = condition_at_zero(CovarianceKernel::stationary([](double) { return 1.0; }));
  for (double s = 0.0; s < 1.0; s += 0.1) {
    for (double t = 0.0; t < 1.0; t += 0.1) EXPECT_EQ(r(s, t), 0.0);
  }
}

TEST(ConditionAtZero, DegenerateKernel) {
  const auto z = CovarianceKernel::stationary([](double) { return 0.0; });
  try {
    condition_at_zero(z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateKernel);
  }
  const auto r = condition_at_zero(z, true);
  EXPECT_EQ(r(0.3, 0.4), 0.0);
}

TEST(FourierMatrices, SinSinKernel) {
  const auto r = CovarianceKernel::conditioned(
      [](double s, double t) { return std::sin(2 * pi * s) * std::sin(2 * pi * t); });
  const auto m = fourier_matrices(r, 6);
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) {
      EXPECT_NEAR(m.rss(i, j), (i == 1 && j == 1) ? 0.5 : 0.0, 1e-10);
      EXPECT_NEAR(m.rcc(i, j), 0.0, 1e-10);
      EXPECT_NEAR(m.rsc(i, j), 0.0, 1e-10);
      EXPECT_NEAR(m.rcs(i, j), 0.0, 1e-10);
    }
  }
  EXPECT_NEAR(m.sine_trace, 0.5, 1e-12);
}

TEST(FourierMatrices, BrownianBridgeDiagonal) {
  const auto m = fourier_matrices(brownian_bridge_kernel(), 10, 2048);
  for (int k = 1; k <= 10; ++k) {
    const double target = 1.0 / std::pow(2 * k * pi, 2);
    EXPECT_NEAR(m.rcc(k, k), target, 1e-6);
    EXPECT_NEAR(m.rss(k, k), target, 1e-6);
  }
  // rcc_00 = integral of the bridge covariance = 1/12
  EXPECT_NEAR(m.rcc(0, 0), 1.0 / 12.0, 1e-6);
}

TEST(FourierMatrices, ZeroKernel) {
  const auto m = fourier_matrices(zero_kernel(), 5);
  EXPECT_EQ(m.rcc.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.rss.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.rsc.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(m.rcs.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FourierMatrices, BlocksAreSymmetric) {
  const auto m = fourier_matrices(brownian_bridge_kernel(), 8, 512);
  EXPECT_LT((m.rcc - m.rcc.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((m.rss - m.rss.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(m.rcc.allFinite() && m.rss.allFinite());
}

TEST(Tabulate, ConditionedFastPathMatchesDirect) {
  const auto stat = covariogram_from_coeffs(SpectralSequence({0.3, 0.5, 0.2, 0.1}, 1.0));
  const auto cond = condition_at_zero(stat);
  const auto fast = tabulate(cond, 64);
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) EXPECT_NEAR(fast(i, j), cond(i / 64.0, j / 64.0), 1e-14);
  }
}
