#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fockcoh/coherence.hpp"
#include "fockcoh/states.hpp"

using namespace fockcoh;

namespace {

/// Multinomial entropy by enumerating every count vector.
double multinomial_entropy_oracle(int N, int M) {
  double h = 0.0;
  std::vector<int> c(M, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == M - 1) {
      c[pos] = left;
      double lp = std::lgamma(N + 1.0) - N * std::log(static_cast<double>(M));
      for (int x : c) lp -= std::lgamma(x + 1.0);
      h -= std::exp(lp) * lp;
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, N);
  return h / std::log(2.0);
}

/// Binomial entropy with probabilities from the ratio recursion in long double.
double binomial_entropy_oracle(int N, double p) {
  long double pk = std::pow(static_cast<long double>(1.0 - p), N);
  long double h = 0.0;
  for (int k = 0; k <= N; ++k) {
    if (pk > 0) h -= pk * std::log2(pk);
    pk = pk * (N - k) / (k + 1) * p / (1.0 - p);
  }
  return static_cast<double>(h);
}

/// -sum p log2 p over the (x, y) lattice with p = (2/(N+2))^2 (N/(N+2))^x.
double phi_entropy_oracle(int N) {
  const double a = std::pow(2.0 / (N + 2.0), 2), r = N / (N + 2.0);
  double h = 0.0;
  double px = a;
  for (int x = 0; px > 1e-300; ++x, px *= r) h -= (x + 1) * px * std::log2(px);
  return h;
}

}  // namespace

TEST(Entropy, Shannon) {
  const std::vector<double> p = {0.5, 0.5, 0.0};
  EXPECT_NEAR(shannon_entropy(p), 1.0, 1e-15);
  EXPECT_NEAR(shannon_entropy(ProbabilityTable::uniform(8)), 3.0, 1e-14);
}

TEST(Entropy, BinomialMatchesRecursion) {
  for (int N : {1, 2, 7, 50, 400}) {
    for (double p : {0.5, 0.1, 0.93}) EXPECT_NEAR(binomial_entropy(N, p), binomial_entropy_oracle(N, p), 1e-11) << N;
  }
  EXPECT_DOUBLE_EQ(binomial_entropy(2, 0.5), 1.5);
  EXPECT_EQ(binomial_entropy(10, 0.0), 0.0);
  EXPECT_THROW(binomial_entropy(3, 1.5), InvalidArgument);
}

TEST(Entropy, MultinomialMatchesEnumeration) {
  for (int M = 2; M <= 4; ++M) {
    for (int N = 0; N <= 8; ++N) EXPECT_NEAR(multinomial_entropy(N, M), multinomial_entropy_oracle(N, M), 1e-12) << N << " " << M;
  }
  EXPECT_NEAR(multinomial_entropy(300, 2), binomial_entropy(300, 0.5), 1e-10);
  EXPECT_THROW(multinomial_entropy(3, 1), InvalidArgument);
}

TEST(Entropy, VonNeumann) {
  EXPECT_NEAR(von_neumann_entropy(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(4, 4) / 4.0)), 2.0, 1e-14);
  const auto rho = DensityMatrix::pure(mc(3));
  EXPECT_NEAR(von_neumann_entropy(rho), 0.0, 1e-12);
}

TEST(SectorCoherence, NamedValues) {
  for (int N = 1; N <= 10; ++N) EXPECT_NEAR(sector_coherence(mc(N), N), std::log2(N + 1.0), 1e-13);
  EXPECT_NEAR(sector_coherence(bec(1, 1), 1), 1.0, 1e-15);
  EXPECT_NEAR(sector_coherence(bec(2, 1), 2), 1.5, 1e-15);
  EXPECT_NEAR(sector_coherence(FockState::basis_state({3, 1}), 4), 0.0, 1e-15);
  EXPECT_THROW(sector_coherence(mc(2), 3), UndefinedSector);
}

TEST(SectorCoherence, DensityRouteAgreesAndIgnoresPhases) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
  const auto s = psi({0.5, 2, 6});
  AmplitudeVector a = s.sector(6);
  for (auto& z : a) z *= std::polar(1.0, u(rng));
  const FockState t(2, {{6, a}});
  EXPECT_NEAR(sector_coherence(t, 6), sector_coherence(s, 6), 1e-13);
  EXPECT_NEAR(sector_coherence(DensityMatrix::pure(t), 6), sector_coherence(s, 6), 1e-10);
}

TEST(WeightedCoherence, MixtureOfSectors) {
  // (|MC_1> + |MC_3>)/sqrt(2): C = (1 + 2)/2.
  std::map<int, AmplitudeVector> sec;
  sec[1] = AmplitudeVector(2, 0.5);
  sec[3] = AmplitudeVector(4, std::sqrt(0.125));
  const FockState s(2, sec);
  EXPECT_NEAR(weighted_coherence(s), 1.5, 1e-14);
  EXPECT_NEAR(weighted_coherence(DensityMatrix::pure(s)), 1.5, 1e-10);
  // C^A adds one bit for the sector superposition.
  EXPECT_NEAR(total_coherence(s), 2.5, 1e-14);
  EXPECT_NEAR(total_coherence(DensityMatrix::pure(s)), 2.5, 1e-10);
}

TEST(TotalCoherence, DephasedStateIsIncoherent) {
  const auto rho = dephased_matrix(DensityMatrix::pure(psi({0.3, 1, 5})));
  EXPECT_NEAR(total_coherence(rho), 0.0, 1e-12);
  EXPECT_NEAR(weighted_coherence(rho), 0.0, 1e-12);
}

TEST(TotalCoherence, PhiMatchesLatticeSum) {
  for (int N = 1; N <= 50; ++N) {
    const double oracle = phi_entropy_oracle(N);
    EXPECT_NEAR(total_coherence(phi_sector_uniform(N)), oracle, 1e-9) << N;
    if (N <= 6) {
      EXPECT_NEAR(total_coherence(phi(N)), oracle, 1e-9) << N;
    }
  }
  EXPECT_NEAR(phi_entropy_oracle(2), 4.0, 1e-12);
}

TEST(TotalCoherence, McTildeDirectSum) {
  for (int N : {1, 2, 5, 20}) {
    double expect = std::log2(2.0 * N + 1.0);
    for (int x = 0; x <= 2 * N; ++x) expect += std::log2(x + 1.0) / (2.0 * N + 1.0);
    EXPECT_NEAR(total_coherence(mc_tilde_sector_uniform(N)), expect, 1e-12);
    EXPECT_NEAR(total_coherence(mc_tilde(N)), expect, 1e-12);
  }
}

TEST(AmplitudeEntropy, LogSpaceInput) {
  std::vector<LogWeight> a = {LogWeight::from_log(1000.0), LogWeight::from_log(1000.0, -1), LogWeight::zero()};
  EXPECT_NEAR(amplitude_entropy(a), 1.0, 1e-12);
}
