#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fockcoh/fock.hpp"
#include "fockcoh/states.hpp"

using namespace fockcoh;

namespace {

/// Coefficients of prod (x + t_j y) over the factor list, by repeated
/// polynomial multiplication; entry k multiplies x^{N-k} y^k.
std::vector<double> expand_factors(const std::vector<double>& ts) {
  std::vector<double> c{1.0};
  for (double t : ts) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] += t * c[k];
    }
    c = std::move(next);
  }
  return c;
}

/// Normalized Fock amplitudes of prod (a1* + t_j a2*) |VAC>.
std::vector<double> fock_from_factors(const std::vector<double>& ts) {
  const int N = static_cast<int>(ts.size());
  auto c = expand_factors(ts);
  double norm = 0.0;
  for (int k = 0; k <= N; ++k) {
    c[k] *= std::sqrt(std::tgamma(N - k + 1.0) * std::tgamma(k + 1.0));
    norm += c[k] * c[k];
  }
  for (auto& x : c) x /= std::sqrt(norm);
  return c;
}

double overlap_magnitude(const FockState& a, const FockState& b, int N) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.sector(N).size(); ++k) s += std::conj(a.sector(N)[k]) * b.sector(N)[k];
  return std::abs(s);
}

}  // namespace

TEST(Bec, BinomialAmplitudes) {
  const auto s = bec(6, 1);
  for (int k = 0; k <= 6; ++k) {
    EXPECT_NEAR(std::norm(s.sector(6)[k]), std::exp(log_binomial(6, k)) / 64.0, 1e-15);
  }
}

TEST(Bec, BosonicCopiesAreProducts) {
  const auto s = bec(2, 3);
  EXPECT_EQ(s.modes(), 6);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
  const double a20 = 0.5, a11 = std::sqrt(0.5);
  EXPECT_NEAR(std::abs(s.amplitude({2, 0, 1, 1, 0, 2})), a20 * a11 * a20, 1e-14);
  EXPECT_THROW(bec(10, 12), ResourceLimit);
  EXPECT_THROW(bec(-1, 1), InvalidArgument);
}

TEST(Mc, UniformAndCopies) {
  const auto s = mc(4);
  for (const auto& a : s.sector(4)) EXPECT_NEAR(std::norm(a), 0.2, 1e-15);
  const auto c = mc_bosonic_copies(1, 2);
  EXPECT_NEAR(std::norm(c.amplitude({1, 0, 0, 1})), 0.25, 1e-15);
}

TEST(McTilde, SectorWeights) {
  const auto s = mc_tilde(3);
  EXPECT_EQ(s.sectors().size(), 7u);
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(s.sector_weight(k), 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(mc_tilde_sector_uniform(3).expected_particle_number(), 3.0, 1e-14);
}

TEST(Phi, WeightsMeanAndTail) {
  for (int N : {1, 2, 5, 10, 100}) {
    const auto s = phi_sector_uniform(N);
    const double r = N / (N + 2.0);
    double mass = 0.0;
    for (std::size_t k = 0; k < s.weights.size(); ++k) {
      const double expect = 4.0 * (k + 1.0) * std::pow(r, static_cast<double>(k)) / ((N + 2.0) * (N + 2.0));
      EXPECT_NEAR(s.weights[k], expect, 1e-13 * std::max(expect, 1e-300)) << N << " " << k;
      mass += s.weights[k];
    }
    EXPECT_LT(s.tail_mass_bound, 1e-12);
    EXPECT_NEAR(1.0 - mass, s.tail_mass_bound, 1e-13);
    EXPECT_NEAR(s.expected_particle_number(), N, 1e-6);
  }
  EXPECT_EQ(phi_sector_uniform(0).weights.size(), 1u);
  EXPECT_THROW(phi(1000), ResourceLimit);
}

TEST(Phi, MaterializedMatchesCompact) {
  const auto f = phi(3);
  const auto s = phi_sector_uniform(3);
  for (std::size_t k = 0; k < s.weights.size(); ++k) EXPECT_NEAR(f.sector_weight(static_cast<int>(k)), s.weights[k], 1e-15);
  EXPECT_DOUBLE_EQ(f.tail_mass_bound(), s.tail_mass_bound);
}

TEST(Psi, MatchesPolynomialExpansion) {
  for (int N : {1, 2, 5, 9, 12}) {
    for (int m = 0; m <= N; ++m) {
      for (double theta : {0.0, 0.3, 0.6, std::numbers::pi / 4}) {
        const double t = std::tan(theta);
        std::vector<double> ts(m, t);
        ts.insert(ts.end(), N - m, -t);
        const auto expect = fock_from_factors(ts);
        const auto s = psi({theta, m, N});
        double sign = 0.0;
        for (int k = 0; k <= N; ++k) {
          if (std::abs(expect[k]) > 1e-8 && sign == 0.0) sign = s.sector(N)[k].real() / expect[k] > 0 ? 1.0 : -1.0;
        }
        for (int k = 0; k <= N; ++k) {
          EXPECT_NEAR(s.sector(N)[k].real(), sign * expect[k], 1e-12) << N << " " << m << " " << theta;
          EXPECT_EQ(s.sector(N)[k].imag(), 0.0);
        }
      }
    }
  }
}

TEST(Psi, RecurrenceAgreesWithExactIntegers) {
  for (int N : {10, 33, 64}) {
    for (int m = 0; m <= N; ++m) {
      const auto a = detail::psi_base_exact(N, m), b = detail::psi_base_recurrence(N, m);
      double scale = -1e300;
      for (const auto& x : a) scale = std::max(scale, x.log_magnitude());
      for (int k = 0; k <= N; ++k) {
        const double va = a[k].is_zero() ? 0.0 : a[k].sign() * std::exp(a[k].log_magnitude() - scale);
        const double vb = b[k].is_zero() ? 0.0 : b[k].sign() * std::exp(b[k].log_magnitude() - scale);
        EXPECT_NEAR(va, vb, 1e-9) << N << " " << m << " " << k;
      }
    }
  }
}

TEST(Psi, BaseNormIdentity) {
  // sum_k f_k^2 = 2^N m! (N-m)! for (a1* + a2*)^m (a1* - a2*)^{N-m}|VAC>.
  for (int N : {100, 1000, 4000}) {
    for (int m : {0, 1, N / 3, N / 2 - 1, N / 2}) {
      const auto f = detail::psi_base(N, m);
      std::vector<double> l2;
      for (const auto& x : f) l2.push_back(x.is_zero() ? -1e308 : 2.0 * x.log_magnitude());
      const double expect = N * std::log(2.0) + log_factorial(m) + log_factorial(N - m);
      EXPECT_NEAR(log_sum_exp(l2), expect, 1e-9 * expect) << N << " " << m;
    }
  }
}

TEST(Psi, FiftyFiftyBeamsplitterOfFockState) {
  for (int N : {4, 9, 16}) {
    for (int m = 0; m <= N; ++m) {
      const auto bs = apply_beamsplitter(FockState::basis_state({N - m, m}), 0, 1, std::numbers::pi / 4, 0.0);
      EXPECT_NEAR(overlap_magnitude(bs, psi({std::numbers::pi / 4, m, N}), N), 1.0, 1e-11) << N << " " << m;
    }
  }
}

TEST(Psi, MirrorSymmetryAndEdges) {
  const auto a = psi({0.4, 2, 7}), b = psi({0.4, 5, 7});
  for (int k = 0; k <= 7; ++k) EXPECT_NEAR(std::abs(a.sector(7)[k]), std::abs(b.sector(7)[k]), 1e-13);
  const auto z = psi({0.0, 3, 5});
  EXPECT_NEAR(std::abs(z.sector(5)[0]), 1.0, 1e-15);
  EXPECT_THROW(psi({0.1, 6, 5}), InvalidArgument);
  EXPECT_THROW(psi({1.0, 1, 5}), InvalidArgument);
}

TEST(PairCorrelated, MagnitudesMatchPsiHalf) {
  for (int N : {2, 8, 20}) {
    const auto p = pair_correlated(N), q = psi({std::numbers::pi / 4, N / 2, N});
    for (int k = 0; k <= N; ++k) EXPECT_NEAR(std::abs(p.sector(N)[k]), std::abs(q.sector(N)[k]), 1e-12);
    for (int k = 1; k <= N; k += 2) EXPECT_EQ(std::abs(p.sector(N)[k]), 0.0);
  }
  EXPECT_THROW(pair_correlated(3), InvalidArgument);
}

TEST(Noon, Amplitudes) {
  const auto s = noon(4);
  EXPECT_NEAR(std::norm(s.amplitude({4, 0})), 0.5, 1e-15);
  EXPECT_NEAR(std::norm(s.amplitude({0, 4})), 0.5, 1e-15);
  EXPECT_EQ(noon(0).sector(0).size(), 1u);
}

TEST(HwCoherent, PoissonSectorsAlongSpinor) {
  const cplx alpha(1.2, -0.4);
  const auto s = hw_coherent(alpha, std::sqrt(0.3), cplx(0.0, std::sqrt(0.7)));
  const double mu = std::norm(alpha);
  EXPECT_LT(s.tail_mass_bound(), 1e-12);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
  for (int n = 0; n <= 5; ++n) {
    EXPECT_NEAR(s.sector_weight(n), std::exp(-mu + n * std::log(mu) - log_factorial(n)), 1e-14);
  }
  const int both[] = {0, 1};
  EXPECT_NEAR(expected_particle_number(s, both), mu, 1e-10);
  // Within a sector the state is (s1 a1* + s2 a2*)^n |VAC>: a binomial law.
  for (int k = 0; k <= 3; ++k) {
    EXPECT_NEAR(std::norm(s.sector(3)[k]) / s.sector_weight(3), std::exp(log_binomial(3, k)) * std::pow(0.3, 3 - k) * std::pow(0.7, k), 1e-13);
  }
}

TEST(HomPhi, Normalization) {
  const auto s = hom_phi(0.6, 0.8);
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
  EXPECT_THROW(hom_phi(0.6, 0.6), InvalidArgument);
}
