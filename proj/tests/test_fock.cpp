#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "fockcoh/fock.hpp"

using namespace fockcoh;

namespace {

std::vector<Occupation> all_tuples(int modes, int max_each) {
  std::vector<Occupation> out{Occupation{}};
  for (int m = 0; m < modes; ++m) {
    std::vector<Occupation> next;
    for (const auto& o : out) {
      for (int v = 0; v <= max_each; ++v) {
        auto p = o;
        p.push_back(v);
        next.push_back(p);
      }
    }
    out = std::move(next);
  }
  return out;
}

FockState random_state(int modes, int max_n, std::mt19937_64& rng, double drop = 0.3) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  std::map<int, AmplitudeVector> sectors;
  double norm = 0.0;
  for (int n = 0; n <= max_n; ++n) {
    if (u(rng) < drop) continue;
    AmplitudeVector a(sector_dimension(modes, n));
    for (auto& z : a) {
      z = cplx(g(rng), g(rng));
      norm += std::norm(z);
    }
    sectors.emplace(n, std::move(a));
  }
  if (sectors.empty()) {
    sectors.emplace(0, AmplitudeVector{1.0});
    norm = 1.0;
  }
  for (auto& [n, a] : sectors) {
    for (auto& z : a) z /= std::sqrt(norm);
  }
  return FockState(modes, std::move(sectors));
}

Eigen::VectorXcd sector_vector(const FockState& psi, int n) {
  const auto& a = psi.sector(n);
  return Eigen::Map<const Eigen::VectorXcd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

/// Matrix of theta (e^{i phi} a*_i a_j - e^{-i phi} a*_j a_i) on sector n.
Eigen::MatrixXcd bs_generator(int modes, int n, int i, int j, double theta, double phi) {
  const auto basis = sector_basis(modes, n);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  auto hop = [&](int to, int from, cplx coef) {
    for (std::size_t c = 0; c < basis.size(); ++c) {
      auto o = basis[c];
      if (o[from] == 0) continue;
      const double amp = std::sqrt(static_cast<double>(o[from]) * (o[to] + 1));
      --o[from];
      ++o[to];
      g(sector_index(o), c) += coef * amp;
    }
  };
  hop(i, j, theta * std::polar(1.0, phi));
  hop(j, i, -theta * std::polar(1.0, -phi));
  return g;
}

/// <n| U^{(x)N} |m> from the first-quantized symmetrized basis.
cplx first_quantized_amplitude(const Eigen::MatrixXcd& u, const Occupation& out, const Occupation& in) {
  const int modes = static_cast<int>(in.size());
  const int N = total(in);
  std::vector<std::vector<int>> seq_in, seq_out;
  std::vector<int> s(N, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == N) {
      Occupation o(modes, 0);
      for (int x : s) ++o[x];
      if (o == in) seq_in.push_back(s);
      if (o == out) seq_out.push_back(s);
      return;
    }
    for (int m = 0; m < modes; ++m) {
      s[pos] = m;
      rec(pos + 1);
    }
  };
  rec(0);
  double lf_in = 0.0, lf_out = 0.0;
  for (int m = 0; m < modes; ++m) {
    lf_in += std::lgamma(in[m] + 1.0);
    lf_out += std::lgamma(out[m] + 1.0);
  }
  const double lfn = std::lgamma(N + 1.0);
  const double norm = std::exp(0.5 * (lf_in - lfn) + 0.5 * (lf_out - lfn));
  cplx acc = 0.0;
  for (const auto& so : seq_out) {
    for (const auto& si : seq_in) {
      cplx p = 1.0;
      for (int k = 0; k < N; ++k) p *= u(so[k], si[k]);
      acc += p;
    }
  }
  return norm * acc;
}

}  // namespace

TEST(Sectors, DimensionMatchesBruteForce) {
  for (int M = 1; M <= 4; ++M) {
    const auto tuples = all_tuples(M, 6);
    for (int N = 0; N <= 6; ++N) {
      std::set<Occupation> expected;
      for (const auto& t : tuples) {
        if (total(t) == N) expected.insert(t);
      }
      EXPECT_EQ(sector_dimension(M, N), expected.size()) << M << " " << N;
      const auto basis = sector_basis(M, N);
      EXPECT_EQ(std::set<Occupation>(basis.begin(), basis.end()), expected);
      for (std::size_t i = 0; i < basis.size(); ++i) EXPECT_EQ(sector_index(basis[i]), i);
    }
  }
}

TEST(Sectors, ColexOrderForTwoModes) {
  const auto b = sector_basis(2, 3);
  const std::vector<Occupation> expected = {{3, 0}, {2, 1}, {1, 2}, {0, 3}};
  EXPECT_EQ(b, expected);
}

TEST(Sectors, KnownDimensionsAndOverflow) {
  EXPECT_EQ(sector_dimension(3, 10), 66u);
  EXPECT_EQ(sector_dimension(5, 0), 1u);
  EXPECT_THROW(sector_dimension(400, 400), ResourceLimit);
}

TEST(FockState, ValidatesSectorSizes) {
  EXPECT_THROW(FockState(2, {{1, AmplitudeVector{1.0}}}), InvalidArgument);
  EXPECT_THROW(FockState(0, {}), InvalidArgument);
  EXPECT_THROW(FockState::basis_state({1, -1}), InvalidArgument);
  const auto v = FockState::vacuum(3);
  EXPECT_DOUBLE_EQ(v.norm_squared(), 1.0);
  EXPECT_THROW(v.sector(2), UndefinedSector);
}

TEST(FockState, AmplitudeLookup) {
  const auto s = FockState::basis_state({0, 2, 1});
  EXPECT_EQ(s.amplitude({0, 2, 1}), cplx(1.0));
  EXPECT_EQ(s.amplitude({3, 0, 0}), cplx(0.0));
  EXPECT_EQ(s.amplitude({0, 0, 0}), cplx(0.0));
  const int m[] = {1, 2};
  EXPECT_DOUBLE_EQ(expected_particle_number(s, m), 3.0);
}

TEST(Beamsplitter, MatchesMatrixExponential) {
  std::mt19937_64 rng(11);
  const std::vector<std::pair<double, double>> params = {{0.3, 0.0}, {std::numbers::pi / 4, std::numbers::pi / 2}, {1.1, -0.7}};
  for (int modes : {2, 3}) {
    const auto psi = random_state(modes, 5, rng, 0.0);
    for (auto [theta, phi] : params) {
      const int i = 0, j = modes - 1;
      const auto out = apply_beamsplitter(psi, i, j, theta, phi);
      for (int n = 0; n <= 5; ++n) {
        const Eigen::MatrixXcd U = bs_generator(modes, n, i, j, theta, phi).exp();
        const Eigen::VectorXcd expect = U * sector_vector(psi, n);
        EXPECT_LT((sector_vector(out, n) - expect).cwiseAbs().maxCoeff(), 1e-12) << modes << " " << n;
      }
    }
  }
}

TEST(Beamsplitter, HongOuMandelDip) {
  const auto out = apply_beamsplitter(FockState::basis_state({1, 1}), 0, 1, std::numbers::pi / 4, 0.0);
  EXPECT_LT(std::abs(out.amplitude({1, 1})), 1e-15);
  EXPECT_NEAR(std::norm(out.amplitude({2, 0})), 0.5, 1e-14);
}

TEST(Beamsplitter, SameModeRejected) {
  EXPECT_THROW(apply_beamsplitter(FockState::vacuum(2), 1, 1, 0.1, 0.0), InvalidArgument);
}

TEST(LinearOptics, MatchesFirstQuantizedOracle) {
  for (int modes : {2, 3}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto U = random_number_conserving_unitary(modes, seed);
      for (int N = 1; N <= 5; ++N) {
        const auto basis = sector_basis(modes, N);
        for (std::size_t c = 0; c < basis.size(); c += 2) {
          const auto out = U.apply(FockState::basis_state(basis[c]));
          for (const auto& o : basis) {
            EXPECT_LT(std::abs(out.amplitude(o) - first_quantized_amplitude(U.matrix(), o, basis[c])), 1e-11);
          }
        }
      }
    }
  }
}

TEST(LinearOptics, PreservesNormAndComposes) {
  std::mt19937_64 rng(5);
  const auto psi = random_state(3, 4, rng);
  const auto A = random_number_conserving_unitary(3, 21), B = random_number_conserving_unitary(3, 22);
  const auto ab = LinearOpticalUnitary(B.matrix() * A.matrix()).apply(psi);
  const auto seq = B.apply(A.apply(psi));
  EXPECT_NEAR(seq.norm_squared(), psi.norm_squared(), 1e-12);
  for (const auto& [n, a] : ab.sectors()) {
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - seq.sector(n)[i]), 1e-12);
  }
  EXPECT_THROW(LinearOpticalUnitary(Eigen::MatrixXcd::Ones(2, 2)), InvalidArgument);
}

TEST(LinearOptics, HaarAveragedOutputIsUniform) {
  // For Haar U in U(2), |u_00|^2 is uniform on [0,1], which makes the
  // averaged photon-number distribution of U|N,0> uniform over N+1 outcomes.
  const int N = 3, samples = 4000;
  std::vector<double> mean(N + 1, 0.0), sq(N + 1, 0.0);
  for (int s = 0; s < samples; ++s) {
    const auto out = random_number_conserving_unitary(2, 1000 + s).apply(FockState::basis_state({N, 0}));
    for (int k = 0; k <= N; ++k) {
      const double p = std::norm(out.sector(N)[k]);
      mean[k] += p / samples;
      sq[k] += p * p / samples;
    }
  }
  for (int k = 0; k <= N; ++k) {
    const double se = std::sqrt((sq[k] - mean[k] * mean[k]) / samples);
    EXPECT_NEAR(mean[k], 1.0 / (N + 1), 5 * se) << k;
  }
}

TEST(LinearOptics, Deterministic) {
  EXPECT_EQ(random_number_conserving_unitary(4, 9).matrix(), random_number_conserving_unitary(4, 9).matrix());
}

TEST(PartialTrace, MatchesProductBasisOracle) {
  std::mt19937_64 rng(77);
  const int modes = 3, max_n = 3;
  for (int trial = 0; trial < 200; ++trial) {
    const auto psi = random_state(modes, max_n, rng);
    std::vector<int> keep;
    for (int m = 0; m < modes; ++m) {
      if (rng() % 2) keep.push_back(m);
    }
    if (keep.empty() || static_cast<int>(keep.size()) == modes) keep = {static_cast<int>(rng() % modes)};
    const auto rho = partial_trace(psi, keep);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
    EXPECT_LT(rho.hermiticity_residual(), 1e-14);
    EXPECT_GT(rho.min_eigenvalue(), -1e-12);

    // Oracle: dense vector on the product basis {0..max_n}^3, reshaped.
    std::map<std::pair<Occupation, Occupation>, cplx> dense;
    psi.for_each([&](const Occupation& o, cplx a) {
      psi.for_each([&](const Occupation& p, cplx b) {
        bool same_env = true;
        for (int m = 0; m < modes; ++m) {
          if (std::find(keep.begin(), keep.end(), m) == keep.end() && o[m] != p[m]) same_env = false;
        }
        if (!same_env) return;
        Occupation ko, kp;
        for (int m : keep) {
          ko.push_back(o[m]);
          kp.push_back(p[m]);
        }
        dense[{ko, kp}] += a * std::conj(b);
      });
    });
    for (const auto& [key, val] : dense) {
      EXPECT_LT(std::abs(rho.matrix()(rho.index_of(key.first), rho.index_of(key.second)) - val), 1e-13);
    }
    // Density-matrix route agrees.
    const auto rho2 = partial_trace(DensityMatrix::pure(psi), keep);
    EXPECT_LT((rho2.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(PartialTrace, EdgeCases) {
  const auto psi = FockState::basis_state({1, 2});
  EXPECT_THROW(partial_trace(psi, std::span<const int>{}), InvalidArgument);
  const int both[] = {0, 1};
  const auto all = partial_trace(psi, both);
  EXPECT_NEAR(all.matrix()(all.index_of({1, 2}), all.index_of({1, 2})).real(), 1.0, 1e-15);
  const int bad[] = {2};
  EXPECT_THROW(partial_trace(psi, bad), InvalidArgument);
}

TEST(DensityMatrix, PureGuardAndBlocks) {
  AmplitudeVector big(sector_dimension(4, 30), 0.0);
  big[0] = 1.0;
  EXPECT_THROW(DensityMatrix::pure(FockState(4, {{30, big}})), ResourceLimit);
  const auto r = DensityMatrix::from_blocks(2, {{0, Eigen::MatrixXcd::Constant(1, 1, 0.25)},
                                                {1, Eigen::MatrixXcd::Identity(2, 2) * 0.375}});
  EXPECT_NEAR(r.trace(), 1.0, 1e-15);
  EXPECT_NEAR(r.sector_weight(1), 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(r.cross_sector_magnitude(), 0.0);
  EXPECT_THROW(DensityMatrix::from_blocks(2, {{1, Eigen::MatrixXcd::Identity(3, 3)}}), InvalidArgument);
}

TEST(Dephasing, FockDistribution) {
  std::mt19937_64 rng(3);
  const auto psi = random_state(2, 4, rng);
  const auto p = dephase_fock(psi);
  EXPECT_NEAR(p.total(), 1.0, 1e-12);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.probability(i), std::norm(psi.amplitude(p.label(i))), 1e-14);
  const auto d = dephased_matrix(DensityMatrix::pure(psi));
  EXPECT_LT((d.matrix() - Eigen::MatrixXcd(d.matrix().diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-300);
}

TEST(AppendModes, AddsOccupations) {
  const FockState s(2, {{1, AmplitudeVector{0.6, 0.8}}});
  const auto t = append_modes(s, {1});
  EXPECT_EQ(t.modes(), 3);
  EXPECT_NEAR(std::abs(t.amplitude({1, 0, 1}) - 0.6), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t.amplitude({0, 1, 1}) - 0.8), 0.0, 1e-15);
}
