// Constructors for the named two-mode and multi-pair states.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include "fockcoh/common.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/logweight.hpp"

namespace fockcoh {

/// Largest dense sector (or product support) the constructors will build.
inline constexpr std::uint64_t kMaxBasisStates = 1'000'000;
/// Largest total amplitude count for truncated indefinite-number states.
inline constexpr std::uint64_t kMaxIndefiniteAmplitudes = 4'000'000;

namespace detail {
inline void guard_sector(int modes, int particles) {
  std::uint64_t d = 0;
  try {
    d = sector_dimension(modes, particles);
  } catch (const ResourceLimit&) {
    throw ResourceLimit("sector dimension overflows");
  }
  if (d > kMaxBasisStates) {
    throw ResourceLimit("sector of " + std::to_string(particles) + " particles on " + std::to_string(modes) +
                        " modes has " + std::to_string(d) + " basis states (limit 1e6)");
  }
}

inline void guard_product(int per_copy, int copies) {
  double log_size = copies * std::log(static_cast<double>(per_copy));
  if (log_size > std::log(static_cast<double>(kMaxBasisStates)) + 1e-9) {
    throw ResourceLimit("product support exceeds 1e6 basis states");
  }
}

/// Builds a 2n-mode single-sector state whose amplitude on
/// |N-k_1, k_1, ..., N-k_n, k_n> is prod_j amp[k_j].
inline FockState pair_product(int N, int copies, const std::vector<double>& amp) {
  guard_product(N + 1, copies);
  guard_sector(2 * copies, N * copies);
  const int modes = 2 * copies;
  AmplitudeVector v(sector_dimension(modes, N * copies), 0.0);
  std::vector<int> k(copies, 0);
  Occupation occ(modes);
  while (true) {
    double a = 1.0;
    for (int j = 0; j < copies; ++j) {
      occ[2 * j] = N - k[j];
      occ[2 * j + 1] = k[j];
      a *= amp[k[j]];
    }
    v[sector_index(occ)] = a;
    int p = 0;
    while (p < copies && ++k[p] > N) k[p++] = 0;
    if (p == copies) break;
  }
  return FockState(modes, {{N * copies, std::move(v)}});
}

inline FockState two_mode_from_logs(int N, const std::vector<LogWeight>& amps) {
  AmplitudeVector v(N + 1);
  for (int k = 0; k <= N; ++k) v[k] = amps[k].to_double();
  return FockState(2, {{N, std::move(v)}});
}

inline std::vector<LogWeight> normalize_logs(std::vector<LogWeight> amps) {
  std::vector<double> l2;
  l2.reserve(amps.size());
  for (const auto& a : amps) l2.push_back(a.is_zero() ? -std::numeric_limits<double>::infinity() : 2.0 * a.log_magnitude());
  const double half_logz = 0.5 * log_sum_exp(l2);
  for (auto& a : amps) {
    if (!a.is_zero()) a = LogWeight::from_log(a.log_magnitude() - half_logz, a.sign());
  }
  return amps;
}
}  // namespace detail

/// n bosonic copies of the N-particle two-mode condensate: each pair
/// (2j, 2j+1) carries amplitudes sqrt(C(N,k)/2^N) on |N-k, k>.
inline FockState bec(int N, int copies) {
  require(N >= 0 && copies >= 1, "bec: need N >= 0 and at least one copy");
  std::vector<double> amp(N + 1);
  for (int k = 0; k <= N; ++k) amp[k] = std::exp(0.5 * (log_binomial(N, k) - N * std::numbers::ln2));
  return detail::pair_product(N, copies, amp);
}

/// (N+1)^{-1/2} sum_m |N-m, m>.
inline FockState mc(int N) {
  require(N >= 0, "mc: negative particle number");
  return FockState(2, {{N, AmplitudeVector(N + 1, 1.0 / std::sqrt(N + 1.0))}});
}

/// copies bosonic copies of MC_N on 2*copies modes.
inline FockState mc_bosonic_copies(int N, int copies) {
  require(N >= 0 && copies >= 1, "mc_bosonic_copies: need N >= 0 and at least one copy");
  return detail::pair_product(N, copies, std::vector<double>(N + 1, 1.0 / std::sqrt(N + 1.0)));
}

/// Two-mode pure state that is uniform (maximally correlated) inside each
/// particle-number sector, described by its sector weights alone. This is
/// the compact form of mc_tilde and phi, used where materializing every
/// amplitude would be too large.
struct SectorUniformState {
  std::vector<double> weights;  ///< weights[k] = tr Q_k rho
  double tail_mass_bound = 0.0;

  double expected_particle_number() const {
    KahanSum s;
    for (std::size_t k = 0; k < weights.size(); ++k) s.add(k * weights[k]);
    return s.value();
  }

  std::uint64_t amplitude_count() const {
    const std::uint64_t K = weights.size();
    return K * (K + 1) / 2;
  }

  FockState to_fock() const {
    if (amplitude_count() > kMaxIndefiniteAmplitudes) {
      throw ResourceLimit("sector-uniform state has " + std::to_string(amplitude_count()) +
                          " amplitudes (limit 4e6)");
    }
    std::map<int, AmplitudeVector> s;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      s.emplace(static_cast<int>(k), AmplitudeVector(k + 1, std::sqrt(weights[k] / (k + 1.0))));
    }
    return FockState(2, std::move(s), tail_mass_bound);
  }
};

inline SectorUniformState mc_tilde_sector_uniform(int N) {
  require(N >= 0, "mc_tilde: negative particle number");
  return {std::vector<double>(2 * N + 1, 1.0 / (2.0 * N + 1.0)), 0.0};
}

/// (2N+1)^{-1/2} sum_{k=0}^{2N} |MC_k>.
inline FockState mc_tilde(int N) { return mc_tilde_sector_uniform(N).to_fock(); }

/// Sector weights of the constrained C^A maximizer at mean particle number N:
/// p_0 = (2/(N+2))^2, p_k = 4(k+1) N^k / (N+2)^{k+2}. Truncated at the first
/// K whose closed-form tail r^{K+1}((K+2)(1-r) + r), r = N/(N+2), is below
/// 1e-12; no renormalization.
inline SectorUniformState phi_sector_uniform(int N) {
  require(N >= 0, "phi: negative particle number");
  if (N == 0) return {{1.0}, 0.0};
  const double r = static_cast<double>(N) / (N + 2.0);
  const double log_r = std::log(r);
  auto tail = [&](double K) { return std::exp((K + 1.0) * log_r) * ((K + 2.0) * (1.0 - r) + r); };
  int K = 0;
  while (tail(K) >= tol::kTailMass) ++K;
  SectorUniformState s;
  s.weights.resize(K + 1);
  const double log_a = 2.0 * std::log(2.0 / (N + 2.0));
  for (int k = 0; k <= K; ++k) s.weights[k] = (k + 1.0) * std::exp(log_a + k * log_r);
  s.tail_mass_bound = tail(K);
  return s;
}

inline FockState phi(int N) { return phi_sector_uniform(N).to_fock(); }

/// Parameters of Psi(theta, m)_N, the real two-mode states
/// (a1* + tan(theta) a2*)^m (a1* - tan(theta) a2*)^{N-m} |VAC>.
struct PsiParams {
  double theta = std::numbers::pi / 4;
  int m = 0;
  int N = 0;
};

namespace detail {

/// Unnormalized signed amplitudes f_k = K_k sqrt((N-k)! k!) of
/// (a1* + a2*)^m (a1* - a2*)^{N-m} |VAC>, where K_k is the integer coefficient
/// of a1*^{N-k} a2*^k. Exact integer recurrence, valid for N <= 64:
///   (k+1) K_{k+1} = (2m-N) K_k - (N-k+1) K_{k-1}.
inline std::vector<LogWeight> psi_base_exact(int N, int m) {
  require(N <= 64, "psi_base_exact: N above 64");
  std::vector<__int128> K(N + 1, 0);
  K[0] = 1;
  if (N >= 1) K[1] = 2 * m - N;
  for (int k = 1; k < N; ++k) {
    const __int128 num = static_cast<__int128>(2 * m - N) * K[k] - static_cast<__int128>(N - k + 1) * K[k - 1];
    K[k + 1] = num / (k + 1);
  }
  std::vector<LogWeight> f(N + 1);
  for (int k = 0; k <= N; ++k) {
    if (K[k] == 0) continue;
    const long double mag = K[k] < 0 ? -static_cast<long double>(K[k]) : static_cast<long double>(K[k]);
    f[k] = LogWeight::from_log(static_cast<double>(std::log(mag)) + 0.5 * (log_factorial(N - k) + log_factorial(k)),
                               K[k] < 0 ? -1 : 1);
  }
  return f;
}

/// Same amplitudes from the symmetric three-term recurrence
///   b_{k-1} f_{k-1} + b_k f_{k+1} = (2m-N) f_k,  b_k = sqrt((k+1)(N-k)),
/// run forward from k = 0 and backward from k = N to the midpoint. The
/// midpoint always lies in the oscillatory range, so each sweep only ever
/// moves toward growing or oscillating solutions. Both ends are known
/// exactly: f_0 = sqrt(N!), f_N = (-1)^{N-m} sqrt(N!).
inline std::vector<LogWeight> psi_base_recurrence(int N, int m) {
  std::vector<LogWeight> f(N + 1);
  const double lam = 2.0 * m - N;
  const double log_f0 = 0.5 * log_factorial(N);
  auto b = [N](int k) { return std::sqrt((k + 1.0) * (N - k)); };
  constexpr double kBig = 1e200;
  const double log_big = std::log(kBig);
  const int mid = N / 2;

  auto store = [&](int k, double v, double log_scale) {
    f[k] = v == 0.0 ? LogWeight{} : LogWeight::from_log(std::log(std::abs(v)) + log_scale + log_f0, v < 0 ? -1 : 1);
  };
  auto rescale = [&](double& cur, double& prev, double& log_scale) {
    if (std::abs(cur) > kBig || std::abs(prev) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += log_big;
    }
  };

  double prev = 0.0, cur = 1.0, log_scale = 0.0;
  store(0, cur, log_scale);
  for (int k = 0; k < mid; ++k) {
    const double next = (lam * cur - (k >= 1 ? b(k - 1) * prev : 0.0)) / b(k);
    prev = cur;
    cur = next;
    rescale(cur, prev, log_scale);
    store(k + 1, cur, log_scale);
  }
  if (N == 0) return f;

  prev = 0.0;
  cur = ((N - m) % 2 == 0) ? 1.0 : -1.0;
  log_scale = 0.0;
  store(N, cur, log_scale);
  for (int k = N; k > mid + 1; --k) {
    const double next = (lam * cur - (k < N ? b(k) * prev : 0.0)) / b(k - 1);
    prev = cur;
    cur = next;
    rescale(cur, prev, log_scale);
    store(k - 1, cur, log_scale);
  }
  return f;
}

inline std::vector<LogWeight> psi_base(int N, int m) {
  return N <= 64 ? psi_base_exact(N, m) : psi_base_recurrence(N, m);
}

inline void check_psi(const PsiParams& p) {
  require(p.N >= 0, "psi: negative particle number");
  require(p.m >= 0 && p.m <= p.N, "psi: m outside [0, N]");
  require(p.theta >= -1e-15 && p.theta <= std::numbers::pi / 4 + 1e-12, "psi: theta outside [0, pi/4]");
}

/// Normalized signed amplitudes of Psi(theta, m)_N given the base amplitudes
/// of the theta = pi/4 member: the theta dependence is the factor tan(theta)^k.
inline std::vector<LogWeight> psi_from_base(const std::vector<LogWeight>& base, double theta) {
  const int N = static_cast<int>(base.size()) - 1;
  std::vector<LogWeight> a(N + 1);
  const double t = std::tan(theta);
  if (t <= 0.0) {
    a[0] = LogWeight::one();
    return a;
  }
  const double log_t = std::log(t);
  for (int k = 0; k <= N; ++k) {
    if (!base[k].is_zero()) a[k] = LogWeight::from_log(base[k].log_magnitude() + k * log_t, base[k].sign());
  }
  return normalize_logs(std::move(a));
}

}  // namespace detail

/// Normalized signed log amplitudes of Psi(theta, m)_N on |N-k, k>.
/// Global phase: the |N, 0> amplitude is positive (it never vanishes).
inline std::vector<LogWeight> psi_log_amplitudes(const PsiParams& p) {
  detail::check_psi(p);
  return detail::psi_from_base(detail::psi_base(p.N, p.m), p.theta);
}

inline FockState psi(const PsiParams& p) { return detail::two_mode_from_logs(p.N, psi_log_amplitudes(p)); }

/// (|N,0> + |0,N>)/sqrt(2); the vacuum for N = 0.
inline FockState noon(int N) {
  require(N >= 0, "noon: negative particle number");
  if (N == 0) return FockState::vacuum(2);
  AmplitudeVector v(N + 1, 0.0);
  v[0] = v[N] = 1.0 / std::numbers::sqrt2;
  return FockState(2, {{N, std::move(v)}});
}

/// Normalized log amplitudes of (a1*^2 + a2*^2)^{N/2} |VAC>: the coefficient
/// C(N/2, i) sqrt((2i)! (N-2i)!) sits on |2i, N-2i>, all positive.
inline std::vector<LogWeight> pair_correlated_log_amplitudes(int N) {
  require(N >= 0 && N % 2 == 0, "pair_correlated: N must be even and nonnegative");
  std::vector<LogWeight> a(N + 1);
  const int h = N / 2;
  for (int i = 0; i <= h; ++i) {
    const int k = N - 2 * i;
    a[k] = LogWeight::from_log(log_binomial(h, i) + 0.5 * (log_factorial(2 * i) + log_factorial(k)));
  }
  return detail::normalize_logs(std::move(a));
}

inline FockState pair_correlated(int N) { return detail::two_mode_from_logs(N, pair_correlated_log_amplitudes(N)); }

namespace detail {
/// log P(X > n) for X ~ Poisson(mu), summed term by term.
inline double poisson_log_tail(double mu, int n) {
  if (mu == 0.0) return -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  const double lmu = std::log(mu);
  for (int k = n + 1;; ++k) {
    const double l = -mu + k * lmu - log_factorial(k);
    terms.push_back(l);
    if (k > mu && l < terms.front() - 80.0) break;
  }
  return log_sum_exp(terms);
}
}  // namespace detail

/// Heisenberg-Weyl coherent state D(alpha) along the single-particle mode
/// spinor = (s1, s2): sector N carries e^{-|alpha|^2/2} alpha^N / sqrt(N!) times
/// sqrt(C(N,k)) s1^{N-k} s2^k on |N-k, k>. With n_max < 0 the truncation is the
/// smallest one leaving Poisson tail mass below 1e-12.
inline FockState hw_coherent(cplx alpha, cplx s1, cplx s2, int n_max = -1) {
  require(std::abs(std::norm(s1) + std::norm(s2) - 1.0) <= tol::kNormalization,
          "hw_coherent: spinor is not normalized");
  const double mu = std::norm(alpha);
  if (n_max < 0) {
    n_max = 0;
    while (detail::poisson_log_tail(mu, n_max) >= std::log(tol::kTailMass)) ++n_max;
  }
  const double tail = std::exp(detail::poisson_log_tail(mu, n_max));
  require(tail < tol::kTailMass, "hw_coherent: truncation leaves tail mass " + std::to_string(tail));
  std::map<int, AmplitudeVector> sectors;
  for (int n = 0; n <= n_max; ++n) {
    AmplitudeVector v(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double mag = std::exp(-mu / 2.0 - 0.5 * log_factorial(n) + 0.5 * log_binomial(n, k));
      v[k] = mag * std::pow(alpha, n) * std::pow(s1, n - k) * std::pow(s2, k);
    }
    sectors.emplace(n, std::move(v));
  }
  return FockState(2, std::move(sectors), tail);
}

/// Weight carried by |phi> in the output mixture of the photon-added
/// beamsplitter channel.
inline constexpr double kHomPhiWeight = 0.5;

/// |phi> = (c1 a1*^2 / sqrt(2) + c2 a1* a2*) |VAC> = c1 |2,0> + c2 |1,1>.
inline FockState hom_phi(cplx c1, cplx c2) {
  require(std::abs(std::norm(c1) + std::norm(c2) - 1.0) <= tol::kNormalization,
          "hom_phi: |c1|^2 + |c2|^2 must equal 1");
  return FockState(2, {{2, AmplitudeVector{c1, c2, 0.0}}});
}

}  // namespace fockcoh
