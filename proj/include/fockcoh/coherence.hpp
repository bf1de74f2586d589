// Entropy functionals and the three coherence quantifiers (all in bits).
//
//   C_N(rho) = H(dephased Q_N rho Q_N / tr) - H(Q_N rho Q_N / tr)
//   C(rho)   = sum_N tr(Q_N rho) C_N(rho)
//   C^A(rho) = H(dephased rho) - H(rho)
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fockcoh/common.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/probability.hpp"
#include "fockcoh/states.hpp"

namespace fockcoh {

/// -sum p log2 p over the table, 0 log 0 = 0.
inline double shannon_entropy(const ProbabilityTable& p) {
  KahanSum h;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto w = p.weight(i);
    if (w.is_zero()) continue;
    const double pi = w.to_double();
    if (pi > 0.0) h.add(-pi * w.log_magnitude());
  }
  return nats_to_bits(h.value());
}

/// Shannon entropy in bits of a plain probability vector.
inline double shannon_entropy(std::span<const double> p) {
  KahanSum h;
  for (double x : p) {
    if (x > 0.0) h.add(-x * std::log(x));
  }
  return nats_to_bits(h.value());
}

/// H(B(N, p)) in bits by direct summation over all N+1 outcomes.
inline double binomial_entropy(int N, double p) {
  require(N >= 0, "binomial_entropy: negative N");
  require(p >= 0.0 && p <= 1.0, "binomial_entropy: p outside [0, 1]");
  if (p == 0.0 || p == 1.0 || N == 0) return 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  KahanSum h;
  for (int k = 0; k <= N; ++k) {
    const double l = log_binomial(N, k) + k * lp + (N - k) * lq;
    h.add(-std::exp(l) * l);
  }
  return nats_to_bits(h.value());
}

/// Entropy in bits of the multinomial law of N trials over M equiprobable cells.
///
/// With P(k) = N! / prod k_i! * M^{-N}, linearity and cell symmetry give
///   H = -ln N! + N ln M + M E[ln K!],  K ~ B(N, 1/M),
/// so only the one-cell marginal has to be summed.
inline double multinomial_entropy(int N, int M) {
  require(N >= 0, "multinomial_entropy: negative N");
  require(M >= 2, "multinomial_entropy: need at least two cells");
  // H = N log M - log N! + M E[log K!], K ~ B(N, 1/M). The binomial law comes
  // from the ratio recursion and is renormalized, and log k! is accumulated in
  // the same loop, so the large terms cancel consistently.
  const double lodds = -std::log(M - 1.0);
  std::vector<double> lpk(N + 1), lfact(N + 1, 0.0);
  lpk[0] = 0.0;
  for (int k = 0; k < N; ++k) {
    lpk[k + 1] = lpk[k] + std::log(static_cast<double>(N - k)) - std::log(k + 1.0) + lodds;
    lfact[k + 1] = lfact[k] + std::log(k + 1.0);
  }
  const double z = log_sum_exp(lpk);
  KahanSum e;
  for (int k = 2; k <= N; ++k) e.add(std::exp(lpk[k] - z) * lfact[k]);
  KahanSum h;
  h.add(-lfact[N]);
  h.add(N * std::log(static_cast<double>(M)));
  h.add(M * e.value());
  return nats_to_bits(h.value());
}

/// Von Neumann entropy in bits; eigenvalues below 1e-14 are dropped.
inline double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  if (rho.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  KahanSum h;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > tol::kEigenFloor) h.add(-l * std::log(l));
  }
  return nats_to_bits(h.value());
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

/// Entropy in bits of |a_k|^2 for (possibly unnormalized) log amplitudes.
inline double amplitude_entropy(std::span<const LogWeight> amps) {
  std::vector<double> l2;
  l2.reserve(amps.size());
  for (const auto& a : amps) {
    l2.push_back(a.is_zero() ? -std::numeric_limits<double>::infinity() : 2.0 * a.log_magnitude());
  }
  return entropy_bits_from_logs(l2);
}

namespace detail {
inline double sector_entropy(const AmplitudeVector& amps, double weight) {
  KahanSum h;
  for (const auto& a : amps) {
    const double p = std::norm(a) / weight;
    if (p > 0.0) h.add(-p * std::log(p));
  }
  return nats_to_bits(h.value());
}

inline void check_sector_weight(double w, int N) {
  if (!(w > 1e-15)) throw UndefinedSector("sector " + std::to_string(N) + " carries no weight");
}
}  // namespace detail

inline double sector_coherence(const FockState& psi, int N) {
  const double w = psi.sector_weight(N);
  detail::check_sector_weight(w, N);
  return detail::sector_entropy(psi.sector(N), w);
}

inline double sector_coherence(const DensityMatrix& rho, int N) {
  const double w = rho.sector_weight(N);
  detail::check_sector_weight(w, N);
  const Eigen::MatrixXcd b = rho.block(N) / w;
  std::vector<double> diag(b.rows());
  for (Eigen::Index i = 0; i < b.rows(); ++i) diag[i] = b(i, i).real();
  return shannon_entropy(diag) - von_neumann_entropy(b);
}

inline double weighted_coherence(const FockState& psi) {
  KahanSum c;
  for (const auto& [n, amps] : psi.sectors()) {
    const double w = psi.sector_weight(n);
    if (w > 1e-15) c.add(w * detail::sector_entropy(amps, w));
  }
  return c.value();
}

inline double weighted_coherence(const DensityMatrix& rho) {
  KahanSum c;
  for (int n : rho.sectors()) {
    const double w = rho.sector_weight(n);
    if (w > 1e-15) c.add(w * sector_coherence(rho, n));
  }
  return c.value();
}

inline double weighted_coherence(const SectorUniformState& s) {
  KahanSum c;
  for (std::size_t k = 0; k < s.weights.size(); ++k) c.add(s.weights[k] * std::log2(k + 1.0));
  return c.value();
}

/// For a pure state this is the Shannon entropy of its Fock distribution.
inline double total_coherence(const FockState& psi) { return shannon_entropy(dephase_fock(psi)); }

inline double total_coherence(const DensityMatrix& rho) {
  return shannon_entropy(dephase_fock(rho)) - von_neumann_entropy(rho);
}

/// sum_k w_k log2((k+1)/w_k): each sector contributes k+1 equal outcomes.
inline double total_coherence(const SectorUniformState& s) {
  KahanSum c;
  for (std::size_t k = 0; k < s.weights.size(); ++k) {
    const double w = s.weights[k];
    if (w > 0.0) c.add(w * (std::log2(k + 1.0) - std::log2(w)));
  }
  return c.value();
}

}  // namespace fockcoh
