// Analytic distillation rates and the coherence closed forms they are
// compared against.
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fockcoh/coherence.hpp"
#include "fockcoh/common.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/states.hpp"

namespace fockcoh {

enum class RateContext { number_conserving, indefinite_number };

inline const char* to_string(RateContext c) {
  return c == RateContext::number_conserving ? "number_conserving" : "indefinite_number";
}

/// Target copies per input copy, kept as numerator / denominator so that
/// one-shot floor effects stay in the protocol layer.
struct RateReport {
  double rate = 0.0;
  double numerator_bits = 0.0;
  double denominator_bits = 0.0;
  RateContext context = RateContext::number_conserving;
};

namespace detail {
inline RateReport make_rate(double num, double den, RateContext ctx) {
  // Entropies that are zero up to rounding can come out as -1e-16.
  if (num < 0.0 && num > -1e-12) num = 0.0;
  require(num >= 0.0, "rate numerator is negative");
  require(den > 0.0, "rate denominator must be positive");
  return {num / den, num, den, ctx};
}
}  // namespace detail

/// C_N(psi) / log2(N+1) for a pure state on one sector N of two modes.
inline RateReport rate_mc_from_pure(const FockState& psi, int N) {
  if (N == 0) throw UndefinedRate("rate_mc_from_pure: MC_0 carries no coherence");
  require(N > 0, "rate_mc_from_pure: negative particle number");
  require(psi.modes() == 2, "rate_mc_from_pure: expected a two-mode state");
  const auto occ = psi.occupied_sectors();
  require(occ.size() == 1 && occ.front() == N,
          "rate_mc_from_pure: state must be supported on sector " + std::to_string(N) + " only");
  return detail::make_rate(sector_coherence(psi, N), std::log2(N + 1.0), RateContext::number_conserving);
}

/// H(B(N, 1/2)) / log2(N+1).
inline RateReport rate_bec(int N) {
  require(N >= 1, "rate_bec: N must be at least 1");
  return detail::make_rate(binomial_entropy(N, 0.5), std::log2(N + 1.0), RateContext::number_conserving);
}

/// log2((2N+1)(N+1)), the register size per copy for the indefinite protocol.
inline double indefinite_denominator_bits(double N) { return std::log2((2.0 * N + 1.0) * (N + 1.0)); }

namespace detail {
inline void check_indefinite(double mean, double N, double tail) {
  require(N > 0.0, "rate_indefinite: expected particle number must be positive");
  if (std::abs(mean - N) > 1e-6) {
    throw InvalidArgument("rate_indefinite: state has mean particle number " + std::to_string(mean) +
                          ", expected " + std::to_string(N));
  }
  require(tail < tol::kTailMass, "rate_indefinite: truncated tail mass is not below 1e-12");
}
}  // namespace detail

/// H(p_{X,Y}) / log2((2N+1)(N+1)) with p_{X,Y} the joint Fock distribution.
inline RateReport rate_indefinite(const FockState& psi, double N) {
  require(psi.modes() == 2, "rate_indefinite: expected a two-mode state");
  const int both[2] = {0, 1};
  detail::check_indefinite(expected_particle_number(psi, both), N, psi.tail_mass_bound());
  return detail::make_rate(total_coherence(psi), indefinite_denominator_bits(N), RateContext::indefinite_number);
}

inline RateReport rate_indefinite(const SectorUniformState& s, double N) {
  detail::check_indefinite(s.expected_particle_number(), N, s.tail_mass_bound);
  return detail::make_rate(total_coherence(s), indefinite_denominator_bits(N), RateContext::indefinite_number);
}

/// Central-binomial lower bound on C(Psi(pi/4, N/2)_N):
///   4 (N/2 + 1) / (pi N) * (log2 N + log2(pi/4)).
inline double pair_correlated_bound(int N) {
  require(N >= 2 && N % 2 == 0, "pair_correlated_bound: N must be even and at least 2");
  const double n = N;
  return 4.0 * (n / 2.0 + 1.0) / (std::numbers::pi * n) * (std::log2(n) + std::log2(std::numbers::pi / 4.0));
}

/// A four-term closed form for C^A(Phi_N):
///   2N/(N+2) log2((N+2)/2) + N/(N+2) log2((N+2)/N)
///   + 4/(N+2) log2((N+2)/2) + (N+1) log2((N+2)/N).
/// It does not agree with the series it is derived from; see
/// phi_coherence_series for the value of the series itself.
inline double phi_coherence_closed_form(int N) {
  require(N >= 1, "phi_coherence_closed_form: N must be at least 1");
  const double n = N;
  const double a = std::log2((n + 2.0) / 2.0), b = std::log2((n + 2.0) / n);
  return 2.0 * n / (n + 2.0) * a + n / (n + 2.0) * b + 4.0 / (n + 2.0) * a + (n + 1.0) * b;
}

/// Exact sum of sum_x (x+1) p_x log2(1/p_x), p_x = (2/(N+2))^2 (N/(N+2))^x:
///   2 log2((N+2)/2) + N log2((N+2)/N).
inline double phi_coherence_series(int N) {
  require(N >= 1, "phi_coherence_series: N must be at least 1");
  const double n = N;
  return 2.0 * std::log2((n + 2.0) / 2.0) + n * std::log2((n + 2.0) / n);
}

/// C^A of the uniform superposition of MC_0..MC_2N:
///   log2(2N+1) + (2N+1)^{-1} sum_{x=0}^{2N} log2(x+1).
inline double mc_tilde_coherence(int N) {
  require(N >= 0, "mc_tilde_coherence: negative N");
  const double d = 2.0 * N + 1.0;
  return std::log2(d) + nats_to_bits(log_factorial(2 * N + 1)) / d;
}

/// A three-term expression for the same quantity,
///   log2(2N+1)/(2N+1) + log2(2N+1) + log2((2N+1)!)/(2N+1),
/// which exceeds mc_tilde_coherence by log2(2N+1)/(2N+1).
inline double mc_tilde_coherence_three_term(int N) {
  require(N >= 0, "mc_tilde_coherence_three_term: negative N");
  const double d = 2.0 * N + 1.0;
  return std::log2(d) / d + mc_tilde_coherence(N);
}

}  // namespace fockcoh
