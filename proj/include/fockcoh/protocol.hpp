// Type-class distillation protocol: sample the measured type of n copies,
// convert the resulting uniform superposition into target copies, and
// aggregate yields.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "fockcoh/coherence.hpp"
#include "fockcoh/common.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/probability.hpp"

namespace fockcoh {

/// Histogram of n single-copy outcomes over a fixed alphabet.
struct TypeClass {
  std::vector<Label> alphabet;
  std::vector<std::int64_t> counts;

  std::int64_t n() const {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  /// ln |T_t| = ln multinomial(n; counts).
  double log_size() const { return log_multinomial(counts); }
};

struct YieldSample {
  TypeClass type;
  std::int64_t copies = 0;  ///< floor(log_dim |T_t|)
  double success_probability = 1.0;  ///< dim^copies / |T_t|
};

/// p_{X,Y}: the Fock distribution of a single copy.
inline ProbabilityTable single_copy_distribution(const FockState& psi) { return dephase_fock(psi); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace detail {
inline std::vector<double> table_probabilities(const ProbabilityTable& p) {
  std::vector<double> q(p.size());
  double tot = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tot += q[i] = p.probability(i);
  for (auto& x : q) x /= tot;
  return q;
}

/// Multinomial counts by conditional binomials, in table order.
inline std::vector<std::int64_t> sample_counts(const std::vector<double>& q, std::int64_t n, std::mt19937_64& rng) {
  std::vector<std::int64_t> c(q.size(), 0);
  std::int64_t left = n;
  double mass = 1.0;
  for (std::size_t i = 0; i < q.size() && left > 0; ++i) {
    if (i + 1 == q.size() || mass <= q[i]) {
      c[i] = left;
      left = 0;
      break;
    }
    const double pr = std::clamp(q[i] / mass, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> bin(left, pr);
    c[i] = bin(rng);
    left -= c[i];
    mass -= q[i];
  }
  return c;
}
}  // namespace detail

/// Type of n i.i.d. draws from p; deterministic given the seed.
inline TypeClass sample_type(const ProbabilityTable& p, std::int64_t n, std::uint64_t seed) {
  require(n >= 1, "sample_type: n must be at least 1");
  std::mt19937_64 rng(splitmix64(seed));
  return {p.labels(), detail::sample_counts(detail::table_probabilities(p), n, rng)};
}

namespace detail {
/// Exact multinomial coefficient when it fits in 64 bits.
inline std::optional<std::uint64_t> exact_multinomial(const std::vector<std::int64_t>& counts) {
  unsigned __int128 acc = 1;
  std::int64_t seen = 0;
  for (auto c : counts) {
    for (std::int64_t j = 1; j <= c; ++j) {
      ++seen;
      acc = acc * seen / j;  // binomial(seen, j) stays integral at every step
      if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    }
  }
  return static_cast<std::uint64_t>(acc);
}
}  // namespace detail

/// One-shot conversion of the post-measurement uniform superposition over
/// |T_t| states: keep the first dim^c of them, c = floor(log_dim |T_t|).
inline YieldSample shot_yield(const TypeClass& t, int target_dim) {
  require(target_dim >= 2, "shot_yield: target dimension must be at least 2");
  for (auto c : t.counts) require(c >= 0, "shot_yield: negative count");
  YieldSample y{t, 0, 1.0};
  if (auto exact = detail::exact_multinomial(t.counts)) {
    const std::uint64_t size = *exact;
    unsigned __int128 power = 1;
    while (power * static_cast<unsigned>(target_dim) <= size) {
      power *= static_cast<unsigned>(target_dim);
      ++y.copies;
    }
    y.success_probability = static_cast<double>(static_cast<std::uint64_t>(power)) / static_cast<double>(size);
    return y;
  }
  const double ls = t.log_size(), ld = std::log(static_cast<double>(target_dim));
  y.copies = static_cast<std::int64_t>(std::floor(ls / ld + 1e-12));
  y.success_probability = std::min(1.0, std::exp(y.copies * ld - ls));
  return y;
}

struct SimulationReport {
  double analytic_rate = 0.0;  ///< H(p) / log2(dim)
  double empirical_rate = 0.0;  ///< mean copies / n
  double stderr_rate = 0.0;
  double mean_copies = 0.0;
  double mean_success = 0.0;  ///< mean dim^copies / |T_t|
  double mean_particles_per_pair = 0.0;  ///< expected particles per copy after the measurement
  double particles_stderr = 0.0;
  double truncation_mass = 0.0;  ///< single-copy mass dropped before renormalizing
  std::int64_t n = 0;
  std::int64_t shots = 0;
  int target_dim = 0;
  bool exact = false;
};

inline constexpr double kMaxSingleCopySamples = 1e9;

namespace detail {
inline std::vector<double> pair_totals(const ProbabilityTable& p) {
  std::vector<double> tot(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) tot[i] = total(p.label(i));
  return tot;
}

struct ShotMoments {
  KahanSum copies, copies_sq, success, particles, particles_sq;
};
}  // namespace detail

/// Monte-Carlo estimate of the one-shot yield of the type-class protocol.
/// Shot i draws from mt19937_64 seeded with splitmix64(seed + i); shots are
/// aggregated in fixed blocks, so the result does not depend on threads.
inline SimulationReport simulate(const ProbabilityTable& p, std::int64_t n, std::int64_t shots, int target_dim,
                                 std::uint64_t seed, int threads = 1) {
  require(n >= 1 && shots >= 1, "simulate: n and shots must be positive");
  require(target_dim >= 2, "simulate: target dimension must be at least 2");
  if (static_cast<double>(n) * static_cast<double>(shots) > kMaxSingleCopySamples) {
    throw ResourceLimit("simulate: n * shots exceeds 1e9 single-copy samples");
  }
  SimulationReport rep;
  rep.n = n;
  rep.shots = shots;
  rep.target_dim = target_dim;
  rep.truncation_mass = std::max(0.0, 1.0 - p.total());
  const auto q = detail::table_probabilities(p);
  const auto tot = detail::pair_totals(p);
  rep.analytic_rate = shannon_entropy(q) / std::log2(static_cast<double>(target_dim));

  constexpr std::int64_t kBlock = 1024;
  const std::int64_t blocks = (shots + kBlock - 1) / kBlock;
  std::vector<detail::ShotMoments> partial(blocks);
  auto run_block = [&](std::int64_t b) {
    auto& m = partial[b];
    const std::int64_t end = std::min(shots, (b + 1) * kBlock);
    for (std::int64_t i = b * kBlock; i < end; ++i) {
      std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(i)));
      TypeClass t{{}, detail::sample_counts(q, n, rng)};
      const auto y = shot_yield(t, target_dim);
      const double c = static_cast<double>(y.copies);
      m.copies.add(c);
      m.copies_sq.add(c * c);
      m.success.add(y.success_probability);
      double part = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) part += t.counts[k] * tot[k];
      part /= static_cast<double>(n);
      m.particles.add(part);
      m.particles_sq.add(part * part);
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(blocks)));
  if (nt == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t b = w; b < blocks; b += nt) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  KahanSum c, c2, s, pt, pt2;
  for (const auto& m : partial) {
    c.add(m.copies.value());
    c2.add(m.copies_sq.value());
    s.add(m.success.value());
    pt.add(m.particles.value());
    pt2.add(m.particles_sq.value());
  }
  const double S = static_cast<double>(shots);
  rep.mean_copies = c.value() / S;
  rep.empirical_rate = rep.mean_copies / static_cast<double>(n);
  rep.mean_success = s.value() / S;
  rep.mean_particles_per_pair = pt.value() / S;
  auto sem = [S](double sum, double sq) {
    if (S < 2) return 0.0;
    const double mean = sum / S;
    const double var = std::max(0.0, (sq - S * mean * mean) / (S - 1.0));
    return std::sqrt(var / S);
  };
  rep.stderr_rate = sem(c.value(), c2.value()) / static_cast<double>(n);
  rep.particles_stderr = sem(pt.value(), pt2.value());
  return rep;
}

inline constexpr std::int64_t kMaxExactCopies = 40;

/// Exact expectation over all types. |T_t| depends only on the multiset of
/// nonzero counts, so the sum runs over integer partitions lambda of n:
///   E[f] = n! sum_lambda f(lambda) sum_{t ~ lambda} prod_i p_i^{t_i} / t_i!,
/// with the inner sum accumulated outcome by outcome over sub-partitions.
inline SimulationReport simulate_exact(const ProbabilityTable& p, std::int64_t n, int target_dim) {
  require(n >= 1, "simulate_exact: n must be positive");
  require(target_dim >= 2, "simulate_exact: target dimension must be at least 2");
  if (n > kMaxExactCopies) throw ResourceLimit("simulate_exact: n above 40 is not enumerated");
  const auto q = detail::table_probabilities(p);
  const auto tot = detail::pair_totals(p);
  using Part = std::vector<std::int64_t>;  // sorted descending

  // Each state also carries sum over assignments of (particles in the
  // assigned outcomes) for the energy audit.
  struct Acc {
    double w = 0.0, wp = 0.0;
  };
  std::map<Part, Acc> states{{Part{}, {1.0, 0.0}}};
  std::vector<double> inv_fact(n + 1);
  for (std::int64_t v = 0; v <= n; ++v) inv_fact[v] = std::exp(-log_factorial(v));
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    std::map<Part, Acc> next = states;
    for (const auto& [part, acc] : states) {
      std::int64_t have = 0;
      for (auto v : part) have += v;
      double pw = 1.0;
      for (std::int64_t v = 1; v + have <= n; ++v) {
        pw *= q[i];
        if (pw == 0.0) break;
        Part np = part;
        np.insert(std::upper_bound(np.begin(), np.end(), v, std::greater<>()), v);
        const double f = pw * inv_fact[v];
        auto& dst = next[np];
        dst.w += acc.w * f;
        dst.wp += (acc.wp + acc.w * v * tot[i]) * f;
      }
    }
    states = std::move(next);
  }
  const double log_nf = log_factorial(n);
  KahanSum mass, copies, success, particles;
  for (const auto& [part, acc] : states) {
    std::int64_t have = 0;
    for (auto v : part) have += v;
    if (have != n) continue;
    const double w = std::exp(log_nf) * acc.w;
    const auto y = shot_yield(TypeClass{{}, part}, target_dim);
    mass.add(w);
    copies.add(w * y.copies);
    success.add(w * y.success_probability);
    particles.add(std::exp(log_nf) * acc.wp / static_cast<double>(n));
  }
  SimulationReport rep;
  rep.exact = true;
  rep.n = n;
  rep.target_dim = target_dim;
  rep.truncation_mass = std::max(0.0, 1.0 - p.total());
  rep.analytic_rate = shannon_entropy(q) / std::log2(static_cast<double>(target_dim));
  require(std::abs(mass.value() - 1.0) < 1e-9, "simulate_exact: type probabilities do not sum to one");
  rep.mean_copies = copies.value();
  rep.empirical_rate = rep.mean_copies / static_cast<double>(n);
  rep.mean_success = success.value();
  rep.mean_particles_per_pair = particles.value();
  return rep;
}

/// Bounds on the size of the delta-typical set
///   { x^n : |-(1/n) log2 p(x^n) - H| <= delta }.
struct TypicalSetSize {
  LogWeight lower;  ///< P(T) 2^{n(H - delta)}, zero when the probability bound is vacuous
  LogWeight upper;  ///< 2^{n(H + delta)}
  double probability_lower = 0.0;  ///< lower bound (or exact value) of P(T)
  bool probability_exact = false;
  std::optional<std::uint64_t> exact_count;
  double entropy_bits = 0.0;

  double lower_log2() const {
    return lower.is_zero() ? -std::numeric_limits<double>::infinity() : nats_to_bits(lower.log_magnitude());
  }
  double upper_log2() const { return nats_to_bits(upper.log_magnitude()); }
};

namespace detail {
/// Visits every composition of n into k nonnegative parts.
template <class F>
void for_each_composition(std::int64_t n, std::size_t k, std::vector<std::int64_t>& cur, std::size_t pos, F&& f) {
  if (pos + 1 == k) {
    cur[pos] = n;
    f(cur);
    return;
  }
  for (std::int64_t v = 0; v <= n; ++v) {
    cur[pos] = v;
    for_each_composition(n - v, k, cur, pos + 1, f);
  }
}
}  // namespace detail

inline TypicalSetSize typical_set_log_size(const ProbabilityTable& p, std::int64_t n, double delta) {
  require(n >= 1, "typical_set_log_size: n must be positive");
  require(delta > 0.0, "typical_set_log_size: delta must be positive");
  std::vector<double> q, l2;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p.probability(i);
    if (x > 0.0) {
      q.push_back(x);
      l2.push_back(nats_to_bits(p.log_probability(i)));
    }
  }
  TypicalSetSize out;
  const double H = shannon_entropy(q);
  out.entropy_bits = H;
  const double nn = static_cast<double>(n);
  out.upper = LogWeight::from_log(bits_to_nats(nn * (H + delta)));

  if (n <= 12 && q.size() <= 6) {
    std::uint64_t count = 0;
    KahanSum prob;
    std::vector<std::int64_t> cur(q.size());
    detail::for_each_composition(n, q.size(), cur, 0, [&](const std::vector<std::int64_t>& c) {
      double lp = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) lp += c[i] * l2[i];
      if (std::abs(-lp / nn - H) <= delta + 1e-12) {
        const auto size = *detail::exact_multinomial(c);
        count += size;
        prob.add(static_cast<double>(size) * std::exp2(lp));
      }
    });
    out.exact_count = count;
    out.probability_lower = std::min(1.0, prob.value());
    out.probability_exact = true;
  } else {
    KahanSum v;
    for (std::size_t i = 0; i < q.size(); ++i) v.add(q[i] * (-l2[i] - H) * (-l2[i] - H));
    out.probability_lower = std::max(0.0, 1.0 - v.value() / (nn * delta * delta));
  }
  out.lower = out.probability_lower > 0.0
                  ? LogWeight::from_log(std::log(out.probability_lower) + bits_to_nats(nn * (H - delta)))
                  : LogWeight::zero();
  return out;
}

}  // namespace fockcoh
