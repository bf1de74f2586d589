// Sweeps over the Psi(theta, m)_N family and an independent check of the
// sector-weight maximizer of C^A at fixed mean particle number.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "fockcoh/coherence.hpp"
#include "fockcoh/common.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/protocol.hpp"
#include "fockcoh/states.hpp"

namespace fockcoh {

struct SweepPoint {
  double theta = 0.0;
  int m = 0;
  double coherence_bits = 0.0;
  double rate = 0.0;
};

struct SweepResult {
  int N = 0;
  std::vector<SweepPoint> grid;  ///< m-major, theta-minor
  std::size_t argmax = 0;
  /// Golden-section refinement of theta at the argmax m.
  std::optional<double> refined_theta;
  std::optional<double> refined_coherence_bits;

  const SweepPoint& best() const { return grid.at(argmax); }
};

inline constexpr int kMaxSweepN = 4000;

/// k uniform points on [0, pi/4], endpoints included.
inline std::vector<double> default_theta_grid(int points = 33) {
  require(points >= 2, "theta grid needs at least two points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = std::numbers::pi / 4 * i / (points - 1);
  return g;
}

/// m = 0, 1, ..., floor(N/2).
inline std::vector<int> default_m_values(int N) {
  std::vector<int> m(N / 2 + 1);
  for (int i = 0; i <= N / 2; ++i) m[i] = i;
  return m;
}

namespace detail {
inline double psi_coherence_from_base(const std::vector<LogWeight>& base, double theta) {
  return amplitude_entropy(psi_from_base(base, theta));
}

/// Golden-section maximization of a unimodal f on [a, b].
template <class F>
double golden_section_max(F&& f, double a, double b, double xtol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}
}  // namespace detail

/// Coherence C(Psi(theta, m)_N) and rate C / log2(N+1) on the product grid.
/// The theta = pi/4 base amplitudes are computed once per m.
inline SweepResult sweep_psi(int N, const std::vector<double>& theta_grid, const std::vector<int>& m_values,
                             int threads = 1, bool refine = true) {
  require(N >= 1, "sweep_psi: N must be at least 1");
  require(!theta_grid.empty() && !m_values.empty(), "sweep_psi: empty grid");
  if (N > kMaxSweepN) throw ResourceLimit("sweep_psi: N above 4000");
  for (double t : theta_grid) detail::check_psi({t, 0, N});
  for (int m : m_values) detail::check_psi({std::numbers::pi / 4, m, N});

  SweepResult res;
  res.N = N;
  res.grid.resize(theta_grid.size() * m_values.size());
  const double denom = std::log2(N + 1.0);
  auto run_m = [&](std::size_t im) {
    const auto base = detail::psi_base(N, m_values[im]);
    for (std::size_t it = 0; it < theta_grid.size(); ++it) {
      const double c = detail::psi_coherence_from_base(base, theta_grid[it]);
      res.grid[im * theta_grid.size() + it] = {theta_grid[it], m_values[im], c, c / denom};
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(m_values.size())));
  if (nt == 1) {
    for (std::size_t im = 0; im < m_values.size(); ++im) run_m(im);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t im = w; im < m_values.size(); im += nt) run_m(im);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 1; i < res.grid.size(); ++i) {
    if (res.grid[i].coherence_bits > res.grid[res.argmax].coherence_bits) res.argmax = i;
  }
  if (refine && theta_grid.size() >= 2) {
    const auto& b = res.best();
    const std::size_t it = res.argmax % theta_grid.size();
    const double lo = theta_grid[it == 0 ? 0 : it - 1];
    const double hi = theta_grid[std::min(it + 1, theta_grid.size() - 1)];
    const auto base = detail::psi_base(N, b.m);
    auto f = [&](double t) { return detail::psi_coherence_from_base(base, t); };
    const double t = detail::golden_section_max(f, std::min(lo, hi), std::max(lo, hi), 1e-4);
    res.refined_theta = t;
    res.refined_coherence_bits = f(t);
  }
  return res;
}

/// Result of comparing two numerical maximizers of
///   H(q) + sum_k q_k log(k+1)   s.t. sum q = 1, sum k q = N, k <= K_max
/// with the closed-form weights p_k = (k+1) (2/(N+2))^2 (N/(N+2))^k.
struct KktReport {
  double N = 0.0;
  int k_max = 0;
  double closed_form_tail = 0.0;  ///< mass of p beyond K_max
  double lambda1_closed = 0.0;    ///< ln(N/(N+2))
  double lambda1_exp_family = 0.0;
  double lambda1_mirror = 0.0;
  double linf_exp_family = 0.0;  ///< ||q - p||_inf
  double linf_mirror = 0.0;      ///< worst over random starts
  double linf_between = 0.0;     ///< worst ||q_exp - q_mirror||_inf
  double objective_closed_nats = 0.0;
  double objective_mirror_nats = 0.0;
  bool mirror_monotone = true;
  int mirror_iterations = 0;  ///< most iterations over starts
  int starts = 0;
  std::vector<double> closed_form;
  std::vector<double> exp_family;
};

namespace detail {

inline double kkt_objective(const std::vector<double>& lq) {
  KahanSum f;
  for (std::size_t k = 0; k < lq.size(); ++k) {
    if (std::isinf(lq[k])) continue;
    f.add(std::exp(lq[k]) * (std::log(k + 1.0) - lq[k]));
  }
  return f.value();
}

/// Exponential tilt lq_k + mu k, renormalized, with mu chosen by bisection so
/// the mean is N. This is the KL projection onto the two constraints.
inline std::vector<double> tilt_to_mean(const std::vector<double>& lq, double N, double* mu_out = nullptr) {
  const int K = static_cast<int>(lq.size()) - 1;
  std::vector<double> t(lq.size());
  auto apply = [&](double mu) {
    for (int k = 0; k <= K; ++k) t[k] = lq[k] + mu * k;
    const double z = log_sum_exp(t);
    for (auto& x : t) x -= z;
  };
  auto mean = [&](double mu) {
    apply(mu);
    KahanSum s;
    for (int k = 0; k <= K; ++k) s.add(k * std::exp(t[k]));
    return s.value();
  };
  double lo = -60.0, hi = 60.0;
  for (int i = 0; i < 300 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) < N ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  apply(mu);
  if (mu_out) *mu_out = mu;
  return t;
}

}  // namespace detail

inline KktReport verify_kkt(double N, int k_max = 500, double tolerance = 1e-6, int starts = 5,
                            std::uint64_t seed = 1) {
  if (N < 0.0) throw InvalidArgument("verify_kkt: negative mean particle number is infeasible");
  require(k_max >= 1, "verify_kkt: truncation must be at least 1");
  require(N < k_max, "verify_kkt: mean particle number must be below the truncation");
  KktReport rep;
  rep.N = N;
  rep.k_max = k_max;
  rep.starts = starts;
  const int K = k_max;
  rep.closed_form.assign(K + 1, 0.0);
  if (N == 0.0) {
    rep.closed_form[0] = 1.0;
    rep.exp_family = rep.closed_form;
    rep.lambda1_closed = rep.lambda1_exp_family = rep.lambda1_mirror = -std::numeric_limits<double>::infinity();
    return rep;
  }
  const double r = N / (N + 2.0), lr = std::log(r), la = 2.0 * std::log(2.0 / (N + 2.0));
  rep.lambda1_closed = lr;
  for (int k = 0; k <= K; ++k) rep.closed_form[k] = (k + 1.0) * std::exp(la + k * lr);
  rep.closed_form_tail = std::exp((K + 1.0) * lr) * ((K + 2.0) * (1.0 - r) + r);
  if (rep.closed_form_tail >= tolerance) {
    throw InvalidArgument("verify_kkt: truncation too small, closed-form tail " +
                          std::to_string(rep.closed_form_tail) + " is not below the tolerance");
  }
  std::vector<double> lp(K + 1);
  for (int k = 0; k <= K; ++k) lp[k] = std::log(rep.closed_form[k]);
  rep.objective_closed_nats = detail::kkt_objective(lp);

  // Exponential-family fixed point q_k ~ (k+1) e^{lambda k}.
  std::vector<double> base(K + 1);
  for (int k = 0; k <= K; ++k) base[k] = std::log(k + 1.0);
  const auto lq_exp = detail::tilt_to_mean(base, N, &rep.lambda1_exp_family);
  rep.exp_family.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    rep.exp_family[k] = std::exp(lq_exp[k]);
    rep.linf_exp_family = std::max(rep.linf_exp_family, std::abs(rep.exp_family[k] - rep.closed_form[k]));
  }

  // Entropic mirror ascent from random interior starts: multiplicative
  // gradient step followed by KL projection, step halved until the
  // objective does not decrease.
  std::mt19937_64 rng(splitmix64(seed));
  std::exponential_distribution<double> expo(1.0);
  double lambda_sum = 0.0;
  for (int s = 0; s < starts; ++s) {
    std::vector<double> lq(K + 1);
    for (auto& x : lq) x = std::log(expo(rng) + 1e-300);
    lq = detail::tilt_to_mean(lq, N);
    double f = detail::kkt_objective(lq);
    int it = 0;
    for (; it < 10000; ++it) {
      double eta = 0.5, fn = 0.0, step = 0.0;
      std::vector<double> next(K + 1);
      while (true) {
        for (int k = 0; k <= K; ++k) next[k] = (1.0 - eta) * lq[k] + eta * base[k];
        next = detail::tilt_to_mean(next, N);
        fn = detail::kkt_objective(next);
        if (fn >= f - 1e-13 || eta < 1e-6) break;
        eta *= 0.5;
      }
      if (fn < f - 1e-13) rep.mirror_monotone = false;
      for (int k = 0; k <= K; ++k) step = std::max(step, std::abs(std::exp(next[k]) - std::exp(lq[k])));
      lq = std::move(next);
      f = fn;
      if (step < 1e-15) break;
    }
    rep.mirror_iterations = std::max(rep.mirror_iterations, it + 1);
    rep.objective_mirror_nats = f;
    for (int k = 0; k <= K; ++k) {
      const double q = std::exp(lq[k]);
      rep.linf_mirror = std::max(rep.linf_mirror, std::abs(q - rep.closed_form[k]));
      rep.linf_between = std::max(rep.linf_between, std::abs(q - rep.exp_family[k]));
    }
    lambda_sum += (lq[1] - base[1]) - (lq[0] - base[0]);
  }
  rep.lambda1_mirror = starts > 0 ? lambda_sum / starts : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace fockcoh
