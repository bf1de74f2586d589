// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fockcoh/fockcoh.hpp"

using namespace fockcoh;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  ///< <= 0: no runtime bound
  std::function<void(Outcome&)> body;
};

// Rate formula exactness.
void rate_exactness(Outcome& o) {
  const double r1 = rate_bec(1).rate, r2 = rate_bec(2).rate;
  o.check(std::abs(r1 - 1.0) <= 1e-12, "rate_bec(1)");
  o.check(std::abs(r2 - 1.5 / std::log2(3.0)) <= 1e-12, "rate_bec(2)");
  double worst = 0.0;
  for (int N = 1; N <= 10; ++N) worst = std::max(worst, std::abs(rate_mc_from_pure(mc(N), N).rate - 1.0));
  o.check(worst <= 1e-12, "rate_mc_from_pure(MC_N)");
  o.detail << "rate_bec(1)=" << r1 << " rate_bec(2)=" << r2 << " max|rate(MC_N)-1|=" << worst;
}

// rate_bec decreases toward 1/2, close to the Gaussian-entropy approximation.
void asymptotic_limit(Outcome& o) {
  const int Ns[] = {10, 100, 1000, 4000};
  double prev = 2.0;
  for (int N : Ns) {
    const double r = rate_bec(N).rate;
    o.check(r < prev, "strict decrease at N=" + std::to_string(N));
    prev = r;
  }
  const double r = rate_bec(4000).rate;
  const double approx = 0.5 * std::log2(std::numbers::pi * std::numbers::e * 4000.0 / 2.0) / std::log2(4001.0);
  o.check(r > 0.5 && r < 0.62, "rate_bec(4000) in (0.5, 0.62)");
  o.check(std::abs(r - approx) <= 1e-3, "Gaussian approximation");
  o.detail << "rate_bec(4000)=" << r << " approx=" << approx << " diff=" << std::abs(r - approx);
}

// Structure of the Psi(theta, m)_N rate curves.
void psi_structure(Outcome& o) {
  for (int N : {16, 64, 256, 1024}) {
    const auto res = sweep_psi(N, default_theta_grid(33), default_m_values(N), 1, false);
    const auto& b = res.best();
    const double r0 = res.grid[0 * 33 + 32].rate, rin = res.grid[(N / 2 - 1) * 33 + 32].rate;
    o.check(rin > r0, "rate(N/2-1) > rate(0) at N=" + std::to_string(N));
    o.check(b.theta == std::numbers::pi / 4, "theta argmax at N=" + std::to_string(N));
    o.check(b.m != 0 && b.m != N / 2, "interior m argmax at N=" + std::to_string(N));
    o.detail << "N=" << N << ": argmax(theta=" << b.theta << ", m=" << b.m << ") rate(0)=" << r0
             << " rate(N/2-1)=" << rin << "; ";
  }
}

// Sector weights of the constrained maximizer.
void kkt(Outcome& o) {
  for (double N : {1.0, 2.0, 5.0, 10.0}) {
    const auto r = verify_kkt(N, 500);
    const double l1 = std::log(N / (N + 2.0));
    o.check(r.linf_exp_family < 1e-6 && r.linf_mirror < 1e-6, "linf at N=" + std::to_string(N));
    o.check(std::abs(r.lambda1_exp_family - l1) <= 1e-8 && std::abs(r.lambda1_mirror - l1) <= 1e-8,
            "lambda1 at N=" + std::to_string(N));
    o.detail << "N=" << N << ": linf=" << std::max(r.linf_exp_family, r.linf_mirror)
             << " dlambda1=" << std::max(std::abs(r.lambda1_exp_family - l1), std::abs(r.lambda1_mirror - l1)) << "; ";
  }
}

// Closed forms for C^A(Phi_N) and C^A(MC~_N).
void closed_forms(Outcome& o) {
  double worst_form = 0.0, worst_series = 0.0;
  int worst_n = 0;
  for (int N = 1; N <= 50; ++N) {
    const double c = total_coherence(phi(N));
    const double d = std::abs(c - phi_coherence_closed_form(N));
    if (d > worst_form) {
      worst_form = d;
      worst_n = N;
    }
    worst_series = std::max(worst_series, std::abs(c - phi_coherence_series(N)));
  }
  o.check(worst_form <= 1e-9, "phi closed form N=1..50");
  const double ratio = phi_coherence_closed_form(10000) / std::log2(1e8);
  o.check(std::abs(ratio - 1.0) <= 0.03, "closed form / log2 N^2 at N=1e4");

  double worst_tilde = 0.0, worst_gap = 0.0;
  for (int N = 1; N <= 50; ++N) {
    const double direct = total_coherence(mc_tilde(N));
    double formula = std::log2(2.0 * N + 1.0);
    for (int x = 0; x <= 2 * N; ++x) formula += std::log2(x + 1.0) / (2.0 * N + 1.0);
    worst_tilde = std::max(worst_tilde, std::abs(direct - formula));
    worst_gap = std::max(worst_gap, std::abs(mc_tilde_coherence_three_term(N) - direct));
  }
  o.check(worst_tilde <= 1e-9, "mc_tilde direct sum");
  o.detail << "phi: max|C^A - four-term form|=" << worst_form << " (N=" << worst_n
           << ", C^A(phi_2)=" << total_coherence(phi(2)) << " vs form " << phi_coherence_closed_form(2)
           << "), max|C^A - series|=" << worst_series << ", form/log2(N^2) at 1e4=" << ratio
           << "; mc_tilde: max|direct - sum|=" << worst_tilde << ", three-term expression off by up to " << worst_gap;
}

// Pair-correlated lower bound.
void pair_bound(Outcome& o) {
  for (int N : {100, 1000, 4000}) {
    const double c = total_coherence(pair_correlated(N));
    const double b = pair_correlated_bound(N);
    o.check(c >= b, "C >= bound at N=" + std::to_string(N));
    o.detail << "N=" << N << ": C=" << c << " bound=" << b << "; ";
  }
  const double slope = pair_correlated_bound(100000) / std::log2(100000.0);
  const double rel = std::abs(slope / (2.0 / std::numbers::pi) - 1.0);
  o.check(rel <= 0.02, "bound/log2 N within 2% of 2/pi at N=1e5");
  o.detail << "bound/log2N at 1e5=" << slope << " (2/pi=" << 2.0 / std::numbers::pi << ", rel " << 100 * rel << "%)";
}

// Indefinite-number efficiency.
void unit_efficiency(Outcome& o) {
  double prev = -1.0;
  for (int N : {10, 100, 1000, 4000}) {
    const double r = rate_indefinite(phi_sector_uniform(N), N).rate;
    o.check(r >= prev, "nondecreasing at N=" + std::to_string(N));
    if (N == 1000) o.check(r >= 0.90, "rate >= 0.90 at N=1000");
    o.detail << "N=" << N << ": " << r << "; ";
    prev = r;
  }
}

// Photon-added beamsplitter output.
void hom(Outcome& o) {
  for (double c1 : {1.0, 0.6, 0.0}) {
    const double c2 = std::sqrt(1.0 - c1 * c1);
    const auto rho = hom_channel_output(c1, c2);
    const double w[3] = {rho.sector_weight(0), rho.sector_weight(1), rho.sector_weight(2)};
    const double e[3] = {c1 * c1 / 2.0, c2 * c2 / 2.0, 0.5};
    double werr = 0.0;
    for (int i = 0; i < 3; ++i) werr = std::max(werr, std::abs(w[i] - e[i]));
    const auto ph = hom_phi(c1, c2);
    Eigen::VectorXcd v(3);
    for (int i = 0; i < 3; ++i) v(i) = ph.sector(2)[i];
    const double berr = (rho.block(2) - kHomPhiWeight * v * v.adjoint()).cwiseAbs().maxCoeff();
    const bool verdict = pure_in_delta_b(ph).verdict;
    const bool expect = c1 * c2 == 0.0;
    o.check(werr <= 1e-12, "weights at c1=" + std::to_string(c1));
    o.check(berr <= 1e-12, "two-particle block at c1=" + std::to_string(c1));
    o.check(verdict == expect, "membership at c1=" + std::to_string(c1));
    o.detail << "c1=" << c1 << ": weight err " << werr << ", block err " << berr << ", in DeltaB " << verdict << "; ";
  }
}

// Membership anchors.
void membership(Outcome& o) {
  o.check(pure_in_delta_b(noon(2)).verdict, "noon(2) in DeltaB");
  for (int N = 3; N <= 8; ++N) o.check(!pure_in_delta_b(noon(N)).verdict, "noon(" + std::to_string(N) + ") not in DeltaB");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(3, 3);
  p(1, 1) = 1.0;
  const std::vector<Eigen::MatrixXcd> kraus = {p, Eigen::MatrixXcd::Identity(3, 3) - p};
  o.check(kraus_in_e_a(kraus).verdict, "{P, 1-P} incoherent");
  o.detail << "noon(2) in, noon(3..8) out, {P, 1-P} passes";
}

// Monte-Carlo yield against exact enumeration and the multinomial law.
void monte_carlo(Outcome& o) {
  const auto b = single_copy_distribution(bec(1, 1));
  const double exact = simulate_exact(b, 2, 2).empirical_rate;
  // All four outcomes of two copies: types (2,0),(0,2) give |T|=1, (1,1) gives |T|=2.
  double brute = 0.0;
  for (int x = 0; x < 4; ++x) {
    const std::vector<std::int64_t> c = {(x & 1) + (x >> 1 & 1), 2 - (x & 1) - (x >> 1 & 1)};
    brute += 0.25 * shot_yield({{}, c}, 2).copies / 2.0;
  }
  o.check(std::abs(exact - 0.25) <= 1e-15 && std::abs(brute - 0.25) <= 1e-15, "exact n=2");
  const auto mc = simulate(b, 64, 10000, 2, 42);
  o.check(mc.empirical_rate >= 0.9, "n=64 mean copies/n");

  const auto p = single_copy_distribution(bec(2, 1));
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = p.probability(i);
  const int n = 4, S = 100000;
  std::map<std::vector<std::int64_t>, int> hist;
  for (int s = 0; s < S; ++s) ++hist[sample_type(p, n, 7 + s).counts];
  double chi2 = 0.0;
  int cells = 0;
  for (int a = 0; a <= n; ++a) {
    for (int c = 0; a + c <= n; ++c) {
      const std::vector<std::int64_t> t = {a, c, n - a - c};
      double lp = log_multinomial(t);
      for (int i = 0; i < 3; ++i) lp += t[i] * std::log(q[i]);
      const double e = S * std::exp(lp);
      const double obs = hist.count(t) ? hist[t] : 0;
      chi2 += (obs - e) * (obs - e) / e;
      ++cells;
    }
  }
  const double pvalue = boost::math::gamma_q((cells - 1) / 2.0, chi2 / 2.0);
  o.check(pvalue > 1e-3, "chi-square");
  o.detail << "exact(n=2)=" << exact << " brute=" << brute << "; n=64: " << mc.empirical_rate << " +- "
           << mc.stderr_rate << "; chi2=" << chi2 << " (" << cells - 1 << " dof, p=" << pvalue << ")";
}

// Multinomial entropy growth in the number of cells.
void multinomial_scaling(Outcome& o) {
  const double hb = binomial_entropy(2000, 0.5);
  for (int M : {3, 4, 5}) {
    const double ratio = multinomial_entropy(2000, M) / hb;
    const double rel = std::abs(ratio / (M - 1.0) - 1.0);
    o.check(rel <= 0.05, "M=" + std::to_string(M));
    o.detail << "M=" << M << ": ratio " << ratio << " (" << 100 * rel << "% from M-1); ";
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "rate formula exactness", 1.0, rate_exactness},
      {2, "BEC rate asymptotics", 5.0, asymptotic_limit},
      {3, "Psi sweep structure", 120.0, psi_structure},
      {4, "KKT sector weights", 10.0, kkt},
      {5, "C^A closed forms", 0.0, closed_forms},
      {6, "pair-correlated bound", 0.0, pair_bound},
      {7, "indefinite-number efficiency", 0.0, unit_efficiency},
      {8, "HOM channel output", 0.0, hom},
      {9, "membership anchors", 0.0, membership},
      {10, "Monte-Carlo yield", 30.0, monte_carlo},
      {11, "multinomial scaling", 0.0, multinomial_scaling},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail << " [over time limit " << c.time_limit_s << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %-30s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
