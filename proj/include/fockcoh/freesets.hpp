// Free-set membership: Fock-diagonal states, pure two-mode linear-optical
// states, incoherent Kraus sets, and energy-density preservation checks.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fockcoh/common.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/logweight.hpp"

namespace fockcoh {

struct DeltaAEvidence {
  double max_off_diagonal = 0.0;
  double off_diagonal_mass = 0.0;  ///< sum of |rho_ij|, i != j
};

/// Root of the dehomogenized creation-operator polynomial, with multiplicity
/// after chordal clustering. at_infinity marks the factor a1*.
struct RootCluster {
  cplx root{};
  bool at_infinity = false;
  int multiplicity = 0;
};

struct DeltaBEvidence {
  int particles = 0;
  /// sqrt of the smallest eigenvalue of the spin covariance matrix: the
  /// residual ||(n.J - mu) psi|| for the best axis n.
  double spin_variance_residual = 0.0;
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double axis_eigenvalue = 0.0;
  int n1 = 0, n2 = 0;  ///< occupations of the reconstructed orthogonal modes
  int distinct_directions = 0;
  std::vector<std::array<cplx, 2>> directions;  ///< single-particle spinors
  double orthogonality_residual = 0.0;  ///< |<u1, u2>| of the reconstructed directions
  /// ||psi - e^{i g} U|n1,n2>|| for the reconstructed U; absent above 160 particles.
  std::optional<double> reconstruction_residual;
  /// Majorana roots from the companion matrix. Multiple roots are
  /// ill-conditioned, so these are reported but not used in the verdict.
  std::vector<RootCluster> roots;
  /// |<s1, s2>| for spinors (1, z)/|.| of exactly two root clusters.
  std::optional<double> root_orthogonality;
};

struct KrausEvidence {
  double completeness_residual = 0.0;  ///< max |sum K*K - 1|
  int max_nonzeros_per_column = 0;
  int offending_operator = -1;  ///< first operator with a column of two or more nonzeros
};

struct MembershipReport {
  bool verdict = false;
  /// Residual within a decade below the tolerance.
  bool uncertain = false;
  double tolerance_used = 0.0;
  std::optional<DeltaAEvidence> delta_a;
  std::optional<DeltaBEvidence> delta_b;
  std::optional<KrausEvidence> kraus;
};

namespace detail {
inline bool near_boundary(double residual, double tolerance) {
  return residual >= tolerance / 10.0 && residual <= tolerance;
}
}  // namespace detail

/// Fock-diagonal test: verdict iff every off-diagonal entry is at most tol.
inline MembershipReport is_delta_a(const DensityMatrix& rho, double tolerance = 1e-10) {
  DeltaAEvidence ev;
  const auto& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r == c) continue;
      const double a = std::abs(m(r, c));
      ev.max_off_diagonal = std::max(ev.max_off_diagonal, a);
      ev.off_diagonal_mass += a;
    }
  }
  MembershipReport rep;
  rep.tolerance_used = tolerance;
  rep.verdict = ev.max_off_diagonal <= tolerance;
  rep.uncertain = detail::near_boundary(ev.max_off_diagonal, tolerance);
  rep.delta_a = ev;
  return rep;
}

namespace detail {

/// Spin operators on the two-mode sector N, basis |N-k, k>.
/// J_z = (n1 - n2)/2, J_+ = a1* a2.
inline std::array<Eigen::VectorXcd, 3> spin_images(const Eigen::VectorXcd& psi, int N) {
  Eigen::VectorXcd jp = Eigen::VectorXcd::Zero(N + 1), jm = Eigen::VectorXcd::Zero(N + 1),
                   jz(N + 1);
  for (int k = 0; k <= N; ++k) {
    jz(k) = 0.5 * (N - 2 * k) * psi(k);
    if (k >= 1) jp(k - 1) += std::sqrt((N - k + 1.0) * k) * psi(k);
    if (k < N) jm(k + 1) += std::sqrt((N - k) * (k + 1.0)) * psi(k);
  }
  const cplx i2(0.0, 2.0);
  return {Eigen::VectorXcd((jp + jm) / 2.0), Eigen::VectorXcd((jp - jm) / i2), jz};
}

/// Roots of sum_k d_k z^k with d_k = c_k / sqrt((N-k)! k!), clustered in the
/// chordal metric. Degree deficit counts roots at infinity.
inline std::vector<RootCluster> majorana_roots(const Eigen::VectorXcd& psi, int N, double cluster_tol = 1e-6) {
  std::vector<RootCluster> out;
  if (N == 0) return out;
  std::vector<double> logs(N + 1);
  double mx = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= N; ++k) {
    const double a = std::abs(psi(k));
    logs[k] = a > 0 ? std::log(a) - 0.5 * (log_factorial(N - k) + log_factorial(k))
                    : -std::numeric_limits<double>::infinity();
    mx = std::max(mx, logs[k]);
  }
  std::vector<cplx> d(N + 1);
  for (int k = 0; k <= N; ++k) d[k] = std::abs(psi(k)) > 0 ? std::polar(std::exp(logs[k] - mx), std::arg(psi(k))) : 0.0;
  int deg = N;
  while (deg > 0 && std::abs(d[deg]) < 1e-14) --deg;
  std::vector<std::pair<cplx, bool>> roots;
  for (int i = 0; i < N - deg; ++i) roots.emplace_back(0.0, true);
  if (deg >= 1) {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int r = 1; r < deg; ++r) comp(r, r - 1) = 1.0;
    for (int r = 0; r < deg; ++r) comp(r, deg - 1) = -d[r] / d[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.emplace_back(es.eigenvalues()(i), false);
  }
  auto chordal = [](const std::pair<cplx, bool>& a, const std::pair<cplx, bool>& b) {
    if (a.second && b.second) return 0.0;
    if (a.second) return 2.0 / std::sqrt(1.0 + std::norm(b.first));
    if (b.second) return 2.0 / std::sqrt(1.0 + std::norm(a.first));
    return 2.0 * std::abs(a.first - b.first) / std::sqrt((1.0 + std::norm(a.first)) * (1.0 + std::norm(b.first)));
  };
  std::vector<std::pair<cplx, bool>> reps;
  for (const auto& r : roots) {
    bool placed = false;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (chordal(r, reps[c]) <= cluster_tol) {
        ++out[c].multiplicity;
        placed = true;
        break;
      }
    }
    if (!placed) {
      reps.push_back(r);
      out.push_back({r.second ? cplx(0.0) : r.first, r.second, 1});
    }
  }
  return out;
}

}  // namespace detail

/// Pure two-mode single-sector membership in the linear-optical free set.
///
/// psi = U|n1, n2> for a mode unitary U exactly when psi is an eigenvector of
/// some spin component n.J, i.e. when the real 3x3 covariance
///   G_ab = Re<J_a J_b> - <J_a><J_b>
/// has a zero eigenvalue. Equivalently the creation-operator polynomial of psi
/// has at most two distinct root directions, orthogonal when there are two.
/// The covariance test stays well conditioned for the high-multiplicity
/// roots that such states always have.
inline MembershipReport pure_in_delta_b(const FockState& psi, double tolerance = 1e-6) {
  require(psi.modes() == 2, "pure_in_delta_b: only two-mode states are supported");
  const auto occupied = psi.occupied_sectors();
  require(occupied.size() <= 1, "pure_in_delta_b: state must be supported on a single particle-number sector");
  MembershipReport rep;
  rep.tolerance_used = tolerance;
  DeltaBEvidence ev;
  if (occupied.empty() || occupied.front() == 0) {
    rep.verdict = true;
    ev.distinct_directions = 0;
    rep.delta_b = ev;
    return rep;
  }
  const int N = occupied.front();
  ev.particles = N;
  Eigen::VectorXcd v(N + 1);
  const auto& amps = psi.sector(N);
  for (int k = 0; k <= N; ++k) v(k) = amps[k];
  v /= v.norm();

  const auto J = detail::spin_images(v, N);
  std::array<double, 3> mean{};
  std::array<Eigen::VectorXcd, 3> w;
  for (int a = 0; a < 3; ++a) {
    mean[a] = v.dot(J[a]).real();
    w[a] = J[a] - mean[a] * v;
  }
  Eigen::Matrix3d G;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) G(a, b) = w[a].dot(w[b]).real();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(G);
  const double lmin = std::max(0.0, es.eigenvalues()(0));
  ev.spin_variance_residual = std::sqrt(lmin);
  Eigen::Vector3d n = es.eigenvectors().col(0);
  const double mu = n(0) * mean[0] + n(1) * mean[1] + n(2) * mean[2];
  if (mu < 0) n = -n;
  ev.axis = {n(0), n(1), n(2)};
  ev.axis_eigenvalue = std::abs(mu);

  // Orthonormal single-particle modes diagonalizing n.sigma (mode 1 = spin up).
  Eigen::Matrix2cd ns;
  ns << n(2), cplx(n(0), -n(1)), cplx(n(0), n(1)), -n(2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es2(ns);
  const Eigen::Vector2cd up = es2.eigenvectors().col(1), down = es2.eigenvectors().col(0);
  const int diff = static_cast<int>(std::lround(2.0 * std::abs(mu)));
  ev.n1 = std::clamp((N + diff) / 2, 0, N);
  ev.n2 = N - ev.n1;
  if (ev.n1 > 0) ev.directions.push_back({up(0), up(1)});
  if (ev.n2 > 0) ev.directions.push_back({down(0), down(1)});
  ev.distinct_directions = static_cast<int>(ev.directions.size());
  ev.orthogonality_residual = std::abs(up.dot(down));

  double worst = std::max(ev.spin_variance_residual, ev.orthogonality_residual);
  if (N <= 160) {
    Eigen::MatrixXcd u(2, 2);
    u.col(0) = up;
    u.col(1) = down;
    const auto recon = LinearOpticalUnitary(u).apply(FockState::basis_state({ev.n1, ev.n2}));
    Eigen::VectorXcd r(N + 1);
    for (int k = 0; k <= N; ++k) r(k) = recon.sector(N)[k];
    const cplx ov = r.dot(v);
    const cplx phase = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    ev.reconstruction_residual = (v - phase * r).norm();
    worst = std::max(worst, *ev.reconstruction_residual);
  }
  if (N <= 200) {
    ev.roots = detail::majorana_roots(v, N);
    if (ev.roots.size() == 2) {
      auto spinor = [](const RootCluster& c) {
        Eigen::Vector2cd s = c.at_infinity ? Eigen::Vector2cd(0.0, 1.0) : Eigen::Vector2cd(1.0, c.root);
        return Eigen::Vector2cd(s / s.norm());
      };
      ev.root_orthogonality = std::abs(spinor(ev.roots[0]).dot(spinor(ev.roots[1])));
    }
  }

  rep.verdict = worst <= tolerance;
  rep.uncertain = detail::near_boundary(worst, tolerance);
  rep.delta_b = std::move(ev);
  return rep;
}

/// Density-matrix entry point: refuses mixed inputs, since no criterion for
/// mixed states is implemented.
inline MembershipReport pure_in_delta_b(const DensityMatrix& rho, double tolerance = 1e-6) {
  require(rho.modes() == 2, "pure_in_delta_b: only two-mode states are supported");
  std::vector<int> occupied;
  for (int n : rho.sectors()) {
    if (rho.sector_weight(n) > 1e-15) occupied.push_back(n);
  }
  require(occupied.size() == 1, "pure_in_delta_b: state must occupy exactly one particle-number sector");
  const int N = occupied.front();
  Eigen::MatrixXcd b = rho.block(N);
  b /= b.trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
  const auto& ev = es.eigenvalues();
  if (ev.size() >= 2 && ev(ev.size() - 2) > 1e-10) {
    throw InvalidArgument("pure_in_delta_b: mixed-state membership is not decided");
  }
  const Eigen::VectorXcd top = es.eigenvectors().col(ev.size() - 1);
  AmplitudeVector amps(top.data(), top.data() + top.size());
  return pure_in_delta_b(FockState(2, {{N, std::move(amps)}}), tolerance);
}

/// Incoherent Kraus set: sum K*K = 1 and every column of every K has at most
/// one entry above tol, so each K sends Fock states to multiples of Fock states.
inline MembershipReport kraus_in_e_a(std::span<const Eigen::MatrixXcd> kraus, double tolerance = 1e-10) {
  require(!kraus.empty(), "kraus_in_e_a: empty Kraus set");
  const auto rows = kraus.front().rows(), cols = kraus.front().cols();
  for (const auto& k : kraus) require(k.rows() == rows && k.cols() == cols, "kraus_in_e_a: dimension mismatch");
  KrausEvidence ev;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(cols, cols);
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    const auto& k = kraus[i];
    sum += k.adjoint() * k;
    for (Eigen::Index c = 0; c < cols; ++c) {
      int nz = 0;
      for (Eigen::Index r = 0; r < rows; ++r) nz += std::abs(k(r, c)) > tolerance ? 1 : 0;
      ev.max_nonzeros_per_column = std::max(ev.max_nonzeros_per_column, nz);
      if (nz > 1 && ev.offending_operator < 0) ev.offending_operator = static_cast<int>(i);
    }
  }
  ev.completeness_residual = (sum - Eigen::MatrixXcd::Identity(cols, cols)).cwiseAbs().maxCoeff();
  MembershipReport rep;
  rep.tolerance_used = tolerance;
  rep.verdict = ev.completeness_residual <= tolerance && ev.max_nonzeros_per_column <= 1;
  rep.uncertain = detail::near_boundary(ev.completeness_residual, tolerance);
  rep.kraus = ev;
  return rep;
}

using Channel = std::function<DensityMatrix(const DensityMatrix&)>;
using ModePair = std::pair<int, int>;

inline Channel identity_channel() {
  return [](const DensityMatrix& r) { return r; };
}

/// Relabels modes: particles in mode i move to mode perm[i].
inline Channel mode_permutation_channel(std::vector<int> perm) {
  return [perm = std::move(perm)](const DensityMatrix& rho) {
    require(static_cast<int>(perm.size()) == rho.modes(), "mode permutation size differs from mode count");
    const auto& basis = rho.basis();
    std::vector<std::size_t> target(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      Occupation o(basis[i].size());
      for (std::size_t m = 0; m < perm.size(); ++m) o[perm[m]] = basis[i][m];
      target[i] = rho.index_of(o);
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.dimension(), rho.dimension());
    for (std::size_t r = 0; r < basis.size(); ++r) {
      for (std::size_t c = 0; c < basis.size(); ++c) out(target[r], target[c]) = rho.matrix()(r, c);
    }
    return DensityMatrix(rho.modes(), rho.sectors(), std::move(out));
  };
}

/// Type-class measurement over the given mode pairs: rho -> sum_t P_t rho P_t,
/// where P_t projects on Fock states whose sequence of pair occupations has
/// histogram t.
inline Channel type_class_measurement_channel(std::vector<ModePair> pairs) {
  return [pairs = std::move(pairs)](const DensityMatrix& rho) {
    const auto& basis = rho.basis();
    std::vector<std::vector<ModePair>> type(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (const auto& [a, b] : pairs) type[i].emplace_back(basis[i][a], basis[i][b]);
      std::sort(type[i].begin(), type[i].end());
    }
    Eigen::MatrixXcd out = rho.matrix();
    for (std::size_t r = 0; r < basis.size(); ++r) {
      for (std::size_t c = 0; c < basis.size(); ++c) {
        if (type[r] != type[c]) out(r, c) = 0.0;
      }
    }
    return DensityMatrix(rho.modes(), rho.sectors(), std::move(out));
  };
}

/// Largest change of the expected particle number in any declared pair,
/// over all probes.
inline double energy_density_deviation(const Channel& op, std::span<const ModePair> pairs,
                                       std::span<const DensityMatrix> probes) {
  double worst = 0.0;
  for (const auto& probe : probes) {
    const auto out = op(probe);
    for (const auto& [a, b] : pairs) {
      const int in_modes[2] = {a, b};
      const double before = expected_particle_number(probe, in_modes);
      const double after = expected_particle_number(out, in_modes);
      worst = std::max(worst, std::abs(after - before));
    }
  }
  return worst;
}

inline bool preserves_energy_density(const Channel& op, std::span<const ModePair> pairs,
                                     std::span<const DensityMatrix> probes, double tolerance = 1e-12) {
  return energy_density_deviation(op, pairs, probes) <= tolerance;
}

/// Photon-added beamsplitter isometry on one-particle inputs: append mode 3
/// holding one photon, then apply exp(i pi/4 (a1* a3 + h.c.)).
inline FockState hom_isometry(const FockState& input) {
  require(input.modes() == 2, "hom_isometry: input must live on two modes");
  const auto appended = append_modes(input, {1});
  return apply_beamsplitter(appended, 0, 2, std::numbers::pi / 4, std::numbers::pi / 2);
}

/// Channel output tr_3 V rho V* for rho = |psi><psi|, psi = c1|1,0> + c2|0,1>.
inline DensityMatrix hom_channel_output(cplx c1, cplx c2) {
  require(std::abs(std::norm(c1) + std::norm(c2) - 1.0) <= tol::kNormalization,
          "hom_channel_output: |c1|^2 + |c2|^2 must equal 1");
  const FockState in(2, {{1, AmplitudeVector{c1, c2}}});
  const int keep[2] = {0, 1};
  return partial_trace(hom_isometry(in), keep);
}

}  // namespace fockcoh
