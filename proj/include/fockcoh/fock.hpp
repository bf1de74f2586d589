// Bosonic Fock space on M modes: occupation bases, pure states, density
// matrices, linear-optical mode transformations and partial traces.
//
// Basis ordering ("colex"). Inside the particle-number sector N of M modes,
// occupation vectors (m_1, ..., m_M) are ordered lexicographically on the
// reversed tail (m_M, m_{M-1}, ..., m_2), with m_1 = N - sum(rest). For two
// modes index k labels |N-k, k>, i.e. k counts particles in the second mode.
// Mode indices in the C++ API are 0-based.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fockcoh/common.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/probability.hpp"

namespace fockcoh {

using cplx = std::complex<double>;
using Occupation = std::vector<int>;
using AmplitudeVector = std::vector<cplx>;

inline int total(const Occupation& occ) { return std::accumulate(occ.begin(), occ.end(), 0); }

/// C(N+M-1, M-1), exact. Throws ResourceLimit when it does not fit 64 bits.
inline std::uint64_t sector_dimension(int modes, int particles) {
  require(modes >= 1, "sector_dimension: need at least one mode");
  require(particles >= 0, "sector_dimension: negative particle number");
  const std::uint64_t k = static_cast<std::uint64_t>(modes - 1);
  const std::uint64_t n = static_cast<std::uint64_t>(particles) + k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw ResourceLimit("sector dimension overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

namespace detail {
inline void enumerate_tail(int pos, int remaining, Occupation& cur, std::vector<Occupation>& out) {
  if (pos == 0) {
    cur[0] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    enumerate_tail(pos - 1, remaining - v, cur, out);
  }
  cur[pos] = 0;
}
}  // namespace detail

/// All occupation vectors of the sector in colex order.
inline std::vector<Occupation> sector_basis(int modes, int particles) {
  const auto dim = sector_dimension(modes, particles);
  std::vector<Occupation> out;
  out.reserve(dim);
  Occupation cur(modes, 0);
  detail::enumerate_tail(modes - 1, particles, cur, out);
  return out;
}

/// Position of occ inside its sector basis.
inline std::size_t sector_index(const Occupation& occ) {
  const int modes = static_cast<int>(occ.size());
  int remaining = total(occ);
  std::uint64_t rank = 0;
  for (int p = modes - 1; p >= 1; --p) {
    for (int v = 0; v < occ[p]; ++v) rank += sector_dimension(p, remaining - v);
    remaining -= occ[p];
  }
  return static_cast<std::size_t>(rank);
}

/// Pure state on M modes with dense amplitudes per particle-number sector.
///
/// Indefinite-number states are truncated; tail_mass_bound() records an
/// analytic bound on the discarded probability, so the stored norm lies in
/// [1 - tail_mass_bound, 1].
class FockState {
 public:
  FockState() = default;

  FockState(int modes, std::map<int, AmplitudeVector> sectors, double tail_mass_bound = 0.0)
      : modes_(modes), sectors_(std::move(sectors)), tail_mass_bound_(tail_mass_bound) {
    require(modes_ >= 1, "FockState: need at least one mode");
    require(tail_mass_bound_ >= 0.0, "FockState: negative tail mass bound");
    for (const auto& [n, amps] : sectors_) {
      require(n >= 0, "FockState: negative sector");
      require(amps.size() == sector_dimension(modes_, n), "FockState: sector " + std::to_string(n) +
                                                              " has wrong amplitude count");
    }
  }

  static FockState basis_state(const Occupation& occ) {
    require(!occ.empty(), "basis_state: empty occupation vector");
    for (int c : occ) require(c >= 0, "basis_state: negative occupation");
    const int n = total(occ);
    AmplitudeVector amps(sector_dimension(static_cast<int>(occ.size()), n));
    amps[sector_index(occ)] = 1.0;
    return FockState(static_cast<int>(occ.size()), {{n, std::move(amps)}});
  }

  static FockState vacuum(int modes) { return basis_state(Occupation(modes, 0)); }

  int modes() const { return modes_; }
  const std::map<int, AmplitudeVector>& sectors() const { return sectors_; }
  double tail_mass_bound() const { return tail_mass_bound_; }
  /// Largest materialized particle number, -1 for the zero vector.
  int truncation() const { return sectors_.empty() ? -1 : sectors_.rbegin()->first; }

  bool has_sector(int n) const { return sectors_.count(n) > 0; }
  const AmplitudeVector& sector(int n) const {
    auto it = sectors_.find(n);
    if (it == sectors_.end()) throw UndefinedSector("sector " + std::to_string(n) + " not present");
    return it->second;
  }

  double sector_weight(int n) const {
    auto it = sectors_.find(n);
    if (it == sectors_.end()) return 0.0;
    KahanSum s;
    for (const auto& a : it->second) s.add(std::norm(a));
    return s.value();
  }

  double norm_squared() const {
    KahanSum s;
    for (const auto& [n, amps] : sectors_) {
      for (const auto& a : amps) s.add(std::norm(a));
    }
    return s.value();
  }

  /// Sectors holding nonzero amplitude.
  std::vector<int> occupied_sectors(double threshold = 0.0) const {
    std::vector<int> out;
    for (const auto& [n, amps] : sectors_) {
      if (sector_weight(n) > threshold) out.push_back(n);
    }
    return out;
  }

  cplx amplitude(const Occupation& occ) const {
    require(static_cast<int>(occ.size()) == modes_, "amplitude: occupation length differs from mode count");
    auto it = sectors_.find(total(occ));
    if (it == sectors_.end()) return 0.0;
    return it->second[sector_index(occ)];
  }

  /// Calls f(occupation, amplitude) for every stored entry, sector by sector.
  template <class F>
  void for_each(F&& f) const {
    for (const auto& [n, amps] : sectors_) {
      const auto basis = sector_basis(modes_, n);
      for (std::size_t i = 0; i < amps.size(); ++i) f(basis[i], amps[i]);
    }
  }

  FockState scaled(cplx factor) const {
    auto s = sectors_;
    for (auto& [n, amps] : s) {
      for (auto& a : amps) a *= factor;
    }
    return FockState(modes_, std::move(s), tail_mass_bound_);
  }

 private:
  int modes_ = 1;
  std::map<int, AmplitudeVector> sectors_;
  double tail_mass_bound_ = 0.0;
};

/// Hermitian operator on a direct sum of full particle-number sectors.
///
/// The basis is the concatenation of the listed sectors (ascending) in colex
/// order. Cross-sector entries are allowed, which covers reductions of
/// indefinite-number states; number-conserving inputs give block-diagonal
/// matrices.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  DensityMatrix(int modes, std::vector<int> sectors, Eigen::MatrixXcd rho)
      : modes_(modes), sectors_(std::move(sectors)), rho_(std::move(rho)) {
    require(modes_ >= 1, "DensityMatrix: need at least one mode");
    std::sort(sectors_.begin(), sectors_.end());
    sectors_.erase(std::unique(sectors_.begin(), sectors_.end()), sectors_.end());
    std::size_t off = 0;
    for (int n : sectors_) {
      const auto b = sector_basis(modes_, n);
      offsets_[n] = {off, b.size()};
      off += b.size();
      basis_.insert(basis_.end(), b.begin(), b.end());
    }
    require(rho_.rows() == static_cast<Eigen::Index>(off) && rho_.cols() == static_cast<Eigen::Index>(off),
            "DensityMatrix: matrix size does not match sector bases");
  }

  /// |psi><psi|. Throws ResourceLimit above 4096 basis states.
  static DensityMatrix pure(const FockState& psi) {
    std::vector<int> sectors;
    std::size_t dim = 0;
    for (const auto& [n, amps] : psi.sectors()) {
      sectors.push_back(n);
      dim += amps.size();
    }
    if (dim > 4096) throw ResourceLimit("density matrix of dimension " + std::to_string(dim) + " exceeds 4096");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    Eigen::Index i = 0;
    for (const auto& [n, amps] : psi.sectors()) {
      for (const auto& a : amps) v(i++) = a;
    }
    return DensityMatrix(psi.modes(), std::move(sectors), v * v.adjoint());
  }

  /// Block-diagonal operator from per-sector blocks.
  static DensityMatrix from_blocks(int modes, const std::map<int, Eigen::MatrixXcd>& blocks) {
    std::vector<int> sectors;
    Eigen::Index dim = 0;
    for (const auto& [n, b] : blocks) {
      sectors.push_back(n);
      dim += b.rows();
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::Index off = 0;
    for (const auto& [n, b] : blocks) {
      require(b.rows() == b.cols() && static_cast<std::uint64_t>(b.rows()) == sector_dimension(modes, n),
              "from_blocks: block " + std::to_string(n) + " has wrong size");
      rho.block(off, off, b.rows(), b.cols()) = b;
      off += b.rows();
    }
    return DensityMatrix(modes, std::move(sectors), std::move(rho));
  }

  int modes() const { return modes_; }
  const std::vector<int>& sectors() const { return sectors_; }
  const std::vector<Occupation>& basis() const { return basis_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::Index dimension() const { return rho_.rows(); }

  std::size_t index_of(const Occupation& occ) const {
    auto it = offsets_.find(total(occ));
    if (it == offsets_.end()) throw UndefinedSector("occupation outside the stored sectors");
    return it->second.first + sector_index(occ);
  }

  Eigen::MatrixXcd block(int n) const {
    auto it = offsets_.find(n);
    if (it == offsets_.end()) throw UndefinedSector("sector " + std::to_string(n) + " not present");
    const auto [off, len] = it->second;
    return rho_.block(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(off),
                      static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
  }

  double sector_weight(int n) const {
    if (!offsets_.count(n)) return 0.0;
    return block(n).trace().real();
  }

  double trace() const { return rho_.trace().real(); }

  double min_eigenvalue() const {
    if (rho_.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Largest magnitude of an entry coupling two different sectors.
  double cross_sector_magnitude() const {
    double mx = 0.0;
    for (Eigen::Index r = 0; r < rho_.rows(); ++r) {
      for (Eigen::Index c = 0; c < rho_.cols(); ++c) {
        if (total(basis_[r]) != total(basis_[c])) mx = std::max(mx, std::abs(rho_(r, c)));
      }
    }
    return mx;
  }

  double hermiticity_residual() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

 private:
  int modes_ = 1;
  std::vector<int> sectors_;
  std::vector<Occupation> basis_;
  std::map<int, std::pair<std::size_t, std::size_t>> offsets_;
  Eigen::MatrixXcd rho_;
};

namespace detail {
inline void check_subset(int modes, std::span<const int> subset) {
  for (int m : subset) require(m >= 0 && m < modes, "mode index " + std::to_string(m) + " out of range");
}
}  // namespace detail

/// Expected number of particles in the given modes. Empty subset gives 0.
inline double expected_particle_number(const FockState& psi, std::span<const int> subset) {
  detail::check_subset(psi.modes(), subset);
  KahanSum s;
  psi.for_each([&](const Occupation& occ, cplx a) {
    int c = 0;
    for (int m : subset) c += occ[m];
    if (c != 0) s.add(std::norm(a) * c);
  });
  return s.value();
}

inline double expected_particle_number(const DensityMatrix& rho, std::span<const int> subset) {
  detail::check_subset(rho.modes(), subset);
  KahanSum s;
  for (Eigen::Index i = 0; i < rho.dimension(); ++i) {
    int c = 0;
    for (int m : subset) c += rho.basis()[i][m];
    if (c != 0) s.add(rho.matrix()(i, i).real() * c);
  }
  return s.value();
}

inline std::vector<int> all_modes(int modes) {
  std::vector<int> v(modes);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

/// Applies the number-conserving linear map on creation operators
///   a*_{modes[c]} -> sum_r w(r, c) a*_{modes[r]}
/// to every sector of psi. Each sector is re-expanded exactly by multiplying
/// out the transformed monomials. Amplitudes involve binomial sums with
/// alternating phases, so double precision is reliable up to a few dozen
/// particles; larger sectors are refused.
inline FockState apply_mode_transform(const FockState& psi, std::span<const int> modes,
                                      const Eigen::MatrixXcd& w) {
  const int k = static_cast<int>(modes.size());
  require(k >= 1 && w.rows() == k && w.cols() == k, "apply_mode_transform: matrix size differs from mode list");
  detail::check_subset(psi.modes(), modes);
  {
    std::set<int> uniq(modes.begin(), modes.end());
    require(static_cast<int>(uniq.size()) == k, "apply_mode_transform: repeated mode index");
  }
  if (psi.truncation() > 160) throw ResourceLimit("apply_mode_transform: sectors above 160 particles unsupported");

  // Expanded polynomial of prod_c (sum_r w(r,c) x_r)^{n_c}, keyed by the input pattern n.
  using Poly = std::map<Occupation, cplx>;
  std::map<Occupation, Poly> cache;
  auto expand = [&](const Occupation& n) -> const Poly& {
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Poly p{{Occupation(k, 0), 1.0}};
    for (int c = 0; c < k; ++c) {
      for (int t = 0; t < n[c]; ++t) {
        Poly next;
        for (const auto& [mono, coef] : p) {
          for (int r = 0; r < k; ++r) {
            if (w(r, c) == 0.0) continue;
            Occupation m2 = mono;
            ++m2[r];
            next[m2] += coef * w(r, c);
          }
        }
        p = std::move(next);
      }
    }
    return cache.emplace(n, std::move(p)).first->second;
  };

  std::map<int, AmplitudeVector> out;
  for (const auto& [sector, amps] : psi.sectors()) {
    const auto basis = sector_basis(psi.modes(), sector);
    AmplitudeVector res(amps.size(), 0.0);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (amps[i] == 0.0) continue;
      Occupation n(k);
      double log_in = 0.0;
      for (int c = 0; c < k; ++c) {
        n[c] = basis[i][modes[c]];
        log_in += log_factorial(n[c]);
      }
      for (const auto& [mono, coef] : expand(n)) {
        Occupation occ = basis[i];
        double log_out = 0.0;
        for (int r = 0; r < k; ++r) {
          occ[modes[r]] = mono[r];
          log_out += log_factorial(mono[r]);
        }
        res[sector_index(occ)] += amps[i] * coef * std::exp(0.5 * (log_out - log_in));
      }
    }
    out.emplace(sector, std::move(res));
  }
  return FockState(psi.modes(), std::move(out), psi.tail_mass_bound());
}

/// Beamsplitter U = exp(theta (e^{i phase} a*_i a_j - e^{-i phase} a*_j a_i)),
/// acting on creation operators as
///   a*_i -> cos(theta) a*_i - e^{-i phase} sin(theta) a*_j
///   a*_j -> e^{i phase} sin(theta) a*_i + cos(theta) a*_j.
/// theta = pi/4, phase = pi/2 gives exp(i pi/4 (a*_i a_j + h.c.)).
inline FockState apply_beamsplitter(const FockState& psi, int i, int j, double theta, double phase) {
  require(i != j, "apply_beamsplitter: modes must differ");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx e = std::polar(1.0, phase);
  Eigen::MatrixXcd w(2, 2);
  w << c, e * s, -std::conj(e) * s, c;
  const int modes[2] = {i, j};
  return apply_mode_transform(psi, modes, w);
}

/// Single-particle unitary u in U(M) lifted to Fock space: a*_c -> sum_r u(r,c) a*_r.
class LinearOpticalUnitary {
 public:
  explicit LinearOpticalUnitary(Eigen::MatrixXcd u) : u_(std::move(u)) {
    require(u_.rows() == u_.cols() && u_.rows() >= 1, "LinearOpticalUnitary: matrix must be square");
    const double dev = (u_.adjoint() * u_ - Eigen::MatrixXcd::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
    require(dev < 1e-10, "LinearOpticalUnitary: matrix is not unitary");
  }

  static LinearOpticalUnitary identity(int modes) {
    return LinearOpticalUnitary(Eigen::MatrixXcd::Identity(modes, modes));
  }

  const Eigen::MatrixXcd& matrix() const { return u_; }
  int modes() const { return static_cast<int>(u_.rows()); }

  FockState apply(const FockState& psi) const {
    require(psi.modes() == modes(), "LinearOpticalUnitary: mode count mismatch");
    const auto m = all_modes(modes());
    return apply_mode_transform(psi, m, u_);
  }

 private:
  Eigen::MatrixXcd u_;
};

/// Haar-distributed element of U(M) lifted to every sector. Deterministic in
/// the seed: QR of a complex Ginibre matrix with the R-diagonal phases
/// divided out.
inline LinearOpticalUnitary random_number_conserving_unitary(int modes, std::uint64_t seed) {
  require(modes >= 1, "random_number_conserving_unitary: need at least one mode");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd z(modes, modes);
  for (int r = 0; r < modes; ++r) {
    for (int c = 0; c < modes; ++c) z(r, c) = cplx(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < modes; ++c) {
    const cplx d = r(c, c);
    const cplx ph = std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0);
    q.col(c) *= ph;
  }
  return LinearOpticalUnitary(q);
}

/// Appends modes holding the Fock state `extra`: |m> -> |m, extra>.
inline FockState append_modes(const FockState& psi, const Occupation& extra) {
  require(!extra.empty(), "append_modes: nothing to append");
  for (int c : extra) require(c >= 0, "append_modes: negative occupation");
  const int new_modes = psi.modes() + static_cast<int>(extra.size());
  const int added = total(extra);
  std::map<int, AmplitudeVector> out;
  for (const auto& [n, amps] : psi.sectors()) {
    const auto basis = sector_basis(psi.modes(), n);
    AmplitudeVector res(sector_dimension(new_modes, n + added), 0.0);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      Occupation occ = basis[i];
      occ.insert(occ.end(), extra.begin(), extra.end());
      res[sector_index(occ)] = amps[i];
    }
    out.emplace(n + added, std::move(res));
  }
  return FockState(new_modes, std::move(out), psi.tail_mass_bound());
}

namespace detail {
inline std::vector<int> normalize_keep(int modes, std::span<const int> keep) {
  require(!keep.empty(), "partial_trace: keep set is empty");
  check_subset(modes, keep);
  std::vector<int> k(keep.begin(), keep.end());
  std::sort(k.begin(), k.end());
  require(std::adjacent_find(k.begin(), k.end()) == k.end(), "partial_trace: repeated mode index");
  return k;
}

inline std::pair<Occupation, Occupation> split(const Occupation& occ, const std::vector<int>& keep) {
  Occupation kept, env;
  std::size_t p = 0;
  for (int m = 0; m < static_cast<int>(occ.size()); ++m) {
    if (p < keep.size() && keep[p] == m) {
      kept.push_back(occ[m]);
      ++p;
    } else {
      env.push_back(occ[m]);
    }
  }
  return {kept, env};
}

/// Reduced-state layout: every kept-mode total that occurs, full sectors.
struct ReducedLayout {
  std::vector<int> sectors;
  std::map<int, std::size_t> offset;
  std::size_t dim = 0;

  std::size_t index(const Occupation& kept) const { return offset.at(total(kept)) + sector_index(kept); }
};

inline ReducedLayout make_layout(int kept_modes, const std::set<int>& totals) {
  ReducedLayout l;
  for (int n : totals) {
    l.sectors.push_back(n);
    l.offset[n] = l.dim;
    l.dim += sector_dimension(kept_modes, n);
  }
  return l;
}
}  // namespace detail

/// Reduced state on the kept modes. Keeping every mode returns |psi><psi|.
inline DensityMatrix partial_trace(const FockState& psi, std::span<const int> keep) {
  const auto k = detail::normalize_keep(psi.modes(), keep);
  if (static_cast<int>(k.size()) == psi.modes()) return DensityMatrix::pure(psi);

  std::set<int> totals;
  std::map<Occupation, std::vector<std::pair<Occupation, cplx>>> by_env;
  psi.for_each([&](const Occupation& occ, cplx a) {
    auto [kept, env] = detail::split(occ, k);
    totals.insert(total(kept));
    if (a != 0.0) by_env[env].emplace_back(std::move(kept), a);
  });
  const auto layout = detail::make_layout(static_cast<int>(k.size()), totals);
  if (layout.dim > 4096) throw ResourceLimit("partial_trace: reduced dimension exceeds 4096");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(layout.dim, layout.dim);
  for (const auto& [env, entries] : by_env) {
    for (const auto& [ka, a] : entries) {
      const auto ia = layout.index(ka);
      for (const auto& [kb, b] : entries) rho(ia, layout.index(kb)) += a * std::conj(b);
    }
  }
  return DensityMatrix(static_cast<int>(k.size()), layout.sectors, std::move(rho));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const auto k = detail::normalize_keep(rho.modes(), keep);
  if (static_cast<int>(k.size()) == rho.modes()) return rho;

  std::set<int> totals;
  std::vector<std::pair<Occupation, Occupation>> parts;
  parts.reserve(rho.basis().size());
  for (const auto& occ : rho.basis()) {
    parts.push_back(detail::split(occ, k));
    totals.insert(total(parts.back().first));
  }
  const auto layout = detail::make_layout(static_cast<int>(k.size()), totals);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(layout.dim, layout.dim);
  const auto d = rho.dimension();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (parts[a].second != parts[b].second) continue;
      out(layout.index(parts[a].first), layout.index(parts[b].first)) += rho.matrix()(a, b);
    }
  }
  return DensityMatrix(static_cast<int>(k.size()), layout.sectors, std::move(out));
}

/// Fock-basis dephasing: the diagonal as a distribution over occupation vectors.
/// Zero-probability outcomes are omitted.
inline ProbabilityTable dephase_fock(const FockState& psi) {
  std::vector<Label> labels;
  std::vector<LogWeight> w;
  psi.for_each([&](const Occupation& occ, cplx a) {
    const double p = std::norm(a);
    if (p > 0.0) {
      labels.push_back(occ);
      w.push_back(LogWeight::from_double(p));
    }
  });
  return ProbabilityTable(std::move(labels), std::move(w));
}

inline ProbabilityTable dephase_fock(const DensityMatrix& rho) {
  std::vector<Label> labels;
  std::vector<LogWeight> w;
  for (Eigen::Index i = 0; i < rho.dimension(); ++i) {
    const double p = rho.matrix()(i, i).real();
    if (p > 0.0) {
      labels.push_back(rho.basis()[i]);
      w.push_back(LogWeight::from_double(p));
    }
  }
  return ProbabilityTable(std::move(labels), std::move(w));
}

/// Fock-basis dephased operator (off-diagonal entries dropped).
inline DensityMatrix dephased_matrix(const DensityMatrix& rho) {
  Eigen::MatrixXcd d = rho.matrix().diagonal().asDiagonal();
  return DensityMatrix(rho.modes(), rho.sectors(), std::move(d));
}

}  // namespace fockcoh
