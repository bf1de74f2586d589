// JSON (de)serialization of states, density matrices and Kraus sets, and
// the "name:key=value,..." shorthand for named constructors.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fockcoh/common.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/freesets.hpp"
#include "fockcoh/states.hpp"

namespace fockcoh::io {

using nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2, "complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// {modes, sectors: [{N, amplitudes: [[re, im], ...]}], truncation, tail_mass_bound};
/// amplitudes follow sector_basis order.
inline json state_to_json(const FockState& psi) {
  json sectors = json::array();
  for (const auto& [n, amps] : psi.sectors()) {
    json a = json::array();
    for (const auto& z : amps) a.push_back(to_json(z));
    sectors.push_back({{"N", n}, {"amplitudes", std::move(a)}});
  }
  return {{"modes", psi.modes()},
          {"sectors", std::move(sectors)},
          {"truncation", psi.truncation()},
          {"tail_mass_bound", psi.tail_mass_bound()}};
}

/// Also accepts the output of `fockcoh state`, which nests the state under "state".
inline FockState state_from_json(const json& j) {
  if (j.contains("state") && !j.contains("sectors")) return state_from_json(j.at("state"));
  require(j.contains("modes") && j.contains("sectors"), "state JSON needs 'modes' and 'sectors'");
  std::map<int, AmplitudeVector> sectors;
  for (const auto& s : j.at("sectors")) {
    AmplitudeVector a;
    for (const auto& z : s.at("amplitudes")) a.push_back(complex_from_json(z));
    const int n = s.at("N").get<int>();
    require(!sectors.count(n), "state JSON repeats sector " + std::to_string(n));
    sectors.emplace(n, std::move(a));
  }
  return FockState(j.at("modes").get<int>(), std::move(sectors), j.value("tail_mass_bound", 0.0));
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  require(j.is_array(), "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    require(static_cast<Eigen::Index>(j[r].size()) == cols, "matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

/// {modes, density: {sectors: [N...], matrix: [[[re, im], ...], ...]}} over the
/// concatenated sector bases.
inline json density_to_json(const DensityMatrix& rho) {
  return {{"modes", rho.modes()}, {"density", {{"sectors", rho.sectors()}, {"matrix", matrix_to_json(rho.matrix())}}}};
}

inline DensityMatrix density_from_json(const json& j) {
  if (!j.contains("density")) return DensityMatrix::pure(state_from_json(j));
  require(j.contains("modes") && j.contains("density"), "density JSON needs 'modes' and 'density'");
  const auto& d = j.at("density");
  return DensityMatrix(j.at("modes").get<int>(), d.at("sectors").get<std::vector<int>>(), matrix_from_json(d.at("matrix")));
}

/// {kraus: [matrix, ...]}
inline std::vector<Eigen::MatrixXcd> kraus_from_json(const json& j) {
  require(j.contains("kraus") && j.at("kraus").is_array(), "Kraus JSON needs a 'kraus' array");
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& k : j.at("kraus")) out.push_back(matrix_from_json(k));
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

/// A named state. Indefinite-number states whose per-sector amplitudes are
/// uniform keep the compact form so large mean particle numbers stay usable.
struct NamedState {
  std::string name;
  std::map<std::string, std::string> params;
  std::optional<FockState> fock;
  std::optional<SectorUniformState> sector_uniform;

  const FockState& state() {
    if (!fock) fock = sector_uniform->to_fock();
    return *fock;
  }
  bool is_sector_uniform() const { return sector_uniform.has_value(); }
};

namespace detail {

inline std::map<std::string, std::string> parse_params(const std::string& s) {
  std::map<std::string, std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

class ParamReader {
 public:
  ParamReader(std::string name, const std::map<std::string, std::string>& p) : name_(std::move(name)), p_(p) {}

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    used_.push_back(key);
    const auto it = p_.find(key);
    if (it == p_.end()) {
      if (fallback) return *fallback;
      throw InvalidArgument(name_ + ": missing parameter '" + key + "'");
    }
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::logic_error&) {
      throw InvalidArgument(name_ + ": parameter '" + key + "' is not a number");
    }
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const double v = real(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument(name_ + ": parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& key) {
    used_.push_back(key);
    const auto it = p_.find(key);
    if (it == p_.end()) throw InvalidArgument(name_ + ": missing parameter '" + key + "'");
    return it->second;
  }

  void finish() const {
    for (const auto& [k, v] : p_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        throw InvalidArgument(name_ + ": unknown parameter '" + k + "'");
      }
    }
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>& p_;
  std::vector<std::string> used_;
};

}  // namespace detail

/// Names: fock:occ=2_0_1, bec:N=..,copies=.., mc:N=.., mc_copies:N=..,copies=..,
/// mc_tilde:N=.., phi:N=.., psi:theta=..,m=..,N=.., noon:N=.., pair:N=..,
/// hw:alpha=..,s1=..,s2=..[,nmax=..], hom_phi:c1=..,c2=..
inline NamedState parse_named_state(const std::string& spec) {
  const auto colon = spec.find(':');
  NamedState ns;
  ns.name = spec.substr(0, colon);
  ns.params = detail::parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));
  detail::ParamReader r(ns.name, ns.params);
  const auto& n = ns.name;
  if (n == "fock") {
    Occupation occ;
    std::stringstream ss(r.text("occ"));
    std::string tok;
    while (std::getline(ss, tok, '_')) {
      try {
        occ.push_back(std::stoi(tok));
      } catch (const std::logic_error&) {
        throw InvalidArgument("fock: bad occupation '" + tok + "'");
      }
    }
    ns.fock = FockState::basis_state(occ);
  } else if (n == "bec") {
    const int N = r.integer("N");
    ns.fock = bec(N, r.integer("copies", 1));
  } else if (n == "mc") {
    ns.fock = mc(r.integer("N"));
  } else if (n == "mc_copies") {
    const int N = r.integer("N");
    ns.fock = mc_bosonic_copies(N, r.integer("copies"));
  } else if (n == "mc_tilde") {
    ns.sector_uniform = mc_tilde_sector_uniform(r.integer("N"));
  } else if (n == "phi") {
    ns.sector_uniform = phi_sector_uniform(r.integer("N"));
  } else if (n == "psi") {
    PsiParams p;
    p.theta = r.real("theta", std::numbers::pi / 4);
    p.m = r.integer("m");
    p.N = r.integer("N");
    ns.fock = psi(p);
  } else if (n == "noon") {
    ns.fock = noon(r.integer("N"));
  } else if (n == "pair") {
    ns.fock = pair_correlated(r.integer("N"));
  } else if (n == "hw") {
    const double a = r.real("alpha");
    const double s1 = r.real("s1", 1.0), s2 = r.real("s2", 0.0);
    const double norm = std::hypot(s1, s2);
    require(norm > 0.0, "hw: spinor must be nonzero");
    ns.fock = hw_coherent(a, s1 / norm, s2 / norm, r.integer("nmax", -1));
  } else if (n == "hom_phi") {
    const double c1 = r.real("c1");
    ns.fock = hom_phi(c1, r.real("c2"));
  } else {
    throw InvalidArgument("unknown state name '" + n + "'");
  }
  r.finish();
  return ns;
}

/// A named spec, or a path to a state JSON file.
inline NamedState load_state(const std::string& spec) {
  if (!std::ifstream(spec)) return parse_named_state(spec);
  NamedState ns;
  ns.name = "file";
  ns.params["path"] = spec;
  ns.fock = state_from_json(read_json_file(spec));
  return ns;
}

inline json membership_to_json(const MembershipReport& r) {
  json ev = json::object();
  if (r.delta_a) {
    ev["max_off_diagonal"] = r.delta_a->max_off_diagonal;
    ev["off_diagonal_mass"] = r.delta_a->off_diagonal_mass;
  }
  if (r.delta_b) {
    const auto& b = *r.delta_b;
    ev["particles"] = b.particles;
    ev["spin_variance_residual"] = b.spin_variance_residual;
    ev["axis"] = b.axis;
    ev["axis_eigenvalue"] = b.axis_eigenvalue;
    ev["occupations"] = {b.n1, b.n2};
    ev["distinct_directions"] = b.distinct_directions;
    json dirs = json::array();
    for (const auto& d : b.directions) dirs.push_back({to_json(d[0]), to_json(d[1])});
    ev["directions"] = std::move(dirs);
    ev["orthogonality_residual"] = b.orthogonality_residual;
    ev["reconstruction_residual"] = b.reconstruction_residual ? json(*b.reconstruction_residual) : json(nullptr);
    json roots = json::array();
    for (const auto& c : b.roots) {
      roots.push_back({{"root", c.at_infinity ? json("infinity") : to_json(c.root)}, {"multiplicity", c.multiplicity}});
    }
    ev["root_clusters"] = std::move(roots);
    ev["root_orthogonality"] = b.root_orthogonality ? json(*b.root_orthogonality) : json(nullptr);
  }
  if (r.kraus) {
    ev["completeness_residual"] = r.kraus->completeness_residual;
    ev["max_nonzeros_per_column"] = r.kraus->max_nonzeros_per_column;
    ev["offending_operator"] = r.kraus->offending_operator;
  }
  return {{"verdict", r.verdict}, {"uncertain", r.uncertain}, {"tolerance_used", r.tolerance_used}, {"evidence", ev}};
}

}  // namespace fockcoh::io
