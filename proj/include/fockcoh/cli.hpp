// Command-line front end. run() is the whole program minus main(), so tests
// can drive it with captured streams.
//
// Exit codes: 0 ok, 2 bad arguments, 3 resource guard, 1 internal failure.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fockcoh/coherence.hpp"
#include "fockcoh/common.hpp"
#include "fockcoh/distill.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/freesets.hpp"
#include "fockcoh/io.hpp"
#include "fockcoh/optimize.hpp"
#include "fockcoh/protocol.hpp"
#include "fockcoh/states.hpp"

namespace fockcoh::cli {

using nlohmann::json;

namespace detail {

/// Integral values are emitted as JSON integers.
inline json count_json(double x) {
  if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
  return x;
}

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

/// Result of one subcommand: metadata plus either a JSON body or CSV rows.
struct Output {
  json meta;
  json body = json::object();
  std::string csv_header;
  std::vector<std::vector<std::string>> rows;
  bool csv = false;

  std::string render() const {
    if (!csv) {
      json j = meta;
      j.update(body);
      return j.dump(2) + "\n";
    }
    std::string s = "# " + meta.dump() + "\n" + csv_header + "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += "\n";
    }
    return s;
  }
};

struct Common {
  std::uint64_t seed = 1;
  std::string out_path;
  int threads = 1;
  bool csv = false;
};

inline void add_common(CLI::App* sub, Common& c, bool csv_flag) {
  sub->add_option("--seed", c.seed, "random seed recorded in the output")->capture_default_str();
  sub->add_option("--out", c.out_path, "write output to this file instead of stdout");
  sub->add_option("--threads", c.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  if (csv_flag) sub->add_flag("--csv", c.csv, "emit CSV instead of JSON");
}

inline json meta(const std::string& cmd, const Common& c, json params) {
  return {{"version", kVersion}, {"command", cmd}, {"seed", c.seed}, {"parameters", std::move(params)}};
}

inline json rate_json(const RateReport& r) {
  return {{"rate", r.rate},
          {"numerator_bits", r.numerator_bits},
          {"denominator_bits", r.denominator_bits},
          {"context", to_string(r.context)}};
}

inline int single_sector(const FockState& psi) {
  const auto occ = psi.occupied_sectors();
  if (occ.size() != 1) throw InvalidArgument("state must be supported on exactly one particle-number sector");
  return occ.front();
}

/// Nominal mean particle number: the declared N of phi / mc_tilde, else the
/// expectation over the stored (truncated) state.
inline double mean_particles(io::NamedState& s) {
  if (s.is_sector_uniform()) {
    if (s.params.count("N")) return std::stod(s.params.at("N"));
    return s.sector_uniform->expected_particle_number();
  }
  return expected_particle_number(s.state(), all_modes(s.state().modes()));
}

// ---- subcommands -------------------------------------------------------

inline Output cmd_state(const std::string& spec, const Common& c) {
  auto s = io::load_state(spec);
  const auto& psi = s.state();
  Output o;
  o.meta = meta("state", c, {{"name", spec}});
  o.body["state"] = io::state_to_json(psi);
  o.body["expected_particle_number"] = expected_particle_number(psi, all_modes(psi.modes()));
  o.body["norm_squared"] = psi.norm_squared();
  return o;
}

inline Output cmd_coherence(const std::string& spec, const std::string& measure, std::optional<int> sector,
                            const Common& c) {
  auto s = io::load_state(spec);
  Output o;
  json params = {{"state", spec}, {"measure", measure}};
  double value = 0.0;
  if (measure == "CN") {
    int n = 0;
    if (sector) {
      n = *sector;
    } else if (s.is_sector_uniform()) {
      throw InvalidArgument("CN on an indefinite-number state needs --sector");
    } else {
      n = single_sector(s.state());
    }
    params["sector"] = n;
    if (s.is_sector_uniform()) {
      const auto& w = s.sector_uniform->weights;
      if (n < 0 || n >= static_cast<int>(w.size()) || !(w[n] > 1e-15)) {
        throw UndefinedSector("sector " + std::to_string(n) + " carries no weight");
      }
      value = std::log2(n + 1.0);
    } else {
      value = sector_coherence(s.state(), n);
    }
    o.body["sector"] = n;
  } else if (measure == "C") {
    value = s.is_sector_uniform() ? weighted_coherence(*s.sector_uniform) : weighted_coherence(s.state());
  } else {
    value = s.is_sector_uniform() ? total_coherence(*s.sector_uniform) : total_coherence(s.state());
  }
  o.meta = meta("coherence", c, params);
  o.body["measure"] = measure;
  o.body["value_bits"] = value;
  return o;
}

inline Output cmd_membership(const std::string& test, const std::string& in_path, const std::string& spec,
                             std::optional<double> tol, const Common& c) {
  if (in_path.empty() == spec.empty()) throw InvalidArgument("membership needs exactly one of --in or --state");
  json params = {{"test", test}};
  if (!in_path.empty()) params["in"] = in_path;
  if (!spec.empty()) params["state"] = spec;
  MembershipReport rep;
  if (test == "krausA") {
    if (in_path.empty()) throw InvalidArgument("krausA reads a Kraus set from --in");
    const auto k = io::kraus_from_json(io::read_json_file(in_path));
    rep = kraus_in_e_a(k, tol.value_or(1e-10));
  } else {
    std::optional<DensityMatrix> rho;
    std::optional<FockState> psi;
    if (!in_path.empty()) {
      const auto j = io::read_json_file(in_path);
      if (j.contains("density")) {
        rho = io::density_from_json(j);
      } else {
        psi = io::state_from_json(j);
      }
    } else {
      auto s = io::load_state(spec);
      psi = s.state();
    }
    if (test == "deltaA") {
      rep = is_delta_a(rho ? *rho : DensityMatrix::pure(*psi), tol.value_or(1e-10));
    } else {
      rep = rho ? pure_in_delta_b(*rho, tol.value_or(1e-6)) : pure_in_delta_b(*psi, tol.value_or(1e-6));
    }
  }
  params["tolerance"] = rep.tolerance_used;
  Output o;
  o.meta = meta("membership", c, params);
  o.body = io::membership_to_json(rep);
  return o;
}

inline Output cmd_rate(const std::string& protocol, const std::vector<double>& Ns, const std::string& spec,
                       const Common& c) {
  json params = {{"protocol", protocol}};
  std::vector<std::pair<double, RateReport>> res;
  if (protocol == "bec") {
    if (Ns.empty()) throw InvalidArgument("rate --protocol bec needs --N");
    for (double N : Ns) {
      if (N != std::floor(N)) throw InvalidArgument("rate --protocol bec needs integer N");
      res.emplace_back(N, rate_bec(static_cast<int>(N)));
    }
    json ns = json::array();
    for (double N : Ns) ns.push_back(count_json(N));
    params["N"] = std::move(ns);
  } else {
    if (spec.empty()) throw InvalidArgument("rate --protocol " + protocol + " needs --state");
    params["state"] = spec;
    auto s = io::load_state(spec);
    if (protocol == "pure") {
      if (s.is_sector_uniform()) throw InvalidArgument("rate --protocol pure needs a fixed-particle-number state");
      const int N = single_sector(s.state());
      res.emplace_back(N, rate_mc_from_pure(s.state(), N));
    } else {
      if (Ns.size() > 1) throw InvalidArgument("rate --protocol indefinite takes a single --N");
      const double N = Ns.empty() ? mean_particles(s) : Ns.front();
      params["N"] = count_json(N);
      if (s.is_sector_uniform()) {
        res.emplace_back(N, rate_indefinite(*s.sector_uniform, N));
      } else {
        res.emplace_back(N, rate_indefinite(s.state(), N));
      }
    }
  }
  Output o;
  o.meta = meta("rate", c, params);
  o.csv = c.csv;
  o.csv_header = "N [particles],rate [dimensionless],numerator [bits],denominator [bits]";
  for (const auto& [N, r] : res) o.rows.push_back({num(N), num(r.rate), num(r.numerator_bits), num(r.denominator_bits)});
  if (res.size() == 1) {
    o.body = rate_json(res.front().second);
    o.body["N"] = count_json(res.front().first);
  } else {
    json arr = json::array();
    for (const auto& [N, r] : res) {
      auto j = rate_json(r);
      j["N"] = count_json(N);
      arr.push_back(std::move(j));
    }
    o.body["results"] = std::move(arr);
  }
  return o;
}

inline Output cmd_simulate(const std::string& spec, std::int64_t n, std::int64_t shots, bool exact,
                           std::optional<int> dim, const Common& c) {
  auto s = io::load_state(spec);
  const auto& psi = s.state();
  if (psi.modes() != 2) throw InvalidArgument("simulate expects a two-mode state");
  const auto p = single_copy_distribution(psi);
  int target = 0;
  const auto occ = psi.occupied_sectors();
  if (dim) {
    target = *dim;
  } else if (occ.size() == 1) {
    target = occ.front() + 1;
  } else {
    const double N = std::round(mean_particles(s));
    target = static_cast<int>((2.0 * N + 1.0) * (N + 1.0));
  }
  if (target < 2) throw InvalidArgument("target dimension must be at least 2; pass --dim");
  const auto rep = exact ? simulate_exact(p, n, target) : simulate(p, n, shots, target, c.seed, c.threads);
  json params = {{"state", spec}, {"n", n}, {"target_dim", target}, {"exact", exact}};
  if (!exact) params["shots"] = shots;
  Output o;
  o.meta = meta("simulate", c, params);
  o.csv = c.csv;
  o.body = {{"analytic_rate", rep.analytic_rate},
            {"empirical_rate", rep.empirical_rate},
            {"stderr", rep.stderr_rate},
            {"mean_copies", rep.mean_copies},
            {"mean_success", rep.mean_success},
            {"mean_particles_per_pair", rep.mean_particles_per_pair},
            {"particles_stderr", rep.particles_stderr},
            {"truncation_mass", rep.truncation_mass}};
  o.csv_header =
      "n [copies],analytic_rate [dimensionless],empirical_rate [dimensionless],stderr [dimensionless],"
      "mean_success [probability],mean_particles_per_pair [particles]";
  o.rows.push_back({std::to_string(n), num(rep.analytic_rate), num(rep.empirical_rate), num(rep.stderr_rate),
                    num(rep.mean_success), num(rep.mean_particles_per_pair)});
  return o;
}

inline std::vector<int> parse_m_list(const std::string& s, int N) {
  if (s == "all") return default_m_values(N);
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw InvalidArgument("--m expects 'all' or a comma list of integers, got '" + s + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("--m list is empty");
  return out;
}

inline Output cmd_sweep(int N, const std::string& m_spec, int theta_points, const Common& c) {
  const auto ms = parse_m_list(m_spec, N);
  const auto res = sweep_psi(N, default_theta_grid(theta_points), ms, c.threads);
  Output o;
  const auto& b = res.best();
  o.meta = meta("sweep", c, {{"N", N}, {"m", m_spec}, {"theta_points", theta_points}});
  o.meta["argmax"] = {{"theta", b.theta}, {"m", b.m}, {"C_bits", b.coherence_bits}};
  if (res.refined_theta) o.meta["argmax"]["refined_theta"] = *res.refined_theta;
  o.csv = true;
  o.csv_header = "N [particles],theta [rad],m [particles],C_bits [bits],rate [dimensionless]";
  for (const auto& g : res.grid) {
    o.rows.push_back({std::to_string(N), num(g.theta), std::to_string(g.m), num(g.coherence_bits), num(g.rate)});
  }
  return o;
}

inline Output cmd_fig2(int n_max, int step, int n_min, const Common& c) {
  if (step < 2 || step % 2 != 0) throw InvalidArgument("fig2: --step must be even and at least 2");
  if (n_min <= 0) n_min = step;
  if (n_min % 2 != 0) throw InvalidArgument("fig2: --Nmin must be even");
  if (n_max < n_min) throw InvalidArgument("fig2: --Nmax below the first N");
  if (n_max > kMaxSweepN) throw ResourceLimit("fig2: N above 4000");
  std::vector<int> Ns;
  for (int N = n_min; N <= n_max; N += step) Ns.push_back(N);
  std::vector<std::array<double, 4>> vals(Ns.size());
  auto work = [&](std::size_t i) {
    const int N = Ns[i];
    const double den = std::log2(N + 1.0);
    auto rate_m = [&](int m) { return amplitude_entropy(psi_log_amplitudes({std::numbers::pi / 4, m, N})) / den; };
    vals[i] = {rate_m(0), rate_m(N / 2), rate_m(N / 2 - 1), rate_indefinite(phi_sector_uniform(N), N).rate};
  };
  const int nt = std::max(1, std::min<int>(c.threads, static_cast<int>(Ns.size())));
  if (nt == 1) {
    for (std::size_t i = 0; i < Ns.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < Ns.size(); i += nt) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  Output o;
  o.meta = meta("fig2", c, {{"Nmin", n_min}, {"Nmax", n_max}, {"step", step}});
  o.csv = true;
  o.csv_header =
      "N [particles],rate_m0 [dimensionless],rate_mN2 [dimensionless],rate_mN2m1 [dimensionless],"
      "rate_phi_inset [dimensionless]";
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    o.rows.push_back({std::to_string(Ns[i]), num(vals[i][0]), num(vals[i][1]), num(vals[i][2]), num(vals[i][3])});
  }
  return o;
}

inline Output cmd_hom(double c1, double c2, std::optional<double> tol, const Common& c) {
  const auto rho = hom_channel_output(c1, c2);
  const std::array<double, 3> w = {rho.sector_weight(0), rho.sector_weight(1), rho.sector_weight(2)};
  const std::array<double, 3> expect = {c1 * c1 / 2.0, c2 * c2 / 2.0, kHomPhiWeight};
  double werr = 0.0;
  for (int i = 0; i < 3; ++i) werr = std::max(werr, std::abs(w[i] - expect[i]));
  const auto phi = hom_phi(c1, c2);
  Eigen::VectorXcd v(3);
  for (int i = 0; i < 3; ++i) v(i) = phi.sector(2)[i];
  const Eigen::MatrixXcd block = rho.block(2);
  const double block_err = (block - kHomPhiWeight * v * v.adjoint()).cwiseAbs().maxCoeff();
  const auto two = DensityMatrix::from_blocks(2, {{2, block / w[2]}});
  const auto mem = pure_in_delta_b(two, tol.value_or(1e-6));
  Output o;
  o.meta = meta("hom-check", c, {{"c1", c1}, {"c2", c2}});
  o.body = {{"block_weights", w},
            {"expected_weights", expect},
            {"max_weight_error", werr},
            {"phi_block_error", block_err},
            {"two_particle_block_membership", io::membership_to_json(mem)}};
  return o;
}

inline Output cmd_kkt(double N, int k_max, double tol, int starts, const Common& c) {
  const auto r = verify_kkt(N, k_max, tol, starts, c.seed);
  Output o;
  o.meta = meta("kkt-verify", c, {{"N", N}, {"kmax", k_max}, {"tol", tol}, {"starts", starts}});
  auto fin = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  o.body = {{"lambda1_closed", fin(r.lambda1_closed)},
            {"lambda1_exp_family", fin(r.lambda1_exp_family)},
            {"lambda1_mirror", fin(r.lambda1_mirror)},
            {"linf_exp_family", r.linf_exp_family},
            {"linf_mirror", r.linf_mirror},
            {"linf_between", r.linf_between},
            {"closed_form_tail", r.closed_form_tail},
            {"objective_closed_nats", r.objective_closed_nats},
            {"objective_mirror_nats", r.objective_mirror_nats},
            {"mirror_monotone", r.mirror_monotone},
            {"mirror_iterations", r.mirror_iterations},
            {"within_tolerance", r.linf_exp_family < tol && r.linf_mirror < tol}};
  return o;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherence measures, distillation rates and protocol simulation on bosonic Fock space", "fockcoh"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);
  detail::Common common;

  std::string spec, measure = "CA", test, in_path, protocol, m_spec = "all";
  std::optional<int> sector, dim;
  std::optional<double> tol;
  std::vector<double> Ns;
  std::int64_t n = 0, shots = 10000;
  bool exact = false;
  int N = 0, theta_points = 33, n_max = 0, step = 0, n_min = 0, k_max = 500, starts = 5;
  double c1 = 0.0, c2 = 0.0, kkt_N = 0.0, kkt_tol = 1e-6;

  auto* st = app.add_subcommand("state", "print a named state as JSON");
  st->add_option("--name", spec, "named state, e.g. bec:N=4 or psi:theta=0.5,m=1,N=6")->required();
  detail::add_common(st, common, false);

  auto* co = app.add_subcommand("coherence", "entropy of coherence in bits");
  co->add_option("--state", spec, "named state or state JSON file")->required();
  co->add_option("--measure", measure, "CN, C or CA")->check(CLI::IsMember({"CN", "C", "CA"}))->capture_default_str();
  co->add_option("--sector", sector, "sector for CN");
  detail::add_common(co, common, false);

  auto* me = app.add_subcommand("membership", "free-set membership report");
  me->add_option("--test", test, "deltaA, deltaB or krausA")->required()->check(CLI::IsMember({"deltaA", "deltaB", "krausA"}));
  me->add_option("--in", in_path, "state, density or Kraus JSON file");
  me->add_option("--state", spec, "named state");
  me->add_option("--tol", tol, "tolerance");
  detail::add_common(me, common, false);

  auto* ra = app.add_subcommand("rate", "analytic distillation rate");
  ra->add_option("--protocol", protocol, "bec, pure or indefinite")->required()->check(CLI::IsMember({"bec", "pure", "indefinite"}));
  ra->add_option("--N", Ns, "particle number(s), comma separated")->delimiter(',');
  ra->add_option("--state", spec, "named state or state JSON file");
  detail::add_common(ra, common, true);

  auto* si = app.add_subcommand("simulate", "Monte-Carlo run of the type-class protocol");
  si->add_option("--state", spec, "named state or state JSON file")->required();
  si->add_option("--n", n, "input copies per shot")->required()->check(CLI::PositiveNumber);
  si->add_option("--shots", shots, "number of shots")->capture_default_str()->check(CLI::PositiveNumber);
  si->add_flag("--exact", exact, "exact expectation over all types instead of sampling");
  si->add_option("--dim", dim, "target register dimension");
  detail::add_common(si, common, true);

  auto* sw = app.add_subcommand("sweep", "coherence and rate of Psi(theta, m)_N on a grid (CSV)");
  sw->add_option("--N", N, "particle number")->required()->check(CLI::PositiveNumber);
  sw->add_option("--m", m_spec, "'all' or a comma list")->capture_default_str();
  sw->add_option("--theta-points", theta_points, "uniform points on [0, pi/4]")->capture_default_str()->check(CLI::Range(2, 100000));
  detail::add_common(sw, common, false);

  auto* f2 = app.add_subcommand("fig2", "rate curves for m = 0, N/2, N/2-1 and the indefinite-number inset (CSV)");
  f2->add_option("--Nmax", n_max, "largest N")->required();
  f2->add_option("--step", step, "N increment (even)")->required();
  f2->add_option("--Nmin", n_min, "first N (defaults to the step)");
  detail::add_common(f2, common, false);

  auto* ho = app.add_subcommand("hom-check", "photon-added beamsplitter channel output");
  ho->add_option("--c1", c1, "amplitude on |1,0>")->required();
  ho->add_option("--c2", c2, "amplitude on |0,1>")->required();
  ho->add_option("--tol", tol, "membership tolerance");
  detail::add_common(ho, common, false);

  auto* kk = app.add_subcommand("kkt-verify", "compare numerical maximizers with the closed-form sector weights");
  kk->add_option("--N", kkt_N, "mean particle number")->required();
  kk->add_option("--kmax", k_max, "sector truncation")->capture_default_str();
  kk->add_option("--tol", kkt_tol, "tolerance")->capture_default_str();
  kk->add_option("--starts", starts, "random starts")->capture_default_str();
  detail::add_common(kk, common, false);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    detail::Output o;
    if (st->parsed()) {
      o = detail::cmd_state(spec, common);
    } else if (co->parsed()) {
      o = detail::cmd_coherence(spec, measure, sector, common);
    } else if (me->parsed()) {
      o = detail::cmd_membership(test, in_path, spec, tol, common);
    } else if (ra->parsed()) {
      o = detail::cmd_rate(protocol, Ns, spec, common);
    } else if (si->parsed()) {
      o = detail::cmd_simulate(spec, n, shots, exact, dim, common);
    } else if (sw->parsed()) {
      o = detail::cmd_sweep(N, m_spec, theta_points, common);
    } else if (f2->parsed()) {
      o = detail::cmd_fig2(n_max, step, n_min, common);
    } else if (ho->parsed()) {
      o = detail::cmd_hom(c1, c2, tol, common);
    } else {
      o = detail::cmd_kkt(kkt_N, k_max, kkt_tol, starts, common);
    }
    const auto text = o.render();
    if (common.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(common.out_path);
      if (!f) throw InvalidArgument("cannot write " + common.out_path);
      f << text;
    }
    return 0;
  } catch (const ResourceLimit& e) {
    err << "fockcoh: resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "fockcoh: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "fockcoh: malformed JSON input: " << e.what() << "\n";
    return 2;
  } catch (const UndefinedSector& e) {
    err << "fockcoh: " << e.what() << "\n";
    return 2;
  } catch (const UndefinedRate& e) {
    err << "fockcoh: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "fockcoh: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fockcoh::cli
