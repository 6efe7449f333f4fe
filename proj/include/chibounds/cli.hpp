#pragma once

// Command implementations behind the chibounds executable. Each command
// builds a Report; the executable only parses flags and writes output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "chibounds/error.hpp"
#include "chibounds/gaussian.hpp"
#include "chibounds/io.hpp"
#include "chibounds/poscone.hpp"
#include "chibounds/saturation.hpp"
#include "chibounds/spin.hpp"
#include "chibounds/su11.hpp"
#include "chibounds/tolerances.hpp"

namespace chibounds::cli {

using io::json;

inline constexpr const char* version = "0.1.0";

/// Bound-inequality slack for reported findings.
inline constexpr double bound_slack = 1e-9;

/// Tolerances with rel_tol taken from CHI_BOUNDS_TOL when set.
inline Tolerances tolerances_from_env() {
  Tolerances tol;
  if (const char* env = std::getenv("CHI_BOUNDS_TOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::ParseError, "CHI_BOUNDS_TOL must be a positive number");
    }
    tol.rel_tol = v;
  }
  return tol;
}

inline json tolerances_json(const Tolerances& tol) {
  return {{"sym_tol", tol.sym_tol},
          {"pd_tol", tol.pd_tol},
          {"rel_tol", tol.rel_tol},
          {"cond_max", tol.cond_max},
          {"trunc_tol", tol.trunc_tol}};
}

struct Report {
  Report(std::string command_name, std::string digest)
      : command(std::move(command_name)), inputs_digest(std::move(digest)) {}

  std::string command;
  std::string inputs_digest;
  json results = json::object();
  json findings = json::array();
  std::vector<std::string> warnings;
  std::optional<std::uint64_t> seed;
  Tolerances tol;

  void add_finding(std::string module, std::string inequality, std::string inputs, double magnitude) {
    findings.push_back({{"module", std::move(module)},
                        {"inequality", std::move(inequality)},
                        {"inputs_digest", std::move(inputs)},
                        {"magnitude", magnitude}});
  }

  int exit_code() const { return findings.empty() ? exit_code::ok : exit_code::finding; }

  json to_json() const {
    json out;
    out["command"] = command;
    out["inputs_digest"] = inputs_digest;
    out["results"] = results;
    out["findings"] = findings;
    out["warnings"] = warnings;
    out["versions"] = {{"chibounds", version},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    out["seed"] = seed ? json(*seed) : json(nullptr);
    out["tolerances"] = tolerances_json(tol);
    return out;
  }
};

/// chi, its log form, the tau spectrum and the Hadamard-Fischer gap of a
/// matrix file. `partition` overrides the file's partition.
inline Report cmd_chi(const std::string& file_text,
                      const std::optional<poscone::Bipartition>& partition, const Tolerances& tol) {
  Report rep{"chi", io::digest(file_text)};
  rep.tol = tol;
  auto mf = io::parse_matrix_file(io::parse_json(file_text));
  if (partition) mf.partition = *partition;
  const poscone::PartitionedMatrix pm(mf.data, mf.partition, tol);
  if (pm.symmetrized()) rep.warnings.push_back("input asymmetry above sym_tol; symmetrized");
  const auto cs = poscone::correlation_spectrum(pm, tol);
  rep.results = io::to_json(cs);
  rep.results["hadamard_fischer_gap"] = cs.route_gap;
  rep.results["dim"] = pm.dim();
  rep.results["partition"] = {{"a", pm.partition().a}, {"b", pm.partition().b}};
  return rep;
}

/// Floor report of a Gaussian state file; negative margins become findings.
inline Report cmd_negativity(const std::string& file_text, const Tolerances& tol) {
  Report rep{"negativity", io::digest(file_text)};
  rep.tol = tol;
  const auto gs = io::parse_gaussian(io::parse_json(file_text), tol);
  const auto floor = gaussian::entanglement_floor(gs, tol);
  rep.results = io::to_json(floor);
  if (floor.margin < -bound_slack) {
    rep.add_finding("gaussian", "E_N >= -1/2 log(1 - chi)", rep.inputs_digest, -floor.margin);
  }
  return rep;
}

inline Report cmd_qfi_su2(const spin::SpinState& state, const std::string& inputs_digest,
                          const Tolerances& tol) {
  Report rep{"qfi", inputs_digest};
  rep.tol = tol;
  const auto ceil = spin::su2_ceiling(state, tol);
  rep.results = io::to_json(ceil);
  rep.results["group"] = "su2";
  rep.results["two_j"] = state.two_j();
  if (ceil.margin < -bound_slack) {
    rep.add_finding("spin", "F_Q <= 4[J^2(1-s^2)+J]", inputs_digest, -ceil.margin);
  }
  return rep;
}

/// SU(1,1) ceiling of a squeezed vacuum. Flagged margins are findings.
inline Report cmd_qfi_su11(double r, Eigen::Index cutoff, su11::Realization realization,
                           su11::NormConvention norm, const Tolerances& tol) {
  const std::string echo = "su11 r=" + io::format_double(r) + " cutoff=" + std::to_string(cutoff) +
                           " realization=" + std::string(su11::to_string(realization)) +
                           " norm=" + std::string(su11::to_string(norm));
  Report rep{"qfi", io::digest(echo)};
  rep.tol = tol;
  const auto state = su11::squeezed_vacuum(r, cutoff, realization, tol);
  const auto ceil = su11::su11_ceiling(state, norm, tol);
  rep.results = io::to_json(ceil);
  rep.results["group"] = "su11";
  rep.results["realization"] = std::string(su11::to_string(realization));
  rep.results["r"] = r;
  rep.results["cutoff"] = cutoff;
  if (ceil.flagged) {
    rep.add_finding("su11", "F_Q <= 4[k^2(1+s^2)-k]", rep.inputs_digest, -ceil.margin);
  }
  return rep;
}

enum class Family { Tmsv, Network, Ghz, Synthetic };

struct SweepRequest {
  Family family = Family::Tmsv;
  std::optional<saturation::Grid> grid;
  int two_j = 20;
  saturation::GhzBound ghz_bound = saturation::GhzBound::Heisenberg;
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Identity(2, 2);
  double alpha = 2.0;
  double lambda_star = 0.0;
  double amplitude = 1.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

inline saturation::Grid default_grid(const SweepRequest& req) {
  switch (req.family) {
    case Family::Tmsv:
    case Family::Network: return {0.05, 1.0, 96};
    case Family::Ghz: return {-0.1, 0.1, 201};
    case Family::Synthetic: return {req.lambda_star - 1.0, req.lambda_star + 1.0, 201};
  }
  return {};
}

inline saturation::SweepSeries build_sweep(const SweepRequest& req, const Tolerances& tol) {
  const auto lambdas = req.grid.value_or(default_grid(req)).points();
  switch (req.family) {
    case Family::Tmsv: return saturation::sweep("tmsv", lambdas, saturation::tmsv_family(tol));
    case Family::Network:
      return saturation::sweep("network", lambdas, saturation::network_family(req.coupling, tol));
    case Family::Ghz:
      return saturation::sweep("ghz", lambdas,
                               saturation::ghz_sweep_family(req.two_j, req.ghz_bound, tol));
    case Family::Synthetic:
      return saturation::synthesize_series(req.alpha, req.lambda_star, req.amplitude, req.noise,
                                           req.seed, lambdas);
  }
  throw Error(ErrorKind::BadShape, "unknown family");
}

/// The ghz family fits over the fixed window |epsilon| in [1e-3, 1e-1].
inline saturation::FitOptions default_fit_options(Family family) {
  saturation::FitOptions opts;
  if (family == Family::Ghz) opts.window = std::pair{1e-3, 1e-1};
  return opts;
}

inline Report cmd_fit(const saturation::SweepSeries& series, const saturation::FitOptions& opts,
                      const std::string& inputs_digest, const Tolerances& tol) {
  Report rep{"fit", inputs_digest};
  rep.tol = tol;
  const auto fit = saturation::fit_exponent(series, opts);
  rep.results = io::to_json(fit);
  rep.results["family"] = series.family_id;
  rep.results["points"] = fit.points;
  return rep;
}

// ---------------------------------------------------------------------------
// Randomized verification battery.

struct VerifyConfig {
  std::uint64_t seed = 42;
  std::size_t samples = 1000;
  Eigen::Index max_dim = 8;
  Tolerances tol;
};

namespace detail {

// Per-sample generator seeded from (master seed, battery, sample).
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint32_t battery, std::size_t sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    battery, static_cast<std::uint32_t>(sample)};
  return std::mt19937_64(seq);
}

inline Eigen::Index uniform_int(std::mt19937_64& rng, Eigen::Index lo, Eigen::Index hi) {
  return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

struct Battery {
  const char* name;
  const char* module;
  const char* inequality;
  double threshold;  // violation when magnitude > threshold
  std::size_t samples = 0;
  double worst = 0.0;
  std::size_t violations = 0;

  // `magnitude` is the amount by which the inequality is violated (<= 0 when it holds).
  void record(Report& rep, std::size_t sample, const std::string& inputs, double magnitude) {
    ++samples;
    if (samples == 1 || magnitude > worst) worst = magnitude;
    if (!(magnitude <= threshold)) {
      ++violations;
      rep.findings.push_back({{"battery", name},
                              {"module", module},
                              {"inequality", inequality},
                              {"sample", sample},
                              {"inputs_digest", io::digest(inputs)},
                              {"magnitude", magnitude}});
    }
  }

  json summary() const {
    return {{"module", module},
            {"inequality", inequality},
            {"samples", samples},
            {"threshold", threshold},
            {"worst", worst},
            {"violations", violations}};
  }
};

inline std::string shape_tag(const char* battery, std::uint64_t seed, std::size_t sample) {
  return std::string(battery) + ":" + std::to_string(seed) + ":" + std::to_string(sample);
}

}  // namespace detail

/// Seeded inequality battery over every module. Findings empty iff every
/// sampled inequality held within its threshold.
inline Report cmd_verify(const VerifyConfig& cfg) {
  if (cfg.samples < 1) throw Error(ErrorKind::OutOfRange, "samples must be >= 1");
  if (cfg.max_dim < 1) throw Error(ErrorKind::OutOfRange, "max_dim must be >= 1");
  const auto& tol = cfg.tol;
  Report rep{"verify",
             io::digest("verify seed=" + std::to_string(cfg.seed) + " samples=" +
                        std::to_string(cfg.samples) + " max_dim=" + std::to_string(cfg.max_dim))};
  rep.tol = tol;
  rep.seed = cfg.seed;

  using detail::Battery;
  Battery hf{"hadamard_fischer", "poscone", "log det K_AA + log det K_BB - log det K >= 0", 1e-10};
  Battery route{"route_agreement", "poscone", "|(1-chi_det) - prod(1-tau^2)| <= 1e-10 (1-chi_det)", 1e-10};
  Battery comp{"composition", "poscone", "1-chi(direct sum) = (1-chi1)(1-chi2)", 1e-10};
  Battery cong{"congruence", "poscone", "chi((S_A+S_B) K (S_A+S_B)^T) = chi(K)", 1e-9};
  Battery floor{"entanglement_floor", "gaussian", "E_N >= -1/2 log(1 - chi_mode)", bound_slack};
  Battery nutau{"nu_tau", "gaussian", "nu_i^2 <= (1 - tau_i^2)(1 + 1e-9)", 0.0};
  Battery ceil{"su2_ceiling", "spin", "F_Q <= 4[J^2(1-s^2)+J]", bound_slack};
  Battery var{"variance_identity", "spin", "sum Var(J_i) = J(J+1) - |<J>|^2", 1e-10};
  Battery alg{"algebra", "spin+su11", "commutator and Casimir residuals", 1e-9};

  auto guarded = [&](Battery& b, std::size_t i, const std::string& tag, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      b.record(rep, i, tag + " " + e.what(), std::numeric_limits<double>::infinity());
    }
  };

  const Eigen::Index block_max = cfg.max_dim;
  const Eigen::Index small_max = std::min<Eigen::Index>(4, cfg.max_dim);

  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = detail::sample_rng(cfg.seed, 1, i);
    const auto na = detail::uniform_int(rng, 1, block_max);
    const auto nb = detail::uniform_int(rng, 1, block_max);
    const std::uint64_t s = rng();
    const std::string tag = detail::shape_tag("wishart", cfg.seed, i) + " " +
                            std::to_string(na) + "|" + std::to_string(nb);
    guarded(hf, i, tag, [&] {
      const auto pm = poscone::random_partitioned(s, na, nb, 2 * (na + nb), tol);
      const double gap = poscone::hadamard_fischer_gap(pm, tol);
      hf.record(rep, i, tag, -gap);
      const auto sv = poscone::transfer_operator(pm, tol).singular_values();
      double log_prod = 0.0;
      for (Eigen::Index k = 0; k < sv.size(); ++k) log_prod += std::log1p(-sv(k) * sv(k));
      route.record(rep, i, tag, std::abs(std::expm1(log_prod + gap)));
    });
  }

  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = detail::sample_rng(cfg.seed, 2, i);
    const Eigen::Index half = std::max<Eigen::Index>(1, block_max / 2);
    Eigen::Index dims[4];
    for (auto& d : dims) d = detail::uniform_int(rng, 1, half);
    const std::uint64_t s1 = rng(), s2 = rng();
    const std::string tag = detail::shape_tag("composition", cfg.seed, i);
    guarded(comp, i, tag, [&] {
      const auto p1 = poscone::random_partitioned(s1, dims[0], dims[1], 2 * (dims[0] + dims[1]), tol);
      const auto p2 = poscone::random_partitioned(s2, dims[2], dims[3], 2 * (dims[2] + dims[3]), tol);
      const double c1 = poscone::correlation_spectrum(p1, tol).chi_det;
      const double c2 = poscone::correlation_spectrum(p2, tol).chi_det;
      const double joint = poscone::correlation_spectrum(poscone::direct_sum(p1, p2, tol), tol).chi_det;
      comp.record(rep, i, tag, std::abs(poscone::compose_chi(c1, c2) - joint));
    });
  }

  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = detail::sample_rng(cfg.seed, 3, i);
    const auto na = detail::uniform_int(rng, 1, small_max);
    const auto nb = detail::uniform_int(rng, 1, small_max);
    const std::uint64_t s = rng();
    const std::string tag = detail::shape_tag("congruence", cfg.seed, i);
    guarded(cong, i, tag, [&] {
      const auto pm = poscone::random_partitioned(s, na, nb, 2 * (na + nb), tol);
      const auto sa = poscone::random_conditioned(rng, na, 1e3);
      const auto sb = poscone::random_conditioned(rng, nb, 1e3);
      const double before = poscone::correlation_spectrum(pm, tol).chi_det;
      const double after =
          poscone::correlation_spectrum(poscone::local_transform(pm, sa, sb, tol), tol).chi_det;
      cong.record(rep, i, tag, std::abs(after - before));
    });
  }

  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = detail::sample_rng(cfg.seed, 4, i);
    const auto na = detail::uniform_int(rng, 1, small_max);
    const auto nb = detail::uniform_int(rng, 1, small_max);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd coupling(na, nb);
    for (Eigen::Index r = 0; r < na; ++r)
      for (Eigen::Index c = 0; c < nb; ++c) coupling(r, c) = normal(rng);
    const double r = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const std::string tag = detail::shape_tag("network", cfg.seed, i);
    guarded(floor, i, tag, [&] {
      const auto gs = gaussian::squeezing_network(r, coupling, gaussian::default_r_max, tol);
      const auto fr = gaussian::entanglement_floor(gs, tol);
      floor.record(rep, i, tag, -fr.margin);
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < fr.per_mode_taus.size(); ++k) {
        const double tau = fr.per_mode_taus[k];
        const double nu = fr.per_mode_nus[k];
        worst = std::max(worst, nu * nu - (1.0 - tau * tau) * (1.0 + 1e-9));
      }
      nutau.record(rep, i, tag, worst);
    });
  }

  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = detail::sample_rng(cfg.seed, 5, i);
    const int two_j = static_cast<int>(detail::uniform_int(rng, 1, 40));
    const std::string tag = detail::shape_tag("haar", cfg.seed, i) + " 2J=" + std::to_string(two_j);
    guarded(ceil, i, tag, [&] {
      const auto state = spin::haar_random(two_j, rng);
      const auto ops = spin::spin_operators(two_j);
      ceil.record(rep, i, tag, -spin::su2_ceiling(state, ops, tol).margin);
      var.record(rep, i, tag,
                 spin::variance_identity_residual(spin::spin_moments(state, ops), state.j()));
    });
  }

  for (int two_j = 1; two_j <= 2 * 20; ++two_j) {
    const auto ops = spin::spin_operators(two_j);
    const double scale = std::max(1.0, 0.25 * two_j * (two_j + 2.0));
    alg.record(rep, static_cast<std::size_t>(two_j), "spin 2J=" + std::to_string(two_j),
               std::max(spin::commutator_residual(ops), spin::casimir_residual(ops, two_j)) / scale);
  }
  for (auto realization : {su11::Realization::OneMode, su11::Realization::TwoMode}) {
    const auto g = su11::su11_generators(64, realization);
    alg.record(rep, 0, "su11 " + std::string(su11::to_string(realization)),
               std::max(su11::commutator_residual(g), su11::casimir_residual(g)));
  }

  json batteries = json::object();
  for (const Battery* b : {&hf, &route, &comp, &cong, &floor, &nutau, &ceil, &var, &alg}) {
    batteries[b->name] = b->summary();
  }
  rep.results = {{"samples", cfg.samples}, {"max_dim", cfg.max_dim}, {"batteries", batteries}};
  return rep;
}

}  // namespace chibounds::cli
