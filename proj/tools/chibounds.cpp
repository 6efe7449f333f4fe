// chibounds: determinant-ratio invariant, entanglement floors, QFI ceilings,
// saturation sweeps and the seeded verification battery.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chibounds/chibounds.hpp"

namespace {

using namespace chibounds;
using io::json;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + out_path);
  out << text;
}

int emit(const cli::Report& rep, const std::string& out_path) {
  write_output(rep.to_json().dump(2) + "\n", out_path);
  return rep.exit_code();
}

saturation::Grid parse_grid(const std::string& text) {
  saturation::Grid g;
  char tail = 0;
  unsigned long n = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lu%c", &g.lo, &g.hi, &n, &tail) != 3) {
    throw Error(ErrorKind::ParseError, "grid must be lo:hi:n");
  }
  g.n = n;
  return g;
}

std::pair<double, double> parse_window(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf%c", &lo, &hi, &tail) != 2 || !(lo >= 0.0) || !(hi > lo)) {
    throw Error(ErrorKind::ParseError, "window must be lo:hi with 0 <= lo < hi");
  }
  return {lo, hi};
}

/// "1,0;0,1" -> 2x2 matrix
Eigen::MatrixXd parse_coupling(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream all(text);
  std::string row;
  while (std::getline(all, row, ';')) {
    std::vector<double> values;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "bad coupling entry '" + cell + "'");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty() || rows.front().empty()) throw Error(ErrorKind::ParseError, "empty coupling");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error(ErrorKind::ParseError, "ragged coupling rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

const std::map<std::string, cli::Family> family_names{{"tmsv", cli::Family::Tmsv},
                                                       {"network", cli::Family::Network},
                                                       {"ghz", cli::Family::Ghz},
                                                       {"synthetic", cli::Family::Synthetic}};

struct SweepFlags {
  std::string family = "tmsv";
  std::string grid;
  int two_j = 20;
  std::string bound = "heisenberg";
  std::string coupling = "1,0;0,1";
  double alpha = 2.0;
  double lambda_star = 0.0;
  double amplitude = 1.0;
  double noise = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "Sweep family")
        ->check(CLI::IsMember({"tmsv", "network", "ghz", "synthetic"}));
    app->add_option("--grid", grid, "Parameter grid lo:hi:n");
    app->add_option("--two-j", two_j, "2J for the ghz family");
    app->add_option("--bound", bound, "ghz bound: heisenberg (4J^2) or ceiling")
        ->check(CLI::IsMember({"heisenberg", "ceiling"}));
    app->add_option("--coupling", coupling, "Network coupling matrix, rows ';' cols ','");
    app->add_option("--alpha", alpha, "Synthetic exponent");
    app->add_option("--lambda-star", lambda_star, "Synthetic saturation point");
    app->add_option("--amplitude", amplitude, "Synthetic amplitude");
    app->add_option("--noise", noise, "Synthetic multiplicative noise level");
    app->add_option("--seed", seed, "Synthetic noise seed");
  }

  cli::SweepRequest request() const {
    cli::SweepRequest req;
    req.family = family_names.at(family);
    if (!grid.empty()) req.grid = parse_grid(grid);
    req.two_j = two_j;
    req.ghz_bound = bound == "ceiling" ? saturation::GhzBound::Su2Ceiling : saturation::GhzBound::Heisenberg;
    req.coupling = parse_coupling(coupling);
    req.alpha = alpha;
    req.lambda_star = lambda_star;
    req.amplitude = amplitude;
    req.noise = noise;
    req.seed = seed;
    return req;
  }

  std::string echo() const {
    return "family=" + family + " grid=" + grid + " two_j=" + std::to_string(two_j) + " bound=" + bound +
           " coupling=" + coupling + " alpha=" + io::format_double(alpha) +
           " lambda_star=" + io::format_double(lambda_star) + " amplitude=" + io::format_double(amplitude) +
           " noise=" + io::format_double(noise) + " seed=" + std::to_string(seed);
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Determinant-ratio invariant and universal correlation bounds"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "Write output to PATH instead of stdout");

  // chi
  auto* chi = app.add_subcommand("chi", "chi, tau spectrum and Hadamard-Fischer gap of a matrix file");
  std::string chi_input, chi_partition;
  chi->add_option("--input", chi_input, "Matrix JSON file")->required();
  chi->add_option("--partition", chi_partition, "Override partition, e.g. a=0,1;b=2,3");
  chi->add_option("--out", out_path, "Output path");

  // negativity
  auto* neg = app.add_subcommand("negativity", "Logarithmic negativity and entanglement floor");
  std::string neg_input;
  neg->add_option("--input", neg_input, "Gaussian state JSON file")->required();
  neg->add_option("--out", out_path, "Output path");

  // qfi
  auto* qfi = app.add_subcommand("qfi", "Quantum Fisher information against the SU(2)/SU(1,1) ceiling");
  std::string group, norm, qfi_input, qfi_family = "ghz", realization = "one-mode";
  int qfi_two_j = 4;
  double epsilon = 0.0, r = 0.0;
  Eigen::Index cutoff = 64;
  qfi->add_option("--group", group, "su2 or su11")->required()->check(CLI::IsMember({"su2", "su11"}));
  qfi->add_option("--norm", norm, "SU(1,1) norm convention")->check(CLI::IsMember({"minkowski", "euclidean"}));
  qfi->add_option("--input", qfi_input, "Spin state JSON file (su2)");
  qfi->add_option("--family", qfi_family, "su2 state family when no input: ghz or coherent")
      ->check(CLI::IsMember({"ghz", "coherent"}));
  qfi->add_option("--two-j", qfi_two_j, "2J for su2 families");
  qfi->add_option("--epsilon", epsilon, "ghz family offset");
  qfi->add_option("--realization", realization, "SU(1,1) realization")
      ->check(CLI::IsMember({"one-mode", "two-mode"}));
  qfi->add_option("--r", r, "SU(1,1) squeezing");
  qfi->add_option("--cutoff", cutoff, "Fock cutoff");
  qfi->add_option("--out", out_path, "Output path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep of measure against bound");
  SweepFlags sweep_flags;
  std::string format = "csv";
  sweep_flags.attach(sweep);
  sweep->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", out_path, "Output path");

  // fit
  auto* fit = app.add_subcommand("fit", "Power-law exponent of the deficit near saturation");
  SweepFlags fit_flags;
  std::string fit_input, window;
  std::optional<double> hint;
  fit_flags.attach(fit);
  fit->add_option("--input", fit_input, "Sweep CSV (otherwise the family flags are swept)");
  fit->add_option("--lambda-star-hint", hint, "Known saturation point");
  fit->add_option("--window", window, "Fit window lo:hi in |lambda - lambda*|");
  fit->add_option("--out", out_path, "Output path");

  // verify
  auto* verify = app.add_subcommand("verify", "Seeded randomized inequality battery");
  cli::VerifyConfig cfg;
  verify->add_option("--seed", cfg.seed, "Master seed");
  verify->add_option("--samples", cfg.samples, "Samples per battery")->check(CLI::PositiveNumber);
  verify->add_option("--max-dim", cfg.max_dim, "Largest block size for matrix batteries")
      ->check(CLI::PositiveNumber);
  verify->add_option("--out", out_path, "Output path");

  // state
  auto* state = app.add_subcommand("state", "Write a constructed state as an input file");
  std::string state_family = "tmsv", state_as = "gaussian", state_coupling = "1,0;0,1";
  double state_r = 0.5, state_eps = 0.0;
  Eigen::Index n_modes = 2;
  int state_two_j = 4;
  state->add_option("--family", state_family, "tmsv, network, vacuum, ghz or coherent")
      ->check(CLI::IsMember({"tmsv", "network", "vacuum", "ghz", "coherent"}));
  state->add_option("--r", state_r, "Squeezing");
  state->add_option("--coupling", state_coupling, "Network coupling");
  state->add_option("--n-modes", n_modes, "Vacuum modes");
  state->add_option("--two-j", state_two_j, "2J");
  state->add_option("--epsilon", state_eps, "ghz offset");
  state->add_option("--as", state_as, "gaussian or matrix (Gaussian families)")
      ->check(CLI::IsMember({"gaussian", "matrix"}));
  state->add_option("--out", out_path, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::parse;
  }

  const Tolerances tol = cli::tolerances_from_env();

  if (chi->parsed()) {
    std::optional<poscone::Bipartition> part;
    if (!chi_partition.empty()) part = io::parse_partition_flag(chi_partition);
    return emit(cli::cmd_chi(io::read_file(chi_input), part, tol), out_path);
  }
  if (neg->parsed()) return emit(cli::cmd_negativity(io::read_file(neg_input), tol), out_path);
  if (qfi->parsed()) {
    if (group == "su11") {
      if (norm.empty()) throw Error(ErrorKind::MissingNorm, "--norm is mandatory for --group su11");
      return emit(cli::cmd_qfi_su11(r, cutoff,
                                    realization == "one-mode" ? su11::Realization::OneMode
                                                              : su11::Realization::TwoMode,
                                    norm == "minkowski" ? su11::NormConvention::Minkowski
                                                        : su11::NormConvention::Euclidean,
                                    tol),
                  out_path);
    }
    if (!qfi_input.empty()) {
      const std::string text = io::read_file(qfi_input);
      return emit(cli::cmd_qfi_su2(io::parse_spin(io::parse_json(text), tol), io::digest(text), tol), out_path);
    }
    const auto s = qfi_family == "ghz" ? spin::ghz_family(qfi_two_j, epsilon) : spin::coherent_top(qfi_two_j);
    const std::string echo = "su2 family=" + qfi_family + " two_j=" + std::to_string(qfi_two_j) +
                             " epsilon=" + io::format_double(epsilon);
    return emit(cli::cmd_qfi_su2(s, io::digest(echo), tol), out_path);
  }
  if (sweep->parsed()) {
    const auto series = cli::build_sweep(sweep_flags.request(), tol);
    if (format == "csv") {
      write_output(io::series_to_csv(series), out_path);
      return exit_code::ok;
    }
    cli::Report rep{"sweep", io::digest(sweep_flags.echo())};
    rep.tol = tol;
    if (sweep_flags.family == "synthetic") rep.seed = sweep_flags.seed;
    json records = json::array();
    for (const auto& rec : series.records) {
      records.push_back({{"lambda", rec.lambda}, {"measure", rec.measure}, {"bound", rec.bound}, {"deficit", rec.deficit}});
    }
    rep.results = {{"family", series.family_id}, {"records", records}};
    return emit(rep, out_path);
  }
  if (fit->parsed()) {
    saturation::SweepSeries series;
    std::string digest;
    saturation::FitOptions opts;
    if (!fit_input.empty()) {
      const std::string text = io::read_file(fit_input);
      series = io::series_from_csv(text);
      digest = io::digest(text);
    } else {
      const auto req = fit_flags.request();
      series = cli::build_sweep(req, tol);
      digest = io::digest(fit_flags.echo());
      opts = cli::default_fit_options(req.family);
    }
    opts.lambda_star_hint = hint;
    if (!window.empty()) opts.window = parse_window(window);
    auto rep = cli::cmd_fit(series, opts, digest, tol);
    if (fit_input.empty() && fit_flags.family == "synthetic") rep.seed = fit_flags.seed;
    return emit(rep, out_path);
  }
  if (verify->parsed()) {
    cfg.tol = tol;
    return emit(cli::cmd_verify(cfg), out_path);
  }
  if (state->parsed()) {
    json doc;
    if (state_family == "ghz" || state_family == "coherent") {
      doc = io::spin_to_json(state_family == "ghz" ? spin::ghz_family(state_two_j, state_eps)
                                                   : spin::coherent_top(state_two_j));
    } else {
      const auto gs = state_family == "tmsv"      ? gaussian::two_mode_squeezed(state_r, gaussian::default_r_max, tol)
                      : state_family == "network" ? gaussian::squeezing_network(state_r, parse_coupling(state_coupling),
                                                                                gaussian::default_r_max, tol)
                                                  : gaussian::vacuum(n_modes, tol);
      doc = state_as == "gaussian" ? io::gaussian_to_json(gs)
                                   : io::matrix_to_json(gs.cov(), gs.partition().quadratures());
    }
    write_output(doc.dump(2) + "\n", out_path);
    return exit_code::ok;
  }
  return exit_code::parse;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const chibounds::Error& e) {
    std::cerr << "chibounds: " << e.what() << "\n";
    return chibounds::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "chibounds: internal error: " << e.what() << "\n";
    return chibounds::exit_code::numerical;
  }
}
