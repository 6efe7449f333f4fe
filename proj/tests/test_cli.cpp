#include <cmath>
#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "chibounds/cli.hpp"
#include "oracles.hpp"

using namespace chibounds;
using namespace chibounds::cli;
using Eigen::MatrixXd;

namespace {

std::string matrix_file(const MatrixXd& m, const poscone::Bipartition& p) { return io::matrix_to_json(m, p).dump(); }

std::string gaussian_file(const gaussian::GaussianState& gs) { return io::gaussian_to_json(gs).dump(); }

double num(const io::json& j, const char* key) { return j.at(key).get<double>(); }

}  // namespace

TEST(Chi, Examples) {
  const auto id = cmd_chi(matrix_file(MatrixXd::Identity(4, 4), {{0, 1}, {2, 3}}), std::nullopt, {});
  EXPECT_EQ(num(id.results, "chi_det"), 0.0);
  EXPECT_EQ(id.exit_code(), exit_code::ok);

  MatrixXd m(2, 2);
  m << 1.0, 0.6, 0.6, 1.0;
  EXPECT_NEAR(num(cmd_chi(matrix_file(m, {{0}, {1}}), std::nullopt, {}).results, "chi_det"), 0.36, 1e-15);

  const auto gs = gaussian::two_mode_squeezed(0.5);
  const auto tmsv = cmd_chi(matrix_file(gs.cov(), gs.partition().quadratures()), std::nullopt, {});
  EXPECT_NEAR(num(tmsv.results, "chi_det"), ref::one_minus_sech4_1, 1e-12);
  EXPECT_NEAR(num(tmsv.results, "hadamard_fischer_gap"), num(tmsv.results, "chi_log"), 1e-12);
}

TEST(Chi, PartitionOverride) {
  const auto gs = gaussian::two_mode_squeezed(0.5);
  const auto rep = cmd_chi(matrix_file(gs.cov(), {{0, 1}, {2, 3}}), poscone::Bipartition{{0, 2}, {1, 3}}, {});
  EXPECT_EQ(rep.results.at("partition").at("a"), io::json({0, 2}));
}

TEST(Chi, AsymmetricInputIsInvalid) {
  MatrixXd m = MatrixXd::Identity(2, 2);
  m(0, 1) = 0.5;
  try {
    cmd_chi(matrix_file(m, {{0}, {1}}), std::nullopt, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Asymmetric);
    EXPECT_EQ(exit_code_for(e.kind()), exit_code::invalid_input);
  }
  try {
    cmd_chi("{\"dim\": 2,", std::nullopt, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e.kind()), exit_code::parse);
  }
}

TEST(Chi, SmallAsymmetryWarns) {
  MatrixXd m = MatrixXd::Identity(2, 2);
  m(0, 1) = 3e-10;
  EXPECT_EQ(cmd_chi(matrix_file(m, {{0}, {1}}), std::nullopt, {}).warnings.size(), 1u);
}

TEST(Negativity, Examples) {
  const auto vac = cmd_negativity(gaussian_file(gaussian::vacuum(2)), {});
  EXPECT_EQ(num(vac.results, "e_n"), 0.0);
  EXPECT_EQ(num(vac.results, "floor"), 0.0);

  const auto tmsv = cmd_negativity(gaussian_file(gaussian::two_mode_squeezed(0.5)), {});
  EXPECT_NEAR(num(tmsv.results, "e_n"), 1.0, 1e-12);
  EXPECT_NEAR(num(tmsv.results, "floor"), ref::logcosh1, 1e-12);
  EXPECT_TRUE(tmsv.findings.empty());

  const auto net = cmd_negativity(gaussian_file(gaussian::squeezing_network(0.3, MatrixXd::Identity(2, 2))), {});
  EXPECT_NEAR(num(net.results, "floor"), ref::two_logcosh06, 1e-12);
}

TEST(Qfi, Su2Examples) {
  const auto ghz = cmd_qfi_su2(spin::ghz_family(4, 0.0), "x", {});
  EXPECT_NEAR(num(ghz.results, "fq_max"), 16.0, 1e-12);
  EXPECT_NEAR(num(ghz.results, "ceiling"), 24.0, 1e-12);
  const auto coh = cmd_qfi_su2(spin::coherent_top(4), "x", {});
  EXPECT_NEAR(num(coh.results, "fq_max"), 4.0, 1e-12);
  EXPECT_NEAR(num(coh.results, "ceiling"), 8.0, 1e-12);
  EXPECT_EQ(coh.exit_code(), exit_code::ok);
}

TEST(Qfi, Su11VacuumIsFinding) {
  const auto rep = cmd_qfi_su11(0.0, 64, su11::Realization::OneMode, su11::NormConvention::Minkowski, {});
  ASSERT_EQ(rep.findings.size(), 1u);
  EXPECT_NEAR(rep.findings[0].at("magnitude").get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(num(rep.results, "margin"), -1.0, 1e-9);
  EXPECT_EQ(rep.exit_code(), exit_code::finding);
  EXPECT_EQ(rep.results.at("norm_convention"), "minkowski");
}

TEST(Fit, Examples) {
  SweepRequest ghz;
  ghz.family = Family::Ghz;
  const auto fold = cmd_fit(build_sweep(ghz, {}), default_fit_options(Family::Ghz), "x", {});
  EXPECT_NEAR(num(fold.results, "alpha"), 2.0, 0.1);

  SweepRequest syn;
  syn.family = Family::Synthetic;
  syn.alpha = 4.0 / 3.0;
  const auto cusp = cmd_fit(build_sweep(syn, {}), default_fit_options(Family::Synthetic), "x", {});
  EXPECT_NEAR(num(cusp.results, "alpha"), 4.0 / 3.0, 0.01 * 4.0 / 3.0);

  SweepRequest tmsv;
  const auto series = build_sweep(tmsv, {});
  for (std::size_t i = 1; i < series.records.size(); ++i) {
    EXPECT_GT(series.records[i].deficit, series.records[i - 1].deficit);
  }
}

TEST(Verify, CleanAndDeterministic) {
  VerifyConfig cfg;
  cfg.samples = 200;
  const auto a = cmd_verify(cfg);
  EXPECT_TRUE(a.findings.empty()) << a.findings.dump(2);
  EXPECT_EQ(a.exit_code(), exit_code::ok);
  EXPECT_EQ(a.to_json().at("seed"), 42);
  EXPECT_EQ(a.to_json().dump(), cmd_verify(cfg).to_json().dump());
  cfg.seed = 43;
  EXPECT_NE(a.to_json().dump(), cmd_verify(cfg).to_json().dump());
}

TEST(Verify, RejectsEmptyRuns) {
  VerifyConfig cfg;
  cfg.samples = 0;
  EXPECT_THROW(cmd_verify(cfg), Error);
}

TEST(Report, EmbedsToleranceAndVersions) {
  Tolerances tol;
  tol.rel_tol = 1e-8;
  const auto rep = cmd_qfi_su2(spin::coherent_top(2), "d", tol).to_json();
  EXPECT_EQ(rep.at("tolerances").at("rel_tol").get<double>(), 1e-8);
  EXPECT_EQ(rep.at("versions").at("chibounds"), version);
  EXPECT_TRUE(rep.at("seed").is_null());
}

TEST(Env, ToleranceOverride) {
  ::setenv("CHI_BOUNDS_TOL", "1e-7", 1);
  EXPECT_EQ(tolerances_from_env().rel_tol, 1e-7);
  ::setenv("CHI_BOUNDS_TOL", "nope", 1);
  EXPECT_THROW(tolerances_from_env(), Error);
  ::unsetenv("CHI_BOUNDS_TOL");
  EXPECT_EQ(tolerances_from_env().rel_tol, Tolerances{}.rel_tol);
}
