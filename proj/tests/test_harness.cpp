#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "xilab/harness.hpp"

namespace {

using namespace xilab;
using nlohmann::json;

ExperimentConfig make_config(const std::string& kind, const std::string& family, std::vector<std::size_t> n_grid,
                             std::vector<double> param_grid, std::size_t reps, std::uint64_t seed = 7) {
  json j = {{"kind", kind},
            {"model", {{"family", family}, {"params", json::object()}}},
            {"n_grid", n_grid},
            {"param_grid", param_grid},
            {"replications", reps},
            {"alpha", 0.05},
            {"master_seed", seed}};
  return ExperimentConfig::from_json(j);
}

std::string run_to_string(const ExperimentConfig& c, unsigned threads) {
  std::ostringstream out;
  run_experiment(c, out, threads);
  return out.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Config, ParsesAllFields) {
  const json j = json::parse(R"({"kind":"power","model":{"family":"mixture","params":{"rho0":0.7,"xi_g":0.3}},
    "n_grid":[64,128],"param_grid":[0.0,0.5],"param_exponent":-0.25,"replications":200,"alpha":0.1,
    "master_seed":42,"output_path":"out.csv"})");
  const auto c = ExperimentConfig::from_json(j);
  EXPECT_EQ(c.kind, ExperimentKind::Power);
  EXPECT_EQ(c.model.family, "mixture");
  EXPECT_EQ(c.n_grid.size(), 2u);
  EXPECT_EQ(c.replications, 200u);
  EXPECT_DOUBLE_EQ(c.alpha, 0.1);
  EXPECT_EQ(c.master_seed, 42u);
  EXPECT_EQ(c.output_path, "out.csv");
  EXPECT_NEAR(c.effective_param(256, 2.0), 0.5, 1e-15);
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(make_config("power", "gaussian", {100}, {0.0}, 99), ConfigError);
  EXPECT_THROW(make_config("nulldist", "gaussian", {100}, {0.0}, 50), ConfigError);
  EXPECT_NO_THROW(make_config("biasvar", "gaussian", {100}, {0.0}, 50));
  EXPECT_THROW(make_config("power", "gaussian", {}, {0.0}, 100), ConfigError);
  EXPECT_THROW(make_config("power", "gaussian", {100}, {}, 100), ConfigError);
  EXPECT_THROW(make_config("power", "gaussian", {100}, {1.5}, 100), ConfigError);
  EXPECT_THROW(make_config("power", "banana", {100}, {0.0}, 100), ConfigError);
  EXPECT_THROW(make_config("sideways", "gaussian", {100}, {0.0}, 100), ConfigError);
  json j = json::parse(R"({"kind":"power","model":{"family":"gaussian"},"n_grid":[10],"param_grid":[0],
    "replications":100,"alpha":1.5,"master_seed":1})");
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
  j.erase("master_seed");
  j["alpha"] = 0.05;
  EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(Power, DeterministicAcrossThreadCounts) {
  const auto c = make_config("power", "gaussian", {50, 80}, {0.0, 0.3}, 200);
  const std::string one = run_to_string(c, 1);
  EXPECT_EQ(one, run_to_string(c, 4));
  EXPECT_EQ(one, run_to_string(c, 1));
}

TEST(Power, RowCountConservationAndSchema) {
  const auto c = make_config("power", "gaussian", {40, 60, 80}, {0.0, 0.2}, 100);
  const auto rows = run_power_experiment(c, 2);
  ASSERT_EQ(rows.size(), 6u);
  const std::string csv = run_to_string(c, 2);
  EXPECT_EQ(count_lines(csv), 7u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "schema_version,n,param,xi_theory,xi_method,empirical_power,mc_se,asymptotic_power,warnings");
  for (const auto& r : rows) {
    EXPECT_GE(r.empirical_power, 0.0);
    EXPECT_LE(r.empirical_power, 1.0);
    EXPECT_TRUE(std::isfinite(r.asymptotic_power));
  }
  EXPECT_EQ(rows[0].xi_method, XiMethod::ClosedForm);
  EXPECT_EQ(rows[1].xi_method, XiMethod::Asymptotic);
}

TEST(Power, NullLevelWithinThreeSe) {
  const auto c = make_config("power", "mixture", {200}, {0.0}, 2000, 11);
  const auto rows = run_power_experiment(c, 2);
  const double se = std::sqrt(0.05 * 0.95 / 2000.0);
  EXPECT_NEAR(rows[0].empirical_power, 0.05, 3 * se);
  EXPECT_DOUBLE_EQ(rows[0].asymptotic_power, 0.05);
}

TEST(Power, MixtureUsesSuppliedXiG) {
  json j = json::parse(R"({"kind":"power","model":{"family":"mixture","params":{"xi_g":0.3}},
    "n_grid":[100],"param_grid":[0.5],"replications":100,"master_seed":3})");
  const auto rows = run_power_experiment(ExperimentConfig::from_json(j), 1);
  EXPECT_NEAR(rows[0].xi_theory, 0.075, 1e-15);
  EXPECT_EQ(rows[0].xi_method, XiMethod::ClosedForm);
  EXPECT_TRUE(rows[0].warnings.empty());
}

TEST(Power, OutOfRangeAsymptoticFallsBackToMonteCarlo) {
  const auto c = make_config("power", "gaussian", {30}, {0.8}, 100);
  const auto rows = run_power_experiment(c, 2);
  EXPECT_EQ(rows[0].xi_method, XiMethod::MonteCarlo);
  EXPECT_NE(rows[0].warnings.find("xi_theory_by_monte_carlo"), std::string::npos);
  EXPECT_NEAR(rows[0].xi_theory, 0.41807990, 0.02);
}

TEST(NullDist, GaussianMomentsAndW1) {
  const auto c = make_config("nulldist", "gaussian", {500}, {0.0}, 1000, 5);
  const auto rows = run_null_experiment(c, 2);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean_scaled, 0.0, 3 * std::sqrt(0.4 / 1000));
  EXPECT_GT(rows[0].var_scaled, 0.33);
  EXPECT_LT(rows[0].var_scaled, 0.47);
  EXPECT_GT(rows[0].w1_to_normal, 0.0);
  EXPECT_LT(rows[0].w1_to_normal, 0.15);
}

TEST(NullDist, RejectsDependentModel) {
  const auto c = make_config("nulldist", "gaussian", {100}, {0.3}, 100);
  EXPECT_THROW(run_null_experiment(c, 1), ConfigError);
}

TEST(NullDist, RegressionSigmaProxyIsFlagged) {
  const auto c = make_config("nulldist", "regression", {100}, {1e6}, 100);
  const auto rows = run_null_experiment(c, 1);
  EXPECT_NE(rows[0].warnings.find("sigma_proxy_for_infinity"), std::string::npos);
}

TEST(BiasVariance, GaussianBoundaryVariance) {
  json j = json::parse(R"({"kind":"biasvar","model":{"family":"gaussian"},"n_grid":[1024],
    "param_grid":[1.0],"param_exponent":-0.25,"replications":1000,"master_seed":9})");
  const auto rows = run_bias_variance_experiment(ExperimentConfig::from_json(j), 2);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].param, std::pow(1024.0, -0.25), 1e-15);
  EXPECT_GT(rows[0].var_scaled, 0.3);
  EXPECT_LT(rows[0].var_scaled, 0.5);
  EXPECT_LT(rows[0].bias_check, 0.2);
}

TEST(BiasVariance, MixtureBoundaryBiasIsSmall) {
  json j = json::parse(R"({"kind":"biasvar","model":{"family":"mixture"},"n_grid":[1024,4096],
    "param_grid":[2.0],"param_exponent":-0.25,"replications":1000,"master_seed":21})");
  const auto rows = run_bias_variance_experiment(ExperimentConfig::from_json(j), 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[1].param, 0.25, 1e-15);
  EXPECT_NE(rows[1].warnings.find("xi_g_by_monte_carlo"), std::string::npos);
  EXPECT_LE(rows[1].bias_check, 0.2);
  EXPECT_GT(rows[1].mean_scaled, 1.0);
}

TEST(Projection, NullVarianceOfDifferenceIsSmall) {
  const auto c = make_config("project", "gaussian", {500}, {0.0}, 500, 13);
  const auto rows = run_projection_experiment(c, 2);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LT(rows[0].n_var_diff, 0.1);
  EXPECT_NEAR(rows[0].var_scaled_xi, 0.4, 0.08);
  EXPECT_EQ(run_to_string(c, 1), run_to_string(c, 3));
}

TEST(Projection, RejectsModelWithoutAnalyticMarginal) {
  json j = json::parse(R"({"kind":"project","model":{"family":"rotation","params":{"f1":"t5","f2":"t5"}},
    "n_grid":[50],"param_grid":[0.1],"replications":10,"master_seed":1})");
  EXPECT_THROW(run_projection_experiment(ExperimentConfig::from_json(j), 1), ConfigError);
}

TEST(Harness, WrongKindIsConfigError) {
  const auto c = make_config("power", "gaussian", {20}, {0.0}, 100);
  EXPECT_THROW(run_null_experiment(c, 1), ConfigError);
  EXPECT_THROW(run_projection_experiment(c, 1), ConfigError);
  EXPECT_THROW(run_bias_variance_experiment(c, 1), ConfigError);
}

}  // namespace
