#ifndef XILAB_CLI_HPP
#define XILAB_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 usage error,
// 2 data or configuration error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xilab/core_stat.hpp"
#include "xilab/csv.hpp"
#include "xilab/error.hpp"
#include "xilab/harness.hpp"
#include "xilab/models.hpp"
#include "xilab/theory.hpp"

namespace xilab {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

namespace cli_detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct ComputeArgs {
  std::string path;
  double alpha = 0.05;
  std::string tie_policy = "reject";
  std::uint64_t seed = 0;
};

struct TheoryArgs {
  std::string family;
  std::optional<double> rho, r, xi_g, sigma, var_g, delta, n, c0;
  double rho0 = 0.8;
  double alpha = 0.05;
  std::string g = "identity";
  std::string x_dist = "normal";
  std::string f1 = "normal";
  std::string f2 = "normal";
  bool mc = false;
  std::size_t m_outer = 2000;
  std::size_t m_inner = 2000;
  std::uint64_t seed = 1;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
};

inline int run_compute(const ComputeArgs& a, std::ostream& out) {
  const PairedSample sample = read_xy_csv(a.path);
  TiePolicy policy = TiePolicy::reject();
  if (a.tie_policy == "random") {
    policy = TiePolicy::random_break(a.seed);
  } else if (a.tie_policy != "reject") {
    throw ConfigError("--tie-policy must be 'reject' or 'random'");
  }
  if (sample.size() < 2) throw ConfigError("input '" + a.path + "' has fewer than 2 observations");
  const TestResult r = null_test(sample, a.alpha, policy);
  out << "n=" << sample.size() << '\n'
      << "xi=" << num(r.xi) << '\n'
      << "z=" << num(r.z) << '\n'
      << "p_value=" << num(r.p_value) << '\n'
      << "alpha=" << num(r.alpha) << '\n'
      << "reject=" << (r.reject ? "true" : "false") << '\n';
  return kExitOk;
}

inline double require(const std::optional<double>& v, const char* flag, const std::string& family) {
  if (!v) throw ConfigError(std::string("theory --family ") + family + " requires " + flag);
  return *v;
}

inline int run_theory(const TheoryArgs& a, std::ostream& out) {
  XiEstimate xi;
  double local_scale = 0.0;  // xi = (scaling parameter)^2 * local_scale on the boundary
  ModelPtr model;
  try {
    if (a.family == "gaussian") {
      const double rho = require(a.rho, "--rho", a.family);
      xi = xi_gaussian_smallrho(rho);
      local_scale = kSqrt3OverPi;
      model = std::make_shared<GaussianModel>(rho);
    } else if (a.family == "mixture") {
      const double r = require(a.r, "--r", a.family);
      double xi_g = 0.0;
      if (a.xi_g) {
        xi_g = *a.xi_g;
      } else {
        const auto g = xi_population_mc(GaussianModel(a.rho0), a.m_outer, a.m_inner, a.seed, default_thread_count());
        xi_g = g.value;
        out << "xi_g=" << num(g.value) << '\n' << "xi_g_se=" << num(g.std_error) << '\n';
      }
      xi = xi_mixture_exact(r, xi_g);
      local_scale = xi_g;
      model = std::make_shared<MixtureModel>(r, a.rho0);
    } else if (a.family == "regression") {
      const double sigma = require(a.sigma, "--sigma", a.family);
      auto reg = std::make_shared<RegressionModel>(parse_regression_function(a.g), sigma,
                                                   parse_x_distribution(a.x_dist));
      const double var_g = a.var_g ? *a.var_g : reg->var_g();
      xi = xi_regression_asymptotic(sigma, var_g);
      local_scale = kSqrt3OverPi * var_g;
      out << "var_g=" << num(var_g) << '\n';
      model = reg;
    } else if (a.family == "rotation") {
      const double delta = require(a.delta, "--delta", a.family);
      auto rot = std::make_shared<RotationModel>(delta, detail::parse_component(a.f1), detail::parse_component(a.f2));
      const double v0 = v0_rotation(rot->f1(), rot->f2());
      xi = xi_rotation_asymptotic(delta, v0);
      local_scale = v0;
      out << "v0=" << num(v0) << '\n';
      model = rot;
    } else {
      throw ConfigError("unknown family '" + a.family + "' (gaussian, mixture, regression, rotation)");
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }

  out << "xi=" << num(xi.value) << '\n' << "xi_method=" << to_string(xi.method) << '\n';
  if (xi.method == XiMethod::Asymptotic) out << "within_validity=" << (xi.within_validity ? "true" : "false") << '\n';
  if (a.mc) {
    const auto mc = xi_population_mc(*model, a.m_outer, a.m_inner, a.seed, default_thread_count());
    out << "xi_mc=" << num(mc.value) << '\n' << "xi_mc_se=" << num(mc.std_error) << '\n';
  }
  if (a.n) {
    const double scaled = std::sqrt(*a.n) * xi.value;
    out << "sqrt_n_xi=" << num(scaled) << '\n'
        << "asymptotic_power=" << num(asymptotic_power(*a.n, std::max(xi.value, 0.0), a.alpha)) << '\n';
  }
  if (a.c0) {
    const double limit = *a.c0 == 0.0 ? 0.0 : *a.c0 * *a.c0 * local_scale;
    out << "local_power=" << num(detail::local_power(*a.c0, local_scale, a.alpha)) << '\n'
        << "regime=" << to_string(detection_regime(limit)) << '\n';
  }
  return kExitOk;
}

inline int run_experiment_command(ExperimentKind kind, const ExperimentArgs& a, std::ostream& out) {
  ExperimentConfig config = ExperimentConfig::load(a.config);
  if (config.kind != kind) {
    throw ConfigError("config kind '" + to_string(config.kind) + "' does not match subcommand '" + to_string(kind) +
                      "'");
  }
  const std::string path = a.out.empty() ? config.output_path : a.out;
  if (path.empty() || path == "-") {
    run_experiment(config, out);
    return kExitOk;
  }
  std::ostringstream buffer;
  run_experiment(config, buffer);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError("cannot write output file '" + path + "'");
  file << buffer.str();
  if (!file) throw ConfigError("failed writing output file '" + path + "'");
  return kExitOk;
}

}  // namespace cli_detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"xilab: Chatterjee's rank correlation, independence test and power experiments"};
  app.require_subcommand(1);

  cli_detail::ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Compute xi_n and the asymptotic test for an x,y CSV file");
  c->add_option("file", compute.path, "Headered two-column CSV (x,y)")->required();
  c->add_option("--alpha", compute.alpha, "Test level")->capture_default_str();
  c->add_option("--tie-policy", compute.tie_policy, "reject or random")->capture_default_str();
  c->add_option("--seed", compute.seed, "Seed for random tie breaking")->capture_default_str();

  cli_detail::TheoryArgs theory;
  auto* t = app.add_subcommand("theory", "Population xi and power for a model family");
  t->add_option("--family", theory.family, "gaussian, mixture, regression or rotation")->required();
  t->add_option("--rho", theory.rho, "Gaussian correlation");
  t->add_option("--r", theory.r, "Mixture weight");
  t->add_option("--xi-g", theory.xi_g, "xi of the mixture's dependent component");
  t->add_option("--rho0", theory.rho0, "Correlation of the mixture's dependent component")->capture_default_str();
  t->add_option("--sigma", theory.sigma, "Regression noise level");
  t->add_option("--var-g", theory.var_g, "Var(g(X)) for the regression family");
  t->add_option("--g", theory.g, "identity, square or sine")->capture_default_str();
  t->add_option("--x-dist", theory.x_dist, "normal or uniform")->capture_default_str();
  t->add_option("--delta", theory.delta, "Rotation parameter");
  t->add_option("--f1", theory.f1, "Rotation U density: normal or t<df>")->capture_default_str();
  t->add_option("--f2", theory.f2, "Rotation V density: normal or t<df>")->capture_default_str();
  t->add_option("--n", theory.n, "Sample size for the asymptotic power");
  t->add_option("--c0", theory.c0, "Boundary constant for the local power");
  t->add_option("--alpha", theory.alpha, "Test level")->capture_default_str();
  t->add_flag("--mc", theory.mc, "Also estimate xi by Monte Carlo");
  t->add_option("--m-outer", theory.m_outer, "Monte Carlo outer draws")->capture_default_str();
  t->add_option("--m-inner", theory.m_inner, "Monte Carlo inner draws")->capture_default_str();
  t->add_option("--seed", theory.seed, "Monte Carlo seed")->capture_default_str();

  struct Experiment {
    const char* name;
    const char* help;
    ExperimentKind kind;
    cli_detail::ExperimentArgs args;
    CLI::App* app = nullptr;
  };
  std::vector<Experiment> experiments{
      {"power", "Empirical versus asymptotic power curves", ExperimentKind::Power, {}},
      {"nulldist", "Null distribution of sqrt(n) xi_n", ExperimentKind::NullDist, {}},
      {"biasvar", "Bias and variance of xi_n per grid point", ExperimentKind::BiasVariance, {}},
      {"project", "n Var(xi_n - xi_n^*) per grid point", ExperimentKind::Projection, {}},
  };
  for (auto& e : experiments) {
    e.app = app.add_subcommand(e.name, e.help);
    e.app->add_option("--config", e.args.config, "Experiment JSON config")->required();
    e.app->add_option("--out", e.args.out, "Output CSV (overrides output_path; '-' for stdout)");
  }
  auto* v = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (v->parsed()) {
      out << "xilab " << kVersion << '\n';
      return kExitOk;
    }
    if (c->parsed()) return cli_detail::run_compute(compute, out);
    if (t->parsed()) return cli_detail::run_theory(theory, out);
    for (const auto& e : experiments) {
      if (e.app->parsed()) return cli_detail::run_experiment_command(e.kind, e.args, out);
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace xilab

#endif  // XILAB_CLI_HPP
