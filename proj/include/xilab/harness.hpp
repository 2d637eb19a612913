#ifndef XILAB_HARNESS_HPP
#define XILAB_HARNESS_HPP

// Monte Carlo experiments: power curves, null-distribution diagnostics,
// bias/variance checks and the xi_n versus xi_n^* projection check.
//
// Grid point k enumerates (n, param) with n outermost:
//   k = i_n * |param_grid| + i_param.
// Replication j at grid point k draws its sample from
// derive_stream_seed(master_seed, k, j); ties in x (never expected for the
// continuous models) are broken with seed mix64(sample seed ^ kTieSalt).
// Replications run in parallel but results are stored by index and reduced
// serially, so output does not depend on the thread count.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xilab/core_stat.hpp"
#include "xilab/error.hpp"
#include "xilab/models.hpp"
#include "xilab/oracle_stat.hpp"
#include "xilab/parallel.hpp"
#include "xilab/rng.hpp"
#include "xilab/summation.hpp"
#include "xilab/theory.hpp"
#include "xilab/wasserstein.hpp"

namespace xilab {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kTieSalt = 0x7469652D62726B31ULL;
/// sigma used in place of sigma = infinity for the regression null.
inline constexpr double kRegressionNullSigma = 1e6;

enum class ExperimentKind { Power, NullDist, BiasVariance, Projection };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Power: return "power";
    case ExperimentKind::NullDist: return "nulldist";
    case ExperimentKind::BiasVariance: return "biasvar";
    case ExperimentKind::Projection: return "project";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "power" || s == "Power") return ExperimentKind::Power;
  if (s == "nulldist" || s == "NullDist") return ExperimentKind::NullDist;
  if (s == "biasvar" || s == "BiasVariance") return ExperimentKind::BiasVariance;
  if (s == "project" || s == "projection" || s == "Projection") return ExperimentKind::Projection;
  throw ConfigError("unknown experiment kind '" + s + "' (power, nulldist, biasvar, project)");
}

/// {"family": ..., "params": {...}}. The grid parameter is supplied separately.
struct ModelSpec {
  std::string family = "gaussian";
  nlohmann::json params = nlohmann::json::object();
};

namespace detail {

inline ComponentDensity parse_component(const std::string& s) {
  if (s == "normal" || s == "gaussian") return ComponentDensity::normal();
  if (s.size() > 1 && s[0] == 't') {
    try {
      std::size_t used = 0;
      const int df = std::stoi(s.substr(1), &used);
      if (used == s.size() - 1) return ComponentDensity::student_t(df);
    } catch (const std::logic_error&) {
    }
  }
  throw ConfigError("unknown component density '" + s + "' (normal, t<df>)");
}

template <class T>
T param_or(const nlohmann::json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model param '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Builds the model for `spec` at grid parameter `param` (rho, r, sigma or delta).
inline ModelPtr make_model(const ModelSpec& spec, double param) {
  try {
    const auto& p = spec.params;
    if (spec.family == "gaussian") return std::make_shared<GaussianModel>(param);
    if (spec.family == "mixture") {
      return std::make_shared<MixtureModel>(param, detail::param_or<double>(p, "rho0", 0.8));
    }
    if (spec.family == "regression") {
      return std::make_shared<RegressionModel>(
          parse_regression_function(detail::param_or<std::string>(p, "g", "identity")), param,
          parse_x_distribution(detail::param_or<std::string>(p, "x_dist", "normal")));
    }
    if (spec.family == "rotation") {
      return std::make_shared<RotationModel>(param,
                                             detail::parse_component(detail::param_or<std::string>(p, "f1", "normal")),
                                             detail::parse_component(detail::param_or<std::string>(p, "f2", "normal")));
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  throw ConfigError("unknown model family '" + spec.family + "' (gaussian, mixture, regression, rotation)");
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Power;
  ModelSpec model;
  std::vector<std::size_t> n_grid;
  std::vector<double> param_grid;
  /// Effective parameter at sample size n is param * n^param_exponent.
  double param_exponent = 0.0;
  std::size_t replications = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  std::string output_path;

  [[nodiscard]] double effective_param(std::size_t n, double param) const {
    if (param_exponent == 0.0) return param;
    return param * std::pow(static_cast<double>(n), param_exponent);
  }

  void validate() const {
    if (n_grid.empty()) throw ConfigError("n_grid must be nonempty");
    if (param_grid.empty()) throw ConfigError("param_grid must be nonempty");
    for (std::size_t n : n_grid) {
      if (n < 2) throw ConfigError("n_grid entries must be at least 2");
    }
    for (double p : param_grid) {
      if (!std::isfinite(p)) throw ConfigError("param_grid entries must be finite");
    }
    if (!std::isfinite(param_exponent)) throw ConfigError("param_exponent must be finite");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const bool needs_many = kind == ExperimentKind::Power || kind == ExperimentKind::NullDist;
    if (needs_many && replications < 100) throw ConfigError("replications must be at least 100");
    if (replications < 2) throw ConfigError("replications must be at least 2");
    // Surface invalid model parameters before any sampling.
    for (std::size_t n : n_grid) {
      for (double p : param_grid) make_model(model, effective_param(n, p));
    }
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
      if (!j.is_object()) throw ConfigError("config must be a JSON object");
      c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
      const auto& m = j.at("model");
      c.model.family = m.at("family").get<std::string>();
      if (m.contains("params")) c.model.params = m.at("params");
      c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
      c.param_grid = j.at("param_grid").get<std::vector<double>>();
      c.param_exponent = j.value("param_exponent", 0.0);
      c.replications = j.at("replications").get<std::size_t>();
      c.alpha = j.value("alpha", 0.05);
      c.master_seed = j.at("master_seed").get<std::uint64_t>();
      c.output_path = j.value("output_path", std::string());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file '" + path + "': " + e.what());
    }
    return from_json(j);
  }
};

struct PowerCurveRow {
  std::size_t n = 0;
  double param = 0.0;
  double xi_theory = 0.0;
  XiMethod xi_method = XiMethod::ClosedForm;
  double empirical_power = 0.0;
  double mc_se = 0.0;
  double asymptotic_power = 0.0;
  std::string warnings;
};

struct NullDistReport {
  std::size_t n = 0;
  double param = 0.0;
  std::size_t replications = 0;
  double xi_theory = 0.0;
  XiMethod xi_method = XiMethod::ClosedForm;
  double mean_scaled = 0.0;   // mean of sqrt(n) xi_n
  double var_scaled = 0.0;    // variance of sqrt(n) xi_n
  double w1_to_normal = 0.0;  // W1 of sqrt(5n/2) (xi_n - xi_theory) to N(0, 1)
  double bias_check = 0.0;    // sqrt(n) |mean xi_n - xi_theory|
  std::string warnings;
};

struct ProjectionReport {
  std::size_t n = 0;
  double param = 0.0;
  std::size_t replications = 0;
  double n_var_diff = 0.0;     // n Var(xi_n - xi_n^*)
  double mean_diff = 0.0;      // mean of xi_n - xi_n^*
  double var_scaled_xi = 0.0;  // n Var(xi_n)
  double var_scaled_star = 0.0;
  std::string warnings;
};

namespace detail {

inline void append_warning(std::string& list, const std::string& w) {
  if (!list.empty()) list += ';';
  list += w;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct MomentSummary {
  double mean = 0.0;
  double var = 0.0;
};

inline MomentSummary moments(const std::vector<double>& v) {
  CompensatedSum s;
  for (double e : v) s += e;
  MomentSummary m;
  m.mean = s.value() / static_cast<double>(v.size());
  CompensatedSum ss;
  for (double e : v) ss += (e - m.mean) * (e - m.mean);
  m.var = ss.value() / static_cast<double>(v.size() - 1);
  return m;
}

inline std::uint64_t grid_index(const ExperimentConfig& c, std::size_t i_n, std::size_t i_p) {
  return static_cast<std::uint64_t>(i_n * c.param_grid.size() + i_p);
}

/// Runs `body(sample, rep)` for each replication of one grid point, index-ordered.
template <class T, class Body>
std::vector<T> replicate(const ExperimentConfig& c, const BivariateModel& model, std::size_t n, std::uint64_t k,
                         unsigned threads, Body&& body) {
  std::vector<T> out(c.replications);
  parallel_for(c.replications, threads, [&](std::size_t rep) {
    const std::uint64_t seed = derive_stream_seed(c.master_seed, k, rep);
    try {
      const PairedSample sample = model.sample(n, seed);
      out[rep] = body(sample, TiePolicy::random_break(mix64(seed ^ kTieSalt)));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "replication " << rep << " at n=" << n << ", " << model.name() << ": " << e.what();
      throw NumericError(msg.str());
    }
  });
  return out;
}

}  // namespace detail

/// Theoretical xi(f) used for a grid point: closed form for the mixture,
/// asymptotic laws for the other families inside their validity ranges,
/// Monte Carlo otherwise. Caches per-config constants (xi(g), V0).
class XiTheorySource {
 public:
  XiTheorySource(const ExperimentConfig& config, unsigned threads) : config_(config), threads_(threads) {}

  XiEstimate operator()(const BivariateModel& model, std::uint64_t grid, std::string& warnings) {
    if (model.is_independent()) {
      XiEstimate est;
      est.method = XiMethod::ClosedForm;
      return est;
    }
    const std::string& family = model.family();
    if (family == "mixture") {
      const auto& mix = dynamic_cast<const MixtureModel&>(model);
      return xi_mixture_exact(mix.r(), xi_g(mix, warnings));
    }
    XiEstimate est;
    if (family == "gaussian") {
      est = xi_gaussian_smallrho(model.parameter());
    } else if (family == "regression") {
      est = xi_regression_asymptotic(model.parameter(), dynamic_cast<const RegressionModel&>(model).var_g());
    } else if (family == "rotation") {
      const auto& rot = dynamic_cast<const RotationModel&>(model);
      est = xi_rotation_asymptotic(rot.delta(), v0(rot));
    }
    if (est.method == XiMethod::Asymptotic && est.within_validity) return est;
    detail::append_warning(warnings, "xi_theory_by_monte_carlo");
    return xi_population_mc(model, 2000, 1000, derive_stream_seed(config_.master_seed, grid, kTheoryStream),
                            threads_);
  }

 private:
  static constexpr std::uint64_t kTheoryStream = std::numeric_limits<std::uint64_t>::max();

  double xi_g(const MixtureModel& mix, std::string& warnings) {
    if (config_.model.params.contains("xi_g")) {
      return detail::param_or<double>(config_.model.params, "xi_g", 0.0);
    }
    detail::append_warning(warnings, "xi_g_by_monte_carlo");
    if (!xi_g_) {
      xi_g_ = xi_population_mc(mix.dependent_component(), 4000, 2000,
                               derive_stream_seed(config_.master_seed, kTheoryStream, 0), threads_)
                  .value;
    }
    return *xi_g_;
  }

  double v0(const RotationModel& rot) {
    if (!v0_) v0_ = v0_rotation(rot.f1(), rot.f2());
    return *v0_;
  }

  const ExperimentConfig& config_;
  unsigned threads_;
  std::optional<double> xi_g_;
  std::optional<double> v0_;
};

inline std::vector<PowerCurveRow> run_power_experiment(const ExperimentConfig& config,
                                                       unsigned threads = default_thread_count()) {
  if (config.kind != ExperimentKind::Power) throw ConfigError("run_power_experiment: kind must be power");
  config.validate();
  XiTheorySource theory(config, threads);
  std::vector<PowerCurveRow> rows;
  for (std::size_t i_n = 0; i_n < config.n_grid.size(); ++i_n) {
    const std::size_t n = config.n_grid[i_n];
    for (std::size_t i_p = 0; i_p < config.param_grid.size(); ++i_p) {
      const std::uint64_t k = detail::grid_index(config, i_n, i_p);
      PowerCurveRow row;
      row.n = n;
      row.param = config.effective_param(n, config.param_grid[i_p]);
      const ModelPtr model = make_model(config.model, row.param);
      const auto xis = detail::replicate<double>(config, *model, n, k, threads,
                                                 [](const PairedSample& s, TiePolicy tp) { return xi_n(s, tp); });
      std::size_t rejections = 0;
      for (double xi : xis) rejections += test_from_xi(xi, n, config.alpha).reject ? 1 : 0;
      const double reps = static_cast<double>(config.replications);
      row.empirical_power = static_cast<double>(rejections) / reps;
      row.mc_se = std::sqrt(row.empirical_power * (1.0 - row.empirical_power) / reps);
      const XiEstimate xi = theory(*model, k, row.warnings);
      row.xi_theory = xi.value;
      row.xi_method = xi.method;
      row.asymptotic_power = asymptotic_power(static_cast<double>(n), std::max(xi.value, 0.0), config.alpha);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace detail {

inline NullDistReport summarize_xi(const ExperimentConfig& config, std::size_t n, double param,
                                   const std::vector<double>& xis, const XiEstimate& theory) {
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<double> scaled(xis.size());
  for (std::size_t i = 0; i < xis.size(); ++i) scaled[i] = root_n * xis[i];
  const auto m = moments(scaled);
  NullDistReport r;
  r.n = n;
  r.param = param;
  r.replications = config.replications;
  r.xi_theory = theory.value;
  r.xi_method = theory.method;
  r.mean_scaled = m.mean;
  r.var_scaled = m.var;
  r.bias_check = std::abs(m.mean - root_n * theory.value);
  r.w1_to_normal = wasserstein1_to_std_normal(standardize_xi(StatSample(xis, n), theory.value));
  return r;
}

}  // namespace detail

/// Replicates xi_n under an independent model and summarizes sqrt(n) xi_n.
inline std::vector<NullDistReport> run_null_experiment(const ExperimentConfig& config,
                                                       unsigned threads = default_thread_count()) {
  if (config.kind != ExperimentKind::NullDist) throw ConfigError("run_null_experiment: kind must be nulldist");
  config.validate();
  std::vector<NullDistReport> rows;
  for (std::size_t i_n = 0; i_n < config.n_grid.size(); ++i_n) {
    const std::size_t n = config.n_grid[i_n];
    for (std::size_t i_p = 0; i_p < config.param_grid.size(); ++i_p) {
      const double param = config.effective_param(n, config.param_grid[i_p]);
      const ModelPtr model = make_model(config.model, param);
      std::string warnings;
      if (model->family() == "regression" && param >= kRegressionNullSigma) {
        detail::append_warning(warnings, "sigma_proxy_for_infinity");
      } else if (!model->is_independent()) {
        throw ConfigError("nulldist requires an independent model (rho=0, r=0, delta=0 or sigma>=1e6); got " +
                          model->name());
      }
      const auto xis = detail::replicate<double>(config, *model, n, detail::grid_index(config, i_n, i_p), threads,
                                                 [](const PairedSample& s, TiePolicy tp) { return xi_n(s, tp); });
      XiEstimate zero;
      auto row = detail::summarize_xi(config, n, param, xis, zero);
      row.warnings = warnings;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Per grid point: sqrt(n) |mean xi_n - xi(f)| and n Var(xi_n), for any model.
inline std::vector<NullDistReport> run_bias_variance_experiment(const ExperimentConfig& config,
                                                                unsigned threads = default_thread_count()) {
  if (config.kind != ExperimentKind::BiasVariance) {
    throw ConfigError("run_bias_variance_experiment: kind must be biasvar");
  }
  config.validate();
  XiTheorySource theory(config, threads);
  std::vector<NullDistReport> rows;
  for (std::size_t i_n = 0; i_n < config.n_grid.size(); ++i_n) {
    const std::size_t n = config.n_grid[i_n];
    for (std::size_t i_p = 0; i_p < config.param_grid.size(); ++i_p) {
      const std::uint64_t k = detail::grid_index(config, i_n, i_p);
      const double param = config.effective_param(n, config.param_grid[i_p]);
      const ModelPtr model = make_model(config.model, param);
      const auto xis = detail::replicate<double>(config, *model, n, k, threads,
                                                 [](const PairedSample& s, TiePolicy tp) { return xi_n(s, tp); });
      std::string warnings;
      const XiEstimate xi = theory(*model, k, warnings);
      auto row = detail::summarize_xi(config, n, param, xis, xi);
      row.warnings = warnings;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

/// Replicates xi_n and xi_n^* on identical samples; reports n Var(xi_n - xi_n^*).
inline std::vector<ProjectionReport> run_projection_experiment(const ExperimentConfig& config,
                                                               unsigned threads = default_thread_count()) {
  if (config.kind != ExperimentKind::Projection) {
    throw ConfigError("run_projection_experiment: kind must be project");
  }
  config.validate();
  std::vector<ProjectionReport> rows;
  for (std::size_t i_n = 0; i_n < config.n_grid.size(); ++i_n) {
    const std::size_t n = config.n_grid[i_n];
    for (std::size_t i_p = 0; i_p < config.param_grid.size(); ++i_p) {
      const double param = config.effective_param(n, config.param_grid[i_p]);
      const ModelPtr model = make_model(config.model, param);
      if (!model->has_analytic_marginal()) {
        throw ConfigError("project requires a closed-form Y marginal; " + model->name() + " has none");
      }
      const CdfFn cdf = model->y_cdf();
      struct Pair {
        double xi = 0.0;
        double star = 0.0;
      };
      const auto pairs = detail::replicate<Pair>(config, *model, n, detail::grid_index(config, i_n, i_p), threads,
                                                 [&](const PairedSample& s, TiePolicy tp) {
                                                   return Pair{xi_n(s, tp), xi_star(s, cdf, tp)};
                                                 });
      std::vector<double> diff(pairs.size()), a(pairs.size()), b(pairs.size());
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        diff[i] = pairs[i].xi - pairs[i].star;
        a[i] = pairs[i].xi;
        b[i] = pairs[i].star;
      }
      const double nn = static_cast<double>(n);
      const auto md = detail::moments(diff);
      ProjectionReport row;
      row.n = n;
      row.param = param;
      row.replications = config.replications;
      row.n_var_diff = nn * md.var;
      row.mean_diff = md.mean;
      row.var_scaled_xi = nn * detail::moments(a).var;
      row.var_scaled_star = nn * detail::moments(b).var;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void write_power_csv(std::ostream& out, const std::vector<PowerCurveRow>& rows) {
  out << "schema_version,n,param,xi_theory,xi_method,empirical_power,mc_se,asymptotic_power,warnings\n";
  for (const auto& r : rows) {
    out << kSchemaVersion << ',' << r.n << ',' << detail::fmt(r.param) << ',' << detail::fmt(r.xi_theory) << ','
        << to_string(r.xi_method) << ',' << detail::fmt(r.empirical_power) << ',' << detail::fmt(r.mc_se) << ','
        << detail::fmt(r.asymptotic_power) << ',' << r.warnings << '\n';
  }
}

inline void write_null_csv(std::ostream& out, const std::vector<NullDistReport>& rows) {
  out << "schema_version,n,param,replications,xi_theory,xi_method,mean_scaled,var_scaled,w1_to_normal,bias_check,"
         "warnings\n";
  for (const auto& r : rows) {
    out << kSchemaVersion << ',' << r.n << ',' << detail::fmt(r.param) << ',' << r.replications << ','
        << detail::fmt(r.xi_theory) << ',' << to_string(r.xi_method) << ',' << detail::fmt(r.mean_scaled) << ','
        << detail::fmt(r.var_scaled) << ',' << detail::fmt(r.w1_to_normal) << ',' << detail::fmt(r.bias_check)
        << ',' << r.warnings << '\n';
  }
}

inline void write_projection_csv(std::ostream& out, const std::vector<ProjectionReport>& rows) {
  out << "schema_version,n,param,replications,n_var_diff,mean_diff,var_scaled_xi,var_scaled_xi_star,warnings\n";
  for (const auto& r : rows) {
    out << kSchemaVersion << ',' << r.n << ',' << detail::fmt(r.param) << ',' << r.replications << ','
        << detail::fmt(r.n_var_diff) << ',' << detail::fmt(r.mean_diff) << ',' << detail::fmt(r.var_scaled_xi) << ','
        << detail::fmt(r.var_scaled_star) << ',' << r.warnings << '\n';
  }
}

/// Runs the experiment named by config.kind and writes its CSV to `out`.
inline void run_experiment(const ExperimentConfig& config, std::ostream& out,
                           unsigned threads = default_thread_count()) {
  switch (config.kind) {
    case ExperimentKind::Power: write_power_csv(out, run_power_experiment(config, threads)); break;
    case ExperimentKind::NullDist: write_null_csv(out, run_null_experiment(config, threads)); break;
    case ExperimentKind::BiasVariance: write_null_csv(out, run_bias_variance_experiment(config, threads)); break;
    case ExperimentKind::Projection: write_projection_csv(out, run_projection_experiment(config, threads)); break;
  }
}

}  // namespace xilab

#endif  // XILAB_HARNESS_HPP
