#ifndef XILAB_MODELS_HPP
#define XILAB_MODELS_HPP

// Bivariate model families: Gaussian(rho), mixture, noisy regression and
// rotation. Each exposes sampling, P(Y <= t | X = x) and the Y marginal.
// Models are immutable after construction; sampling takes an explicit seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "xilab/core_stat.hpp"
#include "xilab/densities.hpp"
#include "xilab/error.hpp"
#include "xilab/normal.hpp"
#include "xilab/oracle_stat.hpp"
#include "xilab/quadrature.hpp"
#include "xilab/rng.hpp"

namespace xilab {

class BivariateModel {
 public:
  virtual ~BivariateModel() = default;

  [[nodiscard]] virtual std::string family() const = 0;
  /// Human-readable name with parameters.
  [[nodiscard]] virtual std::string name() const = 0;
  /// The family's scalar parameter: rho, r, sigma or delta.
  [[nodiscard]] virtual double parameter() const = 0;

  /// One (x, y) draw.
  virtual std::pair<double, double> draw(Rng& rng) const = 0;

  /// P(Y <= t | X = x).
  [[nodiscard]] virtual double cond_cdf(double t, double x) const = 0;
  [[nodiscard]] virtual double marg_y_cdf(double t) const = 0;
  [[nodiscard]] virtual double marg_y_pdf(double t) const = 0;

  /// True when X and Y are independent at the current parameter.
  [[nodiscard]] virtual bool is_independent() const = 0;
  /// True when marg_y_cdf is closed form (no quadrature).
  [[nodiscard]] virtual bool has_analytic_marginal() const = 0;

  /// n i.i.d. draws; bit-identical for a given seed.
  [[nodiscard]] PairedSample sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw InvalidInput("sample: n must be at least 1");
    Rng rng(seed);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) std::tie(x[i], y[i]) = draw(rng);
    return PairedSample(std::move(x), std::move(y));
  }

  /// The Y marginal as an oracle CDF.
  [[nodiscard]] CdfFn y_cdf() const {
    return CdfFn([this](double t) { return marg_y_cdf(t); });
  }
};

using ModelPtr = std::shared_ptr<const BivariateModel>;

/// Standard bivariate normal with correlation rho.
class GaussianModel final : public BivariateModel {
 public:
  explicit GaussianModel(double rho) : rho_(rho), resid_(std::sqrt(1.0 - rho * rho)) {
    if (!(std::abs(rho) < 1.0)) throw InvalidInput("GaussianModel: need |rho| < 1, got " + std::to_string(rho));
  }

  [[nodiscard]] std::string family() const override { return "gaussian"; }
  [[nodiscard]] std::string name() const override { return "gaussian(rho=" + std::to_string(rho_) + ")"; }
  [[nodiscard]] double parameter() const override { return rho_; }
  [[nodiscard]] double rho() const noexcept { return rho_; }

  std::pair<double, double> draw(Rng& rng) const override {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return {z1, rho_ * z1 + resid_ * z2};
  }

  [[nodiscard]] double cond_cdf(double t, double x) const override {
    return normal_cdf((t - rho_ * x) / resid_);
  }
  [[nodiscard]] double marg_y_cdf(double t) const override { return normal_cdf(t); }
  [[nodiscard]] double marg_y_pdf(double t) const override { return normal_pdf(t); }
  [[nodiscard]] bool is_independent() const override { return rho_ == 0.0; }
  [[nodiscard]] bool has_analytic_marginal() const override { return true; }

 private:
  double rho_;
  double resid_;
};

/// f_r = (1 - r) f_X f_Y + r g with standard normal f_X, f_Y and g the
/// bivariate normal with correlation rho0. g has the same marginals, so the
/// marginals of f_r are standard normal for every r.
class MixtureModel final : public BivariateModel {
 public:
  MixtureModel(double r, double rho0) : r_(r), dependent_(rho0) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidInput("MixtureModel: need r in [0, 1], got " + std::to_string(r));
  }

  [[nodiscard]] std::string family() const override { return "mixture"; }
  [[nodiscard]] std::string name() const override {
    return "mixture(r=" + std::to_string(r_) + ", rho0=" + std::to_string(dependent_.rho()) + ")";
  }
  [[nodiscard]] double parameter() const override { return r_; }
  [[nodiscard]] double r() const noexcept { return r_; }
  [[nodiscard]] double rho0() const noexcept { return dependent_.rho(); }
  /// The dependent component g.
  [[nodiscard]] const GaussianModel& dependent_component() const noexcept { return dependent_; }

  std::pair<double, double> draw(Rng& rng) const override {
    if (rng.bernoulli(r_)) return dependent_.draw(rng);
    const double x = rng.normal();
    const double y = rng.normal();
    return {x, y};
  }

  [[nodiscard]] double cond_cdf(double t, double x) const override {
    return (1.0 - r_) * normal_cdf(t) + r_ * dependent_.cond_cdf(t, x);
  }
  [[nodiscard]] double marg_y_cdf(double t) const override { return normal_cdf(t); }
  [[nodiscard]] double marg_y_pdf(double t) const override { return normal_pdf(t); }
  [[nodiscard]] bool is_independent() const override { return r_ == 0.0 || dependent_.rho() == 0.0; }
  [[nodiscard]] bool has_analytic_marginal() const override { return true; }

 private:
  double r_;
  GaussianModel dependent_;
};

enum class RegressionFunction { Identity, Square, Sine };
enum class XDistribution { Normal, Uniform };

inline std::string to_string(RegressionFunction g) {
  switch (g) {
    case RegressionFunction::Identity: return "identity";
    case RegressionFunction::Square: return "square";
    case RegressionFunction::Sine: return "sine";
  }
  return "?";
}

inline std::string to_string(XDistribution d) {
  return d == XDistribution::Normal ? "normal" : "uniform";
}

inline RegressionFunction parse_regression_function(const std::string& s) {
  if (s == "identity") return RegressionFunction::Identity;
  if (s == "square") return RegressionFunction::Square;
  if (s == "sine") return RegressionFunction::Sine;
  throw InvalidInput("unknown regression function '" + s + "' (identity, square, sine)");
}

inline XDistribution parse_x_distribution(const std::string& s) {
  if (s == "normal") return XDistribution::Normal;
  if (s == "uniform") return XDistribution::Uniform;
  throw InvalidInput("unknown x distribution '" + s + "' (normal, uniform)");
}

/// Y = g(X) + sigma Z, Z standard normal independent of X.
class RegressionModel final : public BivariateModel {
 public:
  RegressionModel(RegressionFunction g, double sigma, XDistribution x_dist = XDistribution::Normal)
      : g_(g), sigma_(sigma), x_dist_(x_dist) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw InvalidInput("RegressionModel: need finite sigma > 0, got " + std::to_string(sigma));
    }
  }

  [[nodiscard]] std::string family() const override { return "regression"; }
  [[nodiscard]] std::string name() const override {
    return "regression(g=" + to_string(g_) + ", sigma=" + std::to_string(sigma_) +
           ", x=" + to_string(x_dist_) + ")";
  }
  [[nodiscard]] double parameter() const override { return sigma_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }
  [[nodiscard]] RegressionFunction function() const noexcept { return g_; }
  [[nodiscard]] XDistribution x_distribution() const noexcept { return x_dist_; }

  [[nodiscard]] double g(double x) const noexcept {
    switch (g_) {
      case RegressionFunction::Identity: return x;
      case RegressionFunction::Square: return x * x;
      case RegressionFunction::Sine: return std::sin(x);
    }
    return x;
  }

  /// Var(g(X)) in closed form.
  [[nodiscard]] double var_g() const noexcept {
    const bool normal = x_dist_ == XDistribution::Normal;
    switch (g_) {
      case RegressionFunction::Identity: return normal ? 1.0 : 1.0 / 12.0;
      case RegressionFunction::Square: return normal ? 2.0 : 4.0 / 45.0;
      case RegressionFunction::Sine: {
        if (normal) return 0.5 * (1.0 - std::exp(-2.0));
        const double mean = 1.0 - std::cos(1.0);
        return 0.5 - 0.25 * std::sin(2.0) - mean * mean;
      }
    }
    return 0.0;
  }

  std::pair<double, double> draw(Rng& rng) const override {
    const double x = x_dist_ == XDistribution::Normal ? rng.normal() : rng.uniform();
    return {x, g(x) + sigma_ * rng.normal()};
  }

  [[nodiscard]] double cond_cdf(double t, double x) const override {
    return normal_cdf((t - g(x)) / sigma_);
  }

  [[nodiscard]] double marg_y_cdf(double t) const override {
    if (g_ == RegressionFunction::Identity) {
      if (x_dist_ == XDistribution::Normal) return normal_cdf(t / std::sqrt(1.0 + sigma_ * sigma_));
      // int_0^1 Phi((t - x)/sigma) dx
      return sigma_ * (normal_cdf_integral(t / sigma_) - normal_cdf_integral((t - 1.0) / sigma_));
    }
    const double v = integrate_over_x([&](double x) { return normal_cdf((t - g(x)) / sigma_); }, t,
                                      "regression marginal CDF");
    return std::clamp(v, 0.0, 1.0);
  }

  [[nodiscard]] double marg_y_pdf(double t) const override {
    if (g_ == RegressionFunction::Identity) {
      if (x_dist_ == XDistribution::Normal) {
        const double s = std::sqrt(1.0 + sigma_ * sigma_);
        return normal_pdf(t / s) / s;
      }
      return normal_cdf(t / sigma_) - normal_cdf((t - 1.0) / sigma_);
    }
    return integrate_over_x([&](double x) { return normal_pdf((t - g(x)) / sigma_) / sigma_; }, t,
                            "regression marginal density");
  }

  [[nodiscard]] bool is_independent() const override { return false; }
  [[nodiscard]] bool has_analytic_marginal() const override { return g_ == RegressionFunction::Identity; }

 private:
  // Points where g(x) = t; the integrands change fastest there when sigma is small.
  [[nodiscard]] std::vector<double> level_crossings(double t, double lo, double hi) const {
    std::vector<double> pts;
    if (g_ == RegressionFunction::Square && t > 0.0) {
      pts = {-std::sqrt(t), std::sqrt(t)};
    } else if (g_ == RegressionFunction::Sine && std::abs(t) <= 1.0) {
      const double a = std::asin(t);
      for (int k = -7; k <= 7; ++k) {
        pts.push_back(a + 2.0 * std::numbers::pi * k);
        pts.push_back(std::numbers::pi - a + 2.0 * std::numbers::pi * k);
      }
    }
    std::erase_if(pts, [&](double p) { return !(p > lo && p < hi); });
    std::sort(pts.begin(), pts.end());
    return pts;
  }

  template <class F>
  double integrate_over_x(F&& integrand, double t, const char* label) const {
    const bool normal = x_dist_ == XDistribution::Normal;
    const double lo = normal ? -40.0 : 0.0;
    const double hi = normal ? 40.0 : 1.0;
    std::vector<double> cuts{normal ? -INFINITY : 0.0};
    for (double p : level_crossings(t, lo, hi)) cuts.push_back(p);
    cuts.push_back(normal ? INFINITY : 1.0);
    auto weighted = [&](double x) { return normal ? integrand(x) * normal_pdf(x) : integrand(x); };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      total += integrate(weighted, cuts[k], cuts[k + 1], label);
    }
    return total;
  }

  RegressionFunction g_;
  double sigma_;
  XDistribution x_dist_;
};

/// X = U + delta V, Y = delta U + V with U ~ f1, V ~ f2 independent,
/// zero mean and unit variance.
class RotationModel final : public BivariateModel {
 public:
  explicit RotationModel(double delta, ComponentDensity f1 = ComponentDensity::normal(),
                         ComponentDensity f2 = ComponentDensity::normal())
      : delta_(delta), f1_(f1), f2_(f2) {
    if (!(std::abs(delta) < 1.0)) throw InvalidInput("RotationModel: need |delta| < 1, got " + std::to_string(delta));
  }

  [[nodiscard]] std::string family() const override { return "rotation"; }
  [[nodiscard]] std::string name() const override {
    return "rotation(delta=" + std::to_string(delta_) + ", f1=" + f1_.name() + ", f2=" + f2_.name() + ")";
  }
  [[nodiscard]] double parameter() const override { return delta_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] const ComponentDensity& f1() const noexcept { return f1_; }
  [[nodiscard]] const ComponentDensity& f2() const noexcept { return f2_; }
  [[nodiscard]] bool gaussian_components() const noexcept { return f1_.is_normal() && f2_.is_normal(); }

  std::pair<double, double> draw(Rng& rng) const override {
    const double u = f1_.sample(rng);
    const double v = f2_.sample(rng);
    return {u + delta_ * v, delta_ * u + v};
  }

  [[nodiscard]] double cond_cdf(double t, double x) const override {
    if (delta_ == 0.0) return f2_.cdf(t);
    const double d2 = delta_ * delta_;
    if (gaussian_components()) {
      // (X, Y) is jointly normal with variances 1 + d^2 and covariance 2 delta.
      const double slope = 2.0 * delta_ / (1.0 + d2);
      const double sd = (1.0 - d2) / std::sqrt(1.0 + d2);
      return normal_cdf((t - slope * x) / sd);
    }
    // Given X = x, U = x - delta V and Y = delta x + (1 - delta^2) V is increasing in V.
    const double v_cut = (t - delta_ * x) / (1.0 - d2);
    auto joint = [&](double v) { return f1_.pdf(x - delta_ * v) * f2_.pdf(v); };
    const double below = integrate(joint, -INFINITY, v_cut, "rotation conditional CDF numerator");
    const double above = integrate(joint, v_cut, INFINITY, "rotation conditional CDF numerator");
    const double total = below + above;
    if (!(total > 0.0)) throw NumericError("rotation conditional CDF: zero density of X at x=" + std::to_string(x));
    return std::clamp(below / total, 0.0, 1.0);
  }

  [[nodiscard]] double marg_y_cdf(double t) const override {
    if (delta_ == 0.0) return f2_.cdf(t);
    if (gaussian_components()) return normal_cdf(t / std::sqrt(1.0 + delta_ * delta_));
    const double v = integrate([&](double u) { return f1_.pdf(u) * f2_.cdf(t - delta_ * u); }, -INFINITY,
                               INFINITY, "rotation marginal CDF");
    return std::clamp(v, 0.0, 1.0);
  }

  [[nodiscard]] double marg_y_pdf(double t) const override {
    if (delta_ == 0.0) return f2_.pdf(t);
    if (gaussian_components()) {
      const double s = std::sqrt(1.0 + delta_ * delta_);
      return normal_pdf(t / s) / s;
    }
    return integrate([&](double u) { return f1_.pdf(u) * f2_.pdf(t - delta_ * u); }, -INFINITY, INFINITY,
                     "rotation marginal density");
  }

  [[nodiscard]] bool is_independent() const override { return delta_ == 0.0; }
  [[nodiscard]] bool has_analytic_marginal() const override {
    return delta_ == 0.0 || gaussian_components();
  }

 private:
  double delta_;
  ComponentDensity f1_;
  ComponentDensity f2_;
};

}  // namespace xilab

#endif  // XILAB_MODELS_HPP
