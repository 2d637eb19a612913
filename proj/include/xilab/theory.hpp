#ifndef XILAB_THEORY_HPP
#define XILAB_THEORY_HPP

// Population dependence functional xi(f), its closed-form and asymptotic
// values for the model families, asymptotic/local power and the b_n rate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "xilab/densities.hpp"
#include "xilab/error.hpp"
#include "xilab/models.hpp"
#include "xilab/normal.hpp"
#include "xilab/parallel.hpp"
#include "xilab/quadrature.hpp"
#include "xilab/rng.hpp"
#include "xilab/summation.hpp"

namespace xilab {

/// sqrt(3) / pi: the small-signal constant shared by the Gaussian and regression laws.
inline constexpr double kSqrt3OverPi = std::numbers::sqrt3 / std::numbers::pi;

enum class XiMethod { MonteCarlo, ClosedForm, Asymptotic };

inline std::string to_string(XiMethod m) {
  switch (m) {
    case XiMethod::MonteCarlo: return "monte_carlo";
    case XiMethod::ClosedForm: return "closed_form";
    case XiMethod::Asymptotic: return "asymptotic";
  }
  return "?";
}

struct XiEstimate {
  double value = 0.0;
  double std_error = 0.0;
  XiMethod method = XiMethod::ClosedForm;
  /// False when an asymptotic formula is evaluated outside its stated range.
  bool within_validity = true;
  std::string note;
};

/// Exponents of the smoothness and moment assumptions behind b_n.
struct RateParams {
  double gamma = 5.0;
  double theta = 3.0;
  double eta = 1.0;

  void validate() const {
    if (!(gamma > 1.0)) throw InvalidInput("RateParams: need gamma > 1");
    if (!(theta > 1.0)) throw InvalidInput("RateParams: need theta > 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("RateParams: need 0 < eta <= 1");
  }
};

namespace detail {

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace detail

/// Monte Carlo estimate of xi(f) = 6 int E[P(Y <= t | X) - P(Y <= t)]^2 f_Y(t) dt.
///
/// Outer draw i uses the stream derive_stream_seed(seed, 0, i): first a
/// model draw whose y is the point t, then m_inner fresh draws whose x values
/// average the squared deviation. The standard error is the jackknife over
/// outer draws (for a mean this is s / sqrt(m_outer)).
inline XiEstimate xi_population_mc(const BivariateModel& model, std::size_t m_outer, std::size_t m_inner,
                                   std::uint64_t seed, unsigned threads = 1) {
  if (m_outer < 100 || m_inner < 100) {
    throw InvalidInput("xi_population_mc: need m_outer, m_inner >= 100");
  }
  std::vector<double> terms(m_outer);
  parallel_for(m_outer, threads, [&](std::size_t i) {
    Rng rng(derive_stream_seed(seed, 0, i));
    const double t = model.draw(rng).second;
    const double f_t = model.marg_y_cdf(t);
    CompensatedSum acc;
    for (std::size_t j = 0; j < m_inner; ++j) {
      const double x = model.draw(rng).first;
      const double d = model.cond_cdf(t, x) - f_t;
      acc += d * d;
    }
    terms[i] = 6.0 * acc.value() / static_cast<double>(m_inner);
  });

  CompensatedSum sum;
  for (double v : terms) sum += v;
  const double mean = sum.value() / static_cast<double>(m_outer);
  CompensatedSum ss;
  for (double v : terms) ss += (v - mean) * (v - mean);
  const double var = ss.value() / static_cast<double>(m_outer - 1);

  XiEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(var / static_cast<double>(m_outer));
  est.method = XiMethod::MonteCarlo;
  est.note = model.name();
  return est;
}

/// Small-correlation law for the bivariate normal: xi ~ rho^2 sqrt(3)/pi.
inline XiEstimate xi_gaussian_smallrho(double rho) {
  if (!(std::abs(rho) < 1.0)) throw InvalidInput("xi_gaussian_smallrho: need |rho| < 1");
  XiEstimate est;
  est.value = rho * rho * kSqrt3OverPi;
  est.method = XiMethod::Asymptotic;
  est.within_validity = std::abs(rho) <= 0.2;
  est.note = "leading term in rho; valid for |rho| <= 0.2";
  return est;
}

/// Exact for the mixture with matching marginals: xi(f_r) = r^2 xi(g).
inline XiEstimate xi_mixture_exact(double r, double xi_g) {
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidInput("xi_mixture_exact: need r in [0, 1]");
  if (!(xi_g >= 0.0 && xi_g <= 1.0)) throw InvalidInput("xi_mixture_exact: need xi_g in [0, 1]");
  XiEstimate est;
  est.value = r * r * xi_g;
  est.method = XiMethod::ClosedForm;
  return est;
}

/// Noisy regression: xi ~ (sqrt(3)/pi) Var(g(X)) / sigma^2 for large sigma.
inline XiEstimate xi_regression_asymptotic(double sigma, double var_g) {
  if (!(sigma > 0.0)) throw InvalidInput("xi_regression_asymptotic: need sigma > 0");
  if (!(var_g >= 0.0)) throw InvalidInput("xi_regression_asymptotic: need var_g >= 0");
  XiEstimate est;
  est.value = kSqrt3OverPi * var_g / (sigma * sigma);
  est.method = XiMethod::Asymptotic;
  est.within_validity = sigma * sigma >= 25.0 * var_g;
  est.note = "leading term in 1/sigma^2; valid for sigma^2 >> Var(g(X))";
  return est;
}

/// The four integrals making up the rotation constant V0.
struct RotationV0Terms {
  double density_square = 0.0;  // E[f2(V)^2]
  double fisher_info = 0.0;     // E[(f1'(U)/f1(U))^2]
  double j_square = 0.0;        // E[J(V)^2]
  double j_density = 0.0;       // E[J(V) f2(V)]

  [[nodiscard]] double v0() const noexcept {
    return 6.0 * (density_square + fisher_info * j_square - 2.0 * j_density);
  }
};

/// J(t) = int_{-inf}^t y f2(y) dy. For t > 0 the zero mean of f2 gives
/// J(t) = -int_t^inf y f2(y) dy, which keeps the integrand one-signed.
inline double rotation_j(const ComponentDensity& f2, double t) {
  if (std::isinf(t)) return 0.0;
  auto moment = [&](double y) { return y * f2.pdf(y); };
  if (t <= 0.0) return integrate(moment, -INFINITY, t, "J(t) = int y f2(y) dy");
  return -integrate(moment, t, INFINITY, "J(t) = int y f2(y) dy");
}

inline RotationV0Terms v0_rotation_terms(const ComponentDensity& f1, const ComponentDensity& f2) {
  RotationV0Terms terms;
  terms.density_square = integrate(
      [&](double v) {
        const double d = f2.pdf(v);
        return d * d * d;
      },
      -INFINITY, INFINITY, "E[f2(V)^2]");
  terms.fisher_info = integrate(
      [&](double u) {
        const double s = f1.score(u);
        return s * s * f1.pdf(u);
      },
      -INFINITY, INFINITY, "E[(f1'(U)/f1(U))^2]");
  terms.j_square = integrate(
      [&](double v) {
        const double d = f2.pdf(v);
        if (d == 0.0) return 0.0;
        const double j = rotation_j(f2, v);
        return j * j * d;
      },
      -INFINITY, INFINITY, "E[J(V)^2]");
  terms.j_density = integrate(
      [&](double v) {
        const double d = f2.pdf(v);
        if (d == 0.0) return 0.0;
        return rotation_j(f2, v) * d * d;
      },
      -INFINITY, INFINITY, "E[J(V) f2(V)]");
  return terms;
}

/// V0 = 6 (E[f2^2(V)] + E[(f1'/f1)^2(U)] E[J^2(V)] - 2 E[J(V) f2(V)]).
inline double v0_rotation(const ComponentDensity& f1, const ComponentDensity& f2) {
  const double v0 = v0_rotation_terms(f1, f2).v0();
  if (!(v0 > 0.0)) throw NumericError("v0_rotation: non-positive result " + std::to_string(v0));
  return v0;
}

/// Rotation model: xi ~ delta^2 V0 for small delta.
inline XiEstimate xi_rotation_asymptotic(double delta, double v0) {
  if (!(std::abs(delta) < 1.0)) throw InvalidInput("xi_rotation_asymptotic: need |delta| < 1");
  if (!(v0 > 0.0)) throw InvalidInput("xi_rotation_asymptotic: need v0 > 0");
  XiEstimate est;
  est.value = delta * delta * v0;
  est.method = XiMethod::Asymptotic;
  est.within_validity = std::abs(delta) <= 0.1;
  est.note = "leading term in delta; valid for |delta| <= 0.1";
  return est;
}

/// 1 - Phi(z_alpha - sqrt(n) xi / sqrt(2/5)).
inline double asymptotic_power(double n, double xi_value, double alpha) {
  detail::require_alpha(alpha);
  if (!(n >= 1.0)) throw InvalidInput("asymptotic_power: need n >= 1");
  if (!(xi_value >= 0.0)) throw InvalidInput("asymptotic_power: need xi >= 0");
  const double shift = std::sqrt(n) * xi_value / std::sqrt(kNullVariance);
  return normal_sf(normal_upper_quantile(alpha) - shift);
}

namespace detail {

// 1 - Phi(z_alpha - c0^2 k / sqrt(2/5)), with c0 = inf allowed.
inline double local_power(double c0, double k, double alpha) {
  require_alpha(alpha);
  if (!(c0 >= 0.0)) throw InvalidInput("local power: need c0 >= 0");
  if (k == 0.0 || c0 == 0.0) return alpha;
  const double shift = c0 * c0 * k / std::sqrt(kNullVariance);
  return normal_sf(normal_upper_quantile(alpha) - shift);
}

}  // namespace detail

/// Limit power of the mixture family when n^{1/4} r_n -> c0.
inline double local_power_mixture(double c0, double xi_g, double alpha) {
  if (!(xi_g >= 0.0 && xi_g <= 1.0)) throw InvalidInput("local_power_mixture: need xi_g in [0, 1]");
  return detail::local_power(c0, xi_g, alpha);
}

/// Limit power of the regression family when n^{-1/4} sigma_n -> 1/c0.
inline double local_power_regression(double c0, double var_g, double alpha) {
  if (!(var_g >= 0.0)) throw InvalidInput("local_power_regression: need var_g >= 0");
  return detail::local_power(c0, kSqrt3OverPi * var_g, alpha);
}

/// Limit power of the rotation family when n^{1/4} delta_n -> c0.
inline double local_power_rotation(double c0, double v0, double alpha) {
  if (!(v0 >= 0.0)) throw InvalidInput("local_power_rotation: need v0 >= 0");
  return detail::local_power(c0, v0, alpha);
}

enum class DetectionRegime { Null, Critical, Consistent };

inline std::string to_string(DetectionRegime r) {
  switch (r) {
    case DetectionRegime::Null: return "null";
    case DetectionRegime::Critical: return "critical";
    case DetectionRegime::Consistent: return "consistent";
  }
  return "?";
}

/// Classifies lim sqrt(n) xi(f_n): 0 gives power alpha, a finite positive
/// limit gives power in (alpha, 1), infinity gives power 1.
inline DetectionRegime detection_regime(double scaled_limit) {
  if (std::isnan(scaled_limit) || scaled_limit < 0.0) {
    throw InvalidInput("detection_regime: limit must lie in [0, inf]");
  }
  if (scaled_limit == 0.0) return DetectionRegime::Null;
  if (std::isinf(scaled_limit)) return DetectionRegime::Consistent;
  return DetectionRegime::Critical;
}

struct BnTerms {
  double moment = 0.0;      // n^{-gamma/(gamma+1)} (log n)^2
  double smoothness = 0.0;  // ((log n)^2 / n)^{min(gamma(theta-1)/(theta(gamma+1)), eta gamma/(gamma+1))}
  [[nodiscard]] double total() const noexcept { return moment + smoothness; }
};

inline BnTerms bn_rate_terms(double n, const RateParams& params) {
  params.validate();
  if (!(n >= 2.0)) throw InvalidInput("bn_rate: need n >= 2");
  const double g = params.gamma;
  const double log2n = std::log(n) * std::log(n);
  const double exponent =
      std::min(g * (params.theta - 1.0) / (params.theta * (g + 1.0)), params.eta * g / (g + 1.0));
  BnTerms terms;
  terms.moment = std::pow(n, -g / (g + 1.0)) * log2n;
  terms.smoothness = std::pow(log2n / n, exponent);
  return terms;
}

inline double bn_rate(double n, const RateParams& params) { return bn_rate_terms(n, params).total(); }

/// min((theta - 1)/theta, eta) > (gamma + 1) / (2 gamma): b_n decays fast enough
/// for the normal approximation to hold.
inline bool rate_condition_holds(const RateParams& params) {
  params.validate();
  return std::min((params.theta - 1.0) / params.theta, params.eta) > (params.gamma + 1.0) / (2.0 * params.gamma);
}

}  // namespace xilab

#endif  // XILAB_THEORY_HPP
