#ifndef XILAB_WASSERSTEIN_HPP
#define XILAB_WASSERSTEIN_HPP

// Wasserstein-1 distance from an empirical law to the standard normal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "xilab/core_stat.hpp"
#include "xilab/error.hpp"
#include "xilab/normal.hpp"
#include "xilab/summation.hpp"

namespace xilab {

/// Replicated values of a statistic, each computed from n_underlying observations.
struct StatSample {
  std::vector<double> values;
  std::size_t n_underlying = 0;

  StatSample() = default;
  explicit StatSample(std::vector<double> v, std::size_t n = 0) : values(std::move(v)), n_underlying(n) {
    validate();
  }

  void validate() const {
    if (values.empty()) throw InvalidInput("StatSample: empty");
    detail::require_finite(values, "StatSample");
  }
};

/// W1(F_hat, Phi) = int |F_hat(t) - Phi(t)| dt, integrated exactly piece by piece.
///
/// Between consecutive order statistics F_hat equals k/m; on each piece the
/// integral of |k/m - Phi| splits at Phi^{-1}(k/m) and uses the antiderivative
/// Psi(t) = t Phi(t) + phi(t). The tails are Psi(x_(1)) and
/// phi(x_(m)) - x_(m) (1 - Phi(x_(m))).
inline double wasserstein1_to_std_normal(const StatSample& sample) {
  sample.validate();
  std::vector<double> xs = sample.values;
  std::stable_sort(xs.begin(), xs.end());
  const std::size_t m = xs.size();

  CompensatedSum total;
  total += normal_cdf_integral(xs.front());
  total += normal_pdf(xs.back()) - xs.back() * normal_sf(xs.back());

  // int_a^b (Phi - c) dt
  auto excess = [](double a, double b, double c) {
    return normal_cdf_integral(b) - normal_cdf_integral(a) - c * (b - a);
  };
  for (std::size_t k = 1; k < m; ++k) {
    const double a = xs[k - 1];
    const double b = xs[k];
    if (b <= a) continue;
    const double c = static_cast<double>(k) / static_cast<double>(m);
    const double s = normal_quantile(c);
    if (s <= a) {
      total += excess(a, b, c);
    } else if (s >= b) {
      total += -excess(a, b, c);
    } else {
      total += -excess(a, s, c) + excess(s, b, c);
    }
  }
  return total.value();
}

/// Elementwise (v - center) / scale.
inline StatSample clt_diagnostic(const StatSample& raw, double center, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidInput("clt_diagnostic: scale must be positive, got " + std::to_string(scale));
  }
  raw.validate();
  StatSample out;
  out.n_underlying = raw.n_underlying;
  out.values.reserve(raw.values.size());
  for (double v : raw.values) out.values.push_back((v - center) / scale);
  return out;
}

/// Standardizes raw xi_n replicates as sqrt(5n/2) (xi_n - center).
inline StatSample standardize_xi(const StatSample& raw, double center) {
  if (raw.n_underlying < 2) throw InvalidInput("standardize_xi: n_underlying must be set");
  return clt_diagnostic(raw, center, std::sqrt(kNullVariance / static_cast<double>(raw.n_underlying)));
}

}  // namespace xilab

#endif  // XILAB_WASSERSTEIN_HPP
