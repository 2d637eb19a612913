#ifndef XILAB_DENSITIES_HPP
#define XILAB_DENSITIES_HPP

// Zero-mean, unit-variance univariate densities used as model components.

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "xilab/error.hpp"
#include "xilab/normal.hpp"
#include "xilab/rng.hpp"

namespace xilab {

class ComponentDensity {
 public:
  enum class Kind { Normal, StudentT };

  static ComponentDensity normal() { return ComponentDensity(Kind::Normal, 0); }

  /// Student-t with integer `df` degrees of freedom, rescaled to unit variance.
  static ComponentDensity student_t(int df) {
    if (df < 3) throw InvalidInput("student_t: need df >= 3 for a finite variance, got " + std::to_string(df));
    return ComponentDensity(Kind::StudentT, df);
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int df() const noexcept { return df_; }
  [[nodiscard]] bool is_normal() const noexcept { return kind_ == Kind::Normal; }

  [[nodiscard]] std::string name() const {
    return is_normal() ? "normal" : "t" + std::to_string(df_);
  }

  [[nodiscard]] double pdf(double u) const {
    if (is_normal()) return normal_pdf(u);
    const double x = scale_ * u;
    return scale_ * std::exp(log_norm_ - 0.5 * (nu() + 1.0) * std::log1p(x * x / nu()));
  }

  [[nodiscard]] double cdf(double u) const {
    if (is_normal()) return normal_cdf(u);
    if (std::isinf(u)) return u > 0 ? 1.0 : 0.0;
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu()), scale_ * u);
  }

  /// f'(u).
  [[nodiscard]] double derivative(double u) const { return pdf(u) * score(u); }

  /// f'(u) / f(u).
  [[nodiscard]] double score(double u) const {
    if (is_normal()) return -u;
    const double x = scale_ * u;
    return -scale_ * (nu() + 1.0) * x / (nu() + x * x);
  }

  double sample(Rng& rng) const {
    const double z = rng.normal();
    if (is_normal()) return z;
    double chi2 = 0.0;
    for (int k = 0; k < df_; ++k) {
      const double w = rng.normal();
      chi2 += w * w;
    }
    return z / std::sqrt(chi2 / nu()) / scale_;
  }

 private:
  ComponentDensity(Kind kind, int df) : kind_(kind), df_(df) {
    if (kind_ == Kind::StudentT) {
      scale_ = std::sqrt(nu() / (nu() - 2.0));
      log_norm_ = std::lgamma(0.5 * (nu() + 1.0)) - std::lgamma(0.5 * nu()) -
                  0.5 * std::log(nu() * std::numbers::pi);
    }
  }
  [[nodiscard]] double nu() const noexcept { return static_cast<double>(df_); }

  Kind kind_;
  int df_;
  double scale_ = 1.0;
  double log_norm_ = 0.0;
};

}  // namespace xilab

#endif  // XILAB_DENSITIES_HPP
