#ifndef XILAB_ORACLE_STAT_HPP
#define XILAB_ORACLE_STAT_HPP

// Oracle versions of xi_n: the empirical CDF of y is replaced by the known
// population CDF. Only computable in simulation, where the model supplies F.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xilab/core_stat.hpp"
#include "xilab/error.hpp"
#include "xilab/summation.hpp"

namespace xilab {

/// A monotone map t -> F(t) in [0, 1].
class CdfFn {
 public:
  enum class Kind { Analytic, Empirical };

  /// Wraps a population CDF. The function must be reentrant.
  explicit CdfFn(std::function<double(double)> fn, Kind kind = Kind::Analytic)
      : fn_(std::move(fn)), kind_(kind) {
    if (!fn_) throw InvalidCdf("CdfFn: empty function");
    spot_check();
  }

  /// Empirical CDF #{j : values_j <= t} / n. Flagged so oracle statistics refuse it by default.
  static CdfFn empirical(std::vector<double> values) {
    if (values.empty()) throw InvalidInput("CdfFn::empirical: empty input");
    detail::require_finite(values, "CdfFn::empirical");
    std::sort(values.begin(), values.end());
    auto sorted = std::make_shared<const std::vector<double>>(std::move(values));
    return CdfFn(
        [sorted](double t) {
          const auto it = std::upper_bound(sorted->begin(), sorted->end(), t);
          return static_cast<double>(it - sorted->begin()) / static_cast<double>(sorted->size());
        },
        Kind::Empirical);
  }

  double operator()(double t) const { return fn_(t); }
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  void spot_check() const {
    double prev = -1.0;
    for (int k = -60; k <= 60; ++k) {
      const double t = k == -60 ? -1e300 : (k == 60 ? 1e300 : 0.5 * k);
      const double v = fn_(t);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "CdfFn: value " << v << " at t=" << t << " outside [0, 1]";
        throw InvalidCdf(msg.str());
      }
      if (v < prev) {
        std::ostringstream msg;
        msg << "CdfFn: decreasing at t=" << t;
        throw InvalidCdf(msg.str());
      }
      prev = v;
    }
    if (fn_(-1e300) > 1e-6 || fn_(1e300) < 1.0 - 1e-6) {
      throw InvalidCdf("CdfFn: limits at -inf/+inf are not 0/1");
    }
  }

  std::function<double(double)> fn_;
  Kind kind_;
};

/// Whether an oracle statistic accepts an empirical CDF.
enum class OracleUse { RequireAnalytic, AllowEmpirical };

namespace detail {

struct OracleInputs {
  std::vector<double> values;       // F(y_i), original index order
  std::vector<double> conc;         // F(y) in ascending-x order
  std::vector<double> sorted;       // F(y) ascending
};

inline OracleInputs oracle_inputs(const PairedSample& sample, const CdfFn& cdf, TiePolicy policy,
                                  OracleUse use, const char* who) {
  const std::size_t n = sample.size();
  if (n < 2) throw InvalidInput(std::string(who) + ": need at least 2 observations");
  if (cdf.kind() == CdfFn::Kind::Empirical && use != OracleUse::AllowEmpirical) {
    throw InvalidCdf(std::string(who) +
                     ": empirical CDF supplied as an oracle; pass OracleUse::AllowEmpirical");
  }
  const NeighborMap map = neighbor_map(sample.x(), policy);
  OracleInputs in;
  in.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = cdf(sample.y()[i]);
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream msg;
      msg << who << ": CDF value " << v << " at y=" << sample.y()[i] << " outside [0, 1]";
      throw InvalidCdf(msg.str());
    }
    in.values[i] = v;
  }
  in.conc.resize(n);
  for (std::size_t k = 0; k < n; ++k) in.conc[k] = in.values[map.order[k]];
  in.sorted = in.values;
  std::sort(in.sorted.begin(), in.sorted.end());
  return in;
}

}  // namespace detail

/// sum_{i != j} |a_i - a_j| = 2 sum_k (2k - n - 1) a_(k), for ascending a (k one-based).
inline double pairwise_abs_diff_sum(std::span<const double> sorted) {
  const auto n = static_cast<double>(sorted.size());
  CompensatedSum sum;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    sum += (2.0 * static_cast<double>(k + 1) - n - 1.0) * sorted[k];
  }
  return 2.0 * sum.value();
}

/// sum_{i != j} min{a_i, a_j} = 2 sum_k (n - k) a_(k), for ascending a (k one-based).
inline double pairwise_min_sum(std::span<const double> sorted) {
  const auto n = static_cast<double>(sorted.size());
  CompensatedSum sum;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    sum += (n - static_cast<double>(k + 1)) * sorted[k];
  }
  return 2.0 * sum.value();
}

/// xi_n^* = 3n/(n^2-1) [ (1/n) sum_{i!=j} |F(y_i) - F(y_j)| - sum_{i<n} |F(y_(i+1)) - F(y_(i))| ].
inline double xi_star(const PairedSample& sample, const CdfFn& cdf,
                      TiePolicy policy = TiePolicy::reject(),
                      OracleUse use = OracleUse::RequireAnalytic) {
  const auto in = detail::oracle_inputs(sample, cdf, policy, use, "xi_star");
  const auto n = static_cast<double>(sample.size());
  CompensatedSum adjacent;
  for (std::size_t k = 0; k + 1 < in.conc.size(); ++k) adjacent += std::abs(in.conc[k + 1] - in.conc[k]);
  return 3.0 * n / (n * n - 1.0) * (pairwise_abs_diff_sum(in.sorted) / n - adjacent.value());
}

/// xi_n^*' = 6n/(n^2-1) [ sum_{i<n} min{F(y_(i)), F(y_(i+1))} - (1/n) sum_{i!=j} min{F(y_i), F(y_j)} ].
inline double xi_star_prime(const PairedSample& sample, const CdfFn& cdf,
                            TiePolicy policy = TiePolicy::reject(),
                            OracleUse use = OracleUse::RequireAnalytic) {
  const auto in = detail::oracle_inputs(sample, cdf, policy, use, "xi_star_prime");
  const auto n = static_cast<double>(sample.size());
  CompensatedSum adjacent;
  for (std::size_t k = 0; k + 1 < in.conc.size(); ++k) adjacent += std::min(in.conc[k], in.conc[k + 1]);
  return 6.0 * n / (n * n - 1.0) * (adjacent.value() - pairwise_min_sum(in.sorted) / n);
}

}  // namespace xilab

#endif  // XILAB_ORACLE_STAT_HPP
