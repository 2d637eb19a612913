#ifndef XILAB_CORE_STAT_HPP
#define XILAB_CORE_STAT_HPP

// Chatterjee's rank correlation and the asymptotic independence test.
//
// All indices are zero-based. Ranks are one-based counts:
// r_i = #{j : y_j <= y_i}, so tied y values share the maximal rank.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xilab/error.hpp"
#include "xilab/normal.hpp"
#include "xilab/rng.hpp"

namespace xilab {

namespace detail {

inline void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << what << ": non-finite entry at index " << i;
      throw InvalidInput(msg.str());
    }
  }
}

}  // namespace detail

/// n paired observations (x_i, y_i).
class PairedSample {
 public:
  PairedSample() = default;
  PairedSample(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) {
      throw InvalidInput("PairedSample: x has " + std::to_string(x_.size()) + " entries but y has " +
                         std::to_string(y_.size()));
    }
    detail::require_finite(x_, "PairedSample x");
    detail::require_finite(y_, "PairedSample y");
  }

  [[nodiscard]] std::span<const double> x() const noexcept { return x_; }
  [[nodiscard]] std::span<const double> y() const noexcept { return y_; }
  [[nodiscard]] std::size_t size() const noexcept { return x_.size(); }

  /// Same pairs with the roles of x and y exchanged.
  [[nodiscard]] PairedSample swapped() const { return PairedSample(y_, x_); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

using RankVector = std::vector<std::int64_t>;

/// How ties among x values are handled.
class TiePolicy {
 public:
  enum class Kind { Reject, RandomBreak };

  static constexpr TiePolicy reject() noexcept { return TiePolicy(Kind::Reject, 0); }
  static constexpr TiePolicy random_break(std::uint64_t seed) noexcept {
    return TiePolicy(Kind::RandomBreak, seed);
  }

  [[nodiscard]] constexpr Kind kind() const noexcept { return kind_; }
  [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }

 private:
  constexpr TiePolicy(Kind kind, std::uint64_t seed) noexcept : kind_(kind), seed_(seed) {}
  Kind kind_;
  std::uint64_t seed_;
};

/// Ascending-x traversal of the sample and the nearest-right-neighbor map.
struct NeighborMap {
  /// order[k] is the index with the (k+1)-th smallest x.
  std::vector<std::size_t> order;
  /// position[i] is the zero-based x-rank of index i.
  std::vector<std::size_t> position;

  [[nodiscard]] std::size_t size() const noexcept { return order.size(); }

  /// Index immediately to the right of i in x, or nullopt for the x-maximum.
  [[nodiscard]] std::optional<std::size_t> next(std::size_t i) const {
    const std::size_t p = position.at(i);
    if (p + 1 == order.size()) return std::nullopt;
    return order[p + 1];
  }

  [[nodiscard]] std::size_t first() const { return order.front(); }
  [[nodiscard]] std::size_t terminal() const { return order.back(); }
};

/// Max-ranks r_i = #{j : values_j <= values_i}. O(n log n).
inline RankVector compute_ranks(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("compute_ranks: empty input");
  detail::require_finite(values, "compute_ranks");
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankVector ranks(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && values[idx[stop]] == values[idx[start]]) ++stop;
    for (std::size_t k = start; k < stop; ++k) ranks[idx[k]] = static_cast<std::int64_t>(stop);
    start = stop;
  }
  return ranks;
}

inline NeighborMap neighbor_map(std::span<const double> x, TiePolicy policy) {
  const std::size_t n = x.size();
  if (n < 2) throw InvalidInput("neighbor_map: need at least 2 observations, got " + std::to_string(n));
  detail::require_finite(x, "neighbor_map");

  NeighborMap map;
  map.order.resize(n);
  std::iota(map.order.begin(), map.order.end(), std::size_t{0});
  if (policy.kind() == TiePolicy::Kind::RandomBreak) {
    // Uniform shuffle first; the stable sort then leaves tied x values in shuffled order.
    Rng rng(policy.seed());
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(map.order[i], map.order[j]);
    }
  }
  std::stable_sort(map.order.begin(), map.order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  if (policy.kind() == TiePolicy::Kind::Reject) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (x[map.order[k]] == x[map.order[k + 1]]) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "ties in x: value " << x[map.order[k]] << " occurs at indices " << map.order[k]
            << " and " << map.order[k + 1] << " (use a random tie-breaking policy)";
        throw TieError(msg.str());
      }
    }
  }

  map.position.resize(n);
  for (std::size_t k = 0; k < n; ++k) map.position[map.order[k]] = k;
  return map;
}

/// y-ranks listed in ascending-x order: R_(1), ..., R_(n).
inline RankVector concomitant_ranks(const PairedSample& sample, TiePolicy policy) {
  const NeighborMap map = neighbor_map(sample.x(), policy);
  const RankVector ranks = compute_ranks(sample.y());
  RankVector out(sample.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = ranks[map.order[k]];
  return out;
}

/// xi_n from concomitant ranks; the gap sum is exact integer arithmetic.
inline double xi_n_from_concomitants(std::span<const std::int64_t> conc) {
  const std::size_t n = conc.size();
  if (n < 2) throw InvalidInput("xi_n: need at least 2 observations, got " + std::to_string(n));
  std::int64_t gaps = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::int64_t d = conc[k + 1] - conc[k];
    gaps += d < 0 ? -d : d;
  }
  // One rounding: the numerator is an exact integer, so the result is the
  // correctly rounded value of the rational xi_n.
  const auto denom = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n) - 1;
  return static_cast<double>(denom - 3 * gaps) / static_cast<double>(denom);
}

/// xi_n = 1 - 3/(n^2-1) * sum_{i<n} |R_(i+1) - R_(i)|.
inline double xi_n(const PairedSample& sample, TiePolicy policy = TiePolicy::reject()) {
  if (sample.size() < 2) {
    throw InvalidInput("xi_n: need at least 2 observations, got " + std::to_string(sample.size()));
  }
  return xi_n_from_concomitants(concomitant_ranks(sample, policy));
}

inline double xi_prime_from_concomitants(std::span<const std::int64_t> conc) {
  const std::size_t n = conc.size();
  if (n < 2) throw InvalidInput("xi_prime: need at least 2 observations, got " + std::to_string(n));
  std::int64_t mins = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) mins += std::min(conc[k], conc[k + 1]);
  const double nn = static_cast<double>(n);
  return 6.0 * static_cast<double>(mins) / (nn * nn - 1.0);
}

/// Min-rank form: 6/(n^2-1) * sum over the n-1 adjacent x-pairs of min{R_i, R_N(i)}.
/// Without ties in y,
///   xi_n = xi_prime - (2n+1)/(n-1) + 3 (R_(1) + R_(n)) / (n^2-1).
inline double xi_prime(const PairedSample& sample, TiePolicy policy = TiePolicy::reject()) {
  if (sample.size() < 2) {
    throw InvalidInput("xi_prime: need at least 2 observations, got " + std::to_string(sample.size()));
  }
  return xi_prime_from_concomitants(concomitant_ranks(sample, policy));
}

/// Outcome of the one-sided asymptotic test of independence.
struct TestResult {
  double xi = 0.0;
  double z = 0.0;
  double p_value = 0.5;
  double alpha = 0.05;
  bool reject = false;
};

/// Null variance of sqrt(n) xi_n.
inline constexpr double kNullVariance = 0.4;

/// Builds the decision for a given z-score: reject iff z >= z_alpha.
inline TestResult test_from_z(double xi, double z, double alpha) {
  const double z_alpha = normal_upper_quantile(alpha);
  TestResult result;
  result.xi = xi;
  result.z = z;
  result.p_value = normal_sf(z);
  result.alpha = alpha;
  result.reject = z >= z_alpha;
  return result;
}

inline TestResult test_from_xi(double xi, std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const double z = std::sqrt(static_cast<double>(n)) * xi / std::sqrt(kNullVariance);
  return test_from_z(xi, z, alpha);
}

/// Level-alpha test based on sqrt(n) xi_n -> N(0, 2/5) under independence.
inline TestResult null_test(const PairedSample& sample, double alpha,
                            TiePolicy policy = TiePolicy::reject()) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  return test_from_xi(xi_n(sample, policy), sample.size(), alpha);
}

}  // namespace xilab

#endif  // XILAB_CORE_STAT_HPP
