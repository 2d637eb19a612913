#ifndef XILAB_QUADRATURE_HPP
#define XILAB_QUADRATURE_HPP

// Adaptive 1-D quadrature on finite, half-infinite or infinite intervals.
// Backed by Boost.Math's adaptive Gauss-Kronrod (61-point) rule, which maps
// infinite ranges onto finite ones internally.

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xilab/error.hpp"

namespace xilab {

inline constexpr double kQuadratureAbsTol = 1e-9;

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// Integrates f over [a, b]; a and b may be infinite.
/// Throws NumericError naming `label` when the error estimate exceeds abs_tol.
template <class F>
QuadratureResult integrate_checked(F&& f, double a, double b, std::string_view label,
                                   double abs_tol = kQuadratureAbsTol, unsigned max_depth = 18) {
  QuadratureResult out;
  try {
    out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, max_depth, 1e-13, &out.error, &out.l1);
  } catch (const std::exception& e) {
    throw NumericError("quadrature failed for " + std::string(label) + ": " + e.what());
  }
  if (!std::isfinite(out.value) || !(out.error <= abs_tol)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "quadrature did not converge for " << label << " on [" << a << ", " << b
        << "]: value=" << out.value << " error estimate=" << out.error << " (tolerance " << abs_tol
        << ")";
    throw NumericError(msg.str());
  }
  return out;
}

template <class F>
double integrate(F&& f, double a, double b, std::string_view label,
                 double abs_tol = kQuadratureAbsTol) {
  return integrate_checked(std::forward<F>(f), a, b, label, abs_tol).value;
}

}  // namespace xilab

#endif  // XILAB_QUADRATURE_HPP
