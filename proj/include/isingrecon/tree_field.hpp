#pragma once

#include <cmath>

#include "isingrecon/error.hpp"
#include "isingrecon/numeric.hpp"

namespace isingrecon {

/// Residual of the plus-boundary fixed point h = (degree-1) atanh(tanh theta tanh h).
inline double boundary_field_residual(int degree, double theta, double h) {
  return (degree - 1) * atanh_tanh_product(theta, h) - h;
}

/// Unique positive root h* of the tree fixed-point equation, or 0 when only
/// the trivial root exists ((degree-1) tanh theta <= 1).
inline double tree_boundary_field(int degree, double theta, double tol = 1e-12) {
  require(tol > 0, Errc::invalid_parameter, "tolerance must be positive");
  require(degree >= 3, Errc::invalid_parameter, "tree fixed point needs degree >= 3");
  require(theta > 0, Errc::invalid_parameter, "tree fixed point needs theta > 0");
  if ((degree - 1) * std::tanh(theta) <= 1.0) return 0.0;
  auto f = [&](double h) { return boundary_field_residual(degree, theta, h); };
  const double lo = 1e-12;
  if (f(lo) <= 0) return 0.0;
  const double hi = 50.0 * std::max(1.0, theta * degree);
  double h = bisect(f, lo, hi, std::min(tol, 1e-13) * std::max(1.0, hi));
  // Newton polish on the residual.
  for (int it = 0; it < 8 && std::abs(f(h)) >= 0.1 * tol; ++it) {
    const double t = std::tanh(theta);
    const double th = std::tanh(h);
    const double slope = (degree - 1) * t * (1.0 - th * th) / (1.0 - t * t * th * th) - 1.0;
    if (slope == 0.0) break;
    const double next = h - f(h) / slope;
    if (!(next > 0) || std::abs(f(next)) >= std::abs(f(h))) break;
    h = next;
  }
  return h;
}

/// Rooted regular tree of the given degree with t generations and field h*
/// on its leaves.
struct TreeModel {
  int degree = 0;
  double theta = 0.0;
  int generations = 0;
  double h_star = 0.0;
};

inline TreeModel make_tree_model(int degree, double theta, int generations, double tol = 1e-12) {
  require(generations >= 1, Errc::invalid_parameter, "need at least one generation");
  return {degree, theta, generations, tree_boundary_field(degree, theta, tol)};
}

/// Self-avoiding-walk bound on C_ij at graph distance dist for maximum degree
/// `degree`: degree^(dist-1) tanh(theta)^dist / (1 - degree tanh theta).
inline double saw_correlation_bound(int degree, double theta, int dist) {
  require(dist >= 1, Errc::invalid_parameter, "distance must be >= 1");
  const double t = std::tanh(theta);
  require(degree * t < 1.0, Errc::bound_inapplicable, "bound needs degree * tanh(theta) < 1");
  return std::pow(static_cast<double>(degree), dist - 1) * std::pow(t, dist) / (1.0 - degree * t);
}

}  // namespace isingrecon
