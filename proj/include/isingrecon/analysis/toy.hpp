#pragma once

#include <cmath>
#include <optional>

#include "isingrecon/error.hpp"
#include "isingrecon/numeric.hpp"

namespace isingrecon {

/// Two paths with correlations a and b glued end to end.
inline double series_corr(double a, double b) { return a * b; }

/// Two paths between the same endpoints.
inline double parallel_corr(double a, double b) { return (a + b) / (1.0 + a * b); }

/// Correlation across a square whose diagonal pair is joined by a bridge with
/// inner correlation c.
inline double bridge_corr(double c, double theta) {
  const double t2 = std::pow(std::tanh(theta), 2);
  return (2.0 * t2 + 2.0 * c * t2) / (1.0 + t2 * t2 + 2.0 * c * t2);
}

/// E{x1 x2} on G_p; G_2 is read as two isolated vertices.
inline double gp_x12(int p, double theta) {
  require(p >= 2, Errc::invalid_parameter, "G_p needs p >= 2");
  const double t = std::tanh(theta);
  return std::tanh((p - 2) * std::atanh(t * t));
}

struct ToyCovariances {
  double x12 = 0.0;
  double x13 = 0.0;
  std::optional<double> x34;  // needs p >= 4
};

inline ToyCovariances toy_covariances(int p, double theta) {
  require(p >= 3, Errc::invalid_parameter, "toy covariances need p >= 3");
  require(theta >= 0.0 && std::isfinite(theta), Errc::invalid_parameter, "theta must be >= 0");
  const double t = std::tanh(theta);
  ToyCovariances c;
  c.x12 = gp_x12(p, theta);
  c.x13 = parallel_corr(t, series_corr(gp_x12(p - 1, theta), t));
  if (p >= 4) c.x34 = bridge_corr(gp_x12(p - 2, theta), theta);
  return c;
}

/// x_degree = E{x1 x2} on G_{degree+2} = tanh(degree atanh(tanh^2 theta)).
inline double gp_neighbor_corr(int degree, double theta) {
  require(degree >= 1, Errc::invalid_parameter, "degree must be >= 1");
  return gp_x12(degree + 2, theta);
}

/// theta at which x_{degree-1}(theta) = tanh theta, for G_p with degree = p - 2.
inline double theta_T(int degree, double tol = 1e-12, double lo = 0.01, double hi = 5.0) {
  require(degree >= 3, Errc::invalid_parameter, "theta_T needs degree >= 3");
  auto f = [degree](double th) { return gp_neighbor_corr(degree - 1, th) - std::tanh(th); };
  const auto br = scan_upcrossing(f, lo, hi);
  require(br.has_value(), Errc::root_not_found, "no crossing in the scan range");
  return bisect(f, br->first, br->second, tol);
}

}  // namespace isingrecon
