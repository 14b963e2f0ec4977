#pragma once

#include <cmath>
#include <vector>

#include "isingrecon/numeric.hpp"
#include "isingrecon/tree_field.hpp"

namespace isingrecon {

struct TreeLimitReport {
  int degree = 0;
  double theta = 0.0;
  double h_star = 0.0;
  double a = 0.0;   // limit of (Q_SS)_ii
  double b = 0.0;   // limit of (Q_SS)_ij
  double c1 = 0.0;
  double c2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double b_limit = 0.0;  // B, the limiting incoherence value
  double c_min = 0.0;
  double s_value = 0.0;  // c1 (alpha - 1) + c2 (1 - beta)
};

namespace detail {

inline double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// 1 / cosh^2 x without overflow.
inline double sech2(double x) {
  const double e = std::exp(-2.0 * std::abs(x));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace detail

/// Depth-one tree with leaf fields h: weights over k plus-leaves (M = 2k - degree)
/// are C(degree, k) e^{hM} 2 cosh(theta M). Sums run over k by exchangeability.
inline TreeLimitReport tree_limit_report(int degree, double theta, double tol = 1e-13) {
  require(degree >= 4, Errc::invalid_parameter, "tree limit needs degree >= 4");
  require(theta > 0.0 && std::isfinite(theta), Errc::invalid_parameter, "theta must be > 0");
  TreeLimitReport r;
  r.degree = degree;
  r.theta = theta;
  r.h_star = tree_boundary_field(degree, theta, tol);
  require(r.h_star > 0.0, Errc::out_of_regime, "no positive boundary field at this theta");
  const double h = r.h_star;
  const int d = degree;
  std::vector<double> lw(static_cast<std::size_t>(d + 1));
  double top = -INFINITY;
  for (int k = 0; k <= d; ++k) {
    const int m = 2 * k - d;
    lw[k] = detail::log_choose(d, k) + h * m + log_2cosh(theta * m);
    top = std::max(top, lw[k]);
  }
  double z = 0, a = 0, bb = 0, c1 = 0, c2 = 0;
  for (int k = 0; k <= d; ++k) {
    const double m = 2.0 * k - d;
    const double w = std::exp(lw[k] - top);
    const double g = detail::sech2(theta * m);
    z += w;
    a += w * g;
    bb += w * g * (m * m - d) / (d * (d - 1.0));
    // Fraction of configurations with a given leaf at +1 is k / d.
    c1 += w * g * m * k / d;
    c2 += w * g * m * (d - k) / d;
  }
  r.a = a / z;
  r.b = bb / z;
  r.c1 = c1 / z;
  r.c2 = c2 / z;
  const double one_minus_alpha = 1.0 / (1.0 + std::exp(2.0 * (h + theta)));
  const double one_minus_beta = 1.0 / (1.0 + std::exp(-2.0 * (h - theta)));
  r.alpha = 1.0 - one_minus_alpha;
  r.beta = 1.0 - one_minus_beta;
  r.b_limit = std::tanh(d * h / (d - 1.0)) * (r.c1 + r.c2) / (r.c1 - r.c2);
  r.c_min = std::min(r.a - r.b, r.c1 - r.c2);
  r.s_value = r.c2 * one_minus_beta - r.c1 * one_minus_alpha;
  return r;
}

struct ScanRange {
  double lo = 0.01;
  double hi = 5.0;
  int steps = 4000;
};

/// Root of B(theta) = 1 for the given degree, located through S(theta), which
/// has the sign of B - 1 and stays clear of rounding where B is close to 1.
inline double theta_thr(int degree, double tol = 1e-10, ScanRange range = {}) {
  require(degree >= 4, Errc::invalid_parameter, "theta_thr needs degree >= 4");
  // B is only defined where the boundary field is positive.
  const double onset = std::atanh(1.0 / (degree - 1.0));
  const double lo = std::max(range.lo, onset * (1.0 + 1e-9));
  require(lo < range.hi, Errc::root_not_found, "scan range lies below the ordered phase");
  auto f = [degree](double th) { return tree_limit_report(degree, th).s_value; };
  const auto br = scan_upcrossing(f, lo, range.hi, range.steps);
  require(br.has_value(), Errc::root_not_found, "B(theta) - 1 has no sign change in the scan range");
  return bisect(f, br->first, br->second, tol);
}

struct HInfinity {
  double h = 0.0;
  double theta_tilde = 0.0;
  double residual = 0.0;
};

/// Root of h tanh h = 1 and theta_tilde = h^2.
inline HInfinity h_infinity(double tol = 1e-14) {
  require(tol > 0.0, Errc::invalid_parameter, "tolerance must be positive");
  auto f = [](double h) { return h * std::tanh(h) - 1.0; };
  const double h = bisect(f, 1e-9, 10.0, tol);
  return {h, h * h, f(h)};
}

}  // namespace isingrecon
