#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "isingrecon/error.hpp"
#include "isingrecon/graph.hpp"

namespace isingrecon {

/// Edge (i, j) iff C(i-1, j-1) >= tau.
inline EdgeSet thresholding(const Eigen::MatrixXd& c, double tau) {
  require(c.rows() == c.cols(), Errc::invalid_parameter, "correlation matrix must be square");
  require(tau > 0.0 && tau < 1.0, Errc::invalid_parameter, "tau must lie in (0, 1)");
  const int p = static_cast<int>(c.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (c(i, j) >= tau) edges.emplace_back(i + 1, j + 1);
  return EdgeSet(p, std::move(edges));
}

inline double tau_tree(double theta) {
  require(theta > 0.0 && std::isfinite(theta), Errc::invalid_parameter, "theta must be > 0");
  const double t = std::tanh(theta);
  return (t + t * t) / 2.0;
}

inline double tau_degree(double theta, int degree) {
  require(theta > 0.0 && std::isfinite(theta), Errc::invalid_parameter, "theta must be > 0");
  require(degree >= 2, Errc::invalid_parameter, "degree must be > 1");
  require(theta < std::atanh(1.0 / (2.0 * degree)), Errc::out_of_regime,
          "theta >= atanh(1/(2 degree))");
  return (std::tanh(theta) + 1.0 / (2.0 * degree)) / 2.0;
}

enum class BoundKind { thr_tree, thr_degree, ind, indd, rlr };

inline BoundKind parse_bound_kind(const std::string& s) {
  if (s == "thr-tree") return BoundKind::thr_tree;
  if (s == "thr-degree") return BoundKind::thr_degree;
  if (s == "ind") return BoundKind::ind;
  if (s == "indd") return BoundKind::indd;
  if (s == "rlr") return BoundKind::rlr;
  throw Error(Errc::parse_error, "unknown bound kind '" + s + "'");
}

struct IndParams {
  double eps = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
};

/// eps = sinh(2 theta)/4, gamma = exp(-4 degree theta) 2^(-2 degree), kappa = tanh theta.
inline IndParams default_ind_params(double theta, int degree) {
  require(theta > 0.0 && std::isfinite(theta), Errc::invalid_parameter, "theta must be > 0");
  require(degree >= 1, Errc::invalid_parameter, "degree must be >= 1");
  return {std::sinh(2.0 * theta) / 4.0,
          std::exp(-4.0 * degree * theta - 2.0 * degree * std::log(2.0)), std::tanh(theta)};
}

struct BoundQuery {
  BoundKind kind = BoundKind::thr_tree;
  double theta = 0.0;
  int degree = 0;
  int p = 0;
  double delta = 0.05;
  // Zero means "use the default from default_ind_params".
  double eps = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
  // Unspecified constant in the RLR bound; 1 is a placeholder, not a derived value.
  double k2 = 1.0;
};

/// Ceiling of the sample complexity bound for the requested algorithm.
inline double sample_bound(const BoundQuery& q) {
  require(q.theta > 0.0 && std::isfinite(q.theta), Errc::invalid_parameter, "theta must be > 0");
  require(q.p >= 1, Errc::invalid_parameter, "p must be >= 1");
  require(q.delta > 0.0 && q.delta < 1.0, Errc::invalid_parameter, "delta must lie in (0, 1)");
  const double t = std::tanh(q.theta);
  const double log2p = std::log(2.0 * q.p / q.delta);
  double n = 0.0;
  switch (q.kind) {
    case BoundKind::thr_tree: {
      const double gap = t - t * t;
      n = 32.0 / (gap * gap) * log2p;
      break;
    }
    case BoundKind::thr_degree: {
      require(q.degree >= 2, Errc::out_of_regime, "thresholding degree bound needs degree > 1");
      require(q.theta < std::atanh(1.0 / (2.0 * q.degree)), Errc::out_of_regime,
              "theta >= atanh(1/(2 degree))");
      const double gap = t - 1.0 / (2.0 * q.degree);
      n = 32.0 / (gap * gap) * log2p;
      break;
    }
    case BoundKind::ind: {
      require(q.degree >= 1, Errc::out_of_regime, "independence test bound needs degree >= 1");
      const IndParams d = default_ind_params(q.theta, q.degree);
      const double eps = q.eps > 0.0 ? q.eps : d.eps;
      const double gamma = q.gamma > 0.0 ? q.gamma : d.gamma;
      n = 100.0 * q.degree / (eps * eps * std::pow(gamma, 4)) * log2p;
      break;
    }
    case BoundKind::indd: {
      require(q.degree >= 1, Errc::out_of_regime, "pruned test bound needs degree >= 1");
      const double kappa = q.kappa > 0.0 ? q.kappa : t;
      n = 8.0 * (kappa * kappa + std::pow(8.0, q.degree)) * std::log(4.0 * q.p / q.delta);
      break;
    }
    case BoundKind::rlr: {
      require(q.degree >= 3, Errc::out_of_regime, "RLR bound needs degree >= 3");
      require(q.k2 > 0.0, Errc::invalid_parameter, "k2 must be > 0");
      n = q.k2 * q.degree / (q.theta * q.theta) *
          std::log(8.0 * static_cast<double>(q.p) * q.p / q.delta);
      break;
    }
  }
  return std::ceil(n);
}

}  // namespace isingrecon
