#pragma once

#include <cmath>

#include "isingrecon/enumeration.hpp"
#include "isingrecon/gibbs.hpp"
#include "isingrecon/graph.hpp"
#include "isingrecon/tree_field.hpp"

namespace isingrecon {

struct ThresholdCertificate {
  int degree = 0;
  double theta = 0.0;
  int p = 0;
  double edge_corr = 0.0;         // correlation across the isolated edge
  double max_nonedge_corr = 0.0;  // inside the regular component
  double certificate = 0.0;       // max_nonedge_corr - edge_corr
  double m_squared = 0.0;         // tanh^2(degree h* / (degree - 1))
  bool exact = true;
  bool fails() const { return certificate > 0.0; }
};

/// Regular component plus one isolated edge. A positive certificate means no
/// threshold separates the isolated edge from a non-edge.
inline ThresholdCertificate thresholding_failure_certificate(int degree, double theta, int p,
                                                             std::uint64_t seed,
                                                             long fallback_samples = 20000) {
  require(theta > 0.0, Errc::invalid_parameter, "theta must be > 0");
  const Graph g = make_regular_plus_edge(p, degree, seed);
  ThresholdCertificate c;
  c.degree = degree;
  c.theta = theta;
  c.p = p;
  Eigen::MatrixXd corr;
  if (p <= kEnumerationBudget) {
    const auto d = exact_moments(g, theta);
    corr = d.correlations();
    c.edge_corr = d.correlation(p - 1, p);
  } else {
    c.exact = false;
    corr = empirical_correlations(
        draw_samples(CouplingField::homogeneous(g, theta), fallback_samples, derive_seed(seed, 1)));
    c.edge_corr = std::tanh(theta);
  }
  c.max_nonedge_corr = -1.0;
  for (Vertex i = 1; i <= p - 2; ++i)
    for (Vertex j = i + 1; j <= p - 2; ++j)
      if (!g.has_edge(i, j)) c.max_nonedge_corr = std::max(c.max_nonedge_corr, corr(i - 1, j - 1));
  c.certificate = c.max_nonedge_corr - c.edge_corr;
  if (degree >= 3) {
    const double h = tree_boundary_field(degree, theta);
    c.m_squared = std::pow(std::tanh(degree * h / (degree - 1.0)), 2);
  }
  return c;
}

}  // namespace isingrecon
