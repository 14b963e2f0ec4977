#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "isingrecon/enumeration.hpp"
#include "isingrecon/learners/pseudo_likelihood.hpp"

namespace isingrecon {

struct PopulationHessian {
  Vertex root = 0;
  std::vector<Vertex> others;  // row/column k of q belongs to others[k]
  Eigen::MatrixXd q;
  // max_j |E{X_j (tanh(sum_t theta_rt X_t) - X_r)}|; zero at the true couplings.
  double gradient_norm = 0.0;
};

/// Q_ij = E{X_i X_j / cosh^2(sum_t theta_rt X_t)} over i, j != r, by exact summation.
inline PopulationHessian population_hessian(const ExactDistribution& d, Vertex r) {
  const int p = d.vertex_count();
  require(r >= 1 && r <= p, Errc::invalid_parameter, "root out of range");
  PopulationHessian out;
  out.root = r;
  out.others = other_vertices(p, r);
  const std::size_t m = out.others.size();
  std::vector<std::pair<int, double>> row;
  for (const auto& n : d.field().row(r)) row.push_back({n.vertex - 1, n.theta});
  std::vector<int> idx;
  for (Vertex v : out.others) idx.push_back(v - 1);
  const std::size_t pairs = m * (m + 1) / 2;
  const auto e = d.expectations(pairs + m, [&](std::span<const double> x, double w,
                                                std::vector<double>& acc) {
    double s = 0.0;
    for (const auto& [j, th] : row) s += th * x[j];
    const double c = std::cosh(s);
    const double wg = w / (c * c);
    const double resid = w * (std::tanh(s) - x[r - 1]);
    std::size_t k = 0;
    for (std::size_t a = 0; a < m; ++a) {
      const double xa = wg * x[idx[a]];
      for (std::size_t b = a; b < m; ++b) acc[k++] += xa * x[idx[b]];
    }
    for (std::size_t a = 0; a < m; ++a) acc[pairs + a] += resid * x[idx[a]];
  });
  out.q.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::size_t k = 0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      out.q(a, b) = out.q(b, a) = e[k++];
    }
  for (std::size_t a = 0; a < m; ++a)
    out.gradient_norm = std::max(out.gradient_norm, std::abs(e[pairs + a]));
  return out;
}

struct IncoherenceReport {
  Vertex root = 0;
  std::vector<Vertex> s;       // neighborhood
  std::vector<Vertex> s_comp;  // remaining vertices other than r
  Eigen::MatrixXd q_ss;
  Eigen::MatrixXd q_scs;
  double norm = 0.0;           // max_i |(Q_ScS Q_SS^-1 1)_i|
  double sigma_min = 0.0;
  Eigen::VectorXd row_values;  // Q_ScS Q_SS^-1 1
  Eigen::VectorXd row_l1;      // l1 norms of the rows of Q_ScS Q_SS^-1
};

inline IncoherenceReport incoherence(const PopulationHessian& h, const std::vector<Vertex>& s) {
  IncoherenceReport r;
  r.root = h.root;
  std::vector<Eigen::Index> in, out;
  for (std::size_t k = 0; k < h.others.size(); ++k) {
    const bool member = std::find(s.begin(), s.end(), h.others[k]) != s.end();
    (member ? in : out).push_back(static_cast<Eigen::Index>(k));
    (member ? r.s : r.s_comp).push_back(h.others[k]);
  }
  require(in.size() == s.size(), Errc::invalid_parameter, "neighborhood contains the root or unknown vertices");
  require(!in.empty(), Errc::invalid_parameter, "neighborhood must be non-empty");
  r.q_ss = h.q(in, in);
  r.q_scs = h.q(out, in);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.q_ss, Eigen::EigenvaluesOnly);
  r.sigma_min = eig.eigenvalues().minCoeff();
  require(r.sigma_min >= 1e-12, Errc::singular_hessian, "Q_SS is singular");
  const Eigen::LLT<Eigen::MatrixXd> llt(r.q_ss);
  require(llt.info() == Eigen::Success, Errc::singular_hessian, "Q_SS is not positive definite");
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(r.q_ss.rows(), r.q_ss.cols()));
  const Eigen::MatrixXd proj = r.q_scs * inv;
  r.row_values = proj.rowwise().sum();
  r.row_l1 = proj.cwiseAbs().rowwise().sum();
  r.norm = r.row_values.size() ? r.row_values.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

/// Incoherence at root r with S = vertices coupled to r by a nonzero coupling.
inline IncoherenceReport incoherence(const ExactDistribution& d, Vertex r) {
  std::vector<Vertex> s;
  for (const auto& n : d.field().row(r))
    if (n.theta != 0.0) s.push_back(n.vertex);
  return incoherence(population_hessian(d, r), s);
}

}  // namespace isingrecon
