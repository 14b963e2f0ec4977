#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "isingrecon/enumeration.hpp"
#include "isingrecon/gibbs.hpp"
#include "isingrecon/learners/neighborhoods.hpp"
#include "isingrecon/numeric.hpp"

namespace isingrecon {

namespace detail {

/// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// Vertices other than r, in increasing order. Coefficient k of a
/// neighborhood vector belongs to others(p, r)[k].
inline std::vector<Vertex> other_vertices(int p, Vertex r) {
  std::vector<Vertex> out;
  for (Vertex v = 1; v <= p; ++v)
    if (v != r) out.push_back(v);
  return out;
}

/// Conditional negative log-likelihood of x_r given the rest, averaged over samples.
class PseudoLikelihood {
 public:
  /// Identical sample rows are merged into one weighted row.
  PseudoLikelihood(const SampleSet& s, Vertex r) : root_(r) {
    const int p = s.vertex_count();
    require(r >= 1 && r <= p, Errc::invalid_parameter, "root out of range");
    require(s.sample_count() >= 1, Errc::invalid_parameter, "need at least one sample");
    const long n = s.sample_count();
    n_ = static_cast<double>(n);
    std::vector<long> order(static_cast<std::size_t>(n));
    for (long l = 0; l < n; ++l) order[l] = l;
    auto less = [&s](long a, long b) {
      const auto ra = s.row(a), rb = s.row(b);
      return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::stable_sort(order.begin(), order.end(), less);
    std::vector<long> first;
    std::vector<double> count;
    for (long k = 0; k < n; ++k) {
      if (k == 0 || less(order[k - 1], order[k])) {
        first.push_back(order[k]);
        count.push_back(0.0);
      }
      count.back() += 1.0;
    }
    const auto u = static_cast<Eigen::Index>(first.size());
    x_.resize(u, p - 1);
    y_.resize(u);
    w_ = Eigen::Map<const Eigen::VectorXd>(count.data(), u);
    for (Eigen::Index l = 0; l < u; ++l) {
      const auto row = s.row(first[l]);
      y_(l) = row[r - 1];
      for (int i = 0, k = 0; i < p; ++i)
        if (i != r - 1) x_(l, k++) = row[i];
    }
  }

  Vertex root() const { return root_; }
  Eigen::Index dimension() const { return x_.cols(); }
  Eigen::Index distinct_rows() const { return x_.rows(); }

  double value(const Eigen::VectorXd& theta) const {
    check(theta);
    const Eigen::VectorXd m = x_ * theta;
    detail::CompensatedSum v;
    for (Eigen::Index l = 0; l < m.size(); ++l) v.add(w_(l) * detail::softplus(-2.0 * y_(l) * m(l)));
    return v.value() / n_;
  }

  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    check(theta);
    const Eigen::VectorXd m = x_ * theta;
    Eigen::VectorXd resid(m.size());
    detail::CompensatedSum v;
    for (Eigen::Index l = 0; l < m.size(); ++l) {
      v.add(w_(l) * detail::softplus(-2.0 * y_(l) * m(l)));
      resid(l) = w_(l) * (std::tanh(m(l)) - y_(l));
    }
    grad = x_.transpose() * resid / n_;
    return v.value() / n_;
  }

 private:
  void check(const Eigen::VectorXd& theta) const {
    require(theta.size() == x_.cols(), Errc::invalid_parameter, "coefficient vector has wrong size");
    require(theta.allFinite(), Errc::invalid_parameter, "coefficients must be finite");
  }

  Vertex root_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd w_;
  double n_ = 1.0;
};

struct PlValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

inline PlValue pseudo_likelihood_objective(const Eigen::VectorXd& theta, const SampleSet& s,
                                           Vertex r) {
  PlValue out;
  out.value = PseudoLikelihood(s, r).value_and_gradient(theta, out.gradient);
  return out;
}

struct SolverDiagnostics {
  int iterations = 0;
  double objective = 0.0;  // smooth part plus penalty
  double residual = 0.0;
  bool converged = false;
  std::vector<double> history;  // objective after each accepted step, if requested
};

struct ProxOptions {
  double tol = 1e-6;
  int max_iter = 5000;
  bool record_history = false;
};

/// Distance of -grad from the subdifferential of sum_j w_j |x_j|.
inline double l1_optimality_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                     const Eigen::VectorXd& w) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double d = x(j) != 0.0 ? std::abs(g(j) + w(j) * (x(j) > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(g(j)) - w(j));
    r = std::max(r, d);
  }
  return r;
}

/// Proximal gradient for f(x) + sum_j w_j |x_j| with a Barzilai-Borwein step
/// guess and backtracking on the quadratic upper bound. fg(x, grad) returns f.
template <class FG>
Eigen::VectorXd prox_gradient(FG&& fg, Eigen::VectorXd x, const Eigen::VectorXd& w,
                              const ProxOptions& o, SolverDiagnostics& diag) {
  require(o.tol > 0.0 && o.max_iter >= 0, Errc::invalid_parameter, "bad solver options");
  auto penalty = [&w](const Eigen::VectorXd& v) { return w.dot(v.cwiseAbs()); };
  auto shrink = [&w](const Eigen::VectorXd& v, double t) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double a = std::abs(v(j)) - t * w(j);
      out(j) = a > 0 ? std::copysign(a, v(j)) : 0.0;
    }
    return out;
  };
  Eigen::VectorXd g, gz;
  double f = fg(x, g);
  double obj = f + penalty(x);
  double step = 1.0;
  diag = {};
  int it = 0;
  for (; it < o.max_iter; ++it) {
    diag.residual = l1_optimality_residual(x, g, w);
    if (diag.residual < o.tol) {
      diag.converged = true;
      break;
    }
    Eigen::VectorXd z;
    double fz = 0.0, objz = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 200; ++bt) {
      z = shrink(x - step * g, step);
      const Eigen::VectorXd d = z - x;
      fz = fg(z, gz);
      objz = fz + penalty(z);
      // The curvature test implies the quadratic bound by convexity and stays
      // accurate when function differences are at rounding level.
      const double q = d.squaredNorm() / (2.0 * step);
      if (fz <= f + g.dot(d) + q || d.dot(gz - g) <= q) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd s = z - x;
    const Eigen::VectorXd yv = gz - g;
    const double sy = s.dot(yv);
    step = sy > 0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : std::min(step * 2.0, 1e12);
    x = std::move(z);
    g = gz;
    f = fz;
    obj = objz;
    if (o.record_history) diag.history.push_back(obj);
  }
  if (!diag.converged) {
    diag.residual = l1_optimality_residual(x, g, w);
    diag.converged = diag.residual < o.tol;
  }
  diag.iterations = it;
  diag.objective = obj;
  return x;
}

struct RlrOptions {
  double lambda = 0.1;
  double tol = 1e-6;
  int max_iter = 5000;
  double selection = 1e-6;
  bool record_history = false;
};

struct NeighborhoodEstimate {
  Vertex root = 0;
  std::vector<Vertex> others;   // vertex for each coefficient
  Eigen::VectorXd theta;        // coefficients over j != r
  std::vector<Vertex> neighbors;  // j with theta_rj > selection
  SolverDiagnostics diagnostics;
};

inline NeighborhoodEstimate rlr_neighborhood(const PseudoLikelihood& pl, int p,
                                             const RlrOptions& o,
                                             const Eigen::VectorXd* warm = nullptr) {
  require(o.lambda >= 0.0 && std::isfinite(o.lambda), Errc::invalid_parameter,
          "lambda must be >= 0");
  require(o.selection >= 0.0, Errc::invalid_parameter, "selection threshold must be >= 0");
  NeighborhoodEstimate est;
  est.root = pl.root();
  est.others = other_vertices(p, pl.root());
  const Eigen::Index d = pl.dimension();
  Eigen::VectorXd x0 = warm ? *warm : Eigen::VectorXd::Zero(d);
  require(x0.size() == d, Errc::invalid_parameter, "warm start has wrong size");
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(d, o.lambda);
  ProxOptions po{o.tol, o.max_iter, o.record_history};
  est.theta = prox_gradient(
      [&pl](const Eigen::VectorXd& t, Eigen::VectorXd& g) { return pl.value_and_gradient(t, g); },
      std::move(x0), w, po, est.diagnostics);
  for (Eigen::Index k = 0; k < d; ++k)
    if (est.theta(k) > o.selection) est.neighbors.push_back(est.others[k]);
  return est;
}

inline NeighborhoodEstimate rlr_neighborhood(const SampleSet& s, Vertex r, const RlrOptions& o) {
  return rlr_neighborhood(PseudoLikelihood(s, r), s.vertex_count(), o);
}

/// Smallest lambda giving the all-zero solution: max_j |dL/dtheta_j (0)|.
inline double null_lambda(const PseudoLikelihood& pl) {
  Eigen::VectorXd g;
  pl.value_and_gradient(Eigen::VectorXd::Zero(pl.dimension()), g);
  return g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
}

struct RlrGraphResult {
  EdgeSet graph;
  std::vector<NeighborhoodEstimate> vertices;
  bool all_converged() const {
    return std::all_of(vertices.begin(), vertices.end(),
                       [](const auto& v) { return v.diagnostics.converged; });
  }
};

inline RlrGraphResult rlr_graph(const SampleSet& s, const RlrOptions& o,
                                EdgeRule rule = EdgeRule::or_rule, std::size_t threads = 0) {
  const int p = s.vertex_count();
  RlrGraphResult out;
  out.vertices.resize(static_cast<std::size_t>(p));
  parallel_for(
      static_cast<std::size_t>(p),
      [&](std::size_t i) { out.vertices[i] = rlr_neighborhood(s, static_cast<Vertex>(i + 1), o); },
      threads);
  std::vector<std::vector<Vertex>> nbhd;
  for (const auto& v : out.vertices) nbhd.push_back(v.neighbors);
  out.graph = combine_neighborhoods(p, nbhd, rule);
  return out;
}

struct GpPopulationEstimate {
  double theta13 = 0.0;
  double theta12 = 0.0;
  SolverDiagnostics diagnostics;
};

/// Law of (x_1, x_2, sum_{k>=3} x_k) under the homogeneous model on G_p.
/// Entry [x1][x2][(K + p - 2) / 2] with x = 0 for -1 and 1 for +1.
inline std::vector<double> gp_root_statistics(double theta, int p) {
  require(p >= 3, Errc::invalid_parameter, "G_p needs p >= 3");
  const ExactDistribution d = exact_moments(make_toy_gp(p), theta);
  const std::size_t kb = static_cast<std::size_t>(p - 1);
  return d.expectations(4 * kb, [p, kb](std::span<const double> x, double w, std::vector<double>& acc) {
    double k = 0.0;
    for (int i = 2; i < p; ++i) k += x[i];
    const std::size_t idx = (x[0] > 0 ? 2 * kb : 0) + (x[1] > 0 ? kb : 0) +
                            static_cast<std::size_t>(std::lround((k + p - 2) / 2.0));
    acc[idx] += w;
  });
}

/// Population RLR at root 1 of G_p with theta_13 = ... = theta_1p tied.
/// Minimizes L'(a, b) + lambda (p - 2)|a| + lambda |b|.
inline GpPopulationEstimate population_rlr_gp(double theta, int p, double lambda,
                                              double tol = 1e-10) {
  require(p >= 5, Errc::invalid_parameter, "population G_p solver needs p >= 5");
  require(theta > 0.0 && std::isfinite(theta), Errc::invalid_parameter, "theta must be > 0");
  require(lambda >= 0.0 && std::isfinite(lambda), Errc::invalid_parameter, "lambda must be >= 0");
  const std::vector<double> law = gp_root_statistics(theta, p);
  const std::size_t kb = static_cast<std::size_t>(p - 1);
  auto fg = [&](const Eigen::VectorXd& t, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Zero(2);
    double v = 0.0;
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2)
        for (std::size_t k = 0; k < kb; ++k) {
          const double pr = law[2 * kb * s1 + kb * s2 + k];
          if (pr == 0.0) continue;
          const double x1 = s1 ? 1.0 : -1.0, x2 = s2 ? 1.0 : -1.0;
          const double big = 2.0 * static_cast<double>(k) - (p - 2);
          const double m = t(0) * big + t(1) * x2;
          v += pr * detail::softplus(-2.0 * x1 * m);
          const double r = std::tanh(m) - x1;
          g(0) += pr * big * r;
          g(1) += pr * x2 * r;
        }
    return v;
  };
  Eigen::VectorXd w(2);
  w << lambda * (p - 2), lambda;
  GpPopulationEstimate out;
  const Eigen::VectorXd sol =
      prox_gradient(fg, Eigen::VectorXd::Zero(2), w, ProxOptions{tol, 200000, false}, out.diagnostics);
  out.theta13 = sol(0);
  out.theta12 = sol(1);
  return out;
}

}  // namespace isingrecon
