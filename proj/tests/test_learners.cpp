#include <gtest/gtest.h>

#include <cmath>

#include "isingrecon/learners/learner.hpp"

using namespace isingrecon;

namespace {

SampleSet draw(const Graph& g, double theta, long n, std::uint64_t seed) {
  return draw_samples(CouplingField::homogeneous(g, theta), n, seed);
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::parse_error;
}

SampleSet random_samples(long n, int p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int8_t> x(static_cast<std::size_t>(n) * p);
  for (auto& v : x) v = uniform01(rng) < 0.5 ? 1 : -1;
  return SampleSet(n, p, std::move(x));
}

}  // namespace

TEST(Thresholding, Basics) {
  EXPECT_EQ(thresholding(Eigen::MatrixXd::Identity(4, 4), 0.5).edge_count(), 0u);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(2, 2);
  c(0, 1) = c(1, 0) = 0.9;
  EXPECT_EQ(thresholding(c, 0.5).edges(), (std::vector<Edge>{Edge(1, 2)}));
  EXPECT_EQ(code_of([&] { thresholding(c, 1.0); }), Errc::invalid_parameter);
}

TEST(Thresholding, ExactTreeCorrelationsRecoverTree) {
  const Graph g = make_tree(10, TreeShape::balanced, 2);
  const auto d = exact_moments(g, 0.5);
  EXPECT_EQ(thresholding(d.correlations(), tau_tree(0.5)), g);
}

TEST(Thresholding, MonotoneInTau) {
  const auto d = exact_moments(make_grid(3, false), 0.4);
  std::size_t prev = 100;
  for (double tau = 0.05; tau < 1.0; tau += 0.05) {
    const auto e = thresholding(d.correlations(), tau).edge_count();
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(Thresholding, TauFormulas) {
  EXPECT_NEAR(tau_tree(0.5), (std::tanh(0.5) + std::pow(std::tanh(0.5), 2)) / 2, 1e-15);
  EXPECT_NEAR(tau_tree(0.5), 0.33784, 1e-5);
  EXPECT_NEAR(tau_degree(0.05, 4), 0.08747, 1e-5);
  EXPECT_EQ(code_of([] { tau_degree(0.2, 4); }), Errc::out_of_regime);
  EXPECT_EQ(code_of([] { tau_tree(0.0); }), Errc::invalid_parameter);
}

TEST(SampleBound, Values) {
  BoundQuery q;
  q.kind = BoundKind::thr_tree;
  q.theta = 0.5;
  q.p = 100;
  q.delta = 0.05;
  EXPECT_EQ(sample_bound(q), 4296.0);

  q.kind = BoundKind::thr_degree;
  q.theta = 0.05;
  q.degree = 4;
  const double t = std::tanh(0.05) - 0.125;
  EXPECT_EQ(sample_bound(q), std::ceil(32.0 / (t * t) * std::log(4000.0)));
  q.theta = 0.2;
  EXPECT_EQ(code_of([&] { sample_bound(q); }), Errc::out_of_regime);

  q.kind = BoundKind::ind;
  q.theta = 0.5;
  const IndParams d = default_ind_params(0.5, 4);
  EXPECT_DOUBLE_EQ(sample_bound(q),
                   std::ceil(400.0 / (d.eps * d.eps * std::pow(d.gamma, 4)) * std::log(4000.0)));

  q.kind = BoundKind::indd;
  EXPECT_DOUBLE_EQ(sample_bound(q),
                   std::ceil(8.0 * (std::pow(std::tanh(0.5), 2) + 4096.0) * std::log(8000.0)));

  q.kind = BoundKind::rlr;
  q.theta = 0.1;
  EXPECT_DOUBLE_EQ(sample_bound(q), std::ceil(400.0 * std::log(8.0 * 1e4 / 0.05)));
  q.degree = 2;
  EXPECT_EQ(code_of([&] { sample_bound(q); }), Errc::out_of_regime);
}

TEST(IndParams, Defaults) {
  const IndParams a = default_ind_params(0.5, 4);
  EXPECT_NEAR(a.eps, std::sinh(1.0) / 4, 1e-15);
  EXPECT_NEAR(a.eps, 0.29380, 1e-5);
  EXPECT_NEAR(a.gamma, 1.3108e-6, 1e-9);
  EXPECT_NEAR(a.kappa, 0.46212, 1e-5);
  const IndParams b = default_ind_params(0.1, 2);
  EXPECT_NEAR(b.eps, 0.050334, 1e-6);
  EXPECT_NEAR(b.gamma, std::exp(-0.8) / 16, 1e-15);
  EXPECT_NEAR(b.kappa, 0.09967, 1e-5);
  const IndParams c = default_ind_params(1e-9, 3);
  EXPECT_LT(c.eps, 1e-8);
  EXPECT_LT(c.kappa, 1e-8);
}

TEST(Score, PopulationStarAboveEps) {
  const Graph g = make_star(4, 3);
  const PopulationTable t(exact_moments(g, 0.8));
  const IndParams d = default_ind_params(0.8, 3);
  // A leaf outside W integrates out of the root's conditional, so the
  // minimizing W = {3} gives (tanh(1.6) - tanh(0)) / 2.
  EXPECT_NEAR(score(t, 1, {2}, 3, d.gamma), std::tanh(1.6) / 2, 1e-12);
  EXPECT_GT(score(t, 1, {2}, 3, d.gamma), d.eps / 2);
}

TEST(Score, EmpiricalStarAboveHalfEps) {
  const Graph g = make_star(4, 3);
  const IndParams d = default_ind_params(0.8, 3);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    ok += score(draw(g, 0.8, 10000, seed), 1, {2}, 3, d.gamma) > std::sinh(1.6) / 8;
  EXPECT_GE(ok, 9);
}

TEST(Score, IndependentSpins) {
  const Graph g(4, {});
  EXPECT_NEAR(score(PopulationTable(exact_moments(g, 0.0)), 1, {2}, 2, 0.01), 0.0, 1e-14);
  EXPECT_LT(score(draw(g, 0.0, 10000, 3), 1, {2}, 2, 0.01), 0.05);
}

TEST(Score, NonNeighborInCandidateGivesZero) {
  const Graph g = make_tree(6, TreeShape::path);
  const PopulationTable t(exact_moments(g, 0.7));
  EXPECT_NEAR(score(t, 3, {2, 5}, 2, 0.01), 0.0, 1e-14);
  EXPECT_GT(score(t, 3, {2, 4}, 2, 0.01), 0.3);
}

TEST(Score, InvariantUnderGlobalFlip) {
  const SampleSet s = draw(make_tree(6, TreeShape::path), 0.5, 3000, 8);
  for (std::vector<Vertex> u : {std::vector<Vertex>{2}, {2, 4}, {5}})
    EXPECT_NEAR(score(s, 3, u, 2, 0.01), score(s.flipped(), 3, u, 2, 0.01), 1e-14);
}

TEST(Score, Errors) {
  const SampleSet s = random_samples(100, 4, 1);
  EXPECT_EQ(code_of([&] { score(s, 1, {}, 2, 0.1); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([&] { score(s, 1, {2, 3, 4}, 2, 0.1); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([&] { score(s, 1, {1}, 2, 0.1); }), Errc::invalid_parameter);
}

TEST(IndependenceTest, PopulationStar) {
  const Graph g = make_star(5, 4);
  const IndParams d = default_ind_params(0.5, 4);
  IndOptions o;
  o.degree = 4;
  o.eps = d.eps;
  o.gamma = d.gamma;
  EXPECT_EQ(local_independence_test(PopulationTable(exact_moments(g, 0.5)), o), g);
}

TEST(IndependenceTest, PathRecovery) {
  const Graph g = make_tree(7, TreeShape::path);
  const IndParams d = default_ind_params(0.9, 2);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    ok += local_independence_test(draw(g, 0.9, 20000, seed), 2, d.eps, d.gamma) == g;
  EXPECT_GE(ok, 4);
}

TEST(IndependenceTest, IndependentSpinsGiveNoEdges) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    ok += local_independence_test(random_samples(5000, 5, seed), 2, 0.2, 0.01).edge_count() == 0;
  EXPECT_GE(ok, 4);
}

TEST(IndependenceTest, PrunedTree) {
  const Graph g = make_tree(9, TreeShape::balanced, 2);
  const IndParams d = default_ind_params(0.4, 3);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    ok += local_independence_test_pruned(draw(g, 0.4, 20000, seed), 3, d.eps, d.gamma, d.kappa) == g;
  EXPECT_GE(ok, 4);
}

TEST(IndependenceTest, PruningWithHugeKappaIsEmpty) {
  const SampleSet s = draw(make_tree(6, TreeShape::path), 0.8, 2000, 2);
  EXPECT_EQ(local_independence_test_pruned(s, 2, 0.1, 0.01, 2.0).edge_count(), 0u);
}

TEST(IndependenceTest, PrunedMatchesUnprunedOnPath) {
  const Graph g = make_tree(7, TreeShape::path);
  const IndParams d = default_ind_params(0.4, 2);
  const SampleSet s = draw(g, 0.4, 20000, 17);
  EXPECT_EQ(local_independence_test(s, 2, d.eps, d.gamma),
            local_independence_test_pruned(s, 2, d.eps, d.gamma, d.kappa));
}

TEST(IndependenceTest, AndRuleIsSubsetOfOr) {
  const SampleSet s = draw(make_grid(3, false), 0.5, 3000, 4);
  const Graph a = local_independence_test(s, 2, 0.2, 0.01, EdgeRule::and_rule);
  const Graph o = local_independence_test(s, 2, 0.2, 0.01, EdgeRule::or_rule);
  for (const Edge& e : a.edges()) EXPECT_TRUE(o.has_edge(e.u, e.v));
}

TEST(PseudoLikelihood, AtZero) {
  const SampleSet s = draw(make_tree(5, TreeShape::path), 0.6, 500, 1);
  const Eigen::MatrixXd c = empirical_correlations(s);
  const PlValue v = pseudo_likelihood_objective(Eigen::VectorXd::Zero(4), s, 2);
  EXPECT_NEAR(v.value, std::log(2.0), 1e-13);
  const auto others = other_vertices(5, 2);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(v.gradient(k), -c(1, others[k] - 1), 1e-15);
}

TEST(PseudoLikelihood, GradientMatchesFiniteDifferences) {
  Rng rng(99);
  for (int inst = 0; inst < 20; ++inst) {
    const SampleSet s = random_samples(200, 8, 1000 + inst);
    const PseudoLikelihood pl(s, 1 + inst % 8);
    Eigen::VectorXd th(7);
    for (int k = 0; k < 7; ++k) th(k) = 2.0 * uniform01(rng) - 1.0;
    Eigen::VectorXd g;
    pl.value_and_gradient(th, g);
    for (int k = 0; k < 7; ++k) {
      const double h = 1e-5;
      Eigen::VectorXd a = th, b = th;
      a(k) += h;
      b(k) -= h;
      const double fd = (pl.value(a) - pl.value(b)) / (2 * h);
      EXPECT_LT(std::abs(fd - g(k)) / std::max(1e-3, std::abs(g(k))), 1e-5);
    }
  }
}

TEST(PseudoLikelihood, StableForLargeCoefficients) {
  const SampleSet s = random_samples(50, 3, 5);
  const PlValue v = pseudo_likelihood_objective(Eigen::VectorXd::Constant(2, 800.0), s, 1);
  EXPECT_TRUE(std::isfinite(v.value));
  EXPECT_TRUE(v.gradient.allFinite());
}

TEST(PseudoLikelihood, PopulationGradientVanishesAtTruth) {
  const Graph g = make_star(2, 1);
  Eigen::VectorXd truth(1);
  truth << 0.6;
  double prev = 1.0;
  for (long n : {1000L, 100000L}) {
    const double grad = std::abs(pseudo_likelihood_objective(truth, draw(g, 0.6, n, 5), 1).gradient(0));
    EXPECT_LT(grad, 5.0 / std::sqrt(static_cast<double>(n)));
    prev = grad;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(Rlr, NullSolutionThreshold) {
  const SampleSet s = draw(make_tree(6, TreeShape::path), 0.5, 2000, 12);
  const PseudoLikelihood pl(s, 3);
  const double lmax = null_lambda(pl);
  RlrOptions o;
  o.lambda = lmax * 1.0001;
  EXPECT_EQ(rlr_neighborhood(pl, 6, o).theta.cwiseAbs().maxCoeff(), 0.0);
  o.lambda = lmax * 0.99;
  EXPECT_GT(rlr_neighborhood(pl, 6, o).theta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Rlr, SingleEdgeRecovery) {
  const Graph g = make_star(2, 1);
  RlrOptions o;
  o.lambda = 0.06;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    ok += rlr_neighborhood(draw(g, 0.6, 10000, seed), 1, o).neighbors == std::vector<Vertex>{2};
  EXPECT_GE(ok, 18);
}

TEST(Rlr, MonotoneAndOptimal) {
  const Graph g = make_grid(3, false);
  const SampleSet s = draw(g, 0.4, 3000, 21);
  RlrOptions o;
  o.lambda = 0.03;
  o.tol = 1e-8;
  o.record_history = true;
  for (Vertex r = 1; r <= 9; ++r) {
    const PseudoLikelihood pl(s, r);
    const NeighborhoodEstimate e = rlr_neighborhood(pl, 9, o);
    ASSERT_TRUE(e.diagnostics.converged);
    EXPECT_LT(e.diagnostics.residual, o.tol);
    for (std::size_t k = 1; k < e.diagnostics.history.size(); ++k)
      EXPECT_LE(e.diagnostics.history[k], e.diagnostics.history[k - 1] + 1e-14);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(8);
    for (int k = 0; k < 8; ++k)
      if (g.has_edge(r, e.others[k])) truth(k) = 0.4;
    const double at_truth = pl.value(truth) + o.lambda * truth.lpNorm<1>();
    EXPECT_LE(e.diagnostics.objective, at_truth + o.tol);
  }
}

TEST(Rlr, IndependentSpinsGiveNoEdges) {
  RlrOptions o;
  o.lambda = 0.2;
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    ok += rlr_graph(random_samples(2000, 6, seed), o).graph.edge_count() == 0;
  EXPECT_GE(ok, 9);
}

TEST(Rlr, AndRuleIsSubsetOfOr) {
  const SampleSet s = draw(make_grid(3, true), 0.3, 1000, 6);
  RlrOptions o;
  o.lambda = 0.02;
  const Graph a = rlr_graph(s, o, EdgeRule::and_rule).graph;
  const Graph b = rlr_graph(s, o, EdgeRule::or_rule).graph;
  for (const Edge& e : a.edges()) EXPECT_TRUE(b.has_edge(e.u, e.v));
  EXPECT_LE(a.edge_count(), b.edge_count());
}

TEST(Rlr, NonConvergenceIsReported) {
  const SampleSet s = draw(make_grid(3, false), 0.5, 500, 2);
  RlrOptions o;
  o.lambda = 0.01;
  o.max_iter = 1;
  const auto r = rlr_graph(s, o);
  EXPECT_FALSE(r.all_converged());
}

TEST(PopulationGp, BelowAndAboveCrossing) {
  const auto d65 = exact_moments(make_toy_gp(5), 0.65);
  const double null65 = std::max(d65.correlation(1, 2), d65.correlation(1, 3));
  for (int k = 0; k < 30; ++k) {
    const double lam = 0.01 + (0.95 * null65 - 0.01) * k / 29.0;
    const auto e = population_rlr_gp(0.65, 5, lam);
    EXPECT_TRUE(e.diagnostics.converged);
    EXPECT_GT(e.theta12, 1e-8) << lam;
  }
  bool found = false;
  for (int k = 0; k < 30 && !found; ++k) {
    const auto e = population_rlr_gp(0.55, 5, 0.02 * (k + 1));
    found = e.theta12 == 0.0 && e.theta13 > 0.0;
  }
  EXPECT_TRUE(found);
}

TEST(PopulationGp, LargeLambdaGivesZero) {
  const auto e = population_rlr_gp(0.7, 6, 5.0);
  EXPECT_EQ(e.theta13, 0.0);
  EXPECT_EQ(e.theta12, 0.0);
  EXPECT_EQ(code_of([] { population_rlr_gp(0.5, 4, 0.1); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([] { population_rlr_gp(0.5, 27, 0.1); }), Errc::enumeration_too_large);
}

TEST(PopulationGp, MatchesUnrestrictedPopulationOptimum) {
  // Solve the full (p-1)-coordinate population problem via enumeration and
  // compare with the tied two-parameter solution.
  const int p = 6;
  const double theta = 0.5, lambda = 0.05;
  const ExactDistribution d = exact_moments(make_toy_gp(p), theta);
  auto fg = [&](const Eigen::VectorXd& t, Eigen::VectorXd& g) {
    auto acc = d.expectations(p, [&](std::span<const double> x, double w, std::vector<double>& a) {
      double m = 0.0;
      for (int k = 1; k < p; ++k) m += t(k - 1) * x[k];
      a[0] += w * detail::softplus(-2.0 * x[0] * m);
      const double r = std::tanh(m) - x[0];
      for (int k = 1; k < p; ++k) a[k] += w * x[k] * r;
    });
    g = Eigen::VectorXd::Map(acc.data() + 1, p - 1);
    return acc[0];
  };
  SolverDiagnostics diag;
  const Eigen::VectorXd full = prox_gradient(fg, Eigen::VectorXd::Zero(p - 1),
                                             Eigen::VectorXd::Constant(p - 1, lambda),
                                             ProxOptions{1e-11, 100000, false}, diag);
  const auto tied = population_rlr_gp(theta, p, lambda);
  EXPECT_NEAR(full(0), tied.theta12, 1e-8);
  for (int k = 1; k < p - 1; ++k) EXPECT_NEAR(full(k), tied.theta13, 1e-8);
}

TEST(Learner, Dispatch) {
  const Graph g = make_tree(6, TreeShape::path);
  const SampleSet s = draw(g, 0.8, 5000, 31);
  LearnerConfig c;
  c.algorithm = Algorithm::thr;
  c.tau = tau_tree(0.8);
  EXPECT_EQ(learn(s, c).graph, g);
  c.algorithm = Algorithm::rlr;
  c.rlr.lambda = 0.05;
  const auto r = learn(s, c);
  EXPECT_EQ(r.graph, g);
  EXPECT_EQ(r.vertices.size(), 6u);
  c.algorithm = Algorithm::indd;
  const IndParams d = default_ind_params(0.8, 2);
  c.degree = 2;
  c.eps = d.eps;
  c.gamma = d.gamma;
  c.kappa = d.kappa;
  EXPECT_EQ(learn(s, c).graph, g);
  EXPECT_EQ(parse_algorithm("indd"), Algorithm::indd);
  EXPECT_EQ(code_of([] { parse_algorithm("lasso"); }), Errc::parse_error);
}
