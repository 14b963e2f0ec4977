#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isingrecon/enumeration.hpp"
#include "isingrecon/gibbs.hpp"
#include "isingrecon/graph.hpp"
#include "isingrecon/sample_io.hpp"
#include "isingrecon/tree_field.hpp"

using namespace isingrecon;

namespace {

/// Direct sum over states with energies computed from scratch.
double brute_log_partition(const CouplingField& f) {
  const int p = f.vertex_count();
  double z = 0.0;
  for (unsigned s = 0; s < (1u << p); ++s) {
    double e = 0.0;
    for (const auto& c : f.couplings()) {
      const int xu = (s >> (c.edge.u - 1)) & 1 ? 1 : -1;
      const int xv = (s >> (c.edge.v - 1)) & 1 ? 1 : -1;
      e += c.theta * xu * xv;
    }
    z += std::exp(e);
  }
  return std::log(z);
}

CouplingField random_field(int p, double density, double scale, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WeightedEdge> c;
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j)
      if (uniform01(rng) < density) c.push_back({Edge(i, j), scale * (2 * uniform01(rng) - 1)});
  return CouplingField(p, c);
}

}  // namespace

TEST(CouplingField, HomogeneousAndSymmetric) {
  const Graph g = make_tree(4, TreeShape::path);
  const auto f = CouplingField::homogeneous(g, 0.7);
  EXPECT_DOUBLE_EQ(f.at(1, 2), 0.7);
  EXPECT_DOUBLE_EQ(f.at(2, 1), 0.7);
  EXPECT_DOUBLE_EQ(f.at(1, 3), 0.0);
  EXPECT_DOUBLE_EQ(f.at(2, 2), 0.0);
  EXPECT_TRUE(f.ferromagnetic());
  EXPECT_THROW(CouplingField(3, {{Edge(1, 2), 0.1}, {Edge(2, 1), 0.2}}), Error);
  EXPECT_THROW(CouplingField(3, {{Edge(1, 2), NAN}}), Error);
}

TEST(ExactMoments, SingleEdge) {
  for (double th : {0.1, 0.5, 1.3}) {
    const auto d = exact_moments(make_toy_gp_prime(5), th);
    EXPECT_NEAR(d.correlation(1, 2), std::tanh(th), 1e-14);
    for (int i = 1; i <= 5; ++i)
      for (int j = i + 1; j <= 5; ++j)
        if (!(i == 1 && j == 2)) EXPECT_NEAR(d.correlation(i, j), 0.0, 1e-14);
  }
}

TEST(ExactMoments, PathOfLengthTwo) {
  const auto d = exact_moments(make_toy_gp(3), 0.8);
  EXPECT_NEAR(d.correlation(1, 2), std::pow(std::tanh(0.8), 2), 1e-14);
}

TEST(ExactMoments, IndependentSpins) {
  const auto d = exact_moments(make_grid(3, false), 0.0);
  EXPECT_TRUE(d.correlations().isApprox(Eigen::MatrixXd::Identity(9, 9), 1e-15));
  EXPECT_NEAR(d.log_partition(), 9 * std::log(2.0), 1e-12);
}

TEST(ExactMoments, GrayCodeMatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = random_field(9, 0.5, 1.2, seed);
    EXPECT_NEAR(exact_moments(f).log_partition(), brute_log_partition(f), 1e-11);
  }
}

TEST(ExactMoments, ChunkingDoesNotChangeResults) {
  const auto f = CouplingField::homogeneous(make_grid(4, false), 0.4);
  const auto one = exact_moments(f, 1);
  const auto many = exact_moments(f, 5);
  EXPECT_TRUE(one.correlations().isApprox(many.correlations(), 1e-13));
  EXPECT_NEAR(one.log_partition(), many.log_partition(), 1e-12);
}

TEST(ExactMoments, BudgetEnforced) {
  const Graph g = make_tree(27, TreeShape::path);
  try {
    exact_moments(g, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::enumeration_too_large);
  }
}

TEST(ExactMoments, TreeExactness) {
  for (auto shape : {TreeShape::path, TreeShape::balanced}) {
    const Graph g = make_tree(11, shape, 3);
    const double th = 0.65;
    const auto d = exact_moments(g, th);
    for (Vertex i = 1; i <= 11; ++i) {
      const auto dist = bfs_distances(g, i);
      for (Vertex j = 1; j <= 11; ++j)
        EXPECT_NEAR(d.correlation(i, j), std::pow(std::tanh(th), dist[j]), 1e-12);
    }
  }
}

TEST(ExactMoments, SymmetryAndGriffiths) {
  const Graph g = make_grid(3, true);
  Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(9, 9);
  for (double th = 0.0; th <= 1.5; th += 0.1) {
    const auto d = exact_moments(g, th);
    EXPECT_LT(d.magnetizations().cwiseAbs().maxCoeff(), 1e-12);
    const auto& c = d.correlations();
    EXPECT_TRUE(c.isApprox(c.transpose()));
    EXPECT_LE(c.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
    EXPECT_GE(c.minCoeff(), -1e-12);
    EXPECT_TRUE(((c - prev).array() >= -1e-12).all()) << "theta=" << th;
    prev = c;
  }
}

TEST(ExactMoments, GeneralExpectation) {
  const auto d = exact_moments(make_tree(5, TreeShape::path), 0.3);
  const double c14 = d.expectation([](std::span<const double> x) { return x[0] * x[3]; });
  EXPECT_NEAR(c14, std::pow(std::tanh(0.3), 3), 1e-13);
  const auto probs = d.state_probabilities();
  double total = 0.0;
  for (double q : probs) total += q;
  EXPECT_NEAR(total, 1.0, 1e-13);
  // All-plus and all-minus are the two most likely states.
  EXPECT_DOUBLE_EQ(probs.front(), probs.back());
  EXPECT_DOUBLE_EQ(*std::max_element(probs.begin(), probs.end()), probs.back());
}

TEST(Gibbs, IndependentSpins) {
  const auto f = CouplingField::homogeneous(make_grid(3, false), 0.0);
  const long n = 10000;
  const auto s = gibbs_sample(f, n, 10, 1, 3);
  const auto c = empirical_correlations(s);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      if (i != j) EXPECT_LT(std::abs(c(i, j)), 4.0 / std::sqrt(n));
}

TEST(Gibbs, SingleEdge) {
  const auto f = CouplingField::homogeneous(make_tree(2, TreeShape::path), 0.5);
  const long n = 10000;
  const auto s = gibbs_sample(f, n, 1000, 5, 17);
  EXPECT_NEAR(empirical_correlations(s)(0, 1), 0.46211715726000974, 4.0 / std::sqrt(n));
  EXPECT_EQ(s.meta().burn_in, 1000);
  EXPECT_EQ(s.meta().thin, 5);
}

TEST(Gibbs, PathAgainstEnumeration) {
  const Graph g = make_tree(12, TreeShape::path);
  const auto f = CouplingField::homogeneous(g, 0.8);
  const auto exact = exact_moments(f);
  const auto s = gibbs_sample(f, 20000, 500, 5, 2024);
  const double err = (empirical_correlations(s) - exact.correlations()).cwiseAbs().maxCoeff();
  EXPECT_LT(err, 0.05);
}

TEST(Gibbs, DeterministicUnderSeed) {
  const auto f = CouplingField::homogeneous(make_grid(3, false), 0.3);
  EXPECT_EQ(gibbs_sample(f, 50, 5, 2, 9).data(), gibbs_sample(f, 50, 5, 2, 9).data());
  EXPECT_NE(gibbs_sample(f, 50, 5, 2, 9).data(), gibbs_sample(f, 50, 5, 2, 10).data());
  EXPECT_THROW(gibbs_sample(f, 0, 5, 2, 9), Error);
  EXPECT_THROW(gibbs_sample(f, 5, 0, 2, 9), Error);
}

TEST(Mixing, IndependentSpinsFlipQuickly) {
  const auto f = CouplingField::homogeneous(make_grid(3, false), 0.0);
  std::vector<long> v;
  for (std::uint64_t seed = 0; seed < 51; ++seed) v.push_back(estimate_mixing(f, seed, 1000).sweeps);
  std::nth_element(v.begin(), v.begin() + 25, v.end());
  EXPECT_LE(v[25], 5);
}

TEST(Mixing, LoneSpinIsGeometric) {
  const CouplingField f(1, {});
  const int seeds = 4000;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) total += estimate_mixing(f, s, 100000).sweeps;
  EXPECT_NEAR(total / seeds, 2.0, 3 * std::sqrt(2.0 / seeds));
}

TEST(Mixing, LowTemperatureTorusSaturates) {
  const auto f = CouplingField::homogeneous(make_grid(7, true), 1.0);
  const auto est = estimate_mixing(f, 1, 100000);
  EXPECT_TRUE(est.saturated);
  EXPECT_EQ(est.sweeps, 100000);
  const auto settings = sampler_settings(est);
  EXPECT_EQ(settings.burn_in, 1000000);
  EXPECT_EQ(settings.thin, 10000);
  EXPECT_EQ(sampler_settings({3, false}).thin, 1);
}

TEST(EmpiricalCorrelations, Arithmetic) {
  SampleSet plus(3, 4, std::vector<std::int8_t>(12, 1));
  EXPECT_TRUE(empirical_correlations(plus).isApprox(Eigen::MatrixXd::Ones(4, 4)));
  SampleSet both(2, 3, {1, 1, 1, -1, -1, -1});
  EXPECT_TRUE(empirical_correlations(both).isApprox(Eigen::MatrixXd::Ones(3, 3)));
  SampleSet mixed(2, 2, {1, -1, 1, 1});
  EXPECT_DOUBLE_EQ(empirical_correlations(mixed)(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(empirical_correlations(mixed)(1, 1), 1.0);
  EXPECT_THROW(SampleSet(1, 2, {1, 0}), Error);
}

TEST(SampleIo, RoundTripAndCsv) {
  const auto f = CouplingField::homogeneous(make_tree(4, TreeShape::path), 0.4);
  const auto s = gibbs_sample(f, 25, 3, 2, 77);
  std::stringstream ss;
  write_samples(ss, s);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "25 4 77 3 2");
  const auto back = read_samples(ss);
  EXPECT_EQ(back.data(), s.data());
  EXPECT_EQ(back.meta().seed, 77u);

  std::stringstream bad("2 2 0 1 1\n1 -1\n1 0\n");
  EXPECT_THROW(read_samples(bad), Error);
  std::stringstream short_file("2 2 0 1 1\n1 -1\n");
  EXPECT_THROW(read_samples(short_file), Error);

  std::stringstream csv;
  write_correlation_csv(csv, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(csv.str(), "index,0,1\n0,1,0\n1,0,1\n");
}

// ---------------------------------------------------------------------------
// Tree boundary field

namespace {

/// Independent scan for the positive fixed point using std::atanh directly.
double scan_fixed_point(int degree, double theta) {
  auto f = [&](double h) { return (degree - 1) * std::atanh(std::tanh(theta) * std::tanh(h)) - h; };
  double prev = 1e-6;
  for (double h = 1e-3; h <= 50.0; h += 1e-3) {
    if (f(prev) > 0 && f(h) <= 0) {
      double lo = prev, hi = h;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = h;
  }
  return 0.0;
}

}  // namespace

TEST(TreeBoundaryField, HighTemperatureHasOnlyTrivialRoot) {
  EXPECT_EQ(tree_boundary_field(4, 0.1), 0.0);
  EXPECT_EQ(scan_fixed_point(4, 0.1), 0.0);
}

TEST(TreeBoundaryField, FrozenRoot) {
  const double h = tree_boundary_field(4, 0.6, 1e-12);
  EXPECT_NEAR(h, 1.6404610608810601, 1e-10);
  EXPECT_NEAR(h, scan_fixed_point(4, 0.6), 1e-10);
  EXPECT_LT(std::abs(boundary_field_residual(4, 0.6, h)), 1e-10);
}

TEST(TreeBoundaryField, LinearGrowthAtLowTemperature) {
  double prev_gap = 1e9;
  for (double th : {2.0, 5.0, 10.0, 20.0}) {
    const double gap = std::abs(tree_boundary_field(4, th) / th - 3.0);
    EXPECT_LE(gap, prev_gap + 1e-11);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-6);
}

TEST(TreeBoundaryField, MonotoneWithSmallResidual) {
  for (int degree : {3, 4, 6}) {
    double prev = 0.0;
    for (double th = 0.05; th <= 3.0; th += 0.05) {
      const double h = tree_boundary_field(degree, th, 1e-11);
      EXPECT_GE(h, prev);
      EXPECT_LT(std::abs(boundary_field_residual(degree, th, h)), 1e-11);
      prev = h;
    }
  }
  EXPECT_THROW(tree_boundary_field(4, 0.5, 0.0), Error);
  EXPECT_THROW(tree_boundary_field(4, -0.5), Error);
}

TEST(SawBound, Values) {
  const double th = std::atanh(1.0 / 8.0);
  EXPECT_NEAR(saw_correlation_bound(4, th, 2), 0.125, 1e-15);
  EXPECT_EQ(saw_correlation_bound(4, 0.0, 3), 0.0);
  const auto d = exact_moments(make_tree(3, TreeShape::path), th);
  EXPECT_NEAR(d.correlation(1, 3), 1.0 / 64.0, 1e-14);
  EXPECT_LE(d.correlation(1, 3), saw_correlation_bound(4, th, 2));
  try {
    saw_correlation_bound(4, std::atanh(0.25), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::bound_inapplicable);
  }
}

TEST(SawBound, HoldsOnGrid) {
  // Max degree 4 on a 4x4 open grid, theta with 4 tanh(theta) < 1.
  const Graph g = make_grid(4, false);
  const double th = 0.2;
  const auto d = exact_moments(g, th);
  for (Vertex i = 1; i <= 16; ++i) {
    const auto dist = bfs_distances(g, i);
    for (Vertex j = 1; j <= 16; ++j)
      if (j != i) EXPECT_LE(d.correlation(i, j), saw_correlation_bound(4, th, dist[j]) + 1e-15);
  }
}
