#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "isingrecon/couplings.hpp"
#include "isingrecon/numeric.hpp"

namespace isingrecon {

/// Largest p for which full state-space summation is allowed.
inline constexpr int kEnumerationBudget = 26;

namespace detail {

/// Calls visit(acc, spins, weight) for every state in Gray-code order, with
/// weight = exp(sum_ij theta_ij x_i x_j - shift). The 2^p states are split
/// into contiguous chunks; one accumulator per chunk is returned in chunk
/// order so callers can merge deterministically.
template <class Acc, class MakeAcc, class Visit>
std::vector<Acc> enumerate_states(const CouplingField& field, MakeAcc make_acc, Visit visit,
                                  double shift, std::size_t threads = 0) {
  const int p = field.vertex_count();
  require(p <= kEnumerationBudget, Errc::enumeration_too_large,
          "p = " + std::to_string(p) + " exceeds the enumeration budget of " +
              std::to_string(kEnumerationBudget));
  const std::uint64_t total = std::uint64_t{1} << p;
  // Dense 0-based neighbor lists for the hot loop.
  std::vector<std::vector<std::pair<int, double>>> nbrs(static_cast<std::size_t>(p));
  for (Vertex v = 1; v <= p; ++v)
    for (const auto& n : field.row(v)) nbrs[v - 1].push_back({n.vertex - 1, n.theta});

  const std::size_t workers = worker_count(std::size_t{1} << std::min(p, 20), threads);
  const std::size_t chunks = total >= 4096 ? workers * 4 : 1;
  std::vector<Acc> accs;
  accs.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) accs.push_back(make_acc());

  parallel_for(
      chunks,
      [&](std::size_t c) {
        const std::uint64_t begin = total * c / chunks;
        const std::uint64_t end = total * (c + 1) / chunks;
        if (begin == end) return;
        std::vector<double> x(static_cast<std::size_t>(p));
        std::vector<double> local(static_cast<std::size_t>(p), 0.0);
        const std::uint64_t gray = begin ^ (begin >> 1);
        for (int i = 0; i < p; ++i) x[i] = (gray >> i) & 1 ? 1.0 : -1.0;
        double energy = 0.0;
        for (int i = 0; i < p; ++i) {
          for (const auto& [j, th] : nbrs[i]) local[i] += th * x[j];
          energy += 0.5 * x[i] * local[i];
        }
        Acc& acc = accs[c];
        visit(acc, std::span<const double>(x), std::exp(energy - shift));
        for (std::uint64_t k = begin + 1; k < end; ++k) {
          const int b = std::countr_zero(k);
          energy -= 2.0 * x[b] * local[b];
          x[b] = -x[b];
          const double twice = 2.0 * x[b];
          for (const auto& [j, th] : nbrs[b]) local[j] += th * twice;
          visit(acc, std::span<const double>(x), std::exp(energy - shift));
        }
      },
      workers);
  return accs;
}

}  // namespace detail

/// Exact Ising measure over all 2^p states for small p.
class ExactDistribution {
 public:
  explicit ExactDistribution(CouplingField field, std::size_t threads = 0)
      : field_(std::move(field)), threads_(threads) {
    const int p = field_.vertex_count();
    shift_ = field_.abs_sum();
    struct Acc {
      double z = 0.0;
      std::vector<double> pair;
      std::vector<double> first;
    };
    const auto n = static_cast<std::size_t>(p);
    auto accs = detail::enumerate_states<Acc>(
        field_, [n] { return Acc{0.0, std::vector<double>(n * n, 0.0), std::vector<double>(n, 0.0)}; },
        [n](Acc& acc, std::span<const double> x, double w) {
          acc.z += w;
          for (std::size_t i = 0; i < n; ++i) {
            const double wi = w * x[i];
            acc.first[i] += wi;
            double* row = acc.pair.data() + i * n;
            for (std::size_t j = i + 1; j < n; ++j) row[j] += wi * x[j];
          }
        },
        shift_, threads_);
    double z = 0.0;
    std::vector<double> pair(n * n, 0.0), first(n, 0.0);
    for (const Acc& a : accs) {
      z += a.z;
      for (std::size_t k = 0; k < pair.size(); ++k) pair[k] += a.pair[k];
      for (std::size_t k = 0; k < n; ++k) first[k] += a.first[k];
    }
    z_scaled_ = z;
    log_partition_ = std::log(z) + shift_;
    corr_ = Eigen::MatrixXd::Identity(p, p);
    mean_ = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < n; ++i) {
      mean_(static_cast<Eigen::Index>(i)) = first[i] / z;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double c = pair[i * n + j] / z;
        corr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
        corr_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
      }
    }
  }

  const CouplingField& field() const { return field_; }
  int vertex_count() const { return field_.vertex_count(); }
  double log_partition() const { return log_partition_; }

  /// C_ij = E{X_i X_j}, 0-based (row v-1 is vertex v).
  const Eigen::MatrixXd& correlations() const { return corr_; }
  double correlation(Vertex a, Vertex b) const { return corr_(a - 1, b - 1); }

  /// E{X_i}, 0-based. Zero for a field without external terms.
  const Eigen::VectorXd& magnetizations() const { return mean_; }

  /// E{f(X)} for f taking the spin vector (0-based, entries +-1).
  template <class F>
  double expectation(F&& f) const {
    auto accs = detail::enumerate_states<double>(
        field_, [] { return 0.0; },
        [&f](double& acc, std::span<const double> x, double w) { acc += w * f(x); }, shift_,
        threads_);
    double s = 0.0;
    for (double a : accs) s += a;
    return s / z_scaled_;
  }

  /// Several expectations in one pass: f(x, w, acc) adds w times each of its
  /// k values into acc.
  template <class F>
  std::vector<double> expectations(std::size_t k, F&& f) const {
    auto accs = detail::enumerate_states<std::vector<double>>(
        field_, [k] { return std::vector<double>(k, 0.0); },
        [&f](std::vector<double>& acc, std::span<const double> x, double w) { f(x, w, acc); },
        shift_, threads_);
    std::vector<double> out(k, 0.0);
    for (const auto& a : accs)
      for (std::size_t i = 0; i < k; ++i) out[i] += a[i];
    for (double& v : out) v /= z_scaled_;
    return out;
  }

  /// Probability of every state; bit i of the index set means vertex i+1 is +1.
  std::vector<double> state_probabilities() const {
    const int p = vertex_count();
    require(p <= 24, Errc::enumeration_too_large, "state table limited to p <= 24");
    std::vector<double> prob(std::size_t{1} << p, 0.0);
    // Chunks write disjoint entries, so no merge is needed.
    (void)detail::enumerate_states<int>(
        field_, [] { return 0; },
        [&prob, p, this](int&, std::span<const double> x, double w) {
          std::size_t idx = 0;
          for (int i = 0; i < p; ++i)
            if (x[i] > 0) idx |= std::size_t{1} << i;
          prob[idx] = w / z_scaled_;
        },
        shift_, threads_);
    return prob;
  }

 private:
  CouplingField field_;
  std::size_t threads_ = 0;
  double shift_ = 0.0;
  double z_scaled_ = 1.0;
  double log_partition_ = 0.0;
  Eigen::MatrixXd corr_;
  Eigen::VectorXd mean_;
};

inline ExactDistribution exact_moments(const CouplingField& field, std::size_t threads = 0) {
  return ExactDistribution(field, threads);
}

/// Couplings must be supported on edges of g.
inline ExactDistribution exact_moments(const Graph& g, const CouplingField& field,
                                       std::size_t threads = 0) {
  require(g.vertex_count() == field.vertex_count(), Errc::invalid_parameter,
          "graph and coupling field disagree on p");
  for (const auto& c : field.couplings())
    require(c.theta == 0.0 || g.has_edge(c.edge.u, c.edge.v), Errc::invalid_parameter,
            "coupling on a non-edge");
  return ExactDistribution(field, threads);
}

/// Homogeneous model: theta on every edge of g.
inline ExactDistribution exact_moments(const Graph& g, double theta, std::size_t threads = 0) {
  return ExactDistribution(CouplingField::homogeneous(g, theta), threads);
}

}  // namespace isingrecon
