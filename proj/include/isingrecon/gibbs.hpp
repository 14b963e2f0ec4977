#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "isingrecon/couplings.hpp"
#include "isingrecon/rng.hpp"

namespace isingrecon {

struct SamplerMeta {
  std::uint64_t seed = 0;
  long burn_in = 0;
  long thin = 0;
};

/// n samples of p spins in {-1, +1}, stored row-major. Column i holds
/// vertex i + 1.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(long n, int p, std::vector<std::int8_t> spins, SamplerMeta meta = {})
      : n_(n), p_(p), spins_(std::move(spins)), meta_(meta) {
    require(n >= 0 && p >= 0, Errc::invalid_parameter, "negative sample dimensions");
    require(spins_.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(p),
            Errc::invalid_parameter, "spin buffer does not match n x p");
    for (auto s : spins_)
      require(s == 1 || s == -1, Errc::invalid_parameter, "spins must be exactly -1 or +1");
  }

  long sample_count() const { return n_; }
  int vertex_count() const { return p_; }
  const SamplerMeta& meta() const { return meta_; }
  const std::vector<std::int8_t>& data() const { return spins_; }

  std::int8_t at(long sample, int column) const {
    return spins_[static_cast<std::size_t>(sample) * p_ + column];
  }
  std::span<const std::int8_t> row(long sample) const {
    return {spins_.data() + static_cast<std::size_t>(sample) * p_, static_cast<std::size_t>(p_)};
  }

  /// Same samples with every spin negated.
  SampleSet flipped() const {
    std::vector<std::int8_t> s(spins_);
    for (auto& v : s) v = static_cast<std::int8_t>(-v);
    return SampleSet(n_, p_, std::move(s), meta_);
  }

  /// Spins as an n x p double matrix.
  Eigen::MatrixXd as_matrix() const {
    Eigen::MatrixXd m(n_, p_);
    for (long l = 0; l < n_; ++l)
      for (int i = 0; i < p_; ++i) m(l, i) = spins_[static_cast<std::size_t>(l) * p_ + i];
    return m;
  }

 private:
  long n_ = 0;
  int p_ = 0;
  std::vector<std::int8_t> spins_;
  SamplerMeta meta_;
};

namespace detail {

/// Glauber chain with heat-bath updates at uniformly random sites.
class GlauberChain {
 public:
  GlauberChain(const CouplingField& field, std::uint64_t seed)
      : p_(field.vertex_count()), rng_(seed), spins_(static_cast<std::size_t>(p_), 1) {
    nbrs_.resize(static_cast<std::size_t>(p_));
    for (Vertex v = 1; v <= p_; ++v)
      for (const auto& n : field.row(v)) nbrs_[v - 1].push_back({n.vertex - 1, n.theta});
  }

  void randomize() {
    for (auto& s : spins_) s = uniform01(rng_) < 0.5 ? 1 : -1;
  }
  void set_all(std::int8_t value) { std::fill(spins_.begin(), spins_.end(), value); }

  /// One heat-bath update at a random site; returns the change in sum of spins.
  int update() {
    const auto site = static_cast<std::size_t>(uniform_below(rng_, static_cast<std::uint64_t>(p_)));
    double h = 0.0;
    for (const auto& [j, th] : nbrs_[site]) h += th * spins_[j];
    const double up = 1.0 / (1.0 + std::exp(-2.0 * h));
    const std::int8_t next = uniform01(rng_) < up ? 1 : -1;
    const int delta = next - spins_[site];
    spins_[site] = next;
    return delta;
  }

  void sweep() {
    for (int k = 0; k < p_; ++k) update();
  }

  const std::vector<std::int8_t>& spins() const { return spins_; }
  int vertex_count() const { return p_; }

 private:
  int p_;
  Rng rng_;
  std::vector<std::int8_t> spins_;
  std::vector<std::vector<std::pair<int, double>>> nbrs_;
};

}  // namespace detail

/// Glauber dynamics from a uniformly random start: burn_in sweeps, then one
/// retained sample every thin sweeps. A sweep is p single-site updates.
inline SampleSet gibbs_sample(const CouplingField& field, long n, long burn_in, long thin,
                              std::uint64_t seed) {
  require(n >= 1, Errc::invalid_parameter, "need n >= 1");
  require(burn_in >= 1 && thin >= 1, Errc::invalid_parameter, "burn_in and thin must be >= 1");
  detail::GlauberChain chain(field, seed);
  chain.randomize();
  for (long s = 0; s < burn_in; ++s) chain.sweep();
  const int p = field.vertex_count();
  std::vector<std::int8_t> out;
  out.reserve(static_cast<std::size_t>(n) * p);
  for (long l = 0; l < n; ++l) {
    for (long s = 0; s < thin; ++s) chain.sweep();
    out.insert(out.end(), chain.spins().begin(), chain.spins().end());
  }
  return SampleSet(n, p, std::move(out), SamplerMeta{seed, burn_in, thin});
}

struct MixingEstimate {
  long sweeps = 0;
  bool saturated = false;
};

/// Sign-change heuristic: run Glauber dynamics from all +1 and report the
/// sweep during which the total magnetization first turns negative.
inline MixingEstimate estimate_mixing(const CouplingField& field, std::uint64_t seed,
                                      long max_sweeps) {
  require(max_sweeps >= 1, Errc::invalid_parameter, "max_sweeps must be >= 1");
  const int p = field.vertex_count();
  if (p == 0) return {1, false};
  detail::GlauberChain chain(field, seed);
  chain.set_all(1);
  long magnetization = p;
  for (long s = 1; s <= max_sweeps; ++s) {
    for (int k = 0; k < p; ++k) {
      magnetization += chain.update();
      if (magnetization < 0) return {s, false};
    }
  }
  return {max_sweeps, true};
}

struct SamplerSettings {
  long burn_in = 1;
  long thin = 1;
};

/// burn_in = burn_factor x estimate, thin = max(1, estimate / thin_divisor).
inline SamplerSettings sampler_settings(const MixingEstimate& est, long burn_factor = 10,
                                        long thin_divisor = 10) {
  require(burn_factor >= 1 && thin_divisor >= 1, Errc::invalid_parameter,
          "sampler multipliers must be >= 1");
  return {std::max<long>(1, burn_factor * est.sweeps),
          std::max<long>(1, est.sweeps / thin_divisor)};
}

/// Samples with burn-in and thinning chosen from a mixing estimate on a
/// chain seeded independently of the sampling chain.
inline SampleSet draw_samples(const CouplingField& field, long n, std::uint64_t seed,
                              long max_mixing_sweeps = 2000) {
  const MixingEstimate est = estimate_mixing(field, derive_seed(seed, 0x6d6978, 0), max_mixing_sweeps);
  const SamplerSettings st = sampler_settings(est);
  return gibbs_sample(field, n, st.burn_in, st.thin, seed);
}

/// C_hat_ij = (1/n) sum_l x_i x_j; diagonal exactly 1.
inline Eigen::MatrixXd empirical_correlations(const SampleSet& s) {
  require(s.sample_count() >= 1, Errc::invalid_parameter, "need at least one sample");
  const int p = s.vertex_count();
  const long n = s.sample_count();
  std::vector<long> acc(static_cast<std::size_t>(p) * p, 0);
  for (long l = 0; l < n; ++l) {
    const auto x = s.row(l);
    for (int i = 0; i < p; ++i) {
      long* row = acc.data() + static_cast<std::size_t>(i) * p;
      const int xi = x[i];
      for (int j = i + 1; j < p; ++j) row[j] += xi * x[j];
    }
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      c(i, j) = static_cast<double>(acc[static_cast<std::size_t>(i) * p + j]) / static_cast<double>(n);
      c(j, i) = c(i, j);
    }
  return c;
}

}  // namespace isingrecon
