#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "isingrecon/couplings.hpp"
#include "isingrecon/gibbs.hpp"
#include "isingrecon/graph.hpp"
#include "isingrecon/learners/learner.hpp"
#include "isingrecon/numeric.hpp"
#include "isingrecon/rng.hpp"

namespace isingrecon {

// Config files are flat "key = value" lines; '#' starts a comment. Grids are
// comma-separated. Recognized keys:
//
//   family, p, degree, side, periodic, rho, shape, branching, graph_seed,
//   fixed_graph, alg, tau (number | tree | degree), learner_degree,
//   eps, gamma, kappa (number | auto), rule, tol, max_iter, selection,
//   theta, lambda0, n (numbers; n may be "bound"), bound, delta,
//   trials, seed, output, threads, max_mixing_sweeps, burn_factor,
//   thin_divisor, budget_s, timing (on | off)

struct SweepConfig {
  GraphFamilySpec family;
  bool fixed_graph = false;

  LearnerConfig learner;
  enum class TauRule { fixed, tree, degree } tau_rule = TauRule::fixed;
  bool auto_eps = true;
  bool auto_gamma = true;
  bool auto_kappa = true;

  std::vector<double> thetas;
  std::vector<double> lambda0s{1.0};
  std::vector<long> ns;  // 0 means "sample bound for the learner at this theta"
  BoundKind bound = BoundKind::thr_tree;
  double delta = 0.05;

  int trials = 50;
  std::uint64_t seed = 1;
  std::string output;
  std::size_t threads = 0;

  long max_mixing_sweeps = 2000;
  long burn_factor = 10;
  long thin_divisor = 10;

  double budget_s = 0.0;  // 0 disables the budget check
  bool timing = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    require(!item.empty(), Errc::parse_error, "empty entry in list '" + s + "'");
    out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && used > 0, Errc::parse_error, key + ": not a number '" + v + "'");
  return x;
}

inline long to_long(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  require(x == std::floor(x) && std::abs(x) < 9e15, Errc::parse_error,
          key + ": not an integer '" + v + "'");
  return static_cast<long>(x);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw Error(Errc::parse_error, key + ": expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline void validate(const SweepConfig& c) {
  require(!c.thetas.empty(), Errc::invalid_parameter, "theta grid is empty");
  require(!c.lambda0s.empty(), Errc::invalid_parameter, "lambda0 grid is empty");
  require(!c.ns.empty(), Errc::invalid_parameter, "n grid is empty");
  require(c.trials >= 1, Errc::invalid_parameter, "trials must be >= 1");
  for (double t : c.thetas)
    require(t > 0.0 && std::isfinite(t), Errc::invalid_parameter, "theta values must be > 0");
  for (double l : c.lambda0s)
    require(l >= 0.0 && std::isfinite(l), Errc::invalid_parameter, "lambda0 values must be >= 0");
  for (long n : c.ns) require(n >= 0, Errc::invalid_parameter, "n values must be >= 1 or 'bound'");
  require(c.max_mixing_sweeps >= 1, Errc::invalid_parameter, "max_mixing_sweeps must be >= 1");
  require(c.budget_s >= 0.0, Errc::invalid_parameter, "budget_s must be >= 0");
}

inline SweepConfig parse_sweep_config(std::istream& in) {
  SweepConfig c;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, Errc::parse_error,
            "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    require(!key.empty() && !val.empty(), Errc::parse_error,
            "line " + std::to_string(lineno) + ": empty key or value");
    require(kv.emplace(key, val).second, Errc::parse_error, "duplicate key '" + key + "'");
  }

  bool have_learner_degree = false;
  for (const auto& [key, v] : kv) {
    if (key == "family") c.family.family = parse_family(v);
    else if (key == "p") c.family.p = static_cast<int>(detail::to_long(key, v));
    else if (key == "degree") c.family.degree = static_cast<int>(detail::to_long(key, v));
    else if (key == "side") c.family.side = static_cast<int>(detail::to_long(key, v));
    else if (key == "periodic") c.family.periodic = detail::to_bool(key, v);
    else if (key == "rho") c.family.rho = detail::to_double(key, v);
    else if (key == "shape") {
      require(v == "path" || v == "balanced", Errc::parse_error, "shape must be path or balanced");
      c.family.shape = v == "path" ? TreeShape::path : TreeShape::balanced;
    } else if (key == "branching") c.family.branching = static_cast<int>(detail::to_long(key, v));
    else if (key == "graph_seed") c.family.seed = static_cast<std::uint64_t>(detail::to_long(key, v));
    else if (key == "fixed_graph") c.fixed_graph = detail::to_bool(key, v);
    else if (key == "alg") c.learner.algorithm = parse_algorithm(v);
    else if (key == "tau") {
      if (v == "tree") c.tau_rule = SweepConfig::TauRule::tree;
      else if (v == "degree") c.tau_rule = SweepConfig::TauRule::degree;
      else c.learner.tau = detail::to_double(key, v);
    } else if (key == "learner_degree") {
      c.learner.degree = static_cast<int>(detail::to_long(key, v));
      have_learner_degree = true;
    } else if (key == "eps") {
      c.auto_eps = v == "auto";
      if (!c.auto_eps) c.learner.eps = detail::to_double(key, v);
    } else if (key == "gamma") {
      c.auto_gamma = v == "auto";
      if (!c.auto_gamma) c.learner.gamma = detail::to_double(key, v);
    } else if (key == "kappa") {
      c.auto_kappa = v == "auto";
      if (!c.auto_kappa) c.learner.kappa = detail::to_double(key, v);
    } else if (key == "rule") c.learner.rule = parse_edge_rule(v);
    else if (key == "tol") c.learner.rlr.tol = detail::to_double(key, v);
    else if (key == "max_iter") c.learner.rlr.max_iter = static_cast<int>(detail::to_long(key, v));
    else if (key == "selection") c.learner.rlr.selection = detail::to_double(key, v);
    else if (key == "theta") {
      c.thetas.clear();
      for (const auto& s : detail::split_list(v)) c.thetas.push_back(detail::to_double(key, s));
    } else if (key == "lambda0") {
      c.lambda0s.clear();
      for (const auto& s : detail::split_list(v)) c.lambda0s.push_back(detail::to_double(key, s));
    } else if (key == "n") {
      c.ns.clear();
      for (const auto& s : detail::split_list(v)) {
        const long n = s == "bound" ? 0 : detail::to_long(key, s);
        require(s == "bound" || n >= 1, Errc::parse_error, "n values must be >= 1");
        c.ns.push_back(n);
      }
    } else if (key == "bound") c.bound = parse_bound_kind(v);
    else if (key == "delta") c.delta = detail::to_double(key, v);
    else if (key == "trials") c.trials = static_cast<int>(detail::to_long(key, v));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::to_long(key, v));
    else if (key == "output") c.output = v;
    else if (key == "threads") c.threads = static_cast<std::size_t>(detail::to_long(key, v));
    else if (key == "max_mixing_sweeps") c.max_mixing_sweeps = detail::to_long(key, v);
    else if (key == "burn_factor") c.burn_factor = detail::to_long(key, v);
    else if (key == "thin_divisor") c.thin_divisor = detail::to_long(key, v);
    else if (key == "budget_s") c.budget_s = detail::to_double(key, v);
    else if (key == "timing") c.timing = detail::to_bool(key, v);
    else throw Error(Errc::parse_error, "unknown key '" + key + "'");
  }
  if (!have_learner_degree) c.learner.degree = std::max(1, c.family.degree);
  validate(c);
  return c;
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::invalid_parameter, "cannot read " + path);
  return parse_sweep_config(in);
}

struct SweepCell {
  double theta = 0.0;
  double lambda0 = 0.0;
  long n = 0;
  int trials = 0;
  int successes = 0;          // exact edge-set recovery
  long vertex_successes = 0;  // neighborhoods recovered exactly
  long vertex_total = 0;
  double total_runtime_ms = 0.0;
  // Sampler diagnostics, shared by every lambda0 at this (theta, n).
  int saturated = 0;
  double mean_burn_in = 0.0;
  double mean_thin = 0.0;

  double p_succ() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  double p_vertex() const {
    return vertex_total ? static_cast<double>(vertex_successes) / vertex_total : 0.0;
  }
  double mean_runtime_ms() const { return trials ? total_runtime_ms / trials : 0.0; }
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered theta, then n, then lambda0
  bool timing = true;
};

namespace detail {

/// Learner settings for one theta; tau, eps, gamma, kappa may depend on it.
inline LearnerConfig learner_for(const SweepConfig& c, double theta) {
  LearnerConfig l = c.learner;
  l.threads = 1;
  if (c.tau_rule == SweepConfig::TauRule::tree) l.tau = tau_tree(theta);
  if (c.tau_rule == SweepConfig::TauRule::degree) l.tau = tau_degree(theta, l.degree);
  if (l.algorithm == Algorithm::ind || l.algorithm == Algorithm::indd) {
    const IndParams d = default_ind_params(theta, l.degree);
    if (c.auto_eps) l.eps = d.eps;
    if (c.auto_gamma) l.gamma = d.gamma;
    if (c.auto_kappa) l.kappa = d.kappa;
  }
  return l;
}

inline long resolve_n(const SweepConfig& c, long n, double theta, int p) {
  if (n > 0) return n;
  BoundQuery q;
  q.kind = c.bound;
  q.theta = theta;
  q.degree = c.learner.degree;
  q.p = p;
  q.delta = c.delta;
  const double b = sample_bound(q);
  require(b < 1e9, Errc::budget_exceeded, "sample bound too large to simulate");
  return static_cast<long>(b);
}

inline double lambda_scale(double theta, int p, long n) {
  return 2.0 * theta * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

struct TrialOutcome {
  std::vector<char> exact;        // per lambda0
  std::vector<int> vertex_ok;     // per lambda0
  std::vector<double> runtime_ms; // per lambda0
  int p = 0;
  bool saturated = false;
  long burn_in = 0;
  long thin = 0;
};

inline int matching_neighborhoods(const Graph& truth, const Graph& learned) {
  int ok = 0;
  for (Vertex v = 1; v <= truth.vertex_count(); ++v) ok += truth.neighbors(v) == learned.neighbors(v);
  return ok;
}

inline Graph trial_graph(const SweepConfig& c, int trial) {
  GraphFamilySpec s = c.family;
  if (is_random_family(s.family) && !c.fixed_graph)
    s.seed = derive_seed(c.seed, 0x677261706aULL, static_cast<std::uint64_t>(trial));
  return build_graph(s);
}

/// One trial: graph, samples, then every lambda0 on the same samples.
inline TrialOutcome run_trial(const SweepConfig& c, std::size_t group, double theta, long n,
                              int trial) {
  using clock = std::chrono::steady_clock;
  TrialOutcome out;
  const Graph g = trial_graph(c, trial);
  const int p = g.vertex_count();
  out.p = p;
  const CouplingField field = CouplingField::homogeneous(g, theta);
  const std::uint64_t seed = derive_seed(c.seed, group + 1, static_cast<std::uint64_t>(trial));
  const MixingEstimate est =
      estimate_mixing(field, derive_seed(seed, 0x6d6978, 0), c.max_mixing_sweeps);
  const SamplerSettings st = sampler_settings(est, c.burn_factor, c.thin_divisor);
  out.saturated = est.saturated;
  out.burn_in = st.burn_in;
  out.thin = st.thin;
  const SampleSet s = gibbs_sample(field, n, st.burn_in, st.thin, seed);

  const LearnerConfig base = learner_for(c, theta);
  const std::size_t nl = c.lambda0s.size();
  out.exact.assign(nl, 0);
  out.vertex_ok.assign(nl, 0);
  out.runtime_ms.assign(nl, 0.0);

  auto record = [&](std::size_t k, const Graph& learned, double ms) {
    out.exact[k] = learned == g;
    out.vertex_ok[k] = matching_neighborhoods(g, learned);
    out.runtime_ms[k] = ms;
  };

  if (base.algorithm != Algorithm::rlr) {
    const auto t0 = clock::now();
    const Graph learned = learn(s, base).graph;
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    for (std::size_t k = 0; k < nl; ++k) record(k, learned, ms);
    return out;
  }

  // RLR: lambda0 path per vertex, largest lambda first, warm-started.
  std::vector<std::size_t> order(nl);
  for (std::size_t k = 0; k < nl; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c.lambda0s[a] > c.lambda0s[b]; });
  std::vector<std::vector<std::vector<Vertex>>> nbhd(nl, std::vector<std::vector<Vertex>>(p));
  const double scale = lambda_scale(theta, p, n);
  for (Vertex r = 1; r <= p; ++r) {
    auto t0 = clock::now();
    const PseudoLikelihood pl(s, r);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(pl.dimension());
    const double setup = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    for (std::size_t k : order) {
      t0 = clock::now();
      RlrOptions o = base.rlr;
      o.lambda = c.lambda0s[k] * scale;
      const NeighborhoodEstimate e = rlr_neighborhood(pl, p, o, &warm);
      warm = e.theta;
      nbhd[k][r - 1] = e.neighbors;
      out.runtime_ms[k] += setup + std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }
  }
  for (std::size_t k = 0; k < nl; ++k) {
    const auto t0 = clock::now();
    const Graph learned = combine_neighborhoods(p, nbhd[k], base.rule);
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    record(k, learned, out.runtime_ms[k] + ms);
  }
  return out;
}

}  // namespace detail

/// Pilot-based runtime estimate in seconds: one trial per theta at the
/// largest n, charged to every (n, trial) cell. Errs high.
inline double estimate_sweep_seconds(const SweepConfig& c) {
  validate(c);
  using clock = std::chrono::steady_clock;
  const int p = detail::trial_graph(c, 0).vertex_count();
  double total = 0.0;
  for (std::size_t ti = 0; ti < c.thetas.size(); ++ti) {
    long nmax = 0;
    for (long n : c.ns) nmax = std::max(nmax, detail::resolve_n(c, n, c.thetas[ti], p));
    const auto t0 = clock::now();
    detail::run_trial(c, ti * c.ns.size(), c.thetas[ti], nmax, 0);
    const double s = std::chrono::duration<double>(clock::now() - t0).count();
    total += s * static_cast<double>(c.ns.size()) * c.trials;
  }
  const double workers = static_cast<double>(worker_count(static_cast<std::size_t>(c.trials), c.threads));
  return 1.25 * total / workers;
}

/// Runs every (theta, n, lambda0) cell. Trials within a (theta, n) group run
/// concurrently with per-trial derived seeds, so results do not depend on the
/// thread count. Sampler saturation is recorded per cell.
inline SweepResult run_sweep(const SweepConfig& c) {
  validate(c);
  if (c.budget_s > 0.0) {
    const double est = estimate_sweep_seconds(c);
    if (est > c.budget_s) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "estimated %.0f s exceeds the budget of %.0f s", est, c.budget_s);
      throw Error(Errc::budget_exceeded, buf);
    }
  }
  const int p = detail::trial_graph(c, 0).vertex_count();
  SweepResult res;
  res.timing = c.timing;
  for (std::size_t ti = 0; ti < c.thetas.size(); ++ti) {
    for (std::size_t ni = 0; ni < c.ns.size(); ++ni) {
      const double theta = c.thetas[ti];
      const long n = detail::resolve_n(c, c.ns[ni], theta, p);
      const std::size_t group = ti * c.ns.size() + ni;
      std::vector<detail::TrialOutcome> outcomes(static_cast<std::size_t>(c.trials));
      parallel_for(
          outcomes.size(),
          [&](std::size_t t) { outcomes[t] = detail::run_trial(c, group, theta, n, static_cast<int>(t)); },
          c.threads);
      const std::size_t cells = c.learner.algorithm == Algorithm::rlr ? c.lambda0s.size() : 1;
      for (std::size_t k = 0; k < cells; ++k) {
        SweepCell cell;
        cell.theta = theta;
        cell.lambda0 = c.learner.algorithm == Algorithm::rlr ? c.lambda0s[k] : 0.0;
        cell.n = n;
        cell.trials = c.trials;
        for (const auto& o : outcomes) {
          cell.successes += o.exact[k];
          cell.vertex_successes += o.vertex_ok[k];
          cell.vertex_total += o.p;
          cell.total_runtime_ms += o.runtime_ms[k];
          cell.saturated += o.saturated;
          cell.mean_burn_in += static_cast<double>(o.burn_in) / c.trials;
          cell.mean_thin += static_cast<double>(o.thin) / c.trials;
        }
        res.cells.push_back(cell);
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr const char* kSweepHeader = "theta,lambda0,n,trials,p_succ,p_vertex,mean_runtime_ms";

inline std::string timestamp_line(const std::string& what) {
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return "# isingrecon " + what + " " + buf;
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// CSV body rows, without the timestamp line or header.
inline void write_sweep_rows(std::ostream& out, const SweepResult& r) {
  for (const auto& c : r.cells) {
    out << format_number(c.theta) << ',' << format_number(c.lambda0) << ',' << c.n << ','
        << c.trials << ',' << format_number(c.p_succ()) << ',' << format_number(c.p_vertex()) << ','
        << (r.timing ? format_number(c.mean_runtime_ms()) : "nan") << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << timestamp_line("sweep") << '\n' << kSweepHeader << '\n';
  write_sweep_rows(out, r);
}

/// gnuplot data: one block per (lambda0, n) curve over theta, blocks
/// separated by two blank lines; sampler diagnostics as extra columns.
inline void write_sweep_dat(std::ostream& out, const SweepResult& r) {
  out << "# theta p_succ p_vertex mean_runtime_ms saturated mean_burn_in mean_thin\n";
  std::map<std::pair<double, long>, std::vector<const SweepCell*>> curves;
  for (const auto& c : r.cells) curves[{c.lambda0, c.n}].push_back(&c);
  bool first = true;
  for (const auto& [key, cells] : curves) {
    if (!first) out << "\n\n";
    first = false;
    out << "# lambda0=" << format_number(key.first) << " n=" << key.second << '\n';
    for (const SweepCell* c : cells)
      out << format_number(c->theta) << ' ' << format_number(c->p_succ()) << ' '
          << format_number(c->p_vertex()) << ' '
          << (r.timing ? format_number(c->mean_runtime_ms()) : "nan") << ' ' << c->saturated << ' '
          << format_number(c->mean_burn_in) << ' ' << format_number(c->mean_thin) << '\n';
  }
}

/// Best lambda0 per (theta, n): the maximum of p_succ over lambda0.
inline std::vector<SweepCell> best_over_lambda(const SweepResult& r) {
  std::map<std::pair<double, long>, SweepCell> best;
  for (const auto& c : r.cells) {
    auto [it, inserted] = best.emplace(std::make_pair(c.theta, c.n), c);
    if (!inserted && c.successes > it->second.successes) it->second = c;
  }
  std::vector<SweepCell> out;
  for (auto& [k, c] : best) out.push_back(c);
  return out;
}

}  // namespace isingrecon
