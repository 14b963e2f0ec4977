#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isingrecon/analysis/certificate.hpp"
#include "isingrecon/analysis/incoherence.hpp"
#include "isingrecon/analysis/toy.hpp"
#include "isingrecon/analysis/tree_limit.hpp"
#include "isingrecon/enumeration.hpp"
#include "isingrecon/experiments/reproduce.hpp"
#include "isingrecon/experiments/sweep.hpp"
#include "isingrecon/gibbs.hpp"
#include "isingrecon/graph_io.hpp"
#include "isingrecon/learners/learner.hpp"
#include "isingrecon/sample_io.hpp"

using json = nlohmann::json;
using namespace isingrecon;

namespace {

// All vertex indices on the command line and in outputs are 0-based.

std::vector<int> zero_based(const std::vector<Vertex>& v) {
  std::vector<int> out;
  out.reserve(v.size());
  for (Vertex x : v) out.push_back(x - 1);
  return out;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json to_json(const IncoherenceReport& r) {
  return {{"root", r.root - 1},
          {"s", zero_based(r.s)},
          {"s_comp", zero_based(r.s_comp)},
          {"norm", r.norm},
          {"sigma_min", r.sigma_min},
          {"row_values", to_vec(r.row_values)},
          {"row_l1", to_vec(r.row_l1)},
          {"q_ss", to_json(r.q_ss)},
          {"q_scs", to_json(r.q_scs)}};
}

json to_json(const TreeLimitReport& r) {
  return {{"degree", r.degree}, {"theta", r.theta}, {"h_star", r.h_star},   {"a", r.a},
          {"b", r.b},           {"c1", r.c1},       {"c2", r.c2},           {"alpha", r.alpha},
          {"beta", r.beta},     {"B", r.b_limit},   {"c_min", r.c_min},     {"S", r.s_value}};
}

json to_json(const ThresholdCertificate& c) {
  return {{"degree", c.degree},
          {"theta", c.theta},
          {"p", c.p},
          {"edge_corr", c.edge_corr},
          {"max_nonedge_corr", c.max_nonedge_corr},
          {"certificate", c.certificate},
          {"m_squared", c.m_squared},
          {"exact", c.exact},
          {"fails", c.fails()}};
}

struct Output {
  std::ofstream file;
  std::ostream* out = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    require(static_cast<bool>(file), Errc::invalid_parameter, "cannot write " + path);
    out = &file;
  }
  std::ostream& operator*() { return *out; }
};

std::vector<double> theta_grid(double from, double to, int steps) {
  require(steps >= 1 && from > 0.0 && to >= from, Errc::invalid_parameter,
          "need 0 < from <= to and steps >= 1");
  std::vector<double> out;
  for (int k = 0; k <= steps; ++k) out.push_back(from + (to - from) * k / steps);
  return out;
}

// ---------------------------------------------------------------------------

struct GraphArgs {
  std::string family = "tree";
  int p = 0, degree = 0, side = 0, branching = 2;
  bool periodic = false;
  double rho = 0.0;
  std::string shape = "path";
  std::uint64_t seed = 0;
  std::string out;
};

void add_graph(CLI::App& app, GraphArgs& a) {
  auto* c = app.add_subcommand("graph", "Generate a graph file");
  c->add_option("--family", a.family,
                "tree | star | grid | diluted-grid | random-regular | regular-plus-edge | toy-gp | "
                "toy-gp-prime")
      ->required();
  c->add_option("--p", a.p, "Vertex count");
  c->add_option("--degree", a.degree, "Star or regular degree");
  c->add_option("--side", a.side, "Grid side");
  c->add_flag("--periodic", a.periodic, "Periodic grid");
  c->add_option("--rho", a.rho, "Edge removal probability");
  c->add_option("--shape", a.shape, "Tree shape: path | balanced");
  c->add_option("--branching", a.branching, "Balanced tree branching");
  c->add_option("--seed", a.seed, "Seed for random families");
  c->add_option("--out", a.out, "Output file (default stdout)");
  c->callback([&a] {
    GraphFamilySpec s;
    s.family = parse_family(a.family);
    s.p = a.p;
    s.degree = a.degree;
    s.side = a.side;
    s.periodic = a.periodic;
    s.rho = a.rho;
    require(a.shape == "path" || a.shape == "balanced", Errc::parse_error,
            "shape must be path or balanced");
    s.shape = a.shape == "path" ? TreeShape::path : TreeShape::balanced;
    s.branching = a.branching;
    s.seed = a.seed;
    Output o(a.out);
    write_graph(*o, build_graph(s));
  });
}

struct SampleArgs {
  std::string graph, out, corr;
  double theta = 0.0;
  long n = 0;
  std::uint64_t seed = 1;
  long burn_in = 0, thin = 0;
  long max_mixing = 2000, burn_factor = 10, thin_divisor = 10;
};

void add_sample(CLI::App& app, SampleArgs& a) {
  auto* c = app.add_subcommand("sample", "Draw Glauber samples from the homogeneous model on a graph");
  c->add_option("--graph", a.graph, "Graph file")->required();
  c->add_option("--theta", a.theta, "Coupling on every edge")->required();
  c->add_option("--n", a.n, "Number of samples")->required();
  c->add_option("--seed", a.seed, "Seed");
  c->add_option("--burn-in", a.burn_in, "Burn-in sweeps (default from the mixing estimate)");
  c->add_option("--thin", a.thin, "Sweeps between samples (default from the mixing estimate)");
  c->add_option("--max-mixing-sweeps", a.max_mixing, "Cap on the mixing estimate");
  c->add_option("--burn-factor", a.burn_factor, "burn-in = factor x estimate");
  c->add_option("--thin-divisor", a.thin_divisor, "thin = estimate / divisor");
  c->add_option("--out", a.out, "Sample file (default stdout)");
  c->add_option("--corr", a.corr, "Also write the empirical correlation matrix as CSV");
  c->callback([&a] {
    const Graph g = load_graph(a.graph);
    const CouplingField f = CouplingField::homogeneous(g, a.theta);
    long burn = a.burn_in, thin = a.thin;
    if (burn == 0 || thin == 0) {
      const MixingEstimate est = estimate_mixing(f, derive_seed(a.seed, 0x6d6978, 0), a.max_mixing);
      const SamplerSettings st = sampler_settings(est, a.burn_factor, a.thin_divisor);
      if (burn == 0) burn = st.burn_in;
      if (thin == 0) thin = st.thin;
      if (est.saturated)
        std::cerr << "warning: mixing estimate hit the cap of " << a.max_mixing << " sweeps\n";
    }
    const SampleSet s = gibbs_sample(f, a.n, burn, thin, a.seed);
    Output o(a.out);
    write_samples(*o, s);
    if (!a.corr.empty()) {
      Output c(a.corr);
      write_correlation_csv(*c, empirical_correlations(s));
    }
  });
}

struct LearnArgs {
  std::string alg = "rlr", samples, out, diagnostics, rule = "or";
  std::optional<double> tau, eps, gamma, kappa;
  double lambda = 0.1, tol = 1e-6, selection = 1e-6;
  int degree = 1, max_iter = 5000;
  std::size_t threads = 0;
};

void add_learn(CLI::App& app, LearnArgs& a) {
  auto* c = app.add_subcommand("learn", "Learn a graph from a sample file");
  c->add_option("--alg", a.alg, "thr | ind | indd | rlr")->required();
  c->add_option("--samples", a.samples, "Sample file")->required();
  c->add_option("--out", a.out, "Graph file (default stdout)");
  c->add_option("--diagnostics", a.diagnostics, "JSON-lines diagnostics (default <out>.jsonl)");
  c->add_option("--tau", a.tau, "Threshold for thr");
  c->add_option("--degree", a.degree, "Maximum degree for ind and indd");
  c->add_option("--eps", a.eps, "Score threshold for ind and indd");
  c->add_option("--gamma", a.gamma, "Probability floor for ind and indd");
  c->add_option("--kappa", a.kappa, "Correlation pruning level for indd");
  c->add_option("--lambda", a.lambda, "Regularization for rlr");
  c->add_option("--tol", a.tol, "Solver tolerance for rlr");
  c->add_option("--max-iter", a.max_iter, "Solver iteration cap for rlr");
  c->add_option("--selection", a.selection, "Coefficient cutoff for rlr");
  c->add_option("--rule", a.rule, "Edge rule: or | and");
  c->add_option("--threads", a.threads, "Worker threads (0 = hardware)");
  c->callback([&a] {
    LearnerConfig cfg;
    cfg.algorithm = parse_algorithm(a.alg);
    cfg.rule = parse_edge_rule(a.rule);
    cfg.degree = a.degree;
    cfg.threads = a.threads;
    cfg.rlr.lambda = a.lambda;
    cfg.rlr.tol = a.tol;
    cfg.rlr.max_iter = a.max_iter;
    cfg.rlr.selection = a.selection;
    if (cfg.algorithm == Algorithm::thr)
      require(a.tau.has_value(), Errc::invalid_parameter, "thr needs --tau");
    if (cfg.algorithm == Algorithm::ind || cfg.algorithm == Algorithm::indd)
      require(a.eps && a.gamma, Errc::invalid_parameter, "ind and indd need --eps and --gamma");
    if (cfg.algorithm == Algorithm::indd)
      require(a.kappa.has_value(), Errc::invalid_parameter, "indd needs --kappa");
    if (a.tau) cfg.tau = *a.tau;
    if (a.eps) cfg.eps = *a.eps;
    if (a.gamma) cfg.gamma = *a.gamma;
    if (a.kappa) cfg.kappa = *a.kappa;

    const SampleSet s = load_samples(a.samples);
    const LearnResult r = learn(s, cfg);
    {
      Output o(a.out);
      write_graph(*o, r.graph);
    }
    std::string diag = a.diagnostics;
    if (diag.empty() && !a.out.empty() && a.out != "-") diag = a.out + ".jsonl";
    if (diag.empty()) return;
    Output d(diag);
    for (Vertex v = 1; v <= r.graph.vertex_count(); ++v) {
      json line{{"vertex", v - 1},
                {"algorithm", to_string(cfg.algorithm)},
                {"neighbors", zero_based(r.graph.neighbors(v))}};
      if (!r.vertices.empty()) {
        const NeighborhoodEstimate& e = r.vertices[v - 1];
        line["selected"] = zero_based(e.neighbors);
        line["converged"] = e.diagnostics.converged;
        line["iterations"] = e.diagnostics.iterations;
        line["objective"] = e.diagnostics.objective;
        line["residual"] = e.diagnostics.residual;
      }
      *d << line.dump() << '\n';
    }
  });
}

struct AnalyzeArgs {
  std::string graph, out;
  double theta = 0.0, from = 0.05, to = 2.0, delta = 0.05;
  int root = 0, degree = 4, steps = 100, p = 0;
  std::string kind = "thr-tree";
  std::uint64_t seed = 1;
};

void add_analyze(CLI::App& app, AnalyzeArgs& a) {
  auto* an = app.add_subcommand("analyze", "Population-level analysis");
  an->require_subcommand(1);

  auto* inc = an->add_subcommand("incoherence", "Exact incoherence report at one root (JSON)");
  inc->add_option("--graph", a.graph, "Graph file")->required();
  inc->add_option("--theta", a.theta, "Coupling")->required();
  inc->add_option("--root", a.root, "Root vertex");
  inc->add_option("--out", a.out, "Output file (default stdout)");
  inc->callback([&a] {
    const Graph g = load_graph(a.graph);
    const IncoherenceReport r = incoherence(exact_moments(g, a.theta), a.root + 1);
    Output o(a.out);
    *o << to_json(r).dump(2) << '\n';
  });

  auto* tl = an->add_subcommand("tree-limit", "Limiting incoherence on random regular graphs (JSON)");
  tl->add_option("--degree", a.degree, "Degree (>= 4)");
  tl->add_option("--theta", a.theta, "Coupling")->required();
  tl->add_option("--out", a.out, "Output file (default stdout)");
  tl->callback([&a] {
    Output o(a.out);
    *o << to_json(tree_limit_report(a.degree, a.theta)).dump(2) << '\n';
  });

  auto* th = an->add_subcommand("thresholds", "Threshold values (JSON)");
  th->add_option("--degree", a.degree, "Degree for theta_thr and theta_T");
  th->add_option("--out", a.out, "Output file (default stdout)");
  th->callback([&a] {
    const HInfinity h = h_infinity();
    json j{{"degree", a.degree},
           {"theta_thr", theta_thr(a.degree)},
           {"theta_uniq", std::atanh(1.0 / (a.degree - 1.0))},
           {"theta_T", theta_T(a.degree)},
           {"h_inf", h.h},
           {"h_inf_residual", h.residual},
           {"theta_tilde", h.theta_tilde},
           {"x_star", detail::toy_incoherence_crossing()}};
    Output o(a.out);
    *o << j.dump(2) << '\n';
  });

  auto* sb = an->add_subcommand("sweep-b", "CSV of B(theta) for one degree");
  sb->add_option("--degree", a.degree, "Degree (>= 4)");
  sb->add_option("--from", a.from, "First theta");
  sb->add_option("--to", a.to, "Last theta");
  sb->add_option("--steps", a.steps, "Number of intervals");
  sb->add_option("--out", a.out, "Output file (default stdout)");
  sb->callback([&a] {
    Output o(a.out);
    *o << "theta,h_star,B,S\n";
    for (double t : theta_grid(a.from, a.to, a.steps)) {
      if (t <= std::atanh(1.0 / (a.degree - 1.0))) continue;
      const TreeLimitReport r = tree_limit_report(a.degree, t);
      *o << format_number(t) << ',' << format_number(r.h_star) << ',' << format_number(r.b_limit)
         << ',' << format_number(r.s_value) << '\n';
    }
  });

  auto* si = an->add_subcommand("sweep-incoherence", "CSV of exact incoherence versus theta");
  si->add_option("--graph", a.graph, "Graph file")->required();
  si->add_option("--root", a.root, "Root vertex");
  si->add_option("--from", a.from, "First theta");
  si->add_option("--to", a.to, "Last theta");
  si->add_option("--steps", a.steps, "Number of intervals");
  si->add_option("--out", a.out, "Output file (default stdout)");
  si->callback([&a] {
    const Graph g = load_graph(a.graph);
    Output o(a.out);
    *o << "theta,incoherence,sigma_min\n";
    for (double t : theta_grid(a.from, a.to, a.steps)) {
      const IncoherenceReport r = incoherence(exact_moments(g, t), a.root + 1);
      *o << format_number(t) << ',' << format_number(r.norm) << ',' << format_number(r.sigma_min)
         << '\n';
    }
  });

  auto* sx = an->add_subcommand("sweep-x", "CSV of x_degree(theta) against tanh(theta)");
  sx->add_option("--degree", a.degree, "Degree");
  sx->add_option("--from", a.from, "First theta");
  sx->add_option("--to", a.to, "Last theta");
  sx->add_option("--steps", a.steps, "Number of intervals");
  sx->add_option("--out", a.out, "Output file (default stdout)");
  sx->callback([&a] {
    Output o(a.out);
    *o << "theta,x,tanh_theta\n";
    for (double t : theta_grid(a.from, a.to, a.steps))
      *o << format_number(t) << ',' << format_number(gp_neighbor_corr(a.degree, t)) << ','
         << format_number(std::tanh(t)) << '\n';
  });

  auto* bd = an->add_subcommand("bound", "Sample complexity bound (JSON)");
  bd->add_option("--kind", a.kind, "thr-tree | thr-degree | ind | indd | rlr");
  bd->add_option("--theta", a.theta, "Coupling")->required();
  bd->add_option("--degree", a.degree, "Maximum degree");
  bd->add_option("--p", a.p, "Vertex count")->required();
  bd->add_option("--delta", a.delta, "Failure probability");
  bd->add_option("--out", a.out, "Output file (default stdout)");
  bd->callback([&a] {
    BoundQuery q;
    q.kind = parse_bound_kind(a.kind);
    q.theta = a.theta;
    q.degree = a.degree;
    q.p = a.p;
    q.delta = a.delta;
    Output o(a.out);
    *o << json{{"kind", a.kind}, {"theta", a.theta}, {"degree", a.degree}, {"p", a.p},
               {"delta", a.delta}, {"n", sample_bound(q)}}
              .dump(2)
       << '\n';
  });

  auto* ce = an->add_subcommand("certificate", "Thresholding failure certificate (JSON)");
  ce->add_option("--degree", a.degree, "Regular degree");
  ce->add_option("--theta", a.theta, "Coupling")->required();
  ce->add_option("--p", a.p, "Vertex count")->required();
  ce->add_option("--seed", a.seed, "Graph seed");
  ce->add_option("--out", a.out, "Output file (default stdout)");
  ce->callback([&a] {
    Output o(a.out);
    *o << to_json(thresholding_failure_certificate(a.degree, a.theta, a.p, a.seed)).dump(2) << '\n';
  });
}

struct SweepArgs {
  std::string config, out, dat;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* c = app.add_subcommand("sweep", "Run a success-probability sweep from a config file");
  c->add_option("--config", a.config, "key = value config file")->required();
  c->add_option("--out", a.out, "CSV output (overrides the config's output key)");
  c->add_option("--dat", a.dat, "Also write gnuplot data");
  c->callback([&a] {
    SweepConfig cfg = load_sweep_config(a.config);
    if (!a.out.empty()) cfg.output = a.out;
    const SweepResult r = run_sweep(cfg);
    {
      Output o(cfg.output);
      write_sweep_csv(*o, r);
    }
    if (!a.dat.empty()) {
      Output d(a.dat);
      write_sweep_dat(*d, r);
    }
  });
}

struct ReproduceArgs {
  std::string name, out;
  ReproduceOptions opts;
  bool no_timing = false;
};

void add_reproduce(CLI::App& app, ReproduceArgs& a) {
  auto* c = app.add_subcommand("reproduce", "Run a pinned recipe");
  c->add_option("name", a.name, "grid-sweep | regular-sweep | toy-match | thresholds")
      ->required()
      ->check(CLI::IsMember(recipe_names()));
  c->add_option("--out", a.out, "Output directory")->required();
  c->add_option("--seed", a.opts.seed, "Seed base");
  c->add_option("--trials", a.opts.trials, "Trials per cell (0 = recipe default)");
  c->add_option("--threads", a.opts.threads, "Worker threads (0 = hardware)");
  c->add_flag("--no-timing", a.no_timing, "Write nan for runtimes");
  c->callback([&a] {
    a.opts.timing = !a.no_timing;
    for (const auto& f : reproduce(a.name, a.out, a.opts)) std::cout << f << '\n';
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising model structure learning and analysis"};
  app.require_subcommand(1);
  GraphArgs ga;
  SampleArgs sa;
  LearnArgs la;
  AnalyzeArgs aa;
  SweepArgs wa;
  ReproduceArgs ra;
  add_graph(app, ga);
  add_sample(app, sa);
  add_learn(app, la);
  add_analyze(app, aa);
  add_sweep(app, wa);
  add_reproduce(app, ra);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
