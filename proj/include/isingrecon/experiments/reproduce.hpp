#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "isingrecon/analysis/toy.hpp"
#include "isingrecon/analysis/tree_limit.hpp"
#include "isingrecon/experiments/sweep.hpp"
#include "isingrecon/numeric.hpp"

namespace isingrecon {

inline constexpr double kDilutedGridCritical = 0.7;  // rho = 0.3 reference value

struct ReproduceOptions {
  std::uint64_t seed = 1;
  int trials = 0;  // 0 keeps the recipe default
  std::size_t threads = 0;
  bool timing = true;
};

inline const std::vector<std::string>& recipe_names() {
  static const std::vector<std::string> names{"grid-sweep", "regular-sweep", "toy-match",
                                              "thresholds"};
  return names;
}

/// Pinned sweep for the diluted-grid recipe.
inline SweepConfig grid_sweep_config() {
  SweepConfig c;
  c.family.family = Family::diluted_grid;
  c.family.side = 7;
  c.family.rho = 0.3;
  c.learner.algorithm = Algorithm::rlr;
  c.learner.degree = 4;
  c.thetas = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
  c.lambda0s = {2, 4, 6, 8, 12};
  c.ns = {4500};
  c.trials = 8;
  c.thin_divisor = 1;
  c.max_mixing_sweeps = 200;
  return c;
}

/// Pinned sweep for the random-regular recipe.
inline SweepConfig regular_sweep_config() {
  SweepConfig c;
  c.family.family = Family::random_regular;
  c.family.p = 30;
  c.family.degree = 4;
  c.learner.algorithm = Algorithm::rlr;
  c.learner.degree = 4;
  c.thetas = {0.10, 0.15, 0.20, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65};
  c.lambda0s = {4, 5, 6, 6.5, 7, 7.5, 8, 9, 10};
  c.ns = {500, 2000, 10000};
  c.trials = 10;
  c.thin_divisor = 1;
  c.max_mixing_sweeps = 200;
  return c;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path, std::vector<std::string>& written) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::invalid_parameter, "cannot write " + path.string());
  written.push_back(path.string());
  return out;
}

inline std::string sweep_summary(const std::string& name, const SweepConfig& c, const SweepResult& r) {
  std::ostringstream md;
  md << "# " << name << "\n\n";
  md << "- family: ";
  if (c.family.family == Family::diluted_grid)
    md << c.family.side << "x" << c.family.side << " grid, edges removed with probability "
       << format_number(c.family.rho) << "\n";
  else
    md << "random " << c.family.degree << "-regular, p = " << c.family.p << "\n";
  md << "- learner: rlr, lambda = 2 lambda0 theta sqrt(log p / n)\n";
  md << "- trials per cell: " << c.trials << ", seed base: " << c.seed << "\n";
  md << "- theta_thr(4) = " << format_number(theta_thr(4)) << "\n";
  if (c.family.family == Family::diluted_grid)
    md << "- theta_crit(rho = 0.3) ~ " << format_number(kDilutedGridCritical) << " (reference)\n";
  md << "\nBest lambda0 per cell:\n\n";
  md << "| theta | n | lambda0 | p_succ | p_vertex | saturated |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& b : best_over_lambda(r))
    md << "| " << format_number(b.theta) << " | " << b.n << " | " << format_number(b.lambda0)
       << " | " << format_number(b.p_succ()) << " | " << format_number(b.p_vertex()) << " | "
       << b.saturated << " |\n";
  return md.str();
}

inline std::vector<std::string> reproduce_sweep(const std::string& name, SweepConfig c,
                                                const std::filesystem::path& dir,
                                                const ReproduceOptions& o) {
  c.seed = o.seed;
  c.threads = o.threads;
  c.timing = o.timing;
  if (o.trials > 0) c.trials = o.trials;
  const SweepResult r = run_sweep(c);
  std::vector<std::string> written;
  {
    auto out = open_out(dir / (name + ".csv"), written);
    write_sweep_csv(out, r);
  }
  {
    auto out = open_out(dir / (name + ".dat"), written);
    out << "# overlay theta_thr(4) " << format_number(theta_thr(4)) << '\n';
    if (c.family.family == Family::diluted_grid)
      out << "# overlay theta_crit " << format_number(kDilutedGridCritical) << '\n';
    write_sweep_dat(out, r);
  }
  {
    auto out = open_out(dir / "summary.md", written);
    out << sweep_summary(name, c, r);
  }
  return written;
}

inline std::vector<std::string> reproduce_toy_match(const std::filesystem::path& dir) {
  const double theta_prime = 0.5;
  const double target = std::tanh(theta_prime);
  std::vector<std::string> written;
  std::ostringstream csv, dat, md;
  csv << timestamp_line("toy-match") << '\n' << "p,theta,x12,tanh_theta_prime,abs_diff,x13,x34\n";
  dat << "# p abs_diff x12 x13 x34\n";
  md << "# toy-match\n\n";
  md << "G_p at theta = sqrt(theta'/p) against G'_p at theta' = " << format_number(theta_prime)
     << ".\n\n| p | theta | E{x1x2} | abs diff |\n|---|---|---|---|\n";
  for (int p = 4; p <= 4096; p *= 2) {
    const double theta = std::sqrt(theta_prime / p);
    const ToyCovariances t = toy_covariances(p, theta);
    const double diff = std::abs(t.x12 - target);
    csv << p << ',' << format_number(theta) << ',' << format_number(t.x12) << ','
        << format_number(target) << ',' << format_number(diff) << ',' << format_number(t.x13) << ','
        << format_number(*t.x34) << '\n';
    dat << p << ' ' << format_number(diff) << ' ' << format_number(t.x12) << ' '
        << format_number(t.x13) << ' ' << format_number(*t.x34) << '\n';
    md << "| " << p << " | " << format_number(theta) << " | " << format_number(t.x12) << " | "
       << format_number(diff) << " |\n";
  }
  open_out(dir / "toy-match.csv", written) << csv.str();
  open_out(dir / "toy-match.dat", written) << dat.str();
  open_out(dir / "summary.md", written) << md.str();
  return written;
}

/// Root of 3x(1 + x^2) = 1 + 3x^2 in (0, 1).
inline double toy_incoherence_crossing() {
  return bisect([](double x) { return 3.0 * x * (1.0 + x * x) - (1.0 + 3.0 * x * x); }, 0.0, 1.0,
                1e-15);
}

inline std::vector<std::string> reproduce_thresholds(const std::filesystem::path& dir) {
  struct Row {
    std::string name;
    double value;
  };
  const HInfinity hi = h_infinity();
  const double xstar = toy_incoherence_crossing();
  std::vector<Row> rows{
      {"theta_thr(4)", theta_thr(4)},
      {"x_star", xstar},
      {"atanh(x_star)", std::atanh(xstar)},
      {"theta_T(G_5)", theta_T(3)},
      {"h_inf", hi.h},
      {"theta_tilde", hi.theta_tilde},
      {"theta_uniq(4)", std::atanh(1.0 / 3.0)},
  };
  std::vector<std::string> written;
  std::ostringstream csv, dat, md;
  csv << timestamp_line("thresholds") << '\n' << "quantity,value\n";
  for (const auto& r : rows) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", r.value);
    csv << r.name << ',' << buf << '\n';
  }
  md << "# thresholds\n\n| quantity | value |\n|---|---|\n";
  for (const auto& r : rows) md << "| " << r.name << " | " << format_number(r.value) << " |\n";
  md << "\nScaled threshold theta_thr(degree) * degree:\n\n| degree | theta_thr | scaled |\n|---|---|---|\n";
  dat << "# degree theta_thr theta_thr*degree theta_T\n";
  for (int d : {4, 5, 6, 8, 10, 15, 20, 30, 40, 60, 80}) {
    const double t = theta_thr(d);
    md << "| " << d << " | " << format_number(t) << " | " << format_number(t * d) << " |\n";
    dat << d << ' ' << format_number(t) << ' ' << format_number(t * d) << ' '
        << format_number(theta_T(d)) << '\n';
  }
  open_out(dir / "thresholds.csv", written) << csv.str();
  open_out(dir / "thresholds.dat", written) << dat.str();
  open_out(dir / "summary.md", written) << md.str();
  return written;
}

}  // namespace detail

/// Runs a named recipe and writes CSV, gnuplot data and summary.md into dir.
/// Returns the written paths.
inline std::vector<std::string> reproduce(const std::string& name, const std::string& dir,
                                          const ReproduceOptions& o = {}) {
  const std::filesystem::path out(dir);
  std::filesystem::create_directories(out);
  if (name == "grid-sweep") return detail::reproduce_sweep(name, grid_sweep_config(), out, o);
  if (name == "regular-sweep") return detail::reproduce_sweep(name, regular_sweep_config(), out, o);
  if (name == "toy-match") return detail::reproduce_toy_match(out);
  if (name == "thresholds") return detail::reproduce_thresholds(out);
  throw Error(Errc::invalid_parameter, "unknown recipe '" + name + "'");
}

}  // namespace isingrecon
