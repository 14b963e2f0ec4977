#pragma once

#include <string>
#include <vector>

#include "isingrecon/gibbs.hpp"
#include "isingrecon/learners/independence_test.hpp"
#include "isingrecon/learners/pseudo_likelihood.hpp"
#include "isingrecon/learners/thresholding.hpp"

namespace isingrecon {

enum class Algorithm { thr, ind, indd, rlr };

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "thr") return Algorithm::thr;
  if (s == "ind") return Algorithm::ind;
  if (s == "indd") return Algorithm::indd;
  if (s == "rlr") return Algorithm::rlr;
  throw Error(Errc::parse_error, "unknown algorithm '" + s + "'");
}

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::thr: return "thr";
    case Algorithm::ind: return "ind";
    case Algorithm::indd: return "indd";
    case Algorithm::rlr: return "rlr";
  }
  return "?";
}

struct LearnerConfig {
  Algorithm algorithm = Algorithm::rlr;
  double tau = 0.5;
  int degree = 1;
  double eps = 0.1;
  double gamma = 0.01;
  double kappa = 0.5;
  RlrOptions rlr;
  EdgeRule rule = EdgeRule::or_rule;
  std::size_t threads = 0;
};

struct LearnResult {
  EdgeSet graph;
  std::vector<NeighborhoodEstimate> vertices;  // filled for rlr only
};

inline LearnResult learn(const SampleSet& s, const LearnerConfig& c) {
  LearnResult out;
  switch (c.algorithm) {
    case Algorithm::thr:
      out.graph = thresholding(empirical_correlations(s), c.tau);
      break;
    case Algorithm::ind:
    case Algorithm::indd: {
      IndOptions o;
      o.degree = c.degree;
      o.eps = c.eps;
      o.gamma = c.gamma;
      o.kappa = c.kappa;
      o.pruned = c.algorithm == Algorithm::indd;
      o.rule = c.rule;
      o.threads = c.threads;
      out.graph = local_independence_test(EmpiricalTable(s), o);
      break;
    }
    case Algorithm::rlr: {
      auto r = rlr_graph(s, c.rlr, c.rule, c.threads);
      out.graph = std::move(r.graph);
      out.vertices = std::move(r.vertices);
      break;
    }
  }
  return out;
}

}  // namespace isingrecon
