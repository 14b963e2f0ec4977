#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "isingrecon/graph.hpp"

namespace isingrecon {

struct WeightedEdge {
  Edge edge;
  double theta = 0.0;
};

/// Symmetric sparse couplings theta_ij on vertices 1..p with zero diagonal.
/// Pairs not listed have coupling zero.
class CouplingField {
 public:
  struct Neighbor {
    Vertex vertex;
    double theta;
  };

  CouplingField() = default;

  CouplingField(int p, std::vector<WeightedEdge> couplings) : p_(p), couplings_(std::move(couplings)) {
    std::sort(couplings_.begin(), couplings_.end(),
              [](const WeightedEdge& a, const WeightedEdge& b) { return a.edge < b.edge; });
    // Validates simplicity of the support.
    std::vector<Edge> support;
    support.reserve(couplings_.size());
    for (const auto& c : couplings_) {
      require(std::isfinite(c.theta), Errc::invalid_parameter, "couplings must be finite");
      support.push_back(c.edge);
    }
    (void)Graph(p, support);
    rows_.assign(static_cast<std::size_t>(p) + 1, {});
    for (const auto& c : couplings_) {
      rows_[c.edge.u].push_back({c.edge.v, c.theta});
      rows_[c.edge.v].push_back({c.edge.u, c.theta});
    }
  }

  /// theta on every edge of g, zero elsewhere.
  static CouplingField homogeneous(const Graph& g, double theta) {
    std::vector<WeightedEdge> c;
    c.reserve(g.edge_count());
    for (const Edge& e : g.edges()) c.push_back({e, theta});
    return CouplingField(g.vertex_count(), std::move(c));
  }

  int vertex_count() const { return p_; }
  const std::vector<WeightedEdge>& couplings() const { return couplings_; }
  const std::vector<Neighbor>& row(Vertex v) const { return rows_.at(v); }

  double at(Vertex a, Vertex b) const {
    if (a == b) return 0.0;
    for (const auto& n : rows_.at(a))
      if (n.vertex == b) return n.theta;
    return 0.0;
  }

  double abs_sum() const {
    double s = 0.0;
    for (const auto& c : couplings_) s += std::abs(c.theta);
    return s;
  }

  bool ferromagnetic() const {
    return std::all_of(couplings_.begin(), couplings_.end(),
                       [](const WeightedEdge& c) { return c.theta >= 0.0; });
  }

 private:
  int p_ = 0;
  std::vector<WeightedEdge> couplings_;
  std::vector<std::vector<Neighbor>> rows_{1};
};

}  // namespace isingrecon
