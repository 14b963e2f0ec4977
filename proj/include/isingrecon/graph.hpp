#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "isingrecon/error.hpp"
#include "isingrecon/rng.hpp"

namespace isingrecon {

/// Vertices are labeled 1..p throughout the library.
using Vertex = int;

/// Unordered vertex pair, stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {}

  auto operator<=>(const Edge&) const = default;
};

/// Undirected simple graph on vertices 1..p. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Throws invalid-parameter on self-loops, duplicate edges or endpoints
  /// outside 1..p.
  Graph(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges)) {
    require(p >= 0, Errc::invalid_parameter, "vertex count must be non-negative");
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const Edge& e = edges_[k];
      require(e.u != e.v, Errc::invalid_parameter,
              "self-loop at vertex " + std::to_string(e.u));
      require(e.u >= 1 && e.v <= p, Errc::invalid_parameter,
              "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") out of range");
      require(k == 0 || edges_[k - 1] != e, Errc::invalid_parameter,
              "duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
    adjacency_.assign(static_cast<std::size_t>(p) + 1, {});
    for (const Edge& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    max_degree_ = 0;
    for (int v = 1; v <= p; ++v) {
      std::sort(adjacency_[v].begin(), adjacency_[v].end());
      max_degree_ = std::max(max_degree_, static_cast<int>(adjacency_[v].size()));
    }
  }

  int vertex_count() const { return p_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  int degree(Vertex v) const { return static_cast<int>(adjacency_.at(v).size()); }
  int max_degree() const { return max_degree_; }

  bool has_edge(Vertex a, Vertex b) const {
    if (a < 1 || b < 1 || a > p_ || b > p_ || a == b) return false;
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
  }

  bool operator==(const Graph& other) const {
    return p_ == other.p_ && edges_ == other.edges_;
  }

 private:
  int p_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_{1};
  int max_degree_ = 0;
};

/// Neighborhood-based learners and thresholding both return a Graph.
using EdgeSet = Graph;

/// BFS hop distances from src; unreachable vertices get -1. Index 0 unused.
inline std::vector<int> bfs_distances(const Graph& g, Vertex src) {
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()) + 1, -1);
  std::deque<Vertex> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    for (Vertex w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

/// Component label per vertex (index 0 unused), labels numbered from 0.
inline std::vector<int> connected_components(const Graph& g) {
  std::vector<int> label(static_cast<std::size_t>(g.vertex_count()) + 1, -1);
  int next = 0;
  for (Vertex s = 1; s <= g.vertex_count(); ++s) {
    if (label[s] >= 0) continue;
    const auto dist = bfs_distances(g, s);
    for (Vertex v = 1; v <= g.vertex_count(); ++v)
      if (dist[v] >= 0) label[v] = next;
    ++next;
  }
  return label;
}

/// Length of the shortest cycle, or max int for a forest.
inline int girth(const Graph& g) {
  int best = std::numeric_limits<int>::max();
  const int p = g.vertex_count();
  for (Vertex s = 1; s <= p; ++s) {
    std::vector<int> dist(static_cast<std::size_t>(p) + 1, -1);
    std::vector<Vertex> parent(static_cast<std::size_t>(p) + 1, 0);
    std::deque<Vertex> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      for (Vertex w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          parent[w] = v;
          queue.push_back(w);
        } else if (parent[v] != w) {
          best = std::min(best, dist[v] + dist[w] + 1);
        }
      }
    }
  }
  return best;
}

inline bool is_connected_acyclic(const Graph& g) {
  if (g.vertex_count() == 0) return true;
  if (g.edge_count() + 1 != static_cast<std::size_t>(g.vertex_count())) return false;
  const auto dist = bfs_distances(g, 1);
  return std::none_of(dist.begin() + 1, dist.end(), [](int d) { return d < 0; });
}

// ---------------------------------------------------------------------------
// Generators

enum class TreeShape { path, balanced };

/// Path 1-2-...-p, or a complete b-ary tree filled in breadth-first order.
inline Graph make_tree(int p, TreeShape shape, int branching = 2) {
  require(p >= 2, Errc::invalid_parameter, "tree needs p >= 2");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(p) - 1);
  if (shape == TreeShape::path) {
    for (Vertex v = 1; v < p; ++v) edges.emplace_back(v, v + 1);
  } else {
    require(branching >= 2, Errc::invalid_parameter, "balanced tree needs branching >= 2");
    for (Vertex v = 2; v <= p; ++v) edges.emplace_back((v - 2) / branching + 1, v);
  }
  return Graph(p, std::move(edges));
}

/// Vertex 1 joined to 2..deg+1; the rest isolated.
inline Graph make_star(int p, int deg) {
  require(deg >= 1 && deg <= p - 1, Errc::invalid_parameter,
          "star needs 1 <= deg <= p-1");
  std::vector<Edge> edges;
  for (Vertex v = 2; v <= deg + 1; ++v) edges.emplace_back(1, v);
  return Graph(p, std::move(edges));
}

/// side x side lattice, row-major labels: vertex (r, c) -> r*side + c + 1.
inline Graph make_grid(int side, bool periodic) {
  require(side >= 2, Errc::invalid_parameter, "grid needs side >= 2");
  require(!periodic || side >= 3, Errc::invalid_parameter,
          "periodic grid needs side >= 3 to stay simple");
  auto id = [side](int r, int c) { return r * side + c + 1; };
  std::vector<Edge> edges;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (c + 1 < side) edges.emplace_back(id(r, c), id(r, c + 1));
      else if (periodic) edges.emplace_back(id(r, c), id(r, 0));
      if (r + 1 < side) edges.emplace_back(id(r, c), id(r + 1, c));
      else if (periodic) edges.emplace_back(id(r, c), id(0, c));
    }
  }
  return Graph(side * side, std::move(edges));
}

/// Keeps each edge independently with probability 1 - rho.
inline Graph dilute(const Graph& g, double rho, std::uint64_t seed) {
  require(rho >= 0.0 && rho <= 1.0, Errc::invalid_parameter, "rho must lie in [0,1]");
  Rng rng(seed);
  std::vector<Edge> kept;
  for (const Edge& e : g.edges())
    if (uniform01(rng) >= rho) kept.push_back(e);
  return Graph(g.vertex_count(), std::move(kept));
}

inline constexpr int kRegularRestartBudget = 10000;

/// Uniform simple degree-regular graph: configuration model, restarted from
/// scratch whenever a self-loop or multi-edge appears.
inline Graph make_random_regular(int p, int degree, std::uint64_t seed,
                                 int restart_budget = kRegularRestartBudget) {
  require(degree >= 0 && degree < p, Errc::invalid_parameter, "random regular needs degree < p");
  require((static_cast<long long>(p) * degree) % 2 == 0, Errc::invalid_parameter,
          "random regular needs p*degree even");
  Rng rng(seed);
  std::vector<Vertex> stubs;
  stubs.reserve(static_cast<std::size_t>(p) * degree);
  std::set<Edge> seen;
  for (int attempt = 0; attempt < restart_budget; ++attempt) {
    stubs.clear();
    for (Vertex v = 1; v <= p; ++v)
      for (int k = 0; k < degree; ++k) stubs.push_back(v);
    shuffle(stubs.begin(), stubs.end(), rng);
    seen.clear();
    bool ok = true;
    for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
      if (stubs[k] == stubs[k + 1] || !seen.emplace(stubs[k], stubs[k + 1]).second) {
        ok = false;
        break;
      }
    }
    if (ok) return Graph(p, std::vector<Edge>(seen.begin(), seen.end()));
  }
  throw Error(Errc::generation_failure,
              "no simple " + std::to_string(degree) + "-regular graph on " + std::to_string(p) +
                  " vertices within the restart budget");
}

/// Random regular graph on 1..p-2 plus the disjoint edge (p-1, p).
inline Graph make_regular_plus_edge(int p, int degree, std::uint64_t seed) {
  require(degree < p - 2, Errc::invalid_parameter, "regular-plus-edge needs degree < p-2");
  const Graph core = make_random_regular(p - 2, degree, seed);
  std::vector<Edge> edges = core.edges();
  edges.emplace_back(p - 1, p);
  return Graph(p, std::move(edges));
}

/// Vertices 1 and 2 each joined to every vertex in 3..p.
inline Graph make_toy_gp(int p) {
  require(p >= 3, Errc::invalid_parameter, "toy graph needs p >= 3");
  std::vector<Edge> edges;
  for (Vertex v = 3; v <= p; ++v) {
    edges.emplace_back(1, v);
    edges.emplace_back(2, v);
  }
  return Graph(p, std::move(edges));
}

/// Single edge (1, 2); all other vertices isolated.
inline Graph make_toy_gp_prime(int p) {
  require(p >= 3, Errc::invalid_parameter, "toy graph needs p >= 3");
  return Graph(p, {Edge(1, 2)});
}

// ---------------------------------------------------------------------------
// Family specs

enum class Family {
  tree,
  star,
  grid,
  diluted_grid,
  random_regular,
  regular_plus_edge,
  toy_gp,
  toy_gp_prime,
};

struct GraphFamilySpec {
  Family family = Family::tree;
  int p = 0;             // vertex count (unused for grids)
  int degree = 0;        // star degree or regular degree
  int side = 0;          // grid side
  bool periodic = false;
  double rho = 0.0;      // dilution probability
  TreeShape shape = TreeShape::path;
  int branching = 2;
  std::uint64_t seed = 0;
};

inline bool is_random_family(Family f) {
  return f == Family::diluted_grid || f == Family::random_regular ||
         f == Family::regular_plus_edge;
}

inline Graph build_graph(const GraphFamilySpec& s) {
  switch (s.family) {
    case Family::tree: return make_tree(s.p, s.shape, s.branching);
    case Family::star: return make_star(s.p, s.degree);
    case Family::grid: return make_grid(s.side, s.periodic);
    case Family::diluted_grid: return dilute(make_grid(s.side, s.periodic), s.rho, s.seed);
    case Family::random_regular: return make_random_regular(s.p, s.degree, s.seed);
    case Family::regular_plus_edge: return make_regular_plus_edge(s.p, s.degree, s.seed);
    case Family::toy_gp: return make_toy_gp(s.p);
    case Family::toy_gp_prime: return make_toy_gp_prime(s.p);
  }
  throw Error(Errc::invalid_parameter, "unknown graph family");
}

inline Family parse_family(const std::string& name) {
  if (name == "tree") return Family::tree;
  if (name == "star") return Family::star;
  if (name == "grid") return Family::grid;
  if (name == "diluted-grid") return Family::diluted_grid;
  if (name == "random-regular") return Family::random_regular;
  if (name == "regular-plus-edge") return Family::regular_plus_edge;
  if (name == "toy-gp") return Family::toy_gp;
  if (name == "toy-gp-prime") return Family::toy_gp_prime;
  throw Error(Errc::parse_error, "unknown graph family '" + name + "'");
}

}  // namespace isingrecon
