#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "isingrecon/graph.hpp"

namespace isingrecon {

// Graph files:
//   p <count>
//   e <i> <j>      one line per edge, 0-based indices, i < j, sorted
// Vertex v of the in-memory graph is written as index v - 1.

inline void write_graph(std::ostream& out, const Graph& g) {
  out << "p " << g.vertex_count() << '\n';
  for (const Edge& e : g.edges()) out << "e " << e.u - 1 << ' ' << e.v - 1 << '\n';
}

inline Graph read_graph(std::istream& in) {
  std::string line;
  int p = -1;
  std::vector<Edge> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "p") {
      require(p < 0, Errc::parse_error, "duplicate 'p' line");
      require(static_cast<bool>(ls >> p) && p >= 0, Errc::parse_error,
              "bad vertex count on line " + std::to_string(lineno));
    } else if (tag == "e") {
      require(p >= 0, Errc::parse_error, "'e' line before 'p' line");
      long long i = -1, j = -1;
      require(static_cast<bool>(ls >> i >> j), Errc::parse_error,
              "bad edge on line " + std::to_string(lineno));
      require(i >= 0 && j >= 0 && i < p && j < p, Errc::parse_error,
              "edge index out of range on line " + std::to_string(lineno));
      edges.emplace_back(static_cast<Vertex>(i) + 1, static_cast<Vertex>(j) + 1);
    } else {
      throw Error(Errc::parse_error, "unknown tag '" + tag + "' on line " + std::to_string(lineno));
    }
  }
  require(p >= 0, Errc::parse_error, "missing 'p' line");
  return Graph(p, std::move(edges));
}

inline void save_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::invalid_parameter, "cannot write " + path);
  write_graph(out, g);
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::invalid_parameter, "cannot read " + path);
  return read_graph(in);
}

}  // namespace isingrecon
