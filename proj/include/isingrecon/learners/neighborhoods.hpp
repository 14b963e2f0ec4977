#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "isingrecon/error.hpp"
#include "isingrecon/graph.hpp"

namespace isingrecon {

enum class EdgeRule { or_rule, and_rule };

inline EdgeRule parse_edge_rule(const std::string& s) {
  if (s == "or" || s == "OR") return EdgeRule::or_rule;
  if (s == "and" || s == "AND") return EdgeRule::and_rule;
  throw Error(Errc::parse_error, "edge rule must be 'or' or 'and', got '" + s + "'");
}

/// nbhd[r - 1] is the neighbor set chosen for root r.
inline EdgeSet combine_neighborhoods(int p, const std::vector<std::vector<Vertex>>& nbhd,
                                     EdgeRule rule) {
  require(static_cast<int>(nbhd.size()) == p, Errc::invalid_parameter,
          "need one neighborhood per vertex");
  std::vector<std::vector<char>> picked(static_cast<std::size_t>(p),
                                        std::vector<char>(static_cast<std::size_t>(p), 0));
  for (int r = 0; r < p; ++r)
    for (Vertex j : nbhd[r]) {
      require(j >= 1 && j <= p && j != r + 1, Errc::invalid_parameter, "bad neighbor index");
      picked[r][j - 1] = 1;
    }
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const bool keep = rule == EdgeRule::or_rule ? (picked[i][j] || picked[j][i])
                                                  : (picked[i][j] && picked[j][i]);
      if (keep) edges.emplace_back(i + 1, j + 1);
    }
  return EdgeSet(p, std::move(edges));
}

/// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
/// Stops early when fn returns false.
template <class F>
bool for_each_combination(int n, int k, F&& fn) {
  if (k < 0 || k > n) return true;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!fn(static_cast<const std::vector<int>&>(idx))) return false;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int m = i + 1; m < k; ++m) idx[m] = idx[m - 1] + 1;
  }
}

}  // namespace isingrecon
