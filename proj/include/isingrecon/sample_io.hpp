#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "isingrecon/gibbs.hpp"

namespace isingrecon {

// Sample files:
//   n p seed burn_in thin
//   followed by n lines of p space-separated tokens, each "1" or "-1".

inline void write_samples(std::ostream& out, const SampleSet& s) {
  const auto& m = s.meta();
  out << s.sample_count() << ' ' << s.vertex_count() << ' ' << m.seed << ' ' << m.burn_in << ' '
      << m.thin << '\n';
  std::string line;
  for (long l = 0; l < s.sample_count(); ++l) {
    line.clear();
    const auto row = s.row(l);
    for (int i = 0; i < s.vertex_count(); ++i) {
      if (i) line += ' ';
      line += row[i] > 0 ? "1" : "-1";
    }
    line += '\n';
    out << line;
  }
}

inline SampleSet read_samples(std::istream& in) {
  long n = -1;
  int p = -1;
  SamplerMeta meta;
  require(static_cast<bool>(in >> n >> p >> meta.seed >> meta.burn_in >> meta.thin),
          Errc::parse_error, "bad sample file header");
  require(n >= 0 && p >= 0, Errc::parse_error, "negative dimensions in sample header");
  std::vector<std::int8_t> spins;
  spins.reserve(static_cast<std::size_t>(n) * p);
  for (long k = 0; k < n * p; ++k) {
    int v = 0;
    require(static_cast<bool>(in >> v), Errc::parse_error,
            "sample file ended after " + std::to_string(k) + " of " + std::to_string(n * p) +
                " spins");
    require(v == 1 || v == -1, Errc::parse_error, "spin token must be 1 or -1");
    spins.push_back(static_cast<std::int8_t>(v));
  }
  std::string rest;
  require(!(in >> rest), Errc::parse_error, "trailing tokens after the last sample");
  return SampleSet(n, p, std::move(spins), meta);
}

inline void save_samples(const std::string& path, const SampleSet& s) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::invalid_parameter, "cannot write " + path);
  write_samples(out, s);
}

inline SampleSet load_samples(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::invalid_parameter, "cannot read " + path);
  return read_samples(in);
}

/// CSV with a header row of 0-based vertex indices; each row starts with its index.
inline void write_correlation_csv(std::ostream& out, const Eigen::MatrixXd& c) {
  out << "index";
  for (Eigen::Index j = 0; j < c.cols(); ++j) out << ',' << j;
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", c(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace isingrecon
