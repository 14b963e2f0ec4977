#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "isingrecon/error.hpp"

namespace isingrecon {

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  require(tol > 0, Errc::invalid_parameter, "bisection tolerance must be positive");
  require((flo <= 0 && fhi >= 0) || (flo >= 0 && fhi <= 0), Errc::root_not_found,
          "bisection bracket has no sign change");
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First bracket [a, b] on a geometric grid over [lo, hi] where f goes from
/// negative to non-negative.
template <class F>
std::optional<std::pair<double, double>> scan_upcrossing(F&& f, double lo, double hi,
                                                         int steps = 4000) {
  const double ratio = std::pow(hi / lo, 1.0 / steps);
  double prev_x = lo;
  double prev_f = f(lo);
  for (int k = 1; k <= steps; ++k) {
    const double x = k == steps ? hi : lo * std::pow(ratio, k);
    const double fx = f(x);
    if (prev_f < 0 && fx >= 0) return std::make_pair(prev_x, x);
    prev_x = x;
    prev_f = fx;
  }
  return std::nullopt;
}

inline std::size_t worker_count(std::size_t jobs, std::size_t requested = 0) {
  std::size_t hw = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(hw, jobs));
}

/// Runs body(i) for i in [0, n) on up to `threads` workers with a static
/// strided partition. Exceptions from workers are rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t threads = 0) {
  const std::size_t workers = worker_count(n, threads);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// atanh(tanh(a) * tanh(b)) for a, b >= 0 without losing precision when both
/// tanh factors round to 1.
inline double atanh_tanh_product(double a, double b) {
  const double direct = std::tanh(a) * std::tanh(b);
  if (direct < 0.5) return std::atanh(direct);
  // 1 - tanh(x) = 2 / (exp(2x) + 1)
  const double ea = 2.0 / (std::exp(2.0 * a) + 1.0);
  const double eb = 2.0 / (std::exp(2.0 * b) + 1.0);
  const double one_minus = ea + eb - ea * eb;
  const double product = (1.0 - ea) * (1.0 - eb);
  return 0.5 * std::log((1.0 + product) / one_minus);
}

/// log(2 cosh x), stable for large |x|.
inline double log_2cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax));
}

}  // namespace isingrecon
