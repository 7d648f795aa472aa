#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "proxiter/metric.hpp"

namespace testing_support {

// Every property test draws from its own fixed seed so failures replay.
inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline proxiter::Vectord random_point(std::mt19937_64& rng, Eigen::Index dim, double scale = 5.0) {
  proxiter::Vectord v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

inline proxiter::Vectord vec(std::initializer_list<double> xs) {
  proxiter::Vectord v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Smallest rho on the grid -1, -1 + h, ..., 1 with
// d_diff^2 <= d_xy^2 + d_T^2 + 2 rho d_xy d_T. Feasibility is monotone in rho,
// so bisection over grid indices finds the same point as a scan.
inline double grid_mu_bisect(double dxy, double dT, double ddiff, double h) {
  const auto steps = static_cast<long>(std::llround(2.0 / h));
  auto feasible = [&](long i) {
    const double rho = -1.0 + static_cast<double>(i) * h;
    return ddiff * ddiff <= dxy * dxy + dT * dT + 2.0 * rho * dxy * dT;
  };
  if (feasible(0)) return -1.0;
  if (!feasible(steps)) return 1.0;
  long lo = 0;
  long hi = steps;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (feasible(mid) ? hi : lo) = mid;
  }
  return -1.0 + static_cast<double>(hi) * h;
}

}  // namespace testing_support
