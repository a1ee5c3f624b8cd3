// Copyright 2026 The ddoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent oracles used by the tests: central finite differences,
// a naive DFT, and brute-force assignment. These must stay free of the
// implementation paths they check.

#ifndef DDOA_TESTS_ORACLE_UTILS_HPP_
#define DDOA_TESTS_ORACLE_UTILS_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "ddoa/rng.hpp"

namespace oracle {

// Central finite-difference derivative of f w.r.t. params[i], step
// h = 1e-6 * max(1, |x|).
inline double central_diff(const std::function<double()>& f, double* param) {
  const double x = *param;
  const double h = 1e-6 * std::max(1.0, std::fabs(x));
  *param = x + h;
  const double fp = f();
  *param = x - h;
  const double fm = f();
  *param = x;
  return (fp - fm) / (2.0 * h);
}

// Relative error with an absolute floor: gradients far below the
// typical scale are dominated by finite-difference roundoff
// (~eps/h = 1e-10), so near-zero values compare against the floor.
inline double rel_err(double got, double want) {
  const double denom = std::max({std::fabs(got), std::fabs(want), 1e-4});
  return std::fabs(got - want) / denom;
}

// O(n^2) DFT, the dual route for the radix-2 transform.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * double(k) * double(t) / double(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Exhaustive minimum-cost assignment (n <= 8).
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + std::size_t(perm[i])];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

template <typename T>
std::vector<T> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                             double hi = 1.0) {
  ddoa::Rng rng(seed);
  std::vector<T> v(n);
  for (auto& x : v) x = T(rng.uniform(lo, hi));
  return v;
}

}  // namespace oracle

#endif  // DDOA_TESTS_ORACLE_UTILS_HPP_
