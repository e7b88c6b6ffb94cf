#pragma once

// Test-side oracles, independent of the library implementation paths they
// validate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

// Closed-form fiber spectrum of the plain strip (width a in x1, depth L in
// x2, Neumann in x2, phase psi over the cell): separation of variables gives
// lambda = ((psi + 2 pi m)/a)^2 + (n pi / L)^2.
inline std::vector<double> strip_fiber_spectrum(double a, double L, double psi, int k) {
  std::vector<double> vals;
  const int M = 4 + k, N = 4 + k;
  for (int m = -M; m <= M; ++m)
    for (int n = 0; n <= N; ++n) {
      const double kx = (psi + 2 * std::numbers::pi * m) / a;
      const double ky = n * std::numbers::pi / L;
      vals.push_back(kx * kx + ky * ky);
    }
  std::sort(vals.begin(), vals.end());
  vals.resize(k);
  return vals;
}

// Plain bisection root finder on a bracket with a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo > 0) == (fm > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles
