#pragma once

// Semi-analytic spectrum of the limit operator: the coupled strip/boundary
// system reduces, mode by mode, to a 1D Robin problem on (-L, 0) whose
// coefficient depends on the spectral parameter. All roots are found by
// bracketed bisection on piecewise-monotone dispersion functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "rpwg/errors.hpp"

namespace rpwg {

struct LimitParams {
  double alpha = 1.0;
  double r = 1.0;
  double L = 1.0;
};

/// Half-open or closed interval on the spectral axis; hi may be +infinity.
struct Interval {
  double lo = 0;
  double hi = 0;

  bool unbounded() const { return std::isinf(hi); }
};

namespace limitdetail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
                     double tol) {
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
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

}  // namespace limitdetail

/// Smallest eigenvalue of -u'' = lambda u on (-L, 0) with u'(-L) = 0 and
/// u'(0) = mu u(0). Dispersion: -k tan(kL) = mu for lambda = k^2 > 0,
/// kappa tanh(kappa L) = mu for lambda = -kappa^2 < 0, lambda = 0 iff mu = 0.
inline double beta_of_mu(double mu, double L) {
  if (!(L > 0)) throw Error(ErrorCode::VALIDATION_ERROR, "beta_of_mu needs L > 0");
  if (mu == 0.0) return 0.0;
  if (mu > 0) {
    // kappa tanh(kappa L) = mu has exactly one positive root.
    auto f = [&](double kap) { return kap * std::tanh(kap * L) - mu; };
    double hi = 1.0;
    while (f(hi) < 0) hi *= 2;
    const double kap = limitdetail::bisect(f, 0.0, hi, -mu, 1e-15 * std::max(1.0, hi));
    return -kap * kap;
  }
  // mu < 0: unique root with kL in (0, pi/2).
  auto f = [&](double k) { return -k * std::tan(k * L) - mu; };
  const double hi = (std::numbers::pi / 2) / L * (1 - 1e-15);
  const double k = limitdetail::bisect(f, 0.0, hi, -mu, 1e-15 * hi);
  return k * k;
}

struct GapEdge {
  double beta = 0;
  double mu_star = 0;
};

/// Unique solution of beta(mu) = alpha*mu/(alpha r + mu) with mu < -alpha r,
/// or nullopt when alpha >= (pi/2L)^2 (no gap). The returned pair satisfies
/// the equivalent fixed-point identity mu = alpha*r*beta/(alpha - beta).
inline std::optional<GapEdge> solve_beta_star(const LimitParams& p) {
  const double threshold = std::pow(std::numbers::pi / (2 * p.L), 2);
  if (p.alpha >= threshold) return std::nullopt;

  const double ar = p.alpha * p.r;
  auto F = [&](double mu) { return beta_of_mu(mu, p.L) - p.alpha * mu / (ar + mu); };
  const double big = 1e8;
  const double lo = -big;
  const double hi = -ar - 1e-6 * ar;
  const double Flo = F(lo);
  if (!(Flo > 0) || !(F(hi) < 0)) {
    std::ostringstream os;
    os << "bracket for mu* failed: F(" << lo << ") = " << Flo << ", F(" << hi << ") = " << F(hi);
    throw Error(ErrorCode::BRACKET_FAILURE, os.str());
  }
  // F is strictly decreasing on the bracket: beta(mu) decreases and the
  // rational part increases in mu.
  double a = lo, b = hi, fa = Flo;
  for (int it = 0; it < 400 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = F(mid);
    if ((fa > 0) == (fm > 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  GapEdge edge;
  edge.mu_star = 0.5 * (a + b);
  edge.beta = p.alpha * edge.mu_star / (ar + edge.mu_star);
  return edge;
}

/// Fiber band values of the limit operator at phase phi: roots of the
/// lambda-dependent Robin dispersion with coefficient
/// mu(lambda) = alpha*r*lambda/(alpha - lambda), one 1D problem per
/// transverse mode theta_m = phi + 2*pi*m.
struct FiberBands {
  double phi = 0;
  // Roots below/above alpha, ascending. Cross-mode coincidences (e.g. the
  // theta and -theta modes at phi = 0) are collapsed to one entry, so the
  // lists are strictly increasing.
  std::vector<double> lower;
  std::vector<double> upper;
  int m_min = 0, m_max = 0;  // transverse mode range used
};

namespace limitdetail {

// Dispersion residual for one transverse mode at spectral parameter lambda:
//   tau = lambda - theta^2
//   tau > 0:  -k tan(kL) - mu(lambda),  k = sqrt(tau)
//   tau <= 0:  kappa tanh(kappa L) - mu(lambda),  kappa = sqrt(-tau)
// Both branches are restrictions of one analytic function of tau.
inline double fiber_dispersion(double lambda, double theta, const LimitParams& p) {
  const double mu = p.alpha * p.r * lambda / (p.alpha - lambda);
  const double tau = lambda - theta * theta;
  if (tau > 0) {
    const double k = std::sqrt(tau);
    return -k * std::tan(k * p.L) - mu;
  }
  const double kap = std::sqrt(-tau);
  return kap * std::tanh(kap * p.L) - mu;
}

// Roots of f on (a, b) by uniform scan + bisection; endpoints excluded.
inline void scan_roots(const std::function<double(double)>& f, double a, double b, double step,
                       double root_tol, std::vector<double>& out) {
  if (!(b > a)) return;
  const double span = b - a;
  const int nsteps = std::max(2, static_cast<int>(std::ceil(span / step)));
  const double eta = std::min(1e-9, span * 1e-9);  // keep clear of poles at the ends
  double x0 = a + eta;
  double f0 = f(x0);
  if (std::abs(f0) < 1e-13) out.push_back(x0);
  for (int i = 1; i <= nsteps; ++i) {
    const double x1 = (i == nsteps) ? b - eta : a + span * i / nsteps;
    if (x1 <= x0) continue;
    const double f1 = f(x1);
    if ((f0 > 0) != (f1 > 0)) {
      out.push_back(bisect(f, x0, x1, f0, root_tol));
    } else if (std::abs(f1) < 1e-13 && i < nsteps) {
      out.push_back(x1);
    }
    x0 = x1;
    f0 = f1;
  }
}

}  // namespace limitdetail

/// Collects the fiber band values at phase phi inside the window
/// [0, lambda_max]. The default transverse mode range is window-complete
/// (theta_m^2 <= lambda_max + alpha covers every mode that can place an upper
/// root below lambda_max) plus `accumulation_modes` additional modes per
/// side: each high mode contributes one more lower root approaching alpha
/// (the kappa-branch always crosses mu(lambda) once on (0, alpha)), so the
/// extension makes the accumulation at alpha visible in the output.
/// k_per_mode caps the roots kept per mode and family.
inline FiberBands limit_fiber_bands(const LimitParams& p, double phi, double lambda_max,
                                    int m_range = -1, int k_per_mode = 64,
                                    double root_tol = 1e-12, int accumulation_modes = 8) {
  FiberBands fb;
  fb.phi = phi;
  int m_lo, m_hi;
  if (m_range >= 0) {
    m_lo = -m_range;
    m_hi = m_range;
  } else {
    // phi + 2*pi*m in [-theta_lim, theta_lim]
    const double theta_lim =
        std::sqrt(lambda_max + p.alpha) + 2 * std::numbers::pi * accumulation_modes;
    m_lo = static_cast<int>(std::floor((-theta_lim - phi) / (2 * std::numbers::pi)));
    m_hi = static_cast<int>(std::ceil((theta_lim - phi) / (2 * std::numbers::pi)));
    while (std::abs(phi + 2 * std::numbers::pi * m_lo) > theta_lim) ++m_lo;
    while (std::abs(phi + 2 * std::numbers::pi * m_hi) > theta_lim) --m_hi;
  }
  fb.m_min = m_lo;
  fb.m_max = m_hi;

  const double step = std::min(p.alpha, 1.0) / 50;
  for (int m = m_lo; m <= m_hi; ++m) {
    const double theta = phi + 2 * std::numbers::pi * m;
    auto f = [&](double lam) { return limitdetail::fiber_dispersion(lam, theta, p); };

    // Breakpoints: the mu-pole at alpha and the tan poles
    // theta^2 + ((j+1/2) pi / L)^2 partition the window into intervals where
    // the dispersion is continuous.
    std::vector<double> bps{0.0, lambda_max};
    if (p.alpha < lambda_max) bps.push_back(p.alpha);
    for (int j = 0;; ++j) {
      const double pole = theta * theta + std::pow((j + 0.5) * std::numbers::pi / p.L, 2);
      if (pole >= lambda_max) break;
      bps.push_back(pole);
    }
    std::sort(bps.begin(), bps.end());

    std::vector<double> roots;
    if (std::abs(f(0.0)) < 1e-13) roots.push_back(0.0);  // lambda = 0 iff mu = 0 and theta = 0
    for (std::size_t i = 0; i + 1 < bps.size(); ++i)
      limitdetail::scan_roots(f, bps[i], bps[i + 1], step, root_tol, roots);

    std::sort(roots.begin(), roots.end());
    int kept_lower = 0, kept_upper = 0;
    for (double root : roots) {
      if (root < 0) continue;
      if (root < p.alpha - 1e-12) {
        if (kept_lower++ < k_per_mode) fb.lower.push_back(root);
      } else if (root > p.alpha + 1e-12) {
        if (kept_upper++ < k_per_mode) fb.upper.push_back(root);
      }
    }
  }

  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a)); }),
            v.end());
  };
  dedupe(fb.lower);
  dedupe(fb.upper);
  return fb;
}

struct LimitSpectrum {
  double alpha = 0;
  std::optional<double> beta;
  bool has_gap = false;
  std::vector<Interval> description;  // [0,alpha] u [beta,inf) or [0,inf)
};

/// Interval formula for the limit spectrum: [0,alpha] u [beta,inf) when
/// alpha < (pi/2L)^2, otherwise [0,inf).
inline LimitSpectrum limit_spectrum(const LimitParams& p) {
  LimitSpectrum s;
  s.alpha = p.alpha;
  const auto edge = solve_beta_star(p);
  if (edge) {
    s.beta = edge->beta;
    s.has_gap = true;
    s.description = {Interval{0.0, p.alpha},
                     Interval{edge->beta, std::numeric_limits<double>::infinity()}};
  } else {
    s.has_gap = false;
    s.description = {Interval{0.0, std::numeric_limits<double>::infinity()}};
  }
  return s;
}

}  // namespace rpwg
