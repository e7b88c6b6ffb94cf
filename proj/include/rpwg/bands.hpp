#pragma once

// Brillouin-zone sweep over the eps-period cell, band intervals
// I_k = [min_phi lambda_k, max_phi lambda_k], gap detection inside a spectral
// window, the room-average diagnostic, the eps -> 0 convergence study against
// the limit spectrum, and the unit-cell folding cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "rpwg/assembly.hpp"
#include "rpwg/eigensolver.hpp"
#include "rpwg/errors.hpp"
#include "rpwg/floquet.hpp"
#include "rpwg/geometry.hpp"
#include "rpwg/limit_spectrum.hpp"
#include "rpwg/mesh.hpp"
#include "rpwg/parallel.hpp"

namespace rpwg {

struct GapInterval {
  double lo = 0;
  double hi = 0;
  bool truncated = false;  // touches the window edge; not a certified gap

  double width() const { return hi - lo; }
};

struct BandSweepConfig {
  double target_h = 0.05;
  double grading = 1.2;
  int n_phi = 33;
  int k = 12;
  double lambda_max = 0;  // spectral window [0, lambda_max]
  double eig_tol = 1e-7;
  int threads = 1;
};

struct BandStructure {
  double eps = 0;
  std::vector<double> phi_grid;
  std::vector<std::vector<double>> samples;  // per phi, ascending eigenvalues
  std::vector<Interval> bands;               // I_k over the sampled grid
  double window_max = 0;
  std::vector<GapInterval> gaps;
};

/// Complement of the band union within [window_lo, window_hi], as maximal open
/// intervals; pieces touching a window edge are flagged truncated. Slivers
/// thinner than 1e-12 of the window are numerical noise, not gaps.
inline std::vector<GapInterval> detect_gaps(const std::vector<Interval>& bands, double window_lo,
                                            double window_hi) {
  std::vector<Interval> clipped;
  for (const Interval& b : bands) {
    const double lo = std::max(b.lo, window_lo);
    const double hi = std::min(b.hi, window_hi);
    if (hi >= lo) clipped.push_back(Interval{lo, hi});
  }
  std::sort(clipped.begin(), clipped.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });

  const double sliver = 1e-12 * (window_hi - window_lo);
  std::vector<GapInterval> gaps;
  double covered_to = window_lo;
  for (const Interval& b : clipped) {
    if (b.lo > covered_to + sliver)
      gaps.push_back(GapInterval{covered_to, b.lo, covered_to == window_lo});
    covered_to = std::max(covered_to, b.hi);
  }
  if (covered_to < window_hi - sliver) gaps.push_back(GapInterval{covered_to, window_hi, true});
  return gaps;
}

namespace bandsdetail {

using FiberObserver = std::function<void(int phi_index, const FiberPencil&, const EigenResult&)>;

// Sweep a fixed mesh over the phase grid; the window coverage check demands
// lambda_k > lambda_max at every phase.
inline BandStructure sweep_mesh(const PeriodCellMesh& mesh, double rho_room,
                                const BandSweepConfig& cfg, double eps_label,
                                const FiberObserver& observer = {}) {
  if (!(cfg.lambda_max > 0)) throw Error(ErrorCode::VALIDATION_ERROR, "lambda_max must be positive");
  const AssembledPair pair = assemble(mesh, rho_room);

  BandStructure bs;
  bs.eps = eps_label;
  bs.window_max = cfg.lambda_max;
  bs.phi_grid = brillouin_grid(cfg.n_phi);
  bs.samples.resize(cfg.n_phi);

  std::vector<std::string> failures(cfg.n_phi);
  parallel_for(cfg.n_phi, cfg.threads, [&](int i) {
    const FiberPencil fp = apply_quasiperiodic(pair, mesh, bs.phi_grid[i]);
    const EigenResult res = solve_lowest(fp, cfg.k, cfg.eig_tol);
    bs.samples[i] = res.eigenvalues;
    if (observer) observer(i, fp, res);
  });

  for (int i = 0; i < cfg.n_phi; ++i) {
    if (bs.samples[i].back() <= cfg.lambda_max) {
      std::ostringstream os;
      os << "window [0, " << cfg.lambda_max << "] not covered at phi = " << bs.phi_grid[i]
         << ": lambda_" << cfg.k << " = " << bs.samples[i].back() << "; increase k";
      throw Error(ErrorCode::WINDOW_NOT_COVERED, os.str());
    }
  }

  bs.bands.resize(cfg.k);
  for (int j = 0; j < cfg.k; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.n_phi; ++i) {
      lo = std::min(lo, bs.samples[i][j]);
      hi = std::max(hi, bs.samples[i][j]);
    }
    bs.bands[j] = Interval{lo, hi};
  }
  bs.gaps = detect_gaps(bs.bands, 0.0, cfg.lambda_max);
  return bs;
}

}  // namespace bandsdetail

/// Bands of the eps-periodic operator from per-phase fiber solves on the
/// eps-period cell. Throws WINDOW_NOT_COVERED when k is too small for the
/// requested window.
inline BandStructure compute_bands(const ValidatedParams& vp, const BandSweepConfig& cfg,
                                   const bandsdetail::FiberObserver& observer = {}) {
  const CellGeometry cell = build_cell(vp);
  const PeriodCellMesh mesh = triangulate(cell, cfg.target_h, cfg.grading);
  return bandsdetail::sweep_mesh(mesh, cell.rho_room, cfg, vp->eps, observer);
}

struct RoomAverage {
  std::complex<double> room_mean{};   // per-room mean of the eigenfunction (u2 candidate)
  std::complex<double> mouth_mean{};  // mean trace on the passage mouth (u1 candidate)
  double residual = 0;                // |alpha (u2 - u1) - lambda u2|
};

/// Room-averaging diagnostic: the per-room mean of an eigenfunction is the u2
/// candidate of the limit system, the mean trace over the passage mouth the u1
/// candidate; the residual measures the limit relation alpha(u2-u1) = lambda u2.
/// The eigenvector is sup-normalized first so the residual is scale-free.
inline RoomAverage room_average(const PeriodCellMesh& mesh, const ValidatedParams& vp,
                                const Eigen::VectorXcd& full_vec, double lambda, double alpha) {
  if (vp->unperturbed)
    throw Error(ErrorCode::VALIDATION_ERROR, "room_average needs a perturbed cell");

  double sup = 0;
  for (int i = 0; i < full_vec.size(); ++i) sup = std::max(sup, std::abs(full_vec[i]));
  if (!(sup > 0)) throw Error(ErrorCode::ZERO_VECTOR, "room_average of the zero vector");
  const Eigen::VectorXcd u = full_vec / sup;

  // Exact P1 integral over the room: sum of area * (mean of vertex values).
  std::complex<double> integral = 0;
  double area = 0;
  for (const Triangle& t : mesh.triangles) {
    if (t.tag != Region::Room) continue;
    const double a = mesh.triangle_area(t);
    integral += a / 3.0 * (u[t.v[0]] + u[t.v[1]] + u[t.v[2]]);
    area += a;
  }

  // Mean trace on the mouth segment y = 0, x in [eps/2 - d/2, eps/2 + d/2].
  const double mouth_lo = vp->eps / 2 - vp->d / 2;
  const double mouth_hi = vp->eps / 2 + vp->d / 2;
  std::vector<std::pair<double, int>> mouth;
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    const Vec2& v = mesh.vertices[i];
    if (v.y == 0.0 && v.x >= mouth_lo - 1e-14 && v.x <= mouth_hi + 1e-14)
      mouth.emplace_back(v.x, i);
  }
  std::sort(mouth.begin(), mouth.end());
  if (mouth.size() < 2) throw Error(ErrorCode::VALIDATION_ERROR, "mouth trace has fewer than 2 nodes");
  std::complex<double> trace_integral = 0;
  double trace_len = 0;
  for (std::size_t i = 0; i + 1 < mouth.size(); ++i) {
    const double w = mouth[i + 1].first - mouth[i].first;
    trace_integral += w * 0.5 * (u[mouth[i].second] + u[mouth[i + 1].second]);
    trace_len += w;
  }

  RoomAverage ra;
  ra.room_mean = integral / area;
  ra.mouth_mean = trace_integral / trace_len;
  ra.residual = std::abs(alpha * (ra.room_mean - ra.mouth_mean) - lambda * ra.room_mean);
  return ra;
}

/// Symmetric Hausdorff distance between two interval unions, both discretized
/// on [window_lo, window_hi] with the given step. Empty sets are at maximal
/// distance.
inline double sampled_hausdorff(const std::vector<Interval>& a, const std::vector<Interval>& b,
                                double window_lo, double window_hi, double step) {
  auto discretize = [&](const std::vector<Interval>& set) {
    std::vector<double> pts;
    for (const Interval& iv : set) {
      const double lo = std::max(iv.lo, window_lo);
      const double hi = std::min(iv.hi, window_hi);
      if (hi < lo) continue;
      for (double x = lo; x < hi; x += step) pts.push_back(x);
      pts.push_back(hi);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
  };
  const std::vector<double> pa = discretize(a);
  const std::vector<double> pb = discretize(b);
  if (pa.empty() || pb.empty()) return window_hi - window_lo;

  auto one_sided = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = std::min(best, *it - x);
      if (it != to.begin()) best = std::min(best, x - *(it - 1));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(pa, pb), one_sided(pb, pa));
}

/// Point-set variant (used by the folding check, where both sides are finite
/// lists of sampled eigenvalues).
inline double sampled_hausdorff_points(std::vector<double> a, std::vector<double> b,
                                       double window_lo, double window_hi) {
  auto clip = [&](std::vector<double>& v) {
    std::erase_if(v, [&](double x) { return x < window_lo || x > window_hi; });
    std::sort(v.begin(), v.end());
  };
  clip(a);
  clip(b);
  if (a.empty() || b.empty()) return window_hi - window_lo;
  auto one_sided = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = std::min(best, *it - x);
      if (it != to.begin()) best = std::min(best, x - *(it - 1));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

struct ConvergenceEntry {
  double eps = 0;
  BandStructure bands;
  double hausdorff = 0;
  std::optional<GapInterval> main_gap;  // largest non-truncated gap
  bool corollary_pass = false;
  double pi_residual_median = 0;
  int k_used = 0;
};

struct ConvergenceReport {
  LimitParams limit;
  double alpha = 0;
  std::optional<double> beta;
  double delta = 0;  // corollary margin 0.1*(beta - alpha)
  bool unperturbed = false;
  std::vector<ConvergenceEntry> entries;  // keyed by strictly decreasing eps
  bool corollary_pass = false;            // verdict at the smallest eps
};

namespace bandsdetail {

inline bool intervals_intersect(const std::vector<Interval>& set, double lo, double hi) {
  for (const Interval& iv : set)
    if (iv.hi > lo && iv.lo < hi) return true;
  return false;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace bandsdetail

/// Full eps -> 0 study: per eps the band structure, detected gaps, Hausdorff
/// distance to the limit spectrum within the window, the room-average
/// residual statistics, and the gap-opening (corollary) check with
/// delta = 0.1*(beta - alpha). WINDOW_NOT_COVERED is retried with doubled k.
inline ConvergenceReport convergence_study(const ScalingPreset& preset,
                                           const std::vector<double>& eps_list,
                                           const BandSweepConfig& cfg, bool unperturbed = false) {
  if (eps_list.empty()) throw Error(ErrorCode::VALIDATION_ERROR, "eps_list must not be empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw Error(ErrorCode::VALIDATION_ERROR, "eps_list must be strictly decreasing");

  ConvergenceReport report;
  report.limit = LimitParams{preset.alpha, preset.r, preset.L};
  report.unperturbed = unperturbed;
  const LimitSpectrum limit = limit_spectrum(report.limit);
  report.alpha = limit.alpha;
  report.beta = limit.beta;
  if (limit.has_gap) report.delta = 0.1 * (*limit.beta - limit.alpha);

  const std::vector<Interval> limit_set =
      unperturbed ? std::vector<Interval>{Interval{0.0, std::numeric_limits<double>::infinity()}}
                  : limit.description;

  for (double eps : eps_list) {
    const ValidatedParams vp = unperturbed
                                   ? validate_params(WaveguideParams::strip(eps, preset.L))
                                   : validate_params(asymptotic_preset(preset, eps));

    ConvergenceEntry entry;
    entry.eps = eps;

    // Collected across fibers: residuals of lower-band eigenpairs.
    std::vector<std::vector<double>> pi_residuals;

    BandSweepConfig attempt = cfg;
    const PeriodCellMesh mesh = triangulate(build_cell(vp), cfg.target_h, cfg.grading);
    const double rho = vp->unperturbed ? 1.0 : vp->rho_room;
    for (int tries = 0;; ++tries) {
      pi_residuals.assign(attempt.n_phi, {});
      bandsdetail::FiberObserver observer;
      if (!unperturbed) {
        observer = [&](int i, const FiberPencil& fp, const EigenResult& res) {
          for (std::size_t j = 0; j < res.eigenvalues.size(); ++j) {
            const double lam = res.eigenvalues[j];
            if (lam >= preset.alpha) break;
            const RoomAverage ra =
                room_average(mesh, vp, expand_to_full(fp, res.eigenvectors.col(j)), lam, preset.alpha);
            pi_residuals[i].push_back(ra.residual);
          }
        };
      }
      try {
        entry.bands = bandsdetail::sweep_mesh(mesh, rho, attempt, eps, observer);
        entry.k_used = attempt.k;
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::WINDOW_NOT_COVERED || tries >= 3) throw;
        attempt.k *= 2;
      }
    }

    std::vector<double> all_residuals;
    for (const auto& v : pi_residuals) all_residuals.insert(all_residuals.end(), v.begin(), v.end());
    entry.pi_residual_median = bandsdetail::median(std::move(all_residuals));

    entry.hausdorff = sampled_hausdorff(entry.bands.bands, limit_set, 0.0, cfg.lambda_max,
                                        cfg.lambda_max / 2000);

    for (const GapInterval& g : entry.bands.gaps) {
      if (g.truncated) continue;
      if (!entry.main_gap || g.width() > entry.main_gap->width()) entry.main_gap = g;
    }

    if (limit.has_gap && !unperturbed) {
      const double a = limit.alpha, b = *limit.beta, d = report.delta;
      const auto& bands = entry.bands.bands;
      const bool avoids = !bandsdetail::intervals_intersect(bands, a + d, b - d);
      const bool near_alpha = bandsdetail::intervals_intersect(bands, a - d, a + d);
      const bool near_beta = bandsdetail::intervals_intersect(bands, b - d, b + d);
      entry.corollary_pass = avoids && near_alpha && near_beta;
    } else {
      // Control semantics: the limit spectrum is a single ray; pass iff no
      // certified gap opened.
      entry.corollary_pass = !entry.main_gap.has_value();
    }
    report.entries.push_back(std::move(entry));
  }

  report.corollary_pass = report.entries.back().corollary_pass;
  return report;
}

/// Folding cross-check at eps = 1/2: the unit cell (two protuberances, built
/// by tiling the eps-cell mesh) swept over n_phi phases against the eps-cell
/// swept over 2*n_phi phases must produce the same spectrum set in the window.
/// Returns the Hausdorff distance between the two sampled value sets.
inline double fold_validation(const ValidatedParams& vp, const BandSweepConfig& cfg) {
  const auto inv = detail::reciprocal_integer(vp->eps);
  if (!inv || *inv < 2)
    throw Error(ErrorCode::VALIDATION_ERROR, "fold validation needs eps = 1/n with n >= 2");
  const int copies = static_cast<int>(*inv);

  const CellGeometry cell = build_cell(vp);
  const PeriodCellMesh mesh_eps = triangulate(cell, cfg.target_h, cfg.grading);
  const PeriodCellMesh mesh_unit = tile(mesh_eps, copies);

  BandSweepConfig cfg_eps = cfg;
  cfg_eps.n_phi = cfg.n_phi * copies;
  const BandStructure bs_eps = bandsdetail::sweep_mesh(mesh_eps, cell.rho_room, cfg_eps, vp->eps);

  BandSweepConfig cfg_unit = cfg;
  cfg_unit.k = cfg.k * copies;
  const BandStructure bs_unit = bandsdetail::sweep_mesh(mesh_unit, cell.rho_room, cfg_unit, 1.0);

  auto collect = [&](const BandStructure& bs) {
    std::vector<double> vals;
    for (const auto& fiber : bs.samples)
      for (double lam : fiber)
        if (lam <= cfg.lambda_max) vals.push_back(lam);
    return vals;
  };
  return sampled_hausdorff_points(collect(bs_eps), collect(bs_unit), 0.0, cfg.lambda_max);
}

}  // namespace rpwg
