#pragma once

// Subcommand implementations shared by the CLI binary and the test suites.
// Each command writes its files into config.directory and returns a process
// exit code: 0 success, 1 numerical failure, 2 usage/IO, 3 invalid config.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "rpwg/bands.hpp"
#include "rpwg/config.hpp"
#include "rpwg/outputs.hpp"

namespace rpwg {

namespace cmddetail {

inline BandSweepConfig sweep_of(const RunConfig& cfg) {
  BandSweepConfig sweep;
  sweep.target_h = cfg.target_h;
  sweep.grading = cfg.grading;
  sweep.n_phi = cfg.n_phi;
  sweep.k = cfg.k;
  sweep.lambda_max = cfg.window_max();
  sweep.eig_tol = cfg.eig_tol;
  sweep.threads = cfg.threads;
  return sweep;
}

inline std::filesystem::path ensure_outdir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IO_ERROR, "cannot create output directory " + dir.string());
  return dir;
}

inline bool wants(const RunConfig& cfg, const std::string& fmt) {
  for (const auto& f : cfg.formats)
    if (f == fmt) return true;
  return false;
}

inline std::string eps_tag(double eps) {
  std::ostringstream os;
  os << "eps" << static_cast<long long>(std::llround(1.0 / eps));
  return os.str();
}

}  // namespace cmddetail

/// `limit`: semi-analytic limit spectrum and its fiber band samples.
/// Writes limit_spectrum.json and limit_bands.csv.
inline int cmd_limit(const RunConfig& cfg) {
  const auto dir = cmddetail::ensure_outdir(cfg);
  const LimitParams p{cfg.alpha, cfg.r, cfg.L};
  const LimitSpectrum spec = limit_spectrum(p);

  std::vector<FiberBands> fibers;
  for (double phi : brillouin_grid(cfg.n_phi))
    fibers.push_back(limit_fiber_bands(p, phi, cfg.window_max(), -1, 64, cfg.root_tol));

  if (cmddetail::wants(cfg, "json")) write_limit_spectrum_json(dir / "limit_spectrum.json", spec, fibers);
  if (cmddetail::wants(cfg, "csv")) write_limit_bands_csv(dir / "limit_bands.csv", fibers);
  return 0;
}

/// `bands`: per-eps FEM band structure. Writes bands.csv and gaps.csv with an
/// eps column, plus one bands_epsN.svg diagram per eps.
inline int cmd_bands(const RunConfig& cfg) {
  if (cfg.eps_list.empty())
    throw Error(ErrorCode::VALIDATION_ERROR, "bands requires a non-empty eps_list");
  const auto dir = cmddetail::ensure_outdir(cfg);

  std::optional<double> alpha, beta;
  if (!cfg.unperturbed) {
    alpha = cfg.alpha;
    if (const auto edge = solve_beta_star(LimitParams{cfg.alpha, cfg.r, cfg.L})) beta = edge->beta;
  }

  std::vector<BandStructure> sweeps;
  for (double eps : cfg.eps_list) {
    const ValidatedParams vp =
        cfg.unperturbed ? validate_params(WaveguideParams::strip(eps, cfg.L))
                        : validate_params(asymptotic_preset(ScalingPreset{cfg.alpha, cfg.r, cfg.L}, eps));
    BandSweepConfig sweep = cmddetail::sweep_of(cfg);
    for (int tries = 0;; ++tries) {
      try {
        sweeps.push_back(compute_bands(vp, sweep));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::WINDOW_NOT_COVERED || tries >= 3) throw;
        sweep.k *= 2;
      }
    }
  }

  if (cmddetail::wants(cfg, "csv")) {
    write_bands_csv(dir / "bands.csv", sweeps);
    write_gaps_csv(dir / "gaps.csv", sweeps);
  }
  if (cmddetail::wants(cfg, "svg"))
    for (const BandStructure& bs : sweeps)
      write_bands_svg(dir / ("bands_" + cmddetail::eps_tag(bs.eps) + ".svg"), bs, alpha, beta);
  return 0;
}

/// `converge`: the eps -> 0 study. Writes convergence.csv and
/// converge_summary.json; exit code 0 iff the gap-opening check passes at the
/// smallest eps.
inline int cmd_converge(const RunConfig& cfg) {
  if (cfg.eps_list.empty())
    throw Error(ErrorCode::VALIDATION_ERROR, "converge requires a non-empty eps_list");
  const auto dir = cmddetail::ensure_outdir(cfg);

  const ConvergenceReport report = convergence_study(
      ScalingPreset{cfg.alpha, cfg.r, cfg.L}, cfg.eps_list, cmddetail::sweep_of(cfg), cfg.unperturbed);

  if (cmddetail::wants(cfg, "csv")) write_convergence_csv(dir / "convergence.csv", report);
  if (cmddetail::wants(cfg, "json")) write_converge_summary_json(dir / "converge_summary.json", report);
  return report.corollary_pass ? 0 : 1;
}

/// `mesh-dump`: plain-text mesh of the period cell for each eps.
inline int cmd_mesh_dump(const RunConfig& cfg) {
  if (cfg.eps_list.empty())
    throw Error(ErrorCode::VALIDATION_ERROR, "mesh-dump requires a non-empty eps_list");
  const auto dir = cmddetail::ensure_outdir(cfg);
  for (double eps : cfg.eps_list) {
    const ValidatedParams vp =
        cfg.unperturbed ? validate_params(WaveguideParams::strip(eps, cfg.L))
                        : validate_params(asymptotic_preset(ScalingPreset{cfg.alpha, cfg.r, cfg.L}, eps));
    const PeriodCellMesh mesh = triangulate(build_cell(vp), cfg.target_h, cfg.grading);
    write_mesh_dump(dir / ("mesh_" + cmddetail::eps_tag(eps) + ".txt"), mesh);
  }
  return 0;
}

}  // namespace rpwg
