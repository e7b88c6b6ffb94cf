#pragma once

// Result emission. CSV files are byte-deterministic: fixed column order,
// floats printed with 17 significant digits via the C locale, LF endings.
// The SVG band diagram is hand-emitted with a fixed 800x600 viewBox.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpwg/bands.hpp"
#include "rpwg/errors.hpp"
#include "rpwg/limit_spectrum.hpp"
#include "rpwg/mesh.hpp"

namespace rpwg {

inline std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace outdetail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IO_ERROR, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace outdetail

inline void write_limit_bands_csv(const std::filesystem::path& path,
                                  const std::vector<FiberBands>& fibers) {
  auto out = outdetail::open_out(path);
  out << "phi,family,k,lambda\n";
  for (const FiberBands& fb : fibers) {
    for (std::size_t i = 0; i < fb.lower.size(); ++i)
      out << format_float(fb.phi) << ",lower," << i + 1 << ',' << format_float(fb.lower[i]) << '\n';
    for (std::size_t i = 0; i < fb.upper.size(); ++i)
      out << format_float(fb.phi) << ",upper," << i + 1 << ',' << format_float(fb.upper[i]) << '\n';
  }
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

inline void write_limit_spectrum_json(const std::filesystem::path& path, const LimitSpectrum& spec,
                                      const std::vector<FiberBands>& fibers) {
  nlohmann::ordered_json j;
  j["alpha"] = spec.alpha;
  if (spec.beta)
    j["beta"] = *spec.beta;
  else
    j["beta"] = nullptr;
  j["has_gap"] = spec.has_gap;
  j["intervals"] = nlohmann::ordered_json::array();
  for (const Interval& iv : spec.description) {
    nlohmann::ordered_json o;
    o["lo"] = iv.lo;
    if (iv.unbounded())
      o["hi"] = nullptr;
    else
      o["hi"] = iv.hi;
    j["intervals"].push_back(o);
  }
  j["fiber_bands"] = nlohmann::ordered_json::array();
  for (const FiberBands& fb : fibers) {
    nlohmann::ordered_json o;
    o["phi"] = fb.phi;
    o["lower"] = fb.lower;
    o["upper"] = fb.upper;
    j["fiber_bands"].push_back(o);
  }
  auto out = outdetail::open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

inline void append_bands_csv_rows(std::ofstream& out, const BandStructure& bs) {
  for (std::size_t i = 0; i < bs.phi_grid.size(); ++i)
    for (std::size_t j = 0; j < bs.samples[i].size(); ++j)
      out << format_float(bs.eps) << ',' << format_float(bs.phi_grid[i]) << ',' << j + 1 << ','
          << format_float(bs.samples[i][j]) << '\n';
}

inline void write_bands_csv(const std::filesystem::path& path,
                            const std::vector<BandStructure>& sweeps) {
  auto out = outdetail::open_out(path);
  out << "eps,phi,k,lambda\n";
  for (const BandStructure& bs : sweeps) append_bands_csv_rows(out, bs);
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

inline void write_gaps_csv(const std::filesystem::path& path,
                           const std::vector<BandStructure>& sweeps) {
  auto out = outdetail::open_out(path);
  out << "eps,gap_lo,gap_hi,truncated_flag\n";
  for (const BandStructure& bs : sweeps)
    for (const GapInterval& g : bs.gaps)
      out << format_float(bs.eps) << ',' << format_float(g.lo) << ',' << format_float(g.hi) << ','
          << (g.truncated ? 1 : 0) << '\n';
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

/// Band diagram: lambda vertical, phi horizontal, one circle marker per
/// sampled (phi, lambda_k), alpha and beta drawn as horizontal reference
/// lines. Fixed 800x600 viewBox; the y-axis spans the spectral window
/// [0, 1.02*window_max] and samples above it are pinned to the top edge, so
/// the marker count stays n_phi * k.
inline void write_bands_svg(const std::filesystem::path& path, const BandStructure& bs,
                            std::optional<double> alpha, std::optional<double> beta) {
  const double y_top = 1.02 * bs.window_max;

  const double x0 = 60, x1 = 760, y_lo = 560, y_hi = 40;
  auto X = [&](double phi) { return x0 + phi / (2 * std::numbers::pi) * (x1 - x0); };
  auto Y = [&](double lam) { return y_lo - std::min(lam, y_top) / y_top * (y_lo - y_hi); };
  auto px = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  auto out = outdetail::open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"" << px(x0) << "\" y=\"" << px(y_hi) << "\" width=\"" << px(x1 - x0)
      << "\" height=\"" << px(y_lo - y_hi) << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-size=\"14\">phi</text>\n";
  out << "<text x=\"18\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 18 300)\">lambda</text>\n";

  auto hline = [&](double lam, const char* color, const char* label) {
    if (lam > bs.window_max) return;
    out << "<line x1=\"" << px(x0) << "\" y1=\"" << px(Y(lam)) << "\" x2=\"" << px(x1) << "\" y2=\""
        << px(Y(lam)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"6 3\"/>\n";
    out << "<text x=\"" << px(x1 + 4) << "\" y=\"" << px(Y(lam) + 4) << "\" font-size=\"12\" fill=\""
        << color << "\">" << label << "</text>\n";
  };
  if (alpha) hline(*alpha, "#c00", "alpha");
  if (beta) hline(*beta, "#06c", "beta");

  for (std::size_t i = 0; i < bs.phi_grid.size(); ++i)
    for (double lam : bs.samples[i])
      out << "<circle cx=\"" << px(X(bs.phi_grid[i])) << "\" cy=\"" << px(Y(lam))
          << "\" r=\"2\" fill=\"#222\"/>\n";
  out << "</svg>\n";
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

inline void write_convergence_csv(const std::filesystem::path& path,
                                  const ConvergenceReport& report) {
  auto out = outdetail::open_out(path);
  out << "eps,hausdorff,gap_lo,gap_hi,corollary_pass,pi_residual_median\n";
  for (const ConvergenceEntry& e : report.entries) {
    out << format_float(e.eps) << ',' << format_float(e.hausdorff) << ',';
    if (e.main_gap)
      out << format_float(e.main_gap->lo) << ',' << format_float(e.main_gap->hi);
    else
      out << ',';
    out << ',' << (e.corollary_pass ? 1 : 0) << ',' << format_float(e.pi_residual_median) << '\n';
  }
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

inline void write_converge_summary_json(const std::filesystem::path& path,
                                        const ConvergenceReport& report) {
  nlohmann::ordered_json j;
  j["preset"] = {{"alpha", report.limit.alpha}, {"r", report.limit.r}, {"L", report.limit.L}};
  j["unperturbed"] = report.unperturbed;
  j["alpha"] = report.alpha;
  if (report.beta)
    j["beta"] = *report.beta;
  else
    j["beta"] = nullptr;
  j["delta"] = report.delta;
  j["corollary_pass"] = report.corollary_pass;
  j["entries"] = nlohmann::ordered_json::array();
  for (const ConvergenceEntry& e : report.entries) {
    nlohmann::ordered_json o;
    o["eps"] = e.eps;
    o["hausdorff"] = e.hausdorff;
    if (e.main_gap) {
      o["gap_lo"] = e.main_gap->lo;
      o["gap_hi"] = e.main_gap->hi;
    } else {
      o["gap_lo"] = nullptr;
      o["gap_hi"] = nullptr;
    }
    o["corollary_pass"] = e.corollary_pass;
    o["pi_residual_median"] = e.pi_residual_median;
    o["k_used"] = e.k_used;
    j["entries"].push_back(o);
  }
  auto out = outdetail::open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

/// Plain-text mesh dump: vertex coordinates, then triangles with region tags.
inline void write_mesh_dump(const std::filesystem::path& path, const PeriodCellMesh& mesh) {
  auto out = outdetail::open_out(path);
  out << "# vertices " << mesh.n_vertices() << "\n";
  for (const Vec2& v : mesh.vertices) out << format_float(v.x) << ' ' << format_float(v.y) << '\n';
  out << "# triangles " << mesh.triangles.size() << "\n";
  for (const Triangle& t : mesh.triangles)
    out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << region_name(t.tag) << '\n';
  out << "# pairing " << mesh.left_boundary.size() << "\n";
  for (std::size_t i = 0; i < mesh.left_boundary.size(); ++i)
    out << mesh.left_boundary[i] << ' ' << mesh.right_boundary[i] << '\n';
  if (!out) throw Error(ErrorCode::IO_ERROR, "write failed: " + path.string());
}

}  // namespace rpwg
