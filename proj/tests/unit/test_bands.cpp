#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "rpwg/bands.hpp"

using namespace rpwg;

namespace {

BandSweepConfig coarse_sweep(int n_phi, int k, double lambda_max, double target_h = 0.08) {
  BandSweepConfig cfg;
  cfg.target_h = target_h;
  cfg.n_phi = n_phi;
  cfg.k = k;
  cfg.lambda_max = lambda_max;
  cfg.eig_tol = 1e-9;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("detect_gaps on hand-made intervals", "[bands]") {
  const std::vector<Interval> bands{{0.0, 1.0}, {2.0, 3.0}};
  const auto gaps = detect_gaps(bands, 0.0, 3.0);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].lo == 1.0);
  CHECK(gaps[0].hi == 2.0);
  CHECK(!gaps[0].truncated);

  const auto overlapping = detect_gaps({{0.0, 2.0}, {1.0, 3.0}}, 0.0, 3.0);
  CHECK(overlapping.empty());

  const auto truncated = detect_gaps({{0.0, 3.0}}, 0.0, 4.0);
  REQUIRE(truncated.size() == 1);
  CHECK(truncated[0].lo == 3.0);
  CHECK(truncated[0].hi == 4.0);
  CHECK(truncated[0].truncated);
}

TEST_CASE("band/gap union partitions the window", "[bands]") {
  const std::vector<Interval> bands{{0.1, 0.5}, {0.4, 1.1}, {2.0, 2.5}, {4.0, 9.0}};
  const double W = 5.0;
  const auto gaps = detect_gaps(bands, 0.0, W);
  // merge clipped bands and gaps; their union must be exactly [0, W]
  std::vector<std::pair<double, double>> pieces;
  for (const Interval& b : bands) pieces.emplace_back(std::max(0.0, b.lo), std::min(W, b.hi));
  for (const GapInterval& g : gaps) pieces.emplace_back(g.lo, g.hi);
  std::sort(pieces.begin(), pieces.end());
  double covered = 0.0;
  for (auto [lo, hi] : pieces) {
    REQUIRE(lo <= covered + 1e-15);
    covered = std::max(covered, hi);
  }
  CHECK(covered == W);
}

TEST_CASE("sampled Hausdorff of interval unions", "[bands]") {
  const std::vector<Interval> a{{0.0, 1.0}};
  const std::vector<Interval> b{{0.0, 1.0}, {1.5, 2.0}};
  const double step = 2.0 / 2000;
  CHECK(sampled_hausdorff(a, a, 0.0, 2.0, step) == 0.0);
  CHECK(sampled_hausdorff(a, b, 0.0, 2.0, step) == Catch::Approx(1.0).margin(2 * step));
  // clipping to the window
  const std::vector<Interval> c{{0.0, std::numeric_limits<double>::infinity()}};
  CHECK(sampled_hausdorff(c, a, 0.0, 2.0, step) == Catch::Approx(1.0).margin(2 * step));
  // empty set is maximally distant
  CHECK(sampled_hausdorff({}, a, 0.0, 2.0, step) == 2.0);
}

TEST_CASE("point-set Hausdorff", "[bands]") {
  CHECK(sampled_hausdorff_points({0.0, 1.0}, {0.0, 1.0}, 0.0, 2.0) == 0.0);
  CHECK(sampled_hausdorff_points({0.0}, {0.0, 0.75}, 0.0, 2.0) == 0.75);
  CHECK(sampled_hausdorff_points({0.0, 5.0}, {0.1}, 0.0, 2.0) == Catch::Approx(0.1));
}

TEST_CASE("numerical slivers are not reported as gaps", "[bands]") {
  // a band starting at +1e-17 must not create a (0, 1e-17) gap
  const auto gaps = detect_gaps({{1e-17, 1.0}, {2.0, 3.0}}, 0.0, 3.0);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].lo == 1.0);
  CHECK(gaps[0].hi == 2.0);
}

TEST_CASE("gap structure invariants on a computed band structure", "[bands]") {
  const auto vp = validate_params(asymptotic_preset(ScalingPreset{1, 1, 1, 1}, 0.25));
  const BandStructure bs = compute_bands(vp, coarse_sweep(9, 8, 4.0, 0.08));
  for (std::size_t i = 0; i < bs.gaps.size(); ++i) {
    const GapInterval& g = bs.gaps[i];
    CHECK(g.lo >= 0.0);
    CHECK(g.hi <= bs.window_max);
    CHECK(g.lo < g.hi);
    if (i + 1 < bs.gaps.size()) CHECK(g.hi <= bs.gaps[i + 1].lo);
    for (const Interval& b : bs.bands) {
      const double lo = std::max(b.lo, g.lo);
      const double hi = std::min(b.hi, g.hi);
      CHECK(hi - lo <= 1e-12 * bs.window_max);  // gaps disjoint from all bands
    }
  }

  // clipped bands and gaps together partition the window
  std::vector<std::pair<double, double>> pieces;
  for (const Interval& b : bs.bands) {
    const double lo = std::max(b.lo, 0.0);
    const double hi = std::min(b.hi, bs.window_max);
    if (hi >= lo) pieces.emplace_back(lo, hi);
  }
  for (const GapInterval& g : bs.gaps) pieces.emplace_back(g.lo, g.hi);
  std::sort(pieces.begin(), pieces.end());
  double covered = 0.0;
  for (auto [lo, hi] : pieces) {
    REQUIRE(lo <= covered + 1e-11 * bs.window_max);
    covered = std::max(covered, hi);
  }
  CHECK(covered == Catch::Approx(bs.window_max).margin(1e-11));
}

TEST_CASE("unperturbed control: bands overlap, no gaps", "[bands]") {
  const auto vp = validate_params(WaveguideParams::strip(0.5, 1.0));
  const BandStructure bs = compute_bands(vp, coarse_sweep(17, 10, 4.9348, 0.07));
  REQUIRE(bs.bands.size() == 10);
  for (const GapInterval& g : bs.gaps) CHECK(g.truncated);
  // band k+1 lower edge >= band k lower edge; values >= 0
  for (std::size_t j = 1; j < bs.bands.size(); ++j) CHECK(bs.bands[j].lo >= bs.bands[j - 1].lo);
  CHECK(bs.bands[0].lo >= -1e-10);
  CHECK(bs.bands[0].lo == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("band samples are symmetric under phi -> 2pi - phi", "[bands]") {
  const auto vp = validate_params(asymptotic_preset(ScalingPreset{1, 1, 1, 1}, 0.25));
  const BandStructure bs = compute_bands(vp, coarse_sweep(8, 6, 4.0, 0.09));
  // grid {0, pi/4, ..., 7pi/4}: phi_j and phi_{n-j} are mirror phases
  for (int j = 1; j < 4; ++j)
    for (int k = 0; k < 6; ++k)
      CHECK(bs.samples[j][k] == Catch::Approx(bs.samples[8 - j][k]).margin(1e-8));
}

TEST_CASE("window coverage violation raises WINDOW_NOT_COVERED", "[bands]") {
  const auto vp = validate_params(WaveguideParams::strip(0.5, 1.0));
  try {
    compute_bands(vp, coarse_sweep(5, 2, 300.0, 0.1));
    FAIL("expected WINDOW_NOT_COVERED");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WINDOW_NOT_COVERED);
  }
}

TEST_CASE("room average of the ground state", "[bands]") {
  const auto vp = validate_params(asymptotic_preset(ScalingPreset{1, 1, 1, 1}, 0.25));
  const PeriodCellMesh mesh = triangulate(build_cell(vp), 0.06);
  const AssembledPair pair = assemble(mesh, vp->rho_room);
  const FiberPencil fp = apply_quasiperiodic(pair, mesh, 0.0);
  const EigenResult res = solve_lowest(fp, 2, 1e-10);
  REQUIRE(res.eigenvalues[0] == Catch::Approx(0.0).margin(1e-9));

  const Eigen::VectorXcd full = expand_to_full(fp, res.eigenvectors.col(0));
  const RoomAverage ra = room_average(mesh, vp, full, res.eigenvalues[0], 1.0);
  // constant eigenfunction: room mean = mouth mean (both 1 after sup-norm),
  // lambda = 0 -> residual 0
  CHECK(std::abs(ra.room_mean - ra.mouth_mean) < 1e-8);
  CHECK(ra.residual < 1e-8);
}

TEST_CASE("room average residual formula on a synthetic constant", "[bands]") {
  const auto vp = validate_params(asymptotic_preset(ScalingPreset{1, 1, 1, 1}, 0.25));
  const PeriodCellMesh mesh = triangulate(build_cell(vp), 0.08);
  Eigen::VectorXcd u = Eigen::VectorXcd::Constant(mesh.n_vertices(), std::complex<double>(0.5, 0.0));
  const double lambda = 0.7, alpha = 1.0;
  const RoomAverage ra = room_average(mesh, vp, u, lambda, alpha);
  // sup-normalized constant c = 1: residual = |alpha*0 - lambda*1| = lambda
  CHECK(ra.residual == Catch::Approx(lambda).margin(1e-12));
}

TEST_CASE("fold validation is exact for the unperturbed strip", "[bands]") {
  const auto vp = validate_params(WaveguideParams::strip(0.5, 1.0));
  BandSweepConfig cfg = coarse_sweep(6, 8, 4.9348, 0.1);
  const double dev = fold_validation(vp, cfg);
  CHECK(dev <= 1e-9);
}

TEST_CASE("refining the phi grid only widens bands", "[bands]") {
  const auto vp = validate_params(asymptotic_preset(ScalingPreset{1, 1, 1, 1}, 0.25));
  const BandStructure coarse = compute_bands(vp, coarse_sweep(6, 6, 4.0, 0.09));
  const BandStructure fine = compute_bands(vp, coarse_sweep(12, 6, 4.0, 0.09));
  for (int j = 0; j < 6; ++j) {
    CHECK(fine.bands[j].lo <= coarse.bands[j].lo + 1e-12);
    CHECK(fine.bands[j].hi >= coarse.bands[j].hi - 1e-12);
  }
}
