#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rpwg/geometry.hpp"

using namespace rpwg;

namespace {

WaveguideParams reference_params() {
  WaveguideParams p;
  p.eps = 0.25;
  p.L = 1.0;
  p.b = 0.25;
  p.d = 1.0 / 64;
  p.h = 0.25;
  p.rho_room = 0.25;
  p.R = 0.5;
  return p;
}

}  // namespace

TEST_CASE("valid reference parameters pass", "[geometry]") {
  const auto vp = validate_params(reference_params());
  CHECK(vp->eps == 0.25);
}

TEST_CASE("b > eps is a geometry violation", "[geometry]") {
  WaveguideParams p = reference_params();
  p.b = 0.5;
  try {
    validate_params(p);
    FAIL("expected GEOMETRY_VIOLATION");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GEOMETRY_VIOLATION);
  }
}

TEST_CASE("eps must be a reciprocal integer", "[geometry]") {
  WaveguideParams p = reference_params();
  p.eps = 0.3;
  try {
    validate_params(p);
    FAIL("expected PERIOD_NOT_RECIPROCAL_INTEGER");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PERIOD_NOT_RECIPROCAL_INTEGER);
  }
  // 1/3 in decimal form is fine
  p.eps = 1.0 / 3.0;
  CHECK_NOTHROW(validate_params(p));
}

TEST_CASE("passage wider than the mouth is rejected", "[geometry]") {
  WaveguideParams p = reference_params();
  p.d = 0.2;  // d > R*b = 0.125
  try {
    validate_params(p);
    FAIL("expected GEOMETRY_VIOLATION");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GEOMETRY_VIOLATION);
  }
}

TEST_CASE("degenerate passage height rejected upstream", "[geometry]") {
  WaveguideParams p = reference_params();
  p.h = 0.0;
  CHECK_THROWS_AS(validate_params(p), Error);
}

TEST_CASE("cell rectangles from the definitions", "[geometry]") {
  // eps=1/4, d=1/64, h=1/4, b=1/4, unit-square room:
  // passage = [eps/2 - d/2, eps/2 + d/2] x [0, h] = [30/256, 34/256] x [0, 1/4]
  // room    = [eps/2 - b/2, eps/2 + b/2] x [h, h + b] = [0, 1/4] x [1/4, 1/2]
  const auto vp = validate_params(reference_params());
  const CellGeometry cell = build_cell(vp);
  REQUIRE(cell.perturbed());
  CHECK(cell.strip_rect.x0 == 0.0);
  CHECK(cell.strip_rect.y0 == -1.0);
  CHECK(cell.strip_rect.x1 == 0.25);
  CHECK(cell.strip_rect.y1 == 0.0);
  CHECK(cell.passage_rect->x0 == 30.0 / 256);
  CHECK(cell.passage_rect->x1 == 34.0 / 256);
  CHECK(cell.passage_rect->y0 == 0.0);
  CHECK(cell.passage_rect->y1 == 0.25);
  CHECK(cell.room_rect->x0 == 0.0);
  CHECK(cell.room_rect->x1 == 0.25);
  CHECK(cell.room_rect->y0 == 0.25);
  CHECK(cell.room_rect->y1 == 0.5);
}

TEST_CASE("build_cell is deterministic", "[geometry]") {
  const auto vp = validate_params(reference_params());
  const CellGeometry a = build_cell(vp);
  const CellGeometry b = build_cell(vp);
  CHECK(a.passage_rect->x0 == b.passage_rect->x0);
  CHECK(a.room_rect->x1 == b.room_rect->x1);
  CHECK(a.strip_rect.y0 == b.strip_rect.y0);
}

TEST_CASE("gluing invariant: passage top edge inside room bottom edge", "[geometry]") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> inv_eps(1, 12);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    WaveguideParams p;
    p.eps = 1.0 / inv_eps(rng);
    p.L = 0.5 + unif(rng);
    p.R = 0.2 + 0.6 * unif(rng);
    p.b = p.eps * (0.3 + 0.7 * unif(rng));
    p.d = p.R * p.b * (0.1 + 0.9 * unif(rng));
    p.h = 0.1 + unif(rng);
    p.rho_room = 0.1 + unif(rng);
    p.room_width = p.R + (1.0 - p.R) * unif(rng);
    p.room_height = 0.3 + unif(rng);
    const CellGeometry cell = build_cell(validate_params(p));
    REQUIRE(cell.passage_rect->x0 >= cell.room_rect->x0);
    REQUIRE(cell.passage_rect->x1 <= cell.room_rect->x1);
    REQUIRE(cell.passage_rect->y1 == cell.room_rect->y0);
    // regions pairwise disjoint: passage sits between strip top and room bottom
    REQUIRE(cell.strip_rect.y1 <= cell.passage_rect->y0);
    // adjacent-cell passage distance eps - d >= eps(1 - R) > 0
    REQUIRE(p.eps - p.d >= p.eps * (1 - p.R) - 1e-15);
  }
}

TEST_CASE("asymptotic preset hits both limit quotients exactly", "[geometry]") {
  const ScalingPreset s{1.0, 1.0, 1.0, 1.0};
  const WaveguideParams p = asymptotic_preset(s, 1.0 / 8);
  CHECK(p.b == 0.125);
  CHECK(p.h == 0.125);
  CHECK(p.d == 1.0 / 64);
  CHECK(p.rho_room == 0.125);

  for (int inv = 2; inv <= 64; inv *= 2) {
    const double eps = 1.0 / inv;
    const WaveguideParams q = asymptotic_preset(s, eps);
    const double B = q.room_width * q.room_height;
    const double alpha_quotient = q.d * q.rho_room / (q.h * q.b * q.b * B);
    const double r_quotient = q.b * q.b * B / (eps * q.rho_room);
    CHECK(alpha_quotient == Catch::Approx(s.alpha).epsilon(1e-14));
    CHECK(r_quotient == Catch::Approx(s.r).epsilon(1e-14));
  }
}

TEST_CASE("preset validity threshold eps <= R/(alpha r)", "[geometry]") {
  // alpha=4, r=4, R=1/2: d = alpha*r*eps^2 <= R*eps iff eps <= 1/32
  const ScalingPreset s{4.0, 4.0, 1.0, 1.0};
  try {
    asymptotic_preset(s, 0.25);
    FAIL("expected GEOMETRY_VIOLATION");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GEOMETRY_VIOLATION);
    CHECK(std::string(e.what()).find("0.03125") != std::string::npos);
  }
  CHECK_NOTHROW(asymptotic_preset(s, 1.0 / 32));
  CHECK_NOTHROW(asymptotic_preset(s, 1.0 / 64));
}

TEST_CASE("preset at alpha=1,r=1 stays within the mouth bound", "[geometry]") {
  const ScalingPreset s{1.0, 1.0, 1.0, 1.0};
  const WaveguideParams p = asymptotic_preset(s, 1.0 / 8);
  CHECK(p.d <= p.R * p.b);
}
