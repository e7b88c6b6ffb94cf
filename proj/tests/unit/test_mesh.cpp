#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "rpwg/geometry.hpp"
#include "rpwg/mesh.hpp"

using namespace rpwg;

namespace {

CellGeometry preset_cell(double eps) {
  return build_cell(validate_params(asymptotic_preset(ScalingPreset{1, 1, 1, 1}, eps)));
}

// Conformity: every edge belongs to one (boundary) or two (interior)
// triangles, never more.
void check_conforming(const PeriodCellMesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const Triangle& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(t.v[e], t.v[(e + 1) % 3]);
      edge_count[key] += 1;
    }
  for (const auto& [edge, count] : edge_count) REQUIRE(count <= 2);
}

void check_positive_areas(const PeriodCellMesh& mesh) {
  for (const Triangle& t : mesh.triangles) REQUIRE(mesh.triangle_area(t) > 0);
}

void check_pairing(const PeriodCellMesh& mesh) {
  REQUIRE(mesh.left_boundary.size() == mesh.right_boundary.size());
  for (std::size_t i = 0; i < mesh.left_boundary.size(); ++i) {
    const double yl = mesh.vertices[mesh.left_boundary[i]].y;
    const double yr = mesh.vertices[mesh.right_boundary[i]].y;
    REQUIRE(std::abs(yl - yr) < 1e-12);
  }
  // bijection: no duplicates
  std::set<int> left(mesh.left_boundary.begin(), mesh.left_boundary.end());
  REQUIRE(left.size() == mesh.left_boundary.size());
}

double total_area(const PeriodCellMesh& mesh) {
  double a = 0;
  for (const Triangle& t : mesh.triangles) a += mesh.triangle_area(t);
  return a;
}

}  // namespace

TEST_CASE("unperturbed cell gives a structured grid", "[mesh]") {
  const auto vp = validate_params(WaveguideParams::strip(0.25, 1.0));
  const CellGeometry cell = build_cell(vp);
  const PeriodCellMesh mesh = triangulate(cell, 0.25 / 4);
  // nx = ceil(0.25/0.0625) = 4 columns, ny = ceil(1/0.0625) = 16 rows
  CHECK(mesh.n_vertices() == 5 * 17);
  CHECK(mesh.triangles.size() == 2 * 4 * 16);
  check_conforming(mesh);
  check_positive_areas(mesh);
  check_pairing(mesh);
  CHECK(total_area(mesh) == Catch::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("perturbed cell conforms and conserves area", "[mesh]") {
  for (double eps : {0.25, 0.125}) {
    const CellGeometry cell = preset_cell(eps);
    const PeriodCellMesh mesh = triangulate(cell, 0.05);
    check_conforming(mesh);
    check_positive_areas(mesh);
    check_pairing(mesh);
    REQUIRE(total_area(mesh) == Catch::Approx(cell.total_area()).epsilon(1e-12));
    // every triangle lies inside its tagged rectangle
    for (const Triangle& t : mesh.triangles) {
      const Rect r = t.tag == Region::Strip ? cell.strip_rect
                    : t.tag == Region::Passage ? *cell.passage_rect
                                               : *cell.room_rect;
      for (int v : t.v) {
        REQUIRE(mesh.vertices[v].x >= r.x0 - 1e-14);
        REQUIRE(mesh.vertices[v].x <= r.x1 + 1e-14);
        REQUIRE(mesh.vertices[v].y >= r.y0 - 1e-14);
        REQUIRE(mesh.vertices[v].y <= r.y1 + 1e-14);
      }
    }
  }
}

TEST_CASE("mesh generation is deterministic", "[mesh]") {
  const CellGeometry cell = preset_cell(0.125);
  const PeriodCellMesh a = triangulate(cell, 0.04);
  const PeriodCellMesh b = triangulate(cell, 0.04);
  REQUIRE(a.n_vertices() == b.n_vertices());
  for (int i = 0; i < a.n_vertices(); ++i) {
    REQUIRE(a.vertices[i].x == b.vertices[i].x);
    REQUIRE(a.vertices[i].y == b.vertices[i].y);
  }
}

TEST_CASE("quality metrics on canonical meshes", "[mesh]") {
  // single right isoceles triangle via the unperturbed 1x1 cell at h=1
  const auto vp = validate_params(WaveguideParams::strip(1.0, 1.0));
  const PeriodCellMesh mesh = triangulate(build_cell(vp), 1.0);
  const MeshQuality q = mesh_quality(mesh);
  CHECK(q.min_angle_deg == Catch::Approx(45.0).epsilon(1e-12));
  CHECK(q.max_aspect == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(q.counts[0] == 2);
  CHECK(q.counts[1] == 0);
  CHECK(q.counts[2] == 0);
}

TEST_CASE("uniform strip mesh has congruent elements", "[mesh]") {
  const auto vp = validate_params(WaveguideParams::strip(0.5, 1.0));
  const PeriodCellMesh mesh = triangulate(build_cell(vp), 0.125);
  const MeshQuality q = mesh_quality(mesh);
  CHECK(q.max_aspect == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("preset mesh resolves all three regions", "[mesh]") {
  const PeriodCellMesh mesh = triangulate(preset_cell(0.125), 1.0 / 32);
  const MeshQuality q = mesh_quality(mesh);
  CHECK(q.counts[0] > 0);
  CHECK(q.counts[1] > 0);
  CHECK(q.counts[2] > 0);
  CHECK(q.min_angle_deg >= 3.0);  // graded tensor grids stay away from slivers
}

TEST_CASE("refinement quadruples triangles and preserves invariants", "[mesh]") {
  const CellGeometry cell = preset_cell(0.25);
  const PeriodCellMesh mesh = triangulate(cell, 0.06);
  const PeriodCellMesh fine = refine(mesh);
  CHECK(fine.triangles.size() == 4 * mesh.triangles.size());
  check_conforming(fine);
  check_positive_areas(fine);
  check_pairing(fine);
  CHECK(total_area(fine) == Catch::Approx(cell.total_area()).epsilon(1e-12));
  CHECK(fine.left_boundary.size() == 2 * mesh.left_boundary.size() - 1);

  // region tags inherited: per-region area is conserved
  auto region_area = [](const PeriodCellMesh& m, Region r) {
    double a = 0;
    for (const Triangle& t : m.triangles)
      if (t.tag == r) a += m.triangle_area(t);
    return a;
  };
  for (Region r : {Region::Strip, Region::Passage, Region::Room})
    CHECK(region_area(fine, r) == Catch::Approx(region_area(mesh, r)).epsilon(1e-12));
}

TEST_CASE("tiling glues strip edges and keeps room slits apart", "[mesh]") {
  // eps = 1/2 preset: b = eps and unit room width, so adjacent rooms touch.
  const CellGeometry cell = preset_cell(0.5);
  const PeriodCellMesh one = triangulate(cell, 0.05);
  const PeriodCellMesh two = tile(one, 2);
  check_conforming(two);
  check_positive_areas(two);
  check_pairing(two);
  CHECK(two.width == Catch::Approx(1.0));
  CHECK(total_area(two) == Catch::Approx(2 * cell.total_area()).epsilon(1e-12));
  // glued interior strip edge: vertex count = 2n - (pairing size)
  CHECK(two.n_vertices() == 2 * one.n_vertices() - static_cast<int>(one.left_boundary.size()));
  // the room slit at x = 1/2 must keep duplicate coordinates distinct
  std::map<std::pair<double, double>, int> seen;
  int slit_duplicates = 0;
  for (const Vec2& v : two.vertices)
    if (v.y > 0 && std::abs(v.x - 0.5) < 1e-14) ++slit_duplicates;
  CHECK(slit_duplicates >= 2);
}

TEST_CASE("resolution guards", "[mesh]") {
  const CellGeometry cell = preset_cell(0.25);
  CHECK_THROWS_AS(triangulate(cell, -1.0), Error);
  CHECK_THROWS_AS(triangulate(cell, 0.05, 0.5), Error);
}
