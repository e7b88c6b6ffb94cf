#pragma once

// P1 assembly of the stiffness matrix (Dirichlet energy, natural Neumann
// boundary) and the mass matrix of the weighted inner product with weight
// 1/rho, rho = 1 on strip and passage and rho = rho_room on the room. The
// generalized pencil K x = lambda M x then discretizes -rho*Laplace with
// Neumann conditions.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <vector>

#include "rpwg/errors.hpp"
#include "rpwg/mesh.hpp"

namespace rpwg {

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<std::complex<double>>;

struct AssembledPair {
  SparseReal K;          // stiffness
  SparseReal M;          // weighted mass, M = M_outside + (1/rho_room) * M_room
  SparseReal M_outside;  // unweighted mass over strip + passage
  SparseReal M_room;     // unweighted mass over the room
  double rho_room = 1.0;
  int n = 0;  // dofs == mesh vertices (identity dof map)
};

namespace femdetail {

// Element contributions of one P1 triangle: K_e[i][j] = A * grad_i . grad_j,
// M_e = A/12 * [[2,1,1],[1,2,1],[1,1,2]].
inline void element_matrices(const PeriodCellMesh& mesh, const Triangle& t, double Ke[3][3],
                             double Me[3][3]) {
  const Vec2& p0 = mesh.vertices[t.v[0]];
  const Vec2& p1 = mesh.vertices[t.v[1]];
  const Vec2& p2 = mesh.vertices[t.v[2]];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  const double area = det / 2;
  // gradients of the hat functions
  const double gx[3] = {(p1.y - p2.y) / det, (p2.y - p0.y) / det, (p0.y - p1.y) / det};
  const double gy[3] = {(p2.x - p1.x) / det, (p0.x - p2.x) / det, (p1.x - p0.x) / det};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Ke[i][j] = area * (gx[i] * gx[j] + gy[i] * gy[j]);
      Me[i][j] = area / 12 * (i == j ? 2.0 : 1.0);
    }
}

}  // namespace femdetail

inline SparseReal assemble_stiffness(const PeriodCellMesh& mesh) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  double Ke[3][3], Me[3][3];
  for (const Triangle& t : mesh.triangles) {
    femdetail::element_matrices(mesh, t, Ke, Me);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t.v[i], t.v[j], Ke[i][j]);
  }
  SparseReal K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

/// Unweighted mass restricted to a region predicate.
template <typename Pred>
inline SparseReal assemble_mass_part(const PeriodCellMesh& mesh, Pred&& in_region) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  double Ke[3][3], Me[3][3];
  for (const Triangle& t : mesh.triangles) {
    if (!in_region(t.tag)) continue;
    femdetail::element_matrices(mesh, t, Ke, Me);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t.v[i], t.v[j], Me[i][j]);
  }
  SparseReal M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

inline SparseReal assemble_mass(const PeriodCellMesh& mesh, double rho_room) {
  if (!(rho_room > 0)) throw Error(ErrorCode::GEOMETRY_VIOLATION, "rho_room must be positive");
  SparseReal out = assemble_mass_part(mesh, [](Region r) { return r != Region::Room; });
  SparseReal room = assemble_mass_part(mesh, [](Region r) { return r == Region::Room; });
  return out + (1.0 / rho_room) * room;
}

inline AssembledPair assemble(const PeriodCellMesh& mesh, double rho_room) {
  if (!(rho_room > 0)) throw Error(ErrorCode::GEOMETRY_VIOLATION, "rho_room must be positive");
  AssembledPair pair;
  pair.n = mesh.n_vertices();
  pair.rho_room = rho_room;
  pair.K = assemble_stiffness(mesh);
  pair.M_outside = assemble_mass_part(mesh, [](Region r) { return r != Region::Room; });
  pair.M_room = assemble_mass_part(mesh, [](Region r) { return r == Region::Room; });
  pair.M = pair.M_outside + (1.0 / rho_room) * pair.M_room;
  return pair;
}

/// (x^H K x)/(x^H M x); real and nonnegative for Hermitian K psd, M pd.
template <typename MatA, typename MatB, typename Vec>
inline double rayleigh_quotient(const MatA& K, const MatB& M, const Vec& x) {
  if (x.size() == 0 || x.norm() == 0) throw Error(ErrorCode::ZERO_VECTOR, "Rayleigh quotient of the zero vector");
  const auto num = x.dot(K * x);  // x^H K x
  const auto den = x.dot(M * x);
  return std::real(std::complex<double>(num)) / std::real(std::complex<double>(den));
}

}  // namespace rpwg
