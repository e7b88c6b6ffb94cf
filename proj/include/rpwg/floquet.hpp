#pragma once

// Quasi-periodic reduction: folds the right-boundary unknowns of an assembled
// pencil onto their left partners with factor e^{i*phi} via the congruence
// transform T^H A T, where T injects the constraint u(right) = e^{i*phi} u(left).
// The result is a complex Hermitian pencil of reduced dimension.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rpwg/assembly.hpp"
#include "rpwg/errors.hpp"
#include "rpwg/mesh.hpp"

namespace rpwg {

struct FiberPencil {
  SparseComplex K;  // Hermitian, positive semidefinite
  SparseComplex M;  // Hermitian, positive definite
  double phi = 0;
  std::vector<int> back_map;     // reduced index -> full mesh vertex
  std::vector<int> reduced_of;   // full vertex -> reduced index (right verts -> left partner's)
  std::vector<int> right_of;     // full vertex -> 1 if eliminated right-boundary vertex
  int full_dim = 0;

  int dim() const { return static_cast<int>(K.rows()); }
};

/// Uniform phase grid {2*pi*j/n : j = 0..n-1}; the endpoint 2*pi is excluded.
inline std::vector<double> brillouin_grid(int n) {
  if (n < 2) throw Error(ErrorCode::VALIDATION_ERROR, "brillouin_grid needs n >= 2");
  std::vector<double> phis(n);
  for (int j = 0; j < n; ++j) phis[j] = 2.0 * std::numbers::pi * j / n;
  return phis;
}

namespace floquetdetail {

inline void check_pairing(const PeriodCellMesh& mesh) {
  if (mesh.left_boundary.size() != mesh.right_boundary.size())
    throw Error(ErrorCode::PAIRING_MISMATCH, "left/right boundary lists differ in length");
  if (mesh.left_boundary.empty())
    throw Error(ErrorCode::PAIRING_MISMATCH, "empty boundary pairing");
  for (std::size_t j = 0; j < mesh.left_boundary.size(); ++j) {
    const double yl = mesh.vertices[mesh.left_boundary[j]].y;
    const double yr = mesh.vertices[mesh.right_boundary[j]].y;
    if (std::abs(yl - yr) >= 1e-12)
      throw Error(ErrorCode::PAIRING_MISMATCH, "paired boundary vertices disagree in x2");
  }
}

inline SparseComplex congruence(const SparseReal& A, const std::vector<int>& reduced,
                                const std::vector<std::complex<double>>& factor, int nr) {
  std::vector<Eigen::Triplet<std::complex<double>>> trip;
  trip.reserve(A.nonZeros());
  for (int col = 0; col < A.outerSize(); ++col)
    for (SparseReal::InnerIterator it(A, col); it; ++it) {
      // (T^H A T)[red(i), red(j)] += conj(f_i) * A(i,j) * f_j
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      trip.emplace_back(reduced[i], reduced[j], std::conj(factor[i]) * it.value() * factor[j]);
    }
  SparseComplex out(nr, nr);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace floquetdetail

/// Builds the fiber pencil at phase phi from the assembled cell pencil and the
/// mesh's left/right pairing. Throws PAIRING_MISMATCH on an invalid pairing.
inline FiberPencil apply_quasiperiodic(const AssembledPair& pair, const PeriodCellMesh& mesh,
                                       double phi) {
  floquetdetail::check_pairing(mesh);
  const int n = pair.n;
  if (n != mesh.n_vertices())
    throw Error(ErrorCode::PAIRING_MISMATCH, "assembled pencil and mesh dimensions differ");

  FiberPencil fp;
  fp.phi = phi;
  fp.full_dim = n;
  fp.right_of.assign(n, 0);
  std::vector<int> partner(n, -1);
  for (std::size_t j = 0; j < mesh.right_boundary.size(); ++j) {
    fp.right_of[mesh.right_boundary[j]] = 1;
    partner[mesh.right_boundary[j]] = mesh.left_boundary[j];
  }

  fp.reduced_of.assign(n, -1);
  fp.back_map.clear();
  for (int v = 0; v < n; ++v) {
    if (fp.right_of[v]) continue;
    fp.reduced_of[v] = static_cast<int>(fp.back_map.size());
    fp.back_map.push_back(v);
  }
  const std::complex<double> phase = std::polar(1.0, phi);
  std::vector<std::complex<double>> factor(n, 1.0);
  for (int v = 0; v < n; ++v)
    if (fp.right_of[v]) {
      fp.reduced_of[v] = fp.reduced_of[partner[v]];
      factor[v] = phase;
    }

  const int nr = n - static_cast<int>(mesh.right_boundary.size());
  fp.K = floquetdetail::congruence(pair.K, fp.reduced_of, factor, nr);
  fp.M = floquetdetail::congruence(pair.M, fp.reduced_of, factor, nr);
  return fp;
}

/// Expands a reduced fiber vector back to all mesh vertices, applying the
/// phase factor on the eliminated right boundary.
inline Eigen::VectorXcd expand_to_full(const FiberPencil& fp, const Eigen::VectorXcd& reduced) {
  Eigen::VectorXcd full(fp.full_dim);
  const std::complex<double> phase = std::polar(1.0, fp.phi);
  for (int v = 0; v < fp.full_dim; ++v)
    full[v] = (fp.right_of[v] ? phase : 1.0) * reduced[fp.reduced_of[v]];
  return full;
}

}  // namespace rpwg
