#pragma once

// Lowest eigenpairs of the complex Hermitian pencil K x = lambda M x
// (K psd, M pd). Primary path: shift-invert Lanczos at sigma = -1 with a
// sparse LDL^H factorization of K + M and full reorthogonalization in the
// M-inner product. Validation path: dense Hermitian generalized solver.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "rpwg/errors.hpp"
#include "rpwg/floquet.hpp"

namespace rpwg {

enum class EigMethod { DENSE, ITERATIVE };

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXcd eigenvectors;    // columns, M-orthonormal
  std::vector<double> residuals;    // ||K x - lambda M x|| / ||M x|| per pair
  std::vector<int> cluster_id;      // pairs within 1e-9 relative share an id
  EigMethod method = EigMethod::ITERATIVE;
  int iterations = 0;               // Lanczos steps (0 for dense)
};

namespace eigdetail {

inline std::vector<int> cluster_ids(const std::vector<double>& vals) {
  std::vector<int> ids(vals.size(), 0);
  int id = 0;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double scale = std::max({1.0, std::abs(vals[i]), std::abs(vals[i - 1])});
    if (std::abs(vals[i] - vals[i - 1]) > 1e-9 * scale) ++id;
    ids[i] = id;
  }
  return ids;
}

inline double pair_residual(const SparseComplex& K, const SparseComplex& M,
                            const Eigen::VectorXcd& x, double lambda) {
  const Eigen::VectorXcd Mx = M * x;
  return (K * x - lambda * Mx).norm() / Mx.norm();
}

// M-orthonormalize columns in place (two modified Gram-Schmidt sweeps).
inline void m_orthonormalize(const SparseComplex& M, Eigen::MatrixXcd& X) {
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int i = 0; i < X.cols(); ++i) {
      for (int j = 0; j < i; ++j) {
        const std::complex<double> c = (M * X.col(j)).dot(X.col(i));
        X.col(i) -= c * X.col(j);
      }
      const double nrm = std::sqrt(std::real((M * X.col(i)).dot(X.col(i))));
      X.col(i) /= nrm;
    }
  }
}

// Shifted inverse iteration on one Ritz pair. Helps when Lanczos stalls just
// above the tolerance on badly conditioned (thin-element) pencils: a shift
// right below the Ritz value contracts the error by |lambda - sigma| / gap
// per step. Returns the achieved residual.
inline double polish_pair(const SparseComplex& K, const SparseComplex& M, double& lambda,
                          Eigen::VectorXcd& x, double tol, int max_steps = 3) {
  double res = pair_residual(K, M, x, lambda);
  for (int step = 0; step < max_steps && res > tol; ++step) {
    const double shift = lambda - 1e-5 * (1.0 + std::abs(lambda));
    SparseComplex A = K - std::complex<double>(shift) * M;
    Eigen::SparseLU<SparseComplex> lu(A);
    if (lu.info() != Eigen::Success) return res;
    Eigen::VectorXcd y = lu.solve(M * x);
    const double nrm = std::sqrt(std::abs(std::real(y.dot(M * y))));
    if (!(nrm > 0) || !std::isfinite(nrm)) return res;
    x = y / nrm;
    lambda = std::real(x.dot(K * x)) / std::real(x.dot(M * x));
    res = pair_residual(K, M, x, lambda);
  }
  return res;
}

inline EigenResult dense_solve(const SparseComplex& K, const SparseComplex& M, int k) {
  const Eigen::MatrixXcd Kd(K), Md(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(
      Kd, Md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorCode::NO_CONVERGENCE, "dense generalized eigensolver failed");
  EigenResult res;
  res.method = EigMethod::DENSE;
  res.eigenvalues.assign(ges.eigenvalues().data(), ges.eigenvalues().data() + k);
  res.eigenvectors = ges.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i)
    res.residuals.push_back(pair_residual(K, M, res.eigenvectors.col(i), res.eigenvalues[i]));
  res.cluster_id = cluster_ids(res.eigenvalues);
  return res;
}

}  // namespace eigdetail

/// All eigenvalues of the pencil via dense Hermitian reduction, ascending.
/// Guarded by a dimension cap; intended for tests and cross-validation.
inline std::vector<double> dense_oracle(const FiberPencil& fp, int cap = 3000) {
  if (fp.dim() > cap) {
    std::ostringstream os;
    os << "dense oracle dimension " << fp.dim() << " exceeds cap " << cap;
    throw Error(ErrorCode::CAP_EXCEEDED, os.str());
  }
  const Eigen::MatrixXcd Kd(fp.K), Md(fp.M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(
      Kd, Md, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorCode::NO_CONVERGENCE, "dense generalized eigensolver failed");
  return std::vector<double>(ges.eigenvalues().data(), ges.eigenvalues().data() + fp.dim());
}

/// Lowest k eigenpairs of the fiber pencil, every residual at most `tol`.
/// Throws NO_CONVERGENCE (with iteration diagnostics) or DIMENSION_EXCEEDED.
inline EigenResult solve_lowest(const FiberPencil& fp, int k, double tol = 1e-9) {
  const int n = fp.dim();
  if (k < 1) throw Error(ErrorCode::DIMENSION_EXCEEDED, "k must be >= 1");
  if (k > n) {
    std::ostringstream os;
    os << "requested " << k << " eigenpairs from a pencil of dimension " << n;
    throw Error(ErrorCode::DIMENSION_EXCEEDED, os.str());
  }
  if (!(tol > 0)) throw Error(ErrorCode::NO_CONVERGENCE, "tolerance must be positive");

  if (n <= 48 || k >= n - 1) return eigdetail::dense_solve(fp.K, fp.M, k);

  // sigma = -1 is always a safe shift for a psd pencil: K + M is hpd.
  SparseComplex A = fp.K + fp.M;
  Eigen::SimplicialLDLT<SparseComplex> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw Error(ErrorCode::NO_CONVERGENCE, "LDL^H factorization of K + M failed");

  const int m_cap = std::min(n, std::max(8 * k + 80, 280));
  Eigen::MatrixXcd V(n, m_cap + 1);   // M-orthonormal Lanczos basis
  Eigen::MatrixXcd MV(n, m_cap + 1);  // cached M * V
  std::vector<double> alpha, beta;    // T diag / subdiagonal

  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_vector = [&]() {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = std::complex<double>(unif(rng), unif(rng));
    return v;
  };

  // M-orthogonalize w against columns 0..j of V, normalize, store as column
  // j+1. Returns the post-orthogonalization M-norm, or -1 when w carries no
  // new direction.
  auto append_column = [&](Eigen::VectorXcd w, int j) -> double {
    const double ref = std::sqrt(std::abs(std::real(w.dot(fp.M * w))));
    for (int sweep = 0; sweep < 2; ++sweep)
      for (int i = 0; i <= j; ++i) w -= MV.col(i).dot(w) * V.col(i);
    Eigen::VectorXcd Mw = fp.M * w;
    const double nrm = std::sqrt(std::abs(std::real(w.dot(Mw))));
    if (!(nrm > 1e-10 * std::max(ref, 1e-300))) return -1.0;
    V.col(j + 1) = w / nrm;
    MV.col(j + 1) = Mw / nrm;
    return nrm;
  };

  {
    Eigen::VectorXcd v0 = random_vector();
    Eigen::VectorXcd Mv0 = fp.M * v0;
    const double nrm = std::sqrt(std::real(v0.dot(Mv0)));
    V.col(0) = v0 / nrm;
    MV.col(0) = Mv0 / nrm;
  }

  int m = 0;
  bool exhausted = false;
  double worst_residual = std::numeric_limits<double>::infinity();
  while (true) {
    const int target = (m == 0) ? std::min(m_cap, std::max(2 * k + 20, 60)) : std::min(m_cap, m + 48);
    for (; m < target && !exhausted; ) {
      Eigen::VectorXcd w = ldlt.solve(MV.col(m));
      alpha.push_back(std::real(MV.col(m).dot(w)));
      double b = append_column(std::move(w), m);
      if (b < 0) {
        // Invariant subspace: continue from a fresh random direction.
        b = 0.0;
        bool restarted = false;
        for (int attempt = 0; attempt < 5 && !restarted; ++attempt)
          restarted = append_column(random_vector(), m) > 0;
        if (!restarted) exhausted = true;
      }
      beta.push_back(b);
      ++m;
    }

    if (m >= k) {
      Eigen::Map<const Eigen::VectorXd> diag(alpha.data(), m);
      Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), m).head(std::max(m - 1, 0));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      if (tri.info() != Eigen::Success)
        throw Error(ErrorCode::NO_CONVERGENCE, "tridiagonal eigensolver failed");

      // k largest theta of Op = (K+M)^{-1} M give the k smallest lambda via
      // lambda = 1/theta - 1.
      Eigen::MatrixXcd X(n, k);
      std::vector<double> lam(k);
      for (int i = 0; i < k; ++i) {
        // theta is ascending in `tri`; the i-th largest theta gives the i-th
        // smallest lambda = 1/theta - 1.
        const int col = m - 1 - i;
        const double theta = tri.eigenvalues()[col];
        lam[i] = 1.0 / theta - 1.0;
        X.col(i) = V.leftCols(m) * tri.eigenvectors().col(col).cast<std::complex<double>>();
      }
      worst_residual = 0;
      for (int i = 0; i < k; ++i)
        worst_residual = std::max(worst_residual, eigdetail::pair_residual(fp.K, fp.M, X.col(i), lam[i]));

      if (worst_residual <= tol || exhausted || m >= m_cap) {
        if (worst_residual > tol) {
          // Last resort before giving up: polish the unconverged pairs with
          // shifted inverse iteration.
          for (int i = 0; i < k; ++i) {
            Eigen::VectorXcd xi = X.col(i);
            if (eigdetail::pair_residual(fp.K, fp.M, xi, lam[i]) <= tol) continue;
            eigdetail::polish_pair(fp.K, fp.M, lam[i], xi, tol);
            X.col(i) = xi;
          }
          // polishing may reorder values inside clusters
          std::vector<int> order(k);
          for (int i = 0; i < k; ++i) order[i] = i;
          std::sort(order.begin(), order.end(), [&](int a, int b) { return lam[a] < lam[b]; });
          Eigen::MatrixXcd Xs(n, k);
          std::vector<double> ls(k);
          for (int i = 0; i < k; ++i) {
            Xs.col(i) = X.col(order[i]);
            ls[i] = lam[order[i]];
          }
          X = std::move(Xs);
          lam = std::move(ls);
          worst_residual = 0;
          for (int i = 0; i < k; ++i)
            worst_residual =
                std::max(worst_residual, eigdetail::pair_residual(fp.K, fp.M, X.col(i), lam[i]));
        }
        if (worst_residual > tol) {
          std::ostringstream os;
          os << "Lanczos stalled after " << m << " steps (basis cap " << m_cap
             << ", worst residual " << worst_residual << " after polishing, tol " << tol << ")";
          throw Error(ErrorCode::NO_CONVERGENCE, os.str());
        }
        eigdetail::m_orthonormalize(fp.M, X);
        EigenResult res;
        res.method = EigMethod::ITERATIVE;
        res.iterations = m;
        res.eigenvalues = lam;
        res.eigenvectors = std::move(X);
        for (int i = 0; i < k; ++i)
          res.residuals.push_back(
              eigdetail::pair_residual(fp.K, fp.M, res.eigenvectors.col(i), res.eigenvalues[i]));
        if (*std::max_element(res.residuals.begin(), res.residuals.end()) > tol)
          throw Error(ErrorCode::NO_CONVERGENCE,
                      "orthonormalization pushed a residual above the tolerance");
        res.cluster_id = eigdetail::cluster_ids(res.eigenvalues);
        return res;
      }
    } else if (exhausted || m >= m_cap) {
      std::ostringstream os;
      os << "Krylov space exhausted after " << m << " steps before reaching k = " << k;
      throw Error(ErrorCode::NO_CONVERGENCE, os.str());
    }
  }
}

/// Residuals recomputed from scratch for a solved result; returns the maximum.
inline double residual_check(const FiberPencil& fp, const EigenResult& result) {
  double worst = 0;
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i)
    worst = std::max(worst, eigdetail::pair_residual(fp.K, fp.M, result.eigenvectors.col(i),
                                                     result.eigenvalues[i]));
  return worst;
}

/// Per-pair recomputed residuals (for comparing against the stored ones).
inline std::vector<double> recompute_residuals(const FiberPencil& fp, const EigenResult& result) {
  std::vector<double> out;
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i)
    out.push_back(eigdetail::pair_residual(fp.K, fp.M, result.eigenvectors.col(i),
                                           result.eigenvalues[i]));
  return out;
}

}  // namespace rpwg
