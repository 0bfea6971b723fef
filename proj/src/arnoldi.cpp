#include "qw2d/arnoldi.hpp"

#include "qw2d/rng.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <stdexcept>

namespace qw {

EigsResult shift_invert_eigs(const Eigen::SparseMatrix<cplx>& a, int k,
                             cplx sigma, int subspace, double tol,
                             std::uint64_t seed) {
  const long n = a.rows();
  if (a.cols() != n) throw std::runtime_error("shift_invert_eigs: not square");
  if (k < 1 || k >= n) throw std::runtime_error("shift_invert_eigs: bad k");
  // Interior clusters of large operators need a deep Krylov space; the
  // cap keeps small problems at (near) full dimension where the solve is
  // exact anyway.
  long m = subspace > 0 ? subspace : std::max(2L * k + 20, 250L);
  m = std::min(m, n - 1);
  if (m < k) throw std::runtime_error("shift_invert_eigs: subspace too small");

  Eigen::SparseMatrix<cplx> id(n, n);
  id.setIdentity();
  Eigen::SparseMatrix<cplx> shifted = a - sigma * id;
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("shift_invert_eigs: factorization failed");

  Eigen::MatrixXcd v(n, m + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
  for (long i = 0; i < n; ++i)
    v(i, 0) = cplx(u01(key_hash(seed, i, 0xa11, 0)) - 0.5,
                   u01(key_hash(seed, i, 0xa11, 1)) - 0.5);
  v.col(0).normalize();

  long steps = m;
  for (long j = 0; j < m; ++j) {
    Eigen::VectorXcd w = lu.solve(v.col(j));
    for (int pass = 0; pass < 2; ++pass)
      for (long i = 0; i <= j; ++i) {
        const cplx c = v.col(i).dot(w);
        w -= c * v.col(i);
        h(i, j) += c;
      }
    h(j + 1, j) = w.norm();
    if (std::abs(h(j + 1, j)) < 1e-12) {  // invariant subspace reached
      steps = j + 1;
      break;
    }
    v.col(j + 1) = w / h(j + 1, j);
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(
      h.topLeftCorner(steps, steps));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("shift_invert_eigs: Hessenberg solve failed");
  std::vector<long> order(steps);
  for (long i = 0; i < steps; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](long x, long y) {
    return std::abs(es.eigenvalues()[x]) > std::abs(es.eigenvalues()[y]);
  });

  EigsResult out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  const double tail = std::abs(h(steps, steps - 1));
  int found = 0;
  for (long idx : order) {
    if (found == k) break;
    const cplx mu = es.eigenvalues()[idx];
    if (std::abs(mu) < 1e-300) continue;
    const Eigen::VectorXcd y = es.eigenvectors().col(idx);
    // Ritz residual of the inverse operator, scaled back to A.
    if (tail * std::abs(y[steps - 1]) > tol * std::abs(mu)) continue;
    Eigen::VectorXcd x = v.leftCols(steps) * y;
    x.normalize();
    const cplx lambda = sigma + 1.0 / mu;
    const double res = (a * x - lambda * x).norm();
    if (res > 100 * tol) continue;
    out.values[found] = lambda;
    out.vectors.col(found) = x;
    out.residuals.push_back(res);
    ++found;
  }
  if (found < k)
    throw std::runtime_error("shift_invert_eigs: only " +
                             std::to_string(found) + " of " +
                             std::to_string(k) + " pairs converged");
  return out;
}

}  // namespace qw
