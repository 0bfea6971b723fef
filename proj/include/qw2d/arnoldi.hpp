#pragma once
#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

#include "qw2d/lattice.hpp"

namespace qw {

struct EigsResult {
  Eigen::VectorXcd values;        // ordered by distance to sigma
  Eigen::MatrixXcd vectors;       // unit-norm columns
  std::vector<double> residuals;  // ||A x - lambda x|| per pair
};

// k eigenpairs of sparse A nearest sigma: Arnoldi iteration on
// (A - sigma I)^{-1} with a sparse LU factorization, full
// reorthogonalization, and direct residual verification. Throws when
// fewer than k pairs converge; raise `subspace` (default 2k + 20) then.
EigsResult shift_invert_eigs(const Eigen::SparseMatrix<cplx>& a, int k,
                             cplx sigma, int subspace = 0, double tol = 1e-9,
                             std::uint64_t seed = 1);

}  // namespace qw
