#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "qw2d/lattice.hpp"

namespace qw {

// One-parity sublattice blocks of U^2: square-walk cells with even
// (n+ + n-) sit on (e,e) sites of the original lattice, odd on (o,o);
// circle-walk cells map to (e,o) and (o,e).
enum class SpacingBlock { square_ee, square_oo, circle_eo, circle_oe };

inline constexpr int kSpectralDimCap = 8192;

// Dense N x N matrix of U^2 restricted to the chosen parity class,
// N = l1 * l2 (cell extents must be even). Columns are two applications
// of the compiled step to parity-supported basis vectors.
Eigen::MatrixXcd build_u2_block(const CoinField& coins, SpacingBlock block,
                                int cap = kSpectralDimCap, int workers = 1);

// Eigenvalues of a general complex matrix (LAPACK zgeev; input by value).
Eigen::VectorXcd eigenvalues_dense(Eigen::MatrixXcd a);

struct SpacingEnsemble {
  SpacingBlock block = SpacingBlock::square_ee;
  int n_block = 0;          // N of the source block
  std::vector<double> eps;  // folded quasienergies in [0, pi), ascending
  std::vector<double> s;    // normalized spacings, mean exactly 1
};

// eps_j = (-arg(lambda_j) / 2) mod pi, sorted; consecutive differences
// plus the wrap-around spacing, normalized by N / pi.
SpacingEnsemble spacings_from_block(const Eigen::VectorXcd& lambda,
                                    SpacingBlock block,
                                    double unit_tol = 1e-8);

enum class RefKind { poisson, gue };

// poisson: e^{-s}; gue: (32/pi^2) s^2 e^{-4 s^2 / pi}.
double reference_pdf(RefKind kind, double s);
double reference_cdf(RefKind kind, double s);

// i.i.d. draws from a reference density (inverse CDF), for round-trips.
std::vector<double> sample_reference(RefKind kind, size_t n,
                                     std::uint64_t seed);

enum class SpectralClass { poisson, gue, ambiguous };

struct ClassifyResult {
  double ks_poisson = 0, ks_gue = 0;
  SpectralClass label = SpectralClass::ambiguous;
};

// KS distance to both references; the smaller wins unless they differ by
// less than the margin. Requires >= 500 samples.
ClassifyResult classify_statistics(const std::vector<double>& s,
                                   double margin = 0.01);

struct TailFit {
  double rate = 0, rate_se = 0;       // -slope of ln survival vs s
  double curvature = 0, curvature_se = 0;
  bool exponential = false;  // curvature above -2/pi (GUE gives -4/pi)
  int n_tail = 0;
};

// Log-linear fit of the empirical survival function above s_min with a
// quadratic curvature check. Requires >= 50 tail samples.
TailFit tail_analysis(const std::vector<double>& s, double s_min = 2.5);

// One `s` value per line.
void write_spacings_csv(const std::vector<double>& s, const std::string& path);

std::string to_string(SpacingBlock b);
std::string to_string(SpectralClass c);
std::string to_string(RefKind k);

}  // namespace qw
