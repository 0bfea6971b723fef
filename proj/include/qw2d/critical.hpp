#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "qw2d/disorder.hpp"
#include "qw2d/evolve.hpp"
#include "qw2d/lattice.hpp"

namespace qw {

// Sparse one-step operator of the square walk in the SpinorField layout;
// every column holds exactly four entries. Matches dense_build entrywise.
Eigen::SparseMatrix<cplx> sparse_step_square(const CoinField& coins);

// Spin-summed probability of a degenerate eigenstate pair (Psi, U Psi)
// of the square walk, per rotated cell.
struct EigenstateDistribution {
  int l1 = 0, l2 = 0;
  double eps = 0;  // quasienergy of the pair
  std::uint64_t seed = 0;
  std::vector<double> p;

  size_t at(int i1, int i2) const { return static_cast<size_t>(i2) * l1 + i1; }
};

// Shift-invert diagonalization of the even-cell block of U^2 near the
// target quasienergy; each block eigenvector is paired with its U image.
// Seeds advance per realization until `count` states are collected.
std::vector<EigenstateDistribution> eigenstate_distributions(
    const DisorderSpec& spec, int l1, int l2, int count,
    double target_eps = 0.0, int per_realization = 10, int workers = 1);

// R(r) = sum p(n+, n-) p((n+ + r) mod L+, n-); r in [0, L+).
std::vector<double> autocorrelation(const EigenstateDistribution& dist,
                                    const std::vector<int>& r_values);

// <p^2(l)> = (l^2 / (L+ L-)) * sum of squared box sums, boxes of side l;
// l must divide both extents.
double coarse_grain_moment(const EigenstateDistribution& dist, int l);

// Raw measured series: one row per sample (state or realization), one
// column per grid value (r, l, or t).
struct SeriesTable {
  std::vector<double> grid;
  std::vector<std::vector<double>> rows;
};

SeriesTable autocorrelation_table(
    const std::vector<EigenstateDistribution>& states,
    const std::vector<int>& r_values);
SeriesTable fractal_table(const std::vector<EigenstateDistribution>& states,
                          const std::vector<int>& l_values);
// Return probabilities at the given times (occupied parity: even t),
// one row per disorder realization, seeds spec.seed + i.
SeriesTable return_table(const DisorderSpec& spec, int realizations, int l1,
                         int l2, const std::vector<int>& times,
                         const EvolveOptions& opt = {});

enum class EtaMethod { autocorrelation, fractal, return_probability };

struct EtaEstimate {
  EtaMethod method = EtaMethod::autocorrelation;
  double eta = 0, ci = 0;  // ci = 3 sigma half-width
  double slope = 0, slope_se = 0, r2 = 0;
  int n_samples = 0;
  std::vector<double> grid, mean_log;  // retained fit points
};

struct EtaFitOptions {
  bool mean_of_logs = true;      // vs log of row means
  int drop_smallest = 2;         // smallest grid values dropped (r and l)
  double r_max_fraction = 0.25;  // autocorrelation: omit r > L+ * fraction
  double t_min = 16;             // return: fit only t >= t_min
};

// ln R ~ -eta ln r over the retained window.
EtaEstimate eta_from_autocorrelation(const SeriesTable& table, int l_plus,
                                     const EtaFitOptions& opt = {});
// ln <p^2(l)> ~ (4 - eta) ln l.
EtaEstimate eta_from_fractal(const SeriesTable& table,
                             const EtaFitOptions& opt = {});
// ln p0(t) ~ (-1 + eta/2) ln t.
EtaEstimate eta_from_return(const SeriesTable& table,
                            const EtaFitOptions& opt = {});

// Rows `col_grid,col_value` with value = ln(raw); samples concatenated,
// nonpositive raw values skipped.
void write_series_csv(const SeriesTable& table, const std::string& col_grid,
                      const std::string& col_value, const std::string& path);
// Rows `method,eta,ci,slope,slope_err,n_samples`.
void write_eta_csv(const std::vector<EtaEstimate>& estimates,
                   const std::string& path);

std::string to_string(EtaMethod m);

}  // namespace qw
