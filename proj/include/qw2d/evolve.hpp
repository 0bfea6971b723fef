#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "qw2d/disorder.hpp"
#include "qw2d/lattice.hpp"

namespace qw {

// Spin-summed probability per rotated cell at one time.
struct PositionDistribution {
  int l1 = 0, l2 = 0;        // L_plus, L_minus
  int origin1 = 0, origin2 = 0;
  int t = 0;
  int realizations_averaged = 1;
  double p_leave = 0.0;
  std::vector<double> p;

  size_t at(int i1, int i2) const { return static_cast<size_t>(i2) * l1 + i1; }
  double total() const;
  // <x^2 + y^2> about the origin cell; x_pm = sqrt(2) n_pm.
  double variance() const;
  double rms() const { return std::sqrt(variance()); }
};

struct EvolveOptions {
  Basis variant = Basis::rotated_square;
  bool time_dependent = false;  // fresh coin fields every timestep
  bool classical = false;       // stochastic (classicalized) evolution
  int workers = 1;
};

struct EvolveResult {
  std::vector<PositionDistribution> snapshots;  // one per requested time
  double p_leave = 0.0;                         // at t_max
};

// Evolves a spin-up point source from the center cell with absorbing bc
// and records spin-summed distributions at the requested times.
EvolveResult run_point_source(const DisorderSpec& spec, int l1, int l2,
                              int t_max, const std::vector<int>& snapshot_times,
                              const EvolveOptions& opt = {});

// Disorder average with seeds seed_base + i; snapshots are averaged per
// time in fixed realization order.
EvolveResult run_ensemble(const DisorderSpec& spec, int realizations, int l1,
                          int l2, int t_max,
                          const std::vector<int>& snapshot_times,
                          const EvolveOptions& opt = {});

// Arithmetic mean of the final distributions of specs differing by seed.
PositionDistribution average_over_disorder(const std::vector<DisorderSpec>& specs,
                                           int l1, int l2, int t_max,
                                           const EvolveOptions& opt = {});

// Probability at the origin cell (spin-summed) at each requested time.
std::vector<double> return_series(const DisorderSpec& spec, int l1, int l2,
                                  const std::vector<int>& times,
                                  const EvolveOptions& opt = {});

enum class SpreadModel { localized, diffusive };

struct SpreadFit {
  SpreadModel model = SpreadModel::localized;
  double par_plus = 0, par_minus = 0;   // zeta_pm or D_pm
  double r2_plus = 0, r2_minus = 0;
  double variance_measured = 0;
  double variance_predicted = 0;  // 3(z+^2 + z-^2) or 2(D+ + D-) t
  int n_points_plus = 0, n_points_minus = 0;
};

struct FitOptions {
  // Cells closer to the origin than this (in x units) are excluded.
  double core_exclude_localized = 4.0;
  double core_exclude_diffusive = 10.0;
  // Rows within this many cells of the cut axis are folded into the
  // profile after dividing out the fitted model's off-axis decay.
  int band_halfwidth = 3;
  // Fraction of the reachable cut extent kept; the outermost cells sit
  // next to the absorbing edge and below the developed envelope.
  double r_max_fraction = 0.8;
};

// Least-squares fits of ln p along the n_- = origin (diagonal) and
// n_+ = origin (antidiagonal) cuts, using occupied-parity cells only.
// Mirror sites and near-axis rows are averaged per distance (two-pass:
// an axis-only fit supplies the off-axis correction), so a single
// realization's resonance cannot dominate the profile.
// Throws when a cut has fewer than 8 usable points.
SpreadFit fit_localized(const PositionDistribution& dist,
                        const FitOptions& opt = {});
SpreadFit fit_diffusive(const PositionDistribution& dist, int t,
                        const FitOptions& opt = {});

struct PowerLawFit {
  double exponent = 0, exponent_se = 0;
  double prefactor = 0;
  std::vector<int> t;
  std::vector<double> rms, var, p_leave;
};

// Log-log fit of RMS width vs t over the snapshots (t = 0 skipped).
PowerLawFit variance_series(const std::vector<PositionDistribution>& snapshots);

// CSV rows `t,rms,variance,p_leave`.
void write_variance_csv(const PowerLawFit& series, const std::string& path);
void write_distribution_csv(const PositionDistribution& dist,
                            const std::string& path);

}  // namespace qw
