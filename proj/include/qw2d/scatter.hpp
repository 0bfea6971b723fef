#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "qw2d/disorder.hpp"
#include "qw2d/lattice.hpp"

namespace qw {

// Reflecting cuts: A has (theta1, theta2) = (0, pi/2), invariant -1;
// B has (pi/2, 0), invariant +1.
enum class CutType { none, a, b };

// Lead + sample for transport probes. The field is (lx + 1) x ly sites
// with the ideal lead in column x = 0 (all coin parameters zero, y shift
// suppressed) and x periodic with modulus lx + 1.
struct ScatterGeometry {
  int lx = 0, ly = 0;  // sample extent; ly even
  CutType cut = CutType::none;
  int cut_row0 = -1;  // first of the two cut rows, -1 when cut == none
  StepOp op;
};

// Generates the disordered sample, overwrites two adjacent rows with the
// cut coins (alpha = beta = 0 there, phases kept), and zeroes the lead
// column. cut_row0 < 0 centers the cut.
ScatterGeometry build_geometry(const DisorderSpec& spec, int lx, int ly,
                               CutType cut = CutType::none, int cut_row0 = -1);

struct TransmissionSeries {
  int lx = 0, ly = 0, t_max = 0;
  // Entry (m, n) of element t is the amplitude read in the lead column
  // after step t (spin up = transmission, spin down = reflection) for the
  // input delta(x=0, y=n, up); index 0 is unused.
  std::vector<Eigen::MatrixXcd> transmission, reflection;
  std::vector<double> residual;  // squared norm left in the system per input
};

// Time-domain recursion: evolve each input channel, read out the lead
// column after every step, then erase it. Channels run in parallel.
TransmissionSeries transmission_series(const ScatterGeometry& geo, int t_max,
                                       int workers = 1);

struct EnergyResolved {
  std::vector<double> epsilon;          // 2 pi k / t_max
  std::vector<Eigen::MatrixXcd> t_eps;  // transmission matrix per grid point
};

// DFT of the series on the quasienergy grid, t(eps) = sum_t e^{i eps t} t(t).
EnergyResolved transmission_at_energy(const TransmissionSeries& series);

// T(eps_k) = sum_mn |t_mn(eps_k)|^2.
std::vector<double> total_transmission(const EnergyResolved& er);

// Eigenvalues of t(eps)^dag t(eps), ascending.
std::vector<double> transmission_eigenvalues(const Eigen::MatrixXcd& t_eps);

struct AveragedTransmission {
  double even = 0, odd = 0;  // totals by input-channel parity
  double total = 0;
  double min_absorbed = 1;  // worst-channel sum |t|^2 + |r|^2
  bool converged = true;    // min_absorbed >= 0.99
};

// Quasienergy average via the Parseval sum over the time series.
AveragedTransmission averaged_transmission(const TransmissionSeries& series);

struct InvariantEstimate {
  double estimate = 0;
  int nu = 0;          // nearest integer
  bool flagged = false;  // |estimate - nu| > 0.2 or unconverged totals
};

// nu = sgn(T_A - T_B) (T_A + T_B) / 2 from the two cut totals.
InvariantEstimate invariant_from_transmission(double t_a, double t_b);

// Runs cuts A and B with identical disorder and combines the totals.
InvariantEstimate measure_invariant(const DisorderSpec& spec, int lx, int ly,
                                    int t_max, int workers = 1);

struct ResolventResult {
  Eigen::MatrixXcd t, r;
  double rcond = 0;
};

// Closed form of the readout-then-erase series by dense solve:
// t(eps) = e^{i eps} <out| U (1 - e^{i eps} P_sys U)^{-1} |in>.
ResolventResult resolvent_oracle(const ScatterGeometry& geo, double epsilon,
                                 int cap = kDenseDimCap);
ResolventResult resolvent_oracle(const Eigen::MatrixXcd& u, int lx, int ly,
                                 double epsilon);

struct SizeSpec {
  int lx = 0, ly = 0, t_max = 0;
};

struct ScalingPoint {
  double theta1 = 0, theta2 = 0;
  CutType cut = CutType::none;
  int lx = 0, ly = 0;
  std::uint64_t seed = 0;
  AveragedTransmission tbar;
};

enum class ScalingClass { insulating, diffusive, undetermined };

struct ScalingResult {
  std::vector<ScalingPoint> points;  // per size, per seed
  std::vector<double> mean_total;    // seed-averaged, one per size
  double slope = 0;                  // d ln T-bar / d L_x
  ScalingClass classification = ScalingClass::undetermined;
};

// Disorder-averaged T-bar across sizes of fixed aspect; insulating means
// the mean total drops by >= 3x first-to-last, diffusive <= 1.2x.
ScalingResult scaling_sweep(const DisorderSpec& spec,
                            const std::vector<SizeSpec>& sizes, int n_seeds,
                            CutType cut, int workers = 1);

// Rows `theta1,theta2,cut,L_x,L_y,seed,T_even,T_odd,T_total`.
void write_scaling_csv(const ScalingResult& r, const std::string& path);
// Rows `epsilon,T`.
void write_energy_csv(const EnergyResolved& er, const std::string& path);

std::string to_string(CutType c);

}  // namespace qw
