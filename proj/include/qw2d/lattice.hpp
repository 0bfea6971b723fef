#pragma once
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qw {

using cplx = std::complex<double>;

// Spin component order is (+1, -1) everywhere; index 0 is spin +1.
constexpr int kSpinUp = 0;
constexpr int kSpinDown = 1;

struct Site {
  int x = 0;
  int y = 0;
  int s = +1;  // in {+1, -1}
};

// Unit cell of the 45-degree rotated lattice. A cell (n+, n-) is the
// vertical site pair {(n+ - n-, n+ + n-), (n+ - n-, n+ + n- + 1)}.
struct RotatedCell {
  int n_plus = 0;
  int n_minus = 0;
  int s = +1;
};

enum class Basis { original, rotated_square, rotated_circle };

enum class BcKind { periodic, absorbing };

struct BoundaryCondition {
  BcKind axis1 = BcKind::periodic;  // x or n_plus
  BcKind axis2 = BcKind::periodic;  // y or n_minus
  double accumulated_loss = 0.0;    // p_leave: probability removed so far

  static BoundaryCondition periodic() { return {}; }
  static BoundaryCondition absorbing() {
    return {BcKind::absorbing, BcKind::absorbing, 0.0};
  }
};

// Two-component wavefunction over a finite rectangular region.
// Layout is cell-major, spin-minor: amp[2*(i1 + l1*i2) + spin], with i1
// the x (or n_plus) index running fastest. This layout is fixed so CSV
// dumps are bit-stable across runs with equal seeds.
struct SpinorField {
  Basis basis = Basis::original;
  int l1 = 0;  // L_x or L_plus
  int l2 = 0;  // L_y or L_minus
  std::vector<cplx> amp;

  SpinorField() = default;
  SpinorField(Basis b, int n1, int n2)
      : basis(b), l1(n1), l2(n2), amp(2 * static_cast<size_t>(n1) * n2) {}

  size_t idx(int i1, int i2, int spin) const {
    return 2 * (static_cast<size_t>(i2) * l1 + i1) + spin;
  }
  cplx& at(int i1, int i2, int spin) { return amp[idx(i1, i2, spin)]; }
  const cplx& at(int i1, int i2, int spin) const { return amp[idx(i1, i2, spin)]; }

  double norm2() const {
    double s = 0.0;
    for (const cplx& a : amp) s += std::norm(a);
    return s;
  }
};

// Per-site coin parameters (radians), one value per site for each of the
// two substeps plus the final phase.
struct FixedAngles {
  double theta1 = 0, theta2 = 0;
  double alpha1 = 0, alpha2 = 0, beta1 = 0, beta2 = 0;
};

struct CoinField {
  int l1 = 0;
  int l2 = 0;
  std::vector<double> theta1, theta2, alpha1, alpha2, beta1, beta2, phi;

  CoinField() = default;
  CoinField(int n1, int n2)
      : l1(n1), l2(n2),
        theta1(static_cast<size_t>(n1) * n2, 0.0), theta2(theta1),
        alpha1(theta1), alpha2(theta1), beta1(theta1), beta2(theta1),
        phi(theta1) {}

  static CoinField constant(int n1, int n2, const FixedAngles& a);

  size_t at(int i1, int i2) const {
    return static_cast<size_t>(i2) * l1 + i1;
  }
  size_t size() const { return theta1.size(); }
};

// Coin rotation R = exp(-i beta sigma_z) exp(-i theta sigma_y) exp(-i alpha sigma_z).
Eigen::Matrix2cd coin_matrix(double alpha, double beta, double theta);

// Compiled form of (coins, basis): per-site 2x2 coin entries and phase
// factors, precomputed once so stepping loops carry no trig cost.
struct StepOp {
  Basis basis = Basis::original;
  int l1 = 0;
  int l2 = 0;
  std::vector<cplx> r1;  // 4 entries per site: (00, 01, 10, 11)
  std::vector<cplx> r2;
  std::vector<cplx> f;   // exp(i phi)
  int y_shift_skip_column = -1;  // lead column: S_y omitted there
};

StepOp compile_step(const CoinField& coins, Basis basis);

// One walk period U = F S_y R2 S_x R1 on the original basis, in place.
// With periodic bc the norm is preserved; with absorbing bc the outermost
// frame along absorbing axes is zeroed at the end of the full step and the
// removed weight is added to bc.accumulated_loss.
void apply_timestep(SpinorField& psi, const CoinField& coins,
                    BoundaryCondition& bc);
void apply_timestep(SpinorField& psi, const StepOp& op, BoundaryCondition& bc);

// One period of the rotated-basis walk (square or circle sublattice),
// acting on per-cell amplitudes; coins are indexed by unit cell and substep.
void apply_timestep_rotated(SpinorField& psi, const CoinField& coins,
                            BoundaryCondition& bc);

// Multiplies amplitudes by +1 on even-x sites and -1 on odd-x sites.
void sublattice_conjugate(SpinorField& psi);

enum class ChiralOp { sigma_x, sigma_y, none };

struct ChiralCheck {
  bool chiral = false;
  ChiralOp op = ChiralOp::none;
};

// True iff phi = 0, alpha2 = beta1, alpha1 = beta2 everywhere (within tol)
// and theta1 = theta2 + n*pi (sigma_x) or theta1 = -theta2 + n*pi (sigma_y).
// Reports sigma_x when both theta conditions hold.
ChiralCheck is_chiral_symmetric(const CoinField& coins, double tol);

inline constexpr int kDenseDimCap = 16384;

// Dense matrix of one periodic-bc timestep; columns are apply_timestep
// applied to basis vectors. Throws when 2*l1*l2 exceeds the cap.
Eigen::MatrixXcd dense_build(const CoinField& coins, Basis basis,
                             int cap = kDenseDimCap);
Eigen::MatrixXcd dense_build(const StepOp& op, int cap = kDenseDimCap);

// Mapping between a rotated-basis block and a region of the original
// lattice. Cell (n+, n-) with intra-cell position a in {0, 1} sits at
// site (x0 + n+ - n-, y0 + n+ + n- + a); square-walk amplitudes live at
// a = 0, circle-walk amplitudes at a = 1. x0 + y0 must be even.
struct Embedding {
  int x0 = 0;
  int y0 = 0;
  int lx = 0;  // extents of the original-basis region
  int ly = 0;
};

SpinorField embed_rotated_state(const SpinorField& rot, const Embedding& e);
SpinorField extract_rotated_state(const SpinorField& orig, Basis rotated_basis,
                                  int l_plus, int l_minus, const Embedding& e);
CoinField embed_rotated_coins(const CoinField& cell_coins, Basis rotated_basis,
                              const Embedding& e);

// CSV field dump, header `n_plus,n_minus,re_up,im_up,re_down,im_down`
// (rotated) or `x,y,...` (original); full double precision.
void write_field_csv(const SpinorField& psi, const std::string& path);

inline int modulo(int a, int b) { return ((a % b) + b) % b; }

}  // namespace qw
