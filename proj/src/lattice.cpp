#include "qw2d/lattice.hpp"

#include "qw2d/plane.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qw {

CoinField CoinField::constant(int n1, int n2, const FixedAngles& a) {
  CoinField c(n1, n2);
  std::fill(c.theta1.begin(), c.theta1.end(), a.theta1);
  std::fill(c.theta2.begin(), c.theta2.end(), a.theta2);
  std::fill(c.alpha1.begin(), c.alpha1.end(), a.alpha1);
  std::fill(c.alpha2.begin(), c.alpha2.end(), a.alpha2);
  std::fill(c.beta1.begin(), c.beta1.end(), a.beta1);
  std::fill(c.beta2.begin(), c.beta2.end(), a.beta2);
  return c;
}

Eigen::Matrix2cd coin_matrix(double alpha, double beta, double theta) {
  const cplx epb = std::polar(1.0, -(alpha + beta));
  const cplx emb = std::polar(1.0, alpha - beta);
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2cd r;
  r << epb * c, -emb * s,
       std::conj(emb) * s, std::conj(epb) * c;
  return r;
}

StepOp compile_step(const CoinField& coins, Basis basis) {
  StepOp op;
  op.basis = basis;
  op.l1 = coins.l1;
  op.l2 = coins.l2;
  const size_t n = coins.size();
  op.r1.resize(4 * n);
  op.r2.resize(4 * n);
  op.f.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Eigen::Matrix2cd m = coin_matrix(coins.alpha1[i], coins.beta1[i], coins.theta1[i]);
    op.r1[4 * i + 0] = m(0, 0);
    op.r1[4 * i + 1] = m(0, 1);
    op.r1[4 * i + 2] = m(1, 0);
    op.r1[4 * i + 3] = m(1, 1);
    m = coin_matrix(coins.alpha2[i], coins.beta2[i], coins.theta2[i]);
    op.r2[4 * i + 0] = m(0, 0);
    op.r2[4 * i + 1] = m(0, 1);
    op.r2[4 * i + 2] = m(1, 0);
    op.r2[4 * i + 3] = m(1, 1);
    op.f[i] = std::polar(1.0, coins.phi[i]);
  }
  return op;
}

namespace {

void coin_sweep(SpinorField& psi, const std::vector<cplx>& r) {
  const size_t n = psi.amp.size() / 2;
  for (size_t i = 0; i < n; ++i) {
    const cplx u = psi.amp[2 * i];
    const cplx d = psi.amp[2 * i + 1];
    psi.amp[2 * i] = r[4 * i + 0] * u + r[4 * i + 1] * d;
    psi.amp[2 * i + 1] = r[4 * i + 2] * u + r[4 * i + 3] * d;
  }
}

void phase_sweep(SpinorField& psi, const std::vector<cplx>& f) {
  const size_t n = psi.amp.size() / 2;
  for (size_t i = 0; i < n; ++i) {
    psi.amp[2 * i] *= f[i];
    psi.amp[2 * i + 1] *= f[i];
  }
}

void shift_axis1(SpinorField& psi, int spin, int dir) {
  plane::shift_axis1(psi.amp.data(), psi.l1, psi.l2, spin, dir);
}

void shift_axis2(SpinorField& psi, int spin, int dir, int skip_column) {
  plane::shift_axis2(psi.amp.data(), psi.l1, psi.l2, spin, dir, skip_column);
}

void absorb_frame(SpinorField& psi, BoundaryCondition& bc) {
  const int l1 = psi.l1, l2 = psi.l2;
  double lost = 0.0;
  auto zero_site = [&](int i1, int i2) {
    for (int sp = 0; sp < 2; ++sp) {
      cplx& a = psi.at(i1, i2, sp);
      lost += std::norm(a);
      a = 0.0;
    }
  };
  if (bc.axis1 == BcKind::absorbing) {
    for (int i2 = 0; i2 < l2; ++i2) {
      zero_site(0, i2);
      if (l1 > 1) zero_site(l1 - 1, i2);
    }
  }
  if (bc.axis2 == BcKind::absorbing) {
    const int lo = bc.axis1 == BcKind::absorbing ? 1 : 0;
    const int hi = bc.axis1 == BcKind::absorbing ? l1 - 1 : l1;
    for (int i1 = lo; i1 < hi; ++i1) {
      zero_site(i1, 0);
      if (l2 > 1) zero_site(i1, l2 - 1);
    }
  }
  bc.accumulated_loss += lost;
}

void check_extents(const SpinorField& psi, const StepOp& op) {
  if (psi.l1 != op.l1 || psi.l2 != op.l2)
    throw std::runtime_error("apply_timestep: coin extents do not match state");
  if (psi.basis != op.basis)
    throw std::runtime_error("apply_timestep: state basis does not match step");
}

}  // namespace

void apply_timestep(SpinorField& psi, const StepOp& op, BoundaryCondition& bc) {
  check_extents(psi, op);
  switch (op.basis) {
    case Basis::original:
      coin_sweep(psi, op.r1);
      shift_axis1(psi, kSpinUp, +1);   // S_x: x -> x + s
      shift_axis1(psi, kSpinDown, -1);
      coin_sweep(psi, op.r2);
      shift_axis2(psi, kSpinUp, +1, op.y_shift_skip_column);  // S_y: y -> y + s
      shift_axis2(psi, kSpinDown, -1, op.y_shift_skip_column);
      break;
    case Basis::rotated_square:
      coin_sweep(psi, op.r1);
      // S_1: up to (n+, n- - 1), down to (n+ - 1, n-)
      shift_axis2(psi, kSpinUp, -1, -1);
      shift_axis1(psi, kSpinDown, -1);
      coin_sweep(psi, op.r2);
      // S_2: up to (n+ + 1, n- + 1), down stays
      shift_axis1(psi, kSpinUp, +1);
      shift_axis2(psi, kSpinUp, +1, -1);
      break;
    case Basis::rotated_circle:
      coin_sweep(psi, op.r1);
      // S_1: up to (n+ + 1, n-), down to (n+, n- + 1)
      shift_axis1(psi, kSpinUp, +1);
      shift_axis2(psi, kSpinDown, +1, -1);
      coin_sweep(psi, op.r2);
      // S_2: up stays, down to (n+ - 1, n- - 1)
      shift_axis1(psi, kSpinDown, -1);
      shift_axis2(psi, kSpinDown, -1, -1);
      break;
  }
  phase_sweep(psi, op.f);
  if (bc.axis1 == BcKind::absorbing || bc.axis2 == BcKind::absorbing)
    absorb_frame(psi, bc);
}

void apply_timestep(SpinorField& psi, const CoinField& coins,
                    BoundaryCondition& bc) {
  if (psi.basis != Basis::original)
    throw std::runtime_error("apply_timestep: state not in the original basis");
  apply_timestep(psi, compile_step(coins, Basis::original), bc);
}

void apply_timestep_rotated(SpinorField& psi, const CoinField& coins,
                            BoundaryCondition& bc) {
  if (psi.basis == Basis::original)
    throw std::runtime_error("apply_timestep_rotated: state not in a rotated basis");
  apply_timestep(psi, compile_step(coins, psi.basis), bc);
}

void sublattice_conjugate(SpinorField& psi) {
  for (int i2 = 0; i2 < psi.l2; ++i2)
    for (int i1 = 1; i1 < psi.l1; i1 += 2)
      for (int sp = 0; sp < 2; ++sp) psi.at(i1, i2, sp) = -psi.at(i1, i2, sp);
}

namespace {

// Distance to the nearest multiple of pi.
double dist_mod_pi(double v) {
  const double r = v - M_PI * std::round(v / M_PI);
  return std::abs(r);
}

}  // namespace

ChiralCheck is_chiral_symmetric(const CoinField& coins, double tol) {
  bool sx = true, sy = true;
  for (size_t i = 0; i < coins.size(); ++i) {
    if (std::abs(coins.phi[i]) > tol ||
        std::abs(coins.alpha2[i] - coins.beta1[i]) > tol ||
        std::abs(coins.alpha1[i] - coins.beta2[i]) > tol)
      return {false, ChiralOp::none};
    if (dist_mod_pi(coins.theta1[i] - coins.theta2[i]) > tol) sx = false;
    if (dist_mod_pi(coins.theta1[i] + coins.theta2[i]) > tol) sy = false;
    if (!sx && !sy) return {false, ChiralOp::none};
  }
  if (sx) return {true, ChiralOp::sigma_x};
  return {true, ChiralOp::sigma_y};
}

Eigen::MatrixXcd dense_build(const CoinField& coins, Basis basis, int cap) {
  return dense_build(compile_step(coins, basis), cap);
}

Eigen::MatrixXcd dense_build(const StepOp& op, int cap) {
  const long dim = 2L * op.l1 * op.l2;
  if (dim > cap)
    throw std::runtime_error("dense_build: state dimension exceeds cap");
  Eigen::MatrixXcd u(dim, dim);
  SpinorField psi(op.basis, op.l1, op.l2);
  for (long k = 0; k < dim; ++k) {
    std::fill(psi.amp.begin(), psi.amp.end(), cplx(0.0));
    psi.amp[k] = 1.0;
    BoundaryCondition bc = BoundaryCondition::periodic();
    apply_timestep(psi, op, bc);
    for (long j = 0; j < dim; ++j) u(j, k) = psi.amp[j];
  }
  return u;
}

SpinorField embed_rotated_state(const SpinorField& rot, const Embedding& e) {
  if (rot.basis == Basis::original)
    throw std::runtime_error("embed_rotated_state: input already original basis");
  if (modulo(e.x0 + e.y0, 2) != 0)
    throw std::runtime_error("embed_rotated_state: x0 + y0 must be even");
  const int a = rot.basis == Basis::rotated_square ? 0 : 1;
  SpinorField out(Basis::original, e.lx, e.ly);
  for (int nm = 0; nm < rot.l2; ++nm)
    for (int np = 0; np < rot.l1; ++np) {
      const int x = modulo(e.x0 + np - nm, e.lx);
      const int y = modulo(e.y0 + np + nm + a, e.ly);
      for (int sp = 0; sp < 2; ++sp) out.at(x, y, sp) = rot.at(np, nm, sp);
    }
  return out;
}

SpinorField extract_rotated_state(const SpinorField& orig, Basis rotated_basis,
                                  int l_plus, int l_minus, const Embedding& e) {
  const int a = rotated_basis == Basis::rotated_square ? 0 : 1;
  SpinorField out(rotated_basis, l_plus, l_minus);
  for (int nm = 0; nm < l_minus; ++nm)
    for (int np = 0; np < l_plus; ++np) {
      const int x = modulo(e.x0 + np - nm, e.lx);
      const int y = modulo(e.y0 + np + nm + a, e.ly);
      for (int sp = 0; sp < 2; ++sp) out.at(np, nm, sp) = orig.at(x, y, sp);
    }
  return out;
}

CoinField embed_rotated_coins(const CoinField& cell_coins, Basis rotated_basis,
                              const Embedding& e) {
  // Substep 1 acts where the walker starts (a for square = 0, circle = 1),
  // substep 2 at the intermediate sites (1 - a), and the phase back at a.
  const int a = rotated_basis == Basis::rotated_square ? 0 : 1;
  CoinField out(e.lx, e.ly);
  for (int nm = 0; nm < cell_coins.l2; ++nm)
    for (int np = 0; np < cell_coins.l1; ++np) {
      const size_t src = cell_coins.at(np, nm);
      const int x = modulo(e.x0 + np - nm, e.lx);
      const int y1 = modulo(e.y0 + np + nm + a, e.ly);
      const int y2 = modulo(e.y0 + np + nm + (1 - a), e.ly);
      out.theta1[out.at(x, y1)] = cell_coins.theta1[src];
      out.alpha1[out.at(x, y1)] = cell_coins.alpha1[src];
      out.beta1[out.at(x, y1)] = cell_coins.beta1[src];
      out.theta2[out.at(x, y2)] = cell_coins.theta2[src];
      out.alpha2[out.at(x, y2)] = cell_coins.alpha2[src];
      out.beta2[out.at(x, y2)] = cell_coins.beta2[src];
      out.phi[out.at(x, y1)] = cell_coins.phi[src];
    }
  return out;
}

void write_field_csv(const SpinorField& psi, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << (psi.basis == Basis::original ? "x,y" : "n_plus,n_minus")
    << ",re_up,im_up,re_down,im_down\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    f << ',' << buf;
  };
  for (int i2 = 0; i2 < psi.l2; ++i2)
    for (int i1 = 0; i1 < psi.l1; ++i1) {
      const cplx u = psi.at(i1, i2, kSpinUp), d = psi.at(i1, i2, kSpinDown);
      f << i1 << ',' << i2;
      put(u.real());
      put(u.imag());
      put(d.real());
      put(d.imag());
      f << '\n';
    }
}

}  // namespace qw
