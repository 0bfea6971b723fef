#include <doctest.h>

#include <cmath>
#include <complex>

#include "qw2d/disorder.hpp"
#include "qw2d/lattice.hpp"
#include "qw2d/plane.hpp"
#include "qw2d/rng.hpp"

using namespace qw;

namespace {

const cplx kI(0.0, 1.0);

SpinorField random_state(Basis basis, int l1, int l2, std::uint64_t seed) {
  SpinorField psi(basis, l1, l2);
  for (size_t k = 0; k < psi.amp.size(); ++k)
    psi.amp[k] = cplx(u01(key_hash(seed, k, 1)) - 0.5,
                      u01(key_hash(seed, k, 2)) - 0.5);
  const double n = std::sqrt(psi.norm2());
  for (cplx& a : psi.amp) a /= n;
  return psi;
}

double max_abs_diff(const SpinorField& a, const SpinorField& b) {
  double m = 0;
  for (size_t k = 0; k < a.amp.size(); ++k)
    m = std::max(m, std::abs(a.amp[k] - b.amp[k]));
  return m;
}

}  // namespace

TEST_CASE("coin matrix closed forms") {
  const Eigen::Matrix2cd id = coin_matrix(0, 0, 0);
  CHECK(std::abs(id(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(id(0, 1)) < 1e-15);
  CHECK(std::abs(id(1, 0)) < 1e-15);
  CHECK(std::abs(id(1, 1) - 1.0) < 1e-15);

  const Eigen::Matrix2cd q = coin_matrix(0, 0, M_PI / 2);
  CHECK(std::abs(q(0, 0)) < 1e-15);
  CHECK(std::abs(q(0, 1) + 1.0) < 1e-15);
  CHECK(std::abs(q(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(q(1, 1)) < 1e-15);

  const double a = 0.3, b = -0.7, th = 1.1;
  const Eigen::Matrix2cd r = coin_matrix(a, b, th);
  CHECK(std::abs(r(0, 0) - std::exp(-kI * (a + b)) * std::cos(th)) < 1e-15);
  CHECK(std::abs(r(0, 1) + std::exp(kI * (a - b)) * std::sin(th)) < 1e-15);
  CHECK(std::abs(r(1, 0) - std::exp(-kI * (a - b)) * std::sin(th)) < 1e-15);
  CHECK(std::abs(r(1, 1) - std::exp(kI * (a + b)) * std::cos(th)) < 1e-15);
  CHECK((r.adjoint() * r - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK(std::abs(r.determinant() - 1.0) < 1e-15);  // SU(2)
}

TEST_CASE("zero coins reduce the original-basis step to bare shifts") {
  const CoinField coins(8, 8);
  BoundaryCondition bc;

  SpinorField up(Basis::original, 8, 8);
  up.at(2, 3, kSpinUp) = 1.0;
  apply_timestep(up, coins, bc);
  CHECK(std::abs(up.at(3, 4, kSpinUp) - 1.0) < 1e-15);
  CHECK(up.norm2() == doctest::Approx(1.0).epsilon(1e-14));

  SpinorField dn(Basis::original, 8, 8);
  dn.at(2, 3, kSpinDown) = 1.0;
  apply_timestep(dn, coins, bc);
  CHECK(std::abs(dn.at(1, 2, kSpinDown) - 1.0) < 1e-15);
}

TEST_CASE("zero-coin displacements in the rotated bases") {
  const CoinField coins(8, 8);
  BoundaryCondition bc;

  SpinorField sq_up(Basis::rotated_square, 8, 8);
  sq_up.at(4, 4, kSpinUp) = 1.0;
  apply_timestep(sq_up, compile_step(coins, Basis::rotated_square), bc);
  CHECK(std::abs(sq_up.at(5, 4, kSpinUp) - 1.0) < 1e-15);

  SpinorField sq_dn(Basis::rotated_square, 8, 8);
  sq_dn.at(4, 4, kSpinDown) = 1.0;
  apply_timestep(sq_dn, compile_step(coins, Basis::rotated_square), bc);
  CHECK(std::abs(sq_dn.at(3, 4, kSpinDown) - 1.0) < 1e-15);

  SpinorField ci_up(Basis::rotated_circle, 8, 8);
  ci_up.at(4, 4, kSpinUp) = 1.0;
  apply_timestep(ci_up, compile_step(coins, Basis::rotated_circle), bc);
  CHECK(std::abs(ci_up.at(5, 4, kSpinUp) - 1.0) < 1e-15);

  SpinorField ci_dn(Basis::rotated_circle, 8, 8);
  ci_dn.at(4, 4, kSpinDown) = 1.0;
  apply_timestep(ci_dn, compile_step(coins, Basis::rotated_circle), bc);
  CHECK(std::abs(ci_dn.at(3, 4, kSpinDown) - 1.0) < 1e-15);
}

TEST_CASE("theta = pi/2 routes through the crossed arm with the SU(2) sign") {
  FixedAngles ang;
  ang.theta1 = M_PI / 2;
  ang.theta2 = M_PI / 2;
  const CoinField coins = CoinField::constant(8, 8, ang);
  const StepOp op = compile_step(coins, Basis::rotated_square);
  BoundaryCondition bc;

  // up: R1 flips to down (+1), S1 to (n+ - 1, n-), R2 flips back (-1),
  // S2 moves the up spinor to (n+, n- + 1).
  SpinorField up(Basis::rotated_square, 8, 8);
  up.at(4, 4, kSpinUp) = 1.0;
  apply_timestep(up, op, bc);
  CHECK(std::abs(up.at(4, 5, kSpinUp) + 1.0) < 1e-15);

  SpinorField dn(Basis::rotated_square, 8, 8);
  dn.at(4, 4, kSpinDown) = 1.0;
  apply_timestep(dn, op, bc);
  CHECK(std::abs(dn.at(4, 3, kSpinDown) + 1.0) < 1e-15);
}

TEST_CASE("periodic steps preserve the norm") {
  for (Basis basis :
       {Basis::original, Basis::rotated_square, Basis::rotated_circle}) {
    const CoinField coins = gen_haar(6, 6, 11);
    const StepOp op = compile_step(coins, basis);
    SpinorField psi = random_state(basis, 6, 6, 3);
    BoundaryCondition bc;
    for (int t = 0; t < 5; ++t) apply_timestep(psi, op, bc);
    CHECK(std::abs(psi.norm2() - 1.0) < 1e-12);
  }
}

TEST_CASE("sublattice operator anticommutes with the original-basis step") {
  const CoinField coins = gen_haar(6, 6, 21);
  BoundaryCondition bc;
  SpinorField psi = random_state(Basis::original, 6, 6, 5);

  SpinorField lhs = psi;  // Gamma U Gamma psi
  sublattice_conjugate(lhs);
  apply_timestep(lhs, coins, bc);
  sublattice_conjugate(lhs);

  SpinorField rhs = psi;  // -U psi
  apply_timestep(rhs, coins, bc);
  for (cplx& a : rhs.amp) a = -a;

  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("spectrum pairs eigenvalues at eps and eps + pi") {
  const CoinField coins = gen_haar(4, 4, 31);
  const Eigen::MatrixXcd u = dense_build(coins, Basis::original);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  // Gamma U Gamma = -U makes the eigenvalue set symmetric under negation,
  // which is exactly the eps -> eps + pi pairing.
  std::vector<bool> used(ev.size(), false);
  for (long i = 0; i < ev.size(); ++i) {
    double best = 1e9;
    long match = -1;
    for (long j = 0; j < ev.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(ev(i) + ev(j));
      if (d < best) {
        best = d;
        match = j;
      }
    }
    REQUIRE(match >= 0);
    used[match] = true;
    CHECK(best < 1e-10);
  }
}

TEST_CASE("dense builds are unitary in every basis") {
  for (Basis basis :
       {Basis::original, Basis::rotated_square, Basis::rotated_circle}) {
    const CoinField coins = gen_haar(4, 4, 41);
    const Eigen::MatrixXcd u = dense_build(coins, basis);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("dense build respects the cap") {
  const CoinField coins(128, 128);
  CHECK_THROWS(dense_build(coins, Basis::rotated_square, 1024));
}

TEST_CASE("chiral symmetry detection") {
  FixedAngles ang;
  ang.alpha2 = 0.2;
  ang.beta1 = 0.2;
  ang.alpha1 = -0.4;
  ang.beta2 = -0.4;
  ang.theta1 = 0.3;
  ang.theta2 = 0.3;
  ChiralCheck c = is_chiral_symmetric(CoinField::constant(5, 5, ang), 1e-12);
  CHECK(c.chiral);
  CHECK(c.op == ChiralOp::sigma_x);

  ang.theta2 = -0.3;
  c = is_chiral_symmetric(CoinField::constant(5, 5, ang), 1e-12);
  CHECK(c.chiral);
  CHECK(c.op == ChiralOp::sigma_y);

  CoinField broken = CoinField::constant(5, 5, ang);
  broken.phi[7] = 0.1;
  CHECK_FALSE(is_chiral_symmetric(broken, 1e-12).chiral);

  ang.beta1 = 0.25;  // alpha2 != beta1
  CHECK_FALSE(is_chiral_symmetric(CoinField::constant(5, 5, ang), 1e-12).chiral);
}

TEST_CASE("rotated walks equal the embedded original walk") {
  for (Basis basis : {Basis::rotated_square, Basis::rotated_circle}) {
    const CoinField cell_coins = gen_haar(6, 6, 77);
    const Embedding e{10, 10, 32, 32};

    // Support within cells [2, 3]^2 grows by at most 2 cells in 2 steps,
    // so nothing wraps or leaves the embedded block.
    SpinorField rot(basis, 6, 6);
    for (int nm = 2; nm <= 3; ++nm)
      for (int np = 2; np <= 3; ++np)
        for (int sp = 0; sp < 2; ++sp)
          rot.at(np, nm, sp) =
              cplx(u01(key_hash(91, np, nm, sp)) - 0.5,
                   u01(key_hash(92, np, nm, sp)) - 0.5);

    SpinorField orig = embed_rotated_state(rot, e);
    const CoinField site_coins = embed_rotated_coins(cell_coins, basis, e);
    const StepOp op_orig = compile_step(site_coins, Basis::original);
    const StepOp op_rot = compile_step(cell_coins, basis);
    BoundaryCondition bc;
    for (int t = 0; t < 2; ++t) {
      apply_timestep(rot, op_rot, bc);
      apply_timestep(orig, op_orig, bc);
    }
    const SpinorField back = extract_rotated_state(orig, basis, 6, 6, e);
    CHECK(max_abs_diff(back, rot) < 1e-13);
  }
}

TEST_CASE("plane shift helpers") {
  // 3 x 2 grid of spin pairs, values tag (i1, i2, spin).
  std::vector<double> buf(12);
  auto fill = [&] {
    for (int i2 = 0; i2 < 2; ++i2)
      for (int i1 = 0; i1 < 3; ++i1)
        for (int sp = 0; sp < 2; ++sp)
          buf[2 * (i2 * 3 + i1) + sp] = 100.0 * i1 + 10.0 * i2 + sp;
  };

  fill();
  plane::shift_axis1(buf.data(), 3, 2, 0, +1);
  for (int i2 = 0; i2 < 2; ++i2)
    for (int i1 = 0; i1 < 3; ++i1) {
      CHECK(buf[2 * (i2 * 3 + i1) + 0] ==
            100.0 * ((i1 + 2) % 3) + 10.0 * i2);  // came from i1 - 1
      CHECK(buf[2 * (i2 * 3 + i1) + 1] == 100.0 * i1 + 10.0 * i2 + 1);
    }

  fill();
  plane::shift_axis2(buf.data(), 3, 2, 1, -1, 0);  // skip column i1 = 0
  for (int i2 = 0; i2 < 2; ++i2)
    for (int i1 = 0; i1 < 3; ++i1) {
      const double expect = i1 == 0 ? 10.0 * i2 + 1
                                    : 100.0 * i1 + 10.0 * ((i2 + 1) % 2) + 1;
      CHECK(buf[2 * (i2 * 3 + i1) + 1] == expect);
    }
}

TEST_CASE("step rejects mismatched extents") {
  const CoinField coins(4, 4);
  SpinorField psi(Basis::original, 4, 6);
  BoundaryCondition bc;
  CHECK_THROWS(apply_timestep(psi, coins, bc));
}
