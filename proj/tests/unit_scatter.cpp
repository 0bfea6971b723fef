#include <doctest.h>

#include <cmath>
#include <fstream>

#include "qw2d/scatter.hpp"
#include "qw2d/stats.hpp"

using namespace qw;

namespace {

DisorderSpec fixed_spec(double t1, double t2) {
  DisorderSpec s;
  s.kind = DisorderKind::fixed;
  s.fixed_angles.theta1 = t1;
  s.fixed_angles.theta2 = t2;
  return s;
}

DisorderSpec phase_spec(double t1, double t2, std::uint64_t seed) {
  DisorderSpec s = fixed_spec(t1, t2);
  s.kind = DisorderKind::phase;
  s.seed = seed;
  return s;
}

DisorderSpec haar_spec(std::uint64_t seed) {
  DisorderSpec s;
  s.kind = DisorderKind::haar;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("free lead transmits each channel as one clean spike") {
  const ScatterGeometry g = build_geometry(fixed_spec(0, 0), 3, 4);
  const TransmissionSeries s = transmission_series(g, 8);
  for (int t = 1; t <= 8; ++t)
    for (int n = 0; n < 4; ++n)
      for (int m = 0; m < 4; ++m) {
        const cplx tv = s.transmission[t](m, n);
        CHECK(std::abs(s.reflection[t](m, n)) == 0.0);
        if (t == 4 && m == (n + 3) % 4)
          CHECK(std::abs(tv - 1.0) < 1e-14);
        else
          CHECK(std::abs(tv) == 0.0);
      }
  for (double r : s.residual) CHECK(r == doctest::Approx(0.0).epsilon(1e-14));

  const TransmissionSeries shorter = transmission_series(g, 3);
  for (double r : shorter.residual) CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("free-walk averages split evenly by channel parity") {
  const ScatterGeometry g = build_geometry(fixed_spec(0, 0), 3, 4);
  const AveragedTransmission a =
      averaged_transmission(transmission_series(g, 8));
  CHECK(a.total == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(a.even == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(a.odd == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(a.min_absorbed == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(a.converged);
}

TEST_CASE("uniform cut material reflects with a fixed transverse kick") {
  // theta = (0, pi/2) everywhere: one step into the sample flips the spin
  // and kicks y by -1, the next step returns to the lead.
  const ScatterGeometry a = build_geometry(fixed_spec(0, M_PI / 2), 4, 6);
  const TransmissionSeries sa = transmission_series(a, 6);
  for (int n = 0; n < 6; ++n)
    CHECK(std::abs(sa.reflection[2]((n + 5) % 6, n) - 1.0) < 1e-14);
  for (double r : sa.residual) CHECK(r == doctest::Approx(0.0).epsilon(1e-14));

  // the (pi/2, 0) material kicks the opposite way.
  const ScatterGeometry b = build_geometry(fixed_spec(M_PI / 2, 0), 4, 6);
  const TransmissionSeries sb = transmission_series(b, 6);
  for (int n = 0; n < 6; ++n)
    CHECK(std::abs(sb.reflection[2]((n + 1) % 6, n) - 1.0) < 1e-14);
}

TEST_CASE("lead amplitudes obey the bipartite selection rules") {
  // lx odd: contributing paths cross the sample without wrap parity mixing,
  // so both readouts need t even and m - n odd.
  const ScatterGeometry g = build_geometry(haar_spec(23), 3, 6);
  const TransmissionSeries s = transmission_series(g, 30);
  for (int t = 1; t <= 30; ++t)
    for (int n = 0; n < 6; ++n)
      for (int m = 0; m < 6; ++m) {
        const bool allowed = t % 2 == 0 && (m - n + 6) % 2 == 1;
        if (!allowed) {
          CHECK(std::abs(s.transmission[t](m, n)) == 0.0);
          CHECK(std::abs(s.reflection[t](m, n)) == 0.0);
        }
      }
}

TEST_CASE("per-channel flux accounting closes to one") {
  const ScatterGeometry g = build_geometry(haar_spec(41), 3, 6);
  const TransmissionSeries s = transmission_series(g, 200);
  for (int n = 0; n < 6; ++n) {
    double acc = s.residual[n];
    for (int t = 1; t <= 200; ++t)
      acc += s.transmission[t].col(n).squaredNorm() +
             s.reflection[t].col(n).squaredNorm();
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("energy average of T equals the time-domain total") {
  const ScatterGeometry g = build_geometry(haar_spec(41), 2, 4);
  const TransmissionSeries s = transmission_series(g, 64);
  const std::vector<double> te = total_transmission(transmission_at_energy(s));
  CHECK(te.size() == 64);
  CHECK(mean(te) ==
        doctest::Approx(averaged_transmission(s).total).epsilon(1e-9));
}

TEST_CASE("dft of the series matches the resolvent closed form") {
  const ScatterGeometry g = build_geometry(phase_spec(0.2 * M_PI, 0.4 * M_PI, 7), 1, 2);
  const TransmissionSeries s = transmission_series(g, 2048);
  for (double r : s.residual) REQUIRE(r < 1e-10);
  const EnergyResolved er = transmission_at_energy(s);
  for (int k : {100, 700, 1500}) {
    const ResolventResult rr = resolvent_oracle(g, er.epsilon[k]);
    CHECK(rr.rcond > 1e-8);
    CHECK((er.t_eps[k] - rr.t).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("resolvent reproduces the free spike in closed form") {
  const ScatterGeometry g = build_geometry(fixed_spec(0, 0), 3, 4);
  const double eps = 0.3;
  const ResolventResult rr = resolvent_oracle(g, eps);
  const cplx expect = std::polar(1.0, 4 * eps);  // single path of length 4
  for (int n = 0; n < 4; ++n)
    for (int m = 0; m < 4; ++m) {
      if (m == (n + 3) % 4)
        CHECK(std::abs(rr.t(m, n) - expect) < 1e-10);
      else
        CHECK(std::abs(rr.t(m, n)) < 1e-10);
      CHECK(std::abs(rr.r(m, n)) < 1e-10);
    }
}

TEST_CASE("invariant estimate from cut totals") {
  InvariantEstimate e = invariant_from_transmission(0, 2);
  CHECK(e.estimate == doctest::Approx(-1.0));
  CHECK(e.nu == -1);
  CHECK_FALSE(e.flagged);

  e = invariant_from_transmission(2, 0);
  CHECK(e.nu == +1);
  CHECK_FALSE(e.flagged);

  e = invariant_from_transmission(1.2, 0.7);
  CHECK(e.estimate == doctest::Approx(0.95));
  CHECK(e.nu == 1);
  CHECK_FALSE(e.flagged);

  e = invariant_from_transmission(3, 0.5);
  CHECK(e.estimate == doctest::Approx(1.75));
  CHECK(e.nu == 2);
  CHECK(e.flagged);

  e = invariant_from_transmission(1, 1);
  CHECK(e.estimate == doctest::Approx(0.0));
  CHECK(e.nu == 0);

  CHECK_THROWS(invariant_from_transmission(-0.1, 1));
}

TEST_CASE("geometry construction rules") {
  CHECK_THROWS(build_geometry(haar_spec(1), 3, 5));  // odd L_y
  CHECK_THROWS(build_geometry(haar_spec(1), 0, 4));
  CHECK_THROWS(build_geometry(haar_spec(1), 3, 4, CutType::a, 3));

  const ScatterGeometry g = build_geometry(haar_spec(1), 3, 8, CutType::a);
  CHECK(g.cut_row0 == 3);
  CHECK(g.op.y_shift_skip_column == 0);

  // lead column: both coins identity, no phase.
  for (int y = 0; y < 8; ++y) {
    const size_t i = 4 * (static_cast<size_t>(y) * 4 + 0);
    CHECK(std::abs(g.op.r1[i] - 1.0) < 1e-15);
    CHECK(std::abs(g.op.r1[i + 1]) < 1e-15);
    CHECK(std::abs(g.op.r2[i + 3] - 1.0) < 1e-15);
    CHECK(std::abs(g.op.f[i / 4] - 1.0) < 1e-15);
  }
  // cut rows: r1 = identity, r2 = R(0, 0, pi/2).
  for (int dy = 0; dy < 2; ++dy)
    for (int x = 1; x <= 3; ++x) {
      const size_t i = 4 * (static_cast<size_t>(g.cut_row0 + dy) * 4 + x);
      CHECK(std::abs(g.op.r1[i] - 1.0) < 1e-15);
      CHECK(std::abs(g.op.r1[i + 2]) < 1e-15);
      CHECK(std::abs(g.op.r2[i]) < 1e-15);
      CHECK(std::abs(g.op.r2[i + 1] + 1.0) < 1e-15);
      CHECK(std::abs(g.op.r2[i + 2] - 1.0) < 1e-15);
    }
}

TEST_CASE("invariant measurement on a small gapped sample") {
  const InvariantEstimate e =
      measure_invariant(phase_spec(0.2 * M_PI, 0.4 * M_PI, 11), 9, 10, 600);
  CHECK(e.nu == -1);
  CHECK_FALSE(e.flagged);
  CHECK(e.estimate == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("scaling sweep flags a gapped sample as insulating") {
  const std::vector<SizeSpec> sizes = {{5, 6, 200}, {11, 6, 400}};
  const ScalingResult r = scaling_sweep(phase_spec(0.2 * M_PI, 0.4 * M_PI, 11),
                                        sizes, 2, CutType::none);
  REQUIRE(r.mean_total.size() == 2);
  CHECK(r.mean_total[0] > 3 * r.mean_total[1]);
  CHECK(r.slope < 0);
  CHECK(r.classification == ScalingClass::insulating);
  CHECK(r.points.size() == 4);

  CHECK_THROWS(scaling_sweep(haar_spec(1), {}, 2, CutType::none));
  CHECK_THROWS(scaling_sweep(haar_spec(1), sizes, 0, CutType::none));
}

TEST_CASE("scatter csv headers") {
  const std::vector<SizeSpec> sizes = {{2, 4, 32}};
  const ScalingResult r =
      scaling_sweep(haar_spec(3), sizes, 1, CutType::b);
  write_scaling_csv(r, "/tmp/qw2d_test_scaling.csv");
  std::ifstream f("/tmp/qw2d_test_scaling.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "theta1,theta2,cut,L_x,L_y,seed,T_even,T_odd,T_total");
  std::getline(f, line);
  CHECK(line.find(",B,2,4,3,") != std::string::npos);

  const ScatterGeometry g = build_geometry(haar_spec(3), 2, 4);
  write_energy_csv(transmission_at_energy(transmission_series(g, 16)),
                   "/tmp/qw2d_test_energy.csv");
  std::ifstream e("/tmp/qw2d_test_energy.csv");
  std::getline(e, line);
  CHECK(line == "epsilon,T");
}
