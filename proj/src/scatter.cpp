#include "qw2d/scatter.hpp"

#include "qw2d/parallel.hpp"
#include "qw2d/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qw {

namespace {

// Row index of site (x, y, spin) in the (lx + 1) x ly field.
long lead_index(int lx, int y, int spin) {
  return 2L * (static_cast<long>(y) * (lx + 1)) + spin;
}

}  // namespace

ScatterGeometry build_geometry(const DisorderSpec& spec, int lx, int ly,
                               CutType cut, int cut_row0) {
  if (lx < 1) throw std::runtime_error("build_geometry: L_x must be >= 1");
  if (ly < 2 || ly % 2 != 0)
    throw std::runtime_error("build_geometry: L_y must be even and >= 2");
  CoinField coins = generate(spec, lx + 1, ly);
  int r0 = cut_row0;
  if (cut != CutType::none) {
    if (r0 < 0) r0 = ly / 2 - 1;
    if (r0 + 1 >= ly)
      throw std::runtime_error("build_geometry: cut rows outside the system");
    const double t1 = cut == CutType::a ? 0.0 : M_PI / 2;
    const double t2 = cut == CutType::a ? M_PI / 2 : 0.0;
    for (int dy = 0; dy < 2; ++dy)
      for (int x = 1; x <= lx; ++x) {
        const size_t i = coins.at(x, r0 + dy);
        coins.theta1[i] = t1;
        coins.theta2[i] = t2;
        coins.alpha1[i] = coins.alpha2[i] = 0;
        coins.beta1[i] = coins.beta2[i] = 0;
      }
  } else {
    r0 = -1;
  }
  for (int y = 0; y < ly; ++y) {
    const size_t i = coins.at(0, y);
    coins.theta1[i] = coins.theta2[i] = 0;
    coins.alpha1[i] = coins.alpha2[i] = 0;
    coins.beta1[i] = coins.beta2[i] = 0;
    coins.phi[i] = 0;
  }
  ScatterGeometry g;
  g.lx = lx;
  g.ly = ly;
  g.cut = cut;
  g.cut_row0 = r0;
  g.op = compile_step(coins, Basis::original);
  g.op.y_shift_skip_column = 0;
  return g;
}

TransmissionSeries transmission_series(const ScatterGeometry& geo, int t_max,
                                       int workers) {
  if (t_max < 1) throw std::runtime_error("transmission_series: t_max < 1");
  TransmissionSeries s;
  s.lx = geo.lx;
  s.ly = geo.ly;
  s.t_max = t_max;
  s.transmission.assign(t_max + 1, Eigen::MatrixXcd::Zero(geo.ly, geo.ly));
  s.reflection.assign(t_max + 1, Eigen::MatrixXcd::Zero(geo.ly, geo.ly));
  s.residual.assign(geo.ly, 0.0);
  parallel_for(geo.ly, workers, [&](int n) {
    SpinorField psi(Basis::original, geo.lx + 1, geo.ly);
    psi.at(0, n, kSpinUp) = 1.0;
    BoundaryCondition bc = BoundaryCondition::periodic();
    for (int t = 1; t <= t_max; ++t) {
      apply_timestep(psi, geo.op, bc);
      for (int m = 0; m < geo.ly; ++m) {
        cplx& u = psi.at(0, m, kSpinUp);
        cplx& d = psi.at(0, m, kSpinDown);
        s.transmission[t](m, n) = u;
        s.reflection[t](m, n) = d;
        u = 0;
        d = 0;
      }
    }
    s.residual[n] = psi.norm2();
  });
  return s;
}

EnergyResolved transmission_at_energy(const TransmissionSeries& s) {
  const int n = s.t_max;
  EnergyResolved er;
  er.epsilon.resize(n);
  for (int k = 0; k < n; ++k) er.epsilon[k] = 2.0 * M_PI * k / n;
  er.t_eps.assign(n, Eigen::MatrixXcd::Zero(s.ly, s.ly));
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_complex* out = fftw_alloc_complex(n);
  // BACKWARD gives sum_j in[j] e^{+2 pi i jk/n}; t = t_max wraps to j = 0.
  fftw_plan plan = fftw_plan_dft_1d(n, buf, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  for (int col = 0; col < s.ly; ++col)
    for (int row = 0; row < s.ly; ++row) {
      for (int t = 1; t <= n; ++t) {
        const cplx v = s.transmission[t](row, col);
        buf[t % n][0] = v.real();
        buf[t % n][1] = v.imag();
      }
      fftw_execute(plan);
      for (int k = 0; k < n; ++k) er.t_eps[k](row, col) = cplx(out[k][0], out[k][1]);
    }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  fftw_free(out);
  return er;
}

std::vector<double> total_transmission(const EnergyResolved& er) {
  std::vector<double> t(er.t_eps.size());
  for (size_t k = 0; k < er.t_eps.size(); ++k) t[k] = er.t_eps[k].squaredNorm();
  return t;
}

std::vector<double> transmission_eigenvalues(const Eigen::MatrixXcd& t_eps) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t_eps.adjoint() * t_eps);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

AveragedTransmission averaged_transmission(const TransmissionSeries& s) {
  AveragedTransmission out;
  std::vector<double> absorbed(s.ly, 0.0);
  for (int t = 1; t <= s.t_max; ++t) {
    const Eigen::MatrixXcd& tm = s.transmission[t];
    const Eigen::MatrixXcd& rm = s.reflection[t];
    for (int n = 0; n < s.ly; ++n) {
      const double w = tm.col(n).squaredNorm();
      absorbed[n] += w + rm.col(n).squaredNorm();
      (n % 2 == 0 ? out.even : out.odd) += w;
    }
  }
  out.total = out.even + out.odd;
  out.min_absorbed = *std::min_element(absorbed.begin(), absorbed.end());
  out.converged = out.min_absorbed >= 0.99;
  return out;
}

InvariantEstimate invariant_from_transmission(double t_a, double t_b) {
  if (t_a < 0 || t_b < 0)
    throw std::runtime_error("invariant_from_transmission: negative total");
  const double s = t_a > t_b ? 1.0 : (t_a < t_b ? -1.0 : 0.0);
  InvariantEstimate out;
  out.estimate = s * 0.5 * (t_a + t_b);
  out.nu = static_cast<int>(std::lround(out.estimate));
  out.flagged = std::abs(out.estimate - out.nu) > 0.2;
  return out;
}

InvariantEstimate measure_invariant(const DisorderSpec& spec, int lx, int ly,
                                    int t_max, int workers) {
  const AveragedTransmission ta = averaged_transmission(
      transmission_series(build_geometry(spec, lx, ly, CutType::a), t_max, workers));
  const AveragedTransmission tb = averaged_transmission(
      transmission_series(build_geometry(spec, lx, ly, CutType::b), t_max, workers));
  InvariantEstimate e = invariant_from_transmission(ta.total, tb.total);
  if (!ta.converged || !tb.converged) e.flagged = true;
  return e;
}

ResolventResult resolvent_oracle(const ScatterGeometry& geo, double epsilon,
                                 int cap) {
  return resolvent_oracle(dense_build(geo.op, cap), geo.lx, geo.ly, epsilon);
}

ResolventResult resolvent_oracle(const Eigen::MatrixXcd& u, int lx, int ly,
                                 double epsilon) {
  const long dim = 2L * (lx + 1) * ly;
  if (u.rows() != dim || u.cols() != dim)
    throw std::runtime_error("resolvent_oracle: matrix does not match extents");
  const cplx phase = std::polar(1.0, epsilon);
  Eigen::MatrixXcd m = -phase * u;
  for (int y = 0; y < ly; ++y)
    for (int sp = 0; sp < 2; ++sp) m.row(lead_index(lx, y, sp)).setZero();
  m += Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  ResolventResult out;
  out.rcond = lu.rcond();
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(dim, ly);
  for (int n = 0; n < ly; ++n) rhs(lead_index(lx, n, kSpinUp), n) = 1.0;
  const Eigen::MatrixXcd w = phase * (u * lu.solve(rhs));
  out.t.resize(ly, ly);
  out.r.resize(ly, ly);
  for (int n = 0; n < ly; ++n)
    for (int mm = 0; mm < ly; ++mm) {
      out.t(mm, n) = w(lead_index(lx, mm, kSpinUp), n);
      out.r(mm, n) = w(lead_index(lx, mm, kSpinDown), n);
    }
  return out;
}

ScalingResult scaling_sweep(const DisorderSpec& spec,
                            const std::vector<SizeSpec>& sizes, int n_seeds,
                            CutType cut, int workers) {
  if (sizes.empty()) throw std::runtime_error("scaling_sweep: no sizes");
  if (n_seeds < 1) throw std::runtime_error("scaling_sweep: no seeds");
  ScalingResult out;
  for (const SizeSpec& sz : sizes) {
    double acc = 0;
    for (int i = 0; i < n_seeds; ++i) {
      DisorderSpec d = spec;
      d.seed = spec.seed + static_cast<std::uint64_t>(i);
      const AveragedTransmission tb = averaged_transmission(transmission_series(
          build_geometry(d, sz.lx, sz.ly, cut), sz.t_max, workers));
      out.points.push_back({spec.fixed_angles.theta1, spec.fixed_angles.theta2,
                            cut, sz.lx, sz.ly, d.seed, tb});
      acc += tb.total;
    }
    out.mean_total.push_back(acc / n_seeds);
  }
  std::vector<double> x, y;
  for (size_t i = 0; i < sizes.size(); ++i)
    if (out.mean_total[i] > 0) {
      x.push_back(sizes[i].lx);
      y.push_back(std::log(out.mean_total[i]));
    }
  if (x.size() >= 2) out.slope = linear_fit(x, y).slope;
  const double first = out.mean_total.front(), last = out.mean_total.back();
  if (first > 0 && (last <= 0 || first / last >= 3.0))
    out.classification = ScalingClass::insulating;
  else if (last > 0 && first / last <= 1.2)
    out.classification = ScalingClass::diffusive;
  return out;
}

void write_scaling_csv(const ScalingResult& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "theta1,theta2,cut,L_x,L_y,seed,T_even,T_odd,T_total\n";
  char buf[256];
  for (const ScalingPoint& p : r.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,%d,%d,%llu,%.17g,%.17g,%.17g\n",
                  p.theta1, p.theta2, to_string(p.cut).c_str(), p.lx, p.ly,
                  static_cast<unsigned long long>(p.seed), p.tbar.even,
                  p.tbar.odd, p.tbar.total);
    f << buf;
  }
}

void write_energy_csv(const EnergyResolved& er, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "epsilon,T\n";
  const std::vector<double> t = total_transmission(er);
  char buf[80];
  for (size_t k = 0; k < t.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", er.epsilon[k], t[k]);
    f << buf;
  }
}

std::string to_string(CutType c) {
  switch (c) {
    case CutType::none: return "none";
    case CutType::a: return "A";
    case CutType::b: return "B";
  }
  return "?";
}

}  // namespace qw
