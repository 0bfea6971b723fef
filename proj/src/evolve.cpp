#include "qw2d/evolve.hpp"

#include "qw2d/parallel.hpp"
#include "qw2d/plane.hpp"
#include "qw2d/stats.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qw {

double PositionDistribution::total() const {
  double s = 0;
  for (double v : p) s += v;
  return s;
}

double PositionDistribution::variance() const {
  double s = 0;
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1) {
      const double d1 = i1 - origin1, d2 = i2 - origin2;
      s += p[at(i1, i2)] * 2.0 * (d1 * d1 + d2 * d2);
    }
  return s;
}

namespace {

void check_run_args(int l1, int l2, int t_max, const std::vector<int>& times,
                    const EvolveOptions& opt) {
  if (opt.variant == Basis::original)
    throw std::runtime_error("evolve: variant must be a rotated basis");
  if (l1 < 4 || l2 < 4) throw std::runtime_error("evolve: extents too small");
  if (t_max < 0) throw std::runtime_error("evolve: negative t_max");
  int prev = -1;
  for (int t : times) {
    if (t <= prev) throw std::runtime_error("evolve: times must be ascending");
    if (t < 0 || t > t_max) throw std::runtime_error("evolve: time out of range");
    prev = t;
  }
}

// Stochastic counterpart of a compiled step: per-cell column-stochastic
// mixers [[cos^2, sin^2], [sin^2, cos^2]]; phases drop out.
struct ClassStepOp {
  int l1 = 0, l2 = 0;
  std::vector<double> w1, w2;  // 4 per cell: 00, 01, 10, 11
};

ClassStepOp compile_classical(const CoinField& coins) {
  ClassStepOp op;
  op.l1 = coins.l1;
  op.l2 = coins.l2;
  const size_t n = coins.size();
  op.w1.resize(4 * n);
  op.w2.resize(4 * n);
  for (size_t i = 0; i < n; ++i) {
    const double c1 = std::cos(coins.theta1[i]), s1 = std::sin(coins.theta1[i]);
    const double c2 = std::cos(coins.theta2[i]), s2 = std::sin(coins.theta2[i]);
    op.w1[4 * i + 0] = c1 * c1;
    op.w1[4 * i + 1] = s1 * s1;
    op.w1[4 * i + 2] = s1 * s1;
    op.w1[4 * i + 3] = c1 * c1;
    op.w2[4 * i + 0] = c2 * c2;
    op.w2[4 * i + 1] = s2 * s2;
    op.w2[4 * i + 2] = s2 * s2;
    op.w2[4 * i + 3] = c2 * c2;
  }
  return op;
}

void class_sweep(std::vector<double>& p, const std::vector<double>& w) {
  const size_t n = p.size() / 2;
  for (size_t i = 0; i < n; ++i) {
    const double u = p[2 * i], d = p[2 * i + 1];
    p[2 * i] = w[4 * i + 0] * u + w[4 * i + 1] * d;
    p[2 * i + 1] = w[4 * i + 2] * u + w[4 * i + 3] * d;
  }
}

// Same shift pattern as the quantum apply_timestep for the matching basis.
void classical_timestep(std::vector<double>& p, const ClassStepOp& op,
                        Basis basis, double& lost) {
  const int l1 = op.l1, l2 = op.l2;
  class_sweep(p, op.w1);
  if (basis == Basis::rotated_square) {
    plane::shift_axis2(p.data(), l1, l2, kSpinUp, -1, -1);
    plane::shift_axis1(p.data(), l1, l2, kSpinDown, -1);
  } else {
    plane::shift_axis1(p.data(), l1, l2, kSpinUp, +1);
    plane::shift_axis2(p.data(), l1, l2, kSpinDown, +1, -1);
  }
  class_sweep(p, op.w2);
  if (basis == Basis::rotated_square) {
    plane::shift_axis1(p.data(), l1, l2, kSpinUp, +1);
    plane::shift_axis2(p.data(), l1, l2, kSpinUp, +1, -1);
  } else {
    plane::shift_axis1(p.data(), l1, l2, kSpinDown, -1);
    plane::shift_axis2(p.data(), l1, l2, kSpinDown, -1, -1);
  }
  auto drain = [&](int i1, int i2) {
    for (int sp = 0; sp < 2; ++sp) {
      double& v = p[2 * (static_cast<size_t>(i2) * l1 + i1) + sp];
      lost += v;
      v = 0;
    }
  };
  for (int i2 = 0; i2 < l2; ++i2) {
    drain(0, i2);
    drain(l1 - 1, i2);
  }
  for (int i1 = 1; i1 < l1 - 1; ++i1) {
    drain(i1, 0);
    drain(i1, l2 - 1);
  }
}

}  // namespace

EvolveResult run_point_source(const DisorderSpec& spec, int l1, int l2,
                              int t_max, const std::vector<int>& snapshot_times,
                              const EvolveOptions& opt) {
  std::vector<int> times = snapshot_times;
  if (times.empty()) times = {t_max};
  check_run_args(l1, l2, t_max, times, opt);
  const int o1 = l1 / 2, o2 = l2 / 2;
  EvolveResult out;
  size_t next = 0;

  if (!opt.classical) {
    SpinorField psi(opt.variant, l1, l2);
    psi.at(o1, o2, kSpinUp) = 1.0;
    BoundaryCondition bc = BoundaryCondition::absorbing();
    StepOp op;
    if (!opt.time_dependent) op = compile_step(generate(spec, l1, l2), opt.variant);
    auto capture_q = [&](int t) {
      PositionDistribution d;
      d.l1 = l1;
      d.l2 = l2;
      d.origin1 = o1;
      d.origin2 = o2;
      d.t = t;
      d.p_leave = bc.accumulated_loss;
      d.p.resize(static_cast<size_t>(l1) * l2);
      for (size_t i = 0; i < d.p.size(); ++i)
        d.p[i] = std::norm(psi.amp[2 * i]) + std::norm(psi.amp[2 * i + 1]);
      out.snapshots.push_back(std::move(d));
    };
    if (next < times.size() && times[next] == 0) {
      capture_q(0);
      ++next;
    }
    for (int t = 1; t <= t_max; ++t) {
      if (opt.time_dependent)
        op = compile_step(generate(spec, l1, l2, t), opt.variant);
      apply_timestep(psi, op, bc);
      if (next < times.size() && times[next] == t) {
        capture_q(t);
        ++next;
      }
    }
    out.p_leave = bc.accumulated_loss;
    return out;
  }

  std::vector<double> p(2 * static_cast<size_t>(l1) * l2, 0.0);
  p[2 * (static_cast<size_t>(o2) * l1 + o1) + kSpinUp] = 1.0;
  double lost = 0.0;
  auto capture_c = [&](int t) {
    PositionDistribution d;
    d.l1 = l1;
    d.l2 = l2;
    d.origin1 = o1;
    d.origin2 = o2;
    d.t = t;
    d.p_leave = lost;
    d.p.resize(static_cast<size_t>(l1) * l2);
    for (size_t i = 0; i < d.p.size(); ++i) d.p[i] = p[2 * i] + p[2 * i + 1];
    out.snapshots.push_back(std::move(d));
  };
  ClassStepOp op;
  if (!opt.time_dependent) op = compile_classical(generate(spec, l1, l2));
  if (next < times.size() && times[next] == 0) {
    capture_c(0);
    ++next;
  }
  for (int t = 1; t <= t_max; ++t) {
    if (opt.time_dependent) op = compile_classical(generate(spec, l1, l2, t));
    classical_timestep(p, op, opt.variant, lost);
    if (next < times.size() && times[next] == t) {
      capture_c(t);
      ++next;
    }
  }
  out.p_leave = lost;
  return out;
}

EvolveResult run_ensemble(const DisorderSpec& spec, int realizations, int l1,
                          int l2, int t_max,
                          const std::vector<int>& snapshot_times,
                          const EvolveOptions& opt) {
  if (realizations < 1) throw std::runtime_error("run_ensemble: no realizations");
  std::vector<EvolveResult> runs(realizations);
  parallel_for(realizations, opt.workers, [&](int i) {
    DisorderSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    EvolveOptions o = opt;
    o.workers = 1;
    runs[i] = run_point_source(s, l1, l2, t_max, snapshot_times, o);
  });
  EvolveResult out = std::move(runs[0]);
  for (int i = 1; i < realizations; ++i) {
    for (size_t k = 0; k < out.snapshots.size(); ++k) {
      PositionDistribution& acc = out.snapshots[k];
      const PositionDistribution& d = runs[i].snapshots[k];
      for (size_t j = 0; j < acc.p.size(); ++j) acc.p[j] += d.p[j];
      acc.p_leave += d.p_leave;
    }
    out.p_leave += runs[i].p_leave;
  }
  const double inv = 1.0 / realizations;
  for (PositionDistribution& d : out.snapshots) {
    for (double& v : d.p) v *= inv;
    d.p_leave *= inv;
    d.realizations_averaged = realizations;
  }
  out.p_leave *= inv;
  return out;
}

PositionDistribution average_over_disorder(const std::vector<DisorderSpec>& specs,
                                           int l1, int l2, int t_max,
                                           const EvolveOptions& opt) {
  if (specs.empty()) throw std::runtime_error("average_over_disorder: no specs");
  std::vector<PositionDistribution> finals(specs.size());
  parallel_for(static_cast<int>(specs.size()), opt.workers, [&](int i) {
    EvolveOptions o = opt;
    o.workers = 1;
    finals[i] = std::move(
        run_point_source(specs[i], l1, l2, t_max, {t_max}, o).snapshots[0]);
  });
  PositionDistribution acc = std::move(finals[0]);
  for (size_t i = 1; i < finals.size(); ++i) {
    for (size_t j = 0; j < acc.p.size(); ++j) acc.p[j] += finals[i].p[j];
    acc.p_leave += finals[i].p_leave;
  }
  const double inv = 1.0 / specs.size();
  for (double& v : acc.p) v *= inv;
  acc.p_leave *= inv;
  acc.realizations_averaged = static_cast<int>(specs.size());
  return acc;
}

std::vector<double> return_series(const DisorderSpec& spec, int l1, int l2,
                                  const std::vector<int>& times,
                                  const EvolveOptions& opt) {
  if (times.empty()) throw std::runtime_error("return_series: no times");
  EvolveResult r =
      run_point_source(spec, l1, l2, times.back(), times, opt);
  std::vector<double> p0(r.snapshots.size());
  for (size_t k = 0; k < r.snapshots.size(); ++k) {
    const PositionDistribution& d = r.snapshots[k];
    p0[k] = d.p[d.at(d.origin1, d.origin2)];
  }
  return p0;
}

namespace {

struct CutData {
  std::vector<double> x, lnp;  // |x| along the cut, log mean probability
};

// cut 0 varies n_+ at n_- = origin (x_+ axis), cut 1 the reverse.  Mirror
// sites and rows within band cells of the axis are averaged per distance;
// ln_off(x, c) is the model's ln p offset of a row at perpendicular
// distance c relative to the axis, divided out before averaging.
template <class OffFn>
CutData collect_cut(const PositionDistribution& dist, int cut, double core_x,
                    int band, double r_max_fraction, OffFn ln_off) {
  CutData out;
  const int len = cut == 0 ? dist.l1 : dist.l2;
  const int oc = cut == 0 ? dist.origin1 : dist.origin2;
  const int perp_len = cut == 0 ? dist.l2 : dist.l1;
  const int perp_oc = cut == 0 ? dist.origin2 : dist.origin1;
  const int d_max = std::max(oc, len - 1 - oc);
  const double r_max = r_max_fraction * std::sqrt(2.0) * d_max;
  for (int d = 0; d <= d_max; ++d) {
    const double x = std::sqrt(2.0) * d;
    if (x < core_x || x > r_max) continue;
    double sum = 0;
    int n = 0;
    for (int side = d == 0 ? 1 : -1; side <= 1; side += 2) {
      const int i = oc + side * d;
      if (i < 0 || i >= len) continue;
      for (int db = -band; db <= band; ++db) {
        const int j = perp_oc + db;
        if (j < 0 || j >= perp_len) continue;
        const double p =
            cut == 0 ? dist.p[dist.at(i, j)] : dist.p[dist.at(j, i)];
        if (p <= 0) continue;  // parity-forbidden or drained cells
        sum += p * std::exp(-ln_off(x, std::sqrt(2.0) * std::abs(db)));
        ++n;
      }
    }
    if (n == 0) continue;
    out.x.push_back(x);
    out.lnp.push_back(std::log(sum / n));
  }
  return out;
}

constexpr auto kNoOffset = [](double, double) { return 0.0; };

LineFit fit_cut(const CutData& c, bool square_regressor) {
  if (c.x.size() < 8)
    throw std::runtime_error("spread fit: cut has fewer than 8 usable points");
  std::vector<double> reg = c.x;
  if (square_regressor)
    for (double& v : reg) v *= v;
  LineFit f = linear_fit(reg, c.lnp);
  if (f.slope >= 0)
    throw std::runtime_error("spread fit: profile does not decay along cut");
  return f;
}

}  // namespace

SpreadFit fit_localized(const PositionDistribution& dist, const FitOptions& opt) {
  const double core = opt.core_exclude_localized;
  const double frac = opt.r_max_fraction;
  const LineFit fp0 =
      fit_cut(collect_cut(dist, 0, core, 0, frac, kNoOffset), false);
  const LineFit fm0 =
      fit_cut(collect_cut(dist, 1, core, 0, frac, kNoOffset), false);
  const double zp0 = -1.0 / fp0.slope, zm0 = -1.0 / fm0.slope;
  const auto off = [](double za, double zb) {
    return [za, zb](double x, double c) {
      return x / za - std::sqrt(x * x / (za * za) + c * c / (zb * zb));
    };
  };
  const CutData cp =
      collect_cut(dist, 0, core, opt.band_halfwidth, frac, off(zp0, zm0));
  const CutData cm =
      collect_cut(dist, 1, core, opt.band_halfwidth, frac, off(zm0, zp0));
  const LineFit fp = fit_cut(cp, false), fm = fit_cut(cm, false);
  SpreadFit out;
  out.model = SpreadModel::localized;
  out.par_plus = -1.0 / fp.slope;
  out.par_minus = -1.0 / fm.slope;
  out.r2_plus = fp.r2;
  out.r2_minus = fm.r2;
  out.n_points_plus = fp.n;
  out.n_points_minus = fm.n;
  out.variance_measured = dist.variance();
  out.variance_predicted =
      3.0 * (out.par_plus * out.par_plus + out.par_minus * out.par_minus);
  return out;
}

SpreadFit fit_diffusive(const PositionDistribution& dist, int t,
                        const FitOptions& opt) {
  if (t <= 0) throw std::runtime_error("fit_diffusive: t must be positive");
  const double core = opt.core_exclude_diffusive;
  const double frac = opt.r_max_fraction;
  const LineFit fp0 =
      fit_cut(collect_cut(dist, 0, core, 0, frac, kNoOffset), true);
  const LineFit fm0 =
      fit_cut(collect_cut(dist, 1, core, 0, frac, kNoOffset), true);
  const double dp0 = -1.0 / (4.0 * t * fp0.slope);
  const double dm0 = -1.0 / (4.0 * t * fm0.slope);
  const auto off = [t](double d_perp) {
    return [t, d_perp](double, double c) { return -c * c / (4.0 * d_perp * t); };
  };
  const CutData cp =
      collect_cut(dist, 0, core, opt.band_halfwidth, frac, off(dm0));
  const CutData cm =
      collect_cut(dist, 1, core, opt.band_halfwidth, frac, off(dp0));
  const LineFit fp = fit_cut(cp, true), fm = fit_cut(cm, true);
  SpreadFit out;
  out.model = SpreadModel::diffusive;
  out.par_plus = -1.0 / (4.0 * t * fp.slope);
  out.par_minus = -1.0 / (4.0 * t * fm.slope);
  out.r2_plus = fp.r2;
  out.r2_minus = fm.r2;
  out.n_points_plus = fp.n;
  out.n_points_minus = fm.n;
  out.variance_measured = dist.variance();
  out.variance_predicted = 2.0 * (out.par_plus + out.par_minus) * t;
  return out;
}

PowerLawFit variance_series(const std::vector<PositionDistribution>& snapshots) {
  PowerLawFit out;
  std::vector<double> lnt, lnr;
  for (const PositionDistribution& d : snapshots) {
    const double v = d.variance();
    out.t.push_back(d.t);
    out.var.push_back(v);
    out.rms.push_back(std::sqrt(v));
    out.p_leave.push_back(d.p_leave);
    if (d.t > 0 && v > 0) {
      lnt.push_back(std::log(static_cast<double>(d.t)));
      lnr.push_back(0.5 * std::log(v));
    }
  }
  if (lnt.size() < 2)
    throw std::runtime_error("variance_series: need at least 2 positive times");
  const LineFit f = linear_fit(lnt, lnr);
  out.exponent = f.slope;
  out.exponent_se = f.slope_se;
  out.prefactor = std::exp(f.intercept);
  return out;
}

void write_variance_csv(const PowerLawFit& series, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "t,rms,variance,p_leave\n";
  char buf[128];
  for (size_t i = 0; i < series.t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", series.t[i],
                  series.rms[i], series.var[i], series.p_leave[i]);
    f << buf;
  }
}

void write_distribution_csv(const PositionDistribution& dist,
                            const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "# t=" << dist.t << " origin=" << dist.origin1 << ',' << dist.origin2
    << " realizations=" << dist.realizations_averaged << " p_leave="
    << dist.p_leave << "\n";
  f << "n_plus,n_minus,p\n";
  char buf[64];
  for (int i2 = 0; i2 < dist.l2; ++i2)
    for (int i1 = 0; i1 < dist.l1; ++i1) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", i1, i2,
                    dist.p[dist.at(i1, i2)]);
      f << buf;
    }
}

}  // namespace qw
