#include "qw2d/spectral.hpp"

#include "qw2d/parallel.hpp"
#include "qw2d/rng.hpp"
#include "qw2d/stats.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qw {

Eigen::MatrixXcd build_u2_block(const CoinField& coins, SpacingBlock block,
                                int cap, int workers) {
  const int l1 = coins.l1, l2 = coins.l2;
  if (l1 % 2 != 0 || l2 % 2 != 0)
    throw std::runtime_error("build_u2_block: cell extents must be even");
  const long n = static_cast<long>(l1) * l2;
  if (n > cap) throw std::runtime_error("build_u2_block: dimension exceeds cap");
  const bool square =
      block == SpacingBlock::square_ee || block == SpacingBlock::square_oo;
  const int par =
      block == SpacingBlock::square_ee || block == SpacingBlock::circle_eo ? 0 : 1;
  const Basis basis = square ? Basis::rotated_square : Basis::rotated_circle;
  std::vector<size_t> cells;  // field offsets of the parity class, row-major
  cells.reserve(n / 2);
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1)
      if ((i1 + i2) % 2 == par)
        cells.push_back(2 * (static_cast<size_t>(i2) * l1 + i1));
  const StepOp op = compile_step(coins, basis);
  Eigen::MatrixXcd b(n, n);
  parallel_for(static_cast<int>(cells.size()), workers, [&](int c) {
    SpinorField psi(basis, l1, l2);
    for (int sp = 0; sp < 2; ++sp) {
      std::fill(psi.amp.begin(), psi.amp.end(), cplx(0.0));
      psi.amp[cells[c] + sp] = 1.0;
      BoundaryCondition bc = BoundaryCondition::periodic();
      apply_timestep(psi, op, bc);
      apply_timestep(psi, op, bc);
      const long k = 2L * c + sp;
      for (size_t j = 0; j < cells.size(); ++j) {
        b(2 * j, k) = psi.amp[cells[j]];
        b(2 * j + 1, k) = psi.amp[cells[j] + 1];
      }
    }
  });
  return b;
}

Eigen::VectorXcd eigenvalues_dense(Eigen::MatrixXcd a) {
  if (a.rows() != a.cols())
    throw std::runtime_error("eigenvalues_dense: matrix not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXcd w(n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr,
      1);
  if (info != 0)
    throw std::runtime_error("eigenvalues_dense: zgeev failed, info = " +
                             std::to_string(info));
  return w;
}

SpacingEnsemble spacings_from_block(const Eigen::VectorXcd& lambda,
                                    SpacingBlock block, double unit_tol) {
  const int n = static_cast<int>(lambda.size());
  if (n < 2) throw std::runtime_error("spacings_from_block: too few eigenvalues");
  SpacingEnsemble e;
  e.block = block;
  e.n_block = n;
  e.eps.resize(n);
  for (int j = 0; j < n; ++j) {
    if (std::abs(std::abs(lambda[j]) - 1.0) > unit_tol)
      throw std::runtime_error("spacings_from_block: eigenvalue off unit circle");
    double v = -std::arg(lambda[j]) / 2.0;  // in [-pi/2, pi/2]
    if (v < 0) v += M_PI;
    if (v >= M_PI) v -= M_PI;
    e.eps[j] = v;
  }
  std::sort(e.eps.begin(), e.eps.end());
  e.s.resize(n);
  const double scale = n / M_PI;
  for (int j = 0; j + 1 < n; ++j) e.s[j] = scale * (e.eps[j + 1] - e.eps[j]);
  e.s[n - 1] = scale * (e.eps[0] + M_PI - e.eps[n - 1]);
  return e;
}

double reference_pdf(RefKind kind, double s) {
  if (s < 0) throw std::runtime_error("reference_pdf: s < 0");
  if (kind == RefKind::poisson) return std::exp(-s);
  return 32.0 / (M_PI * M_PI) * s * s * std::exp(-4.0 * s * s / M_PI);
}

double reference_cdf(RefKind kind, double s) {
  if (s < 0) throw std::runtime_error("reference_cdf: s < 0");
  if (kind == RefKind::poisson) return 1.0 - std::exp(-s);
  return std::erf(2.0 * s / std::sqrt(M_PI)) -
         (4.0 * s / M_PI) * std::exp(-4.0 * s * s / M_PI);
}

std::vector<double> sample_reference(RefKind kind, size_t n,
                                     std::uint64_t seed) {
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const double u = u01(key_hash(seed, i, 0xa5, 0));
    if (kind == RefKind::poisson) {
      out[i] = -std::log1p(-u);
    } else {
      double lo = 0.0, hi = 8.0;  // CDF(8) - 1 is far below double epsilon
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (reference_cdf(RefKind::gue, mid) < u ? lo : hi) = mid;
      }
      out[i] = 0.5 * (lo + hi);
    }
  }
  return out;
}

ClassifyResult classify_statistics(const std::vector<double>& s, double margin) {
  if (s.size() < 500)
    throw std::runtime_error("classify_statistics: need at least 500 samples");
  ClassifyResult r;
  r.ks_poisson =
      ks_distance(s, [](double v) { return reference_cdf(RefKind::poisson, v); });
  r.ks_gue =
      ks_distance(s, [](double v) { return reference_cdf(RefKind::gue, v); });
  if (std::abs(r.ks_poisson - r.ks_gue) <= margin)
    r.label = SpectralClass::ambiguous;
  else
    r.label = r.ks_poisson < r.ks_gue ? SpectralClass::poisson
                                      : SpectralClass::gue;
  return r;
}

TailFit tail_analysis(const std::vector<double>& s, double s_min) {
  std::vector<double> tail;
  for (double v : s)
    if (v > s_min) tail.push_back(v);
  std::sort(tail.begin(), tail.end());
  const int m = static_cast<int>(tail.size());
  if (m < 50)
    throw std::runtime_error("tail_analysis: fewer than 50 tail samples");
  const double n_total = static_cast<double>(s.size());
  std::vector<double> x(m), y(m);
  for (int i = 0; i < m; ++i) {
    x[i] = tail[i];
    y[i] = std::log((m - i - 0.5) / n_total);  // empirical survival
  }
  const LineFit lf = linear_fit(x, y);
  const QuadFit qf = quadratic_fit(x, y);
  TailFit out;
  out.rate = -lf.slope;
  out.rate_se = lf.slope_se;
  out.curvature = qf.c2;
  out.curvature_se = qf.c2_se;
  out.exponential = qf.c2 > -2.0 / M_PI;
  out.n_tail = m;
  return out;
}

void write_spacings_csv(const std::vector<double>& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "s\n";
  char buf[40];
  for (double v : s) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    f << buf;
  }
}

std::string to_string(SpacingBlock b) {
  switch (b) {
    case SpacingBlock::square_ee: return "square-ee";
    case SpacingBlock::square_oo: return "square-oo";
    case SpacingBlock::circle_eo: return "circle-eo";
    case SpacingBlock::circle_oe: return "circle-oe";
  }
  return "?";
}

std::string to_string(SpectralClass c) {
  switch (c) {
    case SpectralClass::poisson: return "poisson";
    case SpectralClass::gue: return "gue";
    case SpectralClass::ambiguous: return "ambiguous";
  }
  return "?";
}

std::string to_string(RefKind k) {
  return k == RefKind::poisson ? "poisson" : "gue";
}

}  // namespace qw
