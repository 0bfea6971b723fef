#include "qw2d/critical.hpp"

#include "qw2d/arnoldi.hpp"
#include "qw2d/parallel.hpp"
#include "qw2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qw {

// Each input (cell, spin) scatters to exactly four amplitudes.
Eigen::SparseMatrix<cplx> sparse_step_square(const CoinField& coins) {
  const int l1 = coins.l1, l2 = coins.l2;
  const long dim = 2L * l1 * l2;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(4 * dim);
  const StepOp op = compile_step(coins, Basis::rotated_square);
  auto cell = [&](int i1, int i2) {
    return static_cast<size_t>(modulo(i2, l2)) * l1 + modulo(i1, l1);
  };
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1) {
      const size_t c = cell(i1, i2);
      const size_t cu1 = cell(i1, i2 - 1);  // S1 moves up to (n+, n- - 1)
      const size_t cd1 = cell(i1 - 1, i2);  // S1 moves down to (n+ - 1, n-)
      const size_t cu2 = cell(i1 + 1, i2);  // cu1 + (1, 1) after S2
      const size_t cdu = cell(i1, i2 + 1);  // cd1 + (1, 1) after S2
      for (int s = 0; s < 2; ++s) {
        const long col = 2 * c + s;
        const cplx a_up = op.r1[4 * c + s];      // R1 row 0
        const cplx a_dn = op.r1[4 * c + 2 + s];  // R1 row 1
        trip.emplace_back(2 * cu2 + 0, col, op.f[cu2] * op.r2[4 * cu1 + 0] * a_up);
        trip.emplace_back(2 * cu1 + 1, col, op.f[cu1] * op.r2[4 * cu1 + 2] * a_up);
        trip.emplace_back(2 * cdu + 0, col, op.f[cdu] * op.r2[4 * cd1 + 1] * a_dn);
        trip.emplace_back(2 * cd1 + 1, col, op.f[cd1] * op.r2[4 * cd1 + 3] * a_dn);
      }
    }
  Eigen::SparseMatrix<cplx> u(dim, dim);
  u.setFromTriplets(trip.begin(), trip.end());
  return u;
}

namespace {

// Offsets of even-parity cells, row-major, and the inverse map.
void parity_maps(int l1, int l2, std::vector<size_t>& cells,
                 std::vector<long>& pos) {
  cells.clear();
  pos.assign(static_cast<size_t>(l1) * l2, -1);
  for (int i2 = 0; i2 < l2; ++i2)
    for (int i1 = 0; i1 < l1; ++i1)
      if ((i1 + i2) % 2 == 0) {
        pos[static_cast<size_t>(i2) * l1 + i1] = static_cast<long>(cells.size());
        cells.push_back(2 * (static_cast<size_t>(i2) * l1 + i1));
      }
}

Eigen::SparseMatrix<cplx> even_block_of_u2(const Eigen::SparseMatrix<cplx>& u,
                                           const std::vector<size_t>& cells,
                                           const std::vector<long>& pos) {
  const Eigen::SparseMatrix<cplx> u2 = (u * u).pruned();
  const long nblk = 2L * cells.size();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(16 * nblk);
  for (size_t j = 0; j < cells.size(); ++j)
    for (int sp = 0; sp < 2; ++sp) {
      const long col = cells[j] + sp;
      for (Eigen::SparseMatrix<cplx>::InnerIterator it(u2, col); it; ++it) {
        const long cell_pos = pos[it.row() / 2];
        if (cell_pos < 0)
          throw std::runtime_error("even_block_of_u2: parity leaked");
        trip.emplace_back(2 * cell_pos + (it.row() & 1), 2 * j + sp, it.value());
      }
    }
  Eigen::SparseMatrix<cplx> b(nblk, nblk);
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

}  // namespace

std::vector<EigenstateDistribution> eigenstate_distributions(
    const DisorderSpec& spec, int l1, int l2, int count, double target_eps,
    int per_realization, int workers) {
  if (l1 % 2 != 0 || l2 % 2 != 0)
    throw std::runtime_error("eigenstate_distributions: extents must be even");
  if (count < 1 || per_realization < 1)
    throw std::runtime_error("eigenstate_distributions: bad counts");
  const int n_real = (count + per_realization - 1) / per_realization;
  std::vector<std::vector<EigenstateDistribution>> buckets(n_real);
  parallel_for(n_real, workers, [&](int ri) {
    DisorderSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(ri);
    const CoinField coins = generate(s, l1, l2);
    std::vector<size_t> cells;
    std::vector<long> pos;
    parity_maps(l1, l2, cells, pos);
    const Eigen::SparseMatrix<cplx> u = sparse_step_square(coins);
    const Eigen::SparseMatrix<cplx> b = even_block_of_u2(u, cells, pos);
    // Radially outside the unit circle at the target angle of U^2.  The
    // offset tracks the mean level spacing: much further out, the top of
    // the shift-inverted spectrum degenerates into a cluster the Krylov
    // iteration cannot split.
    const double offset =
        std::min(0.04, 8.0 * 2.0 * M_PI / static_cast<double>(b.rows()));
    const cplx sigma = std::polar(1.0 + offset, -2.0 * target_eps);
    const EigsResult eig =
        shift_invert_eigs(b, per_realization, sigma, 0, 1e-9, s.seed + 0x9e);
    const StepOp op = compile_step(coins, Basis::rotated_square);
    for (int q = 0; q < per_realization; ++q) {
      SpinorField psi1(Basis::rotated_square, l1, l2);
      for (size_t j = 0; j < cells.size(); ++j) {
        psi1.amp[cells[j]] = eig.vectors(2 * j, q);
        psi1.amp[cells[j] + 1] = eig.vectors(2 * j + 1, q);
      }
      SpinorField psi2 = psi1;
      BoundaryCondition bc = BoundaryCondition::periodic();
      apply_timestep(psi2, op, bc);
      EigenstateDistribution d;
      d.l1 = l1;
      d.l2 = l2;
      d.eps = -std::arg(eig.values[q]) / 2.0;
      d.seed = s.seed;
      d.p.resize(static_cast<size_t>(l1) * l2);
      double tot = 0;
      for (size_t i = 0; i < d.p.size(); ++i) {
        d.p[i] = 0.5 * (std::norm(psi1.amp[2 * i]) + std::norm(psi1.amp[2 * i + 1]) +
                        std::norm(psi2.amp[2 * i]) + std::norm(psi2.amp[2 * i + 1]));
        tot += d.p[i];
      }
      if (std::abs(tot - 1.0) > 1e-10)
        throw std::runtime_error("eigenstate_distributions: pair not normalized");
      buckets[ri].push_back(std::move(d));
    }
  });
  std::vector<EigenstateDistribution> out;
  out.reserve(count);
  for (auto& bk : buckets)
    for (auto& d : bk) {
      if (static_cast<int>(out.size()) == count) break;
      out.push_back(std::move(d));
    }
  return out;
}

std::vector<double> autocorrelation(const EigenstateDistribution& dist,
                                    const std::vector<int>& r_values) {
  std::vector<double> out(r_values.size());
  for (size_t k = 0; k < r_values.size(); ++k) {
    const int r = r_values[k];
    if (r < 0 || r >= dist.l1)
      throw std::runtime_error("autocorrelation: r out of [0, L+)");
    double acc = 0;
    for (int i2 = 0; i2 < dist.l2; ++i2)
      for (int i1 = 0; i1 < dist.l1; ++i1)
        acc += dist.p[dist.at(i1, i2)] * dist.p[dist.at((i1 + r) % dist.l1, i2)];
    out[k] = acc;
  }
  return out;
}

double coarse_grain_moment(const EigenstateDistribution& dist, int l) {
  if (l < 1 || dist.l1 % l != 0 || dist.l2 % l != 0)
    throw std::runtime_error("coarse_grain_moment: box side must divide extents");
  double acc = 0;
  for (int b2 = 0; b2 < dist.l2; b2 += l)
    for (int b1 = 0; b1 < dist.l1; b1 += l) {
      double box = 0;
      for (int i2 = b2; i2 < b2 + l; ++i2)
        for (int i1 = b1; i1 < b1 + l; ++i1) box += dist.p[dist.at(i1, i2)];
      acc += box * box;
    }
  return static_cast<double>(l) * l / (static_cast<double>(dist.l1) * dist.l2) *
         acc;
}

SeriesTable autocorrelation_table(
    const std::vector<EigenstateDistribution>& states,
    const std::vector<int>& r_values) {
  SeriesTable t;
  t.grid.assign(r_values.begin(), r_values.end());
  for (const EigenstateDistribution& d : states)
    t.rows.push_back(autocorrelation(d, r_values));
  return t;
}

SeriesTable fractal_table(const std::vector<EigenstateDistribution>& states,
                          const std::vector<int>& l_values) {
  SeriesTable t;
  t.grid.assign(l_values.begin(), l_values.end());
  for (const EigenstateDistribution& d : states) {
    std::vector<double> row(l_values.size());
    for (size_t k = 0; k < l_values.size(); ++k)
      row[k] = coarse_grain_moment(d, l_values[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

SeriesTable return_table(const DisorderSpec& spec, int realizations, int l1,
                         int l2, const std::vector<int>& times,
                         const EvolveOptions& opt) {
  if (realizations < 1) throw std::runtime_error("return_table: no realizations");
  for (int t : times)
    if (t % 2 != 0)
      throw std::runtime_error("return_table: times must be even (occupied parity)");
  SeriesTable t;
  t.grid.assign(times.begin(), times.end());
  t.rows.resize(realizations);
  parallel_for(realizations, opt.workers, [&](int i) {
    DisorderSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    EvolveOptions o = opt;
    o.workers = 1;
    t.rows[i] = return_series(s, l1, l2, times, o);
  });
  return t;
}

namespace {

std::vector<double> column_log_summary(const SeriesTable& t,
                                       const std::vector<size_t>& keep,
                                       bool mean_of_logs) {
  std::vector<double> out;
  out.reserve(keep.size());
  for (size_t j : keep) {
    double acc = 0;
    int n = 0;
    for (const std::vector<double>& row : t.rows) {
      if (row.size() != t.grid.size())
        throw std::runtime_error("eta fit: ragged series table");
      const double v = row[j];
      if (v > 0) {
        acc += mean_of_logs ? std::log(v) : v;
        ++n;
      }
    }
    if (n == 0)
      throw std::runtime_error("eta fit: no positive samples at a grid point");
    out.push_back(mean_of_logs ? acc / n : std::log(acc / n));
  }
  return out;
}

EtaEstimate fit_kept(const SeriesTable& t, const std::vector<size_t>& keep,
                     EtaMethod method, const EtaFitOptions& opt) {
  if (keep.size() < 4)
    throw std::runtime_error("eta fit: fewer than 4 points after exclusions");
  std::vector<double> x;
  x.reserve(keep.size());
  for (size_t j : keep) {
    if (t.grid[j] <= 0) throw std::runtime_error("eta fit: nonpositive grid");
    x.push_back(std::log(t.grid[j]));
  }
  const std::vector<double> y = column_log_summary(t, keep, opt.mean_of_logs);
  const LineFit f = linear_fit(x, y);
  EtaEstimate e;
  e.method = method;
  e.slope = f.slope;
  e.slope_se = f.slope_se;
  e.r2 = f.r2;
  e.n_samples = static_cast<int>(t.rows.size());
  switch (method) {
    case EtaMethod::autocorrelation:
      e.eta = -f.slope;
      e.ci = 3.0 * f.slope_se;
      break;
    case EtaMethod::fractal:
      e.eta = 4.0 - f.slope;
      e.ci = 3.0 * f.slope_se;
      break;
    case EtaMethod::return_probability:
      e.eta = 2.0 * (1.0 + f.slope);
      e.ci = 6.0 * f.slope_se;
      break;
  }
  for (size_t j : keep) e.grid.push_back(t.grid[j]);
  e.mean_log = y;
  return e;
}

void check_ascending(const SeriesTable& t) {
  for (size_t j = 1; j < t.grid.size(); ++j)
    if (t.grid[j] <= t.grid[j - 1])
      throw std::runtime_error("eta fit: grid must be ascending");
}

}  // namespace

EtaEstimate eta_from_autocorrelation(const SeriesTable& table, int l_plus,
                                     const EtaFitOptions& opt) {
  check_ascending(table);
  std::vector<size_t> keep;
  for (size_t j = 0; j < table.grid.size(); ++j)
    if (static_cast<int>(j) >= opt.drop_smallest &&
        table.grid[j] <= l_plus * opt.r_max_fraction + 1e-9)
      keep.push_back(j);
  return fit_kept(table, keep, EtaMethod::autocorrelation, opt);
}

EtaEstimate eta_from_fractal(const SeriesTable& table,
                             const EtaFitOptions& opt) {
  check_ascending(table);
  std::vector<size_t> keep;
  for (size_t j = 0; j < table.grid.size(); ++j)
    if (static_cast<int>(j) >= opt.drop_smallest) keep.push_back(j);
  return fit_kept(table, keep, EtaMethod::fractal, opt);
}

EtaEstimate eta_from_return(const SeriesTable& table, const EtaFitOptions& opt) {
  check_ascending(table);
  if (table.grid.size() < 4)
    throw std::runtime_error("eta_from_return: need at least 4 time points");
  std::vector<size_t> keep;
  for (size_t j = 0; j < table.grid.size(); ++j)
    if (table.grid[j] >= opt.t_min - 1e-9) keep.push_back(j);
  return fit_kept(table, keep, EtaMethod::return_probability, opt);
}

void write_series_csv(const SeriesTable& table, const std::string& col_grid,
                      const std::string& col_value, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << col_grid << ',' << col_value << '\n';
  char buf[80];
  for (const std::vector<double>& row : table.rows)
    for (size_t j = 0; j < table.grid.size(); ++j) {
      if (j >= row.size() || row[j] <= 0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", table.grid[j],
                    std::log(row[j]));
      f << buf;
    }
}

void write_eta_csv(const std::vector<EtaEstimate>& estimates,
                   const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "method,eta,ci,slope,slope_err,n_samples\n";
  char buf[160];
  for (const EtaEstimate& e : estimates) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%d\n",
                  to_string(e.method).c_str(), e.eta, e.ci, e.slope, e.slope_se,
                  e.n_samples);
    f << buf;
  }
}

std::string to_string(EtaMethod m) {
  switch (m) {
    case EtaMethod::autocorrelation: return "autocorrelation";
    case EtaMethod::fractal: return "fractal";
    case EtaMethod::return_probability: return "return";
  }
  return "?";
}

}  // namespace qw
