#include "qw2d/runner.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qw2d/critical.hpp"
#include "qw2d/disorder.hpp"
#include "qw2d/evolve.hpp"
#include "qw2d/scatter.hpp"
#include "qw2d/spectral.hpp"
#include "qw2d/stats.hpp"

namespace qw {
namespace {

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read back " + path);
  std::uint64_t h = 14695981039346656037ull;
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Collects output paths relative to the run directory, in write order.
struct Out {
  std::string dir;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    files.push_back(name);
    return dir + "/" + name;
  }
};

int workers_from(const Config& cfg) {
  int w = static_cast<int>(cfg.get_int("workers", 1));
  if (w < 1) throw std::runtime_error("config: workers: must be >= 1");
  return w;
}

DisorderKind kind_from(const std::string& name) {
  if (name == "fixed") return DisorderKind::fixed;
  if (name == "phase") return DisorderKind::phase;
  if (name == "magnetic") return DisorderKind::magnetic;
  if (name == "haar") return DisorderKind::haar;
  if (name == "binary") return DisorderKind::binary;
  throw std::runtime_error("config: disorder: unknown kind '" + name + "'");
}

BinaryParams binary_from(const Config& cfg) {
  BinaryParams b;
  b.theta1_a = cfg.get_angle("theta1_a", 0.625 * M_PI);
  b.theta2_a = cfg.get_angle("theta2_a", -0.125 * M_PI);
  if (cfg.has("dtheta")) {
    const double d = cfg.get_angle("dtheta", 0);
    b.theta1_b = b.theta1_a - d;
    b.theta2_b = b.theta2_a + d;
  } else {
    b.theta1_b = cfg.get_angle("theta1_b", b.theta1_a - 0.5 * M_PI);
    b.theta2_b = cfg.get_angle("theta2_b", b.theta2_a + 0.5 * M_PI);
  }
  b.p_a = cfg.get_double("p_a", 0.5);
  return b;
}

}  // namespace

DisorderSpec disorder_from_config(const Config& cfg) {
  DisorderSpec s;
  s.kind = kind_from(cfg.get("disorder", "phase"));
  s.fixed_angles.theta1 = cfg.get_angle("theta1", 0);
  s.fixed_angles.theta2 = cfg.get_angle("theta2", 0);
  s.fixed_angles.alpha1 = cfg.get_angle("alpha1", 0);
  s.fixed_angles.alpha2 = cfg.get_angle("alpha2", 0);
  s.fixed_angles.beta1 = cfg.get_angle("beta1", 0);
  s.fixed_angles.beta2 = cfg.get_angle("beta2", 0);
  s.binary_params = binary_from(cfg);
  s.seed = cfg.get_u64("seed", 1);
  return s;
}

namespace {

Basis variant_from(const Config& cfg) {
  const std::string v = cfg.get("variant", "square");
  if (v == "square") return Basis::rotated_square;
  if (v == "circle") return Basis::rotated_circle;
  throw std::runtime_error("config: variant: expected square or circle, got '" +
                           v + "'");
}

CutType cut_from(const std::string& name) {
  if (name == "none") return CutType::none;
  if (name == "a" || name == "A") return CutType::a;
  if (name == "b" || name == "B") return CutType::b;
  throw std::runtime_error("config: cut: expected none, a, or b, got '" +
                           name + "'");
}

SpacingBlock block_from(const std::string& name) {
  if (name == "square-ee") return SpacingBlock::square_ee;
  if (name == "square-oo") return SpacingBlock::square_oo;
  if (name == "circle-eo") return SpacingBlock::circle_eo;
  if (name == "circle-oe") return SpacingBlock::circle_oe;
  throw std::runtime_error(
      "config: block: expected square-ee, square-oo, circle-eo, or circle-oe, "
      "got '" + name + "'");
}

// "19x30:1000,39x60:2000" -> size specs.
std::vector<SizeSpec> parse_sizes(const std::string& text) {
  std::vector<SizeSpec> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = text.substr(pos, comma - pos);
    SizeSpec s;
    char tail;
    if (std::sscanf(tok.c_str(), "%dx%d:%d%c", &s.lx, &s.ly, &s.t_max,
                    &tail) != 3)
      throw std::runtime_error("config: sizes: expected LXxLY:TMAX, got '" +
                               tok + "'");
    out.push_back(s);
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (out.empty()) throw std::runtime_error("config: sizes: empty list");
  return out;
}

// Explicit `snapshots` list, else 2, 4, 8, ... capped at t_max.
std::vector<int> snapshot_schedule(const Config& cfg, int t_max) {
  if (cfg.has("snapshots")) return cfg.get_int_list("snapshots", {});
  std::vector<int> v;
  for (int t = 2; t < t_max; t *= 2) v.push_back(t);
  v.push_back(t_max);
  return v;
}

std::vector<int> default_powers(int lo, int hi) {
  std::vector<int> v;
  for (int x = lo; x <= hi; x *= 2) v.push_back(x);
  return v;
}

void write_fit_csv(const SpreadFit& fit, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f,
               "model,par_plus,par_minus,r2_plus,r2_minus,n_plus,n_minus,"
               "variance_measured,variance_predicted\n");
  std::fprintf(f, "%s,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g,%.17g\n",
               fit.model == SpreadModel::localized ? "localized" : "diffusive",
               fit.par_plus, fit.par_minus, fit.r2_plus, fit.r2_minus,
               fit.n_points_plus, fit.n_points_minus, fit.variance_measured,
               fit.variance_predicted);
  std::fclose(f);
}

void run_evolve(const Config& cfg, Out& out) {
  EvolveOptions opt;
  opt.variant = variant_from(cfg);
  opt.time_dependent = cfg.get_bool("time_dependent", false);
  opt.classical = cfg.get_bool("classical", false);
  opt.workers = workers_from(cfg);
  const int l1 = static_cast<int>(cfg.get_int("l_plus", 128));
  const int l2 = static_cast<int>(cfg.get_int("l_minus", 128));
  const int t_max = static_cast<int>(cfg.get_int("t_max", 256));
  const int realizations = static_cast<int>(cfg.get_int("realizations", 1));
  const std::vector<int> times = snapshot_schedule(cfg, t_max);
  const DisorderSpec spec = disorder_from_config(cfg);

  if (cfg.get_bool("compare", false)) {
    struct Mode {
      const char* name;
      bool td, cl;
    };
    const Mode modes[] = {{"coherent", false, false},
                          {"time_dependent", true, false},
                          {"stochastic", false, true}};
    std::FILE* f = std::fopen(out.path("compare.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot open compare.csv");
    std::fprintf(f, "mode,D_plus,D_minus,D_total,r2_plus,r2_minus,p_leave\n");
    for (const Mode& m : modes) {
      EvolveOptions o = opt;
      o.time_dependent = m.td;
      o.classical = m.cl;
      const EvolveResult res =
          run_ensemble(spec, realizations, l1, l2, t_max, times, o);
      PowerLawFit series = variance_series(res.snapshots);
      write_variance_csv(series,
                         out.path(std::string("variance_") + m.name + ".csv"));
      const SpreadFit fit = fit_diffusive(res.snapshots.back(), t_max);
      std::fprintf(f, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.name,
                   fit.par_plus, fit.par_minus, fit.par_plus + fit.par_minus,
                   fit.r2_plus, fit.r2_minus, res.p_leave);
    }
    std::fclose(f);
    return;
  }

  const EvolveResult res =
      run_ensemble(spec, realizations, l1, l2, t_max, times, opt);
  const PowerLawFit series = variance_series(res.snapshots);
  write_variance_csv(series, out.path("variance.csv"));
  write_distribution_csv(res.snapshots.back(), out.path("distribution.csv"));

  std::FILE* f = std::fopen(out.path("summary.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot open summary.csv");
  std::fprintf(f, "exponent,exponent_se,prefactor,p_leave\n");
  std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", series.exponent,
               series.exponent_se, series.prefactor, res.p_leave);
  std::fclose(f);

  const std::string fit_kind = cfg.get("fit", "none");
  if (fit_kind == "none") return;
  SpreadFit fit;
  if (fit_kind == "localized")
    fit = fit_localized(res.snapshots.back());
  else if (fit_kind == "diffusive")
    fit = fit_diffusive(res.snapshots.back(), t_max);
  else
    throw std::runtime_error(
        "config: fit: expected none, localized, or diffusive, got '" +
        fit_kind + "'");
  write_fit_csv(fit, out.path("fit.csv"));
}

void run_scatter(const Config& cfg, Out& out) {
  const int workers = workers_from(cfg);
  const std::string mode = cfg.get("mode", "single");
  const DisorderSpec spec = disorder_from_config(cfg);
  const int seeds = static_cast<int>(cfg.get_int("seeds", 1));

  if (mode == "single") {
    const int lx = static_cast<int>(cfg.get_int("l_x", 29));
    const int ly = static_cast<int>(cfg.get_int("l_y", 30));
    const int t_max = static_cast<int>(cfg.get_int("t_max", 8192));
    const CutType cut = cut_from(cfg.get("cut", "none"));
    const int cut_row0 = static_cast<int>(cfg.get_int("cut_row0", -1));

    ScalingResult rows;
    for (int i = 0; i < seeds; ++i) {
      DisorderSpec s = spec;
      s.seed = spec.seed + static_cast<std::uint64_t>(i);
      const ScatterGeometry geo = build_geometry(s, lx, ly, cut, cut_row0);
      const TransmissionSeries series =
          transmission_series(geo, t_max, workers);
      ScalingPoint pt;
      pt.theta1 = s.fixed_angles.theta1;
      pt.theta2 = s.fixed_angles.theta2;
      pt.cut = cut;
      pt.lx = lx;
      pt.ly = ly;
      pt.seed = s.seed;
      pt.tbar = averaged_transmission(series);
      rows.points.push_back(pt);
      if (i == 0) {
        if (cfg.get_bool("energy_resolved", false) ||
            cfg.get_bool("histogram", false)) {
          const EnergyResolved er = transmission_at_energy(series);
          if (cfg.get_bool("energy_resolved", false))
            write_energy_csv(er, out.path("energy.csv"));
          if (cfg.get_bool("histogram", false)) {
            const int bins =
                static_cast<int>(cfg.get_int("histogram_bins", 55));
            Histogram h(0.0, 1.1, bins);
            for (const Eigen::MatrixXcd& te : er.t_eps)
              for (double v : transmission_eigenvalues(te)) h.add(v);
            h.write_csv(out.path("eigenvalue_hist.csv"));
          }
        }
      }
    }
    write_scaling_csv(rows, out.path("transmission.csv"));
    return;
  }

  if (mode == "map") {
    const int lx = static_cast<int>(cfg.get_int("l_x", 19));
    const int ly = static_cast<int>(cfg.get_int("l_y", 30));
    const int t_max = static_cast<int>(cfg.get_int("t_max", 1000));
    const double th_min = cfg.get_angle("theta_min", 0.1 * M_PI);
    const double th_max = cfg.get_angle("theta_max", 0.9 * M_PI);
    const int steps = static_cast<int>(cfg.get_int("theta_steps", 9));
    if (steps < 1) throw std::runtime_error("config: theta_steps: must be >= 1");
    std::vector<double> grid(steps);
    for (int i = 0; i < steps; ++i)
      grid[i] = steps == 1
                    ? th_min
                    : th_min + (th_max - th_min) * i / (steps - 1);

    std::FILE* f = std::fopen(out.path("map.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot open map.csv");
    std::fprintf(f,
                 "theta1,theta2,T_A,T_B,T_none,nu_estimate,nu,flagged,"
                 "nu_clean\n");
    for (double t1 : grid)
      for (double t2 : grid) {
        double ta = 0, tb = 0, tn = 0;
        bool converged = true;
        for (int s = 0; s < seeds; ++s) {
          DisorderSpec d = spec;
          d.fixed_angles.theta1 = t1;
          d.fixed_angles.theta2 = t2;
          d.seed = spec.seed + static_cast<std::uint64_t>(s);
          auto tbar = [&](CutType cut) {
            return averaged_transmission(transmission_series(
                build_geometry(d, lx, ly, cut), t_max, workers));
          };
          const AveragedTransmission a = tbar(CutType::a);
          const AveragedTransmission b = tbar(CutType::b);
          tn += tbar(CutType::none).total;
          ta += a.total;
          tb += b.total;
          converged = converged && a.converged && b.converged;
        }
        ta /= seeds;
        tb /= seeds;
        tn /= seeds;
        InvariantEstimate est = invariant_from_transmission(ta, tb);
        est.flagged = est.flagged || !converged;
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n", t1,
                     t2, ta, tb, tn, est.estimate, est.nu, est.flagged ? 1 : 0,
                     clean_invariant(t1, t2));
      }
    std::fclose(f);
    return;
  }

  if (mode == "scaling") {
    const std::vector<SizeSpec> sizes = parse_sizes(cfg.get("sizes", ""));
    const CutType cut = cut_from(cfg.get("cut", "none"));
    const ScalingResult r = scaling_sweep(spec, sizes, seeds, cut, workers);
    write_scaling_csv(r, out.path("scaling.csv"));
    std::FILE* f = std::fopen(out.path("summary.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot open summary.csv");
    std::fprintf(f, "slope,classification\n");
    const char* label = r.classification == ScalingClass::insulating
                            ? "insulating"
                            : r.classification == ScalingClass::diffusive
                                  ? "diffusive"
                                  : "undetermined";
    std::fprintf(f, "%.17g,%s\n", r.slope, label);
    std::fclose(f);
    return;
  }

  throw std::runtime_error(
      "config: mode: expected single, map, or scaling, got '" + mode + "'");
}

void run_spectrum(const Config& cfg, Out& out) {
  const int workers = workers_from(cfg);
  const int l1 = static_cast<int>(cfg.get_int("l_plus", 48));
  const int l2 = static_cast<int>(cfg.get_int("l_minus", 84));
  const SpacingBlock block = block_from(cfg.get("block", "square-ee"));
  const int realizations = static_cast<int>(cfg.get_int("realizations", 1));
  const double margin = cfg.get_double("margin", 0.01);
  const DisorderSpec spec = disorder_from_config(cfg);

  std::vector<double> pooled;
  for (int i = 0; i < realizations; ++i) {
    DisorderSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    const CoinField coins = generate(s, l1, l2);
    const Eigen::VectorXcd lambda = eigenvalues_dense(
        build_u2_block(coins, block, kSpectralDimCap, workers));
    const SpacingEnsemble ens = spacings_from_block(lambda, block);
    pooled.insert(pooled.end(), ens.s.begin(), ens.s.end());
  }
  write_spacings_csv(pooled, out.path("spacings.csv"));

  Histogram h(0.0, 4.0, 50);
  for (double v : pooled) h.add(v);
  h.write_csv(out.path("spacing_histogram.csv"));

  const ClassifyResult cls = classify_statistics(pooled, margin);
  std::FILE* f = std::fopen(out.path("summary.csv").c_str(), "w");
  if (!f) throw std::runtime_error("cannot open summary.csv");
  std::fprintf(f,
               "block,n_block,samples,mean_s,ks_poisson,ks_gue,"
               "classification\n");
  std::fprintf(f, "%s,%d,%zu,%.17g,%.17g,%.17g,%s\n",
               to_string(block).c_str(), l1 * l2, pooled.size(), mean(pooled),
               cls.ks_poisson, cls.ks_gue, to_string(cls.label).c_str());
  std::fclose(f);

  if (cfg.get_bool("tail", false)) {
    const TailFit tf = tail_analysis(pooled, cfg.get_double("s_min", 2.5));
    std::FILE* g = std::fopen(out.path("tail.csv").c_str(), "w");
    if (!g) throw std::runtime_error("cannot open tail.csv");
    std::fprintf(g, "rate,rate_se,curvature,curvature_se,exponential,n_tail\n");
    std::fprintf(g, "%.17g,%.17g,%.17g,%.17g,%d,%d\n", tf.rate, tf.rate_se,
                 tf.curvature, tf.curvature_se, tf.exponential ? 1 : 0,
                 tf.n_tail);
    std::fclose(g);
  }
}

void run_critical(const Config& cfg, Out& out) {
  const int workers = workers_from(cfg);
  const std::string method = cfg.get("method", "all");
  const bool want_auto = method == "all" || method == "autocorrelation";
  const bool want_fractal = method == "all" || method == "fractal";
  const bool want_return = method == "all" || method == "return";
  if (!want_auto && !want_fractal && !want_return)
    throw std::runtime_error(
        "config: method: expected all, autocorrelation, fractal, or return, "
        "got '" + method + "'");
  const DisorderSpec spec = disorder_from_config(cfg);
  std::vector<EtaEstimate> estimates;
  EtaFitOptions fopt;
  fopt.mean_of_logs = cfg.get_bool("mean_of_logs", true);

  if (want_auto || want_fractal) {
    const int l1 = static_cast<int>(cfg.get_int("l_plus", 128));
    const int l2 = static_cast<int>(cfg.get_int("l_minus", 128));
    const int count = static_cast<int>(cfg.get_int("count", 100));
    const int per = static_cast<int>(cfg.get_int("per_realization", 10));
    const double target = cfg.get_angle("target_eps", 0);
    const std::vector<EigenstateDistribution> states =
        eigenstate_distributions(spec, l1, l2, count, target, per, workers);
    if (want_auto) {
      const std::vector<int> rv =
          cfg.get_int_list("r_values", default_powers(1, l1 / 2));
      const SeriesTable table = autocorrelation_table(states, rv);
      write_series_csv(table, "r", "lnR", out.path("r_lnR.csv"));
      estimates.push_back(eta_from_autocorrelation(table, l1, fopt));
    }
    if (want_fractal) {
      std::vector<int> lv = cfg.get_int_list("l_values", {});
      if (lv.empty())
        for (int x = 1; x <= l1 / 2; x *= 2)
          if (l1 % x == 0 && l2 % x == 0) lv.push_back(x);
      const SeriesTable table = fractal_table(states, lv);
      write_series_csv(table, "l", "ln_p2", out.path("l_lnp2.csv"));
      estimates.push_back(eta_from_fractal(table, fopt));
    }
  }

  if (want_return) {
    const int rl = static_cast<int>(cfg.get_int("return_l", 257));
    const int t_max = static_cast<int>(cfg.get_int("t_max_return", 2048));
    const int realizations =
        static_cast<int>(cfg.get_int("return_realizations", 200));
    std::vector<int> times = cfg.get_int_list("return_times", {});
    if (times.empty()) {
      times = default_powers(4, t_max);
      if (times.back() != t_max && t_max % 2 == 0) times.push_back(t_max);
    }
    EvolveOptions opt;
    opt.workers = workers;
    const SeriesTable table =
        return_table(spec, realizations, rl, rl, times, opt);
    write_series_csv(table, "t", "ln_p0", out.path("t_lnp0.csv"));
    estimates.push_back(eta_from_return(table, fopt));
  }

  write_eta_csv(estimates, out.path("eta.csv"));
}

void run_binary_sweep(const Config& cfg, Out& out) {
  const int workers = workers_from(cfg);
  const std::vector<double> one{1.0};
  const std::vector<double> pa_grid = cfg.get_angle_list("p_a_grid", one);
  const std::vector<double> dt_grid =
      cfg.get_angle_list("dtheta_grid", {0.5 * M_PI});
  DisorderSpec base;
  base.kind = DisorderKind::binary;
  base.binary_params = binary_from(cfg);
  base.seed = cfg.get_u64("seed", 1);
  const double t1a = base.binary_params.theta1_a;
  const double t2a = base.binary_params.theta2_a;

  if (cfg.get_bool("transmission", true)) {
    const int lx = static_cast<int>(cfg.get_int("l_x", 39));
    const int ly = static_cast<int>(cfg.get_int("l_y", 60));
    const int t_max = static_cast<int>(cfg.get_int("t_max", 2000));
    const int seeds = static_cast<int>(cfg.get_int("seeds", 4));
    std::FILE* f = std::fopen(out.path("sweep.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot open sweep.csv");
    std::fprintf(f,
                 "p_a,dtheta,theta1_b,theta2_b,cut,seed,T_even,T_odd,"
                 "T_total\n");
    for (double dt : dt_grid)
      for (double pa : pa_grid) {
        DisorderSpec spec = base;
        spec.binary_params.theta1_b = t1a - dt;
        spec.binary_params.theta2_b = t2a + dt;
        spec.binary_params.p_a = pa;
        for (CutType cut : {CutType::b, CutType::none})
          for (int s = 0; s < seeds; ++s) {
            DisorderSpec d = spec;
            d.seed = base.seed + static_cast<std::uint64_t>(s);
            const AveragedTransmission tb = averaged_transmission(
                transmission_series(build_geometry(d, lx, ly, cut), t_max,
                                    workers));
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%s,%" PRIu64
                            ",%.17g,%.17g,%.17g\n",
                         pa, dt, spec.binary_params.theta1_b,
                         spec.binary_params.theta2_b, to_string(cut).c_str(),
                         d.seed, tb.even, tb.odd, tb.total);
          }
      }
    std::fclose(f);
  }

  if (cfg.get_bool("spread", false)) {
    const int sl = static_cast<int>(cfg.get_int("spread_l", 200));
    const int st = static_cast<int>(cfg.get_int("spread_t", 170));
    const int realizations =
        static_cast<int>(cfg.get_int("spread_realizations", 100));
    EvolveOptions opt;
    opt.workers = workers;
    std::FILE* f = std::fopen(out.path("spread.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot open spread.csv");
    std::fprintf(f, "p_a,dtheta,rms,variance,p_leave\n");
    for (double dt : dt_grid)
      for (double pa : pa_grid) {
        DisorderSpec spec = base;
        spec.binary_params.theta1_b = t1a - dt;
        spec.binary_params.theta2_b = t2a + dt;
        spec.binary_params.p_a = pa;
        const EvolveResult res =
            run_ensemble(spec, realizations, sl, sl, st, {st}, opt);
        const PositionDistribution& d = res.snapshots.back();
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", pa, dt, d.rms(),
                     d.variance(), res.p_leave);
      }
    std::fclose(f);
  }
}

void write_manifest(const Config& cfg, Out& out) {
  nlohmann::json m;
  m["library"] = "qw2d";
  m["version"] = kLibraryVersion;
  m["config"] = nlohmann::json::object();
  for (const auto& [k, v] : cfg.kv) m["config"][k] = v;
  nlohmann::json files = nlohmann::json::array();
  for (const std::string& f : out.files)
    files.push_back({{"file", f},
                     {"fnv1a64", hex64(fnv1a64_file(out.dir + "/" + f))}});
  m["outputs"] = files;
  std::ofstream f(out.dir + "/manifest.json");
  if (!f) throw std::runtime_error("cannot open manifest.json");
  f << m.dump(2) << "\n";
  out.files.push_back("manifest.json");
}

}  // namespace

ValidationReport validate_config(const Config& cfg) {
  ValidationReport rep;
  auto err = [&rep](const std::string& field, const std::string& msg) {
    rep.errors.push_back(field + ": " + msg);
  };
  auto warn = [&rep](const std::string& field, const std::string& msg) {
    rep.warnings.push_back(field + ": " + msg);
  };
  // Strips the "config: " prefix thrown by field lookups.
  auto check = [&rep](auto&& fn) {
    try {
      fn();
      return true;
    } catch (const std::exception& e) {
      std::string msg = e.what();
      if (msg.rfind("config: ", 0) == 0) msg = msg.substr(8);
      rep.errors.push_back(msg);
      return false;
    }
  };

  const std::string exp = cfg.get("experiment", "");
  if (exp.empty()) {
    err("experiment", "required (evolve, scatter, spectrum, critical, or "
                      "binary-sweep)");
    return rep;
  }
  if (exp != "evolve" && exp != "scatter" && exp != "spectrum" &&
      exp != "critical" && exp != "binary-sweep") {
    err("experiment", "unknown experiment '" + exp + "'");
    return rep;
  }

  check([&] { disorder_from_config(cfg); });
  check([&] { workers_from(cfg); });

  std::set<std::string> allowed = {
      "experiment", "disorder", "seed",     "workers",  "theta1",
      "theta2",     "alpha1",   "alpha2",   "beta1",    "beta2",
      "theta1_a",   "theta2_a", "theta1_b", "theta2_b", "dtheta",
      "p_a"};

  if (exp == "evolve") {
    allowed.insert({"variant", "classical", "time_dependent", "l_plus",
                    "l_minus", "t_max", "realizations", "snapshots", "fit",
                    "compare"});
    check([&] { variant_from(cfg); });
    const long long l1 = cfg.get_int("l_plus", 128);
    const long long l2 = cfg.get_int("l_minus", 128);
    if (l1 < 4 || l2 < 4) err("l_plus", "extents must be >= 4");
    const long long t_max = cfg.get_int("t_max", 256);
    if (t_max < 1) err("t_max", "must be >= 1");
    if (cfg.get_int("realizations", 1) < 1)
      err("realizations", "must be >= 1");
    check([&] {
      const std::vector<int> v =
          snapshot_schedule(cfg, static_cast<int>(t_max));
      for (size_t i = 0; i < v.size(); ++i)
        if (v[i] < 0 || v[i] > t_max || (i > 0 && v[i] <= v[i - 1]))
          throw std::runtime_error(
              "config: snapshots: must be ascending within [0, t_max]");
    });
    const std::string fit = cfg.get("fit", "none");
    if (fit != "none" && fit != "localized" && fit != "diffusive")
      err("fit", "expected none, localized, or diffusive");
  } else if (exp == "scatter") {
    allowed.insert({"mode", "cut", "cut_row0", "l_x", "l_y", "t_max", "seeds",
                    "energy_resolved", "histogram", "histogram_bins",
                    "theta_min", "theta_max", "theta_steps", "sizes"});
    const std::string mode = cfg.get("mode", "single");
    if (mode != "single" && mode != "map" && mode != "scaling")
      err("mode", "expected single, map, or scaling");
    check([&] { cut_from(cfg.get("cut", "none")); });
    if (cfg.get_int("seeds", 1) < 1) err("seeds", "must be >= 1");
    if (mode == "scaling") {
      check([&] {
        for (const SizeSpec& s : parse_sizes(cfg.get("sizes", ""))) {
          if (s.ly % 2 != 0 || s.ly < 2)
            throw std::runtime_error(
                "config: sizes: L_y must be even and >= 2");
          if (s.lx < 1 || s.t_max < 1)
            throw std::runtime_error(
                "config: sizes: L_x and TMAX must be >= 1");
        }
      });
    } else {
      const long long lx = cfg.get_int("l_x", mode == "map" ? 19 : 29);
      const long long ly = cfg.get_int("l_y", 30);
      const long long t_max =
          cfg.get_int("t_max", mode == "map" ? 1000 : 8192);
      if (ly % 2 != 0 || ly < 2)
        err("l_y", "must be even and >= 2 (transverse channels pair up)");
      if (lx < 1) err("l_x", "must be >= 1");
      if (t_max < 1) err("t_max", "must be >= 1");
      if (t_max < 50 * lx)
        warn("t_max", "below ~50 L_x; totals may miss the 99% absorption "
                      "threshold");
    }
  } else if (exp == "spectrum") {
    allowed.insert({"l_plus", "l_minus", "block", "realizations", "margin",
                    "tail", "s_min"});
    check([&] { block_from(cfg.get("block", "square-ee")); });
    const long long l1 = cfg.get_int("l_plus", 48);
    const long long l2 = cfg.get_int("l_minus", 84);
    if (l1 % 2 != 0 || l2 % 2 != 0 || l1 < 2 || l2 < 2)
      err("l_plus", "cell extents must be even and >= 2");
    else if (l1 * l2 > kSpectralDimCap)
      err("l_plus", "block dimension " + std::to_string(l1 * l2) +
                        " exceeds the dense cap " +
                        std::to_string(kSpectralDimCap));
    if (cfg.get_int("realizations", 1) < 1)
      err("realizations", "must be >= 1");
  } else if (exp == "critical") {
    allowed.insert({"method", "l_plus", "l_minus", "count", "per_realization",
                    "target_eps", "r_values", "l_values", "mean_of_logs",
                    "return_l", "t_max_return", "return_realizations",
                    "return_times"});
    const std::string method = cfg.get("method", "all");
    if (method != "all" && method != "autocorrelation" &&
        method != "fractal" && method != "return")
      err("method", "expected all, autocorrelation, fractal, or return");
    if (method != "return") {
      const long long l1 = cfg.get_int("l_plus", 128);
      const long long l2 = cfg.get_int("l_minus", 128);
      if (l1 % 2 != 0 || l2 % 2 != 0 || l1 < 4 || l2 < 4)
        err("l_plus", "cell extents must be even and >= 4");
      else if (l1 * l2 > 65536)
        err("l_plus", "block dimension " + std::to_string(l1 * l2) +
                          " exceeds the sparse cap 65536");
      if (cfg.get_int("count", 100) < 1) err("count", "must be >= 1");
      if (cfg.get_int("per_realization", 10) < 1)
        err("per_realization", "must be >= 1");
    }
    if (method == "all" || method == "return") {
      if (cfg.get_int("return_l", 257) < 8) err("return_l", "must be >= 8");
      if (cfg.get_int("return_realizations", 200) < 1)
        err("return_realizations", "must be >= 1");
      check([&] {
        for (int t : cfg.get_int_list("return_times", {}))
          if (t < 2 || t % 2 != 0)
            throw std::runtime_error(
                "config: return_times: origin-parity times must be even and "
                ">= 2");
      });
    }
  } else if (exp == "binary-sweep") {
    allowed.insert({"p_a_grid", "dtheta_grid", "transmission", "spread",
                    "l_x", "l_y", "t_max", "seeds", "spread_l", "spread_t",
                    "spread_realizations"});
    check([&] {
      for (double p : cfg.get_angle_list("p_a_grid", {1.0}))
        if (p < 0 || p > 1)
          throw std::runtime_error(
              "config: p_a_grid: probabilities must lie in [0, 1]");
    });
    check([&] { cfg.get_angle_list("dtheta_grid", {0.5 * M_PI}); });
    if (cfg.get_bool("transmission", true)) {
      const long long ly = cfg.get_int("l_y", 60);
      if (ly % 2 != 0 || ly < 2) err("l_y", "must be even and >= 2");
    }
    if (!cfg.get_bool("transmission", true) &&
        !cfg.get_bool("spread", false))
      warn("transmission", "both probes disabled; run writes only the "
                           "manifest");
  }

  if (cfg.get("disorder", "phase") == "binary" && cfg.has("theta1_b") &&
      !cfg.has("dtheta")) {
    const double t1a = cfg.get_angle("theta1_a", 0.625 * M_PI);
    const double t2a = cfg.get_angle("theta2_a", -0.125 * M_PI);
    const double t1b = cfg.get_angle("theta1_b", t1a - 0.5 * M_PI);
    const double t2b = cfg.get_angle("theta2_b", t2a + 0.5 * M_PI);
    if (std::abs((t2b - t2a) - (t1a - t1b)) > 1e-9)
      warn("theta2_b", "breaks the locking theta2B - theta2A = theta1A - "
                       "theta1B; the binary mixture is no longer chiral");
  }

  for (const auto& [k, v] : cfg.kv)
    if (!allowed.count(k)) warn(k, "unknown key (ignored)");

  return rep;
}

std::vector<std::string> run_experiment(const Config& cfg,
                                        const std::string& out_dir) {
  const ValidationReport rep = validate_config(cfg);
  if (!rep.ok()) {
    std::string msg = "invalid config: " + rep.errors.front();
    if (rep.errors.size() > 1)
      msg += " (+" + std::to_string(rep.errors.size() - 1) + " more)";
    throw std::runtime_error(msg);
  }
  std::filesystem::create_directories(out_dir);
  Out out{out_dir, {}};
  const std::string exp = cfg.get("experiment", "");
  if (exp == "evolve")
    run_evolve(cfg, out);
  else if (exp == "scatter")
    run_scatter(cfg, out);
  else if (exp == "spectrum")
    run_spectrum(cfg, out);
  else if (exp == "critical")
    run_critical(cfg, out);
  else
    run_binary_sweep(cfg, out);
  write_manifest(cfg, out);
  return out.files;
}

}  // namespace qw
