#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "qw2d/config.hpp"
#include "qw2d/disorder.hpp"
#include "qw2d/evolve.hpp"
#include "qw2d/presets.hpp"
#include "qw2d/runner.hpp"
#include "qw2d/scatter.hpp"
#include "qw2d/spectral.hpp"

namespace py = pybind11;

namespace {

qw::Config config_from_dict(const py::dict& d) {
  qw::Config cfg;
  for (auto item : d)
    cfg.set(py::str(item.first).cast<std::string>(),
            py::str(item.second).cast<std::string>());
  return cfg;
}

py::dict dict_from_config(const qw::Config& cfg) {
  py::dict d;
  for (const auto& [k, v] : cfg.kv) d[py::str(k)] = v;
  return d;
}

// Probabilities as an (l_minus, l_plus) array: row index is n_-, column n_+.
py::array_t<double> grid_array(const std::vector<double>& p, int l1, int l2) {
  py::array_t<double> a({l2, l1});
  std::copy(p.begin(), p.end(), a.mutable_data());
  return a;
}

}  // namespace

PYBIND11_MODULE(_qw2d, m) {
  m.doc() =
      "2D split-step quantum walks: time evolution, scattering invariants, "
      "level statistics, critical exponents";
  m.attr("__version__") = qw::kLibraryVersion;

  m.def("parse_angle", &qw::parse_angle, py::arg("text"),
        "Parse '0.2pi'-style or plain-radian angle text.");

  m.def("clean_invariant", &qw::clean_invariant, py::arg("theta1"),
        py::arg("theta2"),
        "Bulk invariant sgn[sin(t1 - t2) sin(t1 + t2)]; 0 on critical lines.");

  m.def(
      "presets",
      [] { return qw::preset_catalog(); },
      "List of (name, description) preset pairs.");

  m.def(
      "preset", [](const std::string& name) { return dict_from_config(qw::preset(name)); },
      py::arg("name"), "Named parameter set as a config dict.");

  m.def(
      "validate",
      [](const py::dict& d) {
        const qw::ValidationReport rep =
            qw::validate_config(config_from_dict(d));
        return py::make_tuple(rep.errors, rep.warnings);
      },
      py::arg("config"), "Returns (errors, warnings) for a config dict.");

  m.def(
      "run_experiment",
      [](const py::dict& d, const std::string& out_dir) {
        return qw::run_experiment(config_from_dict(d), out_dir);
      },
      py::arg("config"), py::arg("out_dir"),
      "Run the configured experiment; returns written file names, manifest "
      "last.");

  m.def(
      "evolve_distribution",
      [](const py::dict& d) {
        const qw::Config cfg = config_from_dict(d);
        qw::EvolveOptions opt;
        opt.variant = cfg.get("variant", "square") == "circle"
                          ? qw::Basis::rotated_circle
                          : qw::Basis::rotated_square;
        opt.time_dependent = cfg.get_bool("time_dependent", false);
        opt.classical = cfg.get_bool("classical", false);
        opt.workers = static_cast<int>(cfg.get_int("workers", 1));
        const int l1 = static_cast<int>(cfg.get_int("l_plus", 64));
        const int l2 = static_cast<int>(cfg.get_int("l_minus", 64));
        const int t_max = static_cast<int>(cfg.get_int("t_max", 64));
        const int realizations =
            static_cast<int>(cfg.get_int("realizations", 1));
        const qw::EvolveResult res =
            qw::run_ensemble(qw::disorder_from_config(cfg), realizations, l1,
                             l2, t_max, {t_max}, opt);
        const qw::PositionDistribution& dist = res.snapshots.back();
        py::dict meta;
        meta["t"] = dist.t;
        meta["origin"] = py::make_tuple(dist.origin1, dist.origin2);
        meta["p_leave"] = res.p_leave;
        meta["variance"] = dist.variance();
        meta["rms"] = dist.rms();
        meta["realizations"] = dist.realizations_averaged;
        return py::make_tuple(grid_array(dist.p, l1, l2), meta);
      },
      py::arg("config"),
      "Final spin-summed distribution of a point source as an "
      "(l_minus, l_plus) array plus metadata.");

  m.def(
      "spacing_samples",
      [](const py::dict& d) {
        const qw::Config cfg = config_from_dict(d);
        const int l1 = static_cast<int>(cfg.get_int("l_plus", 16));
        const int l2 = static_cast<int>(cfg.get_int("l_minus", 16));
        const int realizations =
            static_cast<int>(cfg.get_int("realizations", 1));
        const int workers = static_cast<int>(cfg.get_int("workers", 1));
        qw::SpacingBlock block = qw::SpacingBlock::square_ee;
        const std::string bname = cfg.get("block", "square-ee");
        if (bname == "square-oo") block = qw::SpacingBlock::square_oo;
        if (bname == "circle-eo") block = qw::SpacingBlock::circle_eo;
        if (bname == "circle-oe") block = qw::SpacingBlock::circle_oe;
        qw::DisorderSpec spec = qw::disorder_from_config(cfg);
        std::vector<double> pooled;
        for (int i = 0; i < realizations; ++i) {
          qw::DisorderSpec s = spec;
          s.seed = spec.seed + static_cast<std::uint64_t>(i);
          const qw::SpacingEnsemble ens = qw::spacings_from_block(
              qw::eigenvalues_dense(qw::build_u2_block(
                  qw::generate(s, l1, l2), block, qw::kSpectralDimCap,
                  workers)),
              block);
          pooled.insert(pooled.end(), ens.s.begin(), ens.s.end());
        }
        return py::array_t<double>(pooled.size(), pooled.data());
      },
      py::arg("config"),
      "Pooled normalized level spacings of the configured U^2 block.");

  m.def(
      "classify_spacings",
      [](const std::vector<double>& s, double margin) {
        const qw::ClassifyResult r = qw::classify_statistics(s, margin);
        py::dict d;
        d["ks_poisson"] = r.ks_poisson;
        d["ks_gue"] = r.ks_gue;
        d["label"] = qw::to_string(r.label);
        return d;
      },
      py::arg("s"), py::arg("margin") = 0.01,
      "KS classification of a spacing sample against Poisson and GUE.");

  m.def(
      "transmission",
      [](const py::dict& d) {
        const qw::Config cfg = config_from_dict(d);
        const int lx = static_cast<int>(cfg.get_int("l_x", 29));
        const int ly = static_cast<int>(cfg.get_int("l_y", 30));
        const int t_max = static_cast<int>(cfg.get_int("t_max", 4096));
        const int workers = static_cast<int>(cfg.get_int("workers", 1));
        qw::CutType cut = qw::CutType::none;
        const std::string cname = cfg.get("cut", "none");
        if (cname == "a" || cname == "A") cut = qw::CutType::a;
        if (cname == "b" || cname == "B") cut = qw::CutType::b;
        const qw::AveragedTransmission t =
            qw::averaged_transmission(qw::transmission_series(
                qw::build_geometry(qw::disorder_from_config(cfg), lx, ly, cut,
                                   static_cast<int>(cfg.get_int("cut_row0",
                                                                -1))),
                t_max, workers));
        py::dict out;
        out["even"] = t.even;
        out["odd"] = t.odd;
        out["total"] = t.total;
        out["min_absorbed"] = t.min_absorbed;
        out["converged"] = t.converged;
        return out;
      },
      py::arg("config"),
      "Quasienergy-averaged transmission totals for one geometry.");

  m.def(
      "invariant",
      [](const py::dict& d) {
        const qw::Config cfg = config_from_dict(d);
        const qw::InvariantEstimate est = qw::measure_invariant(
            qw::disorder_from_config(cfg),
            static_cast<int>(cfg.get_int("l_x", 19)),
            static_cast<int>(cfg.get_int("l_y", 30)),
            static_cast<int>(cfg.get_int("t_max", 1000)),
            static_cast<int>(cfg.get_int("workers", 1)));
        py::dict out;
        out["estimate"] = est.estimate;
        out["nu"] = est.nu;
        out["flagged"] = est.flagged;
        return out;
      },
      py::arg("config"),
      "Transmission-based invariant from cut-A and cut-B runs.");
}
