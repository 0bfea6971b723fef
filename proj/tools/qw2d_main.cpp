#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qw2d/config.hpp"
#include "qw2d/presets.hpp"
#include "qw2d/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path, preset_name, out_dir = "out";
  std::uint64_t seed = 0;
  int workers = 0;
  std::vector<std::string> overrides;  // KEY=VALUE
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->fallthrough();
  cmd->add_option("--config", a.config_path, "key = value parameter file");
  cmd->add_option("--preset", a.preset_name,
                  "named parameter set (see list-presets)");
  a.seed_opt = cmd->add_option("--seed", a.seed, "base seed override");
  a.workers_opt =
      cmd->add_option("--workers", a.workers, "worker thread count override");
  cmd->add_option("--out", a.out_dir, "output directory [out]");
  cmd->add_option("--set", a.overrides,
                  "extra KEY=VALUE override, repeatable");
}

// Precedence: preset < config file < --set < dedicated flags.
qw::Config assemble(const CommonArgs& a, const std::string& experiment) {
  qw::Config cfg;
  if (!a.preset_name.empty()) cfg = qw::preset(a.preset_name);
  if (!a.config_path.empty())
    cfg.merge(qw::Config::from_file(a.config_path));
  if (!experiment.empty()) cfg.set("experiment", experiment);
  for (const std::string& kv : a.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("cli: --set expects KEY=VALUE, got '" + kv +
                               "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.seed_opt && a.seed_opt->count())
    cfg.set("seed", std::to_string(a.seed));
  if (a.workers_opt && a.workers_opt->count())
    cfg.set("workers", std::to_string(a.workers));
  return cfg;
}

int run_family(const CommonArgs& a, const std::string& experiment) {
  const qw::Config cfg = assemble(a, experiment);
  const qw::ValidationReport rep = qw::validate_config(cfg);
  for (const std::string& w : rep.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!rep.ok()) {
    for (const std::string& e : rep.errors)
      std::fprintf(stderr, "error: %s\n", e.c_str());
    return 1;
  }
  const std::vector<std::string> files = qw::run_experiment(cfg, a.out_dir);
  for (const std::string& f : files)
    std::printf("%s/%s\n", a.out_dir.c_str(), f.c_str());
  return 0;
}

int run_validate(const CommonArgs& a) {
  const qw::Config cfg = assemble(a, "");
  const qw::ValidationReport rep = qw::validate_config(cfg);
  for (const std::string& e : rep.errors)
    std::printf("error: %s\n", e.c_str());
  for (const std::string& w : rep.warnings)
    std::printf("warning: %s\n", w.c_str());
  if (rep.ok() && rep.warnings.empty()) std::printf("ok\n");
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qw2d: 2D split-step quantum walks (transport, spectral statistics, "
      "critical exponents)"};
  app.require_subcommand(1);

  CommonArgs args;
  struct Family {
    const char* sub;
    const char* experiment;
    const char* help;
  };
  const Family families[] = {
      {"evolve", "evolve", "spread a point source and fit its envelope"},
      {"scatter", "scatter",
       "lead-coupled transmission: spectra, invariant maps, size scaling"},
      {"spectrum", "spectrum", "level-spacing statistics of a U^2 block"},
      {"critical", "critical", "critical exponent eta by three estimators"},
      {"binary-sweep", "binary-sweep",
       "two-coin mixtures over the (p_A, dtheta) plane"},
  };
  std::vector<std::pair<CLI::App*, std::string>> runs;
  for (const Family& f : families) {
    CLI::App* sub = app.add_subcommand(f.sub, f.help);
    add_common(sub, args);
    runs.emplace_back(sub, f.experiment);
  }
  CLI::App* validate =
      app.add_subcommand("validate", "check a config and report field issues");
  add_common(validate, args);
  CLI::App* list =
      app.add_subcommand("list-presets", "print the preset catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help path
    std::fprintf(stderr, "error: cli: %s\n", e.what());
    return 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& [name, desc] : qw::preset_catalog())
        std::printf("%-24s %s\n", name.c_str(), desc.c_str());
      return 0;
    }
    if (validate->parsed()) return run_validate(args);
    for (const auto& [sub, experiment] : runs)
      if (sub->parsed()) return run_family(args, experiment);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
