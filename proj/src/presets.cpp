#include "qw2d/presets.hpp"

#include <stdexcept>

namespace qw {

namespace {

struct PresetDef {
  const char* name;
  const char* description;
  const char* body;
};

const PresetDef kPresets[] = {
    {"edge-transmission",
     "cut-B transmission spectrum and eigenvalue histogram at (0.2pi, 0.4pi)",
     R"(experiment = scatter
mode = single
disorder = phase
theta1 = 0.2pi
theta2 = 0.4pi
cut = b
l_x = 29
l_y = 30
t_max = 8192
energy_resolved = 1
histogram = 1
)"},
    {"invariant-map",
     "transmission-based invariant vs clean prediction on a theta grid",
     R"(experiment = scatter
mode = map
disorder = phase
theta_min = 0.1pi
theta_max = 0.9pi
theta_steps = 9
l_x = 19
l_y = 30
t_max = 1000
seeds = 1
)"},
    {"size-scaling",
     "averaged transmission across sizes of fixed aspect on theta1+theta2=0.6pi",
     R"(experiment = scatter
mode = scaling
disorder = phase
theta1 = 0.1pi
theta2 = 0.5pi
cut = none
sizes = 19x30:1000,39x60:2000,59x90:3000,79x120:4000
seeds = 10
)"},
    {"localized-spread",
     "anisotropic exponential localization at (0.2pi, 0.4pi)",
     R"(experiment = evolve
disorder = phase
theta1 = 0.2pi
theta2 = 0.4pi
l_plus = 64
l_minus = 128
t_max = 2000
realizations = 20
fit = localized
)"},
    {"critical-spread",
     "diffusive spreading on the critical line at (0.2pi, 0.2pi)",
     R"(experiment = evolve
disorder = phase
theta1 = 0.2pi
theta2 = 0.2pi
l_plus = 128
l_minus = 128
t_max = 1024
realizations = 20
fit = diffusive
)"},
    {"haar-spread",
     "diffusive spreading with Haar-random coins",
     R"(experiment = evolve
disorder = haar
l_plus = 301
l_minus = 301
t_max = 1024
realizations = 20
fit = diffusive
)"},
    {"classicalized-compare",
     "diffusion constants: coherent vs time-dependent coins vs stochastic",
     R"(experiment = evolve
disorder = haar
compare = 1
l_plus = 201
l_minus = 201
t_max = 1024
realizations = 5
)"},
    {"spacings-localized",
     "level-spacing statistics in the localized phase (0.2pi, 0.4pi)",
     R"(experiment = spectrum
disorder = phase
theta1 = 0.2pi
theta2 = 0.4pi
l_plus = 48
l_minus = 84
block = square-ee
realizations = 1
)"},
    {"spacings-critical",
     "level-spacing statistics on the critical line (0.2pi, 0.2pi)",
     R"(experiment = spectrum
disorder = phase
theta1 = 0.2pi
theta2 = 0.2pi
l_plus = 64
l_minus = 64
block = square-ee
realizations = 1
)"},
    {"spacings-haar",
     "level-spacing statistics with Haar-random coins",
     R"(experiment = spectrum
disorder = haar
l_plus = 64
l_minus = 64
block = square-ee
realizations = 1
tail = 1
)"},
    {"eta-autocorrelation",
     "critical exponent from eigenstate autocorrelation decay",
     R"(experiment = critical
method = autocorrelation
disorder = haar
l_plus = 128
l_minus = 128
count = 100
per_realization = 10
r_values = 1,2,4,8,16,32,64
)"},
    {"eta-fractal",
     "critical exponent from coarse-grained moment scaling",
     R"(experiment = critical
method = fractal
disorder = haar
l_plus = 128
l_minus = 128
count = 100
per_realization = 10
l_values = 1,2,4,8,16,32,64
)"},
    {"eta-return",
     "critical exponent from return-probability decay",
     R"(experiment = critical
method = return
disorder = haar
return_l = 257
t_max_return = 2048
return_realizations = 200
)"},
    {"binary-mirror-sweep",
     "binary-disorder transmission across the p_A transition at the mirror point",
     R"(experiment = binary-sweep
theta1_a = 0.625pi
theta2_a = -0.125pi
dtheta_grid = 0.5pi
p_a_grid = 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1
l_x = 39
l_y = 60
t_max = 2000
seeds = 4
transmission = 1
spread = 0
)"},
    {"binary-spread",
     "RMS spread after 170 steps over the (p_A, dtheta) plane",
     R"(experiment = binary-sweep
theta1_a = 0.625pi
theta2_a = -0.125pi
dtheta_grid = 0,0.125pi,0.25pi,0.375pi,0.5pi,0.625pi
p_a_grid = 0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1
transmission = 0
spread = 1
spread_l = 200
spread_t = 170
spread_realizations = 100
)"},
};

}  // namespace

Config preset(const std::string& name) {
  for (const PresetDef& p : kPresets)
    if (name == p.name) return Config::from_string(p.body);
  std::string msg = "unknown preset '" + name + "'; available:";
  for (const PresetDef& p : kPresets) msg += std::string(" ") + p.name;
  throw std::runtime_error(msg);
}

std::vector<std::pair<std::string, std::string>> preset_catalog() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const PresetDef& p : kPresets) out.emplace_back(p.name, p.description);
  return out;
}

}  // namespace qw
