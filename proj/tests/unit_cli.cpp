#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qw2d/config.hpp"
#include "qw2d/presets.hpp"
#include "qw2d/runner.hpp"

using namespace qw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path("/tmp") / name;
  fs::remove_all(p);
  return p;
}

bool has_field(const std::vector<std::string>& msgs, const std::string& field) {
  return std::any_of(msgs.begin(), msgs.end(), [&](const std::string& m) {
    return m.rfind(field + ":", 0) == 0;
  });
}

Config tiny_evolve() {
  Config c;
  c.set("experiment", "evolve");
  c.set("disorder", "haar");
  c.set("l_plus", "8");
  c.set("l_minus", "8");
  c.set("t_max", "8");
  c.set("realizations", "2");
  return c;
}

}  // namespace

TEST_CASE("angle parsing") {
  CHECK(parse_angle("0.2pi") == doctest::Approx(0.2 * M_PI).epsilon(1e-15));
  CHECK(parse_angle("pi") == doctest::Approx(M_PI));
  CHECK(parse_angle("-pi") == doctest::Approx(-M_PI));
  CHECK(parse_angle("-0.5pi") == doctest::Approx(-0.5 * M_PI));
  CHECK(parse_angle(" 1.5 ") == doctest::Approx(1.5));
  CHECK(parse_angle("1e-3") == doctest::Approx(1e-3));
  CHECK(parse_angle("2Pi") == doctest::Approx(2 * M_PI));
  CHECK_THROWS(parse_angle("2pies"));
  CHECK_THROWS(parse_angle(""));
  CHECK_THROWS(parse_angle("pi2"));
}

TEST_CASE("config text parsing") {
  const Config c = Config::from_string(
      "# comment\n"
      "; another\n"
      "[section]\n"
      "a = 1\n"
      "b = first\n"
      "b = second\n"
      "  spaced   =   value with spaces  \n");
  CHECK(c.get("a") == "1");
  CHECK(c.get("b") == "second");
  CHECK(c.get("spaced") == "value with spaces");
  CHECK(c.get("missing", "d") == "d");
  CHECK(c.has("a"));
  CHECK_FALSE(c.has("missing"));

  CHECK_THROWS(Config::from_string("no equals sign\n"));
  CHECK_THROWS(Config::from_string("= orphan value\n"));
  CHECK_THROWS(Config::from_file("/tmp/qw2d_does_not_exist.conf"));

  Config merged = Config::from_string("x = 1\ny = 2\n");
  merged.merge(Config::from_string("y = 3\nz = 4\n"));
  CHECK(merged.get("y") == "3");
  CHECK(merged.get("z") == "4");

  Config t;
  t.set("zz", "1");
  t.set("aa", "2");
  CHECK(t.text() == "aa = 2\nzz = 1\n");  // sorted for stable manifests
}

TEST_CASE("typed getters name the offending key") {
  const Config c = Config::from_string(
      "n = 12\nbad = twelve\nf = 2.5\nang = 0.25pi\nflag = yes\noff = 0\n"
      "ints = 1, 2,4\nangs = 0,0.5pi\n");
  CHECK(c.get_int("n", 0) == 12);
  CHECK(c.get_int("absent", 7) == 7);
  CHECK(c.get_u64("n", 0) == 12);
  CHECK(c.get_double("f", 0) == doctest::Approx(2.5));
  CHECK(c.get_angle("ang", 0) == doctest::Approx(0.25 * M_PI));
  CHECK(c.get_bool("flag", false));
  CHECK_FALSE(c.get_bool("off", true));
  CHECK(c.get_int_list("ints", {}) == std::vector<int>{1, 2, 4});
  CHECK(c.get_angle_list("angs", {}).at(1) == doctest::Approx(0.5 * M_PI));

  try {
    c.get_int("bad", 0);
    FAIL("expected throw");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("bad") != std::string::npos);
    CHECK(std::string(e.what()).find("twelve") != std::string::npos);
  }
  CHECK_THROWS(c.get_bool("f", false));
  CHECK_THROWS(c.get_int_list("bad", {}));
}

TEST_CASE("preset catalog is complete and valid") {
  const auto catalog = preset_catalog();
  CHECK(catalog.size() == 15);
  for (const auto& [name, description] : catalog) {
    CHECK_FALSE(description.empty());
    const ValidationReport rep = validate_config(preset(name));
    for (const std::string& e : rep.errors) FAIL_CHECK((name + ": " + e));
    for (const std::string& w : rep.warnings)
      FAIL_CHECK((name + ": warning: " + w));
  }
  CHECK_THROWS_WITH_AS(preset("nope"),
                       doctest::Contains("available:"), std::runtime_error);
}

TEST_CASE("validation flags missing or unknown experiments") {
  ValidationReport rep = validate_config(Config{});
  CHECK_FALSE(rep.ok());
  CHECK(has_field(rep.errors, "experiment"));

  Config c;
  c.set("experiment", "teleport");
  rep = validate_config(c);
  CHECK(has_field(rep.errors, "experiment"));
}

TEST_CASE("validation rules per experiment family") {
  Config sc;
  sc.set("experiment", "scatter");
  sc.set("l_y", "31");
  ValidationReport rep = validate_config(sc);
  CHECK(has_field(rep.errors, "l_y"));

  sc.set("l_y", "30");
  sc.set("l_x", "29");
  sc.set("t_max", "100");
  rep = validate_config(sc);
  CHECK(rep.ok());
  CHECK(has_field(rep.warnings, "t_max"));

  sc.set("t_max", "8192");
  sc.set("mystery", "1");
  rep = validate_config(sc);
  CHECK(rep.ok());
  CHECK(has_field(rep.warnings, "mystery"));

  Config ev = tiny_evolve();
  ev.set("fit", "spline");
  CHECK(has_field(validate_config(ev).errors, "fit"));
  ev.set("fit", "localized");
  ev.set("snapshots", "4,2");
  CHECK_FALSE(validate_config(ev).ok());

  Config sp;
  sp.set("experiment", "spectrum");
  sp.set("l_plus", "200");
  sp.set("l_minus", "200");
  rep = validate_config(sp);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.errors[0].find("exceeds") != std::string::npos);
  sp.set("l_plus", "47");
  CHECK(has_field(validate_config(sp).errors, "l_plus"));

  Config cr;
  cr.set("experiment", "critical");
  cr.set("method", "autocorrelation");
  cr.set("l_plus", "126");
  cr.set("l_minus", "127");
  CHECK(has_field(validate_config(cr).errors, "l_plus"));
  cr.set("method", "return");
  cr.set("return_times", "4,7");
  CHECK_FALSE(validate_config(cr).ok());

  Config bs;
  bs.set("experiment", "binary-sweep");
  bs.set("p_a_grid", "0,0.5,1.2");
  CHECK(has_field(validate_config(bs).errors, "p_a_grid"));
  bs.set("p_a_grid", "0,1");
  bs.set("transmission", "0");
  bs.set("spread", "0");
  rep = validate_config(bs);
  CHECK(rep.ok());
  CHECK(has_field(rep.warnings, "transmission"));

  Config lock;
  lock.set("experiment", "scatter");
  lock.set("disorder", "binary");
  lock.set("theta1_a", "0.625pi");
  lock.set("theta2_a", "-0.125pi");
  lock.set("theta1_b", "0.125pi");
  lock.set("theta2_b", "0.125pi");  // locked value would be 0.375pi
  rep = validate_config(lock);
  CHECK(has_field(rep.warnings, "theta2_b"));

  Config sz;
  sz.set("experiment", "scatter");
  sz.set("mode", "scaling");
  sz.set("sizes", "19x30:1000,39x61:2000");
  CHECK_FALSE(validate_config(sz).ok());
}

TEST_CASE("experiment run writes files and a checksummed manifest") {
  const fs::path dir = fresh_dir("qw2d_cli_evolve");
  const std::vector<std::string> files =
      run_experiment(tiny_evolve(), dir.string());
  REQUIRE_FALSE(files.empty());
  CHECK(files.back() == "manifest.json");
  const std::set<std::string> got(files.begin(), files.end());
  CHECK(got == std::set<std::string>{"variance.csv", "distribution.csv",
                                     "summary.csv", "manifest.json"});
  for (const std::string& f : files) CHECK(fs::exists(dir / f));

  const nlohmann::json m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("library") == "qw2d");
  CHECK(m.at("version") == kLibraryVersion);
  CHECK(m.at("config").at("experiment") == "evolve");
  std::set<std::string> listed;
  for (const auto& entry : m.at("outputs")) {
    const std::string name = entry.at("file");
    listed.insert(name);
    char want[24];
    std::snprintf(want, sizeof want, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(slurp(dir / name))));
    CHECK(entry.at("fnv1a64") == want);
  }
  std::set<std::string> expect = got;
  expect.erase("manifest.json");  // not self-checksummed
  CHECK(listed == expect);
}

TEST_CASE("equal configs rerun to byte-identical outputs") {
  const fs::path d1 = fresh_dir("qw2d_cli_det1");
  const fs::path d2 = fresh_dir("qw2d_cli_det2");
  const std::vector<std::string> files =
      run_experiment(tiny_evolve(), d1.string());
  run_experiment(tiny_evolve(), d2.string());
  for (const std::string& f : files) CHECK(slurp(d1 / f) == slurp(d2 / f));
}

TEST_CASE("scatter single run with optional spectra") {
  Config c;
  c.set("experiment", "scatter");
  c.set("mode", "single");
  c.set("disorder", "haar");
  c.set("l_x", "3");
  c.set("l_y", "4");
  c.set("t_max", "64");
  c.set("energy_resolved", "1");
  c.set("histogram", "1");
  const fs::path dir = fresh_dir("qw2d_cli_scatter");
  const std::vector<std::string> files = run_experiment(c, dir.string());
  CHECK(std::set<std::string>(files.begin(), files.end()) ==
        std::set<std::string>{"transmission.csv", "energy.csv",
                              "eigenvalue_hist.csv", "manifest.json"});
  std::ifstream f(dir / "transmission.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "theta1,theta2,cut,L_x,L_y,seed,T_even,T_odd,T_total");
}

TEST_CASE("scatter map run covers the theta grid with all three cuts") {
  Config c;
  c.set("experiment", "scatter");
  c.set("mode", "map");
  c.set("disorder", "phase");
  c.set("theta_steps", "2");
  c.set("l_x", "3");
  c.set("l_y", "4");
  c.set("t_max", "40");
  const fs::path dir = fresh_dir("qw2d_cli_map");
  run_experiment(c, dir.string());
  std::ifstream f(dir / "map.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line ==
        "theta1,theta2,T_A,T_B,T_none,nu_estimate,nu,flagged,nu_clean");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 4);  // 2 x 2 grid
}

TEST_CASE("scatter scaling run classifies the sweep") {
  Config c;
  c.set("experiment", "scatter");
  c.set("mode", "scaling");
  c.set("disorder", "phase");
  c.set("theta1", "0.2pi");
  c.set("theta2", "0.4pi");
  c.set("sizes", "3x4:64,5x6:64");
  c.set("seeds", "2");
  const fs::path dir = fresh_dir("qw2d_cli_scaling");
  const std::vector<std::string> files = run_experiment(c, dir.string());
  CHECK(std::set<std::string>(files.begin(), files.end()) ==
        std::set<std::string>{"scaling.csv", "summary.csv", "manifest.json"});
  std::ifstream f(dir / "scaling.csv");
  std::string line;
  std::getline(f, line);
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 4);  // 2 sizes x 2 seeds
  std::ifstream s(dir / "summary.csv");
  std::getline(s, line);
  CHECK(line == "slope,classification");
}

TEST_CASE("spectrum run pools spacings and classifies them") {
  Config c;
  c.set("experiment", "spectrum");
  c.set("disorder", "haar");
  c.set("l_plus", "24");
  c.set("l_minus", "24");  // 576 spacings, above the classifier minimum
  const fs::path dir = fresh_dir("qw2d_cli_spectrum");
  const std::vector<std::string> files = run_experiment(c, dir.string());
  CHECK(std::set<std::string>(files.begin(), files.end()) ==
        std::set<std::string>{"spacings.csv", "spacing_histogram.csv",
                              "summary.csv", "manifest.json"});
  std::ifstream f(dir / "summary.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line ==
        "block,n_block,samples,mean_s,ks_poisson,ks_gue,classification");
  std::getline(f, line);
  CHECK(line.rfind("square-ee,576,576,", 0) == 0);
}

TEST_CASE("critical return run fits eta from the time series") {
  Config c;
  c.set("experiment", "critical");
  c.set("method", "return");
  c.set("disorder", "haar");
  c.set("return_l", "16");
  c.set("return_realizations", "2");
  c.set("t_max_return", "22");
  c.set("return_times", "16,18,20,22");
  const fs::path dir = fresh_dir("qw2d_cli_critical");
  const std::vector<std::string> files = run_experiment(c, dir.string());
  CHECK(std::set<std::string>(files.begin(), files.end()) ==
        std::set<std::string>{"t_lnp0.csv", "eta.csv", "manifest.json"});
  std::ifstream f(dir / "eta.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "method,eta,ci,slope,slope_err,n_samples");
  std::getline(f, line);
  CHECK(line.rfind("return,", 0) == 0);
}

TEST_CASE("binary sweep runs both probes over the grids") {
  Config c;
  c.set("experiment", "binary-sweep");
  c.set("p_a_grid", "0,1");
  c.set("dtheta_grid", "0.5pi");
  c.set("l_x", "3");
  c.set("l_y", "4");
  c.set("t_max", "40");
  c.set("seeds", "1");
  c.set("spread", "1");
  c.set("spread_l", "16");
  c.set("spread_t", "8");
  c.set("spread_realizations", "2");
  const fs::path dir = fresh_dir("qw2d_cli_binary");
  const std::vector<std::string> files = run_experiment(c, dir.string());
  CHECK(std::set<std::string>(files.begin(), files.end()) ==
        std::set<std::string>{"sweep.csv", "spread.csv", "manifest.json"});

  std::ifstream f(dir / "sweep.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line ==
        "p_a,dtheta,theta1_b,theta2_b,cut,seed,T_even,T_odd,T_total");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 4);  // 2 p_a x 1 dtheta x {cut B, no cut} x 1 seed

  std::ifstream s(dir / "spread.csv");
  std::getline(s, line);
  CHECK(line == "p_a,dtheta,rms,variance,p_leave");
  rows = 0;
  while (std::getline(s, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("invalid configs abort the run with the first error") {
  Config c;
  c.set("experiment", "scatter");
  c.set("l_y", "31");
  CHECK_THROWS_WITH_AS(run_experiment(c, "/tmp/qw2d_cli_invalid"),
                       doctest::Contains("invalid config"), std::runtime_error);
  CHECK_FALSE(fs::exists("/tmp/qw2d_cli_invalid/manifest.json"));
}
