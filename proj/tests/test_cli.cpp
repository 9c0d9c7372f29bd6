#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tzitzeica/commands.hpp"
#include "tzitzeica/config.hpp"
#include "tzitzeica/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tz;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

fs::path tmp_dir() {
  fs::path d(TZ_TEST_TMP);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& cfg) {
  const fs::path p = tmp_dir() / (name + ".json");
  std::ofstream(p) << cfg.dump(2);
  return p;
}

Run run(const std::string& args, const std::string& tag) {
  const fs::path out = tmp_dir() / (tag + ".stdout"), err = tmp_dir() / (tag + ".stderr");
  const std::string cmd = std::string(TZ_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

json base(const json& solitons) {
  return {{"background", "vacuum"},
          {"solitons", solitons},
          {"grid", {{"x", {-5.0, 5.0}}, {"t", {-5.0, 5.0}}, {"nx", 41}, {"nt", 41}}}};
}

json no_solitons() { return {{"placement", "canonical"}, {"lambdas", json::array()}, {"C", json::array()}}; }

json one_soliton() {
  return {{"placement", "canonical"}, {"lambdas", {{1.0, 0.0}}}, {"C", {{1.0, 0.0}}}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("field command on the vacuum") {
  const auto cfg = write_config("vac", base(no_solitons()));
  const Run r = run("field --config " + cfg.string(), "vac_field");
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 1 + 41 * 41);
  CHECK(ls[0] == "x,t,re_u,im_u,re_exp_u,im_exp_u,flag");
  CHECK(ls[1] == "-5,-5,0,0,1,0,ok");
  CHECK(ls[2].rfind("-4.75,-5,", 0) == 0);
  for (std::size_t n = 1; n < ls.size(); ++n) CHECK(ls[n].find(",0,0,1,0,ok") != std::string::npos);
}

TEST_CASE("field command on one soliton") {
  const auto cfg = write_config("one", base(one_soliton()));
  const fs::path out = tmp_dir() / "one_field.csv";
  const Run r = run("field --config " + cfg.string() + " --out " + out.string(), "one_field");
  REQUIRE(r.code == 0);
  std::ifstream in(out);
  const FieldGrid f = commands::read_field_csv(in);
  CHECK(f.grid.nx == 41);
  CHECK(f.grid.nt == 41);
  int ok = 0, flagged = 0;
  for (std::size_t n = 0; n < f.grid.size(); ++n) {
    if (f.flags[n] == NodeFlag::ok) {
      ++ok;
      CHECK(std::isfinite(std::abs(f.u[n])));
      CHECK(std::isfinite(std::abs(f.exp_u[n])));
    } else {
      ++flagged;
    }
  }
  CHECK(ok > 1500);
  CHECK(flagged > 0);
}

TEST_CASE("config errors exit with code 2 and name the key") {
  json missing = base(one_soliton());
  missing["solitons"].erase("lambdas");
  Run r = run("field --config " + write_config("missing", missing).string(), "missing");
  CHECK(r.code == 2);
  const json err = json::parse(r.err);
  CHECK(err["error"] == "config");
  CHECK(err["key"] == "solitons.lambdas");

  json unknown = base(one_soliton());
  unknown["grid"]["dx"] = 0.1;
  r = run("scan --config " + write_config("unknown", unknown).string(), "unknown");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["key"] == "grid.dx");

  json genus = base(one_soliton());
  genus["background"] = {{"genus", 1},     {"c", {1.0, 0.0}},     {"U", {{0.4, 0.0}}},
                         {"V", {{0.7, 0.0}}}, {"zD", {{0.1, 0.2}}}, {"prym", {{{0.0, 1.0}}}}};
  r = run("field --config " + write_config("genus", genus).string(), "genus");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["key"] == "solitons");

  json bad_prym = genus;
  bad_prym["solitons"] = no_solitons();
  bad_prym["background"]["prym"] = {{{0.0, -1.0}}};
  r = run("field --config " + write_config("bad_prym", bad_prym).string(), "bad_prym");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["key"] == "background.prym");

  r = run("field --config " + (tmp_dir() / "does_not_exist.json").string(), "nofile");
  CHECK(r.code == 2);
  r = run("field", "noconfig");
  CHECK(r.code == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  json cfg = base(no_solitons());
  cfg["background"] = {{"genus", 1},
                       {"c", {1.0, 0.0}},
                       {"U", {{0.4, 0.0}}},
                       {"V", {{0.7, 0.0}}},
                       {"zD", {{0.1, 0.2}}},
                       {"prym", {{{0.0, 0.01}}}},
                       {"truncation", {{"max_radius", 2}}}};
  const Run r = run("field --config " + write_config("overflow", cfg).string(), "overflow");
  CHECK(r.code == 3);
  CHECK(json::parse(r.err)["error"] == "numerical");
}

TEST_CASE("verify command") {
  Run r = run("verify --config " + write_config("vac_verify", base(no_solitons())).string(),
              "vac_verify");
  REQUIRE(r.code == 0);
  json rep = json::parse(r.out);
  CHECK(rep["pass"] == true);
  CHECK(rep["residual_lightcone"]["max_abs_residual"].get<double>() <= 1e-13);
  CHECK(rep["residual_lab"]["max_abs_residual"].get<double>() <= 1e-13);
  for (const char* key : {"residual_lightcone", "residual_lab", "goursat", "lax", "residue_identity",
                          "route_equivalence", "kinematics"})
    CHECK(rep.contains(key));

  json one = base(one_soliton());
  const json goursat_grid = {{"x", {-0.5, 1.5}}, {"t", {-0.5, 1.5}}, {"nx", 11}, {"nt", 11}};
  one["verify"] = {{"goursat", {{"grid", goursat_grid}}}};
  r = run("verify --config " + write_config("one_verify", one).string(), "one_verify");
  CHECK(r.code == 0);
  rep = json::parse(r.out);
  CHECK(rep["pass"] == true);
  CHECK(rep["residual_lightcone"]["rel_residual"].get<double>() <= 1e-8);
  CHECK(rep["route_equivalence"]["points"] == 25);
  CHECK(rep["kinematics"].size() == 1);

  json inj = base(one_soliton());
  inj["grid"] = {{"x", {0.0, 2.0}}, {"t", {0.0, 2.0}}, {"nx", 11}, {"nt", 11}};
  inj["verify"] = {{"inject", {{"at", {1.0, 1.0}}, {"amplitude", 1e-3}}}};
  r = run("verify --config " + write_config("inject", inj).string(), "inject");
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["pass"] == false);
}

TEST_CASE("field file round trip through verify") {
  json cfg = base(one_soliton());
  cfg["grid"] = {{"x", {0.0, 3.0}}, {"t", {0.0, 3.0}}, {"nx", 31}, {"nt", 31}};
  const auto path = write_config("roundtrip", cfg);
  const fs::path csv = tmp_dir() / "roundtrip.csv";
  REQUIRE(run("field --config " + path.string() + " --out " + csv.string(), "rt_field").code == 0);
  const Run r = run("verify --config " + path.string() + " --field " + csv.string(), "rt_verify");
  CHECK((r.code == 0 || r.code == 1));
  const json rep = json::parse(r.out);

  const auto parsed = config::load_config(path.string());
  const auto mem = verify::residual_lightcone(commands::field_grid(parsed), 2);
  const double file_value = rep["residual_lightcone"]["max_abs_residual"].get<double>();
  CHECK(std::abs(file_value - mem.max_abs_residual) <= 1e-12);
  CHECK(rep["residual_lightcone"]["checked"] == mem.checked);
}

TEST_CASE("scan command") {
  Run r = run("scan --config " + write_config("vac_scan", base(no_solitons())).string(), "vac_scan");
  CHECK(r.code == 0);
  CHECK(r.out == "x,t,abs_det\n");

  r = run("scan --config " + write_config("one_scan", base(one_soliton())).string(), "one_scan");
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() > 1);
}

TEST_CASE("velocities command") {
  json cfg = base({{"placement", "canonical"}, {"lambdas", {{1.0, 0.0}, {2.2, 0.0}}},
                   {"C", {{1.0, 0.0}, {1.0, 0.0}}}});
  cfg["kinematics"] = {{"epsilons", {0.0, 0.5, -0.5}}};
  const Run r = run("velocities --config " + write_config("vel", cfg).string(), "vel");
  REQUIRE(r.code == 0);
  const json rep = json::parse(r.out);
  REQUIRE(rep["solitons"].size() == 2);
  CHECK(rep["solitons"][0]["v"].get<double>() == doctest::Approx(-1.0));
  CHECK(rep["solitons"][1]["v"].get<double>() == doctest::Approx(-std::pow(2.2, 2.0 / 3.0)));
  for (const auto& s : rep["solitons"]) {
    REQUIRE(s["lab"].size() == 3);
    for (const auto& l : s["lab"]) CHECK(std::abs(l["V"].get<double>()) < 1.0);
  }
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  json cfg = base(one_soliton());
  cfg["grid"] = {{"x", {-3.0, 3.0}}, {"t", {-3.0, 3.0}}, {"nx", 25}, {"nt", 25}};
  const auto path = write_config("det", cfg).string();
  for (const char* sub : {"field", "verify", "scan", "velocities"}) {
    const Run a = run(std::string(sub) + " --config " + path, std::string("det_a_") + sub);
    const Run b = run(std::string(sub) + " --config " + path, std::string("det_b_") + sub);
    const Run c = run(std::string(sub) + " --config " + path + " --threads 3",
                      std::string("det_c_") + sub);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
  }
}
