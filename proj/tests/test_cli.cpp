#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "ripplewave_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const std::string cmd = std::string("\"") + RIPPLEWAVE_CLI + "\" " + args + " > \"" + out.string() +
                          "\" 2> \"" + (work_dir() / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::ostringstream os;
  os << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, os.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << text;
  return "\"" + p.string() + "\"";
}

const char* kHopf = R"({"lambda": {"kind": "sigmoid_exp", "lam_lo": 2.5, "lam_hi": 8, "alpha": 10},
                        "gamma": {"kind": "constant", "value": 1}})";
// Above gamma_hat (about 3.24) the logistic rate has two anisotropic states.
const char* kFastAging = R"({"lambda": {"kind": "sigmoid_exp", "lam_lo": 2.5, "lam_hi": 8, "alpha": 10},
                            "gamma": {"kind": "constant", "value": 5}})";
const char* kStep = R"({"lambda": {"kind": "piecewise_linear_step", "lam_lo": 1, "lam_hi": 3, "eps": 0.2},
                        "gamma": {"kind": "constant", "value": 1}})";
const char* kLinear = R"({"lambda": {"kind": "linear", "a": 1, "b": 2},
                          "gamma": {"kind": "constant", "value": 1}})";
const char* kRational = R"({"lambda": {"kind": "sigmoid_rational", "lam_lo": 0.5, "lam_hi": 10, "alpha": 0.125},
                            "gamma": {"kind": "constant", "value": 1}})";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("steady-states").code == 2);  // missing --model
  CHECK(run("steady-states --model /does/not/exist.json").code == 2);
  CHECK(run("steady-states --model " + write_file("broken.json", "{ not json")).code == 2);
}

TEST_CASE("steady states and stability as JSON") {
  const std::string model = write_file("hopf.json", kHopf);
  const Run one = run("steady-states --model " + model);
  REQUIRE(one.code == 0);
  CHECK(json::parse(one.out).size() == 1);
  const Run s = run("steady-states --model " + write_file("aging5.json", kFastAging));
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out).size() == 3);
  const Run st = run("stability --model " + model + " --n-max 8");
  REQUIRE(st.code == 0);
  CHECK(json::parse(st.out).dump().find("unstable") != std::string::npos);
}

TEST_CASE("hopf sweep to stdout") {
  const Run r = run("hopf-sweep --model " + write_file("hopf.json", kHopf) +
                    " --gamma-from 1 --gamma-to 2 --steps 2 --t-end 50");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("gamma,d_fixed_points", 0) == 0);
}

TEST_CASE("tuples: found, and none for a linear rate") {
  const Run r = run("tuples --model " + write_file("rational.json", kRational));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).size() == 1);
  CHECK(run("tuples --model " + write_file("linear.json", kLinear)).code == 4);
}

TEST_CASE("construct-wave") {
  const std::string model = write_file("step.json", kStep);
  const Run r = run("construct-wave --model " + model + " --mass 1 --xi1 0.4 --xi2 1");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("mass").get<double>() == doctest::Approx(1.0));
  const std::string wide = write_file(
      "wide.json", R"({"lambda": {"kind": "piecewise_linear_step", "lam_lo": 1, "lam_hi": 3, "eps": 0.6},
                       "gamma": {"kind": "constant", "value": 1}})");
  CHECK(run("construct-wave --model " + wide + " --mass 1 --xi1 0.4 --xi2 1").code == 4);
}

TEST_CASE("simulate, measure and compare") {
  const std::string model = write_file("step.json", kStep);
  const std::string sim = write_file(
      "sim.json", R"({"n_cells": 200, "t_end": 20, "record_from": 19, "snapshot_every": 5})");
  const fs::path out = work_dir() / "run";
  const Run r = run("simulate --model " + model + " --sim " + sim + " --init sine:0.1 --out \"" +
                    out.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "snapshots.csv"));
  CHECK(fs::exists(out / "meta.json"));
  const Run m = run("measure --snapshots \"" + (out / "snapshots.csv").string() + "\" --field u");
  REQUIRE(m.code == 0);
  CHECK(json::parse(m.out).at("speed").get<double>() == doctest::Approx(1.0).epsilon(0.05));
  const Run c = run("compare --model " + model + " --snapshots \"" + (out / "snapshots.csv").string() + "\"");
  CHECK(c.code == 0);

  const std::string bad_dt = write_file("bad_dt.json", R"({"n_cells": 100, "dt": 0.02, "t_end": 1})");
  CHECK(run("simulate --model " + model + " --sim " + bad_dt + " --out \"" + out.string() + "\"").code == 2);
  CHECK(run("simulate --model " + model + " --init wiggle:1 --out \"" + out.string() + "\"").code == 2);
}

TEST_CASE("numeric failure exit code") {
  const std::string model = write_file(
      "fast.json", R"({"lambda": {"kind": "constant", "value": 500}, "gamma": {"kind": "constant", "value": 1}})");
  const std::string sim = write_file("short.json", R"({"n_cells": 32, "t_end": 1})");
  CHECK(run("simulate --model " + model + " --sim " + sim + " --init noise:0.5 --out \"" +
            (work_dir() / "blow").string() + "\"")
            .code == 3);
}

TEST_CASE("reproduce rejects unknown figures") {
  CHECK(run("reproduce --figure fig9 --out \"" + (work_dir() / "rep").string() + "\"").code == 2);
}
