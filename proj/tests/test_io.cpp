#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "models.hpp"
#include "ripplewave/errors.hpp"
#include "ripplewave/io.hpp"
#include "ripplewave/reproduce.hpp"

using namespace ripple;
using io::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ripplewave_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("rate functions round trip through JSON") {
  for (const auto& f : fixtures::every_kind()) {
    CAPTURE(to_string(f.kind()));
    const RateFunction g = io::rate_from_json(io::to_json(f));
    CHECK(g.kind() == f.kind());
    for (double rho : {0.0, 0.4, 1.1, 2.7}) CHECK(g.value(rho) == f.value(rho));
  }
}

TEST_CASE("rate function JSON spellings and errors") {
  const auto a = io::rate_from_json(json::parse(R"({"kind": "SigmoidExp", "lam_lo": 2.5, "lam_hi": 8, "alpha": 10})"));
  CHECK(a.kind() == RateKind::sigmoid_exp);
  CHECK(a.value(1.0) == doctest::Approx(5.25));
  CHECK_THROWS_AS(io::rate_from_json(json::parse(R"({"kind": "cubic"})")), ParameterError);
  CHECK_THROWS_AS(io::rate_from_json(json::parse(R"({"kind": "constant"})")), ParameterError);
  CHECK_THROWS_AS(io::rate_from_json(json::parse(R"({"kind": "constant", "value": "x"})")), ParameterError);
  CHECK_THROWS_AS(io::rate_from_json(json::parse(R"([1, 2])")), ParameterError);
  CHECK_THROWS_AS(io::rate_from_json(json::parse(R"({"kind": "constant", "value": -2})")), ParameterError);
}

TEST_CASE("model JSON with and without scaling") {
  const json plain = json::parse(R"({"lambda": {"kind": "constant", "value": 3},
                                     "gamma": {"kind": "linear", "a": 1, "b": 2}})");
  const ModelParams m = io::model_from_json(plain);
  CHECK(m.lambda.value(0.2) == 3.0);
  json scaled = plain;
  scaled["scaling"] = {{"speed", 2.0}, {"length", 4.0}, {"mean_density", 5.0}};
  const ModelParams s = io::model_from_json(scaled);
  CHECK(s.lambda.value(0.2) == doctest::Approx(6.0));
  CHECK(s.gamma.value(0.4) == doctest::Approx(10.0));
  CHECK_THROWS_AS(io::model_from_json(json::parse(R"({"lambda": {"kind": "constant", "value": 3}})")),
                  ParameterError);
  const ModelParams back = io::model_from_json(io::to_json(m));
  CHECK(back.gamma.value(1.5) == m.gamma.value(1.5));
}

TEST_CASE("simulation JSON") {
  const ModelParams m = fixtures::unit();
  const io::SimSetup s = io::sim_from_json(json::parse(R"({"n_cells": 200, "t_end": 3, "scheme": "rk4",
                                                          "system": "memory_free"})"), m);
  CHECK(s.grid.n_cells == 200);
  CHECK(s.config.dt == doctest::Approx(0.99 / 200));
  CHECK(s.config.scheme == ReactionScheme::rk4);
  CHECK(s.config.system == SystemKind::memory_free);
  CHECK_THROWS_AS(io::sim_from_json(json::parse(R"({"n_cells": 4})"), m), ParameterError);
  CHECK_THROWS_AS(io::sim_from_json(json::parse(R"({"scheme": "leapfrog"})"), m), ParameterError);
  const io::SimSetup back = io::sim_from_json(io::to_json(s), m);
  CHECK(back.config.dt == s.config.dt);
  CHECK(back.config.t_end == s.config.t_end);
}

TEST_CASE("snapshot CSV round trip") {
  const ModelParams m = fixtures::hopf(1.0);
  const Grid g{40};
  SimConfig cfg;
  cfg.dt = default_dt(g, m);
  cfg.t_end = 20 * cfg.dt;
  cfg.snapshot_every = 5;
  const SimResult r = simulate(initial_conditions(parse_init("sine:0.1"), g, m, SystemKind::full), cfg, m, g);
  const fs::path dir = scratch_dir("csv");
  io::write_snapshots_csv(dir / "snapshots.csv", r.snapshots, g);
  const io::SnapshotSeries back = io::read_snapshots_csv(dir / "snapshots.csv");
  CHECK(back.grid.n_cells == 40);
  CHECK(back.grid.length == doctest::Approx(1.0));
  REQUIRE(back.snapshots.size() == r.snapshots.size());
  for (std::size_t k = 0; k < back.snapshots.size(); ++k) {
    CHECK(back.snapshots[k].t == doctest::Approx(r.snapshots[k].t));
    for (std::size_t i = 0; i < 40; ++i) {
      CHECK(back.snapshots[k].u[i] == doctest::Approx(r.snapshots[k].u[i]).epsilon(1e-10));
      CHECK(back.snapshots[k].v1[i] == doctest::Approx(r.snapshots[k].v1[i]).epsilon(1e-10));
    }
  }
  std::ofstream(dir / "bad.csv") << "t,x,u\n0,1,2\n";
  CHECK_THROWS_AS(io::read_snapshots_csv(dir / "bad.csv"), ParameterError);
  fs::remove_all(dir);
}

TEST_CASE("Hopf sweep CSV") {
  const auto rows = hopf_sweep(fixtures::hopf(1.0), 1.5, 2.5, 1, 150.0);
  std::ostringstream os;
  io::write_hopf_sweep_csv(os, rows);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "gamma,d_fixed_points,stability,limit_cycle,cycle_min_d,cycle_max_d");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 2);
}

TEST_CASE("result objects serialize") {
  const ModelParams m = fixtures::hopf(1.0);
  const json h = io::to_json(hopf_thresholds(m));
  CHECK(h.at("gamma_hat").get<double>() == doctest::Approx(3.243).epsilon(1e-3));
  const json t = io::to_json(find_stable_tuples(fixtures::rational()).front());
  CHECK(t.at("values").size() == 2);
  CHECK(t.contains("Lambda"));
}

TEST_CASE("figure data is deterministic") {
  ReproduceOptions a;
  a.config_dir = RIPPLEWAVE_CONFIG_DIR;
  a.quick = true;
  a.out_dir = scratch_dir("repro_a");
  ReproduceOptions b = a;
  b.out_dir = scratch_dir("repro_b");
  b.backend = Backend::openmp;
  for (const std::string id : {"fig1", "fig2"}) {
    const auto fa = reproduce_figure(id, a);
    const auto fb = reproduce_figure(id, b);
    REQUIRE(fa.size() == fb.size());
    CHECK(!fa.empty());
    for (std::size_t i = 0; i < fa.size(); ++i) {
      CHECK(fa[i].filename() == fb[i].filename());
      CHECK(slurp(fa[i]) == slurp(fb[i]));
    }
  }
  CHECK_THROWS_AS(reproduce_figure("fig3", a), ParameterError);
  ReproduceOptions missing = a;
  missing.config_dir = a.out_dir / "nowhere";
  CHECK_THROWS_AS(reproduce_figure("fig1", missing), ParameterError);
  fs::remove_all(a.out_dir);
  fs::remove_all(b.out_dir);
}
