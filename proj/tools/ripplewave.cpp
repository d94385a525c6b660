// ripplewave: command-line front end for the reversal model toolkit.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 no result (for example an empty tuple set).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ripplewave/analysis.hpp"
#include "ripplewave/errors.hpp"
#include "ripplewave/io.hpp"
#include "ripplewave/linear_stability.hpp"
#include "ripplewave/ode_dynamics.hpp"
#include "ripplewave/pde_sim.hpp"
#include "ripplewave/reproduce.hpp"
#include "ripplewave/wave_construction.hpp"

#ifndef RIPPLEWAVE_CONFIG_DIR
#define RIPPLEWAVE_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;
using namespace ripple;
using io::json;

namespace {

struct Globals {
  std::string model_path;
  std::string out_dir;
  std::uint64_t seed = 12345;
};

ModelParams load_model(const Globals& g) {
  if (g.model_path.empty()) throw UsageError("--model FILE is required");
  return io::model_from_json(io::read_json(g.model_path));
}

// JSON goes to <out>/<name> when --out is given, stdout otherwise.
void emit(const Globals& g, const std::string& name, const json& j) {
  if (g.out_dir.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    io::write_json(fs::path(g.out_dir) / name, j);
    std::cerr << "wrote " << (fs::path(g.out_dir) / name).string() << '\n';
  }
}

Backend parse_backend(const std::string& s) { return backend_from_string(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counter-propagating wave toolkit for the age-structured reversal model"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--model", g.model_path, "Model JSON file");
  app.add_option("--out", g.out_dir, "Output directory (default: JSON on stdout)");
  app.add_option("--seed", g.seed, "Seed for noise initial conditions");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the PDE simulation");
  std::string sim_path;
  std::string init_text = "sine:0.05";
  std::string backend = "openmp";
  bool spacetime = false;
  bool allow_cfl = false;
  sim->add_option("--sim", sim_path, "Simulation JSON file (defaults if omitted)");
  sim->add_option("--init", init_text, "sine:A, cosine:A, step:A, noise:A or csv:FILE");
  sim->add_option("--backend", backend, "serial or openmp");
  sim->add_flag("--spacetime", spacetime, "Also write spacetime.csv with the fraction fields");
  sim->add_flag("--allow-paper-steps", allow_cfl, "Warn instead of refusing dt > dx");

  // steady-states
  auto* steady = app.add_subcommand("steady-states", "Space-homogeneous steady states");

  // stability
  auto* stab = app.add_subcommand("stability", "Linear stability of the steady states");
  int n_max = 64;
  stab->add_option("--n-max", n_max, "Highest Fourier mode n (k = 2 pi n)");

  // hopf-sweep
  auto* hopf = app.add_subcommand("hopf-sweep", "Sweep constant gamma for steady states and limit cycles");
  double g_from = 0.5;
  double g_to = 20.0;
  int g_steps = 100;
  double ode_t_end = 300.0;
  hopf->add_option("--gamma-from", g_from);
  hopf->add_option("--gamma-to", g_to);
  hopf->add_option("--steps", g_steps);
  hopf->add_option("--t-end", ode_t_end, "Integration time per gamma");

  // tuples
  auto* tup = app.add_subcommand("tuples", "Plateau tuples of the memory-free system");
  double rho_min = 0.05;
  double rho_max = 5.0;
  bool with_orbits = false;
  tup->add_option("--rho-min", rho_min);
  tup->add_option("--rho-max", rho_max);
  tup->add_flag("--orbits", with_orbits, "Include heteroclinic orbit samples");

  // construct-wave
  auto* cw = app.add_subcommand("construct-wave", "Admissible wave of the full system");
  std::optional<double> mass;
  std::optional<double> xi1;
  std::optional<double> xi2;
  int samples = 2000;
  cw->add_option("--mass", mass, "Mean of P over one period (default: total_mass / 2)");
  cw->add_option("--xi1", xi1, "Crest length");
  cw->add_option("--xi2", xi2, "Period");
  cw->add_option("--samples", samples, "Samples in wave.csv");

  // measure
  auto* meas = app.add_subcommand("measure", "Wave speed from a snapshots.csv file");
  std::string snap_path;
  std::string field_name = "u";
  meas->add_option("--snapshots", snap_path)->required();
  meas->add_option("--field", field_name, "u, v, u1, v1, u1_over_u or v1_over_v");

  // compare
  auto* cmp = app.add_subcommand("compare", "Constructed wave against a simulated comoving profile");
  std::string cmp_snap;
  int exclude = 3;
  cmp->add_option("--snapshots", cmp_snap)->required();
  cmp->add_option("--exclude-cells", exclude, "Cells skipped around each jump");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Write the data behind a figure");
  std::string figure = "all";
  std::string config_dir = RIPPLEWAVE_CONFIG_DIR;
  bool quick = false;
  std::string rep_backend = "openmp";
  rep->add_option("--figure", figure, "fig1, fig2, fig4, fig5 or all");
  rep->add_option("--configs", config_dir, "Directory with the bundled configs");
  rep->add_flag("--quick", quick, "Coarser grids for a fast check");
  rep->add_option("--backend", rep_backend, "serial or openmp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      const ModelParams m = load_model(g);
      io::SimSetup setup = sim_path.empty() ? io::sim_from_json(json::object(), m)
                                            : io::sim_from_json(io::read_json(sim_path), m);
      setup.config.backend = parse_backend(backend);
      setup.config.allow_cfl_violation = allow_cfl;
      InitSpec spec = parse_init(init_text);
      spec.seed = g.seed;
      const FieldState init = initial_conditions(spec, setup.grid, m, setup.config.system);
      const auto t0 = std::chrono::steady_clock::now();
      const SimResult r = simulate(init, setup.config, m, setup.grid);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      json meta{{"model", io::to_json(m)},
                {"sim", io::to_json(setup)},
                {"init", init_text},
                {"seed", g.seed},
                {"steps", r.steps},
                {"initial_mass", r.initial_mass},
                {"max_mass_drift", r.max_mass_drift},
                {"min_density", r.min_density},
                {"snapshots", r.snapshots.size()},
                {"wall_seconds", seconds}};
      const fs::path out = g.out_dir.empty() ? fs::path("run") : fs::path(g.out_dir);
      io::write_snapshots_csv(out / "snapshots.csv", r.snapshots, setup.grid);
      if (spacetime) io::write_spacetime_csv(out / "spacetime.csv", r.snapshots, setup.grid);
      io::write_json(out / "meta.json", meta);
      std::cerr << "wrote " << out.string() << "/snapshots.csv (" << r.snapshots.size() << " snapshots)\n";
    } else if (*steady) {
      const ModelParams m = load_model(g);
      json a = json::array();
      for (const auto& s : find_steady_states(m)) a.push_back(io::to_json(s));
      emit(g, "steady_states.json", a);
    } else if (*stab) {
      const ModelParams m = load_model(g);
      json states = json::array();
      for (const auto& s : find_steady_states(m)) {
        json e = io::to_json(s);
        e["ode"] = io::to_json(ode_stability(s, m));
        if (s.kind == SteadyKind::anisotropic) {
          const auto c = anisotropic_necessary_conditions(s, m);
          e["necessary_conditions"] = {{"lambda_u_ok", c.lambda_u_ok},
                                       {"lambda_v_ok", c.lambda_v_ok},
                                       {"g_prime_ok", c.g_prime_ok}};
        }
        states.push_back(e);
      }
      emit(g, "stability.json",
           {{"steady_states", states}, {"isotropic_transport", io::to_json(isotropic_transport_stability(m, n_max))}});
    } else if (*hopf) {
      const ModelParams m = load_model(g);
      const auto rows = hopf_sweep(m, g_from, g_to, g_steps, ode_t_end);
      const fs::path out = g.out_dir.empty() ? fs::path() : fs::path(g.out_dir) / "hopf_sweep.csv";
      if (out.empty()) {
        std::cout << std::setprecision(12);
        io::write_hopf_sweep_csv(std::cout, rows);
      } else {
        io::write_hopf_sweep_csv(out, rows);
        std::cerr << "wrote " << out.string() << '\n';
      }
    } else if (*tup) {
      const ModelParams m = load_model(g);
      const auto tuples = find_stable_tuples(m, rho_min, rho_max);
      json a = json::array();
      for (const auto& t : tuples) {
        json e = io::to_json(t);
        if (with_orbits && t.values.size() >= 2) {
          e["orbit"] = io::to_json(heteroclinic_check(m, t.values.front(), t.values[1]), true);
        }
        a.push_back(e);
      }
      emit(g, "tuples.json", a);
      if (tuples.empty()) throw NoResultError("no plateau tuples in the search box");
    } else if (*cw) {
      const ModelParams m = load_model(g);
      std::optional<SwitchPoints> sp;
      if (xi1.has_value() != xi2.has_value()) throw UsageError("give both --xi1 and --xi2 or neither");
      if (xi1) sp = SwitchPoints{*xi1, *xi2};
      const AdmissibleWave w = construct_admissible_wave(m, mass.value_or(m.total_mass / 2.0), sp);
      if (!g.out_dir.empty()) io::write_wave_csv(fs::path(g.out_dir) / "wave.csv", w, samples);
      emit(g, "wave.json", io::to_json(w));
    } else if (*meas) {
      const auto series = io::read_snapshots_csv(snap_path);
      const WaveMeasurement w = measure_wave_speed(series.snapshots, field_from_string(field_name), series.grid);
      json j = io::to_json(w);
      j["field"] = field_name;
      emit(g, "measurement.json", j);
    } else if (*cmp) {
      const ModelParams m = load_model(g);
      const auto series = io::read_snapshots_csv(cmp_snap);
      const WaveMeasurement w = measure_wave_speed(series.snapshots, FieldKind::u, series.grid);
      const double L = series.grid.length;
      double mean = 0.0;
      for (double p : w.profile) mean += p;
      mean /= static_cast<double>(w.profile.size());
      const SwitchEstimate sw = estimate_switch_points(w.profile, L);
      const AdmissibleWave wave = construct_admissible_wave(m, mean, SwitchPoints{sw.crest_length, L});
      emit(g, "comparison.json",
           {{"measurement", io::to_json(w)},
            {"wave", io::to_json(wave)},
            {"comparison", io::to_json(compare_profiles(wave, w.profile, L, exclude))}});
    } else if (*rep) {
      ReproduceOptions opts;
      opts.config_dir = config_dir;
      opts.out_dir = g.out_dir.empty() ? fs::path("figures") : fs::path(g.out_dir);
      opts.quick = quick;
      opts.seed = g.seed;
      opts.backend = parse_backend(rep_backend);
      const std::vector<std::string> ids = figure == "all" ? figure_ids() : std::vector<std::string>{figure};
      for (const auto& id : ids) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto files = reproduce_figure(id, opts);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << id << ": " << files.size() << " files in " << (opts.out_dir / id).string() << " (" << s
                  << " s)\n";
      }
    }
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const NoResultError& e) {
    std::cerr << "no result: " << e.what() << '\n';
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
