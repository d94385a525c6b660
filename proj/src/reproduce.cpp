#include "ripplewave/reproduce.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "ripplewave/analysis.hpp"
#include "ripplewave/errors.hpp"
#include "ripplewave/io.hpp"
#include "ripplewave/ode_dynamics.hpp"
#include "ripplewave/wave_construction.hpp"

namespace ripple {
namespace {

namespace fs = std::filesystem;
using io::json;

struct Context {
  const ReproduceOptions& opts;
  fs::path dir;
  std::vector<fs::path> written;

  fs::path file(const std::string& name) {
    written.push_back(dir / name);
    return written.back();
  }
};

json load_config(const std::string& id, const ReproduceOptions& opts) {
  const fs::path path = opts.config_dir / (id + ".json");
  if (!fs::exists(path)) throw ParameterError("missing bundled config " + path.string());
  return io::read_json(path);
}

// The "sim" block with the "quick" overrides applied when requested.
json sim_block(const json& cfg, bool quick) {
  json sim = cfg.value("sim", json::object());
  if (quick && cfg.contains("quick")) sim.merge_patch(cfg.at("quick"));
  return sim;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

void write_orbit_csv(const fs::path& path, const PhaseOrbit& o) {
  auto out = open_csv(path);
  out << "q,q_prime\n";
  for (std::size_t i = 0; i < o.q.size(); ++i) out << o.q[i] << ',' << o.q_prime[i] << '\n';
}

json tuples_json(const std::vector<WaveTuple>& tuples) {
  json a = json::array();
  for (const auto& t : tuples) a.push_back(io::to_json(t));
  return a;
}

void fig1(Context& ctx, const json& cfg) {
  const ModelParams m = io::model_from_json(cfg.at("model"));
  int steps = cfg.value("steps", 100);
  const json ode = cfg.value("ode", json::object());
  double t_end = ode.value("t_end", 300.0);
  if (ctx.opts.quick && cfg.contains("quick")) {
    steps = cfg.at("quick").value("steps", steps);
    t_end = cfg.at("quick").value("t_end", t_end);
  }
  const auto rows = hopf_sweep(m, cfg.value("gamma_from", 0.5), cfg.value("gamma_to", 20.0), steps, t_end,
                               ode.value("dt", 1e-2), ode.value("d0", 0.05));
  io::write_hopf_sweep_csv(ctx.file("hopf_sweep.csv"), rows);
  io::write_json(ctx.file("thresholds.json"), io::to_json(hopf_thresholds(m)));
}

void fig2(Context& ctx, const json& cfg) {
  const ModelParams m = io::model_from_json(cfg.at("model"));
  const auto tuples = find_stable_tuples(m);
  io::write_json(ctx.file("tuples.json"), tuples_json(tuples));
  const WaveTuple* selected = nullptr;
  for (const auto& t : tuples) {
    if (t.selected && t.mass_compatible) selected = &t;
  }
  if (selected) {
    write_orbit_csv(ctx.file("orbit_selected.csv"),
                    heteroclinic_check(m, selected->values.front(), selected->values.back()));
  }

  // Runs from several initial conditions with the plateau overlay values.
  io::SimSetup setup = io::sim_from_json(sim_block(cfg, ctx.opts.quick), m);
  setup.config.system = SystemKind::memory_free;
  setup.config.backend = ctx.opts.backend;
  if (ctx.opts.quick) setup.config.dt = default_dt(setup.grid, m);
  std::vector<std::string> names;
  std::vector<FieldState> initial;
  std::vector<FieldState> final;
  json plateaus = json::array();
  for (const auto& text : cfg.at("inits")) {
    InitSpec spec = parse_init(text.get<std::string>());
    spec.seed = ctx.opts.seed;
    const FieldState init = initial_conditions(spec, setup.grid, m, SystemKind::memory_free);
    const SimResult r = simulate(init, setup.config, m, setup.grid);
    const PlateauFit fit = plateau_levels(r.final_state.u, 2);
    json entry{{"init", text},
               {"levels", fit.levels},
               {"relative_residual", fit.relative_residual},
               {"mass_drift", r.max_mass_drift}};
    if (selected) entry["constructed"] = {selected->values.front(), selected->values.back()};
    plateaus.push_back(entry);
    names.push_back(text.get<std::string>());
    initial.push_back(init);
    final.push_back(r.final_state);
  }
  for (const auto& [name, states] : {std::pair{"profiles_initial.csv", &initial}, std::pair{"profiles_final.csv", &final}}) {
    auto out = open_csv(ctx.file(name));
    out << 'x';
    for (const auto& n : names) out << ",u[" << n << "],v[" << n << ']';
    out << '\n';
    for (int i = 0; i < setup.grid.n_cells; ++i) {
      out << setup.grid.center(i);
      for (const auto& s : *states) out << ',' << s.u[static_cast<std::size_t>(i)] << ',' << s.v[static_cast<std::size_t>(i)];
      out << '\n';
    }
  }
  io::write_json(ctx.file("plateaus.json"), plateaus);

  // Panels for the double-sigmoid rate: candidate pairs and the orbit that
  // fails to connect the mass-compatible pair.
  if (cfg.contains("double_sigmoid")) {
    const ModelParams ds = io::model_from_json(cfg.at("double_sigmoid"));
    const auto ds_tuples = find_stable_tuples(ds);
    io::write_json(ctx.file("tuples_double_sigmoid.json"), tuples_json(ds_tuples));
    for (const auto& t : ds_tuples) {
      if (t.mass_compatible && t.values.size() == 2) {
        write_orbit_csv(ctx.file("orbit_double_sigmoid.csv"), heteroclinic_check(ds, t.values[0], t.values[1]));
        break;
      }
    }
  }
}

void fig4(Context& ctx, const json& cfg) {
  const ModelParams m = io::model_from_json(cfg.at("model"));
  io::SimSetup setup = io::sim_from_json(sim_block(cfg, ctx.opts.quick), m);
  setup.config.system = SystemKind::full;
  setup.config.backend = ctx.opts.backend;
  InitSpec spec = parse_init(cfg.value("init", std::string("sine:0.1")));
  spec.seed = ctx.opts.seed;
  const SimResult r = simulate(initial_conditions(spec, setup.grid, m, SystemKind::full), setup.config, m, setup.grid);
  io::write_spacetime_csv(ctx.file("spacetime.csv"), r.snapshots, setup.grid);
  json speeds = json::object();
  for (FieldKind f : {FieldKind::u, FieldKind::v, FieldKind::u1_over_u, FieldKind::v1_over_v}) {
    speeds[to_string(f)] = io::to_json(measure_wave_speed(r.snapshots, f, setup.grid));
  }
  io::write_json(ctx.file("speeds.json"), speeds);
}

void fig5(Context& ctx, const json& cfg) {
  for (const auto& ex : cfg.at("examples")) {
    const std::string name = ex.at("name").get<std::string>();
    const ModelParams m = io::model_from_json(ex.at("model"));

    {
      auto out = open_csv(ctx.file(name + "_curves.csv"));
      const Curves c(m);
      out << "rho,lambda,gamma,Lambda,Gamma\n";
      for (int i = 1; i <= 1000; ++i) {
        const double rho = 3.0 * i / 1000;
        out << rho << ',' << m.lambda.value(rho) << ',' << m.gamma.value(rho) << ',' << c.Lambda(rho) << ','
            << c.Gamma(rho) << '\n';
      }
    }

    io::SimSetup setup = io::sim_from_json(sim_block(cfg, ctx.opts.quick), m);
    setup.config.system = SystemKind::full;
    setup.config.backend = ctx.opts.backend;
    InitSpec spec = parse_init(cfg.value("init", std::string("sine:0.1")));
    spec.seed = ctx.opts.seed;
    const SimResult r = simulate(initial_conditions(spec, setup.grid, m, SystemKind::full), setup.config, m, setup.grid);
    const WaveMeasurement w = measure_wave_speed(r.snapshots, FieldKind::u, setup.grid);
    {
      auto out = open_csv(ctx.file(name + "_simulated.csv"));
      out << "x,u\n";
      for (int i = 0; i < setup.grid.n_cells; ++i) {
        out << setup.grid.center(i) << ',' << w.profile[static_cast<std::size_t>(i)] << '\n';
      }
    }
    json report{{"measurement", io::to_json(w)}};
    double mass = 0.0;
    for (double p : w.profile) mass += p * setup.grid.dx();
    mass /= setup.grid.length;
    const SwitchEstimate sw = estimate_switch_points(w.profile, setup.grid.length);
    report["switch_points"] = {{"up", sw.up_jump}, {"down", sw.down_jump}, {"crest_length", sw.crest_length}};
    try {
      const AdmissibleWave wave =
          construct_admissible_wave(m, mass, SwitchPoints{sw.crest_length, setup.grid.length});
      io::write_wave_csv(ctx.file(name + "_wave.csv"), wave, 2000);
      report["wave"] = io::to_json(wave);
      report["comparison"] = io::to_json(compare_profiles(wave, w.profile, setup.grid.length));
    } catch (const NoResultError& e) {
      report["wave_error"] = e.what();
    }
    io::write_json(ctx.file(name + "_comparison.json"), report);
  }
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig4", "fig5"};
  return ids;
}

std::vector<fs::path> reproduce_figure(const std::string& id, const ReproduceOptions& opts) {
  using Handler = void (*)(Context&, const json&);
  Handler h = nullptr;
  if (id == "fig1") h = fig1;
  if (id == "fig2") h = fig2;
  if (id == "fig4") h = fig4;
  if (id == "fig5") h = fig5;
  if (!h) throw ParameterError("unknown figure '" + id + "' (fig1, fig2, fig4, fig5)");
  const json cfg = load_config(id, opts);
  Context ctx{opts, opts.out_dir / id, {}};
  fs::create_directories(ctx.dir);
  try {
    h(ctx, cfg);
  } catch (const json::exception& e) {
    throw ParameterError(id + " config: " + e.what());
  }
  return ctx.written;
}

}  // namespace ripple
