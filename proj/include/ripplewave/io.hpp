#pragma once

// JSON configuration and CSV/JSON output for the command-line tool.

#include <filesystem>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "ripplewave/analysis.hpp"
#include "ripplewave/linear_stability.hpp"
#include "ripplewave/model.hpp"
#include "ripplewave/ode_dynamics.hpp"
#include "ripplewave/pde_sim.hpp"
#include "ripplewave/wave_construction.hpp"

namespace ripple::io {

using json = nlohmann::json;

/// {"kind": "sigmoid_exp", "lam_lo": 2.5, "lam_hi": 8, "alpha": 10}.
/// CamelCase kind names ("SigmoidExp") are accepted too.
RateFunction rate_from_json(const json& j);
json to_json(const RateFunction& f);

/// {"lambda": {...}, "gamma": {...}} in dimensionless units, or with a
/// "scaling": {"speed", "length", "mean_density"} block for raw rates, which
/// are then nondimensionalized. Throws ParameterError on bad input.
ModelParams model_from_json(const json& j);
json to_json(const ModelParams& m);

struct SimSetup {
  Grid grid;
  SimConfig config;
};

/// Keys: n_cells, t_end, dt (defaults to 0.99 dx), diffusion_eps, scheme,
/// reaction_substeps, snapshot_every, record_from, system, backend.
SimSetup sim_from_json(const json& j, const ModelParams& m);
json to_json(const SimSetup& s);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

json to_json(const SteadyState& s);
json to_json(const StabilityVerdict& v);
json to_json(const HopfThresholds& h);
json to_json(const StabilityReport& r);
json to_json(const WaveTuple& t);
json to_json(const PhaseOrbit& o, bool with_samples = false);
json to_json(const WaveMeasurement& w);
json to_json(const ComparisonReport& r);
/// Summary of a constructed wave (segments and jumps, no samples).
json to_json(const AdmissibleWave& w);

/// Long table t, x, u, v, u1, v1. Memory-free states write u1 = u, v1 = v.
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<FieldState>& snaps,
                         const Grid& g);
/// Long table t, x, u, v, u1_over_u, v1_over_v for heat maps.
void write_spacetime_csv(const std::filesystem::path& path, const std::vector<FieldState>& snaps,
                         const Grid& g);

struct SnapshotSeries {
  Grid grid;
  std::vector<FieldState> snapshots;
};

/// Reads a file written by write_snapshots_csv. Throws ParameterError if the
/// file is malformed or snapshots differ in size.
SnapshotSeries read_snapshots_csv(const std::filesystem::path& path);

/// gamma, d_fixed_points, stability, limit_cycle, cycle_min_d, cycle_max_d.
/// Multiple fixed points are joined with ';'. Cycle columns are empty
/// unless a limit cycle was detected.
void write_hopf_sweep_csv(std::ostream& out, const std::vector<HopfSweepRow>& rows);
void write_hopf_sweep_csv(const std::filesystem::path& path, const std::vector<HopfSweepRow>& rows);

/// xi, P, B sampled uniformly over one period.
void write_wave_csv(const std::filesystem::path& path, const AdmissibleWave& w, int samples);

}  // namespace ripple::io
