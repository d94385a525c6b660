#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ripplewave/model.hpp"

namespace ripple {

enum class SystemKind { full, memory_free };
enum class ReactionScheme { euler, rk4 };
enum class Backend { serial, openmp };

const char* to_string(SystemKind s);
const char* to_string(ReactionScheme s);
const char* to_string(Backend b);
SystemKind system_from_string(const std::string& s);
ReactionScheme scheme_from_string(const std::string& s);
Backend backend_from_string(const std::string& s);

/// Uniform periodic grid; cell i covers [i dx, (i+1) dx).
struct Grid {
  int n_cells = 1600;
  double length = 1.0;

  [[nodiscard]] double dx() const { return length / n_cells; }
  [[nodiscard]] double center(int i) const { return (i + 0.5) * dx(); }
};

/// Cell averages on a grid. The memory-free system leaves u1 and v1 empty.
struct FieldState {
  SystemKind system = SystemKind::full;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> u1;
  std::vector<double> v1;
  double t = 0.0;

  [[nodiscard]] int size() const { return static_cast<int>(u.size()); }
  /// sum (u + v) dx
  [[nodiscard]] double mass(double dx) const;
};

struct SimConfig {
  double dt = 0.0;
  double t_end = 1.0;
  double diffusion_eps = 0.0;
  ReactionScheme scheme = ReactionScheme::euler;
  int reaction_substeps = 1;
  int snapshot_every = 100;
  double record_from = 0.0;  // snapshots are kept for t >= record_from
  SystemKind system = SystemKind::full;
  Backend backend = Backend::serial;
  bool allow_cfl_violation = false;  // warn instead of refusing dt > dx / speed
};

/// dt = 0.99 dx, the default strict-CFL step.
double default_dt(const Grid& g, const ModelParams& m);

/// Throws ParameterError on CFL or diffusion-stability violations. With
/// allow_cfl_violation the CFL check only warns on stderr.
void validate(const SimConfig& cfg, const Grid& g, const ModelParams& m);

struct SimResult {
  std::vector<FieldState> snapshots;
  FieldState final_state;
  double initial_mass = 0.0;
  double max_mass_drift = 0.0;
  double min_density = 0.0;
  std::int64_t steps = 0;
};

/// Stepper holding scratch buffers; reuse across steps.
class Simulator {
 public:
  Simulator(ModelParams m, SimConfig cfg, Grid g);

  /// One split step: transport, reaction, optional diffusion. Throws
  /// NumericError on NaN or negativity below -1e-9.
  void step(FieldState& s);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const SimConfig& config() const { return cfg_; }
  [[nodiscard]] double min_density() const { return min_density_; }

 private:
  ModelParams m_;
  SimConfig cfg_;
  Grid grid_;
  std::vector<double> scratch_[4];
  double min_density_ = 0.0;
};

FieldState step(const FieldState& s, const SimConfig& cfg, const ModelParams& m, const Grid& g);

SimResult simulate(const FieldState& init, const SimConfig& cfg, const ModelParams& m,
                   const Grid& g);

enum class InitKind { sine, cosine, step, noise, csv };

struct InitSpec {
  InitKind kind = InitKind::sine;
  double amplitude = 0.0;
  std::string path;  // csv only
  std::uint64_t seed = 0;
};

/// Parses "sine:0.05", "cosine:0.1", "step:0.3", "noise:0.02" or "csv:FILE".
InitSpec parse_init(const std::string& text);

/// Isotropic state plus a zero-mean perturbation (exact discrete mean).
/// For the full system the reversible parts start at their local
/// equilibrium fractions. Throws ParameterError if a density goes negative.
FieldState initial_conditions(const InitSpec& spec, const Grid& g, const ModelParams& m,
                              SystemKind system);

/// Full-system state with u1, v1 at their local equilibrium fractions of u, v.
FieldState with_equilibrium_fractions(std::vector<double> u, std::vector<double> v,
                                      const ModelParams& m);

}  // namespace ripple
