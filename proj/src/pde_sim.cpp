#include "ripplewave/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "kernels.hpp"
#include "ripplewave/errors.hpp"

namespace ripple {
namespace {

constexpr double kDust = 1e-12;
constexpr double kBlowUp = -1e-9;

kernels::Fields fields_of(FieldState& s) {
  const bool full = s.system == SystemKind::full;
  return {s.u.data(), s.v.data(), full ? s.u1.data() : nullptr, full ? s.v1.data() : nullptr,
          s.u.size()};
}

kernels::Fields fields_of(std::vector<double> (&b)[4], bool full) {
  return {b[0].data(), b[1].data(), full ? b[2].data() : nullptr, full ? b[3].data() : nullptr,
          b[0].size()};
}

void subtract_mean(std::vector<double>& p) {
  double mean = 0.0;
  for (double x : p) mean += x;
  mean /= static_cast<double>(p.size());
  for (double& x : p) x -= mean;
}

}  // namespace

const char* to_string(SystemKind s) { return s == SystemKind::full ? "full" : "memory_free"; }
const char* to_string(ReactionScheme s) { return s == ReactionScheme::euler ? "euler" : "rk4"; }
const char* to_string(Backend b) { return b == Backend::serial ? "serial" : "openmp"; }

SystemKind system_from_string(const std::string& s) {
  if (s == "full") return SystemKind::full;
  if (s == "memory_free") return SystemKind::memory_free;
  throw ParameterError("unknown system '" + s + "' (full, memory_free)");
}

ReactionScheme scheme_from_string(const std::string& s) {
  if (s == "euler") return ReactionScheme::euler;
  if (s == "rk4") return ReactionScheme::rk4;
  throw ParameterError("unknown reaction scheme '" + s + "' (euler, rk4)");
}

Backend backend_from_string(const std::string& s) {
  if (s == "serial") return Backend::serial;
  if (s == "openmp") return Backend::openmp;
  throw ParameterError("unknown backend '" + s + "' (serial, openmp)");
}

double FieldState::mass(double dx) const {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] + v[i];
  return s * dx;
}

double default_dt(const Grid& g, const ModelParams& m) { return 0.99 * g.dx() / m.speed; }

void validate(const SimConfig& cfg, const Grid& g, const ModelParams& m) {
  if (g.n_cells < 16) throw ParameterError("grid needs at least 16 cells");
  if (!(g.length > 0.0)) throw ParameterError("grid length must be positive");
  if (!(cfg.dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(cfg.t_end >= 0.0)) throw ParameterError("t_end must be non-negative");
  if (cfg.snapshot_every < 1) throw ParameterError("snapshot_every must be >= 1");
  if (cfg.reaction_substeps < 1) throw ParameterError("reaction_substeps must be >= 1");
  if (!(cfg.diffusion_eps >= 0.0)) throw ParameterError("diffusion_eps must be >= 0");
  const double dx = g.dx();
  if (cfg.dt * m.speed > dx * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: dt = " << cfg.dt << " exceeds dx / speed = " << dx / m.speed;
    if (!cfg.allow_cfl_violation) throw ParameterError(os.str());
    std::cerr << "warning: " << os.str() << '\n';
  }
  const double e2 = cfg.diffusion_eps * cfg.diffusion_eps;
  if (e2 > 0.0 && cfg.dt > dx * dx / (2.0 * e2) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "diffusion stability violated: dt = " << cfg.dt << " exceeds dx^2/(2 eps^2) = "
       << dx * dx / (2.0 * e2);
    throw ParameterError(os.str());
  }
}

Simulator::Simulator(ModelParams m, SimConfig cfg, Grid g)
    : m_(std::move(m)), cfg_(cfg), grid_(g) {
  validate(cfg_, grid_, m_);
  const bool full = cfg_.system == SystemKind::full;
  for (int k = 0; k < 4; ++k) {
    if (k < 2 || full) scratch_[k].assign(static_cast<std::size_t>(grid_.n_cells), 0.0);
  }
}

void Simulator::step(FieldState& s) {
  if (s.size() != grid_.n_cells || s.system != cfg_.system) {
    throw UsageError("state does not match the simulator grid or system");
  }
  const bool full = cfg_.system == SystemKind::full;
  const bool omp = cfg_.backend == Backend::openmp;
  const double courant = cfg_.dt * m_.speed / grid_.dx();

  kernels::Fields state = fields_of(s);
  kernels::Fields tmp = fields_of(scratch_, full);
  auto swap_in = [&] {
    std::swap(s.u, scratch_[0]);
    std::swap(s.v, scratch_[1]);
    if (full) {
      std::swap(s.u1, scratch_[2]);
      std::swap(s.v1, scratch_[3]);
    }
    state = fields_of(s);
    tmp = fields_of(scratch_, full);
  };

  if (omp) {
    kernels::transport_omp(state, tmp, courant);
  } else {
    kernels::transport_serial(state, tmp, courant);
  }
  swap_in();

  if (omp) {
    kernels::react_omp(state, cfg_.dt, cfg_.reaction_substeps, cfg_.scheme, m_);
  } else {
    kernels::react_serial(state, cfg_.dt, cfg_.reaction_substeps, cfg_.scheme, m_);
  }

  if (cfg_.diffusion_eps > 0.0) {
    const double dx = grid_.dx();
    const double D = cfg_.diffusion_eps * cfg_.diffusion_eps * cfg_.dt / (dx * dx);
    if (omp) {
      kernels::diffuse_omp(state, tmp, D);
    } else {
      kernels::diffuse_serial(state, tmp, D);
    }
    swap_in();
  }

  const kernels::CellMin low = omp ? kernels::sanitize_omp(state, kDust)
                                   : kernels::sanitize_serial(state, kDust);
  if (std::isnan(low.value) || low.value < kBlowUp) {
    std::ostringstream os;
    os << "simulation blew up at t = " << s.t + cfg_.dt << ": density " << low.value
       << " in cell " << low.index;
    throw NumericError(os.str());
  }
  min_density_ = low.value;
  s.t += cfg_.dt;
}

FieldState step(const FieldState& s, const SimConfig& cfg, const ModelParams& m, const Grid& g) {
  FieldState out = s;
  Simulator sim(m, cfg, g);
  sim.step(out);
  return out;
}

SimResult simulate(const FieldState& init, const SimConfig& cfg, const ModelParams& m,
                   const Grid& g) {
  Simulator sim(m, cfg, g);
  SimResult res;
  FieldState s = init;
  const double dx = g.dx();
  res.initial_mass = s.mass(dx);
  res.min_density = std::numeric_limits<double>::infinity();
  for (const auto* a : {&s.u, &s.v, &s.u1, &s.v1}) {
    for (double x : *a) res.min_density = std::min(res.min_density, x);
  }
  const auto n_steps = static_cast<std::int64_t>(std::llround(cfg.t_end / cfg.dt));
  auto record = [&](std::int64_t k) {
    if (s.t >= cfg.record_from - 1e-12 && (k % cfg.snapshot_every == 0 || k == n_steps)) {
      res.snapshots.push_back(s);
    }
  };
  record(0);
  for (std::int64_t k = 1; k <= n_steps; ++k) {
    sim.step(s);
    s.t = static_cast<double>(k) * cfg.dt;
    res.min_density = std::min(res.min_density, sim.min_density());
    res.max_mass_drift = std::max(res.max_mass_drift, std::abs(s.mass(dx) - res.initial_mass));
    record(k);
  }
  res.steps = n_steps;
  res.final_state = std::move(s);
  return res;
}

InitSpec parse_init(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParameterError("init must look like kind:value, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  InitSpec spec;
  if (kind == "csv") {
    spec.kind = InitKind::csv;
    spec.path = arg;
    return spec;
  }
  if (kind == "sine") {
    spec.kind = InitKind::sine;
  } else if (kind == "cosine") {
    spec.kind = InitKind::cosine;
  } else if (kind == "step") {
    spec.kind = InitKind::step;
  } else if (kind == "noise") {
    spec.kind = InitKind::noise;
  } else {
    throw ParameterError("unknown init kind '" + kind + "' (sine, cosine, step, noise, csv)");
  }
  try {
    std::size_t used = 0;
    spec.amplitude = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw ParameterError("bad init amplitude '" + arg + "'");
  }
  return spec;
}

FieldState with_equilibrium_fractions(std::vector<double> u, std::vector<double> v,
                                      const ModelParams& m) {
  FieldState s;
  s.system = SystemKind::full;
  s.u1.resize(u.size());
  s.v1.resize(v.size());
  const Curves c(m);
  for (std::size_t i = 0; i < u.size(); ++i) {
    // u1 relaxes to u gamma(v) / (gamma(v) + lambda(v)).
    s.u1[i] = u[i] * c.Gamma(v[i]);
    s.v1[i] = v[i] * c.Gamma(u[i]);
  }
  s.u = std::move(u);
  s.v = std::move(v);
  return s;
}

FieldState initial_conditions(const InitSpec& spec, const Grid& g, const ModelParams& m,
                              SystemKind system) {
  if (g.n_cells < 16) throw ParameterError("grid needs at least 16 cells");
  const auto n = static_cast<std::size_t>(g.n_cells);
  const double base = m.total_mass / (2.0 * g.length);
  std::vector<double> pu(n, 0.0);
  std::vector<double> pv(n, 0.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  const double a = spec.amplitude;

  switch (spec.kind) {
    case InitKind::sine:
      for (std::size_t i = 0; i < n; ++i) {
        pu[i] = pv[i] = a * std::sin(two_pi * g.center(static_cast<int>(i)) / g.length);
      }
      break;
    case InitKind::cosine:
      for (std::size_t i = 0; i < n; ++i) {
        pu[i] = a * std::cos(two_pi * g.center(static_cast<int>(i)) / g.length);
        pv[i] = -pu[i];
      }
      break;
    case InitKind::step:
      for (std::size_t i = 0; i < n; ++i) {
        const double x = g.center(static_cast<int>(i)) / g.length;
        pu[i] = x < 0.5 ? a : -a;
        pv[i] = (x >= 0.25 && x < 0.75) ? a : -a;
      }
      break;
    case InitKind::noise: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        pu[i] = a * dist(rng);
        pv[i] = a * dist(rng);
      }
      break;
    }
    case InitKind::csv: {
      std::ifstream in(spec.path);
      if (!in) throw ParameterError("cannot open init file '" + spec.path + "'");
      std::vector<double> us;
      std::vector<double> vs;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) {
          continue;  // header
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0.0;
        double u = 0.0;
        double v = 0.0;
        if (!(row >> x >> u >> v)) throw ParameterError("init csv rows need x,u,v");
        us.push_back(u);
        vs.push_back(v);
      }
      if (us.size() != n) {
        throw ParameterError("init csv has " + std::to_string(us.size()) + " rows, grid has " +
                             std::to_string(n));
      }
      for (std::size_t i = 0; i < n; ++i) {
        pu[i] = us[i] - base;
        pv[i] = vs[i] - base;
      }
      break;
    }
  }
  if (spec.kind != InitKind::csv) {
    subtract_mean(pu);
    subtract_mean(pv);
  }

  std::vector<double> u(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = base + pu[i];
    v[i] = base + pv[i];
    if (!(u[i] > 0.0) || !(v[i] > 0.0)) {
      throw ParameterError("initial perturbation makes a density non-positive");
    }
  }
  if (system == SystemKind::memory_free) {
    FieldState s;
    s.system = SystemKind::memory_free;
    s.u = std::move(u);
    s.v = std::move(v);
    return s;
  }
  return with_equilibrium_fractions(std::move(u), std::move(v), m);
}

}  // namespace ripple
