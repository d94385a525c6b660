#include "ripplewave/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "ripplewave/errors.hpp"

namespace ripple::io {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// "SigmoidExp" -> "sigmoid_exp"; snake_case passes through.
std::string snake_case(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isupper(c)) {
      if (i > 0 && s[i - 1] != '_') out += '_';
      out += static_cast<char>(std::tolower(c));
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing parameter '") + key + "'");
  if (!j.at(key).is_number()) throw ParameterError(std::string("parameter '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

int integer_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ParameterError(std::string("'") + key + "' must be an integer");
  return j.at(key).get<int>();
}

std::string string_or(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ParameterError(std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

json complex_list(const auto& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back({z.real(), z.imag()});
  return a;
}

}  // namespace

RateFunction rate_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("rate function must be a JSON object");
  const std::string kind = snake_case(string_or(j, "kind", ""));
  switch (rate_kind_from_string(kind)) {
    case RateKind::constant:
      return RateFunction::constant(number(j, "value"));
    case RateKind::linear:
      return RateFunction::linear(number(j, "a"), number(j, "b"));
    case RateKind::quadratic:
      return RateFunction::quadratic(number(j, "a"), number_or(j, "b", 0.0), number_or(j, "c", 0.0));
    case RateKind::sigmoid_exp:
      return RateFunction::sigmoid_exp(number(j, "lam_lo"), number(j, "lam_hi"), number(j, "alpha"),
                                       number_or(j, "center", 1.0));
    case RateKind::sigmoid_rational:
      return RateFunction::sigmoid_rational(number(j, "lam_lo"), number(j, "lam_hi"), number(j, "alpha"));
    case RateKind::piecewise_linear_step:
      return RateFunction::piecewise_linear_step(number(j, "lam_lo"), number(j, "lam_hi"),
                                                 number(j, "eps"), number_or(j, "center", 1.0));
    case RateKind::double_sigmoid:
      return RateFunction::double_sigmoid(number(j, "lam_lo"), number(j, "lam_mid"), number(j, "lam_hi"),
                                          number(j, "rho_lo"), number(j, "rho_hi"), number(j, "delta"));
    case RateKind::triple_step: {
      if (!j.contains("ramps") || !j.at("ramps").is_array() || j.at("ramps").size() != 3) {
        throw ParameterError("triple_step needs a 'ramps' array of three objects");
      }
      TripleStepRate t{number(j, "lam_lo"), {}};
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& r = j.at("ramps").at(k);
        t.ramps[k] = Ramp{number(r, "center"), number(r, "half_width"), number(r, "rise")};
      }
      return RateFunction(t);
    }
  }
  throw ParameterError("unsupported rate kind");
}

json to_json(const RateFunction& f) {
  json j{{"kind", std::string(to_string(f.kind()))}};
  std::visit(Overloaded{
                 [&](const ConstantRate& s) { j["value"] = s.c; },
                 [&](const LinearRate& s) {
                   j["a"] = s.a;
                   j["b"] = s.b;
                 },
                 [&](const QuadraticRate& s) {
                   j["a"] = s.a;
                   j["b"] = s.b;
                   j["c"] = s.c;
                 },
                 [&](const SigmoidExpRate& s) {
                   j["lam_lo"] = s.lam_lo;
                   j["lam_hi"] = s.lam_hi;
                   j["alpha"] = s.alpha;
                   j["center"] = s.center;
                 },
                 [&](const SigmoidRationalRate& s) {
                   j["lam_lo"] = s.lam_lo;
                   j["lam_hi"] = s.lam_hi;
                   j["alpha"] = s.alpha;
                 },
                 [&](const PiecewiseLinearStepRate& s) {
                   j["lam_lo"] = s.lam_lo;
                   j["lam_hi"] = s.lam_hi;
                   j["eps"] = s.eps;
                   j["center"] = s.center;
                 },
                 [&](const DoubleSigmoidRate& s) {
                   j["lam_lo"] = s.lam_lo;
                   j["lam_mid"] = s.lam_mid;
                   j["lam_hi"] = s.lam_hi;
                   j["rho_lo"] = s.rho_lo;
                   j["rho_hi"] = s.rho_hi;
                   j["delta"] = s.delta;
                 },
                 [&](const TripleStepRate& s) {
                   j["lam_lo"] = s.lam_lo;
                   j["ramps"] = json::array();
                   for (const auto& r : s.ramps) {
                     j["ramps"].push_back({{"center", r.center}, {"half_width", r.half_width}, {"rise", r.rise}});
                   }
                 },
             },
             f.shape());
  return j;
}

ModelParams model_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("lambda") || !j.contains("gamma")) {
      throw ParameterError("model needs 'lambda' and 'gamma' objects");
    }
    const RateFunction lambda = rate_from_json(j.at("lambda"));
    const RateFunction gamma = rate_from_json(j.at("gamma"));
    if (j.contains("scaling")) {
      const auto& s = j.at("scaling");
      return nondimensionalize(
          RawModel{lambda, gamma, number(s, "speed"), number(s, "length"), number(s, "mean_density")});
    }
    ModelParams m{lambda, gamma};
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad model config: ") + e.what());
  }
}

json to_json(const ModelParams& m) {
  return {{"lambda", to_json(m.lambda)},
          {"gamma", to_json(m.gamma)},
          {"total_mass", m.total_mass},
          {"domain_length", m.domain_length},
          {"speed", m.speed}};
}

SimSetup sim_from_json(const json& j, const ModelParams& m) {
  try {
    if (!j.is_object()) throw ParameterError("simulation config must be a JSON object");
    SimSetup s;
    s.grid.n_cells = integer_or(j, "n_cells", s.grid.n_cells);
    s.grid.length = m.domain_length;
    SimConfig& c = s.config;
    c.t_end = number_or(j, "t_end", c.t_end);
    c.diffusion_eps = number_or(j, "diffusion_eps", c.diffusion_eps);
    c.scheme = scheme_from_string(string_or(j, "scheme", to_string(c.scheme)));
    c.reaction_substeps = integer_or(j, "reaction_substeps", c.reaction_substeps);
    c.snapshot_every = integer_or(j, "snapshot_every", c.snapshot_every);
    c.record_from = number_or(j, "record_from", c.record_from);
    c.system = system_from_string(string_or(j, "system", to_string(c.system)));
    c.backend = backend_from_string(string_or(j, "backend", to_string(c.backend)));
    if (s.grid.n_cells < 16) throw ParameterError("n_cells must be at least 16");
    c.dt = number_or(j, "dt", default_dt(s.grid, m));
    return s;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad simulation config: ") + e.what());
  }
}

json to_json(const SimSetup& s) {
  const auto& c = s.config;
  return {{"n_cells", s.grid.n_cells},
          {"length", s.grid.length},
          {"dt", c.dt},
          {"t_end", c.t_end},
          {"diffusion_eps", c.diffusion_eps},
          {"scheme", to_string(c.scheme)},
          {"reaction_substeps", c.reaction_substeps},
          {"snapshot_every", c.snapshot_every},
          {"record_from", c.record_from},
          {"system", to_string(c.system)},
          {"backend", to_string(c.backend)},
          {"allow_cfl_violation", c.allow_cfl_violation}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json to_json(const SteadyState& s) {
  return {{"d", s.d_bar},       {"u", s.u()},
          {"v", s.v()},         {"u1", s.u1},
          {"v1", s.v1},         {"kind", to_string(s.kind)},
          {"stability", to_string(s.stability)}};
}

json to_json(const StabilityVerdict& v) {
  json j{{"verdict", to_string(v.verdict)},
         {"max_real", v.max_real},
         {"eigenvalues", complex_list(v.eigenvalues)}};
  if (v.tau_negative) j["tau_negative"] = *v.tau_negative;
  if (v.condition2) j["condition2"] = *v.condition2;
  return j;
}

json to_json(const HopfThresholds& h) {
  return {{"applicable", h.applicable},
          {"alpha_condition", h.alpha_condition},
          {"uniqueness_condition", h.uniqueness_condition},
          {"gamma_star", h.gamma_star},
          {"gamma_hat", h.gamma_hat},
          {"gamma_star2", h.gamma_star2}};
}

json to_json(const StabilityReport& r) {
  json modes = json::array();
  for (std::size_t i = 0; i < r.rh.size(); ++i) {
    const auto& c = r.rh[i];
    modes.push_back({{"k", c.k},
                     {"a", {c.a0, c.a1, c.a2, c.a3}},
                     {"p", c.p},
                     {"q", c.q},
                     {"max_real", i < r.dispersion.size() ? r.dispersion[i].max_real : 0.0}});
  }
  return {{"verdict", to_string(r.verdict)},
          {"lambda_prime_ok", r.isotropic_conditions.lambda_prime_ok},
          {"gamma_prime_ok", r.isotropic_conditions.gamma_prime_ok},
          {"super_linear", r.isotropic_conditions.super_linear},
          {"rh_consistent", r.rh_consistent},
          {"most_unstable_n", r.most_unstable_n},
          {"most_unstable_k", r.most_unstable_k},
          {"most_unstable_growth", r.most_unstable_growth},
          {"modes", modes}};
}

json to_json(const WaveTuple& t) {
  json stable = json::array();
  for (bool b : t.linear_stable) stable.push_back(b);
  return {{"Lambda", t.r},
          {"values", t.values},
          {"linear_stable", stable},
          {"omega_residual", t.omega_residual},
          {"omega_match", t.omega_match},
          {"heteroclinic", t.heteroclinic},
          {"selected", t.selected},
          {"mass_compatible", t.mass_compatible}};
}

json to_json(const PhaseOrbit& o, bool with_samples) {
  json j{{"w_start", o.w_start},
         {"w_target", o.w_target},
         {"is_heteroclinic", o.is_heteroclinic},
         {"energy", o.energy},
         {"energy_residual", o.energy_residual},
         {"closest_approach", o.closest_approach},
         {"termination", o.termination}};
  if (with_samples) {
    j["q"] = o.q;
    j["q_prime"] = o.q_prime;
  }
  return j;
}

json to_json(const WaveMeasurement& w) {
  return {{"speed", w.speed},
          {"speed_ci", w.speed_ci},
          {"is_traveling", w.is_traveling},
          {"comoving_rms", w.comoving_rms},
          {"periodicity_error", w.periodicity_error},
          {"range", w.range},
          {"snapshots", w.times.size()}};
}

json to_json(const ComparisonReport& r) {
  json jumps = json::array();
  for (const auto& [a, b] : r.jump_alignment) jumps.push_back({a, b});
  return {{"l1_error", r.l1_error},
          {"linf_error", r.linf_error},
          {"relative_l1", r.relative_l1},
          {"amplitude", r.amplitude},
          {"optimal_shift", r.optimal_shift},
          {"compared_cells", r.compared_cells},
          {"jump_alignment", jumps}};
}

json to_json(const AdmissibleWave& w) {
  json segs = json::array();
  for (const auto& s : w.segments) {
    segs.push_back({{"branch", s.branch},
                    {"xi_from", s.xi.empty() ? 0.0 : s.xi.front()},
                    {"xi_to", s.xi.empty() ? 0.0 : s.xi.back()},
                    {"P_from", s.P.empty() ? 0.0 : s.P.front()},
                    {"P_to", s.P.empty() ? 0.0 : s.P.back()}});
  }
  json jumps = json::array();
  for (const auto& jp : w.jumps) jumps.push_back({{"xi", jp.xi}, {"P_left", jp.P_left}, {"P_right", jp.P_right}});
  return {{"method", w.method},
          {"r", w.r},
          {"period", w.period},
          {"mass", w.mass},
          {"degenerate", w.degenerate},
          {"segments", segs},
          {"jumps", jumps}};
}

void write_snapshots_csv(const std::filesystem::path& path, const std::vector<FieldState>& snaps,
                         const Grid& g) {
  auto out = open_out(path);
  out << "t,x,u,v,u1,v1\n";
  for (const auto& s : snaps) {
    const bool full = s.system == SystemKind::full;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      out << s.t << ',' << g.center(static_cast<int>(i)) << ',' << s.u[i] << ',' << s.v[i] << ','
          << (full ? s.u1[i] : s.u[i]) << ',' << (full ? s.v1[i] : s.v[i]) << '\n';
    }
  }
}

void write_spacetime_csv(const std::filesystem::path& path, const std::vector<FieldState>& snaps,
                         const Grid& g) {
  auto out = open_out(path);
  out << "t,x,u,v,u1_over_u,v1_over_v\n";
  for (const auto& s : snaps) {
    const auto a = extract_field(s, FieldKind::u1_over_u);
    const auto b = extract_field(s, FieldKind::v1_over_v);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      out << s.t << ',' << g.center(static_cast<int>(i)) << ',' << s.u[i] << ',' << s.v[i] << ',' << a[i]
          << ',' << b[i] << '\n';
    }
  }
}

SnapshotSeries read_snapshots_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,u,v,u1,v1", 0) != 0) {
    throw ParameterError(path.string() + ": expected header t,x,u,v,u1,v1");
  }
  SnapshotSeries series;
  std::vector<double> xs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double vals[6];
    char comma = 0;
    for (int k = 0; k < 6; ++k) {
      if (k > 0 && !(row >> comma && comma == ',')) {
        throw ParameterError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
      }
      if (!(row >> vals[k])) {
        throw ParameterError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
      }
    }
    auto& snaps = series.snapshots;
    if (snaps.empty() || vals[0] != snaps.back().t) {
      FieldState s;
      s.system = SystemKind::full;
      s.t = vals[0];
      snaps.push_back(std::move(s));
    }
    auto& s = snaps.back();
    if (snaps.size() == 1) xs.push_back(vals[1]);
    s.u.push_back(vals[2]);
    s.v.push_back(vals[3]);
    s.u1.push_back(vals[4]);
    s.v1.push_back(vals[5]);
  }
  if (series.snapshots.empty() || xs.size() < 2) throw ParameterError(path.string() + ": no snapshots");
  for (const auto& s : series.snapshots) {
    if (s.u.size() != xs.size()) throw ParameterError(path.string() + ": snapshots differ in size");
  }
  series.grid.n_cells = static_cast<int>(xs.size());
  series.grid.length = (xs[1] - xs[0]) * static_cast<double>(xs.size());
  return series;
}

void write_hopf_sweep_csv(const std::filesystem::path& path, const std::vector<HopfSweepRow>& rows) {
  auto out = open_out(path);
  write_hopf_sweep_csv(out, rows);
}

void write_hopf_sweep_csv(std::ostream& out, const std::vector<HopfSweepRow>& rows) {
  out << "gamma,d_fixed_points,stability,limit_cycle,cycle_min_d,cycle_max_d\n";
  for (const auto& r : rows) {
    out << r.gamma << ',';
    for (std::size_t i = 0; i < r.steady_states.size(); ++i) out << (i ? ";" : "") << r.steady_states[i].d_bar;
    out << ',';
    for (std::size_t i = 0; i < r.steady_states.size(); ++i) {
      out << (i ? ";" : "") << to_string(r.steady_states[i].stability);
    }
    out << ',' << (r.limit_cycle ? 1 : 0) << ',';
    if (r.limit_cycle) out << r.tail_min_d << ',' << r.tail_max_d;
    else out << ',';
    out << '\n';
  }
}

void write_wave_csv(const std::filesystem::path& path, const AdmissibleWave& w, int samples) {
  if (samples < 2) throw ParameterError("need at least two samples");
  auto out = open_out(path);
  out << "xi,P,B\n";
  for (int i = 0; i < samples; ++i) {
    const double xi = w.period * i / samples;
    out << xi << ',' << w.P_at(xi) << ',' << w.B_at(xi) << '\n';
  }
}

}  // namespace ripple::io
