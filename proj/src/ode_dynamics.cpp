#include "ripplewave/ode_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ripple {
namespace {

constexpr double kMarginalBand = 1e-8;
constexpr double kSteadyTolerance = 1e-8;

Stability classify(double max_real) {
  if (max_real > kMarginalBand) return Stability::unstable;
  if (max_real < -kMarginalBand) return Stability::stable;
  return Stability::marginal;
}

double max_real_part(const std::array<cplx, 3>& z) {
  return std::max({z[0].real(), z[1].real(), z[2].real()});
}

// Q = lambda gamma / (lambda + gamma) at rho and its derivative in rho.
std::pair<double, double> q_of(double rho, const ModelParams& m) {
  const auto [l, dl] = m.lambda.eval(rho);
  const auto [g, dg] = m.gamma.eval(rho);
  const double s = l + g;
  return {l * g / s, (dl * g * g + dg * l * l) / (s * s)};
}

}  // namespace

double distance(const OdeState& a, const OdeState& b) {
  const OdeState e = a - b;
  return std::sqrt(e.d * e.d + e.u1 * e.u1 + e.v1 * e.v1);
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "unknown";
}

const char* to_string(SteadyKind k) {
  return k == SteadyKind::isotropic ? "isotropic" : "anisotropic";
}

OdeState ode_rhs(const OdeState& s, const ModelParams& m) {
  const double up = 1.0 + s.d;
  const double dn = 1.0 - s.d;
  const double l_up = m.lambda.value(up);
  const double l_dn = m.lambda.value(dn);
  return {l_up * s.v1 - l_dn * s.u1,
          m.gamma.value(dn) * (up - s.u1) - l_dn * s.u1,
          m.gamma.value(up) * (dn - s.v1) - l_up * s.v1};
}

GValue g_eval(double d, const ModelParams& m) {
  if (!(std::abs(d) < 1.0)) throw DomainError("G requires |d| < 1, got " + std::to_string(d));
  const auto [qp, dqp] = q_of(1.0 + d, m);
  const auto [qm, dqm] = q_of(1.0 - d, m);
  // d/dd Q-(d) = -Q'(1 - d)
  return {(1.0 - d) * qp - (1.0 + d) * qm, -qp + (1.0 - d) * dqp - qm + (1.0 + d) * dqm};
}

IsotropicCoefficients isotropic_coefficients(const ModelParams& m) {
  const auto [l, dl] = m.lambda.eval(1.0);
  const auto [g, dg] = m.gamma.eval(1.0);
  return {l, g, dl * g / (g + l), dg * l / (g + l)};
}

double tau(const ModelParams& m) {
  const auto [l, dl] = m.lambda.eval(1.0);
  const auto [g, dg] = m.gamma.eval(1.0);
  return g / l * (dl - l) + l / g * (dg - g);
}

SteadyState steady_state_at(double d, const ModelParams& m) {
  const double up = 1.0 + d;
  const double dn = 1.0 - d;
  const double g_dn = m.gamma.value(dn);
  const double g_up = m.gamma.value(up);
  SteadyState ss;
  ss.d_bar = d;
  ss.u1 = g_dn / (g_dn + m.lambda.value(dn)) * up;
  ss.v1 = g_up / (g_up + m.lambda.value(up)) * dn;
  ss.kind = d == 0.0 ? SteadyKind::isotropic : SteadyKind::anisotropic;
  return ss;
}

SteadyState isotropic_state(const ModelParams& m) {
  SteadyState ss = steady_state_at(0.0, m);
  ss.stability = ode_stability(ss, m).verdict;
  return ss;
}

std::vector<SteadyState> find_steady_states(const ModelParams& m) {
  constexpr int kBrackets = 2048;
  constexpr double kEdge = 1e-9;
  auto g = [&m](double d) { return g_eval(d, m).value; };

  std::vector<double> roots;
  for (const auto& [a, b] : sign_change_brackets(g, -1.0 + kEdge, 1.0 - kEdge, kBrackets)) {
    const double r = bisect(g, a, b, 1e-12);
    if (std::abs(r) < 1e-8) continue;  // isotropic root, added below
    roots.push_back(std::abs(r));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-8; }),
              roots.end());

  std::vector<SteadyState> out;
  out.push_back(isotropic_state(m));
  for (double r : roots) {
    // G is odd, so roots come in mirrored pairs
    for (double d : {r, -r}) {
      SteadyState ss = steady_state_at(d, m);
      ss.kind = SteadyKind::anisotropic;
      ss.stability = ode_stability(ss, m).verdict;
      out.push_back(ss);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SteadyState& a, const SteadyState& b) { return a.d_bar < b.d_bar; });
  return out;
}

RMatrix<3> ode_jacobian_fd(const OdeState& s, const ModelParams& m, double h) {
  RMatrix<3> jac{};
  for (int j = 0; j < 3; ++j) {
    OdeState plus = s;
    OdeState minus = s;
    double* pp = j == 0 ? &plus.d : (j == 1 ? &plus.u1 : &plus.v1);
    double* pm = j == 0 ? &minus.d : (j == 1 ? &minus.u1 : &minus.v1);
    *pp += h;
    *pm -= h;
    const OdeState fp = ode_rhs(plus, m);
    const OdeState fm = ode_rhs(minus, m);
    jac[0][j] = (fp.d - fm.d) / (2.0 * h);
    jac[1][j] = (fp.u1 - fm.u1) / (2.0 * h);
    jac[2][j] = (fp.v1 - fm.v1) / (2.0 * h);
  }
  return jac;
}

StabilityVerdict ode_stability(const SteadyState& ss, const ModelParams& m) {
  if (std::abs(ss.d_bar) >= 1.0) throw NumericError("steady state has |d| >= 1");
  const double residual = g_eval(ss.d_bar, m).value;
  if (std::abs(residual) > kSteadyTolerance) {
    throw NumericError("not a steady state: |G(d)| = " + std::to_string(std::abs(residual)));
  }

  StabilityVerdict out;
  if (ss.kind == SteadyKind::isotropic) {
    const auto [l, g, b, c] = isotropic_coefficients(m);
    const double dl = m.lambda.derivative(1.0);
    out.tau_negative = tau(m) < 0.0;
    bool cond2 = dl < 2.0 * l;
    const double disc = dl * (dl - 2.0 * l);
    if (!cond2 && disc >= 0.0) {
      const double root = std::sqrt(disc);
      cond2 = g < dl - l - root || g > dl - l + root;
    }
    out.condition2 = cond2;

    // p(z) = (z + l + g) [z^2 + (l + g - 2b) z + 2(lg - bg - lc)]
    const double lin = l + g - 2.0 * b;
    const double cst = 2.0 * (l * g - b * g - l * c);
    const cplx sq = std::sqrt(cplx(lin * lin - 4.0 * cst, 0.0));
    out.eigenvalues = {cplx(-l - g, 0.0), (-lin + sq) / 2.0, (-lin - sq) / 2.0};
  } else {
    out.g_prime_negative = g_eval(ss.d_bar, m).derivative < 0.0;
    out.eigenvalues = eigenvalues<3>(to_complex<3>(ode_jacobian_fd(ss.state(), m)));
  }
  out.max_real = max_real_part(out.eigenvalues);
  out.verdict = classify(out.max_real);
  return out;
}

HopfThresholds hopf_thresholds(const ModelParams& m) {
  HopfThresholds out;
  const auto* sig = std::get_if<SigmoidExpRate>(&m.lambda.shape());
  const bool gamma_const = m.gamma.kind() == RateKind::constant;
  if (sig == nullptr || !gamma_const || sig->center != 1.0) return out;

  const double lp = (sig->lam_hi + sig->lam_lo) / 2.0;
  const double lm = (sig->lam_hi - sig->lam_lo) / 2.0;
  const double alpha = sig->alpha;
  out.alpha_condition = lm > 0.0 && alpha > 4.0 * lp / lm;
  out.uniqueness_condition = sig->lam_hi < (2.0 + std::sqrt(3.0)) * sig->lam_lo;
  if (!out.alpha_condition) return out;

  const double al = alpha * lm;
  const double root = std::sqrt(al * (al - 4.0 * lp));
  out.gamma_hat = 2.0 * lp * lp / (al - 2.0 * lp);
  out.gamma_star = (al - 2.0 * lp - root) / 2.0;
  out.gamma_star2 = (al - 2.0 * lp + root) / 2.0;
  out.applicable = true;
  return out;
}

namespace {

void check_region(const OdeState& s, double t) {
  constexpr double tol = 1e-6;
  const bool ok = std::abs(s.d) <= 1.0 + tol && s.u1 >= -tol && s.v1 >= -tol &&
                  s.u1 <= 1.0 + s.d + tol && s.v1 <= 1.0 - s.d + tol;
  if (!ok) {
    throw NumericError("ODE state left the invariant region at t = " + std::to_string(t) +
                       " (reduce dt)");
  }
}

// Cubic Hermite interpolation on [0, 1] with endpoint values and scaled slopes.
double hermite(double y0, double y1, double m0, double m1, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * m1;
}

OdeState hermite_state(const OdeState& y0, const OdeState& y1, const OdeState& f0,
                       const OdeState& f1, double h, double s) {
  return {hermite(y0.d, y1.d, h * f0.d, h * f1.d, s), hermite(y0.u1, y1.u1, h * f0.u1, h * f1.u1, s),
          hermite(y0.v1, y1.v1, h * f0.v1, h * f1.v1, s)};
}

}  // namespace

Trajectory integrate_ode(const OdeState& s0, const ModelParams& m, double t_end, double dt,
                         const OdeOptions& opts) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ParameterError("dt and t_end must be positive");
  check_region(s0, 0.0);

  const auto f = [&m](const OdeState& y) { return ode_rhs(y, m); };
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const long tail_start = static_cast<long>(std::floor((1.0 - opts.tail_fraction) * steps));

  Trajectory out;
  std::vector<OdeState> tail_y;
  std::vector<OdeState> tail_f;
  OdeState y = s0;
  out.t.push_back(0.0);
  out.states.push_back(y);
  for (long n = 0; n < steps; ++n) {
    if (n >= tail_start) {
      tail_y.push_back(y);
      tail_f.push_back(f(y));
    }
    y = rk4_step(y, dt, f);
    const double t = (n + 1) * dt;
    check_region(y, t);
    if ((n + 1) % opts.sample_every == 0 || n + 1 == steps) {
      out.t.push_back(t);
      out.states.push_back(y);
    }
  }
  tail_y.push_back(y);
  tail_f.push_back(f(y));
  out.final_state = y;

  out.tail_min_d = std::numeric_limits<double>::infinity();
  out.tail_max_d = -std::numeric_limits<double>::infinity();
  for (const auto& s : tail_y) {
    out.tail_min_d = std::min(out.tail_min_d, s.d);
    out.tail_max_d = std::max(out.tail_max_d, s.d);
  }

  // Poincare section: upward crossings of the mid level of d.
  const double level = 0.5 * (out.tail_min_d + out.tail_max_d);
  std::vector<OdeState> returns;
  for (std::size_t i = 0; i + 1 < tail_y.size(); ++i) {
    const double a = tail_y[i].d - level;
    const double b = tail_y[i + 1].d - level;
    if (!(a < 0.0 && b >= 0.0)) continue;
    auto phase = [&](double s) {
      return hermite(tail_y[i].d, tail_y[i + 1].d, dt * tail_f[i].d, dt * tail_f[i + 1].d, s) -
             level;
    };
    const double s = bisect(phase, 0.0, 1.0, 1e-14);
    returns.push_back(hermite_state(tail_y[i], tail_y[i + 1], tail_f[i], tail_f[i + 1], dt, s));
  }
  out.return_distance = returns.size() >= 2
                            ? distance(returns[returns.size() - 1], returns[returns.size() - 2])
                            : std::numeric_limits<double>::infinity();
  out.limit_cycle =
      out.tail_amplitude() > opts.cycle_amplitude && out.return_distance < opts.cycle_return;
  return out;
}

std::vector<HopfSweepRow> hopf_sweep(const ModelParams& base, double from, double to, int steps,
                                     double t_end, double dt, double d0) {
  if (steps < 1) throw ParameterError("sweep needs at least one step");
  if (!(from > 0.0) || !(to >= from)) throw ParameterError("need 0 < gamma_from <= gamma_to");
  if (!(std::abs(d0) < 1.0)) throw ParameterError("start offset must satisfy |d0| < 1");
  std::vector<HopfSweepRow> rows;
  for (int i = 0; i <= steps; ++i) {
    ModelParams m = base;
    m.gamma = RateFunction::constant(from + (to - from) * i / steps);
    HopfSweepRow row;
    row.gamma = m.gamma.value(0.0);
    row.steady_states = find_steady_states(m);
    OdeState s0 = isotropic_state(m).state();
    s0.d += d0;
    const Trajectory tr = integrate_ode(s0, m, t_end, dt);
    row.limit_cycle = tr.limit_cycle;
    row.tail_min_d = tr.tail_min_d;
    row.tail_max_d = tr.tail_max_d;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ripple
