#include "ripplewave/linear_stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ripple {
namespace {

constexpr double kBand = 1e-8;

double max_real_part(const std::array<cplx, 4>& z) {
  return std::max({z[0].real(), z[1].real(), z[2].real(), z[3].real()});
}

}  // namespace

bool RhCoefficients::pass(double band) const {
  return a0 > band && a1 > band && a2 > band && a3 > band && p > band && q > band;
}

bool RhCoefficients::fail(double band) const {
  return a0 < -band || a1 < -band || a2 < -band || a3 < -band || p < -band || q < -band;
}

RhCoefficients rh_coefficients(const ModelParams& m, double k) {
  const auto [l, g, b, c] = isotropic_coefficients(m);
  const double k2 = k * k;
  const double e = g * l - b * g - c * l;
  const double gl = g + l;

  RhCoefficients r;
  r.k = k;
  r.a0 = k2 * (k2 + g * g + l * l + 2.0 * l * (b - c));
  r.a1 = 2.0 * (k2 * (gl - b) + gl * e);
  r.a2 = 2.0 * k2 + gl * (gl - 2.0 * b) + 2.0 * e;
  r.a3 = 2.0 * (gl - b);
  r.p0 = 2.0 * (gl - 2.0 * b) * (gl * (gl - b) + e);
  r.p1 = 2.0 * (gl - b);
  r.q0 = 4.0 * gl * e * (gl - 2.0 * b) * (gl * (gl - b) + e);
  r.q1 = 16.0 * (gl - b) * (gl - b) * (g * l - b * gl);
  r.p = r.p1 * k2 + r.p0;
  r.q = r.q1 * k2 + r.q0;
  return r;
}

RMatrix<4> reaction_matrix(const ModelParams& m, const SteadyState& ss) {
  const double u = ss.u();
  const double v = ss.v();
  const auto [lu, dlu] = m.lambda.eval(u);
  const auto [lv, dlv] = m.lambda.eval(v);
  const auto [gu, dgu] = m.gamma.eval(u);
  const auto [gv, dgv] = m.gamma.eval(v);
  const double u1 = ss.u1;
  const double v1 = ss.v1;
  // rows: d/dt of u, v, u1, v1; columns: partials in u, v, u1, v1
  return {{
      {dlu * v1, -dlv * u1, -lv, lu},
      {-dlu * v1, dlv * u1, lv, -lu},
      {gv, dgv * (u - u1) - dlv * u1, -gv - lv, 0.0},
      {dgu * (v - v1) - dlu * v1, gu, 0.0, -gu - lu},
  }};
}

CMatrix<4> symbol_matrix(const ModelParams& m, const SteadyState& ss, double k) {
  CMatrix<4> a = to_complex<4>(reaction_matrix(m, ss));
  constexpr std::array<double, 4> t{1.0, -1.0, 1.0, -1.0};
  for (int i = 0; i < 4; ++i) a[i][i] -= cplx(0.0, k * t[i]);
  return a;
}

DispersionPoint spectrum_at_k(const ModelParams& m, const SteadyState& ss, double k) {
  DispersionPoint out;
  out.k = k;
  out.eigenvalues = eigenvalues<4>(symbol_matrix(m, ss, k));
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const cplx& a, const cplx& b) { return a.real() > b.real(); });
  out.max_real = max_real_part(out.eigenvalues);
  if (ss.kind == SteadyKind::isotropic) out.rh_pass = rh_coefficients(m, k).pass();
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

StabilityReport isotropic_transport_stability(const ModelParams& m, int n_max) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
  const auto [l, dl] = m.lambda.eval(1.0);
  const auto [g, dg] = m.gamma.eval(1.0);

  StabilityReport rep;
  rep.isotropic_conditions.lambda_prime_ok = dl > -kBand && dl < l - kBand;
  rep.isotropic_conditions.gamma_prime_ok = dg < g - kBand;
  rep.isotropic_conditions.super_linear = dl > l + kBand;
  const bool sufficient =
      rep.isotropic_conditions.lambda_prime_ok && rep.isotropic_conditions.gamma_prime_ok;

  const SteadyState iso = steady_state_at(0.0, m);
  bool any_fail = false;
  rep.most_unstable_growth = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double k = 2.0 * std::numbers::pi * n;
    rep.rh.push_back(rh_coefficients(m, k));
    rep.dispersion.push_back(spectrum_at_k(m, iso, k));
    any_fail = any_fail || rep.rh.back().fail(kBand);
    if (sufficient && !rep.rh.back().pass()) rep.rh_consistent = false;
    if (rep.dispersion.back().max_real > rep.most_unstable_growth) {
      rep.most_unstable_growth = rep.dispersion.back().max_real;
      rep.most_unstable_n = n;
    }
  }

  // Continuous refinement of the dominant wavenumber (sampled n +- 1).
  const double k_best = 2.0 * std::numbers::pi * rep.most_unstable_n;
  const double h = 2.0 * std::numbers::pi;
  auto growth = [&](double k) { return spectrum_at_k(m, iso, k).max_real; };
  const double k_ref = golden_section_max(growth, std::max(k_best - h, 1e-6), k_best + h, 1e-8);
  const double g_ref = growth(k_ref);
  if (g_ref > rep.most_unstable_growth) {
    rep.most_unstable_k = k_ref;
    rep.most_unstable_growth = g_ref;
  } else {
    rep.most_unstable_k = k_best;
  }

  if (rep.isotropic_conditions.super_linear || any_fail) {
    rep.verdict = Verdict::unstable;
  } else if (sufficient) {
    rep.verdict = Verdict::stable;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

AnisotropicConditions anisotropic_necessary_conditions(const SteadyState& ss, const ModelParams& m) {
  if (ss.kind == SteadyKind::isotropic || ss.d_bar == 0.0) {
    throw UsageError("anisotropic conditions do not apply to the isotropic state");
  }
  const double u = ss.u();
  const double v = ss.v();
  const auto q = [&m](double rho) {
    const double l = m.lambda.value(rho);
    const double g = m.gamma.value(rho);
    return g * l / (g + l);
  };
  AnisotropicConditions c;
  c.lambda_u_ok = m.lambda.derivative(u) * ss.v1 < q(v);
  c.lambda_v_ok = m.lambda.derivative(v) * ss.u1 < q(u);
  c.g_prime_ok = g_eval(ss.d_bar, m).derivative < 0.0;
  return c;
}

WaveFormationRange wave_formation_range(double lam_m, double lam_M, double rho_bar) {
  if (!(lam_m > 0.0) || !(lam_M > lam_m) || !(rho_bar > 0.0)) {
    throw ParameterError("wave_formation_range needs 0 < lam_m < lam_M and rho_bar > 0");
  }
  WaveFormationRange r;
  r.feasible = lam_M - 3.0 * lam_m > 0.0;
  r.m0_lo = rho_bar * 2.0 * lam_m / (lam_M - lam_m);
  r.m0_hi = rho_bar * 2.0 * (lam_M - 2.0 * lam_m) / (lam_M - lam_m);
  return r;
}

}  // namespace ripple
