#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ripplewave/model.hpp"
#include "ripplewave/numerics.hpp"
#include "ripplewave/ode_dynamics.hpp"

namespace ripple {

/// Coefficients of the quartic x^4 + a3 x^3 + a2 x^2 + a1 x + a0 whose roots
/// are the growth rates of a Fourier mode with wavenumber k about the
/// isotropic state, and the two Routh-Hurwitz combinations
/// p = a3 a2 - a1 = p1 k^2 + p0, q = a3 a2 a1 - a1^2 - a3^2 a0 = q1 k^2 + q0.
struct RhCoefficients {
  double k = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double p = 0.0;
  double q = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double q0 = 0.0;
  double q1 = 0.0;

  /// All of a_i, p, q strictly positive beyond the band.
  [[nodiscard]] bool pass(double band = 0.0) const;
  /// Some a_i, p or q below -band.
  [[nodiscard]] bool fail(double band = 0.0) const;
};

RhCoefficients rh_coefficients(const ModelParams& m, double k);

/// Reaction Jacobian of the four-density system at a space-homogeneous
/// steady state, in the variable order (u, v, u1, v1).
RMatrix<4> reaction_matrix(const ModelParams& m, const SteadyState& ss);

/// Symbol A = M - i k T of the linearized transport-reaction operator,
/// T = diag(1, -1, 1, -1).
CMatrix<4> symbol_matrix(const ModelParams& m, const SteadyState& ss, double k);

struct DispersionPoint {
  double k = 0.0;
  std::array<cplx, 4> eigenvalues{};
  double max_real = 0.0;
  std::optional<bool> rh_pass;  // isotropic states only
};

/// Growth rates at wavenumber k: roots of the characteristic polynomial of
/// the symbol, found by Durand-Kerner.
DispersionPoint spectrum_at_k(const ModelParams& m, const SteadyState& ss, double k);

struct IsotropicConditions {
  bool lambda_prime_ok = false;  // 0 <= lambda'(1) < lambda(1)
  bool gamma_prime_ok = false;   // gamma'(1) < gamma(1)
  bool super_linear = false;     // lambda'(1) > lambda(1)
};

enum class Verdict { stable, unstable, inconclusive };
const char* to_string(Verdict v);

struct StabilityReport {
  IsotropicConditions isotropic_conditions;
  std::vector<RhCoefficients> rh;            // k = 2 pi n, n = 1..n_max
  std::vector<DispersionPoint> dispersion;   // same wavenumbers
  Verdict verdict = Verdict::inconclusive;
  bool rh_consistent = true;  // sufficient condition held => every sampled RH check passed
  int most_unstable_n = 0;
  double most_unstable_k = 0.0;  // continuous refinement around the best sampled n
  double most_unstable_growth = 0.0;
};

/// Stability of the isotropic state under transport, for perturbations of
/// zero total mass (n >= 1).
StabilityReport isotropic_transport_stability(const ModelParams& m, int n_max = 64);

struct AnisotropicConditions {
  bool lambda_u_ok = false;  // lambda'(u) v1 < gamma(v) lambda(v) / (gamma(v) + lambda(v))
  bool lambda_v_ok = false;  // lambda'(v) u1 < gamma(u) lambda(u) / (gamma(u) + lambda(u))
  bool g_prime_ok = false;   // G'(d) < 0
  [[nodiscard]] bool all() const { return lambda_u_ok && lambda_v_ok && g_prime_ok; }
};

/// Necessary conditions for linear stability of an anisotropic state.
/// Throws UsageError for the isotropic state.
AnisotropicConditions anisotropic_necessary_conditions(const SteadyState& ss, const ModelParams& m);

struct WaveFormationRange {
  bool feasible = false;
  double m0_lo = 0.0;
  double m0_hi = 0.0;
};

/// Range of mean densities m0 destabilizing the isotropic state for a
/// piecewise-quadratic sigmoid with minimum lam_m, maximum lam_M and
/// inflection density rho_bar, under constant aging.
WaveFormationRange wave_formation_range(double lam_m, double lam_M, double rho_bar);

}  // namespace ripple
