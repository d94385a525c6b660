#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ripplewave/model.hpp"
#include "ripplewave/numerics.hpp"

namespace ripple {

/// Space-independent state: d = (u - v)/2 and the reversible densities.
struct OdeState {
  double d = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;

  friend OdeState operator+(const OdeState& a, const OdeState& b) {
    return {a.d + b.d, a.u1 + b.u1, a.v1 + b.v1};
  }
  friend OdeState operator-(const OdeState& a, const OdeState& b) {
    return {a.d - b.d, a.u1 - b.u1, a.v1 - b.v1};
  }
  friend OdeState operator*(double s, const OdeState& a) { return {s * a.d, s * a.u1, s * a.v1}; }
};

double distance(const OdeState& a, const OdeState& b);

/// Time derivatives of (d, u1, v1) with total mass fixed at u + v = 2.
OdeState ode_rhs(const OdeState& s, const ModelParams& m);

struct GValue {
  double value;
  double derivative;
};

/// G(d) = (1 - d) Q+(d) - (1 + d) Q-(d), Q±(d) = lambda gamma / (lambda + gamma)
/// at 1 ± d. Steady states correspond to roots of G. Requires |d| < 1.
GValue g_eval(double d, const ModelParams& m);

/// Linearization constants at the isotropic state:
/// l = lambda(1), g = gamma(1), b = lambda'(1) g/(g+l), c = gamma'(1) l/(g+l).
struct IsotropicCoefficients {
  double l;
  double g;
  double b;
  double c;
};
IsotropicCoefficients isotropic_coefficients(const ModelParams& m);

/// Sign quantity whose positivity guarantees a pair of anisotropic states.
double tau(const ModelParams& m);

enum class Stability { stable, unstable, marginal };
enum class SteadyKind { isotropic, anisotropic };

const char* to_string(Stability s);
const char* to_string(SteadyKind k);

struct SteadyState {
  double d_bar = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;
  SteadyKind kind = SteadyKind::isotropic;
  Stability stability = Stability::marginal;

  [[nodiscard]] double u() const { return 1.0 + d_bar; }
  [[nodiscard]] double v() const { return 1.0 - d_bar; }
  [[nodiscard]] OdeState state() const { return {d_bar, u1, v1}; }
};

/// Steady state parameterized by a root d of G (u1, v1 filled in from d).
SteadyState steady_state_at(double d, const ModelParams& m);
SteadyState isotropic_state(const ModelParams& m);

/// Isotropic state plus every mirrored pair of anisotropic roots of G found
/// by a 2048-interval scan of (-1, 1) and bisection, sorted by d. Stability
/// of each state is filled in.
std::vector<SteadyState> find_steady_states(const ModelParams& m);

struct StabilityVerdict {
  Stability verdict = Stability::marginal;
  std::array<cplx, 3> eigenvalues{};
  double max_real = 0.0;
  // Isotropic state only: the two conditions of the closed-form criterion.
  std::optional<bool> tau_negative;
  std::optional<bool> condition2;
  // Anisotropic state only: necessary condition G'(d) < 0.
  std::optional<bool> g_prime_negative;
};

/// Local stability of a steady state of the space-independent system.
/// Throws NumericError if ss is not a root of G.
StabilityVerdict ode_stability(const SteadyState& ss, const ModelParams& m);

/// Central-difference Jacobian of ode_rhs at s.
RMatrix<3> ode_jacobian_fd(const OdeState& s, const ModelParams& m, double h = 1e-6);

/// Bifurcation thresholds in gamma for a logistic lambda centered at 1 and
/// constant gamma: the isotropic state is stable iff gamma < gamma_hat and
/// gamma outside [gamma_star, gamma_star2].
struct HopfThresholds {
  bool applicable = false;
  bool alpha_condition = false;       // alpha > 4 lam_plus / lam_minus
  bool uniqueness_condition = false;  // lam_hi < (2 + sqrt 3) lam_lo
  double gamma_star = 0.0;
  double gamma_hat = 0.0;
  double gamma_star2 = 0.0;
};
HopfThresholds hopf_thresholds(const ModelParams& m);

struct OdeOptions {
  int sample_every = 10;
  double tail_fraction = 0.2;
  double cycle_amplitude = 1e-4;
  double cycle_return = 1e-6;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<OdeState> states;
  OdeState final_state;
  double tail_min_d = 0.0;
  double tail_max_d = 0.0;
  double return_distance = 0.0;  // between the last two Poincare returns
  bool limit_cycle = false;

  [[nodiscard]] double tail_amplitude() const { return tail_max_d - tail_min_d; }
};

/// Fixed-step RK4 integration with a limit-cycle detector over the tail
/// t >= (1 - tail_fraction) t_end. Throws NumericError if the state leaves
/// the invariant region by more than 1e-6.
Trajectory integrate_ode(const OdeState& s0, const ModelParams& m, double t_end, double dt,
                         const OdeOptions& opts = {});

struct HopfSweepRow {
  double gamma = 0.0;
  std::vector<SteadyState> steady_states;
  bool limit_cycle = false;
  double tail_min_d = 0.0;
  double tail_max_d = 0.0;
};

/// For each constant gamma in [from, to] (steps + 1 values): the steady
/// states and the long-time range of d from a start d0 away from the
/// isotropic state. The rate lambda is taken from base.
std::vector<HopfSweepRow> hopf_sweep(const ModelParams& base, double from, double to, int steps,
                                     double t_end = 300.0, double dt = 1e-2, double d0 = 0.05);

}  // namespace ripple
