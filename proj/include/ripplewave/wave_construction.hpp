#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ripplewave/model.hpp"

namespace ripple {

// ---------------------------------------------------------------------------
// Branches of Lambda

/// Maximal interval on which Lambda is strictly increasing (admissible values).
struct Branch {
  double lo = 0.0;
  double hi = 0.0;
  double Lambda_lo = 0.0;
  double Lambda_hi = 0.0;
  bool open_end = false;  // hi is the end of the scan, not a fold

  [[nodiscard]] bool contains(double rho) const { return rho > lo && rho < hi; }
  [[nodiscard]] bool covers_Lambda(double L) const { return L > Lambda_lo && L < Lambda_hi; }
};

struct BranchMap {
  std::vector<Branch> branches;       // ordered by rho
  std::vector<double> local_maxima;   // folds where Lambda turns down
  std::vector<double> local_minima;   // folds where Lambda turns up
  double rho_scan = 5.0;

  /// Index of the branch containing rho, or -1.
  [[nodiscard]] int index_of(double rho) const;
};

/// Branches of Lambda over (0, rho_scan] from sign changes of lambda - rho lambda'
/// on a uniform grid, with fold points refined by bisection.
BranchMap admissible_branches(const ModelParams& m, double rho_scan = 5.0, int grid = 4096);

/// The rho on branch b with Lambda(rho) = L (bisection, tol 1e-13).
/// Throws DomainError if L is outside the branch's range.
double invert_on_branch(const Curves& c, const Branch& b, double L);

// ---------------------------------------------------------------------------
// Memory-free tuples

struct WaveTuple {
  double r = 0.0;  // common value of Lambda
  std::vector<double> values;
  std::vector<bool> linear_stable;
  double omega_residual = 0.0;  // max |Omega(w_i) - Omega(w_1)|
  bool omega_match = false;
  bool heteroclinic = false;
  bool selected = false;
  bool mass_compatible = false;  // w_1 < mean density < w_K
};

/// All pairs on distinct increasing branches with equal Lambda and equal
/// Omega inside [rho_min, rho_max], plus chained tuples sharing a value.
std::vector<WaveTuple> find_stable_tuples(const ModelParams& m, double rho_min = 0.05,
                                          double rho_max = 5.0);

/// Pair (w1, 2 rho_bar - w1) for a rate anti-symmetric about rho_bar. The root
/// of the Lambda equation nearest w1_guess is returned. Throws ParameterError
/// if the rate is not anti-symmetric and NoResultError if no root exists.
WaveTuple antisymmetric_pair(const ModelParams& m, double rho_bar, double w1_guess);

struct PhaseOrbit {
  std::vector<double> q;
  std::vector<double> q_prime;
  double w_start = 0.0;
  double w_target = 0.0;
  bool is_heteroclinic = false;
  double energy = 0.0;
  double energy_residual = 0.0;
  double closest_approach = 0.0;
  std::string termination;
};

/// Shoots along the unstable manifold of (w1, 0) of
/// Q'' = -(lambda(Q) w1 - lambda(w1) Q) and reports whether it reaches (w2, 0).
PhaseOrbit heteroclinic_check(const ModelParams& m, double w1, double w2);

// ---------------------------------------------------------------------------
// Full-system waves

/// Right-hand side of the profile equation for P with parameter r.
/// Throws NumericError at a fold (|lambda - P lambda'| < 1e-12).
double full_rhs_P(double P, double r, const ModelParams& m);

/// Lambda-matched admissible partner of P on another branch where B' has the
/// opposite sign. Throws NoResultError if P has no such partner.
double jump_partner(double P, double r, int current_branch, const ModelParams& m);
double jump_partner(double P, double r, int current_branch, const ModelParams& m,
                    const BranchMap& map);

struct WaveBounds {
  double P_lo = 0.0;
  double P_hi = 0.0;
  double B_lo = 0.0;
  double B_hi = 0.0;
};

/// A-priori bounds on any admissible wave. Throws NoResultError if Lambda is
/// monotone on the scan range.
WaveBounds wave_bounds(const ModelParams& m, double rho_scan = 5.0);

struct WaveSegment {
  int branch = 0;
  std::vector<double> xi;
  std::vector<double> P;
  std::vector<double> dP;  // P' at the nodes, for Hermite interpolation
};

struct JumpPoint {
  double xi = 0.0;
  double P_left = 0.0;
  double P_right = 0.0;
};

/// One period [0, period) of an admissible wave: P is smooth on each segment
/// and jumps between segments with Lambda continuous.
struct AdmissibleWave {
  explicit AdmissibleWave(ModelParams m) : model(std::move(m)) {}

  ModelParams model;
  double r = 0.0;
  double period = 0.0;
  double mass = 0.0;  // mean of P over one period
  std::vector<WaveSegment> segments;
  std::vector<JumpPoint> jumps;
  bool degenerate = false;  // piecewise-constant wave
  std::string method;

  /// P at xi (taken modulo the period), right-continuous at jumps.
  [[nodiscard]] double P_at(double xi) const;
  /// B = Lambda(P) / r.
  [[nodiscard]] double B_at(double xi) const;
  /// Cell averages of P over n equal cells of one period, starting at xi = shift.
  [[nodiscard]] std::vector<double> cell_averages(int n, double shift = 0.0) const;
};

struct SwitchPoints {
  double xi1;  // crest -> trough
  double xi2;  // trough -> crest, the period
};

/// Closed-form wave for a piecewise-linear step rate and constant aging.
/// Throws NoResultError if the step is too wide for instability or the
/// switch points give a profile leaving the admissible branches.
AdmissibleWave construct_wave_closed_form(const ModelParams& m, double target_mass,
                                          SwitchPoints sp, int samples_per_segment = 2001);

/// Wave with prescribed switch points for any rate, by shooting on the crest
/// start value and an outer solve for r.
AdmissibleWave construct_wave_shooting(const ModelParams& m, double target_mass, SwitchPoints sp,
                                       int samples_per_segment = 2001);

/// Wave from the existence procedure: r from the middle of the feasible
/// range, loop closed where B returns, r recalibrated for the mass.
AdmissibleWave construct_wave_auto(const ModelParams& m, double target_mass);

/// Dispatches to the closed form, shooting or automatic path.
AdmissibleWave construct_admissible_wave(const ModelParams& m, double target_mass,
                                         std::optional<SwitchPoints> sp = std::nullopt);

}  // namespace ripple
