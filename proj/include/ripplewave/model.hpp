#pragma once

#include "ripplewave/rate_function.hpp"

namespace ripple {

/// Dimensionless model: reversal rate lambda, aging rate gamma, and the
/// normalization constants (mass 2 on the unit periodic domain, unit speed).
struct ModelParams {
  RateFunction lambda;
  RateFunction gamma;
  double total_mass = 2.0;
  double domain_length = 1.0;
  double speed = 1.0;
};

/// Dimensional parameters: speed s, domain length L, mean density per family
/// m0, and the raw turning rate l(rho) and aging rate g(rho).
struct RawModel {
  RateFunction turning;
  RateFunction aging;
  double speed;
  double length;
  double mean_density;
};

/// Rescales with reference time L/s, space L and density m0, giving
/// lambda(w) = (L/s) l(m0 w), gamma(w) = (L/s) g(m0 w).
ModelParams nondimensionalize(const RawModel& raw);

/// Throws ParameterError unless total_mass, domain_length and speed are positive.
void validate(const ModelParams& m);

/// The curves Lambda, Gamma and Omega built from a (lambda, gamma) pair.
class Curves {
 public:
  explicit Curves(ModelParams m) : m_(std::move(m)) {}

  [[nodiscard]] const ModelParams& model() const { return m_; }

  /// rho / lambda(rho); requires rho > 0.
  [[nodiscard]] double Lambda(double rho) const;
  /// (lambda - rho lambda') / lambda^2; requires rho > 0.
  [[nodiscard]] double Lambda_prime(double rho) const;
  /// lambda(rho) - rho lambda'(rho). Positive exactly where rho is admissible.
  [[nodiscard]] double admissibility(double rho) const;
  [[nodiscard]] bool admissible(double rho) const { return admissibility(rho) > 0.0; }

  /// gamma / (gamma + lambda), always in (0, 1).
  [[nodiscard]] double Gamma(double rho) const;

  /// int_0^rho lambda(u) du - lambda(rho) rho / 2.
  [[nodiscard]] double Omega(double rho) const;

 private:
  ModelParams m_;
};

}  // namespace ripple
