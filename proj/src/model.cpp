#include "ripplewave/model.hpp"

#include <cmath>
#include <string>

#include "ripplewave/errors.hpp"

namespace ripple {

ModelParams nondimensionalize(const RawModel& raw) {
  if (!(raw.speed > 0.0) || !(raw.length > 0.0) || !(raw.mean_density > 0.0)) {
    throw ParameterError("speed, length and mean density must be positive");
  }
  const double time_scale = raw.length / raw.speed;
  return ModelParams{raw.turning.rescaled(time_scale, raw.mean_density),
                     raw.aging.rescaled(time_scale, raw.mean_density)};
}

void validate(const ModelParams& m) {
  if (!(m.total_mass > 0.0)) throw ParameterError("total_mass must be positive");
  if (!(m.domain_length > 0.0)) throw ParameterError("domain_length must be positive");
  if (!(m.speed > 0.0)) throw ParameterError("speed must be positive");
}

double Curves::Lambda(double rho) const {
  if (!(rho > 0.0)) throw DomainError("Lambda requires rho > 0, got " + std::to_string(rho));
  return rho / m_.lambda.value(rho);
}

double Curves::Lambda_prime(double rho) const {
  if (!(rho > 0.0)) throw DomainError("Lambda' requires rho > 0, got " + std::to_string(rho));
  const auto [l, dl] = m_.lambda.eval(rho);
  return (l - rho * dl) / (l * l);
}

double Curves::admissibility(double rho) const {
  const auto [l, dl] = m_.lambda.eval(rho);
  return l - rho * dl;
}

double Curves::Gamma(double rho) const {
  const double g = m_.gamma.value(rho);
  return g / (g + m_.lambda.value(rho));
}

double Curves::Omega(double rho) const {
  return m_.lambda.integral(rho) - 0.5 * m_.lambda.value(rho) * rho;
}

}  // namespace ripple
