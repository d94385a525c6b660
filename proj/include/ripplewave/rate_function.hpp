#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ripple {

// Shape parameters for each rate-function kind. All kinds are bounded below
// by a positive constant on [0, inf); RateFunction validates this.

struct ConstantRate {
  double c;
};

/// a + b*rho
struct LinearRate {
  double a;
  double b;
};

/// a + b*rho + c*rho^2
struct QuadraticRate {
  double a;
  double b = 0.0;
  double c = 0.0;
};

/// lam_lo + (lam_hi - lam_lo) / (1 + exp(-alpha (rho - center)))
struct SigmoidExpRate {
  double lam_lo;
  double lam_hi;
  double alpha;
  double center = 1.0;
};

/// lam_lo + (lam_hi - lam_lo) alpha rho^2 / (1 + alpha rho^2)
struct SigmoidRationalRate {
  double lam_lo;
  double lam_hi;
  double alpha;
};

/// Linear ramp from lam_lo to lam_hi on [center - eps, center + eps).
struct PiecewiseLinearStepRate {
  double lam_lo;
  double lam_hi;
  double eps;
  double center = 1.0;
};

/// Two smooth quadratic steps lam_lo -> lam_mid around rho_lo and
/// lam_mid -> lam_hi around rho_hi, each of half-width delta.
struct DoubleSigmoidRate {
  double lam_lo;
  double lam_mid;
  double lam_hi;
  double rho_lo;
  double rho_hi;
  double delta;
};

/// One linear ramp of a TripleStepRate: rises by `rise` across
/// [center - half_width, center + half_width).
struct Ramp {
  double center;
  double half_width;
  double rise;
};

/// lam_lo plus the sum of three linear ramps.
struct TripleStepRate {
  double lam_lo;
  std::array<Ramp, 3> ramps;
};

// Inline point evaluation per shape; the simulation kernels dispatch once
// per sweep and call these directly.

namespace rate_detail {
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double ramp(double center, double half_width, double rise, double rho) {
  const double a = center - half_width;
  if (rho < a) return 0.0;
  if (rho < center + half_width) return rise * (rho - a) / (2.0 * half_width);
  return rise;
}
}  // namespace rate_detail

inline double value_of(const ConstantRate& s, double) { return s.c; }
inline double value_of(const LinearRate& s, double rho) { return s.a + s.b * rho; }
inline double value_of(const QuadraticRate& s, double rho) { return s.a + rho * (s.b + s.c * rho); }
inline double value_of(const SigmoidExpRate& s, double rho) {
  return s.lam_lo + (s.lam_hi - s.lam_lo) * rate_detail::logistic(s.alpha * (rho - s.center));
}
inline double value_of(const SigmoidRationalRate& s, double rho) {
  const double q = s.alpha * rho * rho;
  return s.lam_lo + (s.lam_hi - s.lam_lo) * q / (1.0 + q);
}
inline double value_of(const PiecewiseLinearStepRate& s, double rho) {
  return s.lam_lo + rate_detail::ramp(s.center, s.eps, s.lam_hi - s.lam_lo, rho);
}
inline double value_of(const DoubleSigmoidRate& s, double rho) {
  const double k_lo = (s.lam_mid - s.lam_lo) / (2.0 * s.delta * s.delta);
  const double k_hi = (s.lam_hi - s.lam_mid) / (2.0 * s.delta * s.delta);
  if (rho < s.rho_lo - s.delta) return s.lam_lo;
  if (rho < s.rho_lo) {
    const double x = rho - s.rho_lo + s.delta;
    return s.lam_lo + k_lo * x * x;
  }
  if (rho < s.rho_lo + s.delta) {
    const double x = rho - s.rho_lo - s.delta;
    return s.lam_mid - k_lo * x * x;
  }
  if (rho < s.rho_hi - s.delta) return s.lam_mid;
  if (rho < s.rho_hi) {
    const double x = rho - s.rho_hi + s.delta;
    return s.lam_mid + k_hi * x * x;
  }
  if (rho < s.rho_hi + s.delta) {
    const double x = rho - s.rho_hi - s.delta;
    return s.lam_hi - k_hi * x * x;
  }
  return s.lam_hi;
}
inline double value_of(const TripleStepRate& s, double rho) {
  double v = s.lam_lo;
  for (const auto& r : s.ramps) v += rate_detail::ramp(r.center, r.half_width, r.rise, rho);
  return v;
}

using RateShape =
    std::variant<ConstantRate, LinearRate, QuadraticRate, SigmoidExpRate, SigmoidRationalRate,
                 PiecewiseLinearStepRate, DoubleSigmoidRate, TripleStepRate>;

enum class RateKind {
  constant,
  linear,
  quadratic,
  sigmoid_exp,
  sigmoid_rational,
  piecewise_linear_step,
  double_sigmoid,
  triple_step,
};

std::string_view to_string(RateKind kind);
RateKind rate_kind_from_string(std::string_view name);

struct RateValue {
  double value;
  double derivative;
};

/// Immutable density-dependent rate rho -> f(rho) with exact derivative and
/// antiderivative. At kinks of piecewise kinds the derivative is the right
/// derivative.
class RateFunction {
 public:
  /// Throws ParameterError if the shape violates its constraints.
  explicit RateFunction(RateShape shape);

  static RateFunction constant(double c) { return RateFunction(ConstantRate{c}); }
  static RateFunction linear(double a, double b) { return RateFunction(LinearRate{a, b}); }
  static RateFunction quadratic(double a, double b, double c) {
    return RateFunction(QuadraticRate{a, b, c});
  }
  static RateFunction sigmoid_exp(double lam_lo, double lam_hi, double alpha, double center = 1.0) {
    return RateFunction(SigmoidExpRate{lam_lo, lam_hi, alpha, center});
  }
  static RateFunction sigmoid_rational(double lam_lo, double lam_hi, double alpha) {
    return RateFunction(SigmoidRationalRate{lam_lo, lam_hi, alpha});
  }
  static RateFunction piecewise_linear_step(double lam_lo, double lam_hi, double eps,
                                            double center = 1.0) {
    return RateFunction(PiecewiseLinearStepRate{lam_lo, lam_hi, eps, center});
  }
  static RateFunction double_sigmoid(double lam_lo, double lam_mid, double lam_hi, double rho_lo,
                                     double rho_hi, double delta) {
    return RateFunction(DoubleSigmoidRate{lam_lo, lam_mid, lam_hi, rho_lo, rho_hi, delta});
  }

  [[nodiscard]] RateKind kind() const;
  [[nodiscard]] const RateShape& shape() const { return shape_; }

  [[nodiscard]] double value(double rho) const;
  [[nodiscard]] double derivative(double rho) const;
  [[nodiscard]] RateValue eval(double rho) const;

  /// Closed-form integral of the rate over [0, rho].
  [[nodiscard]] double integral(double rho) const;

  /// Positive lower bound of the rate on [0, inf).
  [[nodiscard]] double lower_bound() const;
  /// Supremum of the rate on [0, inf).
  [[nodiscard]] double upper_bound() const;

  /// Points where the derivative is discontinuous (empty for smooth kinds).
  [[nodiscard]] std::vector<double> kinks() const;

  /// The rate w -> time_scale * f(density_scale * w), expressed as the same
  /// kind. Used to nondimensionalize raw model parameters.
  [[nodiscard]] RateFunction rescaled(double time_scale, double density_scale) const;

 private:
  RateShape shape_;
  double lower_bound_;
};

}  // namespace ripple
