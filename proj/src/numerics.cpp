#include "ripplewave/numerics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace ripple {

cplx polyval(std::span<const cplx> coeffs, cplx x) {
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

// p(x) = x^n + sum c_i x^i and the matching rounding-error scale
// sum |c_i| |x|^i + |x|^n.
std::pair<cplx, double> monic_eval(std::span<const cplx> c, cplx x) {
  cplx acc = 1.0;
  double scale = 1.0;
  const double ax = std::abs(x);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = acc * x + *it;
    scale = scale * ax + std::abs(*it);
  }
  return {acc, scale};
}

}  // namespace

PolyRoots durand_kerner(std::span<const cplx> c, double tol, int max_iter) {
  const std::size_t n = c.size();
  PolyRoots out;
  if (n == 0) return out;
  if (n == 1) {
    out.roots = {-c[0]};
    return out;
  }

  // Fujiwara bound on root moduli sets the starting circle.
  double radius = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double a = std::abs(c[n - k]);
    if (k == n) a /= 2.0;
    radius = std::max(radius, std::pow(a, 1.0 / static_cast<double>(k)));
  }
  radius = 2.0 * std::max(radius, 1e-3);

  std::vector<cplx>& z = out.roots;
  z.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / n + 0.4;
    z[k] = std::polar(radius, angle);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  bool converged = false;
  int it = 0;
  for (; it < max_iter && !converged; ++it) {
    double max_step = 0.0;
    bool small_residual = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [p, scale] = monic_eval(c, z[i]);
      if (std::abs(p) > 64.0 * eps * scale) small_residual = false;
      cplx denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      if (denom == cplx(0.0)) denom = cplx(eps, eps);
      const cplx delta = p / denom;
      z[i] -= delta;
      max_step = std::max(max_step, std::abs(delta) / std::max(1.0, std::abs(z[i])));
    }
    converged = max_step <= tol || small_residual;
  }
  out.iterations = it;
  for (const auto& zi : z) {
    const auto [p, scale] = monic_eval(c, zi);
    out.max_residual = std::max(out.max_residual, std::abs(p) / scale);
  }
  if (!converged && out.max_residual > 1e-10) {
    throw NumericError("Durand-Kerner did not converge after " + std::to_string(it) +
                       " sweeps; max relative residual " + std::to_string(out.max_residual));
  }
  return out;
}

}  // namespace ripple
