#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ripplewave/errors.hpp"

namespace ripple {

using cplx = std::complex<double>;

template <std::size_t N>
using CMatrix = std::array<std::array<cplx, N>, N>;

template <std::size_t N>
using RMatrix = std::array<std::array<double, N>, N>;

/// Root of f on [lo, hi] by bisection. f(lo) and f(hi) must differ in sign
/// (a zero at either end is returned directly).
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericError("bisect: no sign change on bracket");
  }
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Sub-intervals of a uniform n-interval grid on [lo, hi] over which f changes
/// sign (or hits zero at the right node).
template <class F>
std::vector<std::pair<double, double>> sign_change_brackets(F&& f, double lo, double hi, int n) {
  std::vector<std::pair<double, double>> out;
  const double h = (hi - lo) / n;
  double x0 = lo;
  double f0 = f(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = (i == n) ? hi : lo + i * h;
    const double f1 = f(x1);
    if ((f0 < 0.0 && f1 >= 0.0) || (f0 > 0.0 && f1 <= 0.0)) out.emplace_back(x0, x1);
    x0 = x1;
    f0 = f1;
  }
  return out;
}

/// Maximizer of a unimodal f on [lo, hi].
template <class F>
double golden_section_max(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && b - a > tol; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Evaluates sum c[i] x^i.
cplx polyval(std::span<const cplx> coeffs, cplx x);

struct PolyRoots {
  std::vector<cplx> roots;
  int iterations = 0;
  double max_residual = 0.0;
};

/// All roots of the monic polynomial x^n + c[n-1] x^{n-1} + ... + c[0],
/// given as coefficients c[0..n-1] in increasing degree, by simultaneous
/// Durand-Kerner (Weierstrass) iteration. Throws NumericError with the
/// residual if the iteration fails to settle within max_iter sweeps.
PolyRoots durand_kerner(std::span<const cplx> lower_coeffs, double tol = 1e-12, int max_iter = 200);

/// Characteristic polynomial det(x I - A) of an N x N matrix by the
/// Faddeev-LeVerrier recursion. Returns c[0..N] in increasing degree with
/// c[N] = 1.
template <std::size_t N>
std::array<cplx, N + 1> characteristic_polynomial(const CMatrix<N>& a) {
  std::array<cplx, N + 1> c{};
  c[N] = 1.0;
  CMatrix<N> m{};  // M_0 = 0
  for (std::size_t k = 1; k <= N; ++k) {
    // M_k = A M_{k-1} + c_{N-k+1} I
    CMatrix<N> next{};
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        cplx s = 0.0;
        for (std::size_t l = 0; l < N; ++l) s += a[i][l] * m[l][j];
        next[i][j] = s;
      }
      next[i][i] += c[N - k + 1];
    }
    m = next;
    cplx trace = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t l = 0; l < N; ++l) trace += a[i][l] * m[l][i];
    }
    c[N - k] = -trace / static_cast<double>(k);
  }
  return c;
}

template <std::size_t N>
CMatrix<N> to_complex(const RMatrix<N>& a) {
  CMatrix<N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) out[i][j] = a[i][j];
  }
  return out;
}

/// Eigenvalues of a small dense matrix via its characteristic polynomial.
template <std::size_t N>
std::array<cplx, N> eigenvalues(const CMatrix<N>& a) {
  const auto c = characteristic_polynomial<N>(a);
  const auto found = durand_kerner(std::span<const cplx>(c.data(), N));
  std::array<cplx, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = found.roots[i];
  return out;
}

/// One classical fourth-order Runge-Kutta step for y' = f(y).
template <class State, class F>
State rk4_step(const State& y, double h, F&& f) {
  const State k1 = f(y);
  const State k2 = f(y + (0.5 * h) * k1);
  const State k3 = f(y + (0.5 * h) * k2);
  const State k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace ripple
