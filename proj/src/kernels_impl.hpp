#pragma once

#include <cmath>
#include <limits>
#include <variant>

#include "kernels.hpp"

namespace ripple::kernels::detail {

template <class L, class G>
struct FullRhs {
  const L& lam;
  const G& gam;

  void operator()(const double* y, double* dy) const {
    const double lu = value_of(lam, y[0]);
    const double lv = value_of(lam, y[1]);
    const double gu = value_of(gam, y[0]);
    const double gv = value_of(gam, y[1]);
    const double flip = lu * y[3] - lv * y[2];
    dy[0] = flip;
    dy[1] = -flip;
    dy[2] = gv * (y[0] - y[2]) - lv * y[2];
    dy[3] = gu * (y[1] - y[3]) - lu * y[3];
  }
};

template <class L>
struct FreeRhs {
  const L& lam;

  void operator()(const double* y, double* dy) const {
    const double flip = value_of(lam, y[0]) * y[1] - value_of(lam, y[1]) * y[0];
    dy[0] = flip;
    dy[1] = -flip;
  }
};

template <int N, class Rhs>
inline void euler_cell(const Rhs& rhs, double* y, double h) {
  double k[N];
  rhs(y, k);
  for (int j = 0; j < N; ++j) y[j] += h * k[j];
}

template <int N, class Rhs>
inline void rk4_cell(const Rhs& rhs, double* y, double h) {
  double k1[N], k2[N], k3[N], k4[N], t[N];
  rhs(y, k1);
  for (int j = 0; j < N; ++j) t[j] = y[j] + 0.5 * h * k1[j];
  rhs(t, k2);
  for (int j = 0; j < N; ++j) t[j] = y[j] + 0.5 * h * k2[j];
  rhs(t, k3);
  for (int j = 0; j < N; ++j) t[j] = y[j] + h * k3[j];
  rhs(t, k4);
  for (int j = 0; j < N; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
}

template <int N, class Rhs>
inline void react_cell(const Rhs& rhs, double* y, double dt, int substeps, ReactionScheme scheme) {
  const double h = dt / substeps;
  for (int s = 0; s < substeps; ++s) {
    if (scheme == ReactionScheme::euler) {
      euler_cell<N>(rhs, y, h);
    } else {
      rk4_cell<N>(rhs, y, h);
    }
  }
}

template <class Loop>
void transport(Loop loop, const Fields& in, const Fields& out, double c) {
  const auto n = static_cast<std::ptrdiff_t>(in.n);
  const double keep = 1.0 - c;
  const bool full = in.u1 != nullptr;
  loop(n, [&](std::ptrdiff_t i) {
    const std::ptrdiff_t im = (i == 0) ? n - 1 : i - 1;
    const std::ptrdiff_t ip = (i == n - 1) ? 0 : i + 1;
    out.u[i] = keep * in.u[i] + c * in.u[im];
    out.v[i] = keep * in.v[i] + c * in.v[ip];
    if (full) {
      out.u1[i] = keep * in.u1[i] + c * in.u1[im];
      out.v1[i] = keep * in.v1[i] + c * in.v1[ip];
    }
  });
}

template <class Loop>
void react(Loop loop, const Fields& f, double dt, int substeps, ReactionScheme scheme,
           const ModelParams& m) {
  const auto n = static_cast<std::ptrdiff_t>(f.n);
  if (f.u1 == nullptr) {
    std::visit(
        [&](const auto& lam) {
          const FreeRhs<std::decay_t<decltype(lam)>> rhs{lam};
          loop(n, [&](std::ptrdiff_t i) {
            double y[2] = {f.u[i], f.v[i]};
            react_cell<2>(rhs, y, dt, substeps, scheme);
            f.u[i] = y[0];
            f.v[i] = y[1];
          });
        },
        m.lambda.shape());
    return;
  }
  std::visit(
      [&](const auto& lam, const auto& gam) {
        const FullRhs<std::decay_t<decltype(lam)>, std::decay_t<decltype(gam)>> rhs{lam, gam};
        loop(n, [&](std::ptrdiff_t i) {
          double y[4] = {f.u[i], f.v[i], f.u1[i], f.v1[i]};
          react_cell<4>(rhs, y, dt, substeps, scheme);
          f.u[i] = y[0];
          f.v[i] = y[1];
          f.u1[i] = y[2];
          f.v1[i] = y[3];
        });
      },
      m.lambda.shape(), m.gamma.shape());
}

template <class Loop>
void diffuse(Loop loop, const Fields& in, const Fields& out, double D) {
  const auto n = static_cast<std::ptrdiff_t>(in.n);
  const bool full = in.u1 != nullptr;
  loop(n, [&](std::ptrdiff_t i) {
    const std::ptrdiff_t im = (i == 0) ? n - 1 : i - 1;
    const std::ptrdiff_t ip = (i == n - 1) ? 0 : i + 1;
    auto lap = [&](const double* a) { return a[i] + D * (a[im] - 2.0 * a[i] + a[ip]); };
    out.u[i] = lap(in.u);
    out.v[i] = lap(in.v);
    if (full) {
      out.u1[i] = lap(in.u1);
      out.v1[i] = lap(in.v1);
    }
  });
}

// Smaller of two minima; NaN first, then value, then index.
inline CellMin combine(const CellMin& a, const CellMin& b) {
  if (std::isnan(a.value)) return a;
  if (std::isnan(b.value)) return b;
  if (a.value < b.value) return a;
  if (b.value < a.value) return b;
  return a.index <= b.index ? a : b;
}

inline CellMin sanitize_range(const Fields& f, double dust, std::ptrdiff_t begin,
                              std::ptrdiff_t end) {
  CellMin best{std::numeric_limits<double>::infinity(), -1};
  double* arrays[4] = {f.u, f.v, f.u1, f.v1};
  for (double* a : arrays) {
    if (a == nullptr) continue;
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      const double x = a[i];
      best = combine(best, CellMin{x, i});
      if (x < 0.0 && x >= -dust) a[i] = 0.0;
    }
  }
  return best;
}

}  // namespace ripple::kernels::detail
