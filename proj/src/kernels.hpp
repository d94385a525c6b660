#pragma once

// Per-cell kernels shared by the serial and OpenMP translation units. Each
// backend supplies only the loop; the cell arithmetic is identical, so both
// produce bitwise-equal results.

#include <cstddef>

#include "ripplewave/model.hpp"
#include "ripplewave/pde_sim.hpp"

namespace ripple::kernels {

struct Fields {
  double* u;
  double* v;
  double* u1;  // null for the memory-free system
  double* v1;
  std::size_t n;
};

struct CellMin {
  double value;
  std::ptrdiff_t index;
};

// Upwind for the right-moving family, downwind for the left-moving one.
// `in` and `out` must not alias.
void transport_serial(const Fields& in, const Fields& out, double courant);
void transport_omp(const Fields& in, const Fields& out, double courant);

void react_serial(const Fields& f, double dt, int substeps, ReactionScheme scheme,
                  const ModelParams& m);
void react_omp(const Fields& f, double dt, int substeps, ReactionScheme scheme,
               const ModelParams& m);

// out = in + D (in[i-1] - 2 in[i] + in[i+1]) for every present field.
void diffuse_serial(const Fields& in, const Fields& out, double D);
void diffuse_omp(const Fields& in, const Fields& out, double D);

// Zeroes values in [-dust, 0) and returns the smallest value seen before
// clamping (NaN wins).
CellMin sanitize_serial(const Fields& f, double dust);
CellMin sanitize_omp(const Fields& f, double dust);

}  // namespace ripple::kernels
