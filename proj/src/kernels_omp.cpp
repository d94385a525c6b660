#include <omp.h>

#include <vector>

#include "kernels_impl.hpp"

namespace ripple::kernels {
namespace {

struct OmpLoop {
  template <class Body>
  void operator()(std::ptrdiff_t n, Body&& body) const {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
};

}  // namespace

void transport_omp(const Fields& in, const Fields& out, double courant) {
  detail::transport(OmpLoop{}, in, out, courant);
}

void react_omp(const Fields& f, double dt, int substeps, ReactionScheme scheme,
               const ModelParams& m) {
  detail::react(OmpLoop{}, f, dt, substeps, scheme, m);
}

void diffuse_omp(const Fields& in, const Fields& out, double D) {
  detail::diffuse(OmpLoop{}, in, out, D);
}

CellMin sanitize_omp(const Fields& f, double dust) {
  const auto n = static_cast<std::ptrdiff_t>(f.n);
  std::vector<CellMin> partial(static_cast<std::size_t>(omp_get_max_threads()),
                               CellMin{std::numeric_limits<double>::infinity(), -1});
#pragma omp parallel
  {
    const int nt = omp_get_num_threads();
    const int id = omp_get_thread_num();
    const std::ptrdiff_t begin = n * id / nt;
    const std::ptrdiff_t end = n * (id + 1) / nt;
    partial[static_cast<std::size_t>(id)] = detail::sanitize_range(f, dust, begin, end);
  }
  CellMin best{std::numeric_limits<double>::infinity(), -1};
  for (const auto& p : partial) best = detail::combine(best, p);
  return best;
}

}  // namespace ripple::kernels
