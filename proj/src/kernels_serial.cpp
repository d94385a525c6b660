// Serial reference kernels. Kept deliberately free of OpenMP pragmas.

#include "kernels_impl.hpp"

namespace ripple::kernels {
namespace {

struct SerialLoop {
  template <class Body>
  void operator()(std::ptrdiff_t n, Body&& body) const {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
};

}  // namespace

void transport_serial(const Fields& in, const Fields& out, double courant) {
  detail::transport(SerialLoop{}, in, out, courant);
}

void react_serial(const Fields& f, double dt, int substeps, ReactionScheme scheme,
                  const ModelParams& m) {
  detail::react(SerialLoop{}, f, dt, substeps, scheme, m);
}

void diffuse_serial(const Fields& in, const Fields& out, double D) {
  detail::diffuse(SerialLoop{}, in, out, D);
}

CellMin sanitize_serial(const Fields& f, double dust) {
  return detail::sanitize_range(f, dust, 0, static_cast<std::ptrdiff_t>(f.n));
}

}  // namespace ripple::kernels
