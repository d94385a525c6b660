#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "models.hpp"
#include "oracles.hpp"
#include "ripplewave/errors.hpp"
#include "ripplewave/ode_dynamics.hpp"

using namespace ripple;
using fixtures::make;

namespace {

double rhs_norm(const OdeState& s, const ModelParams& m) {
  const OdeState r = ode_rhs(s, m);
  return std::sqrt(r.d * r.d + r.u1 * r.u1 + r.v1 * r.v1);
}

ModelParams random_model(std::mt19937& rng) {
  std::uniform_real_distribution<double> lo(0.5, 3.0);
  std::uniform_real_distribution<double> span(0.5, 8.0);
  std::uniform_real_distribution<double> alpha(1.0, 15.0);
  std::uniform_real_distribution<double> g(0.2, 5.0);
  const double l = lo(rng);
  return make(RateFunction::sigmoid_exp(l, l + span(rng), alpha(rng)),
              RateFunction::quadratic(g(rng), 0.0, 0.3 * g(rng)));
}

}  // namespace

TEST_CASE("right-hand side matches the four-density equations") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-0.9, 0.9);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const ModelParams m = random_model(rng);
    const double dd = d(rng);
    const OdeState s{dd, frac(rng) * (1 + dd), frac(rng) * (1 - dd)};
    const OdeState r = ode_rhs(s, m);
    const auto ref = oracle::ode_rhs(m, s.d, s.u1, s.v1);
    CHECK(r.d == doctest::Approx(ref.d_dot).epsilon(1e-13));
    CHECK(r.u1 == doctest::Approx(ref.u1_dot).epsilon(1e-13));
    CHECK(r.v1 == doctest::Approx(ref.v1_dot).epsilon(1e-13));
  }
}

TEST_CASE("right-hand side examples") {
  const ModelParams h = fixtures::hopf(1.0);
  CHECK(rhs_norm(isotropic_state(h).state(), h) < 1e-14);
  const OdeState r = ode_rhs({0.0, 0.0, 0.0}, fixtures::unit());
  CHECK(r.d == 0.0);
  CHECK(r.u1 == doctest::Approx(1.0));
  CHECK(r.v1 == doctest::Approx(1.0));
}

TEST_CASE("G examples and symmetry") {
  const ModelParams u = fixtures::unit();
  for (double d : {-0.7, -0.1, 0.0, 0.4, 0.95}) {
    const GValue g = g_eval(d, u);
    CHECK(g.value == doctest::Approx(-d));
    CHECK(g.derivative == doctest::Approx(-1.0));
  }
  CHECK_THROWS_AS(g_eval(1.0, u), DomainError);
  CHECK_THROWS_AS(g_eval(-1.2, u), DomainError);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-0.95, 0.95);
  for (int i = 0; i < 100; ++i) {
    const ModelParams m = random_model(rng);
    CHECK(std::abs(g_eval(0.0, m).value) < 1e-14);
    const double d = dist(rng);
    const double gd = g_eval(d, m).value;
    // G is odd.
    CHECK(gd == doctest::Approx(-g_eval(-d, m).value).epsilon(1e-12));
    CHECK(gd == doctest::Approx(oracle::G(m, d)).epsilon(1e-12));
    const double fd = oracle::central_diff([&](double x) { return oracle::G(m, x); }, d);
    CHECK(std::abs(g_eval(d, m).derivative - fd) < 1e-6);
  }
}

TEST_CASE("steady states of the unit model") {
  const auto ss = find_steady_states(fixtures::unit());
  REQUIRE(ss.size() == 1);
  CHECK(ss[0].kind == SteadyKind::isotropic);
  CHECK(ss[0].d_bar == 0.0);
  CHECK(ss[0].u1 == doctest::Approx(0.5));
  CHECK(ss[0].v1 == doctest::Approx(0.5));
}

TEST_CASE("logistic rate has a mirrored anisotropic pair") {
  const ModelParams m = fixtures::hopf(5.0);
  CHECK(tau(m) > 0.0);
  const auto ss = find_steady_states(m);
  REQUIRE(ss.size() == 3);
  CHECK(ss[1].kind == SteadyKind::isotropic);
  CHECK(ss[2].d_bar > 0.0);
  CHECK(ss[0].d_bar == doctest::Approx(-ss[2].d_bar).epsilon(1e-12));
  // Oracle: sign changes of G on a fine grid.
  int roots = 0;
  const int n = 20000;
  double prev = oracle::G(m, -1.0 + 1e-9);
  for (int i = 1; i <= n; ++i) {
    const double d = -1.0 + 1e-9 + (2.0 - 2e-9) * i / n;
    const double cur = oracle::G(m, d);
    if ((prev < 0) != (cur < 0) || cur == 0.0) ++roots;
    prev = cur;
  }
  CHECK(roots == 3);
  for (const auto& s : ss) CHECK(rhs_norm(s.state(), m) < 1e-9);
}

TEST_CASE("every steady state is a fixed point") {
  std::mt19937 rng(5);
  for (int i = 0; i < 50; ++i) {
    const ModelParams m = random_model(rng);
    for (const auto& s : find_steady_states(m)) {
      CHECK(rhs_norm(s.state(), m) < 1e-9);
      CHECK(s.u1 >= 0.0);
      CHECK(s.u1 <= s.u());
      CHECK(s.v1 <= s.v());
    }
  }
}

TEST_CASE("stability of the isotropic state") {
  const ModelParams u = fixtures::unit();
  const auto v = ode_stability(isotropic_state(u), u);
  CHECK(v.verdict == Stability::stable);
  CHECK(v.max_real == doctest::Approx(-1.0));
  const auto has = [&](cplx z) {
    return std::any_of(v.eigenvalues.begin(), v.eigenvalues.end(),
                       [&](cplx e) { return std::abs(e - z) < 1e-9; });
  };
  CHECK(has({-2.0, 0.0}));
  CHECK(has({-1.0, 1.0}));
  CHECK(has({-1.0, -1.0}));

  CHECK(ode_stability(isotropic_state(fixtures::hopf(1.5)), fixtures::hopf(1.5)).verdict ==
        Stability::stable);
  CHECK(ode_stability(isotropic_state(fixtures::hopf(2.5)), fixtures::hopf(2.5)).verdict ==
        Stability::unstable);
}

TEST_CASE("the eigenvalue -l-g is always present") {
  std::mt19937 rng(9);
  for (int i = 0; i < 50; ++i) {
    const ModelParams m = random_model(rng);
    const auto k = isotropic_coefficients(m);
    const auto v = ode_stability(isotropic_state(m), m);
    double best = 1e300;
    for (cplx e : v.eigenvalues) best = std::min(best, std::abs(e - cplx(-k.l - k.g, 0.0)));
    CHECK(best < 1e-8);
  }
}

TEST_CASE("closed-form eigenvalues agree with the finite-difference Jacobian") {
  std::mt19937 rng(13);
  for (int i = 0; i < 50; ++i) {
    const ModelParams m = random_model(rng);
    for (const auto& s : find_steady_states(m)) {
      const auto v = ode_stability(s, m);
      const auto fd = eigenvalues<3>(to_complex<3>(ode_jacobian_fd(s.state(), m)));
      for (cplx e : v.eigenvalues) {
        double best = 1e300;
        for (cplx f : fd) best = std::min(best, std::abs(e - f));
        CHECK(best < 1e-6 * std::max(1.0, std::abs(e)));
      }
    }
  }
}

TEST_CASE("anisotropic states report the G' condition") {
  const ModelParams m = fixtures::hopf(5.0);
  REQUIRE(find_steady_states(m).size() == 3);
  for (const auto& s : find_steady_states(m)) {
    const auto v = ode_stability(s, m);
    if (s.kind == SteadyKind::isotropic) {
      CHECK(v.tau_negative.has_value());
      CHECK_FALSE(v.g_prime_negative.has_value());
    } else {
      REQUIRE(v.g_prime_negative.has_value());
      CHECK(*v.g_prime_negative == (g_eval(s.d_bar, m).derivative < 0.0));
      if (!*v.g_prime_negative) CHECK(v.verdict == Stability::unstable);
    }
  }
  SteadyState bogus = isotropic_state(m);
  bogus.d_bar = 0.3;
  CHECK_THROWS_AS(ode_stability(bogus, m), NumericError);
}

TEST_CASE("Hopf thresholds") {
  const HopfThresholds h = hopf_thresholds(fixtures::hopf(1.0));
  CHECK(h.applicable);
  CHECK(h.alpha_condition);
  CHECK(h.uniqueness_condition);
  CHECK(h.gamma_star == doctest::Approx(1.82).epsilon(0.01 / 1.82));
  CHECK(h.gamma_hat == doctest::Approx(3.24).epsilon(0.01 / 3.24));
  CHECK(h.gamma_star2 == doctest::Approx(15.18).epsilon(0.01 / 15.18));
  // gamma_hat = 2 lp^2 / (alpha lm - 2 lp) with lp = 5.25, lm = 2.75.
  CHECK(h.gamma_hat == doctest::Approx(2 * 5.25 * 5.25 / (10 * 2.75 - 2 * 5.25)).epsilon(1e-12));

  CHECK_FALSE(hopf_thresholds(fixtures::unit()).applicable);
  // alpha below 4 lp / lm.
  CHECK_FALSE(hopf_thresholds(make(RateFunction::sigmoid_exp(2.5, 8.0, 5.0), RateFunction::constant(1.0)))
                  .applicable);
}

TEST_CASE("complex pair crosses the axis at gamma_star") {
  const HopfThresholds h = hopf_thresholds(fixtures::hopf(1.0));
  auto pair_real = [&](double g) {
    const ModelParams m = fixtures::hopf(g);
    const auto v = ode_stability(isotropic_state(m), m);
    double best = -1e300;
    for (cplx e : v.eigenvalues) {
      if (std::abs(e.imag()) > 1e-9) best = std::max(best, e.real());
    }
    return best;
  };
  CHECK(pair_real(h.gamma_star - 1e-3) < 0.0);
  CHECK(pair_real(h.gamma_star + 1e-3) > 0.0);
}

TEST_CASE("integration stays at a fixed point") {
  const ModelParams m = fixtures::hopf(1.0);
  const SteadyState iso = isotropic_state(m);
  const Trajectory t = integrate_ode(iso.state(), m, 20.0, 1e-2);
  for (const auto& s : t.states) CHECK(distance(s, iso.state()) < 1e-10);
  CHECK_FALSE(t.limit_cycle);
}

TEST_CASE("Hopf example dynamics") {
  for (double g : {1.5, 2.5}) {
    const ModelParams m = fixtures::hopf(g);
    OdeState s = isotropic_state(m).state();
    s.d += 0.05;
    const Trajectory t = integrate_ode(s, m, 300.0, 1e-2);
    if (g == 1.5) {
      CHECK(t.tail_amplitude() < 1e-6);
      CHECK_FALSE(t.limit_cycle);
    } else {
      CHECK(t.tail_amplitude() > 1e-3);
      CHECK(t.limit_cycle);
    }
  }
}

TEST_CASE("RK4 converges at fourth order") {
  const ModelParams m = fixtures::hopf(2.0);
  OdeState s = isotropic_state(m).state();
  s.d += 0.2;
  const OdeState ref = integrate_ode(s, m, 2.0, 1e-4).final_state;
  const double e1 = distance(integrate_ode(s, m, 2.0, 0.04).final_state, ref);
  const double e2 = distance(integrate_ode(s, m, 2.0, 0.02).final_state, ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("too large a step leaves the invariant region") {
  const ModelParams m = fixtures::hopf(20.0);
  OdeState s = isotropic_state(m).state();
  s.d += 0.3;
  CHECK_THROWS_AS(integrate_ode(s, m, 10.0, 0.5), NumericError);
}

TEST_CASE("Hopf sweep rows") {
  const auto rows = hopf_sweep(fixtures::hopf(1.0), 1.0, 3.0, 4, 200.0);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().gamma == doctest::Approx(1.0));
  CHECK(rows.back().gamma == doctest::Approx(3.0));
  CHECK_FALSE(rows[1].limit_cycle);  // gamma = 1.5
  CHECK(rows[3].limit_cycle);        // gamma = 2.5
}
