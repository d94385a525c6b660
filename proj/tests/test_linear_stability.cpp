#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "models.hpp"
#include "ripplewave/errors.hpp"
#include "ripplewave/linear_stability.hpp"

using namespace ripple;
using fixtures::make;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelParams random_model(std::mt19937& rng) {
  std::uniform_real_distribution<double> lo(0.3, 4.0);
  std::uniform_real_distribution<double> span(0.1, 10.0);
  std::uniform_real_distribution<double> alpha(0.5, 20.0);
  std::uniform_real_distribution<double> center(0.5, 1.5);
  std::uniform_real_distribution<double> g(0.1, 6.0);
  std::uniform_real_distribution<double> curv(0.05, 1.0);
  std::uniform_real_distribution<double> tilt(-0.95, 0.95);
  const double l = lo(rng);
  // Positive quadratic aging, decreasing at rho = 1 for some draws.
  const double g0 = g(rng);
  const double c = curv(rng) * g0;
  const double b = tilt(rng) * 2.0 * std::sqrt(g0 * c);
  return make(RateFunction::sigmoid_exp(l, l + span(rng), alpha(rng), center(rng)),
              RateFunction::quadratic(g0, b, c));
}

}  // namespace

TEST_CASE("Routh-Hurwitz coefficients") {
  const ModelParams u = fixtures::unit();
  CHECK(rh_coefficients(u, 0.0).a0 == 0.0);
  CHECK(rh_coefficients(fixtures::hopf(2.0), 0.0).a0 == 0.0);
  const auto r = rh_coefficients(u, kTwoPi);
  CHECK(r.a3 == doctest::Approx(4.0));
  CHECK(r.p0 == doctest::Approx(20.0));
  CHECK(r.q1 == doctest::Approx(64.0));
  CHECK(r.pass());

  // b > g l / (g + l) forces q1 < 0.
  const ModelParams h = fixtures::hopf(1.0);
  const auto k = isotropic_coefficients(h);
  REQUIRE(k.b > k.g * k.l / (k.g + k.l));
  CHECK(rh_coefficients(h, kTwoPi).q1 < 0.0);
}

TEST_CASE("Routh-Hurwitz combinations follow from the quartic coefficients") {
  std::mt19937 rng(17);
  for (int i = 0; i < 100; ++i) {
    const ModelParams m = random_model(rng);
    for (int n = 0; n <= 8; ++n) {
      const auto r = rh_coefficients(m, kTwoPi * n);
      const double p = r.a3 * r.a2 - r.a1;
      const double q = r.a3 * r.a2 * r.a1 - r.a1 * r.a1 - r.a3 * r.a3 * r.a0;
      CHECK(r.p == doctest::Approx(p).epsilon(1e-9).scale(1.0));
      CHECK(r.q == doctest::Approx(q).epsilon(1e-9).scale(std::abs(r.a3 * r.a2 * r.a1)));
    }
  }
}

TEST_CASE("quartic matches the characteristic polynomial of the symbol") {
  std::mt19937 rng(19);
  for (int i = 0; i < 100; ++i) {
    const ModelParams m = random_model(rng);
    const SteadyState iso = isotropic_state(m);
    for (int n = 0; n <= 16; ++n) {
      const double k = kTwoPi * n;
      const auto c = characteristic_polynomial<4>(symbol_matrix(m, iso, k));
      const auto r = rh_coefficients(m, k);
      const double a[4] = {r.a0, r.a1, r.a2, r.a3};
      for (int j = 0; j < 4; ++j) {
        const double scale = std::max(1.0, std::abs(a[j]));
        CHECK(std::abs(c[static_cast<std::size_t>(j)] - cplx(a[j], 0.0)) < 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("isotropic transport stability verdicts") {
  const auto u = isotropic_transport_stability(fixtures::unit(), 64);
  CHECK(u.verdict == Verdict::stable);
  CHECK(u.rh_consistent);
  CHECK(u.rh.size() == 64);

  const auto h = isotropic_transport_stability(fixtures::hopf(1.0), 64);
  CHECK(h.isotropic_conditions.super_linear);
  CHECK(h.verdict == Verdict::unstable);
  CHECK(h.most_unstable_growth > 0.0);

  const auto q = isotropic_transport_stability(
      make(RateFunction::quadratic(1.0, 0.0, 1.0), RateFunction::constant(1.0)), 64);
  CHECK_FALSE(q.isotropic_conditions.super_linear);
  CHECK_FALSE(q.isotropic_conditions.lambda_prime_ok);
  CHECK(q.verdict == Verdict::inconclusive);

  CHECK_THROWS_AS(isotropic_transport_stability(fixtures::unit(), 0), ParameterError);
}

TEST_CASE("sufficient condition implies positive reduced quantities") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> l(0.5, 5.0);
  std::uniform_real_distribution<double> frac(0.01, 0.99);
  std::uniform_real_distribution<double> g(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    // lambda = a + b rho with 0 < b < a + b, gamma = c + s rho with 0 <= s < c + s.
    const double lam1 = l(rng);
    const double slope = frac(rng) * lam1;
    const double g1 = g(rng);
    const double gslope = (frac(rng) - 0.01) * g1;
    const ModelParams m = make(RateFunction::linear(lam1 - slope, slope),
                               RateFunction::linear(g1 - gslope, gslope));
    const auto rep = isotropic_transport_stability(m, 16);
    REQUIRE(rep.isotropic_conditions.lambda_prime_ok);
    REQUIRE(rep.isotropic_conditions.gamma_prime_ok);
    const auto k = isotropic_coefficients(m);
    CHECK(k.g * k.l - k.b * k.g - k.c * k.l > 0.0);
    CHECK(k.g + k.l - 2.0 * k.b > 0.0);
    CHECK(rep.verdict == Verdict::stable);
    CHECK(rep.rh_consistent);
    for (const auto& d : rep.dispersion) CHECK(d.max_real < 0.0);
  }
}

TEST_CASE("spectrum examples") {
  const ModelParams h = fixtures::hopf(2.0);
  const auto z = spectrum_at_k(h, isotropic_state(h), 0.0);
  double smallest = 1e300;
  for (cplx e : z.eigenvalues) smallest = std::min(smallest, std::abs(e));
  CHECK(smallest < 1e-10);
  // Columns of the reaction matrix sum to zero: total density is conserved.
  const auto M = reaction_matrix(h, isotropic_state(h));
  for (int j = 0; j < 4; ++j) CHECK(std::abs(M[0][j] + M[1][j]) < 1e-14);

  const ModelParams u = fixtures::unit();
  const auto s = spectrum_at_k(u, isotropic_state(u), kTwoPi);
  CHECK(s.max_real < 0.0);
  REQUIRE(s.rh_pass.has_value());
  CHECK(*s.rh_pass);
}

TEST_CASE("spectrum at -k is the conjugate of the spectrum at k") {
  std::mt19937 rng(29);
  for (int i = 0; i < 30; ++i) {
    const ModelParams m = random_model(rng);
    const SteadyState iso = isotropic_state(m);
    for (int n = 1; n <= 5; ++n) {
      const auto a = spectrum_at_k(m, iso, kTwoPi * n);
      const auto b = spectrum_at_k(m, iso, -kTwoPi * n);
      for (cplx e : a.eigenvalues) {
        double best = 1e300;
        for (cplx f : b.eigenvalues) best = std::min(best, std::abs(std::conj(e) - f));
        CHECK(best < 1e-8 * std::max(1.0, std::abs(e)));
      }
    }
  }
}

TEST_CASE("Routh-Hurwitz verdict agrees with the spectrum") {
  std::mt19937 rng(31);
  int compared = 0;
  int stable_seen = 0;
  int unstable_seen = 0;
  for (int i = 0; i < 100; ++i) {
    const ModelParams m = random_model(rng);
    const SteadyState iso = isotropic_state(m);
    for (int n = 1; n <= 32; ++n) {
      const double k = kTwoPi * n;
      const auto r = rh_coefficients(m, k);
      const auto d = spectrum_at_k(m, iso, k);
      if (std::abs(d.max_real) < 1e-9) continue;
      if (!r.pass(1e-9) && !r.fail(1e-9)) continue;
      ++compared;
      CHECK(r.pass(1e-9) == (d.max_real < 0.0));
      (d.max_real < 0.0 ? stable_seen : unstable_seen)++;
    }
  }
  CHECK(compared > 3000);
  CHECK(stable_seen > 0);
  CHECK(unstable_seen > 0);
}

TEST_CASE("anisotropic necessary conditions") {
  CHECK_THROWS_AS(anisotropic_necessary_conditions(isotropic_state(fixtures::unit()), fixtures::unit()),
                  UsageError);
  int checked = 0;
  for (double g : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const ModelParams m = fixtures::hopf(g);
    for (const auto& ss : find_steady_states(m)) {
      if (ss.kind != SteadyKind::anisotropic) continue;
      const auto c = anisotropic_necessary_conditions(ss, m);
      CHECK(c.g_prime_ok == (g_eval(ss.d_bar, m).derivative < 0.0));
      double worst = -1e300;
      for (int n = 1; n <= 64; ++n) worst = std::max(worst, spectrum_at_k(m, ss, kTwoPi * n).max_real);
      if (worst < -1e-9) CHECK(c.all());
      if (!c.all()) CHECK(worst > -1e-9);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("wave formation range") {
  CHECK_FALSE(wave_formation_range(1.0, 3.0, 1.0).feasible);
  const auto r = wave_formation_range(1.0, 5.0, 1.0);
  CHECK(r.feasible);
  CHECK(r.m0_lo == doctest::Approx(0.5));
  CHECK(r.m0_hi == doctest::Approx(1.5));
  for (double s : {0.1, 2.0, 37.0}) {
    const auto q = wave_formation_range(s, 5.0 * s, 2.0);
    CHECK(q.feasible);
    CHECK(q.m0_lo / 2.0 == doctest::Approx(0.5));
    CHECK(q.m0_hi / 2.0 == doctest::Approx(1.5));
  }
  CHECK_THROWS_AS(wave_formation_range(2.0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(wave_formation_range(1.0, 2.0, 0.0), ParameterError);
}
