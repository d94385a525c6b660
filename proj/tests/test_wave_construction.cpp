#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "oracles.hpp"
#include "ripplewave/errors.hpp"
#include "ripplewave/wave_construction.hpp"

using namespace ripple;
using fixtures::make;

namespace {

double max_abs_diff_P(const AdmissibleWave& a, const AdmissibleWave& b, int n = 4000) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = a.period * (i + 0.5) / n;
    bool near_jump = false;
    for (const auto& j : a.jumps) near_jump = near_jump || std::abs(xi - j.xi) < 1e-6;
    if (near_jump) continue;
    worst = std::max(worst, std::abs(a.P_at(xi) - b.P_at(xi)));
  }
  return worst;
}

}  // namespace

TEST_CASE("branches of Lambda for a step rate") {
  const auto map = admissible_branches(fixtures::step());
  REQUIRE(map.branches.size() == 2);
  CHECK(map.branches[0].hi == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(map.branches[1].lo == doctest::Approx(1.2).epsilon(1e-9));
  CHECK(map.index_of(0.5) == 0);
  CHECK(map.index_of(1.0) == -1);
  CHECK(map.index_of(2.0) == 1);
}

TEST_CASE("linear and quadratic rates admit no tuples") {
  CHECK(find_stable_tuples(make(RateFunction::linear(1.0, 2.0), RateFunction::constant(1.0))).empty());
  CHECK(find_stable_tuples(make(RateFunction::linear(0.3, 7.0), RateFunction::constant(1.0))).empty());
  for (double b : {0.5, 1.0, 4.0}) {
    const ModelParams q = make(RateFunction::quadratic(1.0, 0.0, b), RateFunction::constant(1.0));
    CHECK(find_stable_tuples(q).empty());
    // Lambda-matched pairs satisfy u v = a / b; the larger value is never admissible.
    const Curves c(q);
    for (double u = 0.1; u < std::sqrt(1.0 / b); u += 0.05) {
      const double v = 1.0 / (b * u);
      CHECK(c.Lambda(u) == doctest::Approx(c.Lambda(v)).epsilon(1e-12));
      CHECK_FALSE(c.admissible(v));
    }
  }
}

TEST_CASE("rational rate: one selected pair matching the brute-force scan") {
  const ModelParams m = fixtures::rational();
  const auto tuples = find_stable_tuples(m);
  int selected = 0;
  const WaveTuple* sel = nullptr;
  for (const auto& t : tuples) {
    if (t.selected) {
      ++selected;
      sel = &t;
    }
  }
  REQUIRE(selected == 1);
  const auto scan = oracle::brute_force_pairs(m, 0.05, 5.0, 800);
  REQUIRE(scan.size() == 1);
  CHECK(std::abs(sel->values[0] - scan[0].first) < 1e-6);
  CHECK(std::abs(sel->values[1] - scan[0].second) < 1e-6);
  CHECK(sel->heteroclinic);
  CHECK(sel->mass_compatible);
}

TEST_CASE("tuple invariants") {
  for (const auto& m : {fixtures::rational(), fixtures::double_sigmoid()}) {
    const Curves c(m);
    for (const auto& t : find_stable_tuples(m)) {
      for (double w : t.values) {
        CHECK(std::abs(c.Lambda(w) - c.Lambda(t.values.front())) < 1e-9);
        CHECK(c.Lambda_prime(w) > 0.0);
        CHECK(c.Lambda(w) == doctest::Approx(t.r).epsilon(1e-9));
      }
      if (t.selected) {
        for (double w : t.values) CHECK(std::abs(c.Omega(w) - c.Omega(t.values.front())) < 1e-8);
      }
    }
  }
}

TEST_CASE("double sigmoid: the mass-compatible pair has no heteroclinic orbit") {
  const ModelParams m = fixtures::double_sigmoid();
  const auto tuples = find_stable_tuples(m);
  const WaveTuple* pair1 = nullptr;
  for (const auto& t : tuples) {
    if (t.mass_compatible && t.values.size() == 2) pair1 = &t;
  }
  REQUIRE(pair1 != nullptr);
  CHECK(pair1->omega_match);
  CHECK_FALSE(pair1->selected);
  const PhaseOrbit o = heteroclinic_check(m, pair1->values[0], pair1->values[1]);
  CHECK_FALSE(o.is_heteroclinic);
}

TEST_CASE("heteroclinic orbit conserves energy") {
  const ModelParams m = fixtures::rational();
  const auto tuples = find_stable_tuples(m);
  REQUIRE(!tuples.empty());
  const PhaseOrbit o = heteroclinic_check(m, tuples[0].values[0], tuples[0].values[1]);
  CHECK(o.is_heteroclinic);
  CHECK(o.energy_residual < 1e-6 * std::max(std::abs(o.energy), 1e-300) + 1e-12);
  // Energy recomputed from the samples.
  const double w1 = o.w_start;
  const double l1 = m.lambda.value(w1);
  double worst = 0.0;
  for (std::size_t i = 0; i < o.q.size(); i += 50) {
    const double q = o.q[i];
    const double pot = m.lambda.integral(q) * w1 - m.lambda.integral(w1) * w1 - 0.5 * l1 * (q * q - w1 * w1);
    worst = std::max(worst, std::abs(pot + 0.5 * o.q_prime[i] * o.q_prime[i]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("pairs violating the integral condition do not connect") {
  const ModelParams m = fixtures::rational();
  const Curves c(m);
  const auto map = admissible_branches(m);
  REQUIRE(map.branches.size() >= 2);
  // A level shared by both branches but away from the connecting one.
  const Branch& b0 = map.branches[0];
  const Branch& b1 = map.branches[1];
  const double lo = std::max(b0.Lambda_lo, b1.Lambda_lo);
  const double hi = std::min(b0.Lambda_hi, b1.Lambda_hi);
  REQUIRE(lo < hi);
  const double L = lo + 0.1 * (hi - lo);
  const double w1 = invert_on_branch(c, b0, L);
  const double w2 = invert_on_branch(c, b1, L);
  REQUIRE(std::abs(c.Omega(w1) - c.Omega(w2)) > 1e-3);
  CHECK_FALSE(heteroclinic_check(m, w1, w2).is_heteroclinic);
}

TEST_CASE("anti-symmetric pair for the logistic rate") {
  const ModelParams m = fixtures::hopf(1.0);
  const Curves c(m);
  const WaveTuple t = antisymmetric_pair(m, 1.0, 0.3);
  REQUIRE(t.values.size() == 2);
  CHECK(t.values[1] == doctest::Approx(2.0 - t.values[0]).epsilon(1e-12));
  CHECK(std::abs(c.Omega(t.values[0]) - c.Omega(t.values[1])) < 1e-8);
  CHECK(c.Lambda(t.values[0]) == doctest::Approx(2.0 / (8.0 + 2.5)).epsilon(1e-9));
  CHECK(c.Lambda(t.values[1]) == doctest::Approx(2.0 / (8.0 + 2.5)).epsilon(1e-9));
  CHECK_THROWS_AS(antisymmetric_pair(fixtures::rational(), 1.0, 0.3), ParameterError);
}

TEST_CASE("profile equation") {
  const ModelParams m = fixtures::rational();
  const Curves c(m);
  // Fixed point where Lambda(P)/r = Gamma(P).
  const double P = 0.25;
  const double r = c.Lambda(P) / c.Gamma(P);
  CHECK(std::abs(full_rhs_P(P, r, m)) < 1e-13);

  // Constant rates: linear in P with rate (g + l)/2.
  const ModelParams k = make(RateFunction::constant(2.0), RateFunction::constant(0.5));
  for (double p : {0.3, 1.0, 2.0}) {
    CHECK(full_rhs_P(p, 1.3, k) == doctest::Approx((p * 2.5 - 2.0 * 0.5 * 1.3) / 2.0));
  }

  // On an admissible branch P(l + g) - l g r = l r (l + g)(B - Gamma), so P'
  // has the sign of B - Gamma(P).
  for (double p : {0.1, 0.2, 0.3, 4.0}) {
    if (!c.admissible(p)) continue;
    for (double rr : {0.2, 0.6, 1.5}) {
      const double B = c.Lambda(p) / rr;
      CHECK((full_rhs_P(p, rr, m) > 0.0) == (B > c.Gamma(p)));
    }
  }

  // Singular at a fold.
  const auto map = admissible_branches(m);
  REQUIRE(!map.local_maxima.empty());
  CHECK_THROWS_AS(full_rhs_P(map.local_maxima[0], 1.0, m), NumericError);
}

TEST_CASE("jump partner") {
  const ModelParams m = fixtures::step();
  const Curves c(m);
  const auto map = admissible_branches(m);
  for (double P : {1.3, 1.7, 2.2}) {
    const double r = c.Lambda(P) / (0.5 * (c.Gamma(0.1) + c.Gamma(P)));  // B below Gamma on the crest
    const double partner = jump_partner(P, r, map.index_of(P), m);
    CHECK(partner == doctest::Approx(P / 3.0).epsilon(1e-9));
  }
  const ModelParams lin = make(RateFunction::linear(1.0, 1.0), RateFunction::constant(1.0));
  CHECK_THROWS_AS(jump_partner(0.7, 1.0, 0, lin), NoResultError);
}

TEST_CASE("wave bounds") {
  const WaveBounds b = wave_bounds(fixtures::step(1.0, 3.0, 0.2, 1.0));
  CHECK(b.P_lo == doctest::Approx(1.2 / 3.0).epsilon(1e-9));
  CHECK(b.P_hi == doctest::Approx(3.0 * 0.8).epsilon(1e-9));
  CHECK(b.B_lo == doctest::Approx(1.0 / 4.0).epsilon(1e-9));
  CHECK(b.B_hi == doctest::Approx(1.0 / 2.0).epsilon(1e-9));
  CHECK_THROWS_AS(wave_bounds(make(RateFunction::linear(1.0, 1.0), RateFunction::constant(1.0))),
                  NoResultError);
}

TEST_CASE("closed-form wave matches the independent exponential solution") {
  for (double xi1 : {0.2, 0.4, 0.6}) {
    CAPTURE(xi1);
    const ModelParams m = fixtures::step(1.0, 3.0, 0.2, 1.0);
    const AdmissibleWave w = construct_wave_closed_form(m, 1.0, {xi1, 1.0});
    oracle::StepWave ref{1.0, 3.0, 1.0, xi1, 1.0};
    ref.calibrate(1.0);
    CHECK(w.r == doctest::Approx(ref.r).epsilon(1e-9));
    CHECK(w.mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.period == doctest::Approx(1.0));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double xi = (i + 0.5) / 1000.0;
      worst = std::max(worst, std::abs(w.P_at(xi) - ref.P(xi)));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("closed-form wave properties") {
  const ModelParams m = fixtures::step(1.0, 3.0, 0.2, 1.0);
  const Curves c(m);
  const AdmissibleWave w = construct_wave_closed_form(m, 1.0, {0.4, 1.0});
  const WaveBounds b = wave_bounds(m);
  REQUIRE(w.jumps.size() == 2);
  for (const auto& j : w.jumps) {
    CHECK(c.Lambda(j.P_left) == doctest::Approx(c.Lambda(j.P_right)).epsilon(1e-9));
    CHECK(std::abs(j.P_left - j.P_right) >= 1e-3);
    const double ratio = j.P_left / j.P_right;
    const bool down = j.P_left > j.P_right;
    CHECK(ratio == doctest::Approx(down ? 3.0 : 1.0 / 3.0).epsilon(1e-9));
    // B continuous across the jump.
    CHECK(std::abs(c.Lambda(j.P_left) / w.r - c.Lambda(j.P_right) / w.r) < 1e-8);
  }
  for (int i = 0; i < 2000; ++i) {
    const double xi = (i + 0.5) / 2000.0;
    const double P = w.P_at(xi);
    const double B = w.B_at(xi);
    CHECK(P > (1.0 / 3.0) * 1.2 - 1e-12);
    CHECK(P < 3.0 * 0.8 + 1e-12);
    CHECK(P >= b.P_lo - 1e-9);
    CHECK(P <= b.P_hi + 1e-9);
    CHECK(B > 0.25);
    CHECK(B < 0.5);
    CHECK(c.Lambda_prime(P) > 0.0);
    CHECK(std::abs(B * w.r * m.lambda.value(P) - P) < 1e-8);
  }
  // B solves -2 B' = gamma(P)(1 - B) - lambda(P) B away from the jumps.
  const double h = 1e-6;
  for (double xi : {0.1, 0.3, 0.5, 0.8, 0.95}) {
    const double dB = (w.B_at(xi + h) - w.B_at(xi - h)) / (2 * h);
    const double P = w.P_at(xi);
    const double B = w.B_at(xi);
    CHECK(std::abs(-2.0 * dB - (m.gamma.value(P) * (1 - B) - m.lambda.value(P) * B)) < 1e-5);
  }
  // P' from the profile equation.
  for (double xi : {0.1, 0.3, 0.5, 0.8}) {
    const double dP = (w.P_at(xi + h) - w.P_at(xi - h)) / (2 * h);
    CHECK(std::abs(dP - full_rhs_P(w.P_at(xi), w.r, m)) < 1e-6);
  }
}

TEST_CASE("step too wide for instability") {
  // eps >= (hi - lo)/(hi + lo) = 0.5
  CHECK_THROWS_AS(construct_wave_closed_form(fixtures::step(1.0, 3.0, 0.5), 1.0, {0.4, 1.0}),
                  NoResultError);
  CHECK_THROWS_AS(construct_wave_closed_form(fixtures::step(1.0, 3.0, 0.6), 1.0, {0.4, 1.0}),
                  NoResultError);
  CHECK_THROWS_AS(construct_wave_closed_form(fixtures::hopf(1.0), 1.0, {0.4, 1.0}), UsageError);
}

TEST_CASE("shooting reproduces the closed form") {
  const ModelParams m = fixtures::step(1.0, 3.0, 0.2, 1.0);
  for (double xi1 : {0.3, 0.5}) {
    const AdmissibleWave a = construct_wave_closed_form(m, 1.0, {xi1, 1.0});
    const AdmissibleWave s = construct_wave_shooting(m, 1.0, {xi1, 1.0});
    CHECK(max_abs_diff_P(a, s) < 1e-6);
    CHECK(s.r == doctest::Approx(a.r).epsilon(1e-8));
  }
}

TEST_CASE("shooting handles aging that depends on density") {
  const ModelParams m = make(RateFunction::piecewise_linear_step(1.0, 3.0, 0.2),
                             RateFunction::quadratic(0.2, 0.0, 1.0));
  const Curves c(m);
  // With these switch points the reachable mean lies roughly in [1.05, 1.29].
  const AdmissibleWave w = construct_admissible_wave(m, 1.1, SwitchPoints{0.4, 1.0});
  CHECK(w.mass == doctest::Approx(1.1).epsilon(1e-8));
  for (const auto& j : w.jumps) {
    CHECK(c.Lambda(j.P_left) == doctest::Approx(c.Lambda(j.P_right)).epsilon(1e-9));
  }
  for (int i = 0; i < 500; ++i) {
    const double P = w.P_at((i + 0.5) / 500.0);
    CHECK(c.Lambda_prime(P) > 0.0);
  }
}

TEST_CASE("cell averages of a wave") {
  const ModelParams m = fixtures::step();
  const AdmissibleWave w = construct_wave_closed_form(m, 1.0, {0.5, 1.0});
  const auto cells = w.cell_averages(400);
  double mean = 0.0;
  for (double x : cells) mean += x / 400.0;
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-6));
}
