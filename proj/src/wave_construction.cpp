#include "ripplewave/wave_construction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <variant>

#include "ripplewave/errors.hpp"
#include "ripplewave/numerics.hpp"

namespace ripple {
namespace {

constexpr double kFoldTol = 1e-12;

// Regula falsi with the Illinois modification; fa and fb must differ in sign.
template <class F>
double illinois(F&& f, double a, double b, double fa, double fb, double xtol, double ftol,
                int max_iter = 200) {
  int side = 0;
  double c = a;
  for (int i = 0; i < max_iter; ++i) {
    c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (std::abs(fc) <= ftol || std::abs(b - a) <= xtol) return c;
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return c;
}

// Phase-plane point (Q, Q').
struct Y {
  double q;
  double v;
  Y operator+(const Y& o) const { return {q + o.q, v + o.v}; }
  friend Y operator*(double a, const Y& y) { return {a * y.q, a * y.v}; }
};

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<Branch> clip_branches(const Curves& c, const BranchMap& map, double rho_min) {
  std::vector<Branch> out;
  for (Branch b : map.branches) {
    if (b.hi <= rho_min) continue;
    if (b.lo < rho_min) {
      b.lo = rho_min;
      b.Lambda_lo = c.Lambda(rho_min);
    }
    out.push_back(b);
  }
  return out;
}

// Simpson over a segment sampled at an odd number of equally spaced nodes.
double simpson(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  if (n < 3 || n % 2 == 0) throw NumericError("simpson needs an odd node count >= 3");
  double s = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0;
}

WaveTuple make_tuple(const ModelParams& m, const Curves& c, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  WaveTuple t;
  t.values = values;
  t.r = c.Lambda(values.front());
  const double om1 = c.Omega(values.front());
  for (double w : values) {
    t.linear_stable.push_back(c.admissible(w));
    t.omega_residual = std::max(t.omega_residual, std::abs(c.Omega(w) - om1));
  }
  t.omega_match = t.omega_residual < 1e-8;
  t.heteroclinic = true;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    t.heteroclinic = t.heteroclinic && heteroclinic_check(m, values[i], values[i + 1]).is_heteroclinic;
  }
  const bool all_stable =
      std::all_of(t.linear_stable.begin(), t.linear_stable.end(), [](bool b) { return b; });
  t.selected = all_stable && t.omega_match && t.heteroclinic;
  const double mean = m.total_mass / (2.0 * m.domain_length);
  t.mass_compatible = values.front() < mean && mean < values.back();
  return t;
}

}  // namespace

int BranchMap::index_of(double rho) const {
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i].contains(rho)) return static_cast<int>(i);
  }
  return -1;
}

BranchMap admissible_branches(const ModelParams& m, double rho_scan, int grid) {
  if (!(rho_scan > 0.0) || grid < 16) throw ParameterError("branch scan needs rho_scan > 0, grid >= 16");
  const Curves c(m);
  const double h = rho_scan / grid;
  auto adm = [&c](double rho) { return c.admissibility(rho); };
  auto fold = [&](double a, double b) { return bisect(adm, a, b, 1e-14); };

  BranchMap map;
  map.rho_scan = rho_scan;
  bool inside = adm(h) > 0.0;
  Branch cur;
  if (inside) cur.lo = 0.0;
  double prev = h;
  for (int i = 2; i <= grid; ++i) {
    const double x = (i == grid) ? rho_scan : i * h;
    const bool now = adm(x) > 0.0;
    if (now != inside) {
      const double f = fold(prev, x);
      if (inside) {
        cur.hi = f;
        map.branches.push_back(cur);
        map.local_maxima.push_back(f);
      } else {
        cur = Branch{};
        cur.lo = f;
        map.local_minima.push_back(f);
      }
      inside = now;
    }
    prev = x;
  }
  if (inside) {
    cur.hi = rho_scan;
    cur.open_end = true;
    map.branches.push_back(cur);
  }
  for (auto& b : map.branches) {
    b.Lambda_lo = b.lo > 0.0 ? c.Lambda(b.lo) : 0.0;
    b.Lambda_hi = c.Lambda(b.hi);
  }
  return map;
}

double invert_on_branch(const Curves& c, const Branch& b, double L) {
  const double lo = b.lo > 0.0 ? b.lo : 1e-300;
  auto f = [&](double rho) { return c.Lambda(rho) - L; };
  const double flo = f(lo);
  const double fhi = f(b.hi);
  if (flo > 0.0 || fhi < 0.0) {
    const double slack = 1e-12 * std::max(1.0, std::abs(L));
    if (flo > 0.0 && flo < slack) return lo;
    if (fhi < 0.0 && -fhi < slack) return b.hi;
    throw DomainError("Lambda value outside the branch range");
  }
  return bisect(f, lo, b.hi, 1e-14 * std::max(1.0, b.hi));
}

std::vector<WaveTuple> find_stable_tuples(const ModelParams& m, double rho_min, double rho_max) {
  if (!(rho_min > 0.0) || !(rho_max > rho_min)) {
    throw ParameterError("tuple search box needs 0 < rho_min < rho_max");
  }
  const Curves c(m);
  const auto branches = clip_branches(c, admissible_branches(m, rho_max), rho_min);

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    for (std::size_t j = i + 1; j < branches.size(); ++j) {
      const Branch& bi = branches[i];
      const Branch& bj = branches[j];
      double La = std::max(bi.Lambda_lo, bj.Lambda_lo);
      double Lb = std::min(bi.Lambda_hi, bj.Lambda_hi);
      if (!(Lb > La)) continue;
      const double pad = 1e-9 * (Lb - La);
      La += pad;
      Lb -= pad;
      // Outer unknown is the common Lambda value; both values follow from it.
      auto F = [&](double L) {
        return c.Omega(invert_on_branch(c, bi, L)) - c.Omega(invert_on_branch(c, bj, L));
      };
      for (auto [a, b] : sign_change_brackets(F, La, Lb, 512)) {
        const double L = bisect(F, a, b, 1e-15 * std::max(1.0, Lb));
        pairs.emplace_back(invert_on_branch(c, bi, L), invert_on_branch(c, bj, L));
      }
    }
  }

  std::vector<WaveTuple> out;
  for (auto [w1, w2] : pairs) out.push_back(make_tuple(m, c, {w1, w2}));

  // Chain pairs sharing a value into longer tuples.
  std::vector<std::vector<double>> chains;
  for (auto [w1, w2] : pairs) chains.push_back({w1, w2});
  auto shares = [](const std::vector<double>& a, const std::vector<double>& b) {
    for (double x : a)
      for (double y : b)
        if (std::abs(x - y) < 1e-8) return true;
    return false;
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < chains.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < chains.size() && !merged; ++j) {
        if (!shares(chains[i], chains[j])) continue;
        for (double y : chains[j]) {
          const bool dup = std::any_of(chains[i].begin(), chains[i].end(),
                                       [y](double x) { return std::abs(x - y) < 1e-8; });
          if (!dup) chains[i].push_back(y);
        }
        chains.erase(chains.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
    }
  }
  for (auto& ch : chains) {
    if (ch.size() > 2) out.push_back(make_tuple(m, c, ch));
  }
  return out;
}

WaveTuple antisymmetric_pair(const ModelParams& m, double rho_bar, double w1_guess) {
  if (!(rho_bar > 0.0)) throw ParameterError("rho_bar must be positive");
  const auto& lam = m.lambda;
  const double l_bar = lam.value(rho_bar);
  for (int i = 0; i <= 200; ++i) {
    const double rho = rho_bar * i / 200.0;
    const double defect = lam.value(rho_bar + rho) + lam.value(rho_bar - rho) - 2.0 * l_bar;
    if (std::abs(defect) > 1e-9) {
      throw ParameterError("rate is not anti-symmetric about rho_bar");
    }
  }
  // w lambda(2 rho_bar - w) = (2 rho_bar - w) lambda(w) is the Lambda equation
  // after the mirror identity.
  auto h = [&](double w) {
    const double w2 = 2.0 * rho_bar - w;
    return w * lam.value(w2) - w2 * lam.value(w);
  };
  const double lo = 1e-6 * rho_bar;
  const double hi = rho_bar * (1.0 - 1e-6);
  double best = -1.0;
  for (auto [a, b] : sign_change_brackets(h, lo, hi, 2048)) {
    const double w = bisect(h, a, b, 1e-15);
    if (std::abs(w - rho_bar) < 1e-6 * rho_bar) continue;
    if (best < 0.0 || std::abs(w - w1_guess) < std::abs(best - w1_guess)) best = w;
  }
  if (best < 0.0) throw NoResultError("no anti-symmetric pair for this rate");
  return make_tuple(m, Curves(m), {best, 2.0 * rho_bar - best});
}

PhaseOrbit heteroclinic_check(const ModelParams& m, double w1, double w2) {
  const Curves c(m);
  if (!(w1 > 0.0) || !(w2 > 0.0) || w1 == w2) throw ParameterError("need distinct positive w1, w2");
  const double L1 = c.Lambda(w1);
  if (std::abs(c.Lambda(w2) - L1) > 1e-6 * std::max(1.0, L1)) {
    throw ParameterError("heteroclinic check needs equal Lambda at both ends");
  }
  const double s = c.admissibility(w1);
  if (!(s > 0.0)) throw ParameterError("w1 must be admissible (saddle point)");

  const auto& lam = m.lambda;
  const double l1 = lam.value(w1);
  auto force = [&](double q) { return -(lam.value(q) * w1 - l1 * q); };
  auto energy = [&](double q, double v) {
    return w1 * lam.integral(q) - 0.5 * l1 * q * q + 0.5 * v * v;
  };

  auto rhs = [&](const Y& y) { return Y{y.v, force(y.q)}; };

  const double dir = w2 > w1 ? 1.0 : -1.0;
  const double d0 = 1e-5;
  Y y{w1 + dir * d0, dir * d0 * std::sqrt(s)};

  PhaseOrbit orb;
  orb.w_start = w1;
  orb.w_target = w2;
  orb.energy = energy(y.q, y.v);
  orb.closest_approach = std::hypot(y.q - w2, y.v);
  orb.q.push_back(y.q);
  orb.q_prime.push_back(y.v);

  const double h = 1e-3;
  const long n_steps = 200000;
  const double qmax = 10.0 * std::max(w1, w2);
  orb.termination = "max_length";
  for (long i = 1; i <= n_steps; ++i) {
    y = rk4_step(y, h, rhs);
    orb.energy_residual = std::max(orb.energy_residual, std::abs(energy(y.q, y.v) - orb.energy));
    const double dist = std::hypot(y.q - w2, y.v);
    orb.closest_approach = std::min(orb.closest_approach, dist);
    if (i % 10 == 0) {
      orb.q.push_back(y.q);
      orb.q_prime.push_back(y.v);
    }
    if (dist < 1e-4) {
      orb.is_heteroclinic = true;
      orb.termination = "reached_target";
      break;
    }
    if (y.q < 0.0 || y.q > qmax || !std::isfinite(y.q)) {
      orb.termination = "diverged";
      break;
    }
    if (dir * y.v <= 0.0) {
      orb.termination = "turned_back";
      break;
    }
  }
  orb.q.push_back(y.q);
  orb.q_prime.push_back(y.v);
  return orb;
}

double full_rhs_P(double P, double r, const ModelParams& m) {
  const auto [l, dl] = m.lambda.eval(P);
  const double g = m.gamma.value(P);
  const double denom = l - P * dl;
  if (std::abs(denom) < kFoldTol) throw NumericError("profile equation singular at a fold of Lambda");
  return l * (P * (l + g) - l * g * r) / (2.0 * denom);
}

double jump_partner(double P, double r, int current_branch, const ModelParams& m) {
  return jump_partner(P, r, current_branch, m, admissible_branches(m));
}

double jump_partner(double P, double r, int current_branch, const ModelParams& m,
                    const BranchMap& map) {
  const Curves c(m);
  if (!c.admissible(P)) throw ParameterError("jump source must be admissible");
  const double L = c.Lambda(P);
  const double B = L / r;
  const int s = sgn(B - c.Gamma(P));
  // Prefer the nearest branch.
  std::vector<int> order;
  for (int k = 0; k < static_cast<int>(map.branches.size()); ++k) {
    if (k != current_branch) order.push_back(k);
  }
  std::sort(order.begin(), order.end(), [current_branch](int a, int b) {
    return std::abs(a - current_branch) < std::abs(b - current_branch);
  });
  for (int k : order) {
    const Branch& b = map.branches[static_cast<std::size_t>(k)];
    if (!b.covers_Lambda(L)) continue;
    const double rho = invert_on_branch(c, b, L);
    if (std::abs(rho - P) < 1e-12) continue;
    if (s != 0 && sgn(B - c.Gamma(rho)) == -s) return rho;
  }
  throw NoResultError("density is not reachable: no partner with opposite B'");
}

WaveBounds wave_bounds(const ModelParams& m, double rho_scan) {
  const Curves c(m);
  const BranchMap map = admissible_branches(m, rho_scan);
  auto reach = [&](double rho) {
    std::vector<double> out;
    const double L = c.Lambda(rho);
    for (const auto& b : map.branches) {
      if (b.covers_Lambda(L)) out.push_back(invert_on_branch(c, b, L));
    }
    return out;
  };

  WaveBounds wb;
  bool have_hi = false;
  bool have_lo = false;
  for (double x : map.local_maxima) {
    const auto rs = reach(x);
    if (rs.empty()) continue;
    const double top = std::max(x, *std::max_element(rs.begin(), rs.end()));
    wb.P_hi = have_hi ? std::max(wb.P_hi, top) : top;
    have_hi = true;
  }
  for (double x : map.local_minima) {
    const auto rs = reach(x);
    if (rs.empty()) continue;
    const double bot = std::min(x, *std::min_element(rs.begin(), rs.end()));
    wb.P_lo = have_lo ? std::min(wb.P_lo, bot) : bot;
    have_lo = true;
  }
  if (!have_hi || !have_lo) throw NoResultError("Lambda is monotone on the scan range: no waves");

  const int n = 4096;
  wb.B_lo = std::numeric_limits<double>::infinity();
  wb.B_hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double G = c.Gamma(rho_scan * i / n);
    wb.B_lo = std::min(wb.B_lo, G);
    wb.B_hi = std::max(wb.B_hi, G);
  }
  return wb;
}

// ---------------------------------------------------------------------------
// AdmissibleWave evaluation

double AdmissibleWave::P_at(double xi) const {
  double x = std::fmod(xi, period);
  if (x < 0.0) x += period;
  for (const auto& seg : segments) {
    if (x < seg.xi.front() || x >= seg.xi.back()) continue;
    const auto it = std::upper_bound(seg.xi.begin(), seg.xi.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - seg.xi.begin()) - 1;
    const double h = seg.xi[k + 1] - seg.xi[k];
    const double t = (x - seg.xi[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * seg.P[k] + (t3 - 2 * t2 + t) * h * seg.dP[k] +
           (-2 * t3 + 3 * t2) * seg.P[k + 1] + (t3 - t2) * h * seg.dP[k + 1];
  }
  // x falls on the closing node of the last segment.
  return segments.front().P.front();
}

double AdmissibleWave::B_at(double xi) const { return Curves(model).Lambda(P_at(xi)) / r; }

std::vector<double> AdmissibleWave::cell_averages(int n, double shift) const {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double dx = period / n;
  constexpr int kSub = 16;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int q = 0; q < kSub; ++q) s += P_at(shift + (i + (q + 0.5) / kSub) * dx);
    out[static_cast<std::size_t>(i)] = s / kSub;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed form for the piecewise-linear step

AdmissibleWave construct_wave_closed_form(const ModelParams& m, double target_mass, SwitchPoints sp,
                                          int samples_per_segment) {
  const auto* step = std::get_if<PiecewiseLinearStepRate>(&m.lambda.shape());
  const auto* aging = std::get_if<ConstantRate>(&m.gamma.shape());
  if (step == nullptr || aging == nullptr) {
    throw UsageError("closed form needs a piecewise-linear step rate and constant aging");
  }
  if (!(sp.xi1 > 0.0) || !(sp.xi2 > sp.xi1)) throw ParameterError("need 0 < xi1 < xi2");
  if (!(target_mass > 0.0)) throw ParameterError("target mass must be positive");
  if (samples_per_segment < 3) throw ParameterError("need at least 3 samples per segment");

  const double lo = step->lam_lo;
  const double hi = step->lam_hi;
  const double eps = step->eps;
  const double center = step->center;
  const double g = aging->c;
  if (!(eps < (hi - lo) / (hi + lo))) {
    throw NoResultError("no admissible wave: step too wide for instability");
  }

  const double kc = 0.5 * (g + hi);
  const double kt = 0.5 * (g + lo);
  const double ratio = lo / hi;
  const double E1 = std::exp(kc * sp.xi1);
  const double tau = sp.xi2 - sp.xi1;
  const double E2 = std::exp(kt * tau);

  // Everything is linear in r: build at r = 1 and rescale.
  const double pc_star1 = g * hi / (g + hi);
  const double pt_star1 = g * lo / (g + lo);
  const double pc0_1 =
      (pt_star1 * (1.0 - E2) + ratio * E2 * pc_star1 * (1.0 - E1)) / (ratio * (1.0 - E1 * E2));
  const double pc_end_1 = pc_star1 + E1 * (pc0_1 - pc_star1);
  const double pt0_1 = ratio * pc_end_1;
  const double crest_int = pc_star1 * sp.xi1 + (E1 - 1.0) / kc * (pc0_1 - pc_star1);
  const double trough_int = pt_star1 * tau + (E2 - 1.0) / kt * (pt0_1 - pt_star1);
  const double mass1 = (crest_int + trough_int) / sp.xi2;
  const double r = target_mass / mass1;

  const double pc_star = r * pc_star1;
  const double pt_star = r * pt_star1;
  const double pc0 = r * pc0_1;
  const double pt0 = r * pt0_1;
  const double pc_end = r * pc_end_1;
  const double pt_end = pt_star + E2 * (pt0 - pt_star);

  if (!(pc0 > center + eps) || !(pt0 < center - eps) || !(pt_end > 0.0)) {
    std::ostringstream os;
    os << "no admissible wave for these switch points and mass: crest starts at " << pc0
       << ", trough starts at " << pt0 << ", step is [" << center - eps << ", " << center + eps
       << "]";
    throw NoResultError(os.str());
  }

  AdmissibleWave w(m);
  w.r = r;
  w.period = sp.xi2;
  w.mass = target_mass;
  w.method = "closed_form";
  const int n = samples_per_segment;
  WaveSegment crest;
  crest.branch = 1;
  WaveSegment trough;
  trough.branch = 0;
  for (int i = 0; i < n; ++i) {
    const double s = sp.xi1 * i / (n - 1);
    const double P = pc_star + std::exp(kc * s) * (pc0 - pc_star);
    crest.xi.push_back(s);
    crest.P.push_back(P);
    crest.dP.push_back(kc * (P - pc_star));
  }
  for (int i = 0; i < n; ++i) {
    const double s = tau * i / (n - 1);
    const double P = pt_star + std::exp(kt * s) * (pt0 - pt_star);
    trough.xi.push_back(sp.xi1 + s);
    trough.P.push_back(P);
    trough.dP.push_back(kt * (P - pt_star));
  }
  crest.xi.back() = sp.xi1;
  trough.xi.back() = sp.xi2;
  w.segments = {crest, trough};
  w.jumps = {JumpPoint{0.0, pt_end, pc0}, JumpPoint{sp.xi1, pc_end, pt0}};
  return w;
}

// ---------------------------------------------------------------------------
// Shooting with prescribed switch points

namespace {

struct PairChoice {
  Branch trough;
  Branch crest;
  int trough_index = 0;
  int crest_index = 1;
};

// Trough and crest branches with overlapping Lambda ranges. Pairs whose gap
// contains the mean density come first, adjacent pairs before distant ones.
PairChoice choose_pair(const BranchMap& map, double mean) {
  std::optional<PairChoice> fallback;
  for (std::size_t gap = 1; gap < map.branches.size(); ++gap) {
    for (std::size_t i = 0; i + gap < map.branches.size(); ++i) {
      const std::size_t j = i + gap;
      const auto& a = map.branches[i];
      const auto& b = map.branches[j];
      if (std::min(a.Lambda_hi, b.Lambda_hi) <= std::max(a.Lambda_lo, b.Lambda_lo)) continue;
      const PairChoice pc{a, b, static_cast<int>(i), static_cast<int>(j)};
      if (mean > a.hi && mean < b.lo) return pc;
      if (!fallback) fallback = pc;
    }
  }
  if (fallback) return *fallback;
  throw NoResultError("no pair of admissible branches with overlapping Lambda range");
}

// RK4 in xi on one branch; empty result if P leaves the branch.
bool integrate_on_branch(double P0, double r, double length, int n_nodes, const Branch& b,
                         const ModelParams& m, WaveSegment* seg) {
  const double h = length / (n_nodes - 1);
  auto f = [&](double P) { return full_rhs_P(P, r, m); };
  double P = P0;
  if (seg) {
    seg->xi.assign(1, 0.0);
    seg->P.assign(1, P);
    seg->dP.assign(1, f(P));
  }
  for (int i = 1; i < n_nodes; ++i) {
    try {
      P = rk4_step(P, h, f);
    } catch (const NumericError&) {
      return false;
    }
    if (!std::isfinite(P) || !b.contains(P)) return false;
    if (seg) {
      seg->xi.push_back(i * h);
      seg->P.push_back(P);
      seg->dP.push_back(f(P));
    }
  }
  if (seg) seg->xi.back() = length;
  return true;
}

struct ShotResult {
  bool ok = false;
  double residual = 0.0;
};

class Shooter {
 public:
  Shooter(const ModelParams& m, const PairChoice& pc, SwitchPoints sp)
      : m_(m), c_(m), pc_(pc), sp_(sp) {}

  ShotResult shoot(double pc0, double r, int n) const {
    WaveSegment crest;
    if (!integrate_on_branch(pc0, r, sp_.xi1, n, pc_.crest, m_, &crest)) return {};
    const double L = c_.Lambda(crest.P.back());
    if (!pc_.trough.covers_Lambda(L)) return {};
    const double pt0 = invert_on_branch(c_, pc_.trough, L);
    WaveSegment trough;
    if (!integrate_on_branch(pt0, r, sp_.xi2 - sp_.xi1, n, pc_.trough, m_, &trough)) return {};
    return {true, c_.Lambda(trough.P.back()) - c_.Lambda(pc0)};
  }

  // Every periodic crest start value for this r, refined at n_fine nodes.
  [[nodiscard]] std::vector<double> starts(double r, int n_fine) const {
    const double top_L = std::min(pc_.crest.Lambda_hi, pc_.trough.Lambda_hi);
    const double p_lo = pc_.crest.lo;
    const double p_hi = invert_on_branch(c_, pc_.crest, top_L);
    constexpr int kScan = 64;
    constexpr int kCoarse = 201;
    std::vector<double> out;
    double prev_x = 0.0;
    ShotResult prev{};
    for (int i = 0; i <= kScan; ++i) {
      const double x = p_lo + (p_hi - p_lo) * (i + 0.5) / (kScan + 1);
      const ShotResult cur = shoot(x, r, kCoarse);
      if (cur.ok && prev.ok && sgn(cur.residual) != sgn(prev.residual)) {
        auto f = [&](double p) {
          const ShotResult s = shoot(p, r, n_fine);
          if (!s.ok) throw NumericError("shooting left the branches inside a bracket");
          return s.residual;
        };
        // A bracket that only exists at coarse resolution is skipped.
        try {
          const double fa = f(prev_x);
          const double fb = f(x);
          if (sgn(fa) != sgn(fb)) out.push_back(illinois(f, prev_x, x, fa, fb, 1e-15, 1e-15));
        } catch (const NumericError&) {
        }
      }
      prev = cur;
      prev_x = x;
    }
    return out;
  }

  // Periodicity residual and mass defect at (r, pc0); nullopt off the branches.
  [[nodiscard]] std::optional<std::array<double, 2>> defects(double r, double pc0, double target,
                                                             int n) const {
    const ShotResult s = shoot(pc0, r, n);
    if (!s.ok) return std::nullopt;
    return std::array<double, 2>{s.residual, build(r, pc0, n).mass - target};
  }

  AdmissibleWave build(double r, double pc0, int n) const {
    AdmissibleWave w(m_);
    w.r = r;
    w.period = sp_.xi2;
    w.method = "shooting";
    WaveSegment crest;
    integrate_on_branch(pc0, r, sp_.xi1, n, pc_.crest, m_, &crest);
    crest.branch = pc_.crest_index;
    const double pt0 = invert_on_branch(c_, pc_.trough, c_.Lambda(crest.P.back()));
    WaveSegment trough;
    integrate_on_branch(pt0, r, sp_.xi2 - sp_.xi1, n, pc_.trough, m_, &trough);
    trough.branch = pc_.trough_index;
    for (double& x : trough.xi) x += sp_.xi1;
    w.jumps = {JumpPoint{0.0, trough.P.back(), pc0}, JumpPoint{sp_.xi1, crest.P.back(), pt0}};
    w.mass = (simpson(crest.P, sp_.xi1 / (n - 1)) + simpson(trough.P, (sp_.xi2 - sp_.xi1) / (n - 1))) /
             sp_.xi2;
    w.segments = {std::move(crest), std::move(trough)};
    return w;
  }

 private:
  const ModelParams& m_;
  Curves c_;
  PairChoice pc_;
  SwitchPoints sp_;
};

}  // namespace

AdmissibleWave construct_wave_shooting(const ModelParams& m, double target_mass, SwitchPoints sp,
                                       int samples_per_segment) {
  if (!(sp.xi1 > 0.0) || !(sp.xi2 > sp.xi1)) throw ParameterError("need 0 < xi1 < xi2");
  if (!(target_mass > 0.0)) throw ParameterError("target mass must be positive");
  if (samples_per_segment < 3 || samples_per_segment % 2 == 0) {
    throw ParameterError("samples per segment must be odd and >= 3");
  }
  const Curves c(m);
  const BranchMap map = admissible_branches(m);
  const PairChoice pc = choose_pair(map, target_mass);
  const Shooter shooter(m, pc, sp);
  const int n = samples_per_segment;

  // Feasible r: Lambda / B with Lambda in the overlap and B in the Gamma range.
  const double La = std::max(pc.crest.Lambda_lo, pc.trough.Lambda_lo);
  const double Lb = std::min(pc.crest.Lambda_hi, pc.trough.Lambda_hi);
  const WaveBounds wb = wave_bounds(m);
  const double r_lo = La / wb.B_hi;
  const double r_hi = Lb / wb.B_lo;

  // Periodic starts form curves in (r, pc0). Scan r, follow each curve to
  // the next r by nearest start, and polish a mass sign change with Newton
  // on (r, pc0) using a finite-difference Jacobian.
  struct Start {
    double pc0;
    double mass;
  };
  constexpr int kCoarse = 401;
  auto starts_at = [&](double r) {
    std::vector<Start> out;
    for (double p : shooter.starts(r, kCoarse)) out.push_back({p, shooter.build(r, p, kCoarse).mass});
    return out;
  };
  auto polish = [&](double r, double p) -> std::optional<std::pair<double, double>> {
    for (int it = 0; it < 40; ++it) {
      const auto F = shooter.defects(r, p, target_mass, n);
      if (!F) return std::nullopt;
      if (std::abs((*F)[0]) < 1e-13 && std::abs((*F)[1]) < 1e-12 * target_mass) return std::pair{r, p};
      const double hr = 1e-7 * r;
      const double hp = 1e-7 * p;
      const auto Fr = shooter.defects(r + hr, p, target_mass, n);
      const auto Fp = shooter.defects(r, p + hp, target_mass, n);
      if (!Fr || !Fp) return std::nullopt;
      const double j11 = ((*Fr)[0] - (*F)[0]) / hr;
      const double j21 = ((*Fr)[1] - (*F)[1]) / hr;
      const double j12 = ((*Fp)[0] - (*F)[0]) / hp;
      const double j22 = ((*Fp)[1] - (*F)[1]) / hp;
      const double det = j11 * j22 - j12 * j21;
      if (!(std::abs(det) > 0.0)) return std::nullopt;
      double dr = -((*F)[0] * j22 - (*F)[1] * j12) / det;
      double dp = -(j11 * (*F)[1] - j21 * (*F)[0]) / det;
      // Damp steps that would leave a bounded neighborhood.
      const double scale = std::max({1.0, std::abs(dr) / (0.1 * r), std::abs(dp) / (0.1 * p)});
      r += dr / scale;
      p += dp / scale;
      if (it > 2 && std::abs(dr) < 1e-15 * r && std::abs(dp) < 1e-15 * p) return std::pair{r, p};
    }
    return std::nullopt;
  };

  constexpr int kScan = 160;
  const double crest_span = invert_on_branch(c, pc.crest, std::min(pc.crest.Lambda_hi, pc.trough.Lambda_hi)) -
                            pc.crest.lo;
  auto nearest = [](const std::vector<Start>& cands, double pc0) -> const Start* {
    const Start* b = nullptr;
    for (const auto& cand : cands) {
      if (!b || std::abs(cand.pc0 - pc0) < std::abs(b->pc0 - pc0)) b = &cand;
    }
    return b;
  };
  // A mass crossing between starts a (at ra) and b (at rb). Where the starts
  // are too far apart to trust as one family, bisect in r until they are not.
  auto bridge = [&](double ra, Start a, double rb, Start b) -> std::optional<std::pair<double, double>> {
    for (int depth = 0; depth < 30; ++depth) {
      if (std::abs(b.pc0 - a.pc0) <= 0.1 * crest_span) {
        const double t = (target_mass - a.mass) / (b.mass - a.mass);
        return polish(ra + t * (rb - ra), a.pc0 + t * (b.pc0 - a.pc0));
      }
      const double rm = 0.5 * (ra + rb);
      const std::vector<Start> mid = starts_at(rm);
      const Start* s = nearest(mid, 0.5 * (a.pc0 + b.pc0));
      if (!s) return std::nullopt;
      if (sgn(a.mass - target_mass) != sgn(s->mass - target_mass)) {
        rb = rm;
        b = *s;
      } else {
        ra = rm;
        a = *s;
      }
    }
    return std::nullopt;
  };

  double lo_seen = std::numeric_limits<double>::infinity();
  double hi_seen = -std::numeric_limits<double>::infinity();
  double prev_r = 0.0;
  std::vector<Start> prev;
  for (int i = 0; i <= kScan; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, (i + 0.5) / (kScan + 1));
    const std::vector<Start> cur = starts_at(r);
    for (const auto& st : cur) {
      lo_seen = std::min(lo_seen, st.mass);
      hi_seen = std::max(hi_seen, st.mass);
    }
    for (const auto& a : prev) {
      const Start* b = nearest(cur, a.pc0);
      if (!b || sgn(a.mass - target_mass) == sgn(b->mass - target_mass)) continue;
      if (const auto sol = bridge(prev_r, a, r, *b)) return shooter.build(sol->first, sol->second, n);
    }
    // Two starts at one r with the mass between them: the curve folds back
    // in r between the two, so polish from their midpoint.
    for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
      if (sgn(cur[k].mass - target_mass) == sgn(cur[k + 1].mass - target_mass)) continue;
      if (const auto sol = polish(r, 0.5 * (cur[k].pc0 + cur[k + 1].pc0))) {
        return shooter.build(sol->first, sol->second, n);
      }
    }
    prev = cur;
    prev_r = r;
  }
  std::ostringstream os;
  os << "no admissible wave with these switch points reaches mass " << target_mass;
  if (lo_seen <= hi_seen) os << " (reachable range " << lo_seen << " to " << hi_seen << ")";
  throw NoResultError(os.str());
}

// ---------------------------------------------------------------------------
// Automatic construction

namespace {

struct Window {
  double from;
  double to;
};

struct Loop {
  bool degenerate = false;
  double rho_star = 0.0;
  double rho_star2 = 0.0;
  double B_start = 0.0;  // B range traversed, I phase from B_start to B_stop
  double B_stop = 0.0;
};

class AutoBuilder {
 public:
  AutoBuilder(const ModelParams& m, const PairChoice& pc, double La, double Lb)
      : m_(m), c_(m), pc_(pc), La_(La), Lb_(Lb) {
    a_ = invert_on_branch(c_, pc_.trough, La_);
    b_ = invert_on_branch(c_, pc_.trough, Lb_);
  }

  // Feasible r: R1 from the Gamma crossing on I, R2 from B <= 1.
  [[nodiscard]] std::pair<double, double> r_range() const {
    const double r1 = c_.Lambda(a_) / c_.Gamma(a_);
    const double r2 = c_.Lambda(b_) / c_.Gamma(b_);
    return {std::max(std::min(r1, r2), c_.Lambda(b_)), std::max(r1, r2)};
  }

  [[nodiscard]] Loop loop_for(double r, Window win = {0.25, 0.75}) const {
    auto phi = [&](double rho) { return c_.Gamma(rho) - c_.Lambda(rho) / r; };
    Loop lp;
    lp.rho_star = bisect(phi, a_, b_, 1e-14);
    const double L_star = c_.Lambda(lp.rho_star);
    lp.rho_star2 = invert_on_branch(c_, pc_.crest, L_star);
    const double B_star = L_star / r;
    if (std::abs(c_.Gamma(lp.rho_star2) - B_star) < 1e-9) {
      lp.degenerate = true;
      return lp;
    }
    const int sJ = sgn(B_star - c_.Gamma(lp.rho_star2));
    // Sign of B' on I just above B_star in B.
    const double dB = 1e-7 * (Lb_ - La_) / r;
    const int sI_above = sign_I(B_star + dB, r);
    // Move from B_star in the direction where I and J have opposite signs.
    const int dir = (sI_above == -sJ) ? 1 : -1;
    const double B_end = dir > 0 ? Lb_ / r : La_ / r;
    // Stop where either sign changes again.
    auto ok = [&](double B) {
      return sign_I(B, r) == -sJ && sign_J(B, r) == sJ;
    };
    double B_far = B_end;
    constexpr int kScan = 400;
    for (int i = 1; i <= kScan; ++i) {
      const double B = B_star + (B_end - B_star) * i / kScan;
      if (!ok(B)) {
        const double Bp = B_star + (B_end - B_star) * (i - 1) / kScan;
        auto f = [&](double x) { return ok(x) ? 1.0 : -1.0; };
        B_far = bisect(f, Bp, B, 1e-14);
        break;
      }
    }
    // The window (fractions of [B_star, B_far]) keeps the loop away from
    // folds and fixed points.
    const double B1 = B_star + win.from * (B_far - B_star);
    const double B2 = B_star + win.to * (B_far - B_star);
    // I phase runs in the direction of B' on I.
    const int sI = -sJ;
    lp.B_start = (sI < 0) == (B1 < B2) ? B2 : B1;
    lp.B_stop = (lp.B_start == B1) ? B2 : B1;
    return lp;
  }

  [[nodiscard]] AdmissibleWave build(double r, int n, Window win) const {
    const Loop lp = loop_for(r, win);
    AdmissibleWave w(m_);
    w.r = r;
    w.method = "auto";
    if (lp.degenerate) {
      throw NoResultError("degenerate crossing: only piecewise-constant waves at this r");
    }
    const double PI0 = invert_on_branch(c_, pc_.trough, r * lp.B_start);
    const double PI1 = invert_on_branch(c_, pc_.trough, r * lp.B_stop);
    const double PJ0 = invert_on_branch(c_, pc_.crest, r * lp.B_stop);
    const double PJ1 = invert_on_branch(c_, pc_.crest, r * lp.B_start);
    double mom_I = 0.0;
    double mom_J = 0.0;
    WaveSegment sI = segment_by_P(PI0, PI1, r, n, &mom_I);
    sI.branch = pc_.trough_index;
    WaveSegment sJ = segment_by_P(PJ0, PJ1, r, n, &mom_J);
    sJ.branch = pc_.crest_index;
    const double xi1 = sI.xi.back();
    for (double& x : sJ.xi) x += xi1;
    w.period = sJ.xi.back();
    if (!(w.period < 1e4)) throw NumericError("wave loop fails to close within the arc-length limit");
    w.jumps = {JumpPoint{0.0, PJ1, PI0}, JumpPoint{xi1, PI1, PJ0}};
    w.mass = (mom_I + mom_J) / w.period;
    w.segments = {std::move(sI), std::move(sJ)};
    return w;
  }

  [[nodiscard]] AdmissibleWave build_degenerate(double r, double target_mass) const {
    const Loop lp = loop_for(r);
    const double lo = lp.rho_star;
    const double hi = lp.rho_star2;
    const double theta = (target_mass - lo) / (hi - lo);
    if (!(theta > 0.0 && theta < 1.0)) throw NoResultError("degenerate wave cannot reach the target mass");
    AdmissibleWave w(m_);
    w.r = r;
    w.method = "auto";
    w.degenerate = true;
    w.period = m_.domain_length;
    const double xi1 = (1.0 - theta) * w.period;
    WaveSegment s0{pc_.trough_index, {0.0, xi1}, {lo, lo}, {0.0, 0.0}};
    WaveSegment s1{pc_.crest_index, {xi1, w.period}, {hi, hi}, {0.0, 0.0}};
    w.segments = {s0, s1};
    w.jumps = {JumpPoint{0.0, hi, lo}, JumpPoint{xi1, lo, hi}};
    w.mass = target_mass;
    return w;
  }

 private:
  int sign_I(double B, double r) const {
    return sgn(B - c_.Gamma(invert_on_branch(c_, pc_.trough, r * B)));
  }
  int sign_J(double B, double r) const {
    return sgn(B - c_.Gamma(invert_on_branch(c_, pc_.crest, r * B)));
  }

  // P is monotone on each phase, so xi(P) = int dP / P' on a uniform P grid.
  WaveSegment segment_by_P(double P0, double P1, double r, int n, double* moment) const {
    WaveSegment s;
    const double h = (P1 - P0) / (n - 1);
    double xi = 0.0;
    *moment = 0.0;
    for (int i = 0; i < n; ++i) {
      const double P = P0 + i * h;
      const double d = full_rhs_P(P, r, m_);
      if (i > 0) {
        // Simpson per interval for xi = int dP/P' and int P dxi = int P dP/P'.
        const double Pp = s.P.back();
        const double Pm = P - 0.5 * h;
        const double dm = full_rhs_P(Pm, r, m_);
        xi += h / 6.0 * (1.0 / s.dP.back() + 4.0 / dm + 1.0 / d);
        *moment += h / 6.0 * (Pp / s.dP.back() + 4.0 * Pm / dm + P / d);
      }
      s.xi.push_back(xi);
      s.P.push_back(P);
      s.dP.push_back(d);
    }
    s.P.back() = P1;
    return s;
  }

  const ModelParams& m_;
  Curves c_;
  PairChoice pc_;
  double La_;
  double Lb_;
  double a_ = 0.0;
  double b_ = 0.0;
};

}  // namespace

AdmissibleWave construct_wave_auto(const ModelParams& m, double target_mass) {
  if (!(target_mass > 0.0)) throw ParameterError("target mass must be positive");
  const Curves c(m);
  const BranchMap map = admissible_branches(m);
  const PairChoice pc = choose_pair(map, target_mass);
  double La = std::max(pc.crest.Lambda_lo, pc.trough.Lambda_lo);
  double Lb = std::min(pc.crest.Lambda_hi, pc.trough.Lambda_hi);
  const double pad = 1e-6 * (Lb - La);
  La += pad;
  Lb -= pad;
  const AutoBuilder builder(m, pc, La, Lb);
  const auto [r_lo, r_hi] = builder.r_range();
  if (!(r_hi > r_lo)) throw NoResultError("no admissible wave: feasible r range is empty");

  const double r_mid = 0.5 * (r_lo + r_hi);
  if (builder.loop_for(r_mid).degenerate) return builder.build_degenerate(r_mid, target_mass);

  constexpr int kNodes = 2001;
  constexpr int kScan = 48;
  const double span = r_hi - r_lo;
  std::vector<double> rs;
  for (int i = 0; i <= kScan; ++i) rs.push_back(r_lo + span * (0.01 + 0.98 * i / kScan));
  double lo_seen = std::numeric_limits<double>::infinity();
  double hi_seen = -std::numeric_limits<double>::infinity();

  // The middle of the B range first; the other windows shift time between
  // the two branches and so widen the reachable masses.
  constexpr std::array<Window, 5> kWindows{
      {{0.25, 0.75}, {0.1, 0.9}, {0.5, 0.97}, {0.03, 0.5}, {0.75, 0.99}}};
  for (const Window win : kWindows) {
    auto mass_at = [&](double r) {
      try {
        return builder.build(r, 401, win).mass;
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    std::vector<double> ms;
    for (double r : rs) {
      ms.push_back(mass_at(r));
      if (!std::isnan(ms.back())) {
        lo_seen = std::min(lo_seen, ms.back());
        hi_seen = std::max(hi_seen, ms.back());
      }
    }
    // Prefer the bracket closest to the midpoint.
    int best = -1;
    for (int i = 0; i < kScan; ++i) {
      const double m0 = ms[static_cast<std::size_t>(i)];
      const double m1 = ms[static_cast<std::size_t>(i + 1)];
      if (std::isnan(m0) || std::isnan(m1) || sgn(m0 - target_mass) == sgn(m1 - target_mass)) {
        continue;
      }
      if (best < 0 || std::abs(rs[static_cast<std::size_t>(i)] - r_mid) <
                          std::abs(rs[static_cast<std::size_t>(best)] - r_mid)) {
        best = i;
      }
    }
    if (best < 0) continue;
    auto f = [&](double r) { return builder.build(r, kNodes, win).mass - target_mass; };
    const double ra = rs[static_cast<std::size_t>(best)];
    const double rb = rs[static_cast<std::size_t>(best + 1)];
    const double r_star = illinois(f, ra, rb, f(ra), f(rb), 1e-15, 1e-10 * target_mass);
    return builder.build(r_star, kNodes, win);
  }
  std::ostringstream os;
  os << "no admissible wave reaches mass " << target_mass;
  if (lo_seen <= hi_seen) os << " (reachable range " << lo_seen << " to " << hi_seen << ")";
  throw NoResultError(os.str());
}

AdmissibleWave construct_admissible_wave(const ModelParams& m, double target_mass,
                                         std::optional<SwitchPoints> sp) {
  if (!sp) return construct_wave_auto(m, target_mass);
  const bool closed = std::holds_alternative<PiecewiseLinearStepRate>(m.lambda.shape()) &&
                      std::holds_alternative<ConstantRate>(m.gamma.shape());
  return closed ? construct_wave_closed_form(m, target_mass, *sp)
                : construct_wave_shooting(m, target_mass, *sp);
}

}  // namespace ripple
