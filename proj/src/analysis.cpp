#include "ripplewave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ripplewave/errors.hpp"

namespace ripple {
namespace {

constexpr double kGuard = 1e-12;

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

double finite_mean(const std::vector<double>& f) {
  double s = 0.0;
  int k = 0;
  for (double x : f) {
    if (std::isfinite(x)) {
      s += x;
      ++k;
    }
  }
  return k ? s / k : 0.0;
}

// Circular correlation sum_i b[i] a[i - s] over cells where both are finite.
double correlation(const std::vector<double>& a, const std::vector<double>& b, std::ptrdiff_t s) {
  const std::size_t n = a.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a[wrap(static_cast<std::ptrdiff_t>(i) - s, n)];
    const double y = b[i];
    if (std::isfinite(x) && std::isfinite(y)) acc += x * y;
  }
  return acc;
}

// Signed sub-cell shift taking a to b.
double best_shift(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<double> c(n);
  for (std::size_t s = 0; s < n; ++s) c[s] = correlation(a, b, static_cast<std::ptrdiff_t>(s));
  const auto k = static_cast<std::ptrdiff_t>(std::max_element(c.begin(), c.end()) - c.begin());
  const double cm = c[wrap(k - 1, n)];
  const double c0 = c[static_cast<std::size_t>(k)];
  const double cp = c[wrap(k + 1, n)];
  const double denom = cm - 2.0 * c0 + cp;
  const double delta = denom < 0.0 ? 0.5 * (cm - cp) / denom : 0.0;
  double s = static_cast<double>(k) + delta;
  const double half = 0.5 * static_cast<double>(n);
  if (s > half) s -= static_cast<double>(n);
  return s;
}

}  // namespace

const char* to_string(FieldKind f) {
  switch (f) {
    case FieldKind::u: return "u";
    case FieldKind::v: return "v";
    case FieldKind::u1: return "u1";
    case FieldKind::v1: return "v1";
    case FieldKind::u1_over_u: return "u1_over_u";
    case FieldKind::v1_over_v: return "v1_over_v";
  }
  return "unknown";
}

FieldKind field_from_string(const std::string& s) {
  for (FieldKind f : {FieldKind::u, FieldKind::v, FieldKind::u1, FieldKind::v1, FieldKind::u1_over_u,
                      FieldKind::v1_over_v}) {
    if (s == to_string(f)) return f;
  }
  throw ParameterError("unknown field '" + s + "' (u, v, u1, v1, u1_over_u, v1_over_v)");
}

std::vector<double> extract_field(const FieldState& s, FieldKind f) {
  const bool needs_memory = f != FieldKind::u && f != FieldKind::v;
  if (needs_memory && s.system != SystemKind::full) {
    // Memory-free: every individual is reversible.
    if (f == FieldKind::u1) return s.u;
    if (f == FieldKind::v1) return s.v;
    return std::vector<double>(s.u.size(), 1.0);
  }
  switch (f) {
    case FieldKind::u: return s.u;
    case FieldKind::v: return s.v;
    case FieldKind::u1: return s.u1;
    case FieldKind::v1: return s.v1;
    case FieldKind::u1_over_u:
    case FieldKind::v1_over_v: {
      const auto& num = f == FieldKind::u1_over_u ? s.u1 : s.v1;
      const auto& den = f == FieldKind::u1_over_u ? s.u : s.v;
      std::vector<double> out(den.size());
      for (std::size_t i = 0; i < den.size(); ++i) {
        out[i] = den[i] < kGuard ? std::numeric_limits<double>::quiet_NaN() : num[i] / den[i];
      }
      return out;
    }
  }
  return {};
}

WaveMeasurement measure_wave_speed(const std::vector<FieldState>& snapshots, FieldKind field,
                                   const Grid& g) {
  std::vector<std::vector<double>> fields;
  std::vector<double> times;
  for (const auto& s : snapshots) {
    fields.push_back(extract_field(s, field));
    times.push_back(s.t);
  }
  return measure_wave_speed(fields, times, g);
}

WaveMeasurement measure_wave_speed(const std::vector<std::vector<double>>& fields,
                                   const std::vector<double>& times, const Grid& g) {
  if (fields.size() < 10 || fields.size() != times.size()) {
    throw UsageError("speed measurement needs at least 10 snapshots with times");
  }
  const std::size_t n = fields.front().size();
  for (const auto& f : fields) {
    if (f.size() != n || static_cast<int>(n) != g.n_cells) {
      throw UsageError("snapshot size does not match the grid");
    }
  }
  WaveMeasurement w;
  w.dx = g.dx();
  w.times = times;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& f : fields) {
    for (double x : f) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  w.range = hi - lo;
  if (!(w.range > 1e-12 * std::max(1.0, std::abs(hi)))) {
    // Constant field: every lag correlates equally.
    w.profile = fields.front();
    w.shifts.assign(fields.size(), 0.0);
    return w;
  }

  std::vector<std::vector<double>> centered;
  for (const auto& f : fields) {
    const double mu = finite_mean(f);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = f[i] - mu;
    centered.push_back(std::move(c));
  }

  const std::size_t K = fields.size();
  std::vector<double> pair_cells(K - 1);
  w.shifts.assign(K, 0.0);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    pair_cells[k] = best_shift(centered[k], centered[k + 1]);
    w.shifts[k + 1] = w.shifts[k] + pair_cells[k] * w.dx;
  }

  // Least-squares slope of cumulative shift against time.
  const double tm = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(K);
  const double xm = std::accumulate(w.shifts.begin(), w.shifts.end(), 0.0) / static_cast<double>(K);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    sxy += (times[k] - tm) * (w.shifts[k] - xm);
    sxx += (times[k] - tm) * (times[k] - tm);
  }
  if (!(sxx > 0.0)) throw UsageError("snapshot times must not all coincide");
  w.speed = sxy / sxx;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double pair_speed = pair_cells[k] * w.dx / (times[k + 1] - times[k]);
    w.speed_ci = std::max(w.speed_ci, std::abs(pair_speed - w.speed));
  }

  // Align on whole cells and measure the spread around the comoving mean.
  std::vector<std::vector<double>> aligned(K, std::vector<double>(n));
  for (std::size_t k = 0; k < K; ++k) {
    const auto m = static_cast<std::ptrdiff_t>(std::llround(w.shifts[k] / w.dx));
    for (std::size_t i = 0; i < n; ++i) {
      aligned[k][i] = fields[k][wrap(static_cast<std::ptrdiff_t>(i) + m, n)];
    }
  }
  w.profile.assign(n, 0.0);
  std::vector<int> counts(n, 0);
  for (const auto& a : aligned) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isfinite(a[i])) {
        w.profile[i] += a[i];
        ++counts[i];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    w.profile[i] = counts[i] ? w.profile[i] / counts[i] : std::numeric_limits<double>::quiet_NaN();
  }
  double ss = 0.0;
  long cnt = 0;
  for (const auto& a : aligned) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(a[i]) || !std::isfinite(w.profile[i])) continue;
      ss += (a[i] - w.profile[i]) * (a[i] - w.profile[i]);
      ++cnt;
    }
  }
  w.comoving_rms = cnt ? std::sqrt(ss / static_cast<double>(cnt)) / w.range : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = aligned.back()[i] - aligned.front()[i];
    if (std::isfinite(d)) w.periodicity_error = std::max(w.periodicity_error, std::abs(d) / w.range);
  }
  w.is_traveling = w.comoving_rms < 0.01;
  return w;
}

ComparisonReport compare_profiles(const AdmissibleWave& wave, const std::vector<double>& measured,
                                  double length, int exclude_cells) {
  const std::size_t n = measured.size();
  if (n < 16) throw UsageError("measured profile needs at least 16 cells");
  if (!(wave.period > 0.0)) throw UsageError("constructed wave has no period");
  const double copies = std::round(length / wave.period);
  if (copies < 1.0 || std::abs(copies * wave.period - length) > 0.05 * length) {
    throw UsageError("period mismatch: domain is not a whole number of constructed periods");
  }
  // Rescale the constructed wave onto the domain so periods match exactly.
  const double stretch = wave.period * copies / length;
  const double dx = length / static_cast<double>(n);

  constexpr int kSub = 16;
  std::vector<double> fine(n * kSub);
  for (std::size_t k = 0; k < fine.size(); ++k) {
    fine[k] = wave.P_at((static_cast<double>(k) + 0.5) / kSub * dx * stretch);
  }
  auto model_cell = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (int q = 0; q < kSub; ++q) s += fine[(i * kSub + j * kSub + static_cast<std::size_t>(q)) % fine.size()];
    return s / kSub;
  };
  // Model coordinate of measured cell i under shift (j + frac) cells. The
  // wrapped index keeps circular rolls of the data bitwise equivalent.
  auto model_pos = [&](std::size_t i, std::size_t j, double frac, double offset) {
    return (static_cast<double>((i + j) % n) + frac + offset) * dx;
  };
  auto model_cell_at = [&](std::size_t i, std::size_t j, double frac) {
    double s = 0.0;
    for (int q = 0; q < kSub; ++q) s += wave.P_at(model_pos(i, j, frac, (q + 0.5) / kSub) * stretch);
    return s / kSub;
  };

  // Constructed jump positions in model coordinates.
  std::vector<double> jump_x;
  for (int c = 0; c < static_cast<int>(copies); ++c) {
    for (const auto& j : wave.jumps) jump_x.push_back(j.xi / stretch + c * length / copies);
  }
  auto excluded = [&](std::size_t i, std::size_t j, double frac) {
    const double x = model_pos(i, j, frac, 0.5);
    for (double xj : jump_x) {
      double d = std::fmod(std::abs(x - xj), length);
      d = std::min(d, length - d);
      if (d < (exclude_cells + 0.5) * dx) return true;
    }
    return false;
  };

  auto l1_for = [&](auto&& cell_value, std::size_t j, double frac) {
    double s = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(measured[i]) || excluded(i, j, frac)) continue;
      s += std::abs(measured[i] - cell_value(i));
      ++k;
    }
    return k ? s / k : std::numeric_limits<double>::infinity();
  };

  std::vector<double> l1(n);
  for (std::size_t j = 0; j < n; ++j) {
    l1[j] = l1_for([&](std::size_t i) { return model_cell(i, j); }, j, 0.0);
  }
  const auto jb = static_cast<std::size_t>(std::min_element(l1.begin(), l1.end()) - l1.begin());
  double best_frac = 0.0;
  double best = l1[jb];
  {
    const auto sj = static_cast<std::ptrdiff_t>(jb);
    const double fm = l1[wrap(sj - 1, n)];
    const double f0 = best;
    const double fp = l1[wrap(sj + 1, n)];
    const double denom = fm - 2.0 * f0 + fp;
    if (denom > 0.0) {
      const double delta = 0.5 * (fm - fp) / denom;
      const double e = l1_for([&](std::size_t i) { return model_cell_at(i, jb, delta); }, jb, delta);
      if (e < best) {
        best = e;
        best_frac = delta;
      }
    }
  }
  const double best_shift = (static_cast<double>(jb) + best_frac) * dx;

  ComparisonReport rep;
  rep.optimal_shift = std::fmod(best_shift * stretch, wave.period);
  double pmin = std::numeric_limits<double>::infinity();
  double pmax = -pmin;
  for (double p : fine) {
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  for (const auto& seg : wave.segments) {
    for (double p : seg.P) {
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
  }
  rep.amplitude = pmax - pmin;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(measured[i]) || excluded(i, jb, best_frac)) continue;
    const double d = std::abs(measured[i] - model_cell_at(i, jb, best_frac));
    s += d;
    rep.linf_error = std::max(rep.linf_error, d);
    ++rep.compared_cells;
  }
  rep.l1_error = rep.compared_cells ? s / rep.compared_cells : 0.0;
  rep.relative_l1 = rep.amplitude > 0.0 ? rep.l1_error / rep.amplitude : 0.0;

  // Pair every constructed jump with the steepest measured step nearby.
  const auto window = static_cast<std::ptrdiff_t>(std::max<std::size_t>(5, n / 50));
  for (double xj : jump_x) {
    double x = std::fmod(xj - best_shift, length);
    if (x < 0.0) x += length;
    const auto c = static_cast<std::ptrdiff_t>(std::floor(x / dx));
    double steep = -1.0;
    double where = x;
    for (std::ptrdiff_t k = c - window; k <= c + window; ++k) {
      const double a = measured[wrap(k, n)];
      const double b = measured[wrap(k + 1, n)];
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      if (std::abs(b - a) > steep) {
        steep = std::abs(b - a);
        where = std::fmod(static_cast<double>(k + 1) * dx + length, length);
      }
    }
    rep.jump_alignment.emplace_back(x, where);
  }
  return rep;
}

PlateauFit plateau_levels(const std::vector<double>& field, int max_levels) {
  if (max_levels < 1) throw ParameterError("need at least one plateau level");
  std::vector<double> xs;
  for (double x : field) {
    if (std::isfinite(x)) xs.push_back(x);
  }
  if (xs.empty()) throw UsageError("field has no finite values");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  PlateauFit fit;
  fit.range = *mx - *mn;
  if (!(fit.range > 0.0)) {
    fit.levels = {*mn};
    return fit;
  }
  constexpr int kBins = 200;  // 0.5% of the range each
  const double lo = *mn;
  const double width = fit.range / kBins;
  auto bin_of = [&](double x) { return std::min(kBins - 1, static_cast<int>((x - lo) / width)); };
  std::vector<int> hist(kBins, 0);
  for (double x : xs) ++hist[static_cast<std::size_t>(bin_of(x))];

  std::vector<int> modes;
  for (int b = 0; b < kBins; ++b) {
    const int left = b > 0 ? hist[static_cast<std::size_t>(b - 1)] : -1;
    const int right = b + 1 < kBins ? hist[static_cast<std::size_t>(b + 1)] : -1;
    const int h = hist[static_cast<std::size_t>(b)];
    if (h > 0 && h >= left && h > right) modes.push_back(b);
  }
  std::stable_sort(modes.begin(), modes.end(), [&](int a, int b) {
    return hist[static_cast<std::size_t>(a)] > hist[static_cast<std::size_t>(b)];
  });
  if (static_cast<int>(modes.size()) > max_levels) modes.resize(static_cast<std::size_t>(max_levels));
  for (int b : modes) {
    double s = 0.0;
    int k = 0;
    for (double x : xs) {
      if (std::abs(bin_of(x) - b) <= 1) {
        s += x;
        ++k;
      }
    }
    fit.levels.push_back(s / k);
  }
  std::sort(fit.levels.begin(), fit.levels.end());
  double ss = 0.0;
  for (double x : xs) {
    double d = std::numeric_limits<double>::infinity();
    for (double l : fit.levels) d = std::min(d, std::abs(x - l));
    ss += d * d;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(xs.size()));
  fit.relative_residual = fit.rms_residual / fit.range;
  return fit;
}

SwitchEstimate estimate_switch_points(const std::vector<double>& profile, double length) {
  const std::size_t n = profile.size();
  if (n < 4) throw UsageError("profile too short");
  const double dx = length / static_cast<double>(n);
  std::size_t up = 0;
  std::size_t down = 0;
  double dmax = -std::numeric_limits<double>::infinity();
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = profile[(i + 1) % n] - profile[i];
    if (d > dmax) {
      dmax = d;
      up = i;
    }
    if (d < dmin) {
      dmin = d;
      down = i;
    }
  }
  SwitchEstimate e;
  e.up_jump = static_cast<double>(up + 1) * dx;
  e.down_jump = static_cast<double>(down + 1) * dx;
  e.crest_length = std::fmod(e.down_jump - e.up_jump + length, length);
  return e;
}

}  // namespace ripple
