#include "ripplewave/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ripplewave/errors.hpp"

namespace ripple {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

using rate_detail::logistic;

double ramp_derivative(const Ramp& r, double rho) {
  if (rho < r.center - r.half_width || rho >= r.center + r.half_width) return 0.0;
  return r.rise / (2.0 * r.half_width);
}

// Antiderivative of the ramp on the whole line, continuous, zero left of the ramp.
double ramp_primitive(const Ramp& r, double u) {
  const double a = r.center - r.half_width;
  const double b = r.center + r.half_width;
  if (u < a) return 0.0;
  if (u < b) return r.rise / (4.0 * r.half_width) * (u - a) * (u - a);
  return r.rise * r.half_width + r.rise * (u - b);
}

double ramp_integral(const Ramp& r, double rho) { return ramp_primitive(r, rho) - ramp_primitive(r, 0.0); }

// One piece c0 + c2 (rho - anchor)^2 on [begin, end).
struct QuadPiece {
  double begin;
  double end;
  double anchor;
  double c0;
  double c2;
};

std::array<QuadPiece, 7> double_sigmoid_pieces(const DoubleSigmoidRate& s) {
  const double d2 = 2.0 * s.delta * s.delta;
  const double k_lo = (s.lam_mid - s.lam_lo) / d2;
  const double k_hi = (s.lam_hi - s.lam_mid) / d2;
  const double rl = s.rho_lo;
  const double rh = s.rho_hi;
  const double d = s.delta;
  return {{
      {-kInf, rl - d, 0.0, s.lam_lo, 0.0},
      {rl - d, rl, rl - d, s.lam_lo, k_lo},
      {rl, rl + d, rl + d, s.lam_mid, -k_lo},
      {rl + d, rh - d, 0.0, s.lam_mid, 0.0},
      {rh - d, rh, rh - d, s.lam_mid, k_hi},
      {rh, rh + d, rh + d, s.lam_hi, -k_hi},
      {rh + d, kInf, 0.0, s.lam_hi, 0.0},
  }};
}

const QuadPiece& find_piece(const std::array<QuadPiece, 7>& pieces, double rho) {
  for (const auto& p : pieces) {
    if (rho < p.end) return p;
  }
  return pieces.back();
}

double piece_integral(const QuadPiece& p, double from, double to) {
  const double a = from - p.anchor;
  const double b = to - p.anchor;
  return p.c0 * (to - from) + p.c2 * (b * b * b - a * a * a) / 3.0;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError("invalid rate function: " + what);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double validate(const RateShape& shape) {
  return std::visit(
      Overloaded{
          [](const ConstantRate& s) {
            require(finite_all({s.c}), "non-finite parameter");
            require(s.c > 0.0, "constant must be positive");
            return s.c;
          },
          [](const LinearRate& s) {
            require(finite_all({s.a, s.b}), "non-finite parameter");
            require(s.a > 0.0, "linear intercept must be positive");
            require(s.b >= 0.0, "linear slope must be non-negative to stay positive");
            return s.a;
          },
          [](const QuadraticRate& s) {
            require(finite_all({s.a, s.b, s.c}), "non-finite parameter");
            require(s.c >= 0.0, "quadratic leading coefficient must be non-negative");
            require(s.c > 0.0 || s.b >= 0.0, "quadratic with c == 0 needs b >= 0");
            double lo = s.a;
            if (s.c > 0.0 && s.b < 0.0) lo = s.a - s.b * s.b / (4.0 * s.c);
            require(lo > 0.0, "quadratic must be positive on [0, inf)");
            return lo;
          },
          [](const SigmoidExpRate& s) {
            require(finite_all({s.lam_lo, s.lam_hi, s.alpha, s.center}), "non-finite parameter");
            require(s.lam_lo > 0.0, "lam_lo must be positive");
            require(s.lam_hi >= s.lam_lo, "lam_hi must be >= lam_lo");
            require(s.alpha > 0.0, "alpha must be positive");
            return s.lam_lo;
          },
          [](const SigmoidRationalRate& s) {
            require(finite_all({s.lam_lo, s.lam_hi, s.alpha}), "non-finite parameter");
            require(s.lam_lo > 0.0, "lam_lo must be positive");
            require(s.lam_hi >= s.lam_lo, "lam_hi must be >= lam_lo");
            require(s.alpha > 0.0, "alpha must be positive");
            return s.lam_lo;
          },
          [](const PiecewiseLinearStepRate& s) {
            require(finite_all({s.lam_lo, s.lam_hi, s.eps, s.center}), "non-finite parameter");
            require(s.lam_lo > 0.0, "lam_lo must be positive");
            require(s.lam_hi >= s.lam_lo, "lam_hi must be >= lam_lo");
            require(s.eps > 0.0, "eps must be positive");
            return s.lam_lo;
          },
          [](const DoubleSigmoidRate& s) {
            require(finite_all({s.lam_lo, s.lam_mid, s.lam_hi, s.rho_lo, s.rho_hi, s.delta}),
                    "non-finite parameter");
            require(s.lam_lo > 0.0, "lam_lo must be positive");
            require(s.lam_lo < s.lam_mid && s.lam_mid < s.lam_hi, "need lam_lo < lam_mid < lam_hi");
            require(0.0 < s.rho_lo && s.rho_lo < s.rho_hi, "need 0 < rho_lo < rho_hi");
            require(s.delta > 0.0 && s.delta < std::min(s.rho_lo, (s.rho_hi - s.rho_lo) / 2.0),
                    "need 0 < delta < min(rho_lo, (rho_hi - rho_lo)/2)");
            return s.lam_lo;
          },
          [](const TripleStepRate& s) {
            require(finite_all({s.lam_lo}), "non-finite parameter");
            require(s.lam_lo > 0.0, "lam_lo must be positive");
            for (const auto& r : s.ramps) {
              require(finite_all({r.center, r.half_width, r.rise}), "non-finite ramp parameter");
              require(r.half_width > 0.0, "ramp half_width must be positive");
              require(r.rise >= 0.0, "ramp rise must be non-negative");
            }
            return s.lam_lo;
          },
      },
      shape);
}

}  // namespace

std::string_view to_string(RateKind kind) {
  switch (kind) {
    case RateKind::constant: return "constant";
    case RateKind::linear: return "linear";
    case RateKind::quadratic: return "quadratic";
    case RateKind::sigmoid_exp: return "sigmoid_exp";
    case RateKind::sigmoid_rational: return "sigmoid_rational";
    case RateKind::piecewise_linear_step: return "piecewise_linear_step";
    case RateKind::double_sigmoid: return "double_sigmoid";
    case RateKind::triple_step: return "triple_step";
  }
  return "unknown";
}

RateKind rate_kind_from_string(std::string_view name) {
  for (auto k : {RateKind::constant, RateKind::linear, RateKind::quadratic, RateKind::sigmoid_exp,
                 RateKind::sigmoid_rational, RateKind::piecewise_linear_step,
                 RateKind::double_sigmoid, RateKind::triple_step}) {
    if (to_string(k) == name) return k;
  }
  throw ParameterError("unknown rate function kind '" + std::string(name) + "'");
}

RateFunction::RateFunction(RateShape shape) : shape_(shape), lower_bound_(validate(shape_)) {}

RateKind RateFunction::kind() const { return static_cast<RateKind>(shape_.index()); }

double RateFunction::value(double rho) const {
  return std::visit([rho](const auto& s) { return value_of(s, rho); }, shape_);
}

double RateFunction::derivative(double rho) const {
  return std::visit(
      Overloaded{
          [](const ConstantRate&) { return 0.0; },
          [](const LinearRate& s) { return s.b; },
          [rho](const QuadraticRate& s) { return s.b + 2.0 * s.c * rho; },
          [rho](const SigmoidExpRate& s) {
            const double sig = logistic(s.alpha * (rho - s.center));
            return (s.lam_hi - s.lam_lo) * s.alpha * sig * (1.0 - sig);
          },
          [rho](const SigmoidRationalRate& s) {
            const double den = 1.0 + s.alpha * rho * rho;
            return (s.lam_hi - s.lam_lo) * 2.0 * s.alpha * rho / (den * den);
          },
          [rho](const PiecewiseLinearStepRate& s) {
            return ramp_derivative(Ramp{s.center, s.eps, s.lam_hi - s.lam_lo}, rho);
          },
          [rho](const DoubleSigmoidRate& s) {
            const auto pieces = double_sigmoid_pieces(s);
            const auto& p = find_piece(pieces, rho);
            return 2.0 * p.c2 * (rho - p.anchor);
          },
          [rho](const TripleStepRate& s) {
            double d = 0.0;
            for (const auto& r : s.ramps) d += ramp_derivative(r, rho);
            return d;
          },
      },
      shape_);
}

RateValue RateFunction::eval(double rho) const { return {value(rho), derivative(rho)}; }

double RateFunction::integral(double rho) const {
  return std::visit(
      Overloaded{
          [rho](const ConstantRate& s) { return s.c * rho; },
          [rho](const LinearRate& s) { return rho * (s.a + 0.5 * s.b * rho); },
          [rho](const QuadraticRate& s) {
            return rho * (s.a + rho * (s.b / 2.0 + rho * s.c / 3.0));
          },
          [rho](const SigmoidExpRate& s) {
            const double span = s.lam_hi - s.lam_lo;
            return s.lam_lo * rho +
                   span / s.alpha *
                       (softplus(s.alpha * (rho - s.center)) - softplus(-s.alpha * s.center));
          },
          [rho](const SigmoidRationalRate& s) {
            const double root = std::sqrt(s.alpha);
            return s.lam_hi * rho - (s.lam_hi - s.lam_lo) * std::atan(root * rho) / root;
          },
          [rho](const PiecewiseLinearStepRate& s) {
            return s.lam_lo * rho + ramp_integral(Ramp{s.center, s.eps, s.lam_hi - s.lam_lo}, rho);
          },
          [rho](const DoubleSigmoidRate& s) {
            double total = 0.0;
            for (const auto& p : double_sigmoid_pieces(s)) {
              const double from = std::max(p.begin, 0.0);
              const double to = std::min(p.end, rho);
              if (to > from) total += piece_integral(p, from, to);
            }
            return total;
          },
          [rho](const TripleStepRate& s) {
            double total = s.lam_lo * rho;
            for (const auto& r : s.ramps) total += ramp_integral(r, rho);
            return total;
          },
      },
      shape_);
}

double RateFunction::lower_bound() const { return lower_bound_; }

double RateFunction::upper_bound() const {
  return std::visit(
      Overloaded{
          [](const ConstantRate& s) { return s.c; },
          [](const LinearRate& s) { return s.b > 0.0 ? kInf : s.a; },
          [](const QuadraticRate& s) { return (s.c > 0.0 || s.b > 0.0) ? kInf : s.a; },
          [](const SigmoidExpRate& s) { return s.lam_hi; },
          [](const SigmoidRationalRate& s) { return s.lam_hi; },
          [](const PiecewiseLinearStepRate& s) { return s.lam_hi; },
          [](const DoubleSigmoidRate& s) { return s.lam_hi; },
          [](const TripleStepRate& s) {
            double v = s.lam_lo;
            for (const auto& r : s.ramps) v += r.rise;
            return v;
          },
      },
      shape_);
}

std::vector<double> RateFunction::kinks() const {
  return std::visit(
      Overloaded{
          [](const PiecewiseLinearStepRate& s) {
            return std::vector<double>{s.center - s.eps, s.center + s.eps};
          },
          [](const TripleStepRate& s) {
            std::vector<double> k;
            for (const auto& r : s.ramps) {
              k.push_back(r.center - r.half_width);
              k.push_back(r.center + r.half_width);
            }
            std::sort(k.begin(), k.end());
            return k;
          },
          [](const auto&) { return std::vector<double>{}; },
      },
      shape_);
}

RateFunction RateFunction::rescaled(double time_scale, double density_scale) const {
  if (!(time_scale > 0.0) || !(density_scale > 0.0)) {
    throw ParameterError("rescaling factors must be positive");
  }
  const double ts = time_scale;
  const double ds = density_scale;
  return RateFunction(std::visit(
      Overloaded{
          [&](const ConstantRate& s) -> RateShape { return ConstantRate{ts * s.c}; },
          [&](const LinearRate& s) -> RateShape { return LinearRate{ts * s.a, ts * s.b * ds}; },
          [&](const QuadraticRate& s) -> RateShape {
            return QuadraticRate{ts * s.a, ts * s.b * ds, ts * s.c * ds * ds};
          },
          [&](const SigmoidExpRate& s) -> RateShape {
            return SigmoidExpRate{ts * s.lam_lo, ts * s.lam_hi, s.alpha * ds, s.center / ds};
          },
          [&](const SigmoidRationalRate& s) -> RateShape {
            return SigmoidRationalRate{ts * s.lam_lo, ts * s.lam_hi, s.alpha * ds * ds};
          },
          [&](const PiecewiseLinearStepRate& s) -> RateShape {
            return PiecewiseLinearStepRate{ts * s.lam_lo, ts * s.lam_hi, s.eps / ds, s.center / ds};
          },
          [&](const DoubleSigmoidRate& s) -> RateShape {
            return DoubleSigmoidRate{ts * s.lam_lo,  ts * s.lam_mid,  ts * s.lam_hi,
                                     s.rho_lo / ds, s.rho_hi / ds, s.delta / ds};
          },
          [&](const TripleStepRate& s) -> RateShape {
            TripleStepRate out{ts * s.lam_lo, s.ramps};
            for (auto& r : out.ramps) {
              r.center /= ds;
              r.half_width /= ds;
              r.rise *= ts;
            }
            return out;
          },
      },
      shape_));
}

}  // namespace ripple
