#include "specedge/edge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specedge/errors.hpp"
#include "specedge/numeric.hpp"

namespace specedge {

namespace {

double threshold(const CoefficientModel& model, long long n) {
  const auto [a, b] = eval_jacobi(model, n);
  return b + 2.0 * a;
}

}  // namespace

long long turning_point(const CoefficientModel& model, double x) {
  if (!(x < 2.0)) throw DomainError("turning point undefined for x >= 2");
  if (tail_class(model).which_case == TailCase::both_constant)
    throw ModelError("unsupported model: coefficients eventually constant, turning set unbounded");

  // Exhaustive scan over early and override indices, monotone search beyond.
  const long long scan_end = std::max(model.n0_monotone, model.max_override + 1);
  long long best = -1;
  for (long long n = 1; n <= scan_end; ++n)
    if (threshold(model, n) <= x) best = n;

  if (best == scan_end) {
    long long lo = scan_end;      // threshold(lo) <= x
    long long hi = 2 * scan_end;  // grows until threshold(hi) > x
    while (threshold(model, hi) <= x) {
      lo = hi;
      if (hi > (1LL << 61)) throw NumericError("turning point exceeds the search range");
      hi *= 2;
    }
    while (hi - lo > 1) {
      const long long mid = lo + (hi - lo) / 2;
      if (threshold(model, mid) <= x)
        lo = mid;
      else
        hi = mid;
    }
    best = lo;
  }
  if (best < 0)
    throw DomainError("x = " + std::to_string(x) + " lies below the turning threshold b_n + 2 a_n");
  return best;
}

double gamma_n(const CoefficientModel& model, double x, long long n) {
  const auto [a, b] = eval_jacobi(model, n);
  const double t = (x - b - 2.0 * a) / (2.0 * a);
  if (t < 0.0) {
    std::string msg = "arccosh argument below 1 at n = " + std::to_string(n);
    try {
      msg += " (turning point N = " + std::to_string(turning_point(model, x)) + ")";
    } catch (const Error&) {
    }
    throw DomainError(msg);
  }
  return arccosh1p(t);
}

EdgeData edge_data(const CoefficientModel& model, double x, std::size_t store_cap) {
  EdgeData ed;
  ed.x = x;
  ed.N = turning_point(model, x);
  ed.kappa_inf = std::acos(x / 2.0);

  const long long n0 = model.n0_monotone;
  if (ed.N >= n0)
    ed.gammas.reserve(static_cast<std::size_t>(
        std::min<long long>(ed.N - n0 + 1, static_cast<long long>(store_cap))));
  KahanSum g;
  for (long long n = n0; n <= ed.N; ++n) {
    const double gam = gamma_n(model, x, n);
    g.add(gam);
    if (ed.gammas.size() < store_cap) ed.gammas.push_back(gam);
  }
  ed.g = g.value();

  const auto [a1, b1] = eval_jacobi(model, ed.N + 1);
  const auto [a2, b2] = eval_jacobi(model, ed.N + 2);
  const double incr = (b2 - b1) + (a2 - a1);
  if (!(incr > 0.0))
    throw ModelError("coefficient increment past the turning point is not positive");
  ed.h = std::log(static_cast<double>(ed.N)) - std::log(incr) + 0.5 * std::log(2.0 - x);

  const double c = (x - b2) / (2.0 * a2);
  if (c <= -1.0) throw DomainError("kappa undefined past the turning point (cos argument <= -1)");
  ed.kappa_next = std::acos(c);
  return ed;
}

double big_gamma(const CoefficientModel& model, long long n) {
  const auto [a, b] = eval_jacobi(model, n);
  const double t = (2.0 - b - 2.0 * a) / (2.0 * a);
  if (t < 0.0)
    throw DomainError("arccosh argument below 1 at n = " + std::to_string(n) +
                      " (needs a_n <= 1 and b_n <= 0)");
  return arccosh1p(t);
}

double q_sup(double y) {
  constexpr double kHalfPi = 1.5707963267948966;
  if (!(y > 0.0) || !(y < kHalfPi)) throw DomainError("q(y) needs y in (0, pi/2)");
  if (y < 1e-3) return (2.0 / 3.0) * y + (14.0 / 45.0) * y * y * y;

  const auto obj = [](double t) { return 2.0 / std::sin(2.0 * t) - 1.0 / t; };

  // Dense scan; the objective is smooth and single-peaked on (0, y].
  constexpr int kSamples = 10000;
  double best_t = y;
  double best = obj(y);
  for (int i = 1; i < kSamples; ++i) {
    const double t = y * static_cast<double>(i) / kSamples;
    const double v = obj(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }

  // Golden-section refinement around the best sample.
  const double step = y / kSamples;
  double lo = std::max(best_t - step, 0.5 * step);
  double hi = std::min(best_t + step, y);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  while (hi - lo > 1e-14) {
    if (obj(c) > obj(d))
      hi = d;
    else
      lo = c;
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  return std::max(best, obj(0.5 * (lo + hi)));
}

BandPrediction band_prediction(const CoefficientModel& model, double x) {
  const EdgeData ed = edge_data(model, x, 0);
  return {-2.0 * ed.g, 2.0 * ed.h};
}

}  // namespace specedge
