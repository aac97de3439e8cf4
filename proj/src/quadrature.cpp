#include "specedge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "specedge/errors.hpp"

namespace specedge {

namespace {

// 15-point Kronrod nodes on [0,1] side of [-1,1] (symmetric), with the
// embedded 7-point Gauss rule on the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0000000000000000,
};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
};

struct Segment {
  double a, b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment evaluate(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double lo = f(c - h * kXgk[i]);
    const double hi = f(c + h * kXgk[i]);
    kron += kWgk[i] * (lo + hi);
    if (i % 2 == 1) gauss += kWg[i / 2] * (lo + hi);
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = kron * h;
  // |K15 - G7| is a deliberately pessimistic estimate of the Kronrod error;
  // it just makes the refinement split a little deeper than strictly needed.
  s.error = std::abs(kron - gauss) * std::abs(h);
  return s;
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_intervals) {
  if (!(a < b)) throw ConfigError("integrate_gk: empty or reversed interval");
  std::priority_queue<Segment> queue;
  queue.push(evaluate(f, a, b));
  double total = queue.top().value;
  double err = queue.top().error;
  int used = 1;
  while (used < max_intervals) {
    const double target = std::max(abs_tol, rel_tol * std::abs(total));
    if (err <= target) break;
    Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // interval no longer splittable in double precision
      queue.push(worst);
      break;
    }
    Segment left = evaluate(f, worst.a, mid);
    Segment right = evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++used;
  }
  QuadResult r;
  r.value = total;
  r.abs_error = err;
  r.intervals = used;
  r.converged = err <= std::max(abs_tol, rel_tol * std::abs(total));
  return r;
}

}  // namespace specedge
