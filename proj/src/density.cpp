#include "specedge/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specedge/edge.hpp"
#include "specedge/errors.hpp"
#include "specedge/numeric.hpp"

namespace specedge {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kLogPi = 1.1447298858494002;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

long long default_n_max(const CoefficientModel& model, double x) {
  long long N = 0;
  try {
    N = turning_point(model, x);
  } catch (const Error&) {
    N = 0;  // no turning point (constant model or x too low): depth floor only
  }
  return std::max<long long>(2 * N + 4, 1024);
}

/// Tail closure m_hat = m_free((z - b_t)/a_t) / a_t with the coefficients
/// frozen at level n_max + 1.
std::complex<double> tail_closure(const CoefficientModel& model, std::complex<double> z,
                                  long long n_max, double tail_eta) {
  const auto [a_t, b_t] = eval_jacobi(model, n_max + 1);
  const std::complex<double> zt(z.real() - b_t, z.imag() + tail_eta);
  return free_m(zt / a_t) / a_t;
}

/// Boundary-limit m at real x: the real part runs as a plain double while
/// Im m is carried both as a plain double (feeding the denominator, where
/// underflow is harmless) and in mantissa * 2^E form for the final log.
struct BoundaryM {
  double u = 0.0;      ///< Re m
  double log_v = 0.0;  ///< log Im m
};

BoundaryM m_boundary(const CoefficientModel& model, double x, long long n_max, double tail_eta) {
  const std::complex<double> mt = tail_closure(model, {x, 0.0}, n_max, tail_eta);
  double u = mt.real();
  double v_true = mt.imag();
  if (!(v_true > 0.0))
    throw NumericError("tail closure carries no positive imaginary part at x = " +
                       std::to_string(x));
  double v_sc = v_true;
  long long e2 = 0;  // Im m = v_sc * 2^e2
  constexpr double kRenormHi = 1.1579208923731620e+77;   // 2^256
  constexpr double kRenormLo = 8.6361685550944446e-78;   // 2^-256
  for (long long j = n_max; j >= 1; --j) {
    const auto [a, b] = eval_jacobi(model, j);
    const double a2 = a * a;
    const double p = b - x - a2 * u;
    const double q = a2 * v_true;
    const double den = p * p + q * q;
    if (den < 1e-300)
      throw NumericError("pole proximity in the m recursion at level " + std::to_string(j));
    u = p / den;
    const double scale = a2 / den;
    v_true *= scale;  // may underflow to zero; it never recovers anyway
    v_sc *= scale;
    if (v_sc > kRenormHi || v_sc < kRenormLo) {
      int e = 0;
      v_sc = std::frexp(v_sc, &e);
      e2 += e;
    }
  }
  BoundaryM out;
  out.u = u;
  out.log_v = std::log(v_sc) + static_cast<double>(e2) * kLn2;
  return out;
}

std::complex<double> m_interior(const CoefficientModel& model, std::complex<double> z,
                                long long n_max, double tail_eta) {
  std::complex<double> m = tail_closure(model, z, n_max, tail_eta);
  for (long long j = n_max; j >= 1; --j) {
    const auto [a, b] = eval_jacobi(model, j);
    const std::complex<double> den = b - z - a * a * m;
    if (std::abs(den) < 1e-300)
      throw NumericError("pole proximity in the m recursion at level " + std::to_string(j));
    m = 1.0 / den;
  }
  return m;
}

double log_f_once(const CoefficientModel& model, double x, long long n_max, double eta,
                  double tail_eta) {
  if (eta > 0.0) {
    const std::complex<double> m = m_interior(model, {x, eta}, n_max, tail_eta);
    if (!(m.imag() > 0.0)) throw NumericError("nonpositive Im m off the real axis");
    return std::log(m.imag()) - kLogPi;
  }
  return m_boundary(model, x, n_max, tail_eta).log_v - kLogPi;
}

double log_f_with_retry(const CoefficientModel& model, double x, long long n_max,
                        const DensityControls& ctrl) {
  try {
    return log_f_once(model, x, n_max, ctrl.eta, ctrl.tail_eta);
  } catch (const NumericError&) {
    const double bumped = ctrl.eta > 0.0 ? 10.0 * ctrl.eta : 1e-9;
    return log_f_once(model, x, n_max, bumped, ctrl.tail_eta);
  }
}

}  // namespace

std::complex<double> free_m(std::complex<double> z) {
  return 0.5 * (-z + std::sqrt(z - 2.0) * std::sqrt(z + 2.0));
}

std::complex<double> m_function(const CoefficientModel& model, std::complex<double> z,
                                const DensityControls& ctrl) {
  if (z.imag() < 0.0) throw DomainError("m function needs Im z >= 0");
  double eta = z.imag();
  if (eta == 0.0 && ctrl.eta > 0.0) eta = ctrl.eta;
  const double x = z.real();
  if (eta == 0.0 && !(x > -2.0 && x < 2.0))
    throw DomainError("boundary m function needs x in (-2, 2)");
  const long long n_max = ctrl.n_max > 0 ? ctrl.n_max : default_n_max(model, x);
  if (eta > 0.0) return m_interior(model, {x, eta}, n_max, ctrl.tail_eta);
  const BoundaryM bm = m_boundary(model, x, n_max, ctrl.tail_eta);
  return {bm.u, std::exp(bm.log_v)};
}

DensityPoint density(const CoefficientModel& model, double x, const DensityControls& ctrl) {
  if (!(x > -2.0 && x < 2.0)) throw DomainError("density needs x in (-2, 2)");
  if (!(ctrl.tol_rel > 0.0)) throw ConfigError("tol_rel must be positive");
  DensityPoint pt;
  pt.x = x;
  const long long base = ctrl.n_max > 0 ? ctrl.n_max : default_n_max(model, x);
  double prev_lf = kNaN;
  for (int d = 0; d <= ctrl.max_doublings; ++d) {
    const long long n_max = base << d;
    const double lf = log_f_with_retry(model, x, n_max, ctrl);
    pt.prev_log_f = prev_lf;
    pt.log_f = lf;
    pt.n_max_used = n_max;
    if (d > 0) {
      pt.last_change = std::abs(lf - prev_lf);
      if (pt.last_change <= ctrl.tol_rel) {
        pt.converged = true;
        break;
      }
    }
    prev_lf = lf;
  }
  pt.f = std::exp(pt.log_f);
  return pt;
}

DensityCurve density_curve(const CoefficientModel& model, const std::vector<double>& deltas,
                           const DensityControls& ctrl, int workers) {
  DensityCurve curve;
  curve.controls = ctrl;
  curve.deltas = deltas;
  const std::size_t n = deltas.size();
  curve.xs.resize(n);
  curve.f_values.resize(n);
  curve.logf.resize(n);
  curve.converged.assign(n, 0);
  curve.n_max_used.assign(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    const double delta = curve.deltas[i];
    if (!(delta > 0.0 && delta < 4.0)) throw ConfigError("delta must lie in (0, 4)");
    const DensityPoint pt = density(model, 2.0 - delta, ctrl);
    curve.xs[i] = pt.x;
    curve.f_values[i] = pt.f;
    curve.logf[i] = pt.log_f;
    curve.converged[i] = pt.converged ? 1 : 0;
    curve.n_max_used[i] = pt.n_max_used;
  });
  return curve;
}

SupSolutionEstimate sup_solution_estimate(const CoefficientModel& model, double x,
                                          const DensityControls& ctrl) {
  const long long N = turning_point(model, x);
  const long long horizon = ctrl.n_max > 0 ? ctrl.n_max : std::max<long long>(2 * N + 4, 1024);
  const long long start = N + 2;
  if (horizon < start + 10) throw ConfigError("horizon must reach past the turning point");

  SupSolutionEstimate est;
  est.horizon = horizon;
  const long long early_end = start + 9 * (horizon - start) / 10;
  double sup_all = -kInf;
  double sup_early = -kInf;
  double inf_all = kInf;

  double u_prev = 0.0;  // u_0
  double u_curr = 1.0;  // u_1
  double ls = 0.0;
  double a_prev = 1.0;
  for (long long n = 1; n < horizon; ++n) {
    const auto [a_n, b_n] = eval_jacobi(model, n);
    const double next = ((x - b_n) * u_curr - a_prev * u_prev) / a_n;
    u_prev = u_curr;
    u_curr = next;
    a_prev = a_n;
    const double m = std::max(std::abs(u_curr), std::abs(u_prev));
    if (m == 0.0)
      throw DegenerateSolutionError("solution vanished at two consecutive indices near n = " +
                                    std::to_string(n + 1));
    if (m > 2.0 || m < 0.5) {
      int e = 0;
      std::frexp(m, &e);
      const double sc = std::ldexp(1.0, -e);
      u_curr *= sc;
      u_prev *= sc;
      ls += e * kLn2;
    }
    const long long lower = n;  // pair (u_n, u_{n+1}) now available
    if (lower >= start) {
      const double level = std::log(u_curr * u_curr + u_prev * u_prev) + 2.0 * ls;
      sup_all = std::max(sup_all, level);
      inf_all = std::min(inf_all, level);
      if (lower <= early_end) sup_early = std::max(sup_early, level);
    }
  }
  est.log_sup = sup_all;
  est.log_inf = inf_all;
  est.conclusive = sup_all - sup_early <= 1e-9;
  return est;
}

}  // namespace specedge
