#include "specedge/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specedge/edge.hpp"
#include "specedge/errors.hpp"

namespace specedge {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void renormalize_pair(double& u_curr, double& u_prev, double& log_scale, long long index) {
  const double m = std::max(std::abs(u_curr), std::abs(u_prev));
  if (m == 0.0)
    throw DegenerateSolutionError("solution vanished at two consecutive indices near n = " +
                                  std::to_string(index));
  if (m > 2.0 || m < 0.5) {
    int e = 0;
    std::frexp(m, &e);  // m = f * 2^e with f in [1/2, 1)
    const double sc = std::ldexp(1.0, -e);
    u_curr *= sc;
    u_prev *= sc;
    log_scale += e * kLn2;
  }
}

void renormalize(ScaledSolution& sol) {
  renormalize_pair(sol.u_curr, sol.u_prev, sol.log_scale, sol.index);
}

}  // namespace

// ============================================================================
// Basic stepping
// ============================================================================

ScaledSolution step(ScaledSolution sol, const CoefficientModel& model, double x) {
  const long long n = sol.index;
  if (n < 1) throw ConfigError("step needs index >= 1");
  const double a_prev = n >= 2 ? eval_jacobi(model, n - 1).first : 1.0;
  const auto [a_n, b_n] = eval_jacobi(model, n);
  const double next = ((x - b_n) * sol.u_curr - a_prev * sol.u_prev) / a_n;
  sol.u_prev = sol.u_curr;
  sol.u_curr = next;
  sol.index = n + 1;
  renormalize(sol);
  return sol;
}

ScaledSolution dirichlet(const CoefficientModel& model, double x, long long n_max,
                         std::vector<TrajectoryPoint>* trajectory, long long stride) {
  if (n_max < 1) throw ConfigError("dirichlet horizon must be >= 1");
  if (stride < 1) throw ConfigError("trajectory stride must be >= 1");
  ScaledSolution sol;
  sol.u_curr = 1.0;
  sol.u_prev = 0.0;
  sol.log_scale = 0.0;
  sol.index = 1;
  const auto record = [&](const ScaledSolution& s) {
    if (trajectory && ((s.index - 1) % stride == 0 || s.index == n_max))
      trajectory->push_back({s.index, s.u_curr, s.log_scale});
  };
  record(sol);
  double a_prev = 1.0;
  for (long long n = 1; n < n_max; ++n) {
    const auto [a_n, b_n] = eval_jacobi(model, n);
    const double next = ((x - b_n) * sol.u_curr - a_prev * sol.u_prev) / a_n;
    sol.u_prev = sol.u_curr;
    sol.u_curr = next;
    sol.index = n + 1;
    renormalize(sol);
    a_prev = a_n;
    record(sol);
  }
  return sol;
}

SignedLog wronskian(const ScaledSolution& u, const ScaledSolution& v,
                    const CoefficientModel& model) {
  if (u.index != v.index) throw ConfigError("wronskian needs both solutions at the same index");
  const long long n = u.index;
  const double a_prev = n >= 2 ? eval_jacobi(model, n - 1).first : 1.0;
  SignedLog w = SignedLog::from_value(a_prev * (u.u_curr * v.u_prev - u.u_prev * v.u_curr));
  w.log_abs += u.log_scale + v.log_scale;
  return w;
}

double wronskian_drift(const CoefficientModel& model, double x, ScaledSolution u,
                       ScaledSolution v, long long n_steps) {
  const SignedLog w0 = wronskian(u, v, model);
  if (w0.sign == 0)
    throw DegenerateSolutionError("initial Wronskian vanishes (solutions dependent)");
  double worst = 0.0;
  for (long long k = 0; k < n_steps; ++k) {
    u = step(u, model, x);
    v = step(v, model, x);
    const SignedLog w = wronskian(u, v, model);
    const double ratio =
        static_cast<double>(w.sign * w0.sign) * std::exp(w.log_abs - w0.log_abs);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return worst;
}

// ============================================================================
// Subordinate solution at x = 2
// ============================================================================

namespace {

/// Backward recursion at x = 2 from (v_M, v_{M+1}) = (1, 0); fills raw
/// (unnormalized) log v_n for n in [store_lo, store_hi], store_hi < M.
std::vector<double> backward_pass(const CoefficientModel& model, long long M, long long store_lo,
                                  long long store_hi) {
  std::vector<double> out(static_cast<std::size_t>(store_hi - store_lo + 1), kNaN);
  double v_next = 0.0;  // v_{n+1}
  double v_curr = 1.0;  // v_n
  double ls = 0.0;
  std::pair<double, double> ab = eval_jacobi(model, M);
  for (long long n = M; n > store_lo; --n) {
    std::pair<double, double> ab_prev{1.0, 0.0};
    if (n >= 2) ab_prev = eval_jacobi(model, n - 1);
    const double v_new = ((2.0 - ab.second) * v_curr - ab.first * v_next) / ab_prev.first;
    v_next = v_curr;
    v_curr = v_new;
    ab = ab_prev;
    renormalize_pair(v_curr, v_next, ls, n - 1);
    if (n - 1 >= store_lo && n - 1 <= store_hi)
      out[static_cast<std::size_t>(n - 1 - store_lo)] =
          v_curr > 0.0 ? std::log(v_curr) + ls : kNaN;
  }
  return out;
}

/// Forward shot u_{n0} = 1, u_{n0+1} = t at x = 2.  Returns the first index
/// with a nonpositive value, or -1 if positivity survives to the horizon.
/// Optionally records log u_n on the window [n0, n0+11].
long long shoot(const CoefficientModel& model, double t, long long n0, long long horizon,
                std::vector<double>* window_logs) {
  if (window_logs) {
    window_logs->assign(12, kNaN);
    (*window_logs)[0] = 0.0;
    (*window_logs)[1] = t > 0.0 ? std::log(t) : kNaN;
  }
  if (!(t > 0.0)) return n0 + 1;
  double u_prev = 1.0;  // u_{n0}
  double u_curr = t;    // u_{n0+1}
  double ls = 0.0;
  double a_prev = eval_jacobi(model, n0).first;
  for (long long n = n0 + 1; n < horizon; ++n) {
    const auto [a_n, b_n] = eval_jacobi(model, n);
    const double next = ((2.0 - b_n) * u_curr - a_prev * u_prev) / a_n;
    u_prev = u_curr;
    u_curr = next;
    a_prev = a_n;
    if (!(u_curr > 0.0)) return n + 1;
    renormalize_pair(u_curr, u_prev, ls, n + 1);
    if (window_logs && n + 1 <= n0 + 11)
      (*window_logs)[static_cast<std::size_t>(n + 1 - n0)] = std::log(u_curr) + ls;
  }
  return -1;
}

}  // namespace

SubordinateCertificate subordinate_at_edge(const CoefficientModel& model, long long horizon,
                                           double tol) {
  const long long n0 = model.n0_monotone;
  if (horizon < n0 + 12) throw ConfigError("certificate horizon must reach n0 + 12");
  const MonotonicityReport mono = monotonicity_certificate(model, horizon);
  if (!mono.ok)
    throw ModelError("model not monotone on the certificate range: " + mono.what);

  SubordinateCertificate cert;
  cert.n0 = n0;
  cert.horizon = horizon;

  // Backward construction, doubling M until the window stabilizes to tol.
  const long long win_lo = n0;
  const long long win_hi = n0 + 11;
  const auto normalize = [](std::vector<double>& logs, std::size_t ref) {
    const double r = logs[ref];
    for (double& v : logs) v -= r;
  };
  constexpr long long kCap = 1LL << 26;
  long long M = std::max<long long>(64, 4 * win_hi);
  std::vector<double> prev_win = backward_pass(model, M, win_lo, win_hi);
  normalize(prev_win, 0);
  double agreement = kInf;
  while (agreement > tol) {
    if (2 * M > kCap)
      throw NumericError("backward recursion did not stabilize below the step cap");
    M *= 2;
    std::vector<double> win = backward_pass(model, M, win_lo, win_hi);
    normalize(win, 0);
    agreement = 0.0;
    for (std::size_t i = 0; i < win.size(); ++i)
      agreement = std::max(agreement, std::abs(win[i] - prev_win[i]));
    prev_win = std::move(win);
  }

  // Final authoritative pass covering [n0-1, horizon], normalized v_{n0} = 1.
  const long long m_final = std::max(M, 4 * horizon);
  cert.backward_m = m_final;
  cert.log_v = backward_pass(model, m_final, n0 - 1, horizon);
  normalize(cert.log_v, 1);
  if (m_final > M) {
    for (long long n = win_lo; n <= win_hi; ++n)
      agreement = std::max(agreement, std::abs(cert.log_v[static_cast<std::size_t>(n - n0 + 1)] -
                                               prev_win[static_cast<std::size_t>(n - win_lo)]));
  }
  cert.window_agreement = agreement;

  // Gamma ledger with compensated prefix sums S(n) = sum_{j=n0}^n Gamma_j.
  const std::size_t count = static_cast<std::size_t>(horizon - n0 + 1);
  cert.gamma_caps.reserve(count);
  std::vector<double> gamma_prefix(count);
  KahanSum s;
  for (long long n = n0; n <= horizon; ++n) {
    const double cap = big_gamma(model, n);
    cert.gamma_caps.push_back(cap);
    s.add(cap);
    gamma_prefix[static_cast<std::size_t>(n - n0)] = s.value();
  }

  // Certificate constants from the proof's Wronskian W = a_{n0-1} v_{n0-1}.
  const double a_pre = n0 >= 2 ? eval_jacobi(model, n0 - 1).first : 1.0;
  const double log_w = std::log(a_pre) + cert.log_v[0];
  const double w = std::exp(log_w);
  double c1 = kInf;
  double c2 = -kInf;
  KahanSum upper;
  upper.add(w / a_pre);  // j = n0 - 1 term of the C2 average
  for (long long n = n0; n <= horizon; ++n) {
    const double a_n = eval_jacobi(model, n).first;
    c1 = std::min(c1, (w / a_n) * (static_cast<double>(n) / static_cast<double>(n - n0 + 2)));
    upper.add(w / a_n);
    c2 = std::max(c2, upper.value() / static_cast<double>(n));
  }
  cert.c_lower = c1;
  cert.c_upper = c2;

  // Two-sided bound and monotone positivity, all in log space.
  const double log_c1 = std::log(c1);
  const double log_c2 = std::log(c2);
  constexpr double kSlack = 1e-9;
  double slack_lo = kInf;
  double slack_hi = kInf;
  bool mono_ok = true;
  for (long long n = n0; n <= horizon; ++n) {
    const double lv = cert.log_v[static_cast<std::size_t>(n - n0 + 1)];
    if (std::isnan(lv)) {
      mono_ok = false;
      slack_lo = slack_hi = -kInf;
      break;
    }
    const double ln_n = std::log(static_cast<double>(n));
    const double cap_sum = gamma_prefix[static_cast<std::size_t>(n - n0)];
    slack_lo = std::min(slack_lo, lv - (log_c1 - ln_n - cap_sum));
    slack_hi = std::min(slack_hi, (log_c2 + ln_n - cap_sum) - lv);
    if (n < horizon) {
      const double lv_next = cert.log_v[static_cast<std::size_t>(n - n0 + 2)];
      if (std::isnan(lv_next) || lv < lv_next - 1e-12) mono_ok = false;
    }
  }
  cert.min_slack_lower = slack_lo;
  cert.min_slack_upper = slack_hi;
  cert.monotone_ok = mono_ok;
  cert.holds = mono_ok && slack_lo >= -kSlack && slack_hi >= -kSlack;

  // Diagnostic shooting construction: bisection on the initial slope.
  if (shoot(model, 1.0, n0, horizon, nullptr) >= 0)
    throw NumericError("shooting with slope 1 loses positivity before the horizon");
  double lo_t = 0.0;
  double hi_t = 1.0;
  while (hi_t - lo_t > 1e-15) {
    const double mid = 0.5 * (lo_t + hi_t);
    if (shoot(model, mid, n0, horizon, nullptr) >= 0)
      lo_t = mid;
    else
      hi_t = mid;
  }
  cert.bisection_t = hi_t;
  std::vector<double> win_u;
  shoot(model, hi_t, n0, horizon, &win_u);
  double bis = 0.0;
  for (std::size_t i = 0; i < win_u.size(); ++i)
    bis = std::max(bis, std::abs(win_u[i] - cert.log_v[i + 1]));
  cert.bisection_agreement = bis;
  return cert;
}

SubordinacyDecision dirichlet_subordinacy_check(const CoefficientModel& model, long long horizon,
                                                double tol_sub) {
  if (horizon < 100) throw ConfigError("subordinacy horizon must be >= 100");
  SubordinacyDecision dec;
  const long long h10 = horizon / 10;

  std::vector<long long> checkpoints;
  for (int k = 0;; ++k) {
    const long long n = std::llround(std::pow(10.0, static_cast<double>(k) / 8.0));
    if (n > horizon) break;
    if (checkpoints.empty() || n > checkpoints.back()) checkpoints.push_back(n);
  }
  if (checkpoints.back() != horizon) checkpoints.push_back(horizon);

  double u_prev = 0.0;  // u_0
  double u_curr = 1.0;  // u_1
  double ls = 0.0;
  double a_prev = 1.0;
  double min_log_r = kInf;
  double log_r_h10 = kNaN;
  double log_r_h = kNaN;
  std::size_t ck = 0;
  const auto visit = [&](long long n) {
    const double log_r = std::log(std::abs(u_curr)) + ls - std::log(static_cast<double>(n));
    if (n >= h10) min_log_r = std::min(min_log_r, log_r);
    if (n == h10) log_r_h10 = log_r;
    if (n == horizon) log_r_h = log_r;
    if (ck < checkpoints.size() && n == checkpoints[ck]) {
      dec.trace.emplace_back(n, std::exp(log_r));
      ++ck;
    }
  };
  visit(1);
  for (long long n = 1; n < horizon; ++n) {
    const auto [a_n, b_n] = eval_jacobi(model, n);
    const double next = ((2.0 - b_n) * u_curr - a_prev * u_prev) / a_n;
    u_prev = u_curr;
    u_curr = next;
    a_prev = a_n;
    renormalize_pair(u_curr, u_prev, ls, n + 1);
    visit(n + 1);
  }

  dec.min_ratio = std::exp(min_log_r);
  dec.decade_ratio = std::exp(log_r_h - log_r_h10);
  if (dec.min_ratio <= tol_sub)
    dec.status = Subordinacy::subordinate;
  else if (dec.decade_ratio >= 0.6)
    dec.status = Subordinacy::not_subordinate;
  else if (dec.decade_ratio <= 0.15)
    dec.status = Subordinacy::subordinate;
  else
    dec.status = Subordinacy::inconclusive;
  return dec;
}

// ============================================================================
// Diagnostics around the turning point
// ============================================================================

PhiDiagnostics phi_diagnostics(const CoefficientModel& model, double x) {
  PhiDiagnostics d;
  d.n0 = model.n0_monotone;
  d.N = turning_point(model, x);
  if (d.N < d.n0) throw DomainError("turning point precedes the monotone start index");
  if (d.N - d.n0 > (1LL << 24))
    throw NumericError("diagnostic range too large to materialize");

  const long long n0 = d.n0;
  d.Phi.reserve(static_cast<std::size_t>(d.N - n0 + 3));
  d.Phi.push_back(0.0);  // Phi_{n0-1}
  d.Phi.push_back(1.0);  // Phi_{n0}
  d.phi.reserve(static_cast<std::size_t>(d.N - n0 + 1));
  double gamma_prev = 0.0;  // multiplies Phi_{n0-1} = 0 on the first step
  double a_prev = n0 >= 2 ? eval_jacobi(model, n0 - 1).first : 1.0;
  for (long long n = n0; n <= d.N; ++n) {
    const double a_n = eval_jacobi(model, n).first;
    const double g = gamma_n(model, x, n);
    const double cur = d.Phi[d.Phi.size() - 1];
    const double prev = d.Phi[d.Phi.size() - 2];
    const double cross = (a_prev / a_n) * std::exp(-g - gamma_prev) * prev;
    d.phi.push_back(cur - cross);
    d.Phi.push_back(cur + std::exp(-2.0 * g) * cur - cross);
    gamma_prev = g;
    a_prev = a_n;
  }

  // Margins, each normalized by the local magnitude; negative means violated.
  double worst = kInf;
  const auto margin = [&worst](double value, double scale) {
    worst = std::min(worst, value / std::max(1.0, scale));
  };
  for (std::size_t i = 0; i + 1 < d.Phi.size(); ++i) {
    margin(d.Phi[i + 1] - d.Phi[i], d.Phi[i + 1]);      // nondecreasing
    margin(d.Phi[i] + 1.0 - d.Phi[i + 1], d.Phi[i]);    // increments <= 1
  }
  margin(d.Phi[0], 1.0);  // Phi_{n0-1} = 0 >= 0
  for (std::size_t i = 1; i < d.Phi.size(); ++i) {
    const long long n = n0 - 1 + static_cast<long long>(i);
    const double cap = static_cast<double>(n - n0 + 1);
    margin(d.Phi[i] - 1.0, 1.0);
    margin(cap - d.Phi[i], cap);
  }
  for (std::size_t j = 0; j < d.phi.size(); ++j) {
    margin(1.0 - d.phi[j], 1.0);
    if (j + 1 < d.phi.size()) margin(d.phi[j] - d.phi[j + 1], 1.0);
  }
  d.worst_slack = worst;
  d.bounds_ok = worst >= -1e-12;
  return d;
}

OscillatoryDiagnostics oscillatory_diagnostics(const CoefficientModel& model, double x,
                                               ScaledSolution sol, long long n_hi) {
  if (sol.index < 1) throw ConfigError("starting index must be >= 1");
  if (n_hi <= sol.index) throw ConfigError("n_hi must exceed the starting index");
  if (sol.u_curr == 0.0 && sol.u_prev == 0.0)
    throw DegenerateSolutionError("zero solution carries no oscillatory data");

  OscillatoryDiagnostics d;
  d.n_start = sol.index;
  d.n_end = n_hi;
  const long long stride = std::max<long long>(1, (n_hi - sol.index) / 4096);
  double worst_sand = kInf;
  double worst_ratio = kInf;
  double prev_log_y = kNaN;
  double prev_kappa = kNaN;
  double prev_sin = kNaN;
  double prev_cos = kNaN;
  for (long long n = sol.index; n < n_hi; ++n) {
    const auto [a_n, b_n] = eval_jacobi(model, n);
    const double c = (x - b_n) / (2.0 * a_n);
    if (!(c > 0.0) || !(c < 1.0))
      throw NumericError("kappa outside (0, pi/2) at n = " + std::to_string(n) +
                         " (index at or below the turning point)");
    const double kappa = std::acos(c);
    const double sk = std::sin(kappa);

    const ScaledSolution nxt = step(sol, model, x);
    const double un = nxt.u_prev;
    const double un1 = nxt.u_curr;
    const double y2 = (un1 - c * un) * (un1 - c * un) + (sk * un) * (sk * un);
    const double s2 = un * un + un1 * un1;
    worst_sand = std::min(worst_sand, (s2 - 0.5 * y2) / s2);
    worst_sand = std::min(worst_sand, ((2.0 / (sk * sk)) * y2 - s2) / s2);

    const double log_y = 0.5 * std::log(y2) + nxt.log_scale;
    if (n > d.n_start) {
      const double lhs = std::abs(std::exp(log_y - prev_log_y) - 1.0);
      const double rhs = (kappa - prev_kappa) / (prev_sin * prev_cos);
      worst_ratio = std::min(worst_ratio, rhs - lhs);
    }
    if ((n - d.n_start) % stride == 0 || n == n_hi - 1) d.y_log_abs.emplace_back(n, log_y);
    prev_log_y = log_y;
    prev_kappa = kappa;
    prev_sin = sk;
    prev_cos = c;
    sol = nxt;
  }
  d.worst_sandwich_slack = worst_sand;
  d.worst_ratio_slack = worst_ratio;
  d.sandwich_ok = worst_sand >= -1e-12;
  d.ratio_ok = worst_ratio >= -1e-12;
  return d;
}

}  // namespace specedge
