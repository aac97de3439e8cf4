#pragma once

#include <utility>
#include <vector>

#include "specedge/coefficients.hpp"
#include "specedge/numeric.hpp"

namespace specedge {

// ============================================================================
// Scaled eigensolutions of  a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1} = x u_n
// ============================================================================

/// One solution in mantissa/log form: u_n = u_curr * e^{log_scale},
/// u_{n-1} = u_prev * e^{log_scale}, with max(|u_curr|, |u_prev|) kept in
/// [1/2, 2] by renormalization.  The convention a_0 = 1 closes the recurrence
/// at n = 1 (where the coefficient multiplies u_0).
struct ScaledSolution {
  double u_curr = 0.0;
  double u_prev = 0.0;
  double log_scale = 0.0;
  long long index = 0;
};

struct TrajectoryPoint {
  long long n = 0;
  double mantissa = 0.0;
  double log_scale = 0.0;
};

/// Advances one index: u_{n+1} = ((x - b_n) u_n - a_{n-1} u_{n-1}) / a_n,
/// then renormalizes.  Throws DegenerateSolutionError if both mantissas
/// vanish.
ScaledSolution step(ScaledSolution sol, const CoefficientModel& model, double x);

/// Dirichlet solution u_1 = 1, u_0 = 0 (u_n = p_{n-1}(x)) advanced to
/// index n_max.  When trajectory is given, records (n, mantissa, log_scale)
/// every stride indices (plus the final index).
ScaledSolution dirichlet(const CoefficientModel& model, double x, long long n_max,
                         std::vector<TrajectoryPoint>* trajectory = nullptr,
                         long long stride = 1);

/// Wronskian a_{n-1} (u_n v_{n-1} - u_{n-1} v_n) of two solutions sitting at
/// the same index n, returned in signed-log form so arbitrarily disparate
/// scales combine without overflow.
SignedLog wronskian(const ScaledSolution& u, const ScaledSolution& v,
                    const CoefficientModel& model);

/// Advances both solutions n_steps and returns the maximum relative drift of
/// the Wronskian against its initial value.
double wronskian_drift(const CoefficientModel& model, double x, ScaledSolution u,
                       ScaledSolution v, long long n_steps);

// ============================================================================
// Subordinate solution at the edge x = 2
// ============================================================================

/// Certificate for the two-sided bound
///   C1 n^{-1} e^{-sum Gamma}  <=  v_n  <=  C2 n e^{-sum Gamma}
/// on the decreasing positive solution normalized by v_{n0} = 1.
struct SubordinateCertificate {
  long long n0 = 1;
  long long horizon = 0;
  std::vector<double> log_v;       ///< log v_n for n0-1 <= n <= horizon
  std::vector<double> gamma_caps;  ///< Gamma_n = arccosh((2-b_n)/(2a_n)), n0 <= n <= horizon
  double c_lower = 0.0;            ///< C1 = inf (W/a_n) n/(n-n0+2)
  double c_upper = 0.0;            ///< C2 = sup (1/n) sum_{j=n0-1}^n W/a_j
  bool holds = false;              ///< both bounds and monotone positivity verified
  bool monotone_ok = false;        ///< v_n >= v_{n+1} > 0 up to the horizon
  double min_slack_lower = 0.0;    ///< min over n of log v_n - lower bound (log units)
  double min_slack_upper = 0.0;    ///< min over n of upper bound - log v_n (log units)
  double window_agreement = 0.0;   ///< backward-pass stabilization residual on the window
  long long backward_m = 0;        ///< starting index of the final backward pass
  double bisection_t = 0.0;        ///< diagnostic shooting slope s = inf T
  double bisection_agreement = 0.0;  ///< max |log v| gap, bisection vs backward, on the window
};

/// Constructs v(2) by backward recursion from (v_M, v_{M+1}) = (1, 0) with M
/// doubled until the window [n0, n0+11] stabilizes to tol (cap 2^26, then a
/// NumericError), cross-checks against bisection on the initial slope
/// (diagnostic only), and evaluates the certificate constants and bounds.
SubordinateCertificate subordinate_at_edge(const CoefficientModel& model, long long horizon,
                                           double tol = 1e-10);

enum class Subordinacy { subordinate, not_subordinate, inconclusive };

struct SubordinacyDecision {
  Subordinacy status = Subordinacy::inconclusive;
  double min_ratio = 0.0;     ///< min of u_n/n over the last decade
  double decade_ratio = 0.0;  ///< (u_n/n at horizon) / (u_n/n at horizon/10)
  std::vector<std::pair<long long, double>> trace;  ///< (n, u_n/n) checkpoints
};

/// Decides whether the Dirichlet solution at x = 2 is subordinate from the
/// trace of u_n / n: min over the last decade below tol_sub, or a decade
/// ratio below 0.15, reads as subordinate; a decade ratio above 0.6 as not
/// subordinate; anything still trending is reported inconclusive.
SubordinacyDecision dirichlet_subordinacy_check(const CoefficientModel& model, long long horizon,
                                                double tol_sub = 1e-6);

// ============================================================================
// Diagnostics below and above the turning point
// ============================================================================

/// Discrete Airy-type normalization below the turning point:
///   Phi_{n+1} = (1 + e^{-2 gamma_n}) Phi_n - (a_{n-1}/a_n) e^{-gamma_n - gamma_{n-1}} Phi_{n-1}
/// from Phi_{n0-1} = 0, Phi_{n0} = 1, together with
///   phi_n = Phi_n - (a_{n-1}/a_n) e^{-gamma_n - gamma_{n-1}} Phi_{n-1}.
struct PhiDiagnostics {
  long long n0 = 1;
  long long N = 0;
  std::vector<double> Phi;  ///< Phi_n for n0-1 <= n <= N+1
  std::vector<double> phi;  ///< phi_n for n0 <= n <= N
  bool bounds_ok = false;
  double worst_slack = 0.0;  ///< most negative margin across all inequalities
};

/// Verifies, with 1e-12 slack: Phi nondecreasing and >= 0; phi <= 1 and
/// nonincreasing; Phi_{n+1} <= Phi_n + 1; 1 <= Phi_n <= n - n0 + 1.
PhiDiagnostics phi_diagnostics(const CoefficientModel& model, double x);

/// Oscillatory-regime quantities Y_n = u_{n+1} - e^{-i kappa_n} u_n along a
/// trajectory, with the sandwich  |Y_n|^2 / 2 <= u_n^2 + u_{n+1}^2
/// <= (2 / sin^2 kappa_n) |Y_n|^2  and the one-step ratio bound
/// | |Y_{n+1}|/|Y_n| - 1 | <= (kappa_{n+1} - kappa_n)/(sin kappa_n cos kappa_n).
struct OscillatoryDiagnostics {
  long long n_start = 0;
  long long n_end = 0;
  std::vector<std::pair<long long, double>> y_log_abs;  ///< (n, log |Y_n|), subsampled
  bool sandwich_ok = false;
  bool ratio_ok = false;
  double worst_sandwich_slack = 0.0;
  double worst_ratio_slack = 0.0;
};

/// Runs from sol.index (which must exceed the turning point: every kappa_n
/// must lie in (0, pi/2)) up to n_hi.
OscillatoryDiagnostics oscillatory_diagnostics(const CoefficientModel& model, double x,
                                               ScaledSolution sol, long long n_hi);

}  // namespace specedge
