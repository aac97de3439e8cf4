#pragma once

#include <complex>
#include <vector>

#include "specedge/coefficients.hpp"

namespace specedge {

// ============================================================================
// Independent density oracle: Weyl m-function continued fraction
// ============================================================================

struct DensityControls {
  long long n_max = 0;    ///< truncation depth; 0 selects max(2 N(x) + 4, 1024)
  double eta = 0.0;       ///< imaginary offset; 0 evaluates the boundary limit
  double tail_eta = 0.0;  ///< offset applied inside the tail closure only
  double tol_rel = 1e-6;  ///< convergence target on log f under n_max doubling
  int max_doublings = 6;
};

struct DensityPoint {
  double x = 0.0;
  double f = 0.0;        ///< exp(log_f); underflows to 0 near the edge
  double log_f = 0.0;    ///< authoritative value
  bool converged = false;
  long long n_max_used = 0;
  double last_change = 0.0;  ///< |delta log f| across the final doubling
  double prev_log_f = 0.0;   ///< iterate before the final one
};

struct DensityCurve {
  std::vector<double> deltas;
  std::vector<double> xs;
  std::vector<double> f_values;
  std::vector<double> logf;
  std::vector<char> converged;
  std::vector<long long> n_max_used;
  DensityControls controls;
};

struct SupSolutionEstimate {
  double log_sup = 0.0;  ///< log sup (u_n^2 + u_{n+1}^2) over the tail
  double log_inf = 0.0;  ///< log inf of the same quantity
  bool conclusive = false;  ///< the sup stopped moving over the last 10%
  long long horizon = 0;
};

/// m of the free half-line matrix: (-z + sqrt(z-2) sqrt(z+2)) / 2 with the
/// principal branches, Herglotz in the upper half-plane, m -> 0 at infinity.
/// On the boundary (x in (-2,2), +0i) this is (-x + i sqrt(4-x^2)) / 2.
std::complex<double> free_m(std::complex<double> z);

/// Downward continued fraction m^(k) = 1 / (b_{k+1} - z - a_{k+1}^2 m^(k+1))
/// closed at depth n_max with the free m of the locally-constant tail
/// (a, b evaluated at n_max + 1).  For Im z = 0 the recursion runs in a
/// scaled real representation so Im m survives below 1e-308.
std::complex<double> m_function(const CoefficientModel& model, std::complex<double> z,
                                const DensityControls& ctrl);

/// f(x) = Im m(x + i eta) / pi with n_max doubled until |delta log f|
/// <= tol_rel or max_doublings is exhausted; the flag reports which.
/// Pole-proximity failures at eta = 0 are retried once with a small eta.
DensityPoint density(const CoefficientModel& model, double x, const DensityControls& ctrl);

/// density() across a grid of delta = 2 - x (any positive values < 4);
/// points are independent and can be evaluated by several workers.
DensityCurve density_curve(const CoefficientModel& model, const std::vector<double>& deltas,
                           const DensityControls& ctrl, int workers = 1);

/// Carmona-style cross-check: sup and inf of log(u_n^2 + u_{n+1}^2) along the
/// Dirichlet trajectory for n >= N(x) + 2; log_sup tracks -log f up to O(1).
SupSolutionEstimate sup_solution_estimate(const CoefficientModel& model, double x,
                                          const DensityControls& ctrl);

}  // namespace specedge
