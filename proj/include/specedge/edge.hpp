#pragma once

#include <cstddef>
#include <vector>

#include "specedge/coefficients.hpp"

namespace specedge {

// ============================================================================
// Edge quantities at energy x near the right band edge
// ============================================================================

/// Bundle of turning-point data:
///   N       largest n with b_n + 2 a_n <= x
///   gammas  arccosh((x - b_n) / (2 a_n)) for n0_monotone <= n <= N
///           (capped in length; the sum g always covers the full range)
///   g       compensated sum of all gamma_n
///   h       log of N * (b_{N+2}-b_{N+1} + a_{N+2}-a_{N+1})^{-1} * (2-x)^{1/2}
///   kappa_next  arccos((x - b_{N+2}) / (2 a_{N+2}))
///   kappa_inf   arccos(x / 2)
struct EdgeData {
  double x = 0.0;
  long long N = 0;
  std::vector<double> gammas;
  double g = 0.0;
  double h = 0.0;
  double kappa_next = 0.0;
  double kappa_inf = 0.0;
};

struct BandPrediction {
  double center = 0.0;     ///< -2 g(x)
  double halfwidth = 0.0;  ///< 2 h(x)
};

/// max { n >= 1 : b_n + 2 a_n <= x } for x < 2.  Early and override indices
/// are scanned exhaustively; the monotone tail is located by exponential
/// search plus bisection.  Throws DomainError when no index qualifies and
/// ModelError when both coefficient sequences are eventually constant (the
/// set is then unbounded).
long long turning_point(const CoefficientModel& model, double x);

/// gamma_n(x) = arccosh((x - b_n)/(2 a_n)), stable near argument 1.
double gamma_n(const CoefficientModel& model, double x, long long n);

/// Assembles EdgeData; gamma storage is truncated to store_cap entries while
/// g is accumulated over the whole range with compensated summation.
EdgeData edge_data(const CoefficientModel& model, double x,
                   std::size_t store_cap = std::size_t{1} << 20);

/// Gamma_n = arccosh((2 - b_n)/(2 a_n)) = gamma_n at x = 2.
double big_gamma(const CoefficientModel& model, long long n);

/// sup over 0 < t <= y of 1/(sin t cos t) - 1/t, for y in (0, pi/2).
/// Small y uses the series (2/3) y + (14/45) y^3.
double q_sup(double y);

/// Predicted band for log f(x): center -2 g(x), halfwidth 2 h(x), up to the
/// additive constant the bound leaves unquantified.
BandPrediction band_prediction(const CoefficientModel& model, double x);

}  // namespace specedge
