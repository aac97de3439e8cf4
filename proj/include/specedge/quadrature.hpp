#pragma once

#include <functional>

namespace specedge {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;  // accumulated Kronrod error estimate
  bool converged = false;
  int intervals = 0;
};

/// Adaptive Gauss(7)/Kronrod(15) integration on [a, b]. The worst interval
/// (by error estimate) is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |value|) or the interval budget runs out.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_intervals = 4096);

}  // namespace specedge
