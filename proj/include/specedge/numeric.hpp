#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "specedge/errors.hpp"

namespace specedge {

// ============================================================================
// Compensated summation
// ============================================================================

// Neumaier-compensated accumulator: exact enough for 10^7-term sums of mixed
// magnitude, which plain left-to-right addition is not.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// ============================================================================
// Signed-log scalars
// ============================================================================

// A real number carried as sign * exp(log_abs). Exact far outside double
// range; used whenever solutions of very different scales are combined.
struct SignedLog {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static SignedLog from_value(double v) {
    SignedLog s;
    if (v == 0.0) return s;
    s.sign = v > 0.0 ? 1 : -1;
    s.log_abs = std::log(std::abs(v));
    return s;
  }

  static SignedLog from_parts(double mantissa, double log_scale) {
    SignedLog s;
    if (mantissa == 0.0) return s;
    s.sign = mantissa > 0.0 ? 1 : -1;
    s.log_abs = std::log(std::abs(mantissa)) + log_scale;
    return s;
  }

  bool zero() const { return sign == 0; }

  // May overflow/underflow to +-inf / 0; callers wanting exactness stay in log form.
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  friend SignedLog operator*(const SignedLog& a, const SignedLog& b) {
    SignedLog r;
    if (a.sign == 0 || b.sign == 0) return r;
    r.sign = a.sign * b.sign;
    r.log_abs = a.log_abs + b.log_abs;
    return r;
  }

  friend SignedLog operator/(const SignedLog& a, const SignedLog& b) {
    SignedLog r;
    if (a.sign == 0) return r;
    r.sign = a.sign * b.sign;
    r.log_abs = a.log_abs - b.log_abs;
    return r;
  }

  // Addition by base extraction: exp is only taken of nonpositive differences.
  friend SignedLog operator+(const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const double base = std::max(a.log_abs, b.log_abs);
    const double r = a.sign * std::exp(a.log_abs - base) + b.sign * std::exp(b.log_abs - base);
    SignedLog s;
    if (r == 0.0) return s;
    s.sign = r > 0.0 ? 1 : -1;
    s.log_abs = base + std::log(std::abs(r));
    return s;
  }

  friend SignedLog operator-(const SignedLog& a, const SignedLog& b) {
    SignedLog nb = b;
    nb.sign = -nb.sign;
    return a + nb;
  }
};

// ============================================================================
// Elementary stable kernels
// ============================================================================

/// arccosh(1 + t) for t >= 0, stable near t = 0 where the naive
/// log(w + sqrt(w^2-1)) form loses all digits.
inline double arccosh1p(double t) {
  if (t < 0.0) throw DomainError("arccosh argument below 1 (offset " + std::to_string(t) + ")");
  return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

/// log(e^t - 1) for t > 0 without overflow for large t.
inline double log_expm1(double t) {
  if (t > 33.0) return t + std::log1p(-std::exp(-t));
  return std::log(std::expm1(t));
}

/// base^e with fast paths for the exponents that dominate the hot loops.
inline double pow_fast(double base, double e) {
  if (e == 0.5) return std::sqrt(base);
  if (e == 1.0) return base;
  if (e == 2.0) return base * base;
  if (e == 1.5) return base * std::sqrt(base);
  return std::pow(base, e);
}

// ============================================================================
// Least squares line fit
// ============================================================================

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // standard error of the slope
  int n = 0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit f;
  f.n = static_cast<int>(xs.size());
  if (f.n < 2 || xs.size() != ys.size()) throw ConfigError("fit_line needs >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < f.n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= f.n;
  my /= f.n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < f.n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_line: degenerate abscissae");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (f.n > 2) {
    double ssr = 0.0;
    for (int i = 0; i < f.n; ++i) {
      const double r = ys[i] - (f.intercept + f.slope * xs[i]);
      ssr += r * r;
    }
    f.slope_se = std::sqrt(ssr / (f.n - 2) / sxx);
  }
  return f;
}

// ============================================================================
// Tiny worker pool
// ============================================================================

// Runs body(i) for i in [0, n). With workers <= 1 this is a plain loop; with
// more, indices are pulled from a shared counter. Results must be written to
// pre-sized slots so output ordering never depends on completion order.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<std::size_t>(workers, n));
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace specedge
