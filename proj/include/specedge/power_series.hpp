#pragma once

#include <cstddef>
#include <vector>

namespace specedge {

// Dense truncated power series: s[k] is the coefficient of z^k. All
// operations truncate to a caller-chosen length; lengths here are tiny
// (the expansion machinery never needs more than ~14 coefficients).
using Series = std::vector<double>;

/// Product of two series truncated to `len` coefficients.
Series series_mul(const Series& a, const Series& b, std::size_t len);

/// Binomial series (1 + scale*z)^alpha, truncated to `len` coefficients.
Series series_binomial(double alpha, double scale, std::size_t len);

/// Composition outer(inner(z)); requires inner to have no constant term.
Series series_compose(const Series& outer, const Series& inner, std::size_t len);

/// Horner evaluation at z.
double series_eval(const Series& s, double z);

}  // namespace specedge
