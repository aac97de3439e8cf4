#include "specedge/power_series.hpp"

#include "specedge/errors.hpp"

namespace specedge {

Series series_mul(const Series& a, const Series& b, std::size_t len) {
  Series out(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

Series series_binomial(double alpha, double scale, std::size_t len) {
  Series out(len, 0.0);
  if (len == 0) return out;
  out[0] = 1.0;
  // coefficient recurrence: c_{k+1} = c_k * scale * (alpha - k) / (k + 1)
  for (std::size_t k = 0; k + 1 < len; ++k) {
    out[k + 1] = out[k] * scale * (alpha - static_cast<double>(k)) / static_cast<double>(k + 1);
  }
  return out;
}

Series series_compose(const Series& outer, const Series& inner, std::size_t len) {
  if (!inner.empty() && inner[0] != 0.0) {
    throw ConfigError("series_compose: inner series must have zero constant term");
  }
  // Horner from the highest outer coefficient down.
  Series acc(len, 0.0);
  if (len == 0) return acc;
  for (std::size_t k = outer.size(); k-- > 0;) {
    acc = series_mul(acc, inner, len);
    acc[0] += outer[k];
  }
  return acc;
}

double series_eval(const Series& s, double z) {
  double v = 0.0;
  for (std::size_t k = s.size(); k-- > 0;) v = v * z + s[k];
  return v;
}

}  // namespace specedge
