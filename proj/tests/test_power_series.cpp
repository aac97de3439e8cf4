#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specedge/errors.hpp"
#include "specedge/power_series.hpp"

using namespace specedge;

TEST_CASE("series product truncates correctly") {
  const Series a{1.0, 2.0, 3.0};
  const Series b{4.0, 5.0};
  const Series p = series_mul(a, b, 4);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == 4.0);
  CHECK(p[1] == 13.0);   // 1*5 + 2*4
  CHECK(p[2] == 22.0);   // 2*5 + 3*4
  CHECK(p[3] == 15.0);   // 3*5
}

TEST_CASE("binomial series reproduces integer powers exactly") {
  const Series sq = series_binomial(2.0, 1.0, 5);
  CHECK(sq[0] == 1.0);
  CHECK(sq[1] == 2.0);
  CHECK(sq[2] == 1.0);
  CHECK(sq[3] == 0.0);
  CHECK(sq[4] == 0.0);

  // (1 - z)^{-1} = 1 + z + z^2 + ...
  const Series geom = series_binomial(-1.0, -1.0, 6);
  for (double c : geom) CHECK(c == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("square of the square root is the identity") {
  const Series root = series_binomial(0.5, 1.0, 10);
  const Series sq = series_mul(root, root, 10);
  CHECK(sq[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sq[1] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t k = 2; k < sq.size(); ++k)
    CHECK(std::abs(sq[k]) < 1e-14);
}

TEST_CASE("composition with z/(1-z) turns (1+w)^alpha into (1-z)^-alpha") {
  const double alpha = 0.37;
  const std::size_t len = 10;
  Series inner(len, 1.0);
  inner[0] = 0.0;  // z/(1-z) = z + z^2 + z^3 + ...
  const Series lhs = series_compose(series_binomial(alpha, 1.0, len), inner, len);
  const Series rhs = series_binomial(-alpha, -1.0, len);
  REQUIRE(lhs.size() == rhs.size());
  for (std::size_t k = 0; k < len; ++k)
    CHECK(lhs[k] == doctest::Approx(rhs[k]).epsilon(1e-13));
}

TEST_CASE("composition requires a vanishing constant term") {
  const Series outer{1.0, 1.0};
  const Series inner{0.5, 1.0};
  CHECK_THROWS_AS(series_compose(outer, inner, 4), ConfigError);
}

TEST_CASE("evaluation matches the defining polynomial") {
  const Series s{1.0, -2.0, 0.5};
  const double z = 0.3;
  CHECK(series_eval(s, z) == doctest::Approx(1.0 - 2.0 * z + 0.5 * z * z).epsilon(1e-15));
  // against an analytic value: (1 + z)^{1/2} at small z
  const Series root = series_binomial(0.5, 1.0, 14);
  CHECK(series_eval(root, 0.01) == doctest::Approx(std::sqrt(1.01)).epsilon(1e-15));
}
