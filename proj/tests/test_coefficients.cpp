#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include <json.hpp>

#include "specedge/coefficients.hpp"
#include "specedge/errors.hpp"

using namespace specedge;

namespace {

CoefficientModel sqrt_decay_model() {
  CoefficientModel m;
  m.a_terms = {{0.25, 0.5}};
  return m;
}

CoefficientModel harmonic_a_model() {
  CoefficientModel m;
  m.a_terms = {{1.0, 1.0}};
  m.overrides[1] = {0.5, 0.0};
  m.max_override = 1;
  return m;
}

CoefficientModel harmonic_b_model() {
  CoefficientModel m;
  m.b_terms = {{0.5, 1.0}};
  return m;
}

VerblunskyModel half_power_verblunsky() {
  VerblunskyModel vm;
  vm.terms = {{0.5, 0.5}};
  vm.shift = 2.0;
  return vm;
}

}  // namespace

TEST_CASE("free coefficients evaluate to (1, 0) at every index") {
  const CoefficientModel free_model;
  for (long long n : {1LL, 2LL, 1000LL, 1'000'000'000LL}) {
    const auto [a, b] = eval_jacobi(free_model, n);
    CHECK(a == 1.0);
    CHECK(b == 0.0);
  }
  CHECK_THROWS_AS(eval_jacobi(free_model, 0), ModelError);
  CHECK_THROWS_AS(eval_jacobi(free_model, -3), ModelError);
}

TEST_CASE("power-law tails evaluate exactly and overrides take precedence") {
  const CoefficientModel m = sqrt_decay_model();
  CHECK(eval_jacobi(m, 4).first == doctest::Approx(1.0 - 0.25 / 2.0).epsilon(1e-16));
  CHECK(eval_jacobi(m, 4).second == 0.0);

  const CoefficientModel h = harmonic_a_model();
  CHECK(eval_jacobi(h, 1).first == 0.5);  // override: the power law would give 0
  CHECK(eval_jacobi(h, 2).first == doctest::Approx(0.5).epsilon(1e-16));
  CHECK(eval_jacobi(h, 10).first == doctest::Approx(0.9).epsilon(1e-16));

  const CoefficientModel hb = harmonic_b_model();
  CHECK(eval_jacobi(hb, 5).second == doctest::Approx(-0.1).epsilon(1e-16));
  CHECK(eval_jacobi(hb, 5).first == 1.0);
}

TEST_CASE("nonpositive a_n is rejected at evaluation time") {
  CoefficientModel bad;
  bad.a_terms = {{1.0, 1.0}};  // a_1 = 0 without an override
  CHECK_THROWS_AS(eval_jacobi(bad, 1), ModelError);
}

TEST_CASE("verblunsky evaluation follows the shifted power law") {
  const VerblunskyModel vm = half_power_verblunsky();
  CHECK(eval_verblunsky(vm, 0) == doctest::Approx(-0.5 / std::sqrt(2.0)).epsilon(1e-16));
  CHECK(eval_verblunsky(vm, 5) == doctest::Approx(-0.5 / std::sqrt(7.0)).epsilon(1e-16));
  CHECK_THROWS_AS(eval_verblunsky(vm, -1), ModelError);

  VerblunskyModel out_of_disc;
  out_of_disc.terms = {{1.5, 0.5}};
  out_of_disc.shift = 0.0;
  CHECK_THROWS_AS(eval_verblunsky(out_of_disc, 0), ModelError);
}

TEST_CASE("tail classification picks the slower-decaying side") {
  CHECK(tail_class(sqrt_decay_model()).which_case == TailCase::a_dominates);
  CHECK(tail_class(sqrt_decay_model()).beta == doctest::Approx(0.5));
  CHECK(tail_class(sqrt_decay_model()).C1 == doctest::Approx(0.5));  // 2 c_1

  CHECK(tail_class(harmonic_b_model()).which_case == TailCase::b_dominates);
  CHECK(tail_class(harmonic_b_model()).beta == doctest::Approx(1.0));
  CHECK(tail_class(harmonic_b_model()).C1 == doctest::Approx(0.5));  // d_1

  CoefficientModel tied;
  tied.a_terms = {{0.2, 0.75}};
  tied.b_terms = {{0.3, 0.75}};
  const TailClass t = tail_class(tied);
  CHECK(t.which_case == TailCase::tie);
  CHECK(t.beta == doctest::Approx(0.75));
  CHECK(t.C1 == doctest::Approx(2.0 * 0.2 + 0.3));

  CHECK(tail_class(CoefficientModel{}).which_case == TailCase::both_constant);
}

TEST_CASE("tail classification survives far-tail numeric regression") {
  // fit log(2 - 2 a_n - b_n) against log n over n in [1e3, 1e5]
  for (const CoefficientModel& m :
       {sqrt_decay_model(), harmonic_a_model(), harmonic_b_model()}) {
    const TailClass t = tail_class(m);
    double slope_num = 0.0, slope_den = 0.0, mean_x = 0.0, mean_y = 0.0;
    std::vector<double> xs, ys;
    for (long long n = 1000; n <= 100000; n *= 10) {
      const auto [a, b] = eval_jacobi(m, n);
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(2.0 - 2.0 * a - b));
    }
    for (size_t i = 0; i < xs.size(); ++i) {
      mean_x += xs[i];
      mean_y += ys[i];
    }
    mean_x /= xs.size();
    mean_y /= ys.size();
    for (size_t i = 0; i < xs.size(); ++i) {
      slope_num += (xs[i] - mean_x) * (ys[i] - mean_y);
      slope_den += (xs[i] - mean_x) * (xs[i] - mean_x);
    }
    CHECK(std::abs(-slope_num / slope_den - t.beta) < 0.02);
  }
}

TEST_CASE("sieved coefficients match hand-computed values") {
  const CoefficientModel sieved = szego_sieve_map(half_power_verblunsky(), 100);
  const double expected[6] = {1.1370546243753870, 0.98123197225859652, 0.98311054869028318,
                              0.98513527132700222, 0.98683286632503461, 0.98821357571974031};
  for (int n = 1; n <= 6; ++n)
    CHECK(eval_jacobi(sieved, n).first ==
          doctest::Approx(expected[n - 1]).epsilon(1e-14));
  for (int n = 1; n <= 6; ++n) CHECK(eval_jacobi(sieved, n).second == 0.0);
}

TEST_CASE("sieved models evaluate identically beyond the materialized range") {
  const VerblunskyModel vm = half_power_verblunsky();
  const CoefficientModel small = szego_sieve_map(vm, 100);
  const CoefficientModel large = szego_sieve_map(vm, 8192);
  for (long long n : {101LL, 500LL, 5000LL, 8192LL, 20000LL}) {
    CHECK(eval_jacobi(small, n).first == eval_jacobi(large, n).first);
  }
  // the inferred monotone start makes the certificate pass
  CHECK(monotonicity_certificate(small, 20000).ok);
}

TEST_CASE("sieve tail class is the squared-coefficient double-exponent law") {
  const TailClass t = szego_map_tail(half_power_verblunsky());
  CHECK(t.beta == doctest::Approx(1.0));
  CHECK(t.C1 == doctest::Approx(0.25));
  CHECK(t.which_case == TailCase::a_dominates);

  const CoefficientModel sieved = szego_sieve_map(half_power_verblunsky(), 64);
  const TailClass via_model = tail_class(sieved);
  CHECK(via_model.beta == doctest::Approx(1.0));
  CHECK(via_model.C1 == doctest::Approx(0.25));

  // empirical cross-check: 2 - 2 a_n ~ C1 n^{-1} far out
  const auto [a, b] = eval_jacobi(sieved, 1'000'000);
  CHECK((2.0 - 2.0 * a) * 1e6 == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("monotonicity certificate accepts the bundled tails") {
  CHECK(monotonicity_certificate(sqrt_decay_model(), 100000).ok);
  CHECK(monotonicity_certificate(harmonic_a_model(), 100000).ok);
  CHECK(monotonicity_certificate(harmonic_b_model(), 100000).ok);
}

TEST_CASE("monotonicity certificate reports a planted violation") {
  CoefficientModel m = sqrt_decay_model();
  m.overrides[5] = {0.99, 0.0};  // a_5 = 0.99 > a_6
  m.max_override = 5;
  const MonotonicityReport r = monotonicity_certificate(m, 1000);
  CHECK_FALSE(r.ok);
  CHECK(r.first_violation == 5);

  CoefficientModel above_one = sqrt_decay_model();
  above_one.overrides[3] = {1.5, 0.0};
  above_one.max_override = 3;
  const MonotonicityReport r2 = monotonicity_certificate(above_one, 1000);
  CHECK_FALSE(r2.ok);

  CoefficientModel positive_b = sqrt_decay_model();
  positive_b.overrides[4] = {0.9, 0.25};
  positive_b.max_override = 4;
  CHECK_FALSE(monotonicity_certificate(positive_b, 1000).ok);

  CHECK_THROWS_AS(monotonicity_certificate(sqrt_decay_model(), 0), ConfigError);
}

TEST_CASE("model JSON round-trips") {
  const CoefficientModel m = harmonic_a_model();
  const CoefficientModel back = model_from_json(model_to_json(m));
  CHECK(back.a_terms.size() == 1);
  CHECK(back.a_terms[0].coeff == 1.0);
  CHECK(back.a_terms[0].exponent == 1.0);
  CHECK(back.max_override == 1);
  CHECK(back.overrides.at(1).first == 0.5);
  CHECK(eval_jacobi(back, 7).first == eval_jacobi(m, 7).first);
}

TEST_CASE("model JSON rejects malformed input") {
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"a_terms": "nope"})")),
                  ConfigError);
  // exponents must be positive and strictly increasing, leading coeff positive
  CHECK_THROWS_AS(
      model_from_json(nlohmann::json::parse(R"({"a_terms":[{"c":0.5,"tau":-1.0}]})")),
      ModelError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(
                      R"({"a_terms":[{"c":0.5,"tau":1.0},{"c":0.1,"tau":0.5}]})")),
                  ModelError);
  CHECK_THROWS_AS(
      model_from_json(nlohmann::json::parse(R"({"a_terms":[{"c":-0.5,"tau":1.0}]})")),
      ModelError);
  // override indices start at 1
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"overrides":{"0":[1.0,0.0]}})")),
                  ModelError);
}

TEST_CASE("verblunsky JSON parses both the pure and the general form") {
  const VerblunskyModel pure =
      verblunsky_from_json(nlohmann::json::parse(R"({"D":0.5,"tau":0.5,"n0":2})"));
  CHECK(pure.pure());
  CHECK(pure.shift == 2.0);
  CHECK(pure.terms[0].coeff == 0.5);

  const VerblunskyModel multi = verblunsky_from_json(nlohmann::json::parse(
      R"({"alpha_terms":[{"D":0.3,"tau":0.4},{"D":0.2,"tau":0.9}],"n0":1})"));
  CHECK(multi.terms.size() == 2);
  CHECK_FALSE(multi.pure());

  // the pure form requires D < n0^tau so |alpha_0| < 1
  CHECK_THROWS_AS(verblunsky_from_json(nlohmann::json::parse(R"({"D":1.5,"tau":0.5,"n0":2})")),
                  ModelError);

  const VerblunskyModel back = verblunsky_from_json(verblunsky_to_json(pure));
  CHECK(back.shift == pure.shift);
  CHECK(back.terms[0].exponent == pure.terms[0].exponent);
}

TEST_CASE("model files dispatch on their top-level keys") {
  CHECK_THROWS_AS(load_model_file("/nonexistent/p.json"), ConfigError);
}
