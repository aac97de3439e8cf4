#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "specedge/coefficients.hpp"
#include "specedge/edge.hpp"
#include "specedge/errors.hpp"
#include "specedge/recurrence.hpp"

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

CoefficientModel chebyshev_model() {
  CoefficientModel m;
  m.overrides[1] = {std::sqrt(2.0), 0.0};
  m.max_override = 1;
  m.n0_monotone = 2;
  return m;
}

ScaledSolution dirichlet_seed() {
  ScaledSolution s;
  s.u_curr = 1.0;
  s.u_prev = 0.0;
  s.index = 1;
  return s;
}

ScaledSolution neumann_seed() {
  ScaledSolution s;
  s.u_curr = 0.0;
  s.u_prev = 1.0;
  s.index = 1;
  return s;
}

double value_of(const ScaledSolution& s) { return s.u_curr * std::exp(s.log_scale); }

}  // namespace

TEST_CASE("free dirichlet solution at the edge is u_n = n") {
  const CoefficientModel free_model;
  for (long long n : {1LL, 2LL, 17LL, 1000LL}) {
    const ScaledSolution s = dirichlet(free_model, 2.0, n);
    CHECK(s.index == n);
    CHECK(value_of(s) == doctest::Approx(static_cast<double>(n)).epsilon(1e-13));
  }
}

TEST_CASE("dirichlet solution matches the frozen interior value") {
  const ScaledSolution s = dirichlet(harmonic_a_model(), 1.9, 21);
  CHECK(s.index == 21);
  CHECK(value_of(s) == doctest::Approx(16479.6485233891).epsilon(1e-10));
}

TEST_CASE("renormalization keeps mantissas bounded on growing solutions") {
  // x = 1.99 puts the sqrt tail in its hyperbolic regime out to n = 2500,
  // where the dirichlet solution grows exponentially
  const ScaledSolution s = dirichlet(sqrt_decay_model(), 1.99, 2600);
  CHECK(std::max(std::abs(s.u_curr), std::abs(s.u_prev)) <= 2.0);
  CHECK(std::max(std::abs(s.u_curr), std::abs(s.u_prev)) >= 0.5);
  CHECK(s.log_scale > 20.0);  // genuinely exponential growth got absorbed
}

TEST_CASE("trajectory recording respects the stride and keeps the endpoint") {
  std::vector<TrajectoryPoint> traj;
  dirichlet(CoefficientModel{}, 2.0, 100, &traj, 7);
  REQUIRE(traj.size() == 16);  // 1, 8, ..., 99 and the final 100
  CHECK(traj.front().n == 1);
  CHECK(traj[1].n == 8);
  CHECK(traj.back().n == 100);
  for (const TrajectoryPoint& p : traj)
    CHECK(p.mantissa * std::exp(p.log_scale) ==
          doctest::Approx(static_cast<double>(p.n)).epsilon(1e-13));
}

TEST_CASE("stepping validates its inputs") {
  ScaledSolution bad = dirichlet_seed();
  bad.index = 0;
  CHECK_THROWS_AS(step(bad, CoefficientModel{}, 2.0), ConfigError);

  ScaledSolution zero;
  zero.index = 5;
  CHECK_THROWS_AS(step(zero, CoefficientModel{}, 2.0), DegenerateSolutionError);

  CHECK_THROWS_AS(dirichlet(CoefficientModel{}, 2.0, 0), ConfigError);
  std::vector<TrajectoryPoint> traj;
  CHECK_THROWS_AS(dirichlet(CoefficientModel{}, 2.0, 10, &traj, 0), ConfigError);
}

TEST_CASE("wronskian of the canonical pair starts at one and never drifts") {
  // drift is measured at oscillatory energies: inside a long hyperbolic
  // stretch both solutions collapse onto the dominant direction and the
  // cross term cancels catastrophically, which no renormalization can fix
  for (const CoefficientModel& m :
       {CoefficientModel{}, sqrt_decay_model(), harmonic_a_model(), chebyshev_model()}) {
    const SignedLog w = wronskian(dirichlet_seed(), neumann_seed(), m);
    CHECK(w.sign == 1);
    CHECK(w.log_abs == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(wronskian_drift(m, 1.5, dirichlet_seed(), neumann_seed(), 100000) < 1e-10);
  }
  for (const CoefficientModel& m : {CoefficientModel{}, chebyshev_model()}) {
    CHECK(wronskian_drift(m, 1.99, dirichlet_seed(), neumann_seed(), 100000) < 1e-10);
  }

  ScaledSolution u = dirichlet_seed();
  ScaledSolution v = dirichlet_seed();
  v.index = 3;
  CHECK_THROWS_AS(wronskian(u, v, CoefficientModel{}), ConfigError);
  CHECK_THROWS_AS(wronskian_drift(CoefficientModel{}, 1.5, dirichlet_seed(), dirichlet_seed(), 10),
                  DegenerateSolutionError);
}

TEST_CASE("edge certificate reproduces the frozen constants") {
  const SubordinateCertificate cert = subordinate_at_edge(sqrt_decay_model(), 100000);
  CHECK(cert.holds);
  CHECK(cert.monotone_ok);
  CHECK(cert.n0 == 1);
  CHECK(cert.c_lower == doctest::Approx(1.0912306706).epsilon(1e-8));
  CHECK(cert.c_upper == doctest::Approx(3.8193073470).epsilon(1e-8));
  CHECK(cert.min_slack_lower == doctest::Approx(0.708).epsilon(0.01));
  CHECK(cert.min_slack_upper == doctest::Approx(0.545).epsilon(0.01));
  CHECK(cert.bisection_t == doctest::Approx(0.48420532546885).epsilon(1e-9));
  CHECK(cert.bisection_agreement < 1e-6);
  CHECK(cert.window_agreement <= 1e-10);

  // log v at decade anchors (log_v[i] holds n = n0 - 1 + i)
  const auto log_v_at = [&](long long n) {
    return cert.log_v[static_cast<size_t>(n - (cert.n0 - 1))];
  };
  CHECK(log_v_at(10) == doctest::Approx(-4.5777087882).epsilon(1e-9));
  CHECK(log_v_at(100) == doctest::Approx(-29.3311999033).epsilon(1e-9));
  CHECK(log_v_at(1000) == doctest::Approx(-167.67287061608).epsilon(1e-9));
  CHECK(log_v_at(100000) == doctest::Approx(-5304.8771594).epsilon(1e-9));
  CHECK(std::abs(log_v_at(cert.n0)) < 1e-14);  // normalization v_{n0} = 1
}

TEST_CASE("edge certificate is stable when the horizon shrinks a decade") {
  const SubordinateCertificate cert = subordinate_at_edge(sqrt_decay_model(), 10000);
  CHECK(cert.holds);
  CHECK(cert.c_lower == doctest::Approx(1.0912306706).epsilon(1e-6));
  const auto log_v_at = [&](long long n) {
    return cert.log_v[static_cast<size_t>(n - (cert.n0 - 1))];
  };
  CHECK(log_v_at(1000) == doctest::Approx(-167.67287061608).epsilon(1e-9));
}

TEST_CASE("edge certificate input validation and stabilization cap") {
  CHECK_THROWS_AS(subordinate_at_edge(sqrt_decay_model(), 10), ConfigError);

  CoefficientModel bumpy = sqrt_decay_model();
  bumpy.overrides[5] = {0.99, 0.0};
  bumpy.max_override = 5;
  CHECK_THROWS_AS(subordinate_at_edge(bumpy, 1000), ModelError);

  // constant-coefficient tails stabilize only polynomially: the default
  // tolerance exhausts the doubling cap, a loose one succeeds
  CHECK_THROWS_AS(subordinate_at_edge(chebyshev_model(), 200), NumericError);
  const SubordinateCertificate loose = subordinate_at_edge(chebyshev_model(), 200, 1e-3);
  CHECK(loose.holds);
  CHECK(loose.monotone_ok);
}

TEST_CASE("dirichlet growth test separates the bundled models") {
  const SubordinacyDecision cheb = dirichlet_subordinacy_check(chebyshev_model(), 100000);
  CHECK(cheb.status == Subordinacy::subordinate);
  CHECK(cheb.decade_ratio == doctest::Approx(0.1).epsilon(1e-3));
  CHECK_FALSE(cheb.trace.empty());

  const SubordinacyDecision free_case = dirichlet_subordinacy_check(CoefficientModel{}, 100000);
  CHECK(free_case.status == Subordinacy::not_subordinate);
  CHECK(free_case.decade_ratio == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(dirichlet_subordinacy_check(CoefficientModel{}, 50), ConfigError);
}

TEST_CASE("normalized growth envelope obeys its bounds below the turning point") {
  for (double x : {1.5, 1.9, 1.99}) {
    for (const CoefficientModel& m : {harmonic_a_model(), sqrt_decay_model()}) {
      const PhiDiagnostics d = phi_diagnostics(m, x);
      CHECK(d.bounds_ok);
      CHECK(d.worst_slack > -1e-12);
      CHECK(d.Phi.size() == static_cast<size_t>(d.N - d.n0 + 3));
      CHECK(d.Phi.front() == 0.0);
      CHECK(d.Phi[1] == 1.0);
    }
  }

  // frozen terminal values for the harmonic tail
  CHECK(phi_diagnostics(harmonic_a_model(), 1.5).Phi.back() ==
        doctest::Approx(2.16917612995).epsilon(1e-9));
  CHECK(phi_diagnostics(harmonic_a_model(), 1.9).Phi.back() ==
        doctest::Approx(3.30144539542).epsilon(1e-9));
  CHECK(phi_diagnostics(harmonic_a_model(), 1.99).Phi.back() ==
        doctest::Approx(6.82496409822).epsilon(1e-9));

  // the sqrt tail at x = 1.5 turns at N = 1: Phi_2 = 1 + e^{-2 gamma_1} = 2 exactly
  CHECK(phi_diagnostics(sqrt_decay_model(), 1.5).Phi.back() == doctest::Approx(2.0));
}

TEST_CASE("oscillatory sandwich and ratio bounds hold above the turning point") {
  const CoefficientModel m = sqrt_decay_model();
  const double x = 1.9;
  const long long N = turning_point(m, x);  // 25
  ScaledSolution sol = dirichlet(m, x, 2 * N);
  const OscillatoryDiagnostics d = oscillatory_diagnostics(m, x, sol, 5000);
  CHECK(d.sandwich_ok);
  CHECK(d.ratio_ok);
  CHECK(d.worst_sandwich_slack > -1e-12);
  CHECK(d.worst_ratio_slack > -1e-12);
  CHECK(d.n_start == 2 * N);
  CHECK(d.n_end == 5000);
  CHECK_FALSE(d.y_log_abs.empty());

  // starting at or below the turning point the rotation angle is undefined
  ScaledSolution low = dirichlet(m, x, std::max<long long>(2, N - 2));
  CHECK_THROWS_AS(oscillatory_diagnostics(m, x, low, 5000), NumericError);
  CHECK_THROWS_AS(oscillatory_diagnostics(m, x, sol, sol.index), ConfigError);
}
