// Batch front door: loads coefficient models, runs the density / edge /
// prediction / verification pipelines and emits deterministic CSV or JSON.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specedge/asymptotics.hpp"
#include "specedge/coefficients.hpp"
#include "specedge/density.hpp"
#include "specedge/edge.hpp"
#include "specedge/errors.hpp"
#include "specedge/io.hpp"
#include "specedge/numeric.hpp"
#include "specedge/recurrence.hpp"

namespace {

using namespace specedge;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char trailing = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.points, &trailing) != 3)
    throw ConfigError("grid must be given as min:max:points, got '" + text + "'");
  if (!(g.lo < g.hi)) throw ConfigError("grid needs min < max, got '" + text + "'");
  if (g.points < 2) throw ConfigError("grid needs at least 2 points");
  return g;
}

std::vector<double> make_grid(const GridSpec& g, bool linear) {
  std::vector<double> out(static_cast<size_t>(g.points));
  if (linear) {
    const double step = (g.hi - g.lo) / (g.points - 1);
    for (int i = 0; i < g.points; ++i) out[static_cast<size_t>(i)] = g.lo + step * i;
  } else {
    if (!(g.lo > 0.0)) throw ConfigError("log-spaced grids need a positive minimum");
    const double llo = std::log(g.lo);
    const double step = (std::log(g.hi) - llo) / (g.points - 1);
    for (int i = 0; i < g.points; ++i) out[static_cast<size_t>(i)] = std::exp(llo + step * i);
  }
  out.front() = g.lo;
  out.back() = g.hi;
  return out;
}

void check_delta_grid(const std::vector<double>& deltas) {
  for (double d : deltas)
    if (!(d > 0.0) || !(d < 4.0)) throw ConfigError("delta grid values must lie in (0, 4)");
}

void check_theta_grid(const std::vector<double>& thetas) {
  for (double t : thetas)
    if (!(t > 0.0) || !(t < kTwoPi)) throw ConfigError("theta grid values must lie in (0, 2 pi)");
}

// ---------------------------------------------------------------------------
// Shared options
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string model_path;
  std::string grid;
  bool linear = false;
  std::string out;
  std::string format = "csv";
  int workers = 1;
  double tol_rel = 1e-6;
  int max_doublings = 6;
  double eta = 0.0;
  long long n_max = 0;
  std::string variant = "corrected";
  long long horizon = 100000;
  double tol_sub = 1e-6;
  double cert_tol = 1e-10;
  std::string series_path;
};

void add_model_option(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--model", o.model_path, "model JSON file")->required();
}

void add_output_options(CLI::App* sub, CommonOpts& o, bool with_format = true) {
  sub->add_option("--out", o.out, "output file (default: stdout)");
  if (with_format)
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_grid_options(CLI::App* sub, CommonOpts& o, const std::string& fallback) {
  sub->add_option("--grid", o.grid, "grid as min:max:points (default " + fallback + ")");
  sub->add_flag("--linear", o.linear, "linear spacing instead of log spacing");
}

void add_density_options(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--tol-rel", o.tol_rel, "doubling convergence tolerance on log f");
  sub->add_option("--max-doublings", o.max_doublings, "depth-doubling budget");
  sub->add_option("--eta", o.eta, "imaginary regularization (0 = boundary mode)");
  sub->add_option("--n-max", o.n_max, "starting recursion depth override");
  sub->add_option("--workers", o.workers, "worker threads for grid loops");
}

DensityControls controls_from(const CommonOpts& o) {
  DensityControls ctrl;
  ctrl.n_max = o.n_max;
  ctrl.eta = o.eta;
  ctrl.tol_rel = o.tol_rel;
  ctrl.max_doublings = o.max_doublings;
  return ctrl;
}

CoefficientModel jacobi_from(const ModelFile& mf) {
  if (mf.is_verblunsky) return szego_sieve_map(mf.verblunsky, 4096);
  return mf.jacobi;
}

void emit(const std::string& out_path, const std::string& body) {
  if (out_path.empty()) {
    std::cout << body;
  } else {
    write_text_file(out_path, body);
  }
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

int run_density(const CommonOpts& o) {
  const ModelFile mf = load_model_file(o.model_path);
  const CoefficientModel model = jacobi_from(mf);
  const std::vector<double> deltas =
      make_grid(parse_grid(o.grid.empty() ? "1e-4:1e-1:25" : o.grid), o.linear);
  check_delta_grid(deltas);
  const DensityCurve curve = density_curve(model, deltas, controls_from(o), o.workers);

  if (o.format == "json") {
    nlohmann::json j{{"delta", curve.deltas},     {"x", curve.xs},
                     {"f", curve.f_values},       {"logf", curve.logf},
                     {"n_max_used", curve.n_max_used}};
    j["converged"] = nlohmann::json::array();
    for (char c : curve.converged) j["converged"].push_back(c != 0);
    emit(o.out, j.dump(2) + "\n");
    return 0;
  }

  std::string body = "delta,x,f,logf,converged,n_max_used\n";
  for (size_t i = 0; i < curve.deltas.size(); ++i) {
    body += csv_row({format_g17(curve.deltas[i]), format_g17(curve.xs[i]),
                     format_g17(curve.f_values[i]), format_g17(curve.logf[i]),
                     curve.converged[i] ? "1" : "0",
                     std::to_string(curve.n_max_used[i])});
  }
  emit(o.out, body);
  return 0;
}

// ---------------------------------------------------------------------------
// edge
// ---------------------------------------------------------------------------

int run_edge(const CommonOpts& o) {
  const ModelFile mf = load_model_file(o.model_path);
  const CoefficientModel model = jacobi_from(mf);
  const std::vector<double> deltas =
      make_grid(parse_grid(o.grid.empty() ? "1e-4:1e-1:25" : o.grid), o.linear);
  check_delta_grid(deltas);

  std::string body = "x,N,g,h,kappa_next\n";
  nlohmann::json rows = nlohmann::json::array();
  for (double d : deltas) {
    const double x = 2.0 - d;
    const EdgeData ed = edge_data(model, x, 0);
    if (o.format == "json") {
      rows.push_back({{"x", x},
                      {"N", ed.N},
                      {"g", ed.g},
                      {"h", ed.h},
                      {"kappa_next", ed.kappa_next}});
    } else {
      body += csv_row({format_g17(x), std::to_string(ed.N), format_g17(ed.g),
                       format_g17(ed.h), format_g17(ed.kappa_next)});
    }
  }
  emit(o.out, o.format == "json" ? rows.dump(2) + "\n" : body);
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

LadderVariant variant_from(const std::string& name) {
  if (name == "corrected") return LadderVariant::corrected;
  if (name == "printed") return LadderVariant::printed;
  throw ConfigError("unknown ladder variant '" + name + "'");
}

ExpansionSeries predicted_series(const ModelFile& mf, LadderVariant variant) {
  if (mf.is_verblunsky) {
    if (mf.verblunsky.pure()) return circle_series_pure(mf.verblunsky);
    return circle_leading_term(mf.verblunsky.terms.front().coeff,
                               mf.verblunsky.terms.front().exponent);
  }
  const CoefficientModel& model = mf.jacobi;
  if (model.a_terms.size() == 1 && model.b_terms.empty() && !model.sieve_source)
    return edge_series_pure_a(model.a_terms[0].coeff, model.a_terms[0].exponent, variant);
  return edge_leading_term(tail_class(model));
}

int run_predict(const CommonOpts& o) {
  const ModelFile mf = load_model_file(o.model_path);
  const ExpansionSeries series = predicted_series(mf, variant_from(o.variant));
  emit(o.out, series_to_json(series).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const CommonOpts& o) {
  const ModelFile mf = load_model_file(o.model_path);
  const LadderVariant variant = variant_from(o.variant);

  ExpansionSeries series;
  if (!o.series_path.empty()) {
    std::ifstream in(o.series_path);
    if (!in) throw ConfigError("cannot open series file '" + o.series_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError("cannot parse series file '" + o.series_path + "': " + e.what());
    }
    series = series_from_json(j);
  } else {
    series = predicted_series(mf, variant);
  }

  VerificationReport rep;
  if (mf.is_verblunsky) {
    const std::vector<double> thetas =
        make_grid(parse_grid(o.grid.empty() ? "1e-3:0.5:25" : o.grid), o.linear);
    check_theta_grid(thetas);
    rep = verify_expansion_circle(mf.verblunsky, series, thetas, controls_from(o), o.workers);
  } else {
    const std::vector<double> deltas =
        make_grid(parse_grid(o.grid.empty() ? "1e-4:1e-1:25" : o.grid), o.linear);
    check_delta_grid(deltas);
    rep = verify_expansion(mf.jacobi, series, deltas, controls_from(o), o.workers);
  }
  rep.variant = o.variant;

  const std::string body = report_to_json(rep).dump(2) + "\n";
  emit(o.out, body);
  if (!o.out.empty()) std::cout << rep.verdict << "\n";
  if (rep.verdict == "PASS") return 0;
  return rep.verdict == "FAIL" ? 5 : 4;
}

// ---------------------------------------------------------------------------
// opuc
// ---------------------------------------------------------------------------

int run_opuc(const CommonOpts& o) {
  const ModelFile mf = load_model_file(o.model_path);
  if (!mf.is_verblunsky)
    throw ConfigError("opuc needs a Verblunsky model file (keys D/tau or alpha_terms)");
  const std::vector<double> thetas =
      make_grid(parse_grid(o.grid.empty() ? "1e-3:0.5:25" : o.grid), o.linear);
  check_theta_grid(thetas);

  const ExpansionSeries series =
      mf.verblunsky.pure()
          ? circle_series_pure(mf.verblunsky)
          : circle_leading_term(mf.verblunsky.terms.front().coeff,
                                mf.verblunsky.terms.front().exponent);
  const CoefficientModel model = szego_sieve_map(mf.verblunsky, 4096);
  const DensityControls ctrl = controls_from(o);

  std::vector<double> log_w(thetas.size(), 0.0);
  std::vector<char> conv(thetas.size(), 0);
  parallel_for(thetas.size(), o.workers, [&](size_t i) {
    const DensityPoint pt = density(model, 2.0 * std::cos(0.5 * thetas[i]), ctrl);
    if (!pt.converged) return;
    log_w[i] = std::log(kTwoPi * std::abs(std::sin(0.5 * thetas[i]))) + pt.log_f;
    conv[i] = 1;
  });

  std::string body = "theta,x,log_w,w,predicted_log_w,residual,converged\n";
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < thetas.size(); ++i) {
    const double theta = thetas[i];
    const double x = 2.0 * std::cos(0.5 * theta);
    const double s = std::abs(std::sin(0.5 * theta));
    const double var = series.variable == SeriesVariable::abs_theta ? theta : s;
    const double predicted = series.eval_log_density(var);
    const double resid = conv[i] ? log_w[i] - predicted : std::numeric_limits<double>::quiet_NaN();
    const double lw = conv[i] ? log_w[i] : std::numeric_limits<double>::quiet_NaN();
    if (o.format == "json") {
      rows.push_back({{"theta", theta},
                      {"x", x},
                      {"log_w", lw},
                      {"w", std::exp(lw)},
                      {"predicted_log_w", predicted},
                      {"residual", resid},
                      {"converged", conv[i] != 0}});
    } else {
      body += csv_row({format_g17(theta), format_g17(x), format_g17(lw),
                       format_g17(std::exp(lw)), format_g17(predicted), format_g17(resid),
                       conv[i] ? "1" : "0"});
    }
  }
  emit(o.out, o.format == "json" ? rows.dump(2) + "\n" : body);
  return 0;
}

// ---------------------------------------------------------------------------
// subordinate
// ---------------------------------------------------------------------------

std::string subordinacy_name(Subordinacy s) {
  switch (s) {
    case Subordinacy::subordinate: return "subordinate";
    case Subordinacy::not_subordinate: return "not_subordinate";
    case Subordinacy::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int run_subordinate(const CommonOpts& o) {
  const ModelFile mf = load_model_file(o.model_path);
  const CoefficientModel model = jacobi_from(mf);

  if (!o.series_path.empty()) {  // reused as --trajectory output path
    std::vector<TrajectoryPoint> traj;
    const long long stride = std::max<long long>(1, o.horizon / 4096);
    dirichlet(model, 2.0, o.horizon, &traj, stride);
    std::string body = "n,mantissa,log_scale\n";
    for (const TrajectoryPoint& p : traj)
      body += csv_row({std::to_string(p.n), format_g17(p.mantissa), format_g17(p.log_scale)});
    write_text_file(o.series_path, body);
  }

  const SubordinacyDecision decision =
      dirichlet_subordinacy_check(model, o.horizon, o.tol_sub);
  const SubordinateCertificate cert = subordinate_at_edge(model, o.horizon, o.cert_tol);

  nlohmann::json j;
  j["dirichlet"] = {{"status", subordinacy_name(decision.status)},
                    {"min_ratio", decision.min_ratio},
                    {"decade_ratio", decision.decade_ratio}};
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [n, v] : decision.trace) trace.push_back({n, v});
  j["dirichlet"]["trace"] = std::move(trace);

  nlohmann::json sample = nlohmann::json::array();
  for (long long n = 10; n <= cert.horizon; n *= 10)
    if (n >= cert.n0 - 1)
      sample.push_back({n, cert.log_v[static_cast<size_t>(n - (cert.n0 - 1))]});
  j["certificate"] = {{"holds", cert.holds},
                      {"n0", cert.n0},
                      {"horizon", cert.horizon},
                      {"c_lower", cert.c_lower},
                      {"c_upper", cert.c_upper},
                      {"monotone_ok", cert.monotone_ok},
                      {"min_slack_lower", cert.min_slack_lower},
                      {"min_slack_upper", cert.min_slack_upper},
                      {"window_agreement", cert.window_agreement},
                      {"backward_m", cert.backward_m},
                      {"bisection_t", cert.bisection_t},
                      {"bisection_agreement", cert.bisection_agreement},
                      {"log_v_sample", std::move(sample)}};

  emit(o.out, j.dump(2) + "\n");
  return cert.holds ? 0 : 5;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

void expect(bool ok, const std::string& what) {
  if (!ok) throw VerificationError("selftest: " + what);
  std::cout << "ok: " << what << "\n";
}

int run_selftest() {
  CoefficientModel free_model;
  CoefficientModel cheb;
  cheb.n0_monotone = 2;
  cheb.overrides[1] = {std::sqrt(2.0), 0.0};
  cheb.max_override = 1;

  DensityControls ctrl;
  for (double x : {-1.2, 0.5, 1.7}) {
    const double exact = std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
    const DensityPoint pt = density(free_model, x, ctrl);
    expect(pt.converged && std::abs(pt.f / exact - 1.0) < 1e-10,
           "free density matches closed form at x = " + format_g17(x));
  }
  for (double x : {-0.3, 1.5}) {
    const double exact = 1.0 / (std::numbers::pi * std::sqrt(4.0 - x * x));
    const DensityPoint pt = density(cheb, x, ctrl);
    expect(pt.converged && std::abs(pt.f / exact - 1.0) < 1e-10,
           "two-sided-constant density matches closed form at x = " + format_g17(x));
  }

  const std::complex<double> z{0.3, 1e-3};
  const std::complex<double> m = free_m(z);
  expect(std::abs(m + 1.0 / (z + m)) < 1e-14, "free m-function fixed point");

  expect(std::abs(beta_integral(1.0, 0) - std::numbers::pi / 2.0) < 1e-12,
         "beta integral closed form at beta = 1");
  const double quad = beta_integral_quad(0.5, 0);
  expect(std::abs(quad - beta_integral(0.5, 0)) < 1e-10,
         "beta integral quadrature agrees with Gamma form");

  const ExpansionSeries ladder = edge_series_pure_a(0.25, 0.5);
  TailClass tail;
  tail.beta = 0.5;
  tail.C1 = 0.5;
  tail.which_case = TailCase::a_dominates;
  const ExpansionSeries lead = edge_leading_term(tail);
  expect(std::abs(ladder.terms[0].Q / lead.terms[0].Q - 1.0) < 1e-12,
         "ladder order zero matches leading-term formula");

  VerblunskyModel vm;
  vm.terms = {{0.7, 0.4}};
  vm.shift = 2.0;
  const ExpansionSeries circle = circle_series_pure(vm);
  const ExpansionSeries circle_lead = circle_leading_term(0.7, 0.4);
  const double p0_scaled = circle.terms[0].Q * std::pow(2.0, 1.0 / 0.4 - 1.0);
  expect(std::abs(p0_scaled / circle_lead.terms[0].Q - 1.0) < 1e-12,
         "circle ladder order zero matches leading-term formula");

  expect(std::abs(q_sup(0.01) - 0.0066669777909000085) < 1e-12, "q_sup series anchor");
  expect(std::abs(arccosh1p(1.0 / 7.0) - std::log((8.0 + std::sqrt(15.0)) / 7.0)) < 1e-15,
         "arccosh anchor");
  series_coeffs(CoeffFamily::arccosh_half_shift, 6);
  series_coeffs(CoeffFamily::arccosh_reciprocal, 6);
  std::cout << "ok: phase-series coefficient validation\n";

  std::cout << "selftest passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral density edge toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::function<int()> action;

  CLI::App* density_cmd = app.add_subcommand("density", "spectral density on a delta grid");
  add_model_option(density_cmd, o);
  add_grid_options(density_cmd, o, "1e-4:1e-1:25");
  add_density_options(density_cmd, o);
  add_output_options(density_cmd, o);
  density_cmd->callback([&] { action = [&] { return run_density(o); }; });

  CLI::App* edge_cmd = app.add_subcommand("edge", "turning point and phase sums on a delta grid");
  add_model_option(edge_cmd, o);
  add_grid_options(edge_cmd, o, "1e-4:1e-1:25");
  add_output_options(edge_cmd, o);
  edge_cmd->callback([&] { action = [&] { return run_edge(o); }; });

  CLI::App* predict_cmd = app.add_subcommand("predict", "closed-form edge expansion for a model");
  add_model_option(predict_cmd, o);
  predict_cmd->add_option("--thm4-variant", o.variant, "pure-a ladder variant")
      ->check(CLI::IsMember({"corrected", "printed"}));
  add_output_options(predict_cmd, o, false);
  predict_cmd->callback([&] { action = [&] { return run_predict(o); }; });

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "slope test of an expansion against the density oracle");
  add_model_option(verify_cmd, o);
  verify_cmd->add_option("--series", o.series_path, "series JSON file (default: predicted)");
  verify_cmd->add_option("--thm4-variant", o.variant, "pure-a ladder variant")
      ->check(CLI::IsMember({"corrected", "printed"}));
  add_grid_options(verify_cmd, o, "1e-4:1e-1:25 (theta: 1e-3:0.5:25)");
  add_density_options(verify_cmd, o);
  add_output_options(verify_cmd, o, false);
  verify_cmd->callback([&] { action = [&] { return run_verify(o); }; });

  CLI::App* opuc_cmd = app.add_subcommand("opuc", "circle-side density on a theta grid");
  add_model_option(opuc_cmd, o);
  add_grid_options(opuc_cmd, o, "1e-3:0.5:25");
  add_density_options(opuc_cmd, o);
  add_output_options(opuc_cmd, o);
  opuc_cmd->callback([&] { action = [&] { return run_opuc(o); }; });

  CLI::App* sub_cmd =
      app.add_subcommand("subordinate", "edge subordinacy certificate and Dirichlet check");
  add_model_option(sub_cmd, o);
  sub_cmd->add_option("--horizon", o.horizon, "largest index examined");
  sub_cmd->add_option("--tol-sub", o.tol_sub, "subordinacy ratio threshold");
  sub_cmd->add_option("--cert-tol", o.cert_tol, "backward-window stabilization tolerance");
  sub_cmd->add_option("--trajectory", o.series_path,
                      "also dump the Dirichlet solution at x = 2 to this CSV file");
  add_output_options(sub_cmd, o, false);
  sub_cmd->callback([&] { action = [&] { return run_subordinate(o); }; });

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "closed-form and identity checks");
  selftest_cmd->callback([&] { action = [] { return run_selftest(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
