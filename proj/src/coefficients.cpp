#include "specedge/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "specedge/errors.hpp"
#include "specedge/numeric.hpp"

namespace specedge {

namespace {

double power_tail(const std::vector<PowerLawTerm>& terms, double n) {
  double s = 0.0;
  for (const auto& t : terms) s += t.coeff / pow_fast(n, t.exponent);
  return s;
}

void validate_terms(const std::vector<PowerLawTerm>& terms, const std::string& which) {
  double prev = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!(terms[i].exponent > 0.0))
      throw ModelError(which + " term " + std::to_string(i) + " has nonpositive exponent");
    if (i > 0 && !(terms[i].exponent > prev))
      throw ModelError(which + " exponents must be strictly increasing");
    prev = terms[i].exponent;
  }
  if (!terms.empty() && !(terms.front().coeff > 0.0))
    throw ModelError(which + " leading coefficient must be positive");
}

/// a_n of the sieved model; alpha_{-1} = -1 makes a_1^2 = 2 (1 + alpha_0).
double sieve_a(const VerblunskyModel& vm, long long n) {
  const double am2 = n >= 2 ? eval_verblunsky(vm, n - 2) : -1.0;
  const double am1 = eval_verblunsky(vm, n - 1);
  const double a_sq = (1.0 - am2) * (1.0 + am1);
  if (!(a_sq > 0.0))
    throw ModelError("sieved a_" + std::to_string(n) + "^2 = " + std::to_string(a_sq) +
                     " is not positive");
  return std::sqrt(a_sq);
}

}  // namespace

// ============================================================================
// Evaluation
// ============================================================================

std::pair<double, double> eval_jacobi(const CoefficientModel& model, long long n) {
  if (n < 1) throw ModelError("Jacobi index must be >= 1, got " + std::to_string(n));
  if (n <= model.max_override) {
    const auto it = model.overrides.find(n);
    if (it != model.overrides.end()) {
      if (!(it->second.first > 0.0))
        throw ModelError("a_" + std::to_string(n) + " = " + std::to_string(it->second.first) +
                         " is not positive");
      return it->second;
    }
  }
  if (model.sieve_source) return {sieve_a(*model.sieve_source, n), 0.0};
  const double nn = static_cast<double>(n);
  const double a = 1.0 - power_tail(model.a_terms, nn);
  const double b = -power_tail(model.b_terms, nn);
  if (!(a > 0.0))
    throw ModelError("a_" + std::to_string(n) + " = " + std::to_string(a) + " is not positive");
  return {a, b};
}

double eval_verblunsky(const VerblunskyModel& vmodel, long long n) {
  if (n < 0) throw ModelError("Verblunsky index must be >= 0, got " + std::to_string(n));
  const double shifted = static_cast<double>(n) + vmodel.shift;
  double alpha = 0.0;
  for (const auto& t : vmodel.terms) alpha -= t.coeff / pow_fast(shifted, t.exponent);
  if (!(std::abs(alpha) < 1.0))
    throw ModelError("alpha_" + std::to_string(n) + " = " + std::to_string(alpha) +
                     " leaves (-1, 1)");
  return alpha;
}

TailClass tail_class(const CoefficientModel& model) {
  if (model.sieve_source) return szego_map_tail(*model.sieve_source);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  TailClass tc;
  const double tau1 = model.a_terms.empty() ? kInf : model.a_terms.front().exponent;
  const double sigma1 = model.b_terms.empty() ? kInf : model.b_terms.front().exponent;
  tc.beta = std::min(tau1, sigma1);
  if (tau1 == kInf && sigma1 == kInf) {
    tc.which_case = TailCase::both_constant;
    tc.C1 = 0.0;
  } else if (tau1 < sigma1) {
    tc.which_case = TailCase::a_dominates;
    tc.C1 = 2.0 * model.a_terms.front().coeff;
  } else if (tau1 > sigma1) {
    tc.which_case = TailCase::b_dominates;
    tc.C1 = model.b_terms.front().coeff;
  } else {
    tc.which_case = TailCase::tie;
    tc.C1 = 2.0 * model.a_terms.front().coeff + model.b_terms.front().coeff;
  }
  return tc;
}

TailClass szego_map_tail(const VerblunskyModel& vmodel) {
  TailClass tc;
  if (vmodel.terms.empty()) {
    tc.beta = std::numeric_limits<double>::infinity();
    tc.which_case = TailCase::both_constant;
    return tc;
  }
  tc.beta = 2.0 * vmodel.terms.front().exponent;
  tc.C1 = vmodel.terms.front().coeff * vmodel.terms.front().coeff;
  tc.which_case = TailCase::a_dominates;
  return tc;
}

CoefficientModel szego_sieve_map(const VerblunskyModel& vmodel, long long n_max) {
  if (n_max < 1) throw ConfigError("sieve horizon must be >= 1");
  CoefficientModel model;
  model.sieve_source = std::make_shared<const VerblunskyModel>(vmodel);
  model.overrides.reserve(static_cast<std::size_t>(n_max));
  for (long long n = 1; n <= n_max; ++n)
    model.overrides.emplace(n, std::make_pair(sieve_a(vmodel, n), 0.0));
  model.max_override = n_max;

  // Monotone start: one past the last decrease of a_n over the scan window.
  const long long scan = std::max(n_max, 4096LL);
  long long last_drop = 0;
  double prev = sieve_a(vmodel, 1);
  for (long long n = 1; n < scan; ++n) {
    const double next = sieve_a(vmodel, n + 1);
    if (next < prev) last_drop = n;
    prev = next;
  }
  model.n0_monotone = last_drop + 1;
  return model;
}

MonotonicityReport monotonicity_certificate(const CoefficientModel& model, long long horizon) {
  if (horizon < model.n0_monotone)
    throw ConfigError("monotonicity horizon precedes the monotone start index");
  MonotonicityReport rep;
  const auto fail = [&rep](long long n, const std::string& what) {
    rep.ok = false;
    rep.first_violation = n;
    rep.what = what + " at n = " + std::to_string(n);
  };

  auto [a_prev, b_prev] = eval_jacobi(model, model.n0_monotone);
  if (a_prev > 1.0) {
    fail(model.n0_monotone, "a exceeds 1");
    return rep;
  }
  if (b_prev > 0.0) {
    fail(model.n0_monotone, "b exceeds 0");
    return rep;
  }
  for (long long n = model.n0_monotone; n < horizon; ++n) {
    const auto [a_next, b_next] = eval_jacobi(model, n + 1);
    if (a_next < a_prev) {
      fail(n, "a decreases");
      return rep;
    }
    if (a_next > 1.0) {
      fail(n + 1, "a exceeds 1");
      return rep;
    }
    if (b_next < b_prev) {
      fail(n, "b decreases");
      return rep;
    }
    if (b_next > 0.0) {
      fail(n + 1, "b exceeds 0");
      return rep;
    }
    a_prev = a_next;
    b_prev = b_next;
  }
  return rep;
}

// ============================================================================
// Serialization
// ============================================================================

CoefficientModel model_from_json(const nlohmann::json& j) {
  CoefficientModel m;
  try {
    if (j.contains("a_terms"))
      for (const auto& t : j.at("a_terms"))
        m.a_terms.push_back({t.at("c").get<double>(), t.at("tau").get<double>()});
    if (j.contains("b_terms"))
      for (const auto& t : j.at("b_terms"))
        m.b_terms.push_back({t.at("d").get<double>(), t.at("sigma").get<double>()});
    m.n0_monotone = j.value("n0", 1LL);
    if (j.contains("overrides")) {
      for (const auto& [key, val] : j.at("overrides").items()) {
        const long long n = std::stoll(key);
        if (n < 1) throw ModelError("override index must be >= 1, got " + key);
        m.overrides[n] = {val.at(0).get<double>(), val.at(1).get<double>()};
        m.max_override = std::max(m.max_override, n);
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad coefficient model JSON: ") + e.what());
  }
  validate_terms(m.a_terms, "a");
  validate_terms(m.b_terms, "b");
  if (m.n0_monotone < 1) throw ModelError("n0 must be >= 1");
  return m;
}

nlohmann::json model_to_json(const CoefficientModel& model) {
  nlohmann::json j;
  j["a_terms"] = nlohmann::json::array();
  for (const auto& t : model.a_terms) j["a_terms"].push_back({{"c", t.coeff}, {"tau", t.exponent}});
  j["b_terms"] = nlohmann::json::array();
  for (const auto& t : model.b_terms)
    j["b_terms"].push_back({{"d", t.coeff}, {"sigma", t.exponent}});
  j["n0"] = model.n0_monotone;
  j["overrides"] = nlohmann::json::object();
  for (const auto& [n, ab] : model.overrides)
    j["overrides"][std::to_string(n)] = {ab.first, ab.second};
  return j;
}

VerblunskyModel verblunsky_from_json(const nlohmann::json& j) {
  VerblunskyModel vm;
  try {
    if (j.contains("alpha_terms")) {
      for (const auto& t : j.at("alpha_terms"))
        vm.terms.push_back({t.at("D").get<double>(), t.at("tau").get<double>()});
    } else {
      vm.terms.push_back({j.at("D").get<double>(), j.at("tau").get<double>()});
    }
    vm.shift = j.value("n0", 0.0);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad Verblunsky model JSON: ") + e.what());
  }
  validate_terms(vm.terms, "alpha");
  if (vm.shift < 0.0) throw ModelError("Verblunsky n0 must be >= 0");
  if (vm.pure()) {
    const auto& t = vm.terms.front();
    if (!(t.coeff < pow_fast(vm.shift, t.exponent)))
      throw ModelError("pure Verblunsky model needs D < n0^tau");
  }
  if (!vm.terms.empty()) (void)eval_verblunsky(vm, 0);
  return vm;
}

nlohmann::json verblunsky_to_json(const VerblunskyModel& vmodel) {
  nlohmann::json j;
  if (vmodel.pure()) {
    j["D"] = vmodel.terms.front().coeff;
    j["tau"] = vmodel.terms.front().exponent;
  } else {
    j["alpha_terms"] = nlohmann::json::array();
    for (const auto& t : vmodel.terms)
      j["alpha_terms"].push_back({{"D", t.coeff}, {"tau", t.exponent}});
  }
  j["n0"] = vmodel.shift;
  return j;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  ModelFile mf;
  if (j.is_object() && (j.contains("D") || j.contains("alpha_terms"))) {
    mf.is_verblunsky = true;
    mf.verblunsky = verblunsky_from_json(j);
  } else {
    mf.jacobi = model_from_json(j);
  }
  return mf;
}

}  // namespace specedge
