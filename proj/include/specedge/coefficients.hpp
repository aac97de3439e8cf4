#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace specedge {

// ============================================================================
// Model types
// ============================================================================

/// One decaying tail term coeff * n^(-exponent).
struct PowerLawTerm {
  double coeff = 0.0;
  double exponent = 0.0;
};

/// Verblunsky sequence alpha_n = -sum_i D_i (n + n0)^(-tau_i) for n >= 0.
/// The pure one-term form is the shifted power law alpha_n = -D/(n+n0)^tau.
struct VerblunskyModel {
  std::vector<PowerLawTerm> terms;  ///< (D_i, tau_i), exponents strictly increasing
  double shift = 0.0;               ///< n0 >= 0

  bool pure() const { return terms.size() == 1; }
};

/// Jacobi parameters
///   a_n = 1 - sum_j c_j n^(-tau_j),   b_n = -sum_k d_k n^(-sigma_k),
/// with finitely many explicit (a_n, b_n) overrides taking precedence.
struct CoefficientModel {
  std::vector<PowerLawTerm> a_terms;  ///< (c_j, tau_j)
  std::vector<PowerLawTerm> b_terms;  ///< (d_k, sigma_k)
  long long n0_monotone = 1;          ///< index from which the tail is monotone
  std::unordered_map<long long, std::pair<double, double>> overrides;
  long long max_override = 0;  ///< largest override index, 0 when none

  /// When the model came out of szego_sieve_map, evaluation past the
  /// materialized overrides continues the sieve here instead of falling back
  /// to the (empty) power-law part.
  std::shared_ptr<const VerblunskyModel> sieve_source;
};

enum class TailCase { a_dominates, tie, b_dominates, both_constant };

/// Leading behaviour 2 - 2 a_n - b_n ~ C1 * n^(-beta).
struct TailClass {
  double beta = 0.0;
  double C1 = 0.0;  ///< zero only in the both_constant case
  TailCase which_case = TailCase::both_constant;
};

struct MonotonicityReport {
  bool ok = true;
  long long first_violation = 0;  ///< index of the offending value when !ok
  std::string what;
};

// ============================================================================
// Evaluation
// ============================================================================

/// (a_n, b_n) for n >= 1.  Overrides win over the sieve, the sieve over the
/// power laws.  Throws ModelError when the evaluated a_n is not positive.
std::pair<double, double> eval_jacobi(const CoefficientModel& model, long long n);

/// alpha_n for n >= 0.  Throws ModelError when |alpha_n| >= 1.
double eval_verblunsky(const VerblunskyModel& vmodel, long long n);

/// beta = min(tau_1, sigma_1) with the convention tau_1 = +inf for a == 1,
/// and the matching leading coefficient of 2 - 2 a_n - b_n.  Sieved models
/// report the tail class of their Verblunsky source.
TailClass tail_class(const CoefficientModel& model);

/// Tail class of the Jacobi image of a Verblunsky model: beta = 2 tau_1,
/// C1 = D_1^2.
TailClass szego_map_tail(const VerblunskyModel& vmodel);

/// Jacobi model with b == 0 and a_n^2 = (1 - alpha_{n-2})(1 + alpha_{n-1})
/// under the convention alpha_{-1} = -1 (so a_1^2 = 2 (1 + alpha_0)).
/// Indices 1..n_max are materialized as overrides; later indices evaluate
/// lazily from the retained Verblunsky source.  n0_monotone is inferred as
/// one past the last decrease of a_n over a scan of max(n_max, 4096) indices.
CoefficientModel szego_sieve_map(const VerblunskyModel& vmodel, long long n_max);

/// Checks a_n <= a_{n+1} <= 1 and b_n <= b_{n+1} <= 0 for
/// n0_monotone <= n < horizon; reports the first offending index.
MonotonicityReport monotonicity_certificate(const CoefficientModel& model, long long horizon);

// ============================================================================
// Serialization
// ============================================================================

CoefficientModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const CoefficientModel& model);
VerblunskyModel verblunsky_from_json(const nlohmann::json& j);
nlohmann::json verblunsky_to_json(const VerblunskyModel& vmodel);

/// Either kind of model file.  A top-level "D" or "alpha_terms" key marks a
/// Verblunsky file; anything else parses as a Jacobi coefficient model.
struct ModelFile {
  bool is_verblunsky = false;
  CoefficientModel jacobi;
  VerblunskyModel verblunsky;
};

ModelFile load_model_file(const std::string& path);

}  // namespace specedge
