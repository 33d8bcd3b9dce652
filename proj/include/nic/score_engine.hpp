#pragma once

// Exact random-access information scores, criticality root-finding, conditional
// scores for correlated databases and the regularized angle optimization.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nic/rac_protocols.hpp"
#include "nic/score_report.hpp"

namespace nic {

inline constexpr int kMaxClosedFormDepth = 60;

/// 2^n (1 - h((1 + E^n)/2)). Throws std::overflow_error for n > 60.
Bits closed_form_score(int depth, double bias);
ScoreReport closed_form_report(int depth, double bias);

/// Score at effective bias visibility * E_iso(angle) for the quantum family.
Bits quantum_layer_score(int depth, double angle, double visibility = 1.0);

/// Sum over all 2^n query paths of 1 - h((1 + prod E_{b_l})/2), grouped by the
/// number of E1 factors so the cost is O(n) terms with binomial weights.
Bits asym_exact_score(int depth, double bias0, double bias1);

/// N - sum_K h(P_K).
Bits score_lower_bound_from_accuracy(std::span<const double> success);

/// 1 / (2 ln 2): the large-depth score at E = 1/sqrt(2).
double critical_constant();

class NoRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CriticalityResult {
  int depth = 0;
  Bits capacity = 1.0;
  double bias = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  int iterations = 0;
};

inline constexpr double kCriticalBiasTolerance = 1e-10;
inline constexpr double kCriticalScoreTolerance = 1e-9;
inline constexpr int kBisectionCap = 200;

/// Bias at which closed_form_score(depth, .) reaches `capacity`, by plain
/// bisection on [0,1]. Needs 0 < capacity < 2^depth; throws NoRootError when
/// capacity >= 2^depth.
CriticalityResult critical_bias(int depth, Bits capacity = 1.0);

/// Large-depth approximation (1/sqrt 2)(2 C ln 2)^(1/(2n)).
double critical_bias_asymptotic(int depth, Bits capacity = 1.0);

/// Episode record carrying the full database, for correlated-database scores.
struct DatabaseEpisode {
  Database database;
  std::uint32_t query = 0;
  Bit output = 0;
};

struct ConditionalScoreReport {
  Bits score = 0.0;
  std::vector<Bits> per_query;
  /// Right-hand side of the Fano audit: sum H(A_K|A_<K) - sum h(P_err,K).
  Bits fano_bound = 0.0;
  /// Unconditioned sum of I(A_K : beta | b=K) on the same data.
  Bits unconditioned = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMaxConditionalDatabaseBits = 12;

/// Plug-in estimate of sum_K I(A_K : beta | b=K, A_<K). Contexts A_<K are
/// weighted by their empirical frequency among records with b = K; contexts
/// with fewer than `min_context_count` records produce a warning.
ConditionalScoreReport conditional_score(std::span<const DatabaseEpisode> records, std::size_t n,
                                         std::uint64_t min_context_count = 30);

/// Exact conditional score for an explicitly supplied database distribution
/// over 2^n databases (index bit i = A_i) and decoder law
/// `prob_output_one(database, query)` = Pr[beta = 1 | database, b = query].
ConditionalScoreReport conditional_score_exact(
    std::span<const double> database_distribution, std::size_t n,
    const std::function<double(std::uint32_t, std::uint32_t)>& prob_output_one);

/// U(angle) = closed_form_score(n, E_iso(angle)) - penalty (angle/(pi/4))^2.
double regularized_utility(int depth, double penalty, double angle);

struct AngleOptimum {
  double angle = 0.0;
  double utility = 0.0;
  int iterations = 0;
};

inline constexpr double kAngleTolerance = 1e-8;

/// Maximizes regularized_utility over [0, pi/4]: a coarse grid locates the
/// best bracket, golden-section search refines it to |d angle| <= 1e-8.
AngleOptimum optimize_regularized_angle(int depth, double penalty);

}  // namespace nic
