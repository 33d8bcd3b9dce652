#pragma once

// Finite-sample estimation of random-access information scores from episode records.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nic/rac_protocols.hpp"
#include "nic/score_report.hpp"

namespace nic {

/// Counts n_uv of (target bit u, output bit v) for one query.
struct ContingencyTable {
  std::uint32_t query = 0;
  std::array<std::uint64_t, 4> counts{};

  std::uint64_t count(int u, int v) const { return counts[static_cast<std::size_t>(u * 2 + v)]; }
  void add(Bit target, Bit output) { ++counts[static_cast<std::size_t>(target * 2 + output)]; }
  std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  std::uint64_t successes() const { return counts[0] + counts[3]; }
  bool empty() const { return total() == 0; }

  ContingencyTable& operator+=(const ContingencyTable& other);
  bool operator==(const ContingencyTable&) const = default;
};

/// Table of records with query == K. Records of other queries are skipped,
/// so Design-A batches and Design-B streams are both accepted.
ContingencyTable contingency_from_trials(std::span<const EpisodeOutcome> records, std::uint32_t query);

/// Plug-in mutual information of the table in bits, after adding `smoothing`
/// pseudocounts to every cell. Throws std::invalid_argument on an empty table.
Bits plugin_mi(const ContingencyTable& table, double smoothing = 0.0);

inline constexpr double kJeffreysPseudocount = 0.5;

enum class IntervalMethod { wilson, clopper_pearson, hoeffding };

std::string_view to_string(IntervalMethod m);
/// Accepts "wilson", "cp"/"clopper_pearson", "hoeffding".
IntervalMethod parse_interval_method(std::string_view name);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 1.0;
  double level = 0.95;
  IntervalMethod method = IntervalMethod::wilson;

  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Two-sided normal quantile z with Pr[|Z| <= z] = level.
double normal_two_sided_quantile(double level);

ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level = 0.95);
/// Exact interval by bisection on the binomial CDF.
ConfidenceInterval clopper_pearson_interval(std::uint64_t successes, std::uint64_t trials,
                                            double level = 0.95);
ConfidenceInterval hoeffding_interval(std::uint64_t successes, std::uint64_t trials,
                                      double level = 0.95);
ConfidenceInterval binomial_interval(IntervalMethod method, std::uint64_t successes,
                                     std::uint64_t trials, double level = 0.95);

/// Binomial CDF Pr[X <= k] for X ~ Bin(trials, p), summed in log space.
double binomial_cdf(std::uint64_t k, std::uint64_t trials, double p);

/// Maps a success-probability interval to a score interval through
/// N (1 - h(.)). Monotone endpoint mapping when the interval lies in [1/2,1];
/// otherwise the extrema of N (1 - h) over the interval, flagged.
ScoreInterval score_interval_transform(const ConfidenceInterval& p, std::size_t n);

/// N (1 - h(successes / T)) with the transformed binomial interval attached.
ScoreReport symmetric_score_estimate(std::uint64_t successes, std::uint64_t trials, std::size_t n,
                                     IntervalMethod method = IntervalMethod::wilson,
                                     double level = 0.95);

/// Per-query plug-in breakdown of a batch of tables (one table per query).
struct QueryBreakdown {
  std::vector<Bits> per_query;
  /// Sum of per-query plug-in estimates, with an interval built by summing
  /// per-query binomial intervals mapped through 1 - h.
  ScoreReport plug_in;
  /// Pooled success count fed to the symmetric estimator.
  ScoreReport pooled_symmetric;
};

QueryBreakdown summarize_tables(std::span<const ContingencyTable> tables, double smoothing = 0.0,
                                IntervalMethod method = IntervalMethod::wilson,
                                double level = 0.95);

void to_json(nlohmann::json& j, const ContingencyTable& t);
void to_json(nlohmann::json& j, const ConfidenceInterval& ci);

}  // namespace nic
