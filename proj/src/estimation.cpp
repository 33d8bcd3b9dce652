#include "nic/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace nic {

std::string_view to_string(ScoreMethod m) {
  switch (m) {
    case ScoreMethod::closed_form: return "closed_form";
    case ScoreMethod::lower_bound: return "lower_bound";
    case ScoreMethod::plug_in: return "plug_in";
    case ScoreMethod::symmetric_estimate: return "symmetric_estimate";
  }
  return "unknown";
}

void to_json(nlohmann::json& j, const ScoreInterval& i) {
  j = {{"lo", i.lo}, {"hi", i.hi}, {"level", i.level}, {"extremum_search", i.extremum_search}};
}

void to_json(nlohmann::json& j, const ScoreReport& r) {
  j = {{"score", r.score}, {"method", std::string(to_string(r.method))}, {"params", r.params}};
  if (r.interval) j["interval"] = *r.interval;
}

ContingencyTable& ContingencyTable::operator+=(const ContingencyTable& other) {
  for (std::size_t i = 0; i < 4; ++i) counts[i] += other.counts[i];
  return *this;
}

ContingencyTable contingency_from_trials(std::span<const EpisodeOutcome> records,
                                         std::uint32_t query) {
  ContingencyTable table;
  table.query = query;
  for (const auto& r : records) {
    if (r.query == query) table.add(r.target, r.output);
  }
  return table;
}

Bits plugin_mi(const ContingencyTable& table, double smoothing) {
  if (smoothing < 0.0) throw std::invalid_argument("smoothing must be >= 0");
  std::array<double, 4> c{};
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    c[i] = static_cast<double>(table.counts[i]) + smoothing;
    total += c[i];
  }
  if (total <= 0.0) throw std::invalid_argument("plug-in MI of an empty contingency table");
  const double row[2] = {(c[0] + c[1]) / total, (c[2] + c[3]) / total};
  const double col[2] = {(c[0] + c[2]) / total, (c[1] + c[3]) / total};
  double mi = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int v = 0; v < 2; ++v) {
      const double p = c[static_cast<std::size_t>(u * 2 + v)] / total;
      if (p > 0.0) mi += p * std::log2(p / (row[u] * col[v]));
    }
  }
  return mi < 0.0 ? 0.0 : mi;
}

std::string_view to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::wilson: return "wilson";
    case IntervalMethod::clopper_pearson: return "clopper_pearson";
    case IntervalMethod::hoeffding: return "hoeffding";
  }
  return "unknown";
}

IntervalMethod parse_interval_method(std::string_view name) {
  if (name == "wilson") return IntervalMethod::wilson;
  if (name == "cp" || name == "clopper_pearson" || name == "clopper-pearson") {
    return IntervalMethod::clopper_pearson;
  }
  if (name == "hoeffding") return IntervalMethod::hoeffding;
  throw std::invalid_argument("unknown interval method: " + std::string(name));
}

namespace {

void check_binomial(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0) throw std::invalid_argument("binomial interval needs at least one trial");
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
}

}  // namespace

double normal_two_sided_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + 0.5 * level);
}

ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level) {
  check_binomial(successes, trials, level);
  const double z = normal_two_sided_quantile(level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  ConfidenceInterval ci{std::max(0.0, center - half), std::min(1.0, center + half), level,
                        IntervalMethod::wilson};
  if (successes == trials) ci.hi = 1.0;
  if (successes == 0) ci.lo = 0.0;
  return ci;
}

namespace {

// Mass of [a, b] under Bin(n, p). Terms are built outward from the mode and
// normalised by their own total; a side stops once it is negligible and past [a, b].
double binomial_mass(std::uint64_t a, std::uint64_t b, std::uint64_t n, double p) {
  if (p <= 0.0) return a == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return b >= n ? 1.0 : 0.0;
  const double odds = p / (1.0 - p);
  const auto mode = std::min<std::uint64_t>(
      n, static_cast<std::uint64_t>(std::floor((static_cast<double>(n) + 1.0) * p)));
  double total = 1.0;
  double inside = (mode >= a && mode <= b) ? 1.0 : 0.0;
  constexpr double negligible = 1e-18;
  double w = 1.0;
  for (std::uint64_t j = mode; j < n; ++j) {
    w *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    total += w;
    if (j + 1 >= a && j + 1 <= b) inside += w;
    if ((w < negligible * total && j + 1 > b) || w == 0.0) break;
  }
  w = 1.0;
  for (std::uint64_t j = mode; j > 0; --j) {
    w *= static_cast<double>(j) / (static_cast<double>(n - j + 1) * odds);
    total += w;
    if (j - 1 >= a && j - 1 <= b) inside += w;
    if ((w < negligible * total && j - 1 < a) || w == 0.0) break;
  }
  return inside / total;
}

// Root of a monotone g on [0,1]; decreasing says which side holds g > target.
double bisect_p(const std::function<double(double)>& g, double target, bool decreasing) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool above = g(mid) > target;
    if (above == decreasing) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double binomial_cdf(std::uint64_t k, std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_cdf needs p in [0,1]");
  if (k >= trials) return 1.0;
  return binomial_mass(0, k, trials, p);
}

ConfidenceInterval clopper_pearson_interval(std::uint64_t successes, std::uint64_t trials,
                                            double level) {
  check_binomial(successes, trials, level);
  const double tail = 0.5 * (1.0 - level);
  ConfidenceInterval ci{0.0, 1.0, level, IntervalMethod::clopper_pearson};
  if (successes > 0) {
    auto upper_tail = [&](double p) { return binomial_mass(successes, trials, trials, p); };
    ci.lo = bisect_p(upper_tail, tail, false);
  }
  if (successes < trials) {
    auto lower_tail = [&](double p) { return binomial_mass(0, successes, trials, p); };
    ci.hi = bisect_p(lower_tail, tail, true);
  }
  return ci;
}

ConfidenceInterval hoeffding_interval(std::uint64_t successes, std::uint64_t trials, double level) {
  check_binomial(successes, trials, level);
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  const double half = std::sqrt(std::log(2.0 / (1.0 - level)) / (2.0 * static_cast<double>(trials)));
  return {std::max(0.0, p - half), std::min(1.0, p + half), level, IntervalMethod::hoeffding};
}

ConfidenceInterval binomial_interval(IntervalMethod method, std::uint64_t successes,
                                     std::uint64_t trials, double level) {
  switch (method) {
    case IntervalMethod::wilson: return wilson_interval(successes, trials, level);
    case IntervalMethod::clopper_pearson: return clopper_pearson_interval(successes, trials, level);
    case IntervalMethod::hoeffding: return hoeffding_interval(successes, trials, level);
  }
  throw std::invalid_argument("unknown interval method");
}

ScoreInterval score_interval_transform(const ConfidenceInterval& p, std::size_t n) {
  const double scale = static_cast<double>(n);
  auto f = [scale](double x) { return scale * bsc_information(x); };
  ScoreInterval out;
  out.level = p.level;
  if (p.lo >= 0.5) {
    out.lo = f(p.lo);
    out.hi = f(p.hi);
  } else {
    out.extremum_search = true;
    const double at_lo = f(p.lo);
    const double at_hi = f(p.hi);
    if (p.hi <= 0.5) {
      out.lo = at_hi;
      out.hi = at_lo;
    } else {
      out.lo = 0.0;
      out.hi = std::max(at_lo, at_hi);
    }
  }
  return out;
}

ScoreReport symmetric_score_estimate(std::uint64_t successes, std::uint64_t trials, std::size_t n,
                                     IntervalMethod method, double level) {
  if (trials == 0) throw std::invalid_argument("symmetric estimate needs T > 0");
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  ScoreReport r;
  const double p_hat = static_cast<double>(successes) / static_cast<double>(trials);
  r.score = static_cast<double>(n) * bsc_information(p_hat);
  r.method = ScoreMethod::symmetric_estimate;
  r.params = {{"N", static_cast<double>(n)},
              {"T", static_cast<double>(trials)},
              {"P_hat", p_hat}};
  r.interval = score_interval_transform(binomial_interval(method, successes, trials, level), n);
  return r;
}

QueryBreakdown summarize_tables(std::span<const ContingencyTable> tables, double smoothing,
                                IntervalMethod method, double level) {
  QueryBreakdown out;
  ScoreInterval sum_interval;
  sum_interval.level = level;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double total = 0.0;
  for (const auto& t : tables) {
    if (t.empty()) {
      out.per_query.push_back(0.0);
      sum_interval.hi += 1.0;
      continue;
    }
    const Bits mi = plugin_mi(t, smoothing);
    out.per_query.push_back(mi);
    total += mi;
    const auto si = score_interval_transform(binomial_interval(method, t.successes(), t.total(), level), 1);
    sum_interval.lo += si.lo;
    sum_interval.hi += si.hi;
    sum_interval.extremum_search = sum_interval.extremum_search || si.extremum_search;
    successes += t.successes();
    trials += t.total();
  }
  const auto n = static_cast<double>(tables.size());
  out.plug_in.score = total;
  out.plug_in.method = ScoreMethod::plug_in;
  out.plug_in.params = {{"N", n}, {"T", static_cast<double>(trials)}, {"smoothing", smoothing}};
  // The summed interval assumes symmetric per-query channels; keep the point
  // estimate inside it when a channel is visibly asymmetric.
  sum_interval.lo = std::min(sum_interval.lo, total);
  sum_interval.hi = std::max(sum_interval.hi, total);
  out.plug_in.interval = sum_interval;
  if (trials > 0) {
    out.pooled_symmetric = symmetric_score_estimate(successes, trials, tables.size(), method, level);
  } else {
    out.pooled_symmetric.method = ScoreMethod::symmetric_estimate;
  }
  return out;
}

void to_json(nlohmann::json& j, const ContingencyTable& t) {
  j = {{"query", t.query},
       {"counts", {{t.counts[0], t.counts[1]}, {t.counts[2], t.counts[3]}}},
       {"total", t.total()}};
}

void to_json(nlohmann::json& j, const ConfidenceInterval& ci) {
  j = {{"lo", ci.lo}, {"hi", ci.hi}, {"level", ci.level}, {"method", std::string(to_string(ci.method))}};
}

}  // namespace nic
