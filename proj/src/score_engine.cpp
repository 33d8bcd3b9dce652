#include "nic/score_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "nic/correlation_cells.hpp"
#include "nic/info_core.hpp"

namespace nic {

namespace {

void check_depth(int depth) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (depth > kMaxClosedFormDepth) {
    throw std::overflow_error("depth " + std::to_string(depth) + " exceeds 2^60 leaves");
  }
}

void check_bias(double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) throw std::out_of_range("bias must be in [0,1]");
}

// Per-context weights of (target a, output beta), indexed a*2 + beta.
using ContextTable = std::map<std::uint32_t, std::array<double, 4>>;

struct ContextStats {
  double total = 0.0;
  double conditional_mi = 0.0;       // I(A_K : beta | A_<K)
  double conditional_entropy = 0.0;  // H(A_K | A_<K)
  double error_rate = 0.0;           // Pr[beta != A_K]
  double unconditioned_mi = 0.0;     // I(A_K : beta)
};

double plogp_ratio(double joint, double num, double den) {
  return joint > 0.0 ? joint * std::log2(joint * num / den) : 0.0;
}

ContextStats analyze(const ContextTable& table) {
  ContextStats st;
  std::array<double, 4> pooled{};
  for (const auto& [ctx, w] : table) {
    for (std::size_t i = 0; i < 4; ++i) pooled[i] += w[i];
  }
  st.total = pooled[0] + pooled[1] + pooled[2] + pooled[3];
  if (st.total <= 0.0) return st;

  for (const auto& [ctx, w] : table) {
    const double wc = w[0] + w[1] + w[2] + w[3];
    if (wc <= 0.0) continue;
    const double wa[2] = {w[0] + w[1], w[2] + w[3]};
    const double wb[2] = {w[0] + w[2], w[1] + w[3]};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        st.conditional_mi += plogp_ratio(w[static_cast<std::size_t>(a * 2 + b)], wc, wa[a] * wb[b]);
      }
    }
    st.conditional_entropy += wc * binary_entropy(wa[1] / wc);
  }
  st.conditional_mi /= st.total;
  st.conditional_entropy /= st.total;
  if (st.conditional_mi < 0.0) st.conditional_mi = 0.0;
  st.error_rate = (pooled[1] + pooled[2]) / st.total;

  const double pa[2] = {pooled[0] + pooled[1], pooled[2] + pooled[3]};
  const double pb[2] = {pooled[0] + pooled[2], pooled[1] + pooled[3]};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      st.unconditioned_mi += plogp_ratio(pooled[static_cast<std::size_t>(a * 2 + b)], st.total, pa[a] * pb[b]);
  st.unconditioned_mi /= st.total;
  if (st.unconditioned_mi < 0.0) st.unconditioned_mi = 0.0;
  return st;
}

void accumulate(ConditionalScoreReport& report, const ContextStats& st) {
  report.per_query.push_back(st.conditional_mi);
  report.score += st.conditional_mi;
  report.unconditioned += st.unconditioned_mi;
  report.fano_bound += st.conditional_entropy - binary_entropy(st.error_rate);
}

std::uint32_t pack(const Database& db) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < db.size(); ++i) v |= static_cast<std::uint32_t>(db[i]) << i;
  return v;
}

}  // namespace

Bits closed_form_score(int depth, double bias) {
  check_depth(depth);
  check_bias(bias);
  return std::ldexp(entropy_deficit(std::pow(bias, depth)), depth);
}

ScoreReport closed_form_report(int depth, double bias) {
  ScoreReport r;
  r.score = closed_form_score(depth, bias);
  r.method = ScoreMethod::closed_form;
  r.params = {{"n", depth}, {"E", bias}};
  return r;
}

Bits quantum_layer_score(int depth, double angle, double visibility) {
  const double e_iso = chsh_from_correlators(quantum_phi_correlators(angle, 1.0)) / 2.0 - 1.0;
  return closed_form_score(depth, std::clamp(visibility * e_iso, 0.0, 1.0));
}

Bits asym_exact_score(int depth, double bias0, double bias1) {
  check_depth(depth);
  check_bias(bias0);
  check_bias(bias1);
  Bits total = 0.0;
  // Exact C(depth, k); C(60, 30) * 30 still fits in 64 bits.
  std::uint64_t binom = 1;
  for (int k = 0; k <= depth; ++k) {
    const double product = std::pow(bias0, depth - k) * std::pow(bias1, k);
    total += static_cast<double>(binom) * entropy_deficit(product);
    binom = binom * static_cast<std::uint64_t>(depth - k) / static_cast<std::uint64_t>(k + 1);
  }
  return total;
}

Bits score_lower_bound_from_accuracy(std::span<const double> success) {
  Bits total = static_cast<double>(success.size());
  for (double p : success) total -= binary_entropy(p);
  return total < 0.0 ? 0.0 : total;
}

double critical_constant() { return 1.0 / (2.0 * std::numbers::ln2); }

CriticalityResult critical_bias(int depth, Bits capacity) {
  check_depth(depth);
  if (!(capacity > 0.0)) throw std::invalid_argument("capacity must be positive");
  if (capacity >= std::ldexp(1.0, depth)) {
    throw NoRootError("capacity " + std::to_string(capacity) + " is not below 2^" +
                      std::to_string(depth));
  }
  CriticalityResult r;
  r.depth = depth;
  r.capacity = capacity;
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int it = 1; it <= kBisectionCap; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gap = closed_form_score(depth, mid) - capacity;
    r.iterations = it;
    if (hi - lo <= kCriticalBiasTolerance && std::abs(gap) <= kCriticalScoreTolerance) break;
    if (gap < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.bias = mid;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  return r;
}

double critical_bias_asymptotic(int depth, Bits capacity) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  return std::numbers::sqrt2 / 2.0 *
         std::pow(2.0 * capacity * std::numbers::ln2, 1.0 / (2.0 * depth));
}

ConditionalScoreReport conditional_score(std::span<const DatabaseEpisode> records, std::size_t n,
                                         std::uint64_t min_context_count) {
  if (n < 1 || n > kMaxConditionalDatabaseBits) {
    throw std::invalid_argument("conditional score supports 1 <= N <= 12");
  }
  std::vector<ContextTable> tables(n);
  for (const auto& r : records) {
    if (r.database.size() != n) throw std::invalid_argument("record database size mismatch");
    if (r.query >= n) throw std::out_of_range("record query out of range");
    const std::uint32_t k = r.query;
    const std::uint32_t db = pack(r.database);
    const std::uint32_t ctx = db & ((1u << k) - 1u);
    const std::size_t cell = static_cast<std::size_t>(((db >> k) & 1u) * 2u + r.output);
    tables[k][ctx][cell] += 1.0;
  }
  ConditionalScoreReport report;
  for (std::size_t k = 0; k < n; ++k) {
    if (tables[k].empty()) {
      report.warnings.push_back("query " + std::to_string(k) + ": no records");
      report.per_query.push_back(0.0);
      continue;
    }
    for (const auto& [ctx, w] : tables[k]) {
      const double count = w[0] + w[1] + w[2] + w[3];
      if (count < static_cast<double>(min_context_count)) {
        report.warnings.push_back("query " + std::to_string(k) + " context " + std::to_string(ctx) +
                                  ": only " + std::to_string(static_cast<std::uint64_t>(count)) +
                                  " records");
      }
    }
    accumulate(report, analyze(tables[k]));
  }
  return report;
}

ConditionalScoreReport conditional_score_exact(
    std::span<const double> database_distribution, std::size_t n,
    const std::function<double(std::uint32_t, std::uint32_t)>& prob_output_one) {
  if (n < 1 || n > kMaxConditionalDatabaseBits) {
    throw std::invalid_argument("conditional score supports 1 <= N <= 12");
  }
  if (database_distribution.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("database distribution must have 2^N entries");
  }
  ConditionalScoreReport report;
  for (std::uint32_t k = 0; k < n; ++k) {
    ContextTable table;
    for (std::uint32_t db = 0; db < database_distribution.size(); ++db) {
      const double p = database_distribution[db];
      if (p <= 0.0) continue;
      const double one = prob_output_one(db, k);
      const std::uint32_t ctx = db & ((1u << k) - 1u);
      const std::size_t a = (db >> k) & 1u;
      auto& w = table[ctx];
      w[a * 2 + 0] += p * (1.0 - one);
      w[a * 2 + 1] += p * one;
    }
    accumulate(report, analyze(table));
  }
  return report;
}

double regularized_utility(int depth, double penalty, double angle) {
  const double ratio = angle / (std::numbers::pi / 4.0);
  return quantum_layer_score(depth, angle) - penalty * ratio * ratio;
}

AngleOptimum optimize_regularized_angle(int depth, double penalty) {
  if (!(penalty >= 0.0)) throw std::invalid_argument("penalty must be >= 0");
  const double top = std::numbers::pi / 4.0;
  auto u = [&](double a) { return regularized_utility(depth, penalty, std::clamp(a, 0.0, top)); };

  constexpr int kGrid = 64;
  int best = 0;
  double best_value = u(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = u(top * i / kGrid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double lo = top * std::max(0, best - 1) / kGrid;
  double hi = top * std::min(kGrid, best + 1) / kGrid;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = u(x1);
  double f2 = u(x2);
  AngleOptimum opt;
  while (hi - lo > kAngleTolerance) {
    ++opt.iterations;
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = u(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = u(x1);
    }
  }
  opt.angle = 0.5 * (lo + hi);
  opt.utility = u(opt.angle);
  // Golden section only approaches the endpoints, and the utility is flat at
  // the top end, so an endpoint that does at least as well wins.
  for (double edge : {0.0, top}) {
    if (u(edge) >= opt.utility) {
      opt.angle = edge;
      opt.utility = u(edge);
    }
  }
  return opt;
}

}  // namespace nic
