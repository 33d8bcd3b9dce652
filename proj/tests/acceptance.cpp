// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nic/ablation_lab.hpp"
#include "nic/capacity_probes.hpp"
#include "nic/correlation_cells.hpp"
#include "nic/estimation.hpp"
#include "nic/kernels.hpp"
#include "nic/score_engine.hpp"

using namespace nic;

namespace {

constexpr double kTsirelson = std::numbers::sqrt2 / 2.0;
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0 && secs > budget_seconds)
    o.require(false, fmt::format("runtime {:.2f} s over {:.0f} s budget", secs, budget_seconds));
  if (!o.pass) ++failures;
  fmt::print("{} [{:2}] {} ({:.2f} s){}\n", o.pass ? "PASS" : "FAIL", id, title, secs,
             o.detail.empty() ? "" : "\n       " + o.detail);
  std::fflush(stdout);
}

// ----------------------------------------------------------------- oracles

double deficit_direct(double p) {
  double h = 0.0;
  if (p > 0) h -= p * std::log2(p);
  if (p < 1) h -= (1 - p) * std::log2(1 - p);
  return 1.0 - h;
}

BoxTable deterministic_box(int f0, int f1, int g0, int g1) {
  BoxTable b;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) b.at(s, t, s ? f1 : f0, t ? g1 : g0) = 1.0;
  return b;
}

BoxTable pr_box(int alpha, int beta, int gamma) {
  BoxTable b;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int a = 0; a < 2; ++a) b.at(s, t, a, a ^ (s & t) ^ (alpha & s) ^ (beta & t) ^ gamma) = 0.5;
  return b;
}

BoxTable random_ns_box(RandomStream& rng) {
  std::vector<BoxTable> v;
  for (int i = 0; i < 16; ++i) v.push_back(deterministic_box(i & 1, (i >> 1) & 1, (i >> 2) & 1, (i >> 3) & 1));
  for (int i = 0; i < 8; ++i) v.push_back(pr_box(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  std::vector<double> w(v.size());
  double total = 0.0;
  for (auto& x : w) total += (x = -std::log(1.0 - rng.uniform()));
  BoxTable out;
  for (std::size_t k = 0; k < v.size(); ++k)
    for (std::size_t i = 0; i < 16; ++i) out.probs[i] += w[k] / total * v[k].probs[i];
  return out;
}

double max_diff(const BoxTable& a, const BoxTable& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 16; ++i) m = std::max(m, std::abs(a.probs[i] - b.probs[i]));
  return m;
}

double brute_force_best_encoder(int n) {
  const std::uint32_t dbs = 1u << n;
  double best = 0.0;
  for (std::uint64_t f = 0; f < (std::uint64_t{1} << dbs); ++f) {
    std::uint64_t correct = 0;
    for (int q = 0; q < n; ++q)
      for (int msg = 0; msg < 2; ++msg) {
        std::uint64_t ones = 0, zeros = 0;
        for (std::uint32_t x = 0; x < dbs; ++x) {
          if (static_cast<int>((f >> x) & 1u) != msg) continue;
          ((x >> q) & 1u) ? ++ones : ++zeros;
        }
        correct += std::max(ones, zeros);
      }
    best = std::max(best, static_cast<double>(correct) / (double(n) * dbs));
  }
  return best;
}

double naive_asym(int n, double e0, double e1) {
  double total = 0.0;
  for (std::uint32_t q = 0; q < (1u << n); ++q) {
    double prod = 1.0;
    for (int l = 0; l < n; ++l) prod *= ((q >> l) & 1u) ? e1 : e0;
    total += deficit_direct((1.0 + prod) / 2.0);
  }
  return total;
}

}  // namespace

int main() {
  criterion(1, "closed-form values on the 4x5 depth/bias grid", 1.0, [] {
    Outcome o;
    const std::array<int, 4> depths{1, 5, 10, 20};
    const std::array<double, 5> biases{0.5, 0.7, kTsirelson, 0.72, 0.75};
    const std::array<std::array<double, 5>, 4> expected{{{0.377, 0.780, 0.798, 0.832, 0.913},
                                                         {2.25e-2, 0.655, 0.725, 0.870, 1.312},
                                                         {7.04e-4, 0.589, 0.721, 1.036, 2.344},
                                                         {6.88e-7, 0.482, 0.721, 1.486, 7.607}}};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        const double s = closed_form_score(depths[i], biases[j]);
        const double e = expected[i][j];
        const double tol = std::max(0.01 * e, e < 1e-3 ? 1e-6 : 0.0);
        o.require(std::abs(s - e) <= tol, fmt::format("(n={}, E={:.4f}) = {:.6g} vs {}", depths[i], biases[j], s, e));
      }
    return o;
  });

  criterion(2, "quantum angle scan: E_iso, CHSH value, score at n=10", 1.0, [] {
    Outcome o;
    const std::array<double, 5> eiso{0.5000, 0.5879, 0.6533, 0.6935, 0.7071};
    const std::array<double, 5> chsh{3.0000, 3.1759, 3.3066, 3.3870, 3.4142};
    const std::array<double, 5> score{7.04e-4, 1.80e-2, 1.48e-1, 4.89e-1, 7.21e-1};
    for (int k = 0; k < 5; ++k) {
      const double phi = kPi * k / 16;
      const BoxTable box = CellSpec::quantum_phi(phi).table();
      const double s = chsh_value(box);
      const double e = effective_iso_bias(box);
      const double i10 = quantum_layer_score(10, phi);
      o.require(std::abs(e - eiso[k]) <= 1e-4, fmt::format("E_iso({}pi/16) = {:.6f}", k, e));
      o.require(std::abs(s - chsh[k]) <= 1e-4, fmt::format("S({}pi/16) = {:.6f}", k, s));
      o.require(std::abs(i10 - score[k]) <= 1e-3, fmt::format("I({}pi/16) = {:.6g}", k, i10));
    }
    return o;
  });

  criterion(3, "critical bias: pinned values, monotone boundary, asymptotic agreement", 5.0, [] {
    Outcome o;
    const double c10 = critical_bias(10).bias;
    const double c20 = critical_bias(20).bias;
    o.require(std::abs(c10 - 0.7187) <= 5e-4, fmt::format("E_crit(10) = {:.6f}", c10));
    o.require(std::abs(c20 - 0.7131) <= 5e-4, fmt::format("E_crit(20) = {:.6f}", c20));
    double prev = 2.0;
    for (int n = 1; n <= 40; ++n) {
      const double c = critical_bias(n).bias;
      o.require(c < prev, fmt::format("not decreasing at n={}", n));
      prev = c;
    }
    const double asym = kTsirelson * std::pow(2 * kLn2, 1.0 / 40);
    o.require(std::abs(asym - c20) / c20 < 0.01, fmt::format("asymptotic {:.6f} vs {:.6f}", asym, c20));
    o.detail = o.pass ? fmt::format("E_crit(10)={:.5f} E_crit(20)={:.5f}", c10, c20) : o.detail;
    return o;
  });

  criterion(4, "critical constant at 1/sqrt2 and no one-bit violation for n <= 40", 0.0, [] {
    Outcome o;
    const double s40 = closed_form_score(40, kTsirelson);
    o.require(std::abs(s40 - 1.0 / (2 * kLn2)) <= 1e-6, fmt::format("I(40) = {:.9f}", s40));
    for (int n = 1; n <= 40; ++n) o.require(closed_form_score(n, kTsirelson) <= 1.0, fmt::format("I({}) > 1", n));
    return o;
  });

  criterion(5, "Monte Carlo pyramid vs closed form, 1e6 episodes, parity audit", 60.0, [] {
    Outcome o;
    for (auto [n, e] : std::vector<std::pair<int, double>>{{3, 0.5}, {5, 0.7}}) {
      const auto p = PyramidProtocol::uniform(n, CellSpec::isotropic(e));
      const auto tally = run_pyramid_episodes(p, 1000000, 2026);
      const auto est = symmetric_score_estimate(tally.successes, tally.episodes, p.leaves());
      const double truth = closed_form_score(n, e);
      o.require(est.interval->contains(truth),
                fmt::format("n={} CI [{:.5f}, {:.5f}] misses {:.5f}", n, est.interval->lo, est.interval->hi, truth));
      o.require(tally.parity_violations == 0, fmt::format("n={} parity violations {}", n, tally.parity_violations));
      o.detail += fmt::format("n={}: {:.5f} in [{:.5f}, {:.5f}] truth {:.5f}; ", n, est.score, est.interval->lo,
                              est.interval->hi, truth);
    }
    return o;
  });

  criterion(6, "classical one-bit benchmark", 0.0, [] {
    Outcome o;
    for (int n : {2, 3}) {
      const double brute = brute_force_best_encoder(n);
      const double closed = classical_avg_success_closed_form(n);
      o.require(brute == closed, fmt::format("N={} exhaustive {} vs closed {}", n, brute, closed));
    }
    const double score = 1024.0 * bsc_information(classical_avg_success_closed_form(1024));
    const double limit = 1.0 / (kPi * kLn2);
    o.require(std::abs(score - limit) / limit < 0.02, fmt::format("N=1024 score {:.5f}", score));
    o.require(score < 1.0 / (2 * kLn2), "above 1/(2 ln2)");
    if (o.pass) o.detail = fmt::format("N=1024 score {:.5f}, limit {:.5f}", score, limit);
    return o;
  });

  criterion(7, "twirl maps boxes to the isotropic family", 0.0, [] {
    Outcome o;
    RandomStream rng(7);
    double worst_iso = 0.0, worst_chsh = 0.0, worst_idem = 0.0;
    for (int i = 0; i < 100; ++i) {
      const BoxTable b = random_ns_box(rng);
      const BoxTable t = twirl(b);
      const double e = effective_iso_bias(b);
      worst_iso = std::max(worst_iso, max_diff(t, box_from_correlators({e, e, e, -e})));
      worst_chsh = std::max(worst_chsh, std::abs(chsh_value(t) - chsh_value(b)));
      worst_idem = std::max(worst_idem, max_diff(twirl(t), t));
    }
    o.require(worst_iso <= 1e-10, fmt::format("isotropy error {:.3g}", worst_iso));
    o.require(worst_chsh <= 1e-10, fmt::format("CHSH drift {:.3g}", worst_chsh));
    o.require(worst_idem <= 1e-12, fmt::format("idempotence error {:.3g}", worst_idem));
    const BoxTable q = twirl(CellSpec::quantum_phi(kPi / 4, 1.0).table());
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        o.require(std::abs(win_probability(q, s, t) - (2 + std::numbers::sqrt2) / 4) <= 1e-12, "quantum win probability");
    return o;
  });

  criterion(8, "asymmetric cells: exact sum, crossing, norm criterion", 0.0, [] {
    Outcome o;
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n)
      for (double e0 : {0.2, 0.5, 0.9, 1.0})
        for (double e1 : {0.0, 0.3, 0.7071, 0.95})
          worst = std::max(worst, std::abs(asym_exact_score(n, e0, e1) - naive_asym(n, e0, e1)));
    o.require(worst <= 1e-10, fmt::format("DP vs paths {:.3g}", worst));
    int cross = 0;
    for (int n = 1; n <= 60 && !cross; ++n)
      if (asym_exact_score(n, 0.9, 0.5) > 1.0) cross = n;
    o.require(cross > 0, "(0.9, 0.5) never crosses");
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const double e0 = i / 40.0, e1 = j / 40.0;
        if (e0 * e0 + e1 * e1 > 1.0) continue;
        for (int n = 1; n <= 60; ++n)
          if (asym_exact_score(n, e0, e1) > 1.0) o.require(false, fmt::format("({}, {}) crosses at n={}", e0, e1, n));
      }
    if (o.pass) o.detail = fmt::format("(0.9,0.5) crosses at n={}", cross);
    return o;
  });

  criterion(9, "Wilson coverage and plug-in consistency", 0.0, [] {
    Outcome o;
    for (double p : {0.55, 0.75, 0.95}) {
      RandomStream rng(derive_seed(9, static_cast<std::uint64_t>(p * 100)));
      int covered = 0;
      for (int r = 0; r < 1000; ++r) {
        std::uint64_t k = 0;
        for (int i = 0; i < 1000; ++i) k += rng.bernoulli(p);
        covered += wilson_interval(k, 1000).contains(p);
      }
      o.require(covered >= 930, fmt::format("P={} coverage {}/1000", p, covered));
      o.detail += fmt::format("P={}: {}/1000; ", p, covered);
    }
    for (double p : {0.6, 0.75, 0.9}) {
      RandomStream rng(derive_seed(19, static_cast<std::uint64_t>(p * 100)));
      ContingencyTable t;
      for (int i = 0; i < 100000; ++i) {
        const Bit a = rng.bit();
        t.add(a, static_cast<Bit>(a ^ rng.bernoulli(1 - p)));
      }
      const double err = std::abs(plugin_mi(t) - bsc_information(p));
      o.require(err < 0.01, fmt::format("BSC({}) plug-in error {:.4f}", p, err));
    }
    return o;
  });

  criterion(10, "capacity accounting probes", 0.0, [] {
    Outcome o;
    ProbeOptions opt;
    opt.episodes = 200000;
    std::uint64_t seed = 100;
    for (std::size_t m : {1u, 2u, 3u, 8u}) {
      opt.seed = seed++;
      const auto r = run_hard_copy_probe(8, m, opt);
      o.require(r.observed.interval->contains(static_cast<double>(m)),
                fmt::format("hard m={} observed {:.4f} [{:.4f}, {:.4f}]", m, r.observed.score, r.observed.interval->lo,
                            r.observed.interval->hi));
    }
    opt.seed = seed++;
    const auto packed = run_packed_precision_probe(8, 1, 8, opt);
    o.require(packed.counted_capacity == 8.0 && packed.observed.interval->contains(8.0) &&
                  std::abs(packed.observed.score - 8.0) < 0.01,
              fmt::format("packed observed {:.4f}", packed.observed.score));
    const double z = normal_two_sided_quantile(opt.level);
    for (double snr : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      opt.seed = seed++;
      const auto r = run_awgn_bpsk_probe(8, 2, snr, opt);
      const double sigma = r.observed.interval->half_width() / z;
      o.require(r.observed.score <= r.counted_capacity, fmt::format("snr={} above capacity", snr));
      o.require(std::abs(r.observed.score - *r.analytic) <= 3 * sigma,
                fmt::format("snr={} observed {:.4f} analytic {:.4f} sigma {:.4f}", snr, r.observed.score, *r.analytic, sigma));
    }
    return o;
  });

  criterion(11, "leakage controls and strict trained bottlenecks at N=8", 0.0, [] {
    Outcome o;
    const auto leaky = query_leaky_control(8);
    const auto packed = precision_packing_control(8, 8);
    const auto weights = episode_weights_control(8);
    o.require(leaky.observed == 8.0 && leaky.diagnosis == "query separation broken", "query-leaky control");
    o.require(packed.observed == 8.0 && packed.diagnosis == "precision capacity must be counted", "precision control");
    o.require(weights.observed == 8.0 && weights.diagnosis == "weights are data-dependent memory", "weights control");
    double slowest = 0.0;
    for (std::size_t m : {1u, 3u}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TrainingConfig tc;
        tc.seed = seed;
        tc.log_every = 0;
        const auto t0 = std::chrono::steady_clock::now();
        const auto trained = train_strict(8, m, tc);
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        EvalOptions eo;
        eo.seed = 1000 + seed;
        const auto r = eval_score(trained.net, eo);
        const double bound = static_cast<double>(m) + 3 * r.interval->half_width();
        o.require(r.observed <= bound, fmt::format("m={} seed={} observed {:.4f} > {:.4f}", m, seed, r.observed, bound));
        o.detail += fmt::format("m={} s={}: {:.3f}; ", m, seed, r.observed);
      }
    }
    o.require(slowest < 600.0, fmt::format("training took {:.1f} s", slowest));
    o.detail += fmt::format("slowest training {:.1f} s", slowest);
    return o;
  });

  criterion(12, "entropy-deficit quadratic bound and small-bias expansion", 0.0, [] {
    Outcome o;
    for (int i = 0; i <= 1000000; ++i) {
      const double p = i / 1000000.0;
      if (bsc_information(p) + 1e-15 < quadratic_deficit_bound(p)) {
        o.require(false, fmt::format("quadratic bound fails at p={}", p));
        break;
      }
    }
    const double k = 1.005 / (12.0 * kLn2);
    for (int i = 1; i <= 100000; ++i) {
      const double d = 0.1 * i / 100000.0;
      if (std::abs(entropy_deficit(d) - d * d / (2 * kLn2)) > k * std::pow(d, 4)) {
        o.require(false, fmt::format("expansion fails at delta={}", d));
        break;
      }
    }
    return o;
  });

  fmt::print("{} of 12 criteria failed\n", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
