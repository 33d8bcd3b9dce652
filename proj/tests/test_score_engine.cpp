#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "nic/score_engine.hpp"

using namespace nic;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr double kTsirelson = std::numbers::sqrt2 / 2.0;

Big big_score(int n, const Big& e) {
  const Big d = pow(e, n);
  const Big p = (1 + d) / 2;
  const Big q = (1 - d) / 2;
  Big h = 0;
  if (p > 0) h -= p * log(p);
  if (q > 0) h -= q * log(q);
  return pow(Big(2), n) * (1 - h / log(Big(2)));
}

// Independent bisection on the high-precision score.
double critical_oracle(int n, double capacity) {
  auto f = [&](double e) { return static_cast<double>(big_score(n, e) - capacity); };
  boost::math::tools::eps_tolerance<double> tol(45);
  const auto r = boost::math::tools::bisect(f, 0.0, 1.0, tol);
  return 0.5 * (r.first + r.second);
}

double naive_asym(int n, double e0, double e1) {
  double total = 0.0;
  for (std::uint32_t q = 0; q < (1u << n); ++q) {
    double prod = 1.0;
    for (int l = 0; l < n; ++l) prod *= ((q >> l) & 1u) ? e1 : e0;
    total += 1.0 - binary_entropy((1.0 + prod) / 2.0);
  }
  return total;
}

}  // namespace

TEST_CASE("closed form against high-precision reference") {
  for (int n : {1, 2, 5, 10, 20, 30, 40, 60}) {
    for (double e : {0.0, 0.1, 0.5, 0.7, kTsirelson, 0.72, 0.75, 0.9, 1.0}) {
      const double want = static_cast<double>(big_score(n, e));
      CHECK(closed_form_score(n, e) == doctest::Approx(want).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(closed_form_score(61, 0.5), std::overflow_error);
  CHECK_THROWS_AS(closed_form_score(0, 0.5), std::invalid_argument);
  const auto r = closed_form_report(10, 0.7);
  CHECK(r.method == ScoreMethod::closed_form);
  CHECK(r.params.at("n") == 10);
}

TEST_CASE("monotone in bias and growth bound") {
  for (int n = 1; n <= 40; ++n) {
    double prev = -1.0;
    for (int i = 1; i <= 200; ++i) {
      const double e = i / 200.0;
      const double s = closed_form_score(n, e);
      CHECK(s > prev);
      prev = s;
      CHECK(s >= std::pow(2 * e * e, n) / (2 * std::numbers::ln2) * (1 - 1e-12));
    }
  }
}

TEST_CASE("critical regime") {
  for (int n = 1; n <= 60; ++n) CHECK(closed_form_score(n, kTsirelson) < 1.0);
  CHECK(closed_form_score(40, kTsirelson) == doctest::Approx(critical_constant()).epsilon(1e-6));
  CHECK(critical_constant() == doctest::Approx(1.0 / (2.0 * std::numbers::ln2)));
  for (double e : {0.72, 0.75}) {
    bool crossed = false;
    for (int n = 1; n <= 20; ++n) crossed = crossed || closed_form_score(n, e) > 1.0;
    CHECK(crossed);
  }
}

TEST_CASE("critical bias matches an independent bisection") {
  for (int n : {1, 2, 3, 5, 10, 20, 40}) {
    for (double c : {1.0, 2.0, 4.0}) {
      if (std::ldexp(1.0, n) <= c) {
        CHECK_THROWS_AS(critical_bias(n, c), NoRootError);
        continue;
      }
      const auto r = critical_bias(n, c);
      CHECK(r.bias == doctest::Approx(critical_oracle(n, c)).epsilon(1e-8));
      CHECK(r.bracket_hi - r.bracket_lo <= 1e-10);
      CHECK(r.iterations <= kBisectionCap);
    }
  }
  CHECK(critical_bias(10).bias == doctest::Approx(0.7187).epsilon(5e-4 / 0.7187));
  CHECK(critical_bias_asymptotic(20) ==
        doctest::Approx(kTsirelson * std::pow(2 * std::numbers::ln2, 1.0 / 40)).epsilon(1e-14));
}

TEST_CASE("asymmetric dynamic program against path enumeration") {
  for (int n = 1; n <= 12; ++n)
    for (double e0 : {0.0, 0.3, 0.7, 0.9, 1.0})
      for (double e1 : {0.0, 0.5, 0.7071, 1.0})
        CHECK(std::abs(asym_exact_score(n, e0, e1) - naive_asym(n, e0, e1)) <= 1e-10);
  CHECK(asym_exact_score(7, 0.6, 0.6) == doctest::Approx(closed_form_score(7, 0.6)).epsilon(1e-12));
}

TEST_CASE("asymmetric crossing depends on the Euclidean norm") {
  bool crossed = false;
  for (int n = 1; n <= 60; ++n) crossed = crossed || asym_exact_score(n, 0.9, 0.5) > 1.0;
  CHECK(crossed);
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const double e0 = i / 20.0, e1 = j / 20.0;
      if (e0 * e0 + e1 * e1 > 1.0) continue;
      for (int n = 1; n <= 60; ++n) REQUIRE(asym_exact_score(n, e0, e1) <= 1.0 + 1e-12);
    }
}

TEST_CASE("lower bound from accuracy") {
  const std::vector<double> p{0.75, 0.9, 0.25};
  double want = 0.0;
  for (double x : p) want += 1.0 - binary_entropy(x);
  CHECK(score_lower_bound_from_accuracy(p) == doctest::Approx(want));
}

TEST_CASE("quantum layer") {
  CHECK(quantum_layer_score(10, std::numbers::pi / 4) == doctest::Approx(closed_form_score(10, kTsirelson)));
  CHECK(quantum_layer_score(10, 0.0) == doctest::Approx(closed_form_score(10, 0.5)));
  CHECK(quantum_layer_score(10, std::numbers::pi / 4, 0.9) ==
        doctest::Approx(closed_form_score(10, 0.9 * kTsirelson)));
}

TEST_CASE("conditional score, exact mode") {
  constexpr std::size_t n = 4;
  // Independent uniform bits and a perfect decoder: N bits.
  std::vector<double> uniform(16, 1.0 / 16);
  auto perfect = [](std::uint32_t db, std::uint32_t q) { return static_cast<double>((db >> q) & 1u); };
  const auto a = conditional_score_exact(uniform, n, perfect);
  CHECK(a.score == doctest::Approx(4.0));
  CHECK(a.unconditioned == doctest::Approx(4.0));
  // All bits identical: one bit answers everything, conditioning removes the rest.
  std::vector<double> same(16, 0.0);
  same[0] = same[15] = 0.5;
  const auto b = conditional_score_exact(same, n, perfect);
  CHECK(b.score == doctest::Approx(1.0));
  CHECK(b.unconditioned == doctest::Approx(4.0));
  CHECK(b.score >= b.fano_bound - 1e-12);
  CHECK_THROWS(conditional_score_exact(std::vector<double>(8, 0.125), n, perfect));
}

TEST_CASE("conditional score, estimator") {
  constexpr std::size_t n = 3;
  RandomStream rng(12);
  std::vector<DatabaseEpisode> records;
  for (int i = 0; i < 60000; ++i) {
    const Bit v = rng.bit();
    Database db{{v, v, v}};
    const auto q = static_cast<std::uint32_t>(rng.below(n));
    records.push_back({db, q, db[q]});
  }
  const auto r = conditional_score(records, n);
  CHECK(r.score == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(r.unconditioned == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(r.score >= r.fano_bound - 1e-9);
  CHECK(r.warnings.empty());
  const auto sparse = conditional_score(std::span(records).first(20), n);
  CHECK_FALSE(sparse.warnings.empty());
}

TEST_CASE("regularized angle") {
  const auto free = optimize_regularized_angle(10, 0.0);
  CHECK(free.angle == doctest::Approx(std::numbers::pi / 4).epsilon(1e-9));
  const auto mid = optimize_regularized_angle(10, 0.1);
  CHECK(mid.angle > 0.0);
  CHECK(mid.angle < std::numbers::pi / 4 - 1e-3);
  // Interior optimum beats a dense scan.
  for (int i = 0; i <= 1000; ++i)
    CHECK(regularized_utility(10, 0.1, std::numbers::pi / 4 * i / 1000.0) <= mid.utility + 1e-12);
  CHECK_THROWS(optimize_regularized_angle(10, -1.0));
}
