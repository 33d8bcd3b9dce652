#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nic/capacity_probes.hpp"

using namespace nic;

namespace {

// Plain Monte Carlo of 1 - E[log2(1 + exp(-2 snr - 2 sqrt(snr) Z))].
double bpsk_mi_monte_carlo(double snr, std::uint64_t samples) {
  RandomStream rng(123);
  double acc = 0.0;
  const double a = std::sqrt(snr);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double y = a + rng.normal();
    acc += std::log2(1.0 + std::exp(-2.0 * a * y));
  }
  return 1.0 - acc / static_cast<double>(samples);
}

}  // namespace

TEST_CASE("capacity certificates") {
  CHECK(capacity_certificate(HardBits{3}) == 3.0);
  CHECK(capacity_certificate(PackedPrecision{2, 4}) == 8.0);
  CHECK(capacity_certificate(AwgnBpsk{2, 1.0}) == doctest::Approx(1.0));
  CHECK(capacity_certificate(Qubits{2}) == 2.0);
  CHECK_THROWS(capacity_certificate(AwgnBpsk{2, -1.0}));
  CHECK(describe(HardBits{3}) == "hard_bits(m=3)");
}

TEST_CASE("gaussian cdf") {
  CHECK(gaussian_cdf(0.0) == 0.5);
  CHECK(gaussian_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(gaussian_cdf(-3.0) == doctest::Approx(0.0013498980316301).epsilon(1e-13));
  CHECK(bpsk_hard_decision_score(2, 1.0) == doctest::Approx(0.7378).epsilon(1e-3));
}

TEST_CASE("BPSK mutual information") {
  CHECK(bpsk_mutual_information(0.0) == 0.0);
  CHECK(bpsk_mutual_information(INFINITY) == 1.0);
  CHECK(bpsk_mutual_information(1.0) == doctest::Approx(bpsk_mi_monte_carlo(1.0, 10000000)).epsilon(1e-3 / 0.486));
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double snr = 0.05 * i * i / 10.0;
    const double mi = bpsk_mutual_information(snr);
    CHECK(mi >= prev);
    CHECK(mi <= std::min(1.0, 0.5 * std::log2(1.0 + snr)) + 1e-12);
    CHECK(mi >= bsc_information(gaussian_cdf(std::sqrt(snr))) - 1e-12);
    prev = mi;
  }
}

TEST_CASE("hard copy probe saturates m") {
  ProbeOptions o;
  o.episodes = 100000;
  for (std::size_t m : {1u, 2u, 3u, 8u}) {
    const auto r = run_hard_copy_probe(8, m, o);
    REQUIRE(r.observed.interval);
    CHECK(r.observed.interval->contains(static_cast<double>(m)));
    CHECK(r.counted_capacity == static_cast<double>(m));
    CHECK(r.accounting_holds());
  }
  CHECK_THROWS(run_hard_copy_probe(4, 5));
}

TEST_CASE("packed precision probe") {
  ProbeOptions o;
  o.episodes = 100000;
  const auto r = run_packed_precision_probe(8, 1, 8, o);
  CHECK(r.counted_capacity == 8.0);
  CHECK(r.observed.interval->contains(8.0));
  const auto two = run_packed_precision_probe(8, 2, 2, o);
  CHECK(two.observed.interval->contains(4.0));
  CHECK(two.accounting_holds());
}

TEST_CASE("BPSK probe against analytic hard-decision score") {
  ProbeOptions o;
  o.episodes = 200000;
  const double z = normal_two_sided_quantile(o.level);
  for (double snr : {0.5, 1.0, 4.0}) {
    const auto r = run_awgn_bpsk_probe(8, 2, snr, o);
    REQUIRE(r.analytic);
    const double sigma = r.observed.interval->half_width() / z;
    CHECK(std::abs(r.observed.score - *r.analytic) <= 3 * sigma);
    CHECK(r.observed.score <= r.counted_capacity);
    CHECK(r.accounting_holds());
  }
  CHECK_THROWS(run_awgn_bpsk_probe(8, 9, 1.0));
}

TEST_CASE("probes are deterministic in the seed") {
  ProbeOptions o;
  o.episodes = 20000;
  o.seed = 5;
  const auto a = run_awgn_bpsk_probe(8, 2, 1.0, o);
  o.exec = Execution::serial;
  const auto b = run_awgn_bpsk_probe(8, 2, 1.0, o);
  CHECK(a.observed.score == b.observed.score);
}
