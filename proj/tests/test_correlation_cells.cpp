#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nic/correlation_cells.hpp"

using namespace nic;

namespace {

// Local deterministic boxes: A = f(s), B = g(t).
BoxTable deterministic_box(int f0, int f1, int g0, int g1) {
  BoxTable b;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) b.at(s, t, s ? f1 : f0, t ? g1 : g0) = 1.0;
  return b;
}

// PR-type boxes: A uniform, A ^ B = s t ^ (alpha s) ^ (beta t) ^ gamma.
BoxTable pr_box(int alpha, int beta, int gamma) {
  BoxTable b;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int a = 0; a < 2; ++a) b.at(s, t, a, a ^ (s & t) ^ (alpha & s) ^ (beta & t) ^ gamma) = 0.5;
  return b;
}

// Random point of the no-signaling polytope from its 24 vertices.
BoxTable random_ns_box(RandomStream& rng) {
  std::vector<BoxTable> vertices;
  for (int v = 0; v < 16; ++v) vertices.push_back(deterministic_box(v & 1, (v >> 1) & 1, (v >> 2) & 1, (v >> 3) & 1));
  for (int v = 0; v < 8; ++v) vertices.push_back(pr_box(v & 1, (v >> 1) & 1, (v >> 2) & 1));
  std::vector<double> w(vertices.size());
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform()) * (rng.uniform() < 0.3 ? 1.0 : 0.05);
    total += x;
  }
  BoxTable out;
  for (std::size_t k = 0; k < vertices.size(); ++k)
    for (std::size_t i = 0; i < 16; ++i) out.probs[i] += w[k] / total * vertices[k].probs[i];
  return out;
}

// Frequencies of sample outputs over a K x K midpoint grid of the two uniforms.
BoxTable quadrature_box(const CellSpec& spec, int k) {
  BoxTable out;
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          const CellDraw d{(i + 0.5) / k, (j + 0.5) / k};
          const Bit a = spec.alice_output(static_cast<Bit>(s), d);
          const Bit b = spec.bob_output(static_cast<Bit>(s), static_cast<Bit>(t), a, d);
          out.at(s, t, a, b) += 1.0 / (double(k) * k);
        }
      }
    }
  }
  return out;
}

double max_diff(const BoxTable& x, const BoxTable& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < 16; ++i) m = std::max(m, std::abs(x.probs[i] - y.probs[i]));
  return m;
}

}  // namespace

TEST_CASE("isotropic box entries") {
  const BoxTable b = make_isotropic(0.6);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
          const bool win = (a ^ bb) == (s & t);
          CHECK(b.at(s, t, a, bb) == doctest::Approx(win ? 0.4 : 0.1));
        }
  CHECK(chsh_value(b) == doctest::Approx(3.2));
  CHECK(effective_iso_bias(b) == doctest::Approx(0.6));
  CHECK(no_signaling_check(b).pass);
  CHECK_THROWS_AS(make_isotropic(1.5), std::out_of_range);
}

TEST_CASE("chsh landmarks") {
  CHECK(chsh_value(make_isotropic(1.0)) == doctest::Approx(4.0));
  CHECK(chsh_value(make_isotropic(0.5)) == doctest::Approx(3.0));
  CHECK(chsh_value(make_isotropic(0.0)) == doctest::Approx(2.0));
  for (int v = 0; v < 16; ++v) {
    const BoxTable d = deterministic_box(v & 1, (v >> 1) & 1, (v >> 2) & 1, (v >> 3) & 1);
    CHECK(chsh_value(d) <= 3.0 + 1e-12);
  }
}

TEST_CASE("signaling boxes are detected") {
  BoxTable b;
  // B copies s: signals Alice's input to Bob.
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) b.at(s, t, 0, s) = 1.0;
  const auto r = no_signaling_check(b);
  CHECK_FALSE(r.pass);
  CHECK(r.max_deviation == doctest::Approx(1.0));
  CHECK_THROWS_AS(twirl(b), std::invalid_argument);
  CHECK_THROWS_AS(CellSpec::explicit_table(b), std::invalid_argument);
  BoxTable bad = make_isotropic(0.5);
  bad.probs[0] += 0.1;
  CHECK_THROWS(validate_distribution(bad));
}

TEST_CASE("quantum family") {
  const auto c = quantum_phi_correlators(std::numbers::pi / 4, 0.9);
  CHECK(c.e00 == doctest::Approx(0.9 / std::numbers::sqrt2));
  const double tsirelson = 2.0 + std::numbers::sqrt2;
  for (int i = 0; i <= 50; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double phi = std::numbers::pi / 4 * i / 50.0;
      const double nu = j / 10.0;
      const BoxTable b = box_from_correlators(quantum_phi_correlators(phi, nu));
      CHECK(chsh_value(b) <= tsirelson + 1e-12);
      CHECK(no_signaling_check(b).pass);
    }
  }
  CHECK(chsh_from_correlators(quantum_phi_correlators(std::numbers::pi / 4, 1.0)) ==
        doctest::Approx(tsirelson).epsilon(1e-14));
}

TEST_CASE("win probability matches correlators for every variant") {
  const std::vector<CellSpec> specs{CellSpec::isotropic(0.3), CellSpec::asymmetric(0.9, 0.2),
                                    CellSpec::quantum_phi(0.4, 0.8)};
  RandomStream rng(5);
  std::vector<BoxTable> tables;
  for (const auto& s : specs) tables.push_back(s.table());
  for (int i = 0; i < 20; ++i) tables.push_back(random_ns_box(rng));
  for (const auto& b : tables) {
    const CorrelatorSet c = correlators(b);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        const double sign = (s & t) ? -1.0 : 1.0;
        CHECK(win_probability(b, s, t) == doctest::Approx((1.0 + sign * c.at(s, t)) / 2.0).epsilon(1e-14));
      }
  }
}

TEST_CASE("sampling model induces the declared table") {
  // Midpoint quadrature over the draws is exact up to the grid resolution.
  constexpr int k = 2000;
  RandomStream rng(11);
  std::vector<CellSpec> specs{CellSpec::isotropic(0.7071), CellSpec::isotropic(0.0), CellSpec::asymmetric(0.8, 0.35),
                              CellSpec::quantum_phi(0.2, 0.95)};
  for (int i = 0; i < 5; ++i) specs.push_back(CellSpec::explicit_table(random_ns_box(rng)));
  for (const auto& spec : specs) CHECK(max_diff(quadrature_box(spec, k), spec.table()) <= 2.0 / k);
  CHECK(max_diff(CellSpec::isotropic(0.42).table(), make_isotropic(0.42)) <= 1e-15);
}

TEST_CASE("sample_cell frequencies") {
  const CellSpec spec = CellSpec::asymmetric(0.6, 0.2);
  RandomStream rng(3);
  constexpr int trials = 200000;
  BoxTable freq;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i < trials; ++i) {
        const auto o = sample_cell(spec, static_cast<Bit>(s), static_cast<Bit>(t), rng);
        freq.at(s, t, o.alice, o.bob) += 1.0 / trials;
      }
  for (std::size_t i = 0; i < 16; ++i) {
    const double p = spec.table().probs[i];
    CHECK(std::abs(freq.probs[i] - p) <= 4.0 * std::sqrt(p * (1 - p) / trials) + 1e-12);
  }
}

TEST_CASE("twirl properties on random boxes") {
  RandomStream rng(2024);
  for (int i = 0; i < 100; ++i) {
    const BoxTable b = random_ns_box(rng);
    const BoxTable tw = twirl(b);
    const double e = effective_iso_bias(b);
    CHECK(max_diff(tw, box_from_correlators({e, e, e, -e})) <= 1e-10);
    CHECK(std::abs(chsh_value(tw) - chsh_value(b)) <= 1e-10);
    CHECK(max_diff(twirl(tw), tw) <= 1e-12);
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) CHECK(win_probability(tw, s, t) == doctest::Approx(chsh_value(b) / 4.0));
  }
  const BoxTable q = twirl(CellSpec::quantum_phi(std::numbers::pi / 4, 1.0).table());
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      CHECK(std::abs(win_probability(q, s, t) - (2.0 + std::numbers::sqrt2) / 4.0) <= 1e-12);
}

TEST_CASE("box json round trip") {
  const BoxTable b = CellSpec::quantum_phi(0.3, 0.7).table();
  const nlohmann::json j = b;
  CHECK(j.size() == 16);
  CHECK(j.get<BoxTable>() == b);
}
