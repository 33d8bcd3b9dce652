#include "nic/capacity_probes.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace nic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

struct GaussHermite {
  std::array<double, kGaussHermiteOrder> nodes{};
  std::array<double, kGaussHermiteOrder> weights{};
};

// Nodes and weights for the weight exp(-x^2), by Newton iteration on the
// orthonormal Hermite recurrence.
GaussHermite make_gauss_hermite() {
  constexpr int n = kGaussHermiteOrder;
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  GaussHermite gh;
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * gh.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * gh.nodes[1];
    } else {
      z = 2.0 * z - gh.nodes[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt(static_cast<double>(j - 1) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    gh.nodes[static_cast<std::size_t>(i)] = z;
    gh.nodes[static_cast<std::size_t>(n - 1 - i)] = -z;
    gh.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    gh.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
  }
  return gh;
}

const GaussHermite& gauss_hermite() {
  static const GaussHermite gh = make_gauss_hermite();
  return gh;
}

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

ProbeResult finish(const InterfaceModel& model, const EpisodeTally& tally, const ProbeOptions& opts) {
  ProbeResult r;
  r.model = model;
  r.counted_capacity = capacity_certificate(model);
  r.corrected_capacity = r.counted_capacity;
  const auto breakdown = summarize_tables(tally.tables, 0.0, opts.interval, opts.level);
  r.observed = breakdown.plug_in;
  r.pooled_symmetric = breakdown.pooled_symmetric;
  return r;
}

}  // namespace

Bits capacity_certificate(const InterfaceModel& model) {
  return std::visit(
      overloaded{
          [](const HardBits& m) { return static_cast<double>(m.bits); },
          [](const PackedPrecision& m) {
            return static_cast<double>(m.coordinates) * static_cast<double>(m.precision_bits);
          },
          [](const AwgnBpsk& m) {
            if (m.snr < 0.0) throw std::invalid_argument("snr must be >= 0");
            return 0.5 * static_cast<double>(m.coordinates) * std::log2(1.0 + m.snr);
          },
          [](const Qubits& m) { return static_cast<double>(m.qubits); },
      },
      model);
}

std::string describe(const InterfaceModel& model) {
  return std::visit(
      overloaded{
          [](const HardBits& m) { return fmt::format("hard_bits(m={})", m.bits); },
          [](const PackedPrecision& m) {
            return fmt::format("packed_precision(d={} q={})", m.coordinates, m.precision_bits);
          },
          [](const AwgnBpsk& m) { return fmt::format("awgn_bpsk(d={} snr={})", m.coordinates, m.snr); },
          [](const Qubits& m) { return fmt::format("qubits(m={})", m.qubits); },
      },
      model);
}

bool ProbeResult::accounting_holds() const {
  const double slack = observed.interval ? 3.0 * observed.interval->half_width() : 0.0;
  return observed.score <= corrected_capacity + slack;
}

ProbeResult run_hard_copy_probe(std::size_t n, std::size_t m, const ProbeOptions& opts) {
  if (m > n) throw std::invalid_argument("copy width m exceeds N");
  const auto tally = run_copy_episodes(n, m, opts.episodes, opts.seed, opts.exec);
  ProbeResult r = finish(HardBits{m}, tally, opts);
  r.analytic = static_cast<double>(m);
  return r;
}

ProbeResult run_packed_precision_probe(std::size_t n, std::size_t coordinates,
                                       std::size_t precision_bits, const ProbeOptions& opts) {
  if (precision_bits > 52) throw std::invalid_argument("precision above 52 bits is not exact");
  const std::size_t packed = std::min(n, coordinates * precision_bits);
  const auto tally = tally_episodes(
      n, opts.episodes,
      [&](std::uint64_t i) {
        RandomStream rng(opts.seed, i);
        const Database db = Database::random(n, rng);
        const auto query = static_cast<std::uint32_t>(rng.below(n));
        // Encoder: coordinate j holds bits [j q, (j+1) q) as a binary fraction.
        std::vector<double> coords(coordinates, 0.0);
        for (std::size_t k = 0; k < packed; ++k) {
          const std::size_t j = k / precision_bits;
          const int pos = static_cast<int>(k % precision_bits);
          coords[j] += std::ldexp(static_cast<double>(db[k]), -(pos + 1));
        }
        EpisodeOutcome out;
        out.query = query;
        out.target = db[query];
        if (query < packed) {
          const double v = coords[query / precision_bits];
          const int pos = static_cast<int>(query % precision_bits);
          out.output = static_cast<Bit>(static_cast<std::uint64_t>(std::ldexp(v, pos + 1)) & 1u);
        } else {
          out.output = rng.bit();
        }
        out.success = out.output == out.target;
        return out;
      },
      opts.exec);
  ProbeResult r = finish(PackedPrecision{coordinates, precision_bits}, tally, opts);
  r.analytic = static_cast<double>(packed);
  return r;
}

ProbeResult run_awgn_bpsk_probe(std::size_t n, std::size_t coordinates, double snr,
                                const ProbeOptions& opts) {
  if (coordinates < 1) throw std::invalid_argument("BPSK probe needs d >= 1");
  if (coordinates > n) throw std::invalid_argument("BPSK probe needs d <= N");
  if (!(snr >= 0.0)) throw std::invalid_argument("snr must be >= 0");
  const double amplitude = std::sqrt(snr);
  const auto tally = tally_episodes(
      n, opts.episodes,
      [&](std::uint64_t i) {
        RandomStream rng(opts.seed, i);
        const Database db = Database::random(n, rng);
        const auto query = static_cast<std::uint32_t>(rng.below(n));
        std::vector<Bit> received(coordinates);
        for (std::size_t j = 0; j < coordinates; ++j) {
          const double sent = db[j] ? -amplitude : amplitude;
          received[j] = sent + rng.normal() < 0.0 ? 1 : 0;
        }
        EpisodeOutcome out;
        out.query = query;
        out.target = db[query];
        out.output = query < coordinates ? received[query] : rng.bit();
        out.success = out.output == out.target;
        return out;
      },
      opts.exec);
  ProbeResult r = finish(AwgnBpsk{coordinates, snr}, tally, opts);
  r.analytic = bpsk_hard_decision_score(coordinates, snr);
  return r;
}

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Bits bpsk_hard_decision_score(std::size_t coordinates, double snr) {
  if (!(snr >= 0.0)) throw std::invalid_argument("snr must be >= 0");
  return static_cast<double>(coordinates) * bsc_information(gaussian_cdf(std::sqrt(snr)));
}

Bits bpsk_mutual_information(double snr) {
  if (!(snr >= 0.0)) throw std::invalid_argument("snr must be >= 0");
  if (snr == 0.0) return 0.0;
  if (std::isinf(snr)) return 1.0;
  const auto& gh = gauss_hermite();
  const double root = std::sqrt(snr);
  double expectation = 0.0;
  for (int i = 0; i < kGaussHermiteOrder; ++i) {
    const double z = std::numbers::sqrt2 * gh.nodes[static_cast<std::size_t>(i)];
    expectation += gh.weights[static_cast<std::size_t>(i)] * softplus(-2.0 * snr - 2.0 * root * z);
  }
  expectation /= std::sqrt(std::numbers::pi) * std::numbers::ln2;
  return std::clamp(1.0 - expectation, 0.0, 1.0);
}

}  // namespace nic
