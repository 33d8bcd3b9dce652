#pragma once

// Interface-capacity certificates and the explicit channel probes: hard m-bit
// copy, packed finite-precision coordinates, BPSK over AWGN.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "nic/kernels.hpp"
#include "nic/score_report.hpp"

namespace nic {

struct HardBits {
  std::size_t bits;
};
struct PackedPrecision {
  std::size_t coordinates;
  std::size_t precision_bits;  ///< quantization bits per coordinate
};
struct AwgnBpsk {
  std::size_t coordinates;
  double snr;  ///< P / sigma^2
};
struct Qubits {
  std::size_t qubits;
};

using InterfaceModel = std::variant<HardBits, PackedPrecision, AwgnBpsk, Qubits>;

/// A-priori capacity C_H in bits: m, d*q, (d/2) log2(1 + snr), or the Holevo
/// constant m for m qubits.
Bits capacity_certificate(const InterfaceModel& model);
std::string describe(const InterfaceModel& model);

struct ProbeResult {
  InterfaceModel model;
  Bits counted_capacity = 0.0;
  /// Per-query plug-in sum with its interval; the pooled symmetric estimate is
  /// kept alongside for reference.
  ScoreReport observed;
  ScoreReport pooled_symmetric;
  Bits corrected_capacity = 0.0;
  /// Closed-form expectation for the probe's decoder, when one exists.
  std::optional<Bits> analytic;
  std::optional<std::string> diagnosis;

  /// observed <= corrected + 3 * interval half-width.
  bool accounting_holds() const;
};

struct ProbeOptions {
  std::uint64_t episodes = 200000;
  std::uint64_t seed = 1;
  IntervalMethod interval = IntervalMethod::wilson;
  double level = 0.95;
  Execution exec = Execution::parallel;
};

ProbeResult run_hard_copy_probe(std::size_t n, std::size_t m, const ProbeOptions& opts = {});

/// Packs min(N, d*q) database bits into d coordinates quantized to q bits.
/// Requires q <= 52 so quantized values are exact doubles.
ProbeResult run_packed_precision_probe(std::size_t n, std::size_t coordinates,
                                       std::size_t precision_bits, const ProbeOptions& opts = {});

/// Sends the first d database bits as +-sqrt(snr) amplitudes through unit
/// variance Gaussian noise; hard-decision decoding at 0; other queries are
/// answered by a fair coin.
ProbeResult run_awgn_bpsk_probe(std::size_t n, std::size_t coordinates, double snr,
                                const ProbeOptions& opts = {});

/// Standard normal CDF via std::erfc.
double gaussian_cdf(double x);

/// d (1 - h(Phi(sqrt snr))): score of the hard-decision BPSK decoder.
Bits bpsk_hard_decision_score(std::size_t coordinates, double snr);

inline constexpr int kGaussHermiteOrder = 64;

/// Binary-input AWGN mutual information per coordinate (soft decoding),
/// by 64-point Gauss-Hermite quadrature.
Bits bpsk_mutual_information(double snr);

}  // namespace nic
