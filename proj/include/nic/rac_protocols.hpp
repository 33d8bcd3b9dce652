#pragma once

// Random-access-coding protocols: the (2,1) seed, the depth-n pyramid over a
// bank of correlation cells, the majority one-bit code and the copy baseline.

#include <cstdint>
#include <span>
#include <vector>

#include "nic/correlation_cells.hpp"
#include "nic/random_stream.hpp"

namespace nic {

/// Alice's database of N bits.
struct Database {
  std::vector<Bit> bits;

  std::size_t size() const { return bits.size(); }
  Bit operator[](std::size_t i) const { return bits[i]; }

  static Database random(std::size_t n, RandomStream& rng);
  /// Bits of `value`, least significant bit first.
  static Database from_integer(std::uint64_t value, std::size_t n);
};

/// Index of a node in the pyramid, as a binary word of `length` bits read
/// root-to-node (first step is the most significant bit of `value`).
struct NodeWord {
  int length = 0;
  std::uint32_t value = 0;

  NodeWord child(Bit bit) const { return {length + 1, (value << 1) | bit}; }
  /// Position in a level-order cell bank: 2^length - 1 + value.
  std::size_t bank_index() const { return (std::size_t{1} << length) - 1 + value; }
};

/// Query bit consumed at tree level `level` (0-based from the root) for leaf
/// index `query` in a depth-`depth` pyramid.
inline Bit query_path_bit(std::uint32_t query, int depth, int level) {
  return static_cast<Bit>((query >> (depth - 1 - level)) & 1u);
}

struct EpisodeOutcome {
  std::uint32_t query = 0;
  Bit target = 0;
  Bit output = 0;
  bool success = false;
  /// CHSH error bits e_w along the decoded path, root first. Empty for
  /// protocols without correlation cells.
  std::vector<Bit> path_errors;

  /// Parity identity: output == target ^ (xor of path errors).
  bool parity_consistent() const;
};

/// Depth-n nested protocol over 2^n - 1 independent cells indexed by words.
class PyramidProtocol {
 public:
  PyramidProtocol(int depth, std::vector<CellSpec> bank);
  /// Every node carries an independent copy of `cell`.
  static PyramidProtocol uniform(int depth, const CellSpec& cell);

  int depth() const { return depth_; }
  std::size_t leaves() const { return std::size_t{1} << depth_; }
  const CellSpec& cell(const NodeWord& w) const { return bank_[w.bank_index()]; }
  const std::vector<CellSpec>& bank() const { return bank_; }

 private:
  int depth_;
  std::vector<CellSpec> bank_;
};

/// Shared-resource state after Alice's upward pass, plus the one-bit message.
/// Nothing in it depends on the query.
struct PyramidEncoding {
  Bit message = 0;
  std::vector<CellDraw> draws;
  std::vector<Bit> alice_inputs;
  std::vector<Bit> alice_outputs;
};

/// Upward pass: s_w = x_w0 ^ x_w1, x_w = x_w0 ^ A_w, leaves x_u = a_u.
PyramidEncoding pyramid_encode(const PyramidProtocol& protocol, const Database& db,
                               RandomStream& rng);

/// Downward pass along the query path: t_w = next query bit,
/// xhat_{w t} = xhat_w ^ B_w starting from the message.
EpisodeOutcome pyramid_decode(const PyramidProtocol& protocol, const PyramidEncoding& enc,
                              const Database& db, std::uint32_t query);

EpisodeOutcome run_pyramid(const PyramidProtocol& protocol, const Database& db,
                           std::uint32_t query, RandomStream& rng);

/// (2,1) seed: s = a0 ^ a1, x = a0 ^ A, t = b, beta = x ^ B.
EpisodeOutcome run_seed(const CellSpec& cell, Bit a0, Bit a1, Bit b, RandomStream& rng);

/// (1 + E^n)/2.
double pyramid_success_closed_form(int depth, double bias);

/// (1 + prod_l E_{b_l})/2 for path bits b_l.
double asym_path_success(double bias0, double bias1, std::span<const Bit> path);

/// Majority bit of the database; ties (even N) send 0.
Bit majority_encode(const Database& db);
/// The majority decoder answers the message for every query.
inline Bit majority_decode(Bit message, std::uint32_t /*query*/) { return message; }

/// 1/2 + 2^-N C(N-1, floor((N-1)/2)), evaluated with exact big integers.
/// Throws std::overflow_error for N > kClassicalBenchmarkMaxN.
double classical_avg_success_closed_form(std::uint64_t n);
inline constexpr std::uint64_t kClassicalBenchmarkMaxN = 65536;

/// Exact average success of majority encoding over all 2^N databases and all
/// N queries. N <= 20.
double majority_average_success(int n);

/// Copy baseline: the message is the first m bits; queries b < m are answered
/// exactly, the rest by a fair coin.
EpisodeOutcome baseline_copy_protocol(std::size_t n, std::size_t m, const Database& db,
                                      std::uint32_t query, RandomStream& rng);

}  // namespace nic
