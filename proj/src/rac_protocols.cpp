#include "nic/rac_protocols.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace nic {

Database Database::random(std::size_t n, RandomStream& rng) {
  Database db;
  db.bits.resize(n);
  for (auto& b : db.bits) b = rng.bit();
  return db;
}

Database Database::from_integer(std::uint64_t value, std::size_t n) {
  Database db;
  db.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) db.bits[i] = static_cast<Bit>((value >> i) & 1u);
  return db;
}

bool EpisodeOutcome::parity_consistent() const {
  Bit parity = 0;
  for (Bit e : path_errors) parity ^= e;
  return static_cast<Bit>(target ^ parity) == output;
}

PyramidProtocol::PyramidProtocol(int depth, std::vector<CellSpec> bank)
    : depth_(depth), bank_(std::move(bank)) {
  if (depth < 1 || depth > 24) throw std::invalid_argument("pyramid depth must be in [1,24]");
  const std::size_t expected = (std::size_t{1} << depth) - 1;
  if (bank_.size() != expected) {
    throw std::invalid_argument("cell bank has " + std::to_string(bank_.size()) +
                                " cells, depth " + std::to_string(depth) + " needs " +
                                std::to_string(expected));
  }
}

PyramidProtocol PyramidProtocol::uniform(int depth, const CellSpec& cell) {
  if (depth < 1 || depth > 24) throw std::invalid_argument("pyramid depth must be in [1,24]");
  return PyramidProtocol(depth, std::vector<CellSpec>((std::size_t{1} << depth) - 1, cell));
}

PyramidEncoding pyramid_encode(const PyramidProtocol& protocol, const Database& db,
                               RandomStream& rng) {
  const int n = protocol.depth();
  if (db.size() != protocol.leaves()) {
    throw std::invalid_argument("database size " + std::to_string(db.size()) +
                                " does not match 2^" + std::to_string(n));
  }
  const std::size_t cells = protocol.bank().size();
  PyramidEncoding enc;
  enc.draws.resize(cells);
  enc.alice_inputs.resize(cells);
  enc.alice_outputs.resize(cells);
  for (auto& d : enc.draws) d = CellSpec::draw(rng);

  // Messages of the level below the one being processed; starts at leaves.
  std::vector<Bit> below(db.bits);
  for (int level = n - 1; level >= 0; --level) {
    std::vector<Bit> current(std::size_t{1} << level);
    for (std::uint32_t v = 0; v < current.size(); ++v) {
      const NodeWord w{level, v};
      const std::size_t k = w.bank_index();
      const Bit x0 = below[2 * v];
      const Bit x1 = below[2 * v + 1];
      const Bit s = x0 ^ x1;
      const Bit a = protocol.cell(w).alice_output(s, enc.draws[k]);
      enc.alice_inputs[k] = s;
      enc.alice_outputs[k] = a;
      current[v] = x0 ^ a;
    }
    below = std::move(current);
  }
  enc.message = below[0];
  return enc;
}

EpisodeOutcome pyramid_decode(const PyramidProtocol& protocol, const PyramidEncoding& enc,
                              const Database& db, std::uint32_t query) {
  const int n = protocol.depth();
  if (query >= protocol.leaves()) throw std::out_of_range("query index out of range");
  EpisodeOutcome out;
  out.query = query;
  out.target = db[query];
  out.path_errors.reserve(static_cast<std::size_t>(n));

  Bit estimate = enc.message;
  NodeWord w{0, 0};
  for (int level = 0; level < n; ++level) {
    const std::size_t k = w.bank_index();
    const Bit t = query_path_bit(query, n, level);
    const Bit s = enc.alice_inputs[k];
    const Bit a = enc.alice_outputs[k];
    const Bit b = protocol.cell(w).bob_output(s, t, a, enc.draws[k]);
    out.path_errors.push_back(static_cast<Bit>(a ^ b ^ (s & t)));
    estimate ^= b;
    w = w.child(t);
  }
  out.output = estimate;
  out.success = out.output == out.target;
  return out;
}

EpisodeOutcome run_pyramid(const PyramidProtocol& protocol, const Database& db,
                           std::uint32_t query, RandomStream& rng) {
  return pyramid_decode(protocol, pyramid_encode(protocol, db, rng), db, query);
}

EpisodeOutcome run_seed(const CellSpec& cell, Bit a0, Bit a1, Bit b, RandomStream& rng) {
  const Bit s = a0 ^ a1;
  const CellDraw d = CellSpec::draw(rng);
  const Bit alice = cell.alice_output(s, d);
  const Bit x = a0 ^ alice;
  const Bit bob = cell.bob_output(s, b, alice, d);
  EpisodeOutcome out;
  out.query = b;
  out.target = b ? a1 : a0;
  out.output = x ^ bob;
  out.success = out.output == out.target;
  out.path_errors = {static_cast<Bit>(alice ^ bob ^ (s & b))};
  return out;
}

double pyramid_success_closed_form(int depth, double bias) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (!(bias >= 0.0 && bias <= 1.0)) throw std::out_of_range("bias must be in [0,1]");
  return 0.5 * (1.0 + std::pow(bias, depth));
}

double asym_path_success(double bias0, double bias1, std::span<const Bit> path) {
  if (!(bias0 >= 0.0 && bias0 <= 1.0 && bias1 >= 0.0 && bias1 <= 1.0)) {
    throw std::out_of_range("biases must be in [0,1]");
  }
  double product = 1.0;
  for (Bit b : path) product *= b ? bias1 : bias0;
  return 0.5 * (1.0 + product);
}

Bit majority_encode(const Database& db) {
  std::size_t ones = 0;
  for (Bit b : db.bits) ones += b;
  return 2 * ones > db.size() ? 1 : 0;
}

double classical_avg_success_closed_form(std::uint64_t n) {
  using boost::multiprecision::cpp_int;
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  if (n > kClassicalBenchmarkMaxN) throw std::overflow_error("N exceeds big-integer budget");
  const std::uint64_t top = n - 1;
  const std::uint64_t k = top / 2;
  cpp_int binom = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    binom *= top - k + i;
    binom /= i;
  }
  // binom / 2^n as a double without overflowing the intermediate.
  const auto bits = static_cast<long>(boost::multiprecision::msb(binom)) + 1;
  const long shift = bits > 60 ? bits - 60 : 0;
  const double mantissa = static_cast<double>(static_cast<std::uint64_t>(binom >> shift));
  return 0.5 + std::ldexp(mantissa, static_cast<int>(shift - static_cast<long>(n)));
}

double majority_average_success(int n) {
  if (n < 1 || n > 20) throw std::invalid_argument("majority enumeration needs 1 <= N <= 20");
  std::uint64_t hits = 0;
  const std::uint64_t dbs = std::uint64_t{1} << n;
  for (std::uint64_t v = 0; v < dbs; ++v) {
    const Database db = Database::from_integer(v, static_cast<std::size_t>(n));
    const Bit msg = majority_encode(db);
    for (int q = 0; q < n; ++q) hits += majority_decode(msg, static_cast<std::uint32_t>(q)) == db[q];
  }
  return static_cast<double>(hits) / static_cast<double>(dbs * static_cast<std::uint64_t>(n));
}

EpisodeOutcome baseline_copy_protocol(std::size_t n, std::size_t m, const Database& db,
                                      std::uint32_t query, RandomStream& rng) {
  if (m > n) throw std::invalid_argument("copy width m exceeds N");
  if (db.size() != n) throw std::invalid_argument("database size mismatch");
  if (query >= n) throw std::out_of_range("query index out of range");
  EpisodeOutcome out;
  out.query = query;
  out.target = db[query];
  out.output = query < m ? db[query] : rng.bit();
  out.success = out.output == out.target;
  return out;
}

}  // namespace nic
