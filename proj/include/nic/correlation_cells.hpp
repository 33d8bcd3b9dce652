#pragma once

// Binary-input/binary-output no-signaling boxes ("correlation cells"):
// construction, CHSH analysis, isotropization and sampling.

#include <array>
#include <cstdint>
#include <variant>

#include <json.hpp>

#include "nic/random_stream.hpp"

namespace nic {

using Bit = std::uint8_t;

/// Conditional table P(A,B|s,t), stored row-major by (s,t,A,B).
struct BoxTable {
  std::array<double, 16> probs{};

  static constexpr std::size_t index(int s, int t, int a, int b) {
    return static_cast<std::size_t>(((s * 2 + t) * 2 + a) * 2 + b);
  }
  double at(int s, int t, int a, int b) const { return probs[index(s, t, a, b)]; }
  double& at(int s, int t, int a, int b) { return probs[index(s, t, a, b)]; }

  bool operator==(const BoxTable&) const = default;
};

/// Correlators E_st = <(-1)^(A xor B) | s,t>.
struct CorrelatorSet {
  double e00 = 0.0;
  double e01 = 0.0;
  double e10 = 0.0;
  double e11 = 0.0;

  double at(int s, int t) const;
};

struct NoSignalingReport {
  bool pass = false;
  double max_deviation = 0.0;
};

inline constexpr double kNoSignalingTolerance = 1e-10;
inline constexpr double kRowSumTolerance = 1e-12;

/// Throws std::invalid_argument unless every entry is non-negative and each
/// conditional row sums to one within kRowSumTolerance.
void validate_distribution(const BoxTable& box);

/// Maximum cross-input deviation of Alice's marginal (over t) and Bob's
/// marginal (over s). Passes iff the deviation is at most 1e-10.
NoSignalingReport no_signaling_check(const BoxTable& box);

/// Pr[A xor B = s t | s, t].
double win_probability(const BoxTable& box, int s, int t);

/// S_CHSH = sum over (s,t) of the win probabilities.
double chsh_value(const BoxTable& box);

/// S_CHSH through the correlator identity 2 + (E00 + E01 + E10 - E11)/2.
double chsh_from_correlators(const CorrelatorSet& c);

CorrelatorSet correlators(const BoxTable& box);

/// Box with uniform marginals and the given correlators:
/// P(A,B|s,t) = (1 + (-1)^(A xor B) E_st) / 4.
BoxTable box_from_correlators(const CorrelatorSet& c);

/// Isotropic box with win probability (1+E)/2 on every input. E in [0,1].
BoxTable make_isotropic(double bias);

/// Bell-state correlators for Bob's settings rotated by `angle` in [0, pi/4],
/// scaled by `visibility` in [0,1]: nu * (cos, cos, sin, -sin).
CorrelatorSet quantum_phi_correlators(double angle, double visibility);

/// S_CHSH/2 - 1, clipped to [-1,1].
double effective_iso_bias(const BoxTable& box);

/// CHSH twirl: exact average over the eight shared-randomness assignments
/// (u,v,w), with inputs shifted to (s^u, t^v) and outputs corrected to
///   A' = A ^ w ^ (s & v) ^ (u & v),   B' = B ^ w ^ (u & t).
/// Throws std::invalid_argument if the box signals.
BoxTable twirl(const BoxTable& box);

struct Isotropic {
  double bias;
};
struct Asymmetric {
  double bias0;  ///< correctness bias when Bob's input is 0
  double bias1;  ///< correctness bias when Bob's input is 1
};
struct QuantumPhi {
  double angle;
  double visibility = 1.0;
};
struct Explicit {
  BoxTable table;
};

/// Uniform variates consumed by one use of a cell. Alice's output depends on
/// `alice` only; Bob's on `bob` (plus the inputs and Alice's output). Drawing
/// both up front lets a protocol fix the shared resource before any query.
struct CellDraw {
  double alice = 0.0;
  double bob = 0.0;
};

/// Immutable description of one correlation cell. The expanded conditional
/// table is computed once at construction.
class CellSpec {
 public:
  using Variant = std::variant<Isotropic, Asymmetric, QuantumPhi, Explicit>;

  /// Validates parameter ranges; throws std::invalid_argument /
  /// std::out_of_range on bad parameters or a signaling explicit table.
  CellSpec(Variant variant);  // NOLINT

  static CellSpec isotropic(double bias) { return CellSpec(Isotropic{bias}); }
  static CellSpec asymmetric(double b0, double b1) { return CellSpec(Asymmetric{b0, b1}); }
  static CellSpec quantum_phi(double angle, double visibility = 1.0) {
    return CellSpec(QuantumPhi{angle, visibility});
  }
  static CellSpec explicit_table(const BoxTable& t) { return CellSpec(Explicit{t}); }

  const Variant& variant() const { return variant_; }
  const BoxTable& table() const { return table_; }
  bool parametric() const { return !std::holds_alternative<Explicit>(variant_); }

  static CellDraw draw(RandomStream& rng) { return {rng.uniform(), rng.uniform()}; }

  Bit alice_output(Bit s, const CellDraw& d) const;
  Bit bob_output(Bit s, Bit t, Bit alice, const CellDraw& d) const;

 private:
  Variant variant_;
  BoxTable table_;
  std::array<double, 4> win_{};        // Pr[A^B = st | s,t], parametric variants
  std::array<double, 2> alice_zero_{};  // Pr[A=0 | s], explicit tables
};

/// BoxTable a CellSpec expands to.
BoxTable to_box(const CellSpec& spec);

struct CellOutputs {
  Bit alice;
  Bit bob;
};

/// One use of a cell on inputs (s,t). Parametric variants use the generative
/// model A = U, B = U ^ st ^ e with an independent error bit e; explicit
/// tables sample the conditional row.
CellOutputs sample_cell(const CellSpec& spec, Bit s, Bit t, RandomStream& rng);

// JSON: a flat array of the 16 probabilities in (s,t,A,B) row-major order.
void to_json(nlohmann::json& j, const BoxTable& box);
void from_json(const nlohmann::json& j, BoxTable& box);

}  // namespace nic
