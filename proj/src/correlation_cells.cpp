#include "nic/correlation_cells.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nic {

namespace {

constexpr double kRangeSlack = 1e-12;

void check_range(double value, double lo, double hi, const char* what) {
  if (!(value >= lo - kRangeSlack && value <= hi + kRangeSlack)) {
    throw std::out_of_range(std::string(what) + " out of range: " + std::to_string(value));
  }
}

int sign_of_parity(int a, int b) { return (a ^ b) ? -1 : 1; }

}  // namespace

double CorrelatorSet::at(int s, int t) const {
  switch (s * 2 + t) {
    case 0: return e00;
    case 1: return e01;
    case 2: return e10;
    default: return e11;
  }
}

void validate_distribution(const BoxTable& box) {
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      double sum = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double p = box.at(s, t, a, b);
          if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("box entry is negative or not finite");
          }
          sum += p;
        }
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw std::invalid_argument("box row (s=" + std::to_string(s) + ", t=" + std::to_string(t) +
                                    ") sums to " + std::to_string(sum));
      }
    }
  }
}

NoSignalingReport no_signaling_check(const BoxTable& box) {
  double worst = 0.0;
  for (int s = 0; s < 2; ++s) {
    // Alice's marginal P(A=0|s,t) must not depend on t.
    const double a0 = box.at(s, 0, 0, 0) + box.at(s, 0, 0, 1);
    const double a1 = box.at(s, 1, 0, 0) + box.at(s, 1, 0, 1);
    worst = std::max(worst, std::abs(a0 - a1));
  }
  for (int t = 0; t < 2; ++t) {
    const double b0 = box.at(0, t, 0, 0) + box.at(0, t, 1, 0);
    const double b1 = box.at(1, t, 0, 0) + box.at(1, t, 1, 0);
    worst = std::max(worst, std::abs(b0 - b1));
  }
  return {worst <= kNoSignalingTolerance, worst};
}

double win_probability(const BoxTable& box, int s, int t) {
  const int target = s & t;
  double p = 0.0;
  for (int a = 0; a < 2; ++a) p += box.at(s, t, a, a ^ target);
  return p;
}

double chsh_value(const BoxTable& box) {
  double total = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) total += win_probability(box, s, t);
  return total;
}

double chsh_from_correlators(const CorrelatorSet& c) {
  return 2.0 + 0.5 * (c.e00 + c.e01 + c.e10 - c.e11);
}

CorrelatorSet correlators(const BoxTable& box) {
  std::array<double, 4> e{};
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) e[s * 2 + t] += sign_of_parity(a, b) * box.at(s, t, a, b);
  return {e[0], e[1], e[2], e[3]};
}

BoxTable box_from_correlators(const CorrelatorSet& c) {
  BoxTable box;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      const double e = c.at(s, t);
      if (std::abs(e) > 1.0 + kRangeSlack) throw std::out_of_range("correlator magnitude exceeds 1");
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) box.at(s, t, a, b) = 0.25 * (1.0 + sign_of_parity(a, b) * e);
    }
  return box;
}

BoxTable make_isotropic(double bias) {
  check_range(bias, 0.0, 1.0, "bias");
  BoxTable box;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const bool wins = (a ^ b) == (s & t);
          box.at(s, t, a, b) = wins ? 0.25 * (1.0 + bias) : 0.25 * (1.0 - bias);
        }
  return box;
}

CorrelatorSet quantum_phi_correlators(double angle, double visibility) {
  check_range(angle, 0.0, std::numbers::pi / 4.0, "angle");
  check_range(visibility, 0.0, 1.0, "visibility");
  const double c = visibility * std::cos(angle);
  const double s = visibility * std::sin(angle);
  return {c, c, s, -s};
}

double effective_iso_bias(const BoxTable& box) {
  return std::clamp(chsh_value(box) / 2.0 - 1.0, -1.0, 1.0);
}

BoxTable twirl(const BoxTable& box) {
  const auto ns = no_signaling_check(box);
  if (!ns.pass) {
    throw std::invalid_argument("twirl requires a no-signaling box (deviation " +
                                std::to_string(ns.max_deviation) + ")");
  }
  BoxTable out;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
          for (int w = 0; w < 2; ++w)
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) {
                const int a2 = a ^ w ^ (s & v) ^ (u & v);
                const int b2 = b ^ w ^ (u & t);
                out.at(s, t, a2, b2) += 0.125 * box.at(s ^ u, t ^ v, a, b);
              }
  return out;
}

CellSpec::CellSpec(Variant variant) : variant_(std::move(variant)) {
  std::visit(
      [this](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Isotropic>) {
          table_ = make_isotropic(v.bias);
        } else if constexpr (std::is_same_v<T, Asymmetric>) {
          check_range(v.bias0, 0.0, 1.0, "bias0");
          check_range(v.bias1, 0.0, 1.0, "bias1");
          table_ = box_from_correlators({v.bias0, v.bias1, v.bias0, -v.bias1});
        } else if constexpr (std::is_same_v<T, QuantumPhi>) {
          table_ = box_from_correlators(quantum_phi_correlators(v.angle, v.visibility));
        } else {
          validate_distribution(v.table);
          const auto ns = no_signaling_check(v.table);
          if (!ns.pass) throw std::invalid_argument("explicit cell table is signaling");
          table_ = v.table;
        }
      },
      variant_);
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) win_[s * 2 + t] = win_probability(table_, s, t);
    alice_zero_[s] = table_.at(s, 0, 0, 0) + table_.at(s, 0, 0, 1);
  }
}

Bit CellSpec::alice_output(Bit s, const CellDraw& d) const {
  if (parametric()) return d.alice < 0.5 ? 0 : 1;
  return d.alice < alice_zero_[s] ? 0 : 1;
}

Bit CellSpec::bob_output(Bit s, Bit t, Bit alice, const CellDraw& d) const {
  if (parametric()) {
    const Bit error = d.bob < win_[s * 2 + t] ? 0 : 1;
    return static_cast<Bit>(alice ^ (s & t) ^ error);
  }
  const double pa = table_.at(s, t, alice, 0) + table_.at(s, t, alice, 1);
  const double pb0 = pa > 0.0 ? table_.at(s, t, alice, 0) / pa : 0.5;
  return d.bob < pb0 ? 0 : 1;
}

BoxTable to_box(const CellSpec& spec) { return spec.table(); }

CellOutputs sample_cell(const CellSpec& spec, Bit s, Bit t, RandomStream& rng) {
  const CellDraw d = CellSpec::draw(rng);
  const Bit a = spec.alice_output(s, d);
  return {a, spec.bob_output(s, t, a, d)};
}

void to_json(nlohmann::json& j, const BoxTable& box) {
  j = nlohmann::json::array();
  for (double p : box.probs) j.push_back(p);
}

void from_json(const nlohmann::json& j, BoxTable& box) {
  if (!j.is_array() || j.size() != 16) {
    throw std::invalid_argument("box JSON must be an array of 16 probabilities");
  }
  for (std::size_t i = 0; i < 16; ++i) box.probs[i] = j.at(i).get<double>();
  validate_distribution(box);
}

}  // namespace nic
