#include "nic/info_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nic {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= -kProbabilitySlack && value <= 1.0 + kProbabilitySlack)) {
    throw std::domain_error("probability out of [0,1]: " + std::to_string(value));
  }
  if (value_ < 0.0) value_ = 0.0;
  if (value_ > 1.0) value_ = 1.0;
}

Bits binary_entropy(Probability p) {
  const double x = p.value();
  return -xlog2x(x) - xlog2x(1.0 - x);
}

Bits bsc_information(Probability p) { return 1.0 - binary_entropy(p); }

Bits binary_channel_information(Probability q, Probability r) {
  const double mean = 0.5 * (q.value() + r.value());
  const Bits mi = binary_entropy(mean) - 0.5 * binary_entropy(q) - 0.5 * binary_entropy(r);
  return mi < 0.0 ? 0.0 : mi;
}

Bits bernoulli_kl(Probability p, Probability q) {
  const double a = p.value();
  const double b = q.value();
  auto term = [](double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return std::numeric_limits<double>::infinity();
    return x * std::log2(x / y);
  };
  return term(a, b) + term(1.0 - a, 1.0 - b);
}

Bits entropy_deficit(double delta) {
  if (!(std::abs(delta) <= 1.0 + kProbabilitySlack)) {
    throw std::domain_error("bias out of [-1,1]: " + std::to_string(delta));
  }
  const double d = std::abs(delta) > 1.0 ? 1.0 : std::abs(delta);
  if (d < kSmallBiasThreshold) {
    const double d2 = d * d;
    // 1/2 + d^2/12 + d^4/30 + d^6/56; the next term is below 1e-24 here.
    return kInvLn2 * d2 * (0.5 + d2 * (1.0 / 12.0 + d2 * (1.0 / 30.0 + d2 / 56.0)));
  }
  if (d == 1.0) return 1.0;
  const double value = 0.5 * kInvLn2 * ((1.0 + d) * std::log1p(d) + (1.0 - d) * std::log1p(-d));
  return value < 0.0 ? 0.0 : value;
}

double quadratic_deficit_bound(Probability p) {
  const double dev = p.value() - 0.5;
  return 2.0 * kInvLn2 * dev * dev;
}

}  // namespace nic
