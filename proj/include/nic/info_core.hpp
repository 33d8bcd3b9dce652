#pragma once

// Scalar information functionals on binary variables. All logarithms are
// base 2; results are in bits.

#include <stdexcept>

namespace nic {

using Bits = double;

/// Tolerance within which a probability outside [0,1] is clamped rather than
/// rejected. Monte Carlo ratios can overshoot the unit interval by rounding.
inline constexpr double kProbabilitySlack = 1e-12;

/// A probability in [0,1]. Construction clamps values within
/// kProbabilitySlack of the interval and throws std::domain_error otherwise.
class Probability {
 public:
  Probability(double value);  // NOLINT: implicit by design of the call sites

  double value() const { return value_; }
  operator double() const { return value_; }  // NOLINT

 private:
  double value_;
};

/// h(p) = -p log p - (1-p) log(1-p), with 0 log 0 = 0.
Bits binary_entropy(Probability p);

/// 1 - h(P): information carried by a binary symmetric channel with success
/// probability P and an unbiased input.
Bits bsc_information(Probability p);

/// I(X:Y) for an unbiased input bit X and a channel with
/// q = Pr[Y=1|X=0], r = Pr[Y=1|X=1].
Bits binary_channel_information(Probability q, Probability r);

/// Binary KL divergence D(p||q) in bits. Returns +infinity when q is 0 or 1
/// and p differs from it.
Bits bernoulli_kl(Probability p, Probability q);

/// Entropy deficit 1 - h((1+delta)/2) for delta in [-1,1].
///
/// For |delta| < kSmallBiasThreshold the even power series
/// (1/ln 2) * sum_k delta^(2k) / (2k(2k-1)) is used; naive evaluation of
/// 1 - h loses all significant digits once delta^2 approaches machine
/// epsilon.
Bits entropy_deficit(double delta);

inline constexpr double kSmallBiasThreshold = 1e-4;

/// Lower bound (2/ln 2)(p - 1/2)^2 on 1 - h(p).
double quadratic_deficit_bound(Probability p);

}  // namespace nic
