#pragma once

// Straight-through binary-bottleneck models and the leakage controls that
// break one accounting assumption at a time.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nic/kernels.hpp"
#include "nic/score_report.hpp"

namespace nic {

enum class AblationMode { strict, query_leaky, precision_packing, episode_weights };
std::string_view to_string(AblationMode mode);

enum class Binarizer {
  straight_through,  ///< forward sign, backward identity on the pre-activation
  identity,          ///< no binarization; used for gradient checks
};

struct TrainingConfig {
  std::size_t hidden = 32;
  std::size_t batch = 256;
  std::size_t steps = 20000;
  double step_size = 0.05;
  std::uint64_t seed = 1;
  std::size_t log_every = 500;
};

/// A minibatch of (database, query, target) examples. Databases are stored
/// column-wise as +-1 inputs.
struct Batch {
  Eigen::MatrixXd databases;  // N x B
  std::vector<std::uint32_t> queries;
  Eigen::RowVectorXd targets;  // 1 x B, values in {0,1}

  static Batch sample(std::size_t n, std::size_t size, RandomStream& rng);
};

/// Encoder: database -> affine -> tanh -> affine -> m pre-binarization
/// activations -> sign. Decoder: [m bottleneck values, one-hot query] ->
/// affine -> tanh -> affine -> one logit. The encoder never sees the query.
class BottleneckNet {
 public:
  BottleneckNet(std::size_t n, std::size_t m, std::size_t hidden, RandomStream& init);

  std::size_t database_bits() const { return n_; }
  std::size_t bottleneck_bits() const { return m_; }

  std::vector<Bit> encode(const Database& db) const;
  double decode_logit(std::span<const Bit> bottleneck, std::uint32_t query) const;
  Bit decode(std::span<const Bit> bottleneck, std::uint32_t query) const {
    return decode_logit(bottleneck, query) > 0.0 ? 1 : 0;
  }

  /// Mean binary cross-entropy (nats) of the batch.
  double loss(const Batch& batch, Binarizer binarizer) const;
  /// Gradient of loss() with respect to parameters(), same ordering.
  std::vector<double> gradient(const Batch& batch, Binarizer binarizer, double* loss_out = nullptr) const;
  /// Fraction of batch examples answered correctly with sign binarization.
  double accuracy(const Batch& batch) const;

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  std::size_t parameter_count() const;

 private:
  struct Forward;
  Forward forward(const Batch& batch, Binarizer binarizer) const;

  std::size_t n_;
  std::size_t m_;
  Eigen::MatrixXd enc_w1_, enc_w2_, dec_w1_;
  Eigen::VectorXd enc_b1_, enc_b2_, dec_b1_, dec_w2_;
  double dec_b2_ = 0.0;
};

struct TrainingCurvePoint {
  std::size_t step = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainedNet {
  BottleneckNet net;
  std::vector<TrainingCurvePoint> curve;
  TrainingConfig config;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t step, double loss);
  std::size_t step;
  double loss;
};

/// Plain SGD on freshly sampled databases and uniform queries per example.
/// Single-threaded and deterministic in the config seed.
TrainedNet train_strict(std::size_t n, std::size_t m, const TrainingConfig& config = {});

struct AblationReport {
  AblationMode mode = AblationMode::strict;
  std::size_t n = 0;
  Bits observed = 0.0;
  std::optional<ScoreInterval> interval;
  std::optional<ScoreReport> pooled_symmetric;
  Bits counted = 0.0;
  std::string counted_label;
  std::optional<Bits> corrected;
  std::optional<std::string> diagnosis;

  /// observed <= counted + 3 * interval half-width (exact reports: no slack).
  bool within_counted() const;
};

struct EvalOptions {
  std::uint64_t episodes = 100000;
  std::uint64_t seed = 7;
  IntervalMethod interval = IntervalMethod::wilson;
  double level = 0.95;
  Execution exec = Execution::parallel;
};

/// Frozen-weight evaluation on fresh databases: per-query plug-in scores
/// summed, with the pooled symmetric estimate and an interval attached.
AblationReport eval_score(const BottleneckNet& net, const EvalOptions& opts = {});

/// The encoder reads the query and transmits a_b. Exact over all databases.
AblationReport query_leaky_control(std::size_t n);

/// min(N, q) bits packed into one q-bit-quantized real coordinate.
AblationReport precision_packing_control(std::size_t n, std::size_t precision_bits);

/// Decoder weights equal the episode's database; the message is empty.
/// With `frozen`, the weights are fixed before the episode instead.
AblationReport episode_weights_control(std::size_t n, bool frozen = false);

}  // namespace nic
