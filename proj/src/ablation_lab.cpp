#include "nic/ablation_lab.hpp"

#include <cmath>
#include <functional>

namespace nic {

std::string_view to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::strict: return "strict";
    case AblationMode::query_leaky: return "query_leaky";
    case AblationMode::precision_packing: return "precision_packing";
    case AblationMode::episode_weights: return "episode_weights";
  }
  return "unknown";
}

Batch Batch::sample(std::size_t n, std::size_t size, RandomStream& rng) {
  Batch b;
  b.databases.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(size));
  b.queries.resize(size);
  b.targets.resize(static_cast<Eigen::Index>(size));
  for (std::size_t j = 0; j < size; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < n; ++i) {
      b.databases(static_cast<Eigen::Index>(i), col) = rng.bit() ? 1.0 : -1.0;
    }
    b.queries[j] = static_cast<std::uint32_t>(rng.below(n));
    b.targets(col) = b.databases(static_cast<Eigen::Index>(b.queries[j]), col) > 0.0 ? 1.0 : 0.0;
  }
  return b;
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void init_uniform(MatrixXd& m, std::size_t fan_in, RandomStream& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
}

double sign_value(double x) { return x >= 0.0 ? 1.0 : -1.0; }

double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }
double sigmoid(double a) { return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a)); }

template <class Fn>
void for_each_parameter_block(Fn&& fn, MatrixXd& a, VectorXd& b, MatrixXd& c, VectorXd& d, MatrixXd& e,
                              VectorXd& f, VectorXd& g, double& h) {
  fn(a.data(), a.size());
  fn(b.data(), b.size());
  fn(c.data(), c.size());
  fn(d.data(), d.size());
  fn(e.data(), e.size());
  fn(f.data(), f.size());
  fn(g.data(), g.size());
  fn(&h, 1);
}

}  // namespace

struct BottleneckNet::Forward {
  MatrixXd hidden_enc;  // H x B
  MatrixXd bottleneck;  // m x B (after binarizer)
  MatrixXd decoder_in;  // (m+N) x B
  MatrixXd hidden_dec;  // H x B
  Eigen::RowVectorXd logits;
};

BottleneckNet::BottleneckNet(std::size_t n, std::size_t m, std::size_t hidden, RandomStream& init)
    : n_(n), m_(m) {
  if (n < 1 || hidden < 1) throw std::invalid_argument("network sizes must be positive");
  const auto N = static_cast<Index>(n);
  const auto M = static_cast<Index>(m);
  const auto H = static_cast<Index>(hidden);
  enc_w1_.resize(H, N);
  enc_b1_ = VectorXd::Zero(H);
  enc_w2_.resize(M, H);
  enc_b2_ = VectorXd::Zero(M);
  dec_w1_.resize(H, M + N);
  dec_b1_ = VectorXd::Zero(H);
  dec_w2_.resize(H);
  init_uniform(enc_w1_, n, init);
  init_uniform(enc_w2_, hidden, init);
  init_uniform(dec_w1_, m + n, init);
  for (Index i = 0; i < H; ++i) dec_w2_(i) = (2.0 * init.uniform() - 1.0) / std::sqrt(static_cast<double>(hidden));
}

BottleneckNet::Forward BottleneckNet::forward(const Batch& batch, Binarizer binarizer) const {
  const Index B = batch.databases.cols();
  const auto M = static_cast<Index>(m_);
  const auto N = static_cast<Index>(n_);
  Forward f;
  f.hidden_enc = ((enc_w1_ * batch.databases).colwise() + enc_b1_).array().tanh();
  MatrixXd pre = (enc_w2_ * f.hidden_enc).colwise() + enc_b2_;
  f.bottleneck = binarizer == Binarizer::identity ? pre : pre.unaryExpr(&sign_value);
  f.decoder_in = MatrixXd::Zero(M + N, B);
  f.decoder_in.topRows(M) = f.bottleneck;
  for (Index j = 0; j < B; ++j) f.decoder_in(M + static_cast<Index>(batch.queries[static_cast<std::size_t>(j)]), j) = 1.0;
  f.hidden_dec = ((dec_w1_ * f.decoder_in).colwise() + dec_b1_).array().tanh();
  f.logits = (dec_w2_.transpose() * f.hidden_dec).array() + dec_b2_;
  return f;
}

double BottleneckNet::loss(const Batch& batch, Binarizer binarizer) const {
  const Forward f = forward(batch, binarizer);
  double total = 0.0;
  for (Index j = 0; j < f.logits.size(); ++j) total += softplus(f.logits(j)) - batch.targets(j) * f.logits(j);
  return total / static_cast<double>(f.logits.size());
}

std::vector<double> BottleneckNet::gradient(const Batch& batch, Binarizer binarizer, double* loss_out) const {
  const Forward f = forward(batch, binarizer);
  const Index B = f.logits.size();
  const auto M = static_cast<Index>(m_);
  const double inv_b = 1.0 / static_cast<double>(B);

  Eigen::RowVectorXd d_logits(B);
  double total = 0.0;
  for (Index j = 0; j < B; ++j) {
    d_logits(j) = (sigmoid(f.logits(j)) - batch.targets(j)) * inv_b;
    total += softplus(f.logits(j)) - batch.targets(j) * f.logits(j);
  }
  if (loss_out) *loss_out = total * inv_b;

  VectorXd g_dec_w2 = f.hidden_dec * d_logits.transpose();
  double g_dec_b2 = d_logits.sum();
  MatrixXd d_hidden_dec = (dec_w2_ * d_logits).array() * (1.0 - f.hidden_dec.array().square());
  MatrixXd g_dec_w1 = d_hidden_dec * f.decoder_in.transpose();
  VectorXd g_dec_b1 = d_hidden_dec.rowwise().sum();
  // Straight-through: the gradient reaching the bottleneck passes unchanged
  // to the pre-binarization activation.
  MatrixXd d_pre = (dec_w1_.transpose() * d_hidden_dec).topRows(M);
  MatrixXd g_enc_w2 = d_pre * f.hidden_enc.transpose();
  VectorXd g_enc_b2 = d_pre.rowwise().sum();
  MatrixXd d_hidden_enc = (enc_w2_.transpose() * d_pre).array() * (1.0 - f.hidden_enc.array().square());
  MatrixXd g_enc_w1 = d_hidden_enc * batch.databases.transpose();
  VectorXd g_enc_b1 = d_hidden_enc.rowwise().sum();

  std::vector<double> out;
  out.reserve(parameter_count());
  for_each_parameter_block(
      [&](const double* p, Index size) { out.insert(out.end(), p, p + size); }, g_enc_w1, g_enc_b1,
      g_enc_w2, g_enc_b2, g_dec_w1, g_dec_b1, g_dec_w2, g_dec_b2);
  return out;
}

double BottleneckNet::accuracy(const Batch& batch) const {
  const Forward f = forward(batch, Binarizer::straight_through);
  double hits = 0.0;
  for (Index j = 0; j < f.logits.size(); ++j) hits += (f.logits(j) > 0.0) == (batch.targets(j) > 0.5);
  return hits / static_cast<double>(f.logits.size());
}

std::vector<double> BottleneckNet::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  auto self = const_cast<BottleneckNet*>(this);
  for_each_parameter_block([&](const double* p, Index size) { out.insert(out.end(), p, p + size); },
                           self->enc_w1_, self->enc_b1_, self->enc_w2_, self->enc_b2_, self->dec_w1_,
                           self->dec_b1_, self->dec_w2_, self->dec_b2_);
  return out;
}

void BottleneckNet::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw std::invalid_argument("parameter count mismatch");
  std::size_t offset = 0;
  for_each_parameter_block(
      [&](double* p, Index size) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), size, p);
        offset += static_cast<std::size_t>(size);
      },
      enc_w1_, enc_b1_, enc_w2_, enc_b2_, dec_w1_, dec_b1_, dec_w2_, dec_b2_);
}

std::size_t BottleneckNet::parameter_count() const {
  return static_cast<std::size_t>(enc_w1_.size() + enc_b1_.size() + enc_w2_.size() + enc_b2_.size() +
                                  dec_w1_.size() + dec_b1_.size() + dec_w2_.size() + 1);
}

std::vector<Bit> BottleneckNet::encode(const Database& db) const {
  if (db.size() != n_) throw std::invalid_argument("database size mismatch");
  VectorXd x(static_cast<Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) x(static_cast<Index>(i)) = db[i] ? 1.0 : -1.0;
  const VectorXd h = (enc_w1_ * x + enc_b1_).array().tanh();
  const VectorXd pre = enc_w2_ * h + enc_b2_;
  std::vector<Bit> bits(m_);
  for (std::size_t k = 0; k < m_; ++k) bits[k] = pre(static_cast<Index>(k)) >= 0.0 ? 1 : 0;
  return bits;
}

double BottleneckNet::decode_logit(std::span<const Bit> bottleneck, std::uint32_t query) const {
  if (bottleneck.size() != m_) throw std::invalid_argument("bottleneck width mismatch");
  if (query >= n_) throw std::out_of_range("query index out of range");
  VectorXd in = VectorXd::Zero(static_cast<Index>(m_ + n_));
  for (std::size_t k = 0; k < m_; ++k) in(static_cast<Index>(k)) = bottleneck[k] ? 1.0 : -1.0;
  in(static_cast<Index>(m_ + query)) = 1.0;
  const VectorXd h = (dec_w1_ * in + dec_b1_).array().tanh();
  return dec_w2_.dot(h) + dec_b2_;
}

TrainingDiverged::TrainingDiverged(std::size_t at_step, double at_loss)
    : std::runtime_error("training diverged at step " + std::to_string(at_step) +
                         " (loss " + std::to_string(at_loss) + ")"),
      step(at_step),
      loss(at_loss) {}

TrainedNet train_strict(std::size_t n, std::size_t m, const TrainingConfig& config) {
  if (config.batch < 1 || config.step_size <= 0.0) throw std::invalid_argument("bad training config");
  RandomStream init(config.seed, 0xffffffffULL);
  TrainedNet out{BottleneckNet(n, m, config.hidden, init), {}, config};
  std::vector<double> params = out.net.parameters();
  for (std::size_t step = 0; step < config.steps; ++step) {
    RandomStream rng(config.seed, step);
    const Batch batch = Batch::sample(n, config.batch, rng);
    double loss = 0.0;
    const std::vector<double> grad = out.net.gradient(batch, Binarizer::straight_through, &loss);
    if (!std::isfinite(loss)) throw TrainingDiverged(step, loss);
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= config.step_size * grad[i];
      if (!std::isfinite(params[i])) throw TrainingDiverged(step, loss);
    }
    out.net.set_parameters(params);
    if (config.log_every > 0 && (step % config.log_every == 0 || step + 1 == config.steps)) {
      out.curve.push_back({step, loss, out.net.accuracy(batch)});
    }
  }
  return out;
}

bool AblationReport::within_counted() const {
  const double slack = interval ? 3.0 * interval->half_width() : 0.0;
  return observed <= counted + slack;
}

AblationReport eval_score(const BottleneckNet& net, const EvalOptions& opts) {
  const std::size_t n = net.database_bits();
  const auto tally = tally_episodes(
      n, opts.episodes,
      [&](std::uint64_t i) {
        RandomStream rng(opts.seed, i);
        const Database db = Database::random(n, rng);
        const auto query = static_cast<std::uint32_t>(rng.below(n));
        const std::vector<Bit> message = net.encode(db);
        EpisodeOutcome out;
        out.query = query;
        out.target = db[query];
        out.output = net.decode(message, query);
        out.success = out.output == out.target;
        return out;
      },
      opts.exec);
  const auto breakdown = summarize_tables(tally.tables, 0.0, opts.interval, opts.level);
  AblationReport r;
  r.mode = AblationMode::strict;
  r.n = n;
  r.observed = breakdown.plug_in.score;
  r.interval = breakdown.plug_in.interval;
  r.pooled_symmetric = breakdown.pooled_symmetric;
  r.counted = static_cast<double>(net.bottleneck_bits());
  r.counted_label = std::to_string(net.bottleneck_bits()) + (net.bottleneck_bits() == 1 ? " bit" : " bits");
  r.corrected = r.counted;
  return r;
}

namespace {

constexpr std::size_t kMaxExhaustiveBits = 16;

// Exact per-query tables over all 2^N databases.
Bits exhaustive_score(std::size_t n, const std::function<Bit(const Database&, std::uint32_t)>& answer) {
  if (n < 1 || n > kMaxExhaustiveBits) throw std::invalid_argument("controls enumerate 1 <= N <= 16");
  std::vector<ContingencyTable> tables(n);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    const Database db = Database::from_integer(v, n);
    for (std::uint32_t q = 0; q < n; ++q) tables[q].add(db[q], answer(db, q));
  }
  Bits total = 0.0;
  for (const auto& t : tables) total += plugin_mi(t);
  return total;
}

constexpr double kExactSlack = 1e-12;

}  // namespace

AblationReport query_leaky_control(std::size_t n) {
  AblationReport r;
  r.mode = AblationMode::query_leaky;
  r.n = n;
  // The "encoder" reads the query and sends a_b as its single bit.
  r.observed = exhaustive_score(n, [](const Database& db, std::uint32_t q) {
    const Bit message = db[q];
    return message;
  });
  r.counted = 1.0;
  r.counted_label = "1 bit";
  if (r.observed > r.counted + kExactSlack) r.diagnosis = "query separation broken";
  return r;
}

AblationReport precision_packing_control(std::size_t n, std::size_t precision_bits) {
  if (precision_bits > 52) throw std::invalid_argument("precision above 52 bits is not exact");
  const std::size_t packed = std::min(n, precision_bits);
  AblationReport r;
  r.mode = AblationMode::precision_packing;
  r.n = n;
  r.observed = exhaustive_score(n, [&](const Database& db, std::uint32_t q) -> Bit {
    double coordinate = 0.0;
    for (std::size_t k = 0; k < packed; ++k) coordinate += std::ldexp(static_cast<double>(db[k]), -static_cast<int>(k + 1));
    if (q >= packed) return 0;
    return static_cast<Bit>(static_cast<std::uint64_t>(std::ldexp(coordinate, static_cast<int>(q + 1))) & 1u);
  });
  r.counted = 1.0;
  r.counted_label = "1 coordinate";
  r.corrected = static_cast<double>(precision_bits);
  if (r.observed > r.counted + kExactSlack) r.diagnosis = "precision capacity must be counted";
  return r;
}

AblationReport episode_weights_control(std::size_t n, bool frozen) {
  AblationReport r;
  r.mode = AblationMode::episode_weights;
  r.n = n;
  const Database fixed = Database::from_integer(0, n);
  r.observed = exhaustive_score(n, [&](const Database& db, std::uint32_t q) {
    const Database& weights = frozen ? fixed : db;
    return weights[q];
  });
  r.counted = 0.0;
  r.counted_label = "0 message bits";
  if (r.observed > r.counted + kExactSlack) r.diagnosis = "weights are data-dependent memory";
  return r;
}

}  // namespace nic
