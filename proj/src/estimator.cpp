// src/estimator.cpp

// Copyright 2026 The maskfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskfuse/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "maskfuse/binary_io.hpp"
#include "maskfuse/random.hpp"

namespace maskfuse {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

DenseLayer zero_layer(std::size_t outputs, std::size_t inputs) {
  return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(outputs),
                                static_cast<Eigen::Index>(inputs)),
          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outputs))};
}

void glorot_fill(DenseLayer& layer, Rng& rng) {
  const double fan_in = static_cast<double>(layer.weight.cols());
  const double fan_out = static_cast<double>(layer.weight.rows());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  // Row-major fill order so the draw sequence matches the checkpoint layout.
  for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      layer.weight(r, c) = rng.uniform(-limit, limit);
    }
  }
  layer.bias.setZero();
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& x, const DenseLayer& layer) {
  Eigen::MatrixXd z = x * layer.weight.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

Grid<double> to_grid(const Eigen::MatrixXd& m) {
  Grid<double> g(static_cast<std::size_t>(m.rows()),
                 static_cast<std::size_t>(m.cols()));
  Eigen::Map<RowMajor>(g.values().data(), m.rows(), m.cols()) = m;
  return g;
}

Eigen::MatrixXd from_grid(const Grid<double>& g) {
  return Eigen::Map<const RowMajor>(g.values().data(),
                                    static_cast<Eigen::Index>(g.rows()),
                                    static_cast<Eigen::Index>(g.cols()));
}

void dense_backward(const Eigen::MatrixXd& grad_out, const Eigen::MatrixXd& input,
                    DenseLayer& grad) {
  grad.weight.noalias() = grad_out.transpose() * input;
  grad.bias = grad_out.colwise().sum().transpose();
}

// log(1 + |Y|) standardized per bin.
Grid<double> standardize(const MagnitudeSpectrogram& mag, const FeatureStats& stats) {
  if (stats.mean.size() != mag.cols() || stats.stddev.size() != mag.cols()) {
    throw InvalidArgument("featurize: stats cover " +
                          std::to_string(stats.mean.size()) + " bins, input has " +
                          std::to_string(mag.cols()));
  }
  Grid<double> out(mag.rows(), mag.cols());
  for (std::size_t t = 0; t < mag.rows(); ++t) {
    for (std::size_t f = 0; f < mag.cols(); ++f) {
      out(t, f) = (std::log1p(mag(t, f)) - stats.mean[f]) / stats.stddev[f];
    }
  }
  return out;
}

// Writes the context window of frame t of `frames` into `dst`.
void gather_context(const Grid<double>& frames, std::size_t t,
                    std::size_t context, std::span<double> dst) {
  const auto half = static_cast<std::ptrdiff_t>(context / 2);
  const auto last = static_cast<std::ptrdiff_t>(frames.rows()) - 1;
  const std::size_t bins = frames.cols();
  for (std::size_t slot = 0; slot < context; ++slot) {
    const std::ptrdiff_t src = std::clamp(
        static_cast<std::ptrdiff_t>(t) - half + static_cast<std::ptrdiff_t>(slot),
        std::ptrdiff_t{0}, last);
    const auto row = frames.row(static_cast<std::size_t>(src));
    std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(slot * bins));
  }
}

Grid<double> expand_context(const Grid<double>& frames, std::size_t context) {
  Grid<double> out(frames.rows(), frames.cols() * context);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    gather_context(frames, t, context, out.row(t));
  }
  return out;
}

bool all_finite(const LayerSet& set) {
  for (auto block : set.blocks()) {
    for (double v : block) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void write_layer(std::ostream& os, const DenseLayer& layer) {
  for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      put_f64(os, layer.weight(r, c));
    }
  }
  for (Eigen::Index r = 0; r < layer.bias.size(); ++r) put_f64(os, layer.bias(r));
}

void read_layer(ByteReader& in, DenseLayer& layer) {
  for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
      layer.weight(r, c) = in.f64();
    }
  }
  for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = in.f64();
}

}  // namespace

void EstimatorConfig::validate() const {
  if (input_bins == 0 || hidden1 == 0 || hidden2 == 0 || output_bins == 0) {
    throw InvalidArgument("estimator: layer sizes must be >= 1");
  }
  if (context == 0 || context % 2 == 0) {
    throw InvalidArgument("estimator: context must be odd, got " +
                          std::to_string(context));
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !(epsilon > 0.0)) {
    throw InvalidArgument("train: learning rate and epsilon must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("train: Adam decay rates must lie in [0, 1)");
  }
  if (epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
  if (batch_frames == 0) throw InvalidArgument("train: batch_frames must be >= 1");
  if (!(alpha >= 0.0)) throw InvalidArgument("train: alpha must be nonnegative");
}

LayerSet LayerSet::zeros(const EstimatorConfig& cfg) {
  cfg.validate();
  return {zero_layer(cfg.hidden1, cfg.feature_dim()),
          zero_layer(cfg.hidden2, cfg.hidden1),
          zero_layer(cfg.output_bins, cfg.hidden2),
          zero_layer(cfg.output_bins, cfg.hidden2)};
}

std::array<std::span<double>, 8> LayerSet::blocks() {
  auto w = [](DenseLayer& l) {
    return std::span<double>(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
  };
  auto b = [](DenseLayer& l) {
    return std::span<double>(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  };
  return {w(hidden1), b(hidden1), w(hidden2), b(hidden2),
          w(irm_head), b(irm_head), w(tbm_head), b(tbm_head)};
}

std::array<std::span<const double>, 8> LayerSet::blocks() const {
  auto mutable_blocks = const_cast<LayerSet*>(this)->blocks();
  std::array<std::span<const double>, 8> out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mutable_blocks[i];
  return out;
}

std::size_t LayerSet::num_parameters() const {
  std::size_t n = 0;
  for (auto block : blocks()) n += block.size();
  return n;
}

EstimatorParams EstimatorParams::zeros(const EstimatorConfig& cfg) {
  EstimatorParams p;
  p.config = cfg;
  p.layers = LayerSet::zeros(cfg);
  p.adam.first_moment = LayerSet::zeros(cfg);
  p.adam.second_moment = LayerSet::zeros(cfg);
  return p;
}

EstimatorParams EstimatorParams::initialize(const EstimatorConfig& cfg) {
  EstimatorParams p = zeros(cfg);
  Rng rng(cfg.seed);
  glorot_fill(p.layers.hidden1, rng);
  glorot_fill(p.layers.hidden2, rng);
  glorot_fill(p.layers.irm_head, rng);
  glorot_fill(p.layers.tbm_head, rng);
  return p;
}

FeatureStats compute_feature_stats(std::span<const MagnitudeSpectrogram> noisy) {
  if (noisy.empty()) throw InvalidArgument("feature stats: no utterances");
  const std::size_t bins = noisy.front().cols();
  std::vector<double> sum(bins, 0.0);
  std::size_t count = 0;
  for (const auto& mag : noisy) {
    if (mag.cols() != bins) throw InvalidArgument("feature stats: bin count mismatch");
    for (std::size_t t = 0; t < mag.rows(); ++t) {
      for (std::size_t f = 0; f < bins; ++f) sum[f] += std::log1p(mag(t, f));
    }
    count += mag.rows();
  }
  if (count == 0) throw InvalidArgument("feature stats: no frames");

  FeatureStats stats;
  stats.mean.resize(bins);
  for (std::size_t f = 0; f < bins; ++f) stats.mean[f] = sum[f] / static_cast<double>(count);
  std::vector<double> sq(bins, 0.0);
  for (const auto& mag : noisy) {
    for (std::size_t t = 0; t < mag.rows(); ++t) {
      for (std::size_t f = 0; f < bins; ++f) {
        const double d = std::log1p(mag(t, f)) - stats.mean[f];
        sq[f] += d * d;
      }
    }
  }
  stats.stddev.resize(bins);
  for (std::size_t f = 0; f < bins; ++f) {
    stats.stddev[f] =
        std::max(std::sqrt(sq[f] / static_cast<double>(count)), kFeatureStdFloor);
  }
  return stats;
}

Grid<double> featurize(const MagnitudeSpectrogram& noisy_mag,
                       const FeatureStats& stats, std::size_t context) {
  if (context == 0 || context % 2 == 0) {
    throw InvalidArgument("featurize: context must be odd");
  }
  if (noisy_mag.rows() == 0) throw InvalidArgument("featurize: no frames");
  return expand_context(standardize(noisy_mag, stats), context);
}

ForwardResult forward(const EstimatorParams& params, const Grid<double>& features) {
  const auto& cfg = params.config;
  if (features.cols() != cfg.feature_dim()) {
    throw InvalidArgument("forward: feature width " + std::to_string(features.cols()) +
                          " != " + std::to_string(cfg.feature_dim()));
  }
  const auto& layers = params.layers;
  ForwardResult r;
  r.cache.input = from_grid(features);
  r.cache.hidden1 = affine(r.cache.input, layers.hidden1).cwiseMax(0.0);
  r.cache.hidden2 = affine(r.cache.hidden1, layers.hidden2).cwiseMax(0.0);
  r.cache.irm = sigmoid(affine(r.cache.hidden2, layers.irm_head));
  r.cache.tbm = sigmoid(affine(r.cache.hidden2, layers.tbm_head));
  r.irm = to_grid(r.cache.irm);
  r.tbm = to_grid(r.cache.tbm);
  return r;
}

LayerSet backward(const EstimatorParams& params, const ForwardCache& cache,
                  const Grid<double>& grad_irm, const Grid<double>& grad_tbm) {
  const auto rows = static_cast<std::size_t>(cache.irm.rows());
  const auto cols = static_cast<std::size_t>(cache.irm.cols());
  if (grad_irm.rows() != rows || grad_irm.cols() != cols ||
      grad_tbm.rows() != rows || grad_tbm.cols() != cols) {
    throw InvalidArgument("backward: loss gradients do not match the cached forward");
  }
  if (cache.hidden2.cols() != params.layers.irm_head.weight.cols() ||
      cache.input.cols() != params.layers.hidden1.weight.cols()) {
    throw InvalidArgument("backward: cache does not match parameters");
  }
  const auto& layers = params.layers;
  LayerSet grads;

  const Eigen::MatrixXd d_irm = from_grid(grad_irm).cwiseProduct(
      cache.irm.cwiseProduct((1.0 - cache.irm.array()).matrix()));
  const Eigen::MatrixXd d_tbm = from_grid(grad_tbm).cwiseProduct(
      cache.tbm.cwiseProduct((1.0 - cache.tbm.array()).matrix()));
  dense_backward(d_irm, cache.hidden2, grads.irm_head);
  dense_backward(d_tbm, cache.hidden2, grads.tbm_head);

  // The shared trunk sees both heads.
  Eigen::MatrixXd d_h2 = d_irm * layers.irm_head.weight;
  d_h2.noalias() += d_tbm * layers.tbm_head.weight;
  d_h2 = d_h2.cwiseProduct((cache.hidden2.array() > 0.0).cast<double>().matrix());
  dense_backward(d_h2, cache.hidden1, grads.hidden2);

  Eigen::MatrixXd d_h1 = d_h2 * layers.hidden2.weight;
  d_h1 = d_h1.cwiseProduct((cache.hidden1.array() > 0.0).cast<double>().matrix());
  dense_backward(d_h1, cache.input, grads.hidden1);
  return grads;
}

void adam_step(EstimatorParams& params, const LayerSet& grads, const TrainConfig& t) {
  if (!all_finite(grads)) throw TrainingDiverged("adam_step: non-finite gradient");
  auto& adam = params.adam;
  ++adam.step;
  const double step = static_cast<double>(adam.step);
  const double correction1 = 1.0 - std::pow(t.beta1, step);
  const double correction2 = 1.0 - std::pow(t.beta2, step);

  auto p_blocks = params.layers.blocks();
  auto m_blocks = adam.first_moment.blocks();
  auto v_blocks = adam.second_moment.blocks();
  const auto g_blocks = grads.blocks();
  for (std::size_t b = 0; b < p_blocks.size(); ++b) {
    if (g_blocks[b].size() != p_blocks[b].size()) {
      throw InvalidArgument("adam_step: gradient shape mismatch");
    }
    for (std::size_t i = 0; i < p_blocks[b].size(); ++i) {
      const double g = g_blocks[b][i];
      double& m = m_blocks[b][i];
      double& v = v_blocks[b][i];
      m = t.beta1 * m + (1.0 - t.beta1) * g;
      v = t.beta2 * v + (1.0 - t.beta2) * g * g;
      const double m_hat = m / correction1;
      const double v_hat = v / correction2;
      p_blocks[b][i] -= t.learning_rate * m_hat / (std::sqrt(v_hat) + t.epsilon);
    }
  }
}

TrainingUtterance make_training_utterance(const Waveform& clean,
                                          const Waveform& noisy) {
  validate_waveform(clean, "training clean");
  validate_waveform(noisy, "training noisy");
  if (clean.size() != noisy.size()) {
    throw InvalidArgument("training: clean and noisy lengths differ");
  }
  Waveform noise = noisy;
  for (std::size_t i = 0; i < noise.size(); ++i) noise.samples[i] -= clean.samples[i];

  const auto clean_mag = magnitude(stft(clean));
  TrainingUtterance u;
  u.noisy = magnitude(stft(noisy));
  u.irm_target = compute_irm(clean_mag, magnitude(stft(noise))).values;
  u.tbm_target = compute_tbm(clean_mag).values;
  return u;
}

double evaluate_loss(const TrainedModel& model,
                     std::span<const TrainingUtterance> set, double alpha) {
  if (set.empty()) throw InvalidArgument("evaluate_loss: empty set");
  double total = 0.0;
  std::size_t frames = 0;
  for (const auto& u : set) {
    const auto fwd = forward(model.params,
                             featurize(u.noisy, model.stats, model.params.config.context));
    total += combined_loss(fwd.irm, fwd.tbm, u.irm_target, u.tbm_target,
                           {alpha, 0.0}).total;
    frames += u.noisy.rows();
  }
  return total / static_cast<double>(frames);
}

TrainResult train(const TrainingCorpus& corpus, const EstimatorConfig& cfg,
                  const TrainConfig& t,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  t.validate();
  if (corpus.train.empty()) throw InvalidArgument("train: empty training set");
  if (corpus.dev.empty()) throw InvalidArgument("train: empty dev set");

  std::vector<MagnitudeSpectrogram> train_mags;
  train_mags.reserve(corpus.train.size());
  for (const auto& u : corpus.train) {
    if (u.noisy.cols() != cfg.input_bins || u.irm_target.cols() != cfg.output_bins) {
      throw InvalidArgument("train: utterance shape does not match the config");
    }
    train_mags.push_back(u.noisy);
  }

  TrainResult result;
  TrainedModel current{EstimatorParams::initialize(cfg),
                       compute_feature_stats(train_mags)};
  const LossWeights weights{t.alpha, 0.0};

  std::vector<Grid<double>> standardized;
  standardized.reserve(corpus.train.size());
  for (const auto& u : corpus.train) standardized.push_back(standardize(u.noisy, current.stats));

  result.log.initial_train_loss = evaluate_loss(current, corpus.train, t.alpha);
  result.log.initial_dev_loss = evaluate_loss(current, corpus.dev, t.alpha);
  if (!std::isfinite(result.log.initial_train_loss)) {
    throw TrainingDiverged("train: non-finite initial loss");
  }

  struct FrameRef {
    std::size_t utt;
    std::size_t frame;
  };
  std::vector<std::size_t> order(corpus.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(t.seed);

  const std::size_t feat_dim = cfg.feature_dim();
  double best_dev = std::numeric_limits<double>::infinity();
  TrainedModel best = current;

  for (int epoch = 1; epoch <= t.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    std::vector<FrameRef> frames;
    for (std::size_t u : order) {
      for (std::size_t f = 0; f < corpus.train[u].noisy.rows(); ++f) frames.push_back({u, f});
    }

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < frames.size(); start += t.batch_frames) {
      const std::size_t n = std::min(t.batch_frames, frames.size() - start);
      Grid<double> features(n, feat_dim);
      Grid<double> irm_target(n, cfg.output_bins);
      Grid<double> tbm_target(n, cfg.output_bins);
      for (std::size_t i = 0; i < n; ++i) {
        const auto [u, f] = frames[start + i];
        gather_context(standardized[u], f, cfg.context, features.row(i));
        const auto irm_row = corpus.train[u].irm_target.row(f);
        const auto tbm_row = corpus.train[u].tbm_target.row(f);
        std::copy(irm_row.begin(), irm_row.end(), irm_target.row(i).begin());
        std::copy(tbm_row.begin(), tbm_row.end(), tbm_target.row(i).begin());
      }
      const auto fwd = forward(current.params, features);
      auto loss = combined_loss(fwd.irm, fwd.tbm, irm_target, tbm_target, weights);
      if (!std::isfinite(loss.total)) {
        throw TrainingDiverged("train: non-finite loss in epoch " + std::to_string(epoch));
      }
      epoch_loss += loss.total;
      // Summed losses; normalize by batch size here.
      const double scale = 1.0 / static_cast<double>(n);
      for (auto& v : loss.grad_irm.values()) v *= scale;
      for (auto& v : loss.grad_tbm.values()) v *= scale;
      adam_step(current.params,
                backward(current.params, fwd.cache, loss.grad_irm, loss.grad_tbm), t);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(frames.size());
    rec.dev_loss = evaluate_loss(current, corpus.dev, t.alpha);
    if (!std::isfinite(rec.dev_loss)) {
      throw TrainingDiverged("train: non-finite dev loss in epoch " + std::to_string(epoch));
    }
    if (!t.dev_selection || rec.dev_loss < best_dev) {
      rec.retained = true;
      best_dev = rec.dev_loss;
      best = current;
      result.log.best_epoch = epoch;
      result.log.best_dev_loss = rec.dev_loss;
    }
    result.log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.model = std::move(best);
  return result;
}

MaskEstimate predict_masks(const EstimatorParams& params,
                           const MagnitudeSpectrogram& noisy_mag,
                           const FeatureStats& stats) {
  const auto fwd = forward(params, featurize(noisy_mag, stats, params.config.context));
  return {Mask{fwd.irm, MaskKind::kSoft}, Mask{fwd.tbm, MaskKind::kSoft}};
}

MaskEstimate predict_masks(const EstimatorParams& params, const Waveform& noisy,
                           const FeatureStats& stats) {
  return predict_masks(params, magnitude(stft(noisy)), stats);
}

void write_checkpoint(std::ostream& os, const TrainedModel& model) {
  const auto& cfg = model.params.config;
  os.write("MFNN", 4);
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(cfg.input_bins));
  put_u32(os, static_cast<std::uint32_t>(cfg.context));
  put_u32(os, static_cast<std::uint32_t>(cfg.hidden1));
  put_u32(os, static_cast<std::uint32_t>(cfg.hidden2));
  put_u32(os, static_cast<std::uint32_t>(cfg.output_bins));
  put_u64(os, cfg.seed);
  const auto& l = model.params.layers;
  for (const auto* layer : {&l.hidden1, &l.hidden2, &l.irm_head, &l.tbm_head}) {
    write_layer(os, *layer);
  }
  put_u32(os, static_cast<std::uint32_t>(model.stats.mean.size()));
  for (double v : model.stats.mean) put_f64(os, v);
  for (double v : model.stats.stddev) put_f64(os, v);
}

TrainedModel read_checkpoint(std::istream& is) {
  ByteReader in(is, "checkpoint");
  if (in.tag(4) != "MFNN") in.fail("bad magic, expected MFNN");
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) in.fail("unsupported version " + std::to_string(version));
  EstimatorConfig cfg;
  cfg.input_bins = in.u32();
  cfg.context = in.u32();
  cfg.hidden1 = in.u32();
  cfg.hidden2 = in.u32();
  cfg.output_bins = in.u32();
  cfg.seed = in.u64();
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    in.fail(e.what());
  }
  if (cfg.feature_dim() * cfg.hidden1 > (std::size_t{1} << 28)) in.fail("implausible layer sizes");

  TrainedModel model{EstimatorParams::zeros(cfg), {}};
  auto& l = model.params.layers;
  for (auto* layer : {&l.hidden1, &l.hidden2, &l.irm_head, &l.tbm_head}) read_layer(in, *layer);
  const std::uint32_t bins = in.u32();
  if (bins != cfg.input_bins) in.fail("feature stats cover " + std::to_string(bins) + " bins");
  model.stats.mean.resize(bins);
  model.stats.stddev.resize(bins);
  for (auto& v : model.stats.mean) v = in.f64();
  for (auto& v : model.stats.stddev) v = in.f64();
  return model;
}

void write_checkpoint_file(const std::string& path, const TrainedModel& model) {
  std::ostringstream os(std::ios::binary);
  write_checkpoint(os, model);
  atomic_write_file(path, os.str());
}

TrainedModel read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_checkpoint(in);
}

}  // namespace maskfuse
