// include/maskfuse/estimator.hpp

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

#ifndef MASKFUSE_ESTIMATOR_HPP_
#define MASKFUSE_ESTIMATOR_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maskfuse/common.hpp"
#include "maskfuse/dsp.hpp"
#include "maskfuse/masks.hpp"
#include "maskfuse/objectives.hpp"

namespace maskfuse {

/// Shape of the two-head mask estimator: a context window of log-magnitude
/// frames feeds two rectifier layers, which feed one sigmoid head for the
/// ratio mask and one for the binary mask.
struct EstimatorConfig {
  std::size_t input_bins = kNumBins;
  std::size_t context = 5;
  std::size_t hidden1 = 200;
  std::size_t hidden2 = 300;
  std::size_t output_bins = kNumBins;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t feature_dim() const { return input_bins * context; }
  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

/// weight is (outputs x inputs).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

/// Every trainable tensor of the network. Also used for gradients and
/// Adam moments, which share the parameter shapes.
struct LayerSet {
  DenseLayer hidden1;
  DenseLayer hidden2;
  DenseLayer irm_head;
  DenseLayer tbm_head;

  static LayerSet zeros(const EstimatorConfig& cfg);

  /// Weight and bias buffers in checkpoint order.
  std::array<std::span<double>, 8> blocks();
  std::array<std::span<const double>, 8> blocks() const;
  std::size_t num_parameters() const;
};

struct AdamState {
  LayerSet first_moment;
  LayerSet second_moment;
  std::uint64_t step = 0;
};

struct EstimatorParams {
  EstimatorConfig config;
  LayerSet layers;
  AdamState adam;

  /// Seeded uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
  static EstimatorParams initialize(const EstimatorConfig& cfg);
  static EstimatorParams zeros(const EstimatorConfig& cfg);
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 20;
  std::size_t batch_frames = 256;
  double alpha = 0.1;
  std::uint64_t seed = 7;
  bool dev_selection = true;

  void validate() const;
};

/// Per-bin statistics of log(1 + |Y|) over the training frames.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

inline constexpr double kFeatureStdFloor = 1e-8;

FeatureStats compute_feature_stats(std::span<const MagnitudeSpectrogram> noisy);

/// Row t holds the standardized log-magnitude frames t - c/2 .. t + c/2,
/// with edge frames replicated.
Grid<double> featurize(const MagnitudeSpectrogram& noisy_mag,
                       const FeatureStats& stats, std::size_t context);

/// Activations kept for the backward pass; one row per frame.
struct ForwardCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd hidden1;
  Eigen::MatrixXd hidden2;
  Eigen::MatrixXd irm;
  Eigen::MatrixXd tbm;
};

struct ForwardResult {
  Grid<double> irm;
  Grid<double> tbm;
  ForwardCache cache;
};

ForwardResult forward(const EstimatorParams& params, const Grid<double>& features);

/// Gradients of a loss with respect to every parameter, given the loss
/// gradients at the two sigmoid outputs.
LayerSet backward(const EstimatorParams& params, const ForwardCache& cache,
                  const Grid<double>& grad_irm, const Grid<double>& grad_tbm);

/// One bias-corrected Adam update of params.layers; advances params.adam.
/// Throws TrainingDiverged on a non-finite gradient.
void adam_step(EstimatorParams& params, const LayerSet& grads,
               const TrainConfig& t);

/// One utterance prepared for training: noisy magnitudes and oracle targets.
struct TrainingUtterance {
  MagnitudeSpectrogram noisy;
  Grid<double> irm_target;
  Grid<double> tbm_target;
};

/// Builds targets from a clean signal and its mixture; the noise is taken
/// as noisy - clean.
TrainingUtterance make_training_utterance(const Waveform& clean,
                                          const Waveform& noisy);

struct TrainingCorpus {
  std::vector<TrainingUtterance> train;
  std::vector<TrainingUtterance> dev;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  bool retained = false;
};

struct TrainingLog {
  double initial_train_loss = 0.0;
  double initial_dev_loss = 0.0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_loss = 0.0;
};

struct TrainedModel {
  EstimatorParams params;
  FeatureStats stats;
};

struct TrainResult {
  TrainedModel model;
  TrainingLog log;
};

/// Mean per-frame combined loss of `model` over `set`.
double evaluate_loss(const TrainedModel& model,
                     std::span<const TrainingUtterance> set, double alpha);

/// Adam training with per-epoch dev-set model selection. `on_epoch`, when
/// set, is called after each epoch.
TrainResult train(const TrainingCorpus& corpus, const EstimatorConfig& cfg,
                  const TrainConfig& t,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

struct MaskEstimate {
  Mask irm;
  Mask tbm;
};

MaskEstimate predict_masks(const EstimatorParams& params, const Waveform& noisy,
                           const FeatureStats& stats);
MaskEstimate predict_masks(const EstimatorParams& params,
                           const MagnitudeSpectrogram& noisy_mag,
                           const FeatureStats& stats);

// Checkpoint: little-endian "MFNN", u32 version, u32 input_bins, u32 context,
// u32 hidden1, u32 hidden2, u32 output_bins, u64 seed, then each layer's
// weight (row-major) and bias as float64, then u32 bin count and the feature
// mean and stddev as float64.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const TrainedModel& model);
TrainedModel read_checkpoint(std::istream& is);
void write_checkpoint_file(const std::string& path, const TrainedModel& model);
TrainedModel read_checkpoint_file(const std::string& path);

}  // namespace maskfuse

#endif  // MASKFUSE_ESTIMATOR_HPP_
