// include/maskfuse/evalkit.hpp

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

#ifndef MASKFUSE_EVALKIT_HPP_
#define MASKFUSE_EVALKIT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maskfuse/dsp.hpp"
#include "maskfuse/masks.hpp"

namespace maskfuse {

// ---------------------------------------------------------------- mixing

struct MixResult {
  Waveform noisy;
  Waveform scaled_noise;
  double gain = 1.0;
};

/// Mean square of the samples.
double signal_power(std::span<const double> x);

/// Scales `noise` so that clean / noise power equals `snr_db` and returns
/// clean + scaled noise. A noise of different length is looped (or cropped)
/// from a seeded offset.
MixResult mix_at_snr(const Waveform& clean, const Waveform& noise, double snr_db,
                     std::uint64_t seed = 0);

/// 10 log10(P_clean / P_noise).
double measured_snr_db(const Waveform& clean, const Waveform& noise);

// ---------------------------------------------------------------- metrics

inline constexpr double kSiSdrCap = 100.0;
inline constexpr double kSegSnrMin = -10.0;
inline constexpr double kSegSnrMax = 35.0;
inline constexpr double kSegSnrSilence = 1e-10;
inline constexpr double kLsdFloor = 1e-8;

/// Scale-invariant SDR in dB, capped to +-kSiSdrCap.
double si_sdr(const Waveform& est, const Waveform& ref);

/// Mean per-frame SNR clamped to [kSegSnrMin, kSegSnrMax]; frames whose
/// reference power is below kSegSnrSilence are skipped.
double segmental_snr(const Waveform& est, const Waveform& ref,
                     std::size_t frame = 512, std::size_t hop = 256);

/// RMS over T-F bins of 20 (log10|S_est| - log10|S_ref|), magnitudes floored.
double log_spectral_distance(const Waveform& est, const Waveform& ref);

enum class Metric { kSiSdr, kSegSnr, kLsd };

std::string metric_name(Metric m);
Metric parse_metric(const std::string& name);
double evaluate_metric(Metric m, const Waveform& est, const Waveform& ref);

// ---------------------------------------------------------------- corpus

enum class NoiseKind { kWhite, kPink, kBabble };

std::string noise_kind_name(NoiseKind k);

struct CorpusConfig {
  std::uint64_t seed = 2024;
  std::size_t train_count = 60;
  std::size_t dev_count = 10;
  std::size_t test_count = 10;
  double duration_s = 2.0;
  std::vector<double> snrs_db{-5.0, 0.0, 5.0, 10.0};

  void validate() const;
};

struct Mixture {
  std::string id;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  Waveform noisy;
  Waveform scaled_noise;
};

struct Utterance {
  std::string id;
  std::string split;
  std::uint64_t seed = 0;
  NoiseKind noise_kind = NoiseKind::kWhite;
  Waveform clean;
  Waveform noise;
  std::vector<Mixture> mixtures;
};

struct Corpus {
  CorpusConfig config;
  std::vector<Utterance> train;
  std::vector<Utterance> dev;
  std::vector<Utterance> test;
};

/// Harmonic speech-like signal with formant envelopes, gliding f0 and
/// silence gaps, normalized to a fixed RMS.
Waveform synth_speech(std::uint64_t seed, std::size_t samples);
Waveform synth_noise(NoiseKind kind, std::uint64_t seed, std::size_t samples);

/// Deterministic corpus; every utterance is mixed at every configured SNR.
Corpus synth_corpus(const CorpusConfig& cfg);

// ---------------------------------------------------------------- sweep

struct SweepGrid {
  std::vector<double> deltas;
  std::vector<double> gammas;
  Metric metric = Metric::kSiSdr;

  /// delta and gamma each over {0, 0.1, ..., 1}.
  static SweepGrid standard(Metric metric = Metric::kSiSdr);
  void validate() const;
};

/// One scored utterance: estimated masks, its mixture and the clean reference.
struct SweepItem {
  std::string id;
  double snr_db = 0.0;
  Mask irm_est;
  Mask tbm_est;
  Waveform noisy;
  Waveform clean;
};

struct SweepReport {
  Metric metric = Metric::kSiSdr;
  std::vector<double> deltas;
  std::vector<double> gammas;
  std::vector<double> snrs;
  /// Mean metric per (delta, gamma, snr), indexed [d][g][s].
  std::vector<double> cells;
  /// Per-SNR baselines: unprocessed mixture, IRM estimate alone, and the
  /// TBM estimate binarized at 0.5.
  std::vector<double> noisy_baseline;
  std::vector<double> irm_baseline;
  std::vector<double> tbm_baseline;

  double cell(std::size_t d, std::size_t g, std::size_t s) const {
    return cells[(d * gammas.size() + g) * snrs.size() + s];
  }
  std::size_t cell_count() const { return cells.size(); }

  /// Two tables over the SNR columns plus an average column: gamma rows at a
  /// fixed delta, then delta rows at a fixed gamma. The fixed values snap to
  /// the nearest grid point.
  std::string table(double fixed_delta = 0.5, double fixed_gamma = 0.5) const;

  /// Header `delta,gamma,snr_db,metric,value` and one row per cell.
  std::string csv() const;
};

SweepReport sweep_fusion(std::span<const SweepItem> items, const SweepGrid& grid);

}  // namespace maskfuse

#endif  // MASKFUSE_EVALKIT_HPP_
