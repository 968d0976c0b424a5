// include/maskfuse/masks.hpp

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

#ifndef MASKFUSE_MASKS_HPP_
#define MASKFUSE_MASKS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "maskfuse/common.hpp"
#include "maskfuse/dsp.hpp"

namespace maskfuse {

enum class MaskKind : std::uint8_t { kSoft = 0, kBinary = 1 };

/// Real-valued T-F gain grid, frames x bins.
struct Mask {
  Grid<double> values;
  MaskKind kind = MaskKind::kSoft;

  std::size_t frames() const { return values.rows(); }
  std::size_t num_bins() const { return values.cols(); }
  friend bool operator==(const Mask&, const Mask&) = default;
};

/// Throws InvalidArgument if `m` breaks its kind's value constraints.
void validate_mask(const Mask& m, const char* what);

/// Threshold/scale pair of the fusion rule. `make` enforces 0 < delta < 1 and
/// 0 <= gamma <= 1; `sweep_point` relaxes delta to the closed interval so the
/// sweep harness can evaluate the degenerate rows.
class FusionParams {
 public:
  static FusionParams make(double delta, double gamma);
  static FusionParams sweep_point(double delta, double gamma);

  double delta() const { return delta_; }
  double gamma() const { return gamma_; }

 private:
  FusionParams(double delta, double gamma) : delta_(delta), gamma_(gamma) {}
  double delta_;
  double gamma_;
};

inline constexpr double kIrmEnergyFloor = 1e-12;

/// (X^2 / (X^2 + N^2))^beta per bin; bins with X^2 + N^2 below the energy
/// floor are set to 0.
Mask compute_irm(const MagnitudeSpectrogram& clean,
                 const MagnitudeSpectrogram& noise, double beta = 0.5);

/// 1 where X[t][f] is strictly above the mean of its frequency column.
Mask compute_tbm(const MagnitudeSpectrogram& clean);

/// Keeps irm where tbm > delta, scales it by gamma elsewhere.
Mask fuse_masks(const Mask& irm_est, const Mask& tbm_est,
                const FusionParams& p);

/// 1 where tbm > delta strictly, else 0.
Mask binarize(const Mask& tbm_est, double delta);

ComplexSpectrogram apply_mask(const Mask& mask, const ComplexSpectrogram& noisy);

/// istft(apply_mask(mask, stft(noisy))), trimmed to the input length.
Waveform enhance(const Waveform& noisy, const Mask& mask);

/// Same pipeline when the caller already holds stft(noisy).
Waveform enhance(const ComplexSpectrogram& noisy_spec, const Mask& mask);

// Mask dump: little-endian "MFMK", u32 version, u32 frames, u32 bins,
// u8 kind, then frames*bins float32 values, frame-major.
inline constexpr std::uint32_t kMaskDumpVersion = 1;

void write_mask(std::ostream& os, const Mask& m);
Mask read_mask(std::istream& is);
void write_mask_file(const std::string& path, const Mask& m);
Mask read_mask_file(const std::string& path);

/// One frame per line, comma separated, six decimal places.
void write_mask_csv(std::ostream& os, const Mask& m);

}  // namespace maskfuse

#endif  // MASKFUSE_MASKS_HPP_
