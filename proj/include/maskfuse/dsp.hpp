// include/maskfuse/dsp.hpp

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

#ifndef MASKFUSE_DSP_HPP_
#define MASKFUSE_DSP_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "maskfuse/common.hpp"

namespace maskfuse {

using Complex = std::complex<double>;

/// Mono time-domain signal.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  friend bool operator==(const Waveform&, const Waveform&) = default;
};

/// Throws InvalidArgument unless `w` is a non-empty, finite, 16 kHz signal.
void validate_waveform(const Waveform& w, const char* what);

/// One-sided STFT. `signal_length` remembers the unpadded input length so the
/// inverse can trim back to it.
struct ComplexSpectrogram {
  Grid<Complex> bins;
  std::size_t frame_length = kFrameLength;
  std::size_t hop = kFrameShift;
  std::size_t signal_length = 0;
  int sample_rate = kSampleRate;

  std::size_t frames() const { return bins.rows(); }
  std::size_t num_bins() const { return bins.cols(); }
};

using MagnitudeSpectrogram = Grid<double>;

/// Periodic Hamming window, w[k] = 0.54 - 0.46 cos(2 pi k / n).
std::vector<double> hamming_window(std::size_t n);

/// In-place iterative radix-2 transform for one power-of-two size.
/// Twiddles and the bit-reversal permutation are precomputed.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  /// X[j] = sum_k x[k] exp(-2 pi i jk / n).
  void forward(std::span<Complex> data) const;
  /// Inverse including the 1/n normalization.
  void inverse(std::span<Complex> data) const;

 private:
  void transform(std::span<Complex> data, bool inverse) const;

  std::size_t n_;
  std::vector<Complex> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

/// Shared plan for the given power-of-two size.
const FftPlan& fft_plan(std::size_t n);

std::vector<Complex> fft(std::span<const Complex> x);
std::vector<Complex> ifft(std::span<const Complex> x);

struct StftOptions {
  std::size_t frame_length = kFrameLength;
  std::size_t hop = kFrameShift;
};

/// Number of frames produced for a signal of `length` samples: the signal is
/// reflect-padded by frame_length/2 on each side and the final partial frame
/// zero-padded.
std::size_t stft_frame_count(std::size_t length, const StftOptions& opts = {});

ComplexSpectrogram stft(const Waveform& w, const StftOptions& opts = {});

/// Weighted overlap-add inverse, normalized by the accumulated squared window
/// and trimmed to `s.signal_length`.
Waveform istft(const ComplexSpectrogram& s);

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& s);

}  // namespace maskfuse

#endif  // MASKFUSE_DSP_HPP_
