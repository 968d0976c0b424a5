// src/dsp.cpp

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

#include "maskfuse/dsp.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace maskfuse {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i = std::abs(i) % period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

void validate_options(const StftOptions& opts) {
  if (!is_power_of_two(opts.frame_length) || opts.frame_length < 2) {
    throw InvalidArgument("stft: frame length must be a power of two >= 2, got " +
                          std::to_string(opts.frame_length));
  }
  if (opts.hop == 0 || opts.hop > opts.frame_length) {
    throw InvalidArgument("stft: hop must be in [1, frame_length], got " +
                          std::to_string(opts.hop));
  }
}

}  // namespace

void validate_waveform(const Waveform& w, const char* what) {
  if (w.samples.empty()) {
    throw InvalidArgument(std::string(what) + ": empty waveform");
  }
  if (w.sample_rate != kSampleRate) {
    throw InvalidArgument(std::string(what) + ": sample rate must be " +
                          std::to_string(kSampleRate) + " Hz, got " +
                          std::to_string(w.sample_rate));
  }
  for (double v : w.samples) {
    if (!std::isfinite(v)) {
      throw InvalidArgument(std::string(what) + ": non-finite sample");
    }
  }
}

std::vector<double> hamming_window(std::size_t n) {
  if (n < 2) {
    throw InvalidArgument("hamming_window: length must be >= 2, got " +
                          std::to_string(n));
  }
  std::vector<double> w(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(step * static_cast<double>(k));
  }
  return w;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw InvalidArgument("fft: length must be a power of two, got " +
                          std::to_string(n));
  }
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle =
        -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  bit_reverse_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    }
    bit_reverse_[i] = r;
  }
}

void FftPlan::forward(std::span<Complex> data) const { transform(data, false); }

void FftPlan::inverse(std::span<Complex> data) const {
  transform(data, true);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

void FftPlan::transform(std::span<Complex> data, bool inverse) const {
  if (data.size() != n_) {
    throw InvalidArgument("fft: plan is for length " + std::to_string(n_) +
                          ", got " + std::to_string(data.size()));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n_ / len;
    for (std::size_t start = 0; start < n_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        Complex w = twiddles_[k * stride];
        if (inverse) w = std::conj(w);
        const Complex a = data[start + k];
        const Complex b = data[start + k + half] * w;
        data[start + k] = a + b;
        data[start + k + half] = a - b;
      }
    }
  }
}

const FftPlan& fft_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = plans[n];
  if (!slot) {
    try {
      slot = std::make_unique<FftPlan>(n);
    } catch (...) {
      plans.erase(n);
      throw;
    }
  }
  return *slot;
}

std::vector<Complex> fft(std::span<const Complex> x) {
  std::vector<Complex> out(x.begin(), x.end());
  fft_plan(out.size()).forward(out);
  return out;
}

std::vector<Complex> ifft(std::span<const Complex> x) {
  std::vector<Complex> out(x.begin(), x.end());
  fft_plan(out.size()).inverse(out);
  return out;
}

std::size_t stft_frame_count(std::size_t length, const StftOptions& opts) {
  validate_options(opts);
  const std::size_t pad = opts.frame_length / 2;
  const std::size_t padded = length + 2 * pad;
  std::size_t frames = 1;
  if (padded > opts.frame_length) {
    frames += (padded - opts.frame_length) / opts.hop;
  }
  // Every input sample must fall inside some frame.
  if ((frames - 1) * opts.hop + opts.frame_length < pad + length) ++frames;
  return frames;
}

ComplexSpectrogram stft(const Waveform& w, const StftOptions& opts) {
  validate_waveform(w, "stft");
  const std::size_t n = opts.frame_length;
  const std::size_t frames = stft_frame_count(w.size(), opts);
  const std::size_t pad = n / 2;
  const std::size_t total = (frames - 1) * opts.hop + n;
  const std::size_t length = w.size();

  // Reflect-padded signal with a zero tail for the final partial frame.
  std::vector<double> padded(total, 0.0);
  for (std::size_t i = 0; i < total && i < length + 2 * pad; ++i) {
    const auto src = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad);
    padded[i] = w.samples[reflect_index(src, length)];
  }

  const auto window = hamming_window(n);
  const FftPlan& plan = fft_plan(n);
  ComplexSpectrogram out;
  out.bins = Grid<Complex>(frames, n / 2 + 1);
  out.frame_length = n;
  out.hop = opts.hop;
  out.signal_length = length;
  out.sample_rate = w.sample_rate;

  std::vector<Complex> buf(n);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * opts.hop;
    for (std::size_t k = 0; k < n; ++k) {
      buf[k] = Complex(padded[offset + k] * window[k], 0.0);
    }
    plan.forward(buf);
    auto row = out.bins.row(t);
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(row.size()),
              row.begin());
  }
  return out;
}

Waveform istft(const ComplexSpectrogram& s) {
  const std::size_t n = s.frame_length;
  validate_options({n, s.hop});
  if (s.num_bins() != n / 2 + 1) {
    throw InvalidArgument("istft: expected " + std::to_string(n / 2 + 1) +
                          " bins, got " + std::to_string(s.num_bins()));
  }
  if (s.frames() == 0) throw InvalidArgument("istft: no frames");

  const std::size_t pad = n / 2;
  const std::size_t total = (s.frames() - 1) * s.hop + n;
  if (s.signal_length + pad > total) {
    throw InvalidArgument("istft: signal length exceeds frame coverage");
  }
  const auto window = hamming_window(n);
  const FftPlan& plan = fft_plan(n);

  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);
  std::vector<Complex> buf(n);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    auto row = s.bins.row(t);
    for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = row[k];
    for (std::size_t k = 1; k < n / 2; ++k) buf[n - k] = std::conj(row[k]);
    plan.inverse(buf);
    const std::size_t offset = t * s.hop;
    for (std::size_t k = 0; k < n; ++k) {
      acc[offset + k] += buf[k].real() * window[k];
      norm[offset + k] += window[k] * window[k];
    }
  }

  Waveform out;
  out.sample_rate = s.sample_rate;
  out.samples.resize(s.signal_length);
  for (std::size_t i = 0; i < s.signal_length; ++i) {
    const double denom = norm[i + pad];
    if (denom < 1e-10) {
      throw InternalError("istft: zero window energy at sample " +
                          std::to_string(i));
    }
    out.samples[i] = acc[i + pad] / denom;
  }
  return out;
}

MagnitudeSpectrogram magnitude(const ComplexSpectrogram& s) {
  MagnitudeSpectrogram out(s.frames(), s.num_bins());
  const auto& in = s.bins.values();
  auto& dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = std::abs(in[i]);
  return out;
}

}  // namespace maskfuse
