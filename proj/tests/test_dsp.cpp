// tests/test_dsp.cpp

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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "maskfuse/dsp.hpp"
#include "oracles.hpp"

using namespace maskfuse;
using maskfuse::testing::direct_dft;
using maskfuse::testing::random_signal;
using maskfuse::testing::relative_rms_error;

namespace {

Waveform tone(double freq, std::size_t samples, double amp = 0.5) {
  Waveform w;
  w.samples.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) /
                                  kSampleRate);
  }
  return w;
}

}  // namespace

TEST_CASE("hamming window values") {
  const auto w = hamming_window(512);
  CHECK(w[0] == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(w[256] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hamming_window(4)[1] == doctest::Approx(0.54).epsilon(1e-15));
  for (double v : w) {
    CHECK(v > 0.08 - 1e-15);
    CHECK(v <= 1.0);
  }
  const auto ref = maskfuse::testing::oracle_hamming(512);
  for (std::size_t k = 0; k < 512; ++k) CHECK(w[k] == doctest::Approx(ref[k]));
  CHECK_THROWS_AS(hamming_window(1), InvalidArgument);
  CHECK_THROWS_AS(hamming_window(0), InvalidArgument);
}

TEST_CASE("fft edge cases") {
  std::vector<Complex> zeros(512);
  for (const auto& v : fft(zeros)) CHECK(std::abs(v) == 0.0);

  std::vector<Complex> impulse(512);
  impulse[0] = 1.0;
  for (const auto& v : fft(impulse)) {
    CHECK(v.real() == doctest::Approx(1.0));
    CHECK(std::abs(v.imag()) < 1e-15);
  }

  std::vector<Complex> x(512);
  for (std::size_t k = 0; k < 512; ++k) {
    x[k] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) * 5.0 / 512.0);
  }
  const auto spectrum = fft(x);
  const auto oracle = direct_dft(x);
  for (std::size_t j = 0; j < 512; ++j) {
    const double expected = (j == 5 || j == 507) ? 256.0 : 0.0;
    CHECK(std::abs(spectrum[j] - expected) < 1e-9);
    CHECK(std::abs(spectrum[j] - oracle[j]) < 1e-9);
  }

  std::vector<Complex> odd(500);
  CHECK_THROWS_AS(fft(odd), InvalidArgument);
  CHECK_THROWS_AS(ifft(odd), InvalidArgument);
}

TEST_CASE("fft matches direct DFT and inverts") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> x(512);
    for (auto& v : x) v = {dist(rng), dist(rng)};
    const auto fast = fft(x);
    const auto slow = direct_dft(x);
    double worst = 0.0;
    for (std::size_t j = 0; j < 512; ++j) worst = std::max(worst, std::abs(fast[j] - slow[j]));
    CHECK(worst < 1e-6);
    const auto back = ifft(fast);
    for (std::size_t j = 0; j < 512; ++j) CHECK(std::abs(back[j] - x[j]) < 1e-9);
  }
  // Other power-of-two sizes share the code path.
  std::vector<Complex> small{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
  const auto fast = fft(small);
  const auto slow = direct_dft(small);
  for (std::size_t j = 0; j < small.size(); ++j) CHECK(std::abs(fast[j] - slow[j]) < 1e-12);
}

TEST_CASE("stft shape and zero input") {
  Waveform silence{std::vector<double>(16000, 0.0), kSampleRate};
  const auto s = stft(silence);
  CHECK(s.frames() == 63);  // floor((16000 + 512 - 512) / 256) + 1
  CHECK(s.num_bins() == 257);
  CHECK(s.signal_length == 16000);
  for (const auto& v : s.bins.values()) CHECK(std::abs(v) == 0.0);
  CHECK(stft_frame_count(16000) == 63);
  CHECK(stft_frame_count(1) == 1);

  CHECK_THROWS_AS(stft(Waveform{}), InvalidArgument);
  Waveform wrong_rate{std::vector<double>(1000, 0.1), 44100};
  CHECK_THROWS_AS(stft(wrong_rate), InvalidArgument);
  Waveform nan_signal{std::vector<double>(1000, std::nan("")), kSampleRate};
  CHECK_THROWS_AS(stft(nan_signal), InvalidArgument);
}

TEST_CASE("stft of a 1 kHz tone peaks at bin 32") {
  const auto w = tone(1000.0, 16000);
  const auto mag = magnitude(stft(w));
  for (std::size_t t = 2; t + 2 < mag.rows(); ++t) {
    const auto row = mag.row(t);
    const auto peak = std::max_element(row.begin(), row.end()) - row.begin();
    CHECK(peak == 32);
  }
  // Interior frame t starts at sample t*256 - 256 of the input.
  const std::size_t t = 10;
  const auto window = maskfuse::testing::oracle_hamming(512);
  std::vector<Complex> frame(512);
  for (std::size_t k = 0; k < 512; ++k) frame[k] = w.samples[t * 256 - 256 + k] * window[k];
  const auto oracle = direct_dft(frame);
  const auto s = stft(w);
  for (std::size_t f = 0; f < 257; ++f) CHECK(std::abs(s.bins(t, f) - oracle[f]) < 1e-9);
}

TEST_CASE("stft of a constant frame is dominated by bin 0") {
  Waveform ones{std::vector<double>(2048, 1.0), kSampleRate};
  const auto mag = magnitude(stft(ones));
  const auto row = mag.row(3);
  CHECK(std::max_element(row.begin(), row.end()) - row.begin() == 0);

  std::vector<Complex> window(512);
  const auto w = hamming_window(512);
  for (std::size_t k = 0; k < 512; ++k) window[k] = w[k];
  const auto dft = direct_dft(window);
  for (std::size_t f = 1; f < 512; ++f) CHECK(std::abs(dft[f]) < std::abs(dft[0]));
}

TEST_CASE("istft inverts stft") {
  SUBCASE("zero spectrogram") {
    ComplexSpectrogram s;
    s.bins = Grid<Complex>(20, 257);
    s.signal_length = 4000;
    const auto w = istft(s);
    CHECK(w.size() == 4000);
    for (double v : w.samples) CHECK(v == 0.0);
  }
  SUBCASE("white noise burst") {
    std::mt19937_64 rng(5);
    Waveform w{random_signal(rng, 16000), kSampleRate};
    const auto back = istft(stft(w));
    REQUIRE(back.size() == w.size());
    CHECK(relative_rms_error(back.samples, w.samples, 512, 16000 - 512) < 1e-6);
    CHECK(relative_rms_error(back.samples, w.samples, 0, 16000) < 1e-6);
  }
  SUBCASE("tone") {
    const auto w = tone(1000.0, 16000);
    const auto back = istft(stft(w));
    CHECK(relative_rms_error(back.samples, w.samples, 512, 16000 - 512) < 1e-6);
  }
}

TEST_CASE("property: round trip on random lengths") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> len(2048, 9000);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = len(rng);
    Waveform w{random_signal(rng, n, 0.9), kSampleRate};
    const auto back = istft(stft(w));
    REQUIRE(back.size() == n);
    CHECK(relative_rms_error(back.samples, w.samples, 512, n - 512) < 1e-6);
  }
}

TEST_CASE("property: stft is linear") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Waveform x{random_signal(rng, 3000), kSampleRate};
    Waveform y{random_signal(rng, 3000), kSampleRate};
    const double a = 0.7;
    const double b = -1.3;
    Waveform z = x;
    for (std::size_t i = 0; i < z.size(); ++i) z.samples[i] = a * x.samples[i] + b * y.samples[i];
    const auto sx = stft(x);
    const auto sy = stft(y);
    const auto sz = stft(z);
    for (std::size_t i = 0; i < sz.bins.size(); ++i) {
      CHECK(std::abs(sz.bins.values()[i] - (a * sx.bins.values()[i] + b * sy.bins.values()[i])) <
            1e-9);
    }
  }
}

TEST_CASE("property: frame-level Parseval") {
  std::mt19937_64 rng(19);
  Waveform w{random_signal(rng, 8000), kSampleRate};
  const auto s = stft(w);
  const auto window = maskfuse::testing::oracle_hamming(512);
  for (std::size_t t = 2; t + 2 < s.frames(); t += 3) {
    double time_energy = 0.0;
    for (std::size_t k = 0; k < 512; ++k) {
      const double v = w.samples[t * 256 - 256 + k] * window[k];
      time_energy += v * v;
    }
    // Rebuild the full 512-bin energy from the one-sided half.
    double freq_energy = std::norm(s.bins(t, 0)) + std::norm(s.bins(t, 256));
    for (std::size_t f = 1; f < 256; ++f) freq_energy += 2.0 * std::norm(s.bins(t, f));
    CHECK(std::abs(time_energy - freq_energy / 512.0) / time_energy < 1e-6);
  }
}

TEST_CASE("magnitude") {
  ComplexSpectrogram s;
  s.bins = Grid<Complex>(1, 3);
  s.bins(0, 0) = {3.0, 4.0};
  s.bins(0, 1) = {0.0, 0.0};
  s.bins(0, 2) = {1.0, 1.0};
  const auto m = magnitude(s);
  CHECK(m(0, 0) == doctest::Approx(5.0));
  CHECK(m(0, 1) == 0.0);
  CHECK(m(0, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("short signals still reconstruct") {
  std::mt19937_64 rng(23);
  for (std::size_t n : {1u, 2u, 100u, 255u, 256u, 257u, 511u, 512u, 513u}) {
    Waveform w{random_signal(rng, n), kSampleRate};
    const auto back = istft(stft(w));
    REQUIRE(back.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(back.samples[i] == doctest::Approx(w.samples[i]));
  }
}
