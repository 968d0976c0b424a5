// tests/test_masks.cpp

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
#include <random>
#include <sstream>

#include "doctest.h"
#include "maskfuse/masks.hpp"
#include "oracles.hpp"

using namespace maskfuse;

namespace {

Grid<double> grid_of(std::size_t rows, std::size_t cols, std::initializer_list<double> v) {
  Grid<double> g(rows, cols);
  std::copy(v.begin(), v.end(), g.values().begin());
  return g;
}

Grid<double> random_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                         double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Grid<double> g(rows, cols);
  for (auto& v : g.values()) v = dist(rng);
  return g;
}

}  // namespace

TEST_CASE("compute_irm examples") {
  CHECK(compute_irm(grid_of(1, 1, {1.0}), grid_of(1, 1, {0.0})).values(0, 0) == 1.0);
  CHECK(compute_irm(grid_of(1, 1, {2.0}), grid_of(1, 1, {2.0})).values(0, 0) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(compute_irm(grid_of(1, 1, {std::sqrt(3.0)}), grid_of(1, 1, {1.0})).values(0, 0) ==
        doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
  // Silent bin.
  CHECK(compute_irm(grid_of(1, 1, {0.0}), grid_of(1, 1, {0.0})).values(0, 0) == 0.0);
  // beta = 1 gives the plain energy ratio.
  CHECK(compute_irm(grid_of(1, 1, {1.0}), grid_of(1, 1, {1.0}), 1.0).values(0, 0) ==
        doctest::Approx(0.5));
  CHECK(compute_irm(grid_of(1, 1, {1.0}), grid_of(1, 1, {1.0})).kind == MaskKind::kSoft);
}

TEST_CASE("compute_irm errors") {
  CHECK_THROWS_AS(compute_irm(Grid<double>(2, 3), Grid<double>(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(compute_irm(Grid<double>(1, 1), Grid<double>(1, 1), 0.0), InvalidArgument);
  CHECK_THROWS_AS(compute_irm(Grid<double>(1, 1), Grid<double>(1, 1), -1.0), InvalidArgument);
  CHECK_THROWS_AS(compute_irm(grid_of(1, 1, {-1.0}), Grid<double>(1, 1)), InvalidArgument);
}

TEST_CASE("property: IRM range and monotonicity") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_grid(rng, 6, 9, 0.0, 3.0);
    const auto n = random_grid(rng, 6, 9, 0.0, 3.0);
    for (double beta : {0.25, 0.5, 1.0, 2.0}) {
      const auto m = compute_irm(x, n, beta);
      for (double v : m.values.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      auto louder = x;
      for (auto& v : louder.values()) v *= 1.5;
      const auto m2 = compute_irm(louder, n, beta);
      for (std::size_t i = 0; i < m.values.size(); ++i) {
        CHECK(m2.values.values()[i] >= m.values.values()[i]);
      }
    }
  }
}

TEST_CASE("compute_tbm examples") {
  // Constant spectrogram: nothing strictly above the mean.
  const auto constant = compute_tbm(Grid<double>(4, 3, 2.5));
  CHECK(constant.kind == MaskKind::kBinary);
  for (double v : constant.values.values()) CHECK(v == 0.0);

  // Column (0, 0, 4): threshold 4/3.
  const auto col = compute_tbm(grid_of(3, 1, {0.0, 0.0, 4.0}));
  CHECK(col.values(0, 0) == 0.0);
  CHECK(col.values(1, 0) == 0.0);
  CHECK(col.values(2, 0) == 1.0);

  // Summing three copies of this value rounds the mean just below it.
  const double v = 0.779471461336765;
  CHECK((v + v + v) / 3.0 < v);
  const auto rounded = compute_tbm(Grid<double>(3, 2, v));
  for (double m : rounded.values.values()) CHECK(m == 0.0);

  const auto silent = compute_tbm(Grid<double>(5, 4));
  for (double v : silent.values.values()) CHECK(v == 0.0);
  CHECK_THROWS_AS(compute_tbm(Grid<double>(0, 4)), InvalidArgument);
}

TEST_CASE("property: TBM threshold exactness") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_grid(rng, 12, 7, 0.0, 1.0);
    const auto m = compute_tbm(x);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      double mean = 0.0;
      std::size_t argmax = 0;
      for (std::size_t t = 0; t < x.rows(); ++t) {
        mean += x(t, f);
        if (x(t, f) > x(argmax, f)) argmax = t;
      }
      mean /= static_cast<double>(x.rows());
      for (std::size_t t = 0; t < x.rows(); ++t) {
        CHECK(m.values(t, f) == (x(t, f) > mean ? 1.0 : 0.0));
      }
      CHECK(m.values(argmax, f) == 1.0);
    }
  }
}

TEST_CASE("fusion examples") {
  const Mask irm{grid_of(1, 1, {0.8}), MaskKind::kSoft};
  const Mask tbm{grid_of(1, 1, {0.3}), MaskKind::kSoft};
  CHECK(fuse_masks(irm, tbm, FusionParams::make(0.5, 0.5)).values(0, 0) ==
        doctest::Approx(0.4));
  CHECK(fuse_masks(irm, tbm, FusionParams::make(0.2, 0.5)).values(0, 0) == 0.8);
  // Ties go to the attenuated branch.
  const Mask tie{grid_of(1, 1, {0.5}), MaskKind::kSoft};
  CHECK(fuse_masks(irm, tie, FusionParams::make(0.5, 0.5)).values(0, 0) ==
        doctest::Approx(0.4));
}

TEST_CASE("fusion parameter validation") {
  CHECK_THROWS_AS(FusionParams::make(0.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(FusionParams::make(1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(FusionParams::make(0.5, -0.1), InvalidArgument);
  CHECK_THROWS_AS(FusionParams::make(0.5, 1.1), InvalidArgument);
  CHECK_NOTHROW(FusionParams::make(0.5, 0.0));
  CHECK_NOTHROW(FusionParams::make(0.5, 1.0));
  CHECK_NOTHROW(FusionParams::sweep_point(0.0, 0.5));
  CHECK_NOTHROW(FusionParams::sweep_point(1.0, 0.5));
  CHECK_THROWS_AS(FusionParams::sweep_point(1.5, 0.5), InvalidArgument);

  const Mask a{Grid<double>(2, 2, 0.5), MaskKind::kSoft};
  const Mask b{Grid<double>(2, 3, 0.5), MaskKind::kSoft};
  CHECK_THROWS_AS(fuse_masks(a, b, FusionParams::make(0.5, 0.5)), InvalidArgument);
  const Mask out_of_range{Grid<double>(2, 2, 1.5), MaskKind::kSoft};
  CHECK_THROWS_AS(fuse_masks(a, out_of_range, FusionParams::make(0.5, 0.5)), InvalidArgument);
}

TEST_CASE("property: fusion identities, dominance and monotonicity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Mask irm{random_grid(rng, 5, 8, 0.0, 1.0), MaskKind::kSoft};
    const Mask tbm{random_grid(rng, 5, 8, 1e-6, 1.0 - 1e-6), MaskKind::kSoft};
    const double delta = 0.01 + 0.98 * unit(rng);

    CHECK(fuse_masks(irm, tbm, FusionParams::make(delta, 1.0)).values == irm.values);
    CHECK(fuse_masks(irm, tbm, FusionParams::make(1e-9, unit(rng))).values == irm.values);
    const auto product = fuse_masks(irm, tbm, FusionParams::make(delta, 0.0));
    const auto bin = binarize(tbm, delta);
    for (std::size_t i = 0; i < irm.values.size(); ++i) {
      CHECK(product.values.values()[i] == irm.values.values()[i] * bin.values.values()[i]);
    }

    Mask prev;
    for (double gamma : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const auto fused = fuse_masks(irm, tbm, FusionParams::make(delta, gamma));
      for (std::size_t i = 0; i < irm.values.size(); ++i) {
        const double v = fused.values.values()[i];
        CHECK(v <= irm.values.values()[i]);
        const bool kept = tbm.values.values()[i] > delta;
        if (kept) CHECK(v == irm.values.values()[i]);
        if (!prev.values.empty()) CHECK(v >= prev.values.values()[i]);
      }
      prev = fused;
    }

    // Moving delta only changes bins whose tbm lies between the two values.
    const double delta2 = 0.01 + 0.98 * unit(rng);
    const auto f1 = fuse_masks(irm, tbm, FusionParams::make(delta, 0.3));
    const auto f2 = fuse_masks(irm, tbm, FusionParams::make(delta2, 0.3));
    const double lo = std::min(delta, delta2);
    const double hi = std::max(delta, delta2);
    for (std::size_t i = 0; i < irm.values.size(); ++i) {
      const double t = tbm.values.values()[i];
      if (f1.values.values()[i] != f2.values.values()[i]) {
        CHECK(t > lo);
        CHECK(t <= hi);
      }
    }
  }
}

TEST_CASE("oracle binary TBM fuses identically for any delta in (0,1)") {
  std::mt19937_64 rng(4);
  const Mask irm{random_grid(rng, 4, 6, 0.0, 1.0), MaskKind::kSoft};
  const Mask tbm = compute_tbm(random_grid(rng, 4, 6, 0.0, 1.0));
  const auto ref = fuse_masks(irm, tbm, FusionParams::make(0.5, 0.3));
  for (double delta : {1e-6, 0.1, 0.9, 0.999999}) {
    CHECK(fuse_masks(irm, tbm, FusionParams::make(delta, 0.3)).values == ref.values);
  }
}

TEST_CASE("apply_mask") {
  ComplexSpectrogram s;
  s.bins = Grid<Complex>(2, 3, Complex(2.0, 2.0));
  const auto same = apply_mask(Mask{Grid<double>(2, 3, 1.0), MaskKind::kBinary}, s);
  CHECK(same.bins == s.bins);
  const auto zero = apply_mask(Mask{Grid<double>(2, 3, 0.0), MaskKind::kBinary}, s);
  for (const auto& v : zero.bins.values()) CHECK(v == Complex(0.0, 0.0));
  const auto half = apply_mask(Mask{Grid<double>(2, 3, 0.5), MaskKind::kSoft}, s);
  CHECK(half.bins(1, 2) == Complex(1.0, 1.0));
  CHECK_THROWS_AS(apply_mask(Mask{Grid<double>(3, 3, 1.0), MaskKind::kSoft}, s),
                  InvalidArgument);
}

TEST_CASE("enhance with trivial masks") {
  std::mt19937_64 rng(6);
  Waveform noisy{maskfuse::testing::random_signal(rng, 6000), kSampleRate};
  const auto spec = stft(noisy);
  const auto ones = enhance(noisy, Mask{Grid<double>(spec.frames(), 257, 1.0), MaskKind::kBinary});
  CHECK(ones.size() == noisy.size());
  CHECK(maskfuse::testing::relative_rms_error(ones.samples, noisy.samples, 0, noisy.size()) <
        1e-6);
  const auto zeros = enhance(noisy, Mask{Grid<double>(spec.frames(), 257, 0.0), MaskKind::kBinary});
  for (double v : zeros.samples) CHECK(v == 0.0);
  CHECK_THROWS_AS(enhance(noisy, Mask{Grid<double>(spec.frames() + 1, 257), MaskKind::kSoft}),
                  InvalidArgument);
}

TEST_CASE("mask dump format") {
  Mask m{grid_of(2, 3, {0.0, 0.25, 0.5, 0.75, 1.0, 0.125}), MaskKind::kSoft};
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_mask(ss, m);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() == 4 + 4 + 4 + 4 + 1 + 6 * 4);
  CHECK(bytes.substr(0, 4) == "MFMK");
  CHECK(bytes[4] == 1);  // version, little-endian
  CHECK(bytes[8] == 2);  // frames
  CHECK(bytes[12] == 3);  // bins
  CHECK(bytes[16] == 0);  // soft
  // 0.25f = 0x3e800000, little-endian, second value.
  CHECK(static_cast<unsigned char>(bytes[17 + 4 + 3]) == 0x3e);
  CHECK(static_cast<unsigned char>(bytes[17 + 4 + 2]) == 0x80);

  const Mask back = read_mask(ss);
  CHECK(back == m);

  std::stringstream bad("MFMX\x01\x00\x00\x00");
  CHECK_THROWS_AS(read_mask(bad), FormatError);
  std::stringstream truncated(bytes.substr(0, 20));
  CHECK_THROWS_WITH_AS(read_mask(truncated), doctest::Contains("byte offset"), FormatError);

  std::ostringstream csv;
  write_mask_csv(csv, m);
  CHECK(csv.str() == "0.000000,0.250000,0.500000\n0.750000,1.000000,0.125000\n");
}
