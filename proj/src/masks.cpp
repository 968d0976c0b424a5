// src/masks.cpp

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

#include "maskfuse/masks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "maskfuse/binary_io.hpp"

namespace maskfuse {

namespace {

void require_nonnegative(const MagnitudeSpectrogram& s, const char* what) {
  for (double v : s.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(what) +
                            ": magnitudes must be finite and nonnegative");
    }
  }
}

}  // namespace

void validate_mask(const Mask& m, const char* what) {
  for (double v : m.values.values()) {
    if (m.kind == MaskKind::kBinary) {
      if (v != 0.0 && v != 1.0) {
        throw InvalidArgument(std::string(what) + ": binary mask holds " +
                              std::to_string(v));
      }
    } else if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument(std::string(what) + ": soft mask value " +
                            std::to_string(v) + " outside [0, 1]");
    }
  }
}

FusionParams FusionParams::make(double delta, double gamma) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("fusion: delta must lie in (0, 1), got " +
                          std::to_string(delta));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("fusion: gamma must lie in [0, 1], got " +
                          std::to_string(gamma));
  }
  return {delta, gamma};
}

FusionParams FusionParams::sweep_point(double delta, double gamma) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgument("fusion: sweep delta must lie in [0, 1], got " +
                          std::to_string(delta));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("fusion: gamma must lie in [0, 1], got " +
                          std::to_string(gamma));
  }
  return {delta, gamma};
}

Mask compute_irm(const MagnitudeSpectrogram& clean,
                 const MagnitudeSpectrogram& noise, double beta) {
  require_same_shape(clean, noise, "compute_irm");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("compute_irm: beta must be positive");
  }
  require_nonnegative(clean, "compute_irm");
  require_nonnegative(noise, "compute_irm");

  Mask out{Grid<double>(clean.rows(), clean.cols()), MaskKind::kSoft};
  const auto& x = clean.values();
  const auto& n = noise.values();
  auto& dst = out.values.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double speech = x[i] * x[i];
    const double total = speech + n[i] * n[i];
    dst[i] = total < kIrmEnergyFloor ? 0.0 : std::pow(speech / total, beta);
  }
  return out;
}

Mask compute_tbm(const MagnitudeSpectrogram& clean) {
  if (clean.rows() == 0) throw InvalidArgument("compute_tbm: no frames");
  require_nonnegative(clean, "compute_tbm");

  const std::size_t frames = clean.rows();
  const std::size_t bins = clean.cols();
  std::vector<double> threshold(bins, 0.0);
  std::vector<double> lo(clean.row(0).begin(), clean.row(0).end());
  std::vector<double> hi = lo;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < bins; ++f) {
      threshold[f] += clean(t, f);
      lo[f] = std::min(lo[f], clean(t, f));
      hi[f] = std::max(hi[f], clean(t, f));
    }
  }
  // Rounding can push the summed mean outside the column range.
  for (std::size_t f = 0; f < bins; ++f) {
    threshold[f] = std::clamp(threshold[f] / static_cast<double>(frames), lo[f], hi[f]);
  }

  Mask out{Grid<double>(frames, bins), MaskKind::kBinary};
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < bins; ++f) {
      out.values(t, f) = clean(t, f) > threshold[f] ? 1.0 : 0.0;
    }
  }
  return out;
}

Mask fuse_masks(const Mask& irm_est, const Mask& tbm_est,
                const FusionParams& p) {
  require_same_shape(irm_est.values, tbm_est.values, "fuse_masks");
  validate_mask(tbm_est, "fuse_masks");

  Mask out{Grid<double>(irm_est.frames(), irm_est.num_bins()), MaskKind::kSoft};
  const auto& irm = irm_est.values.values();
  const auto& tbm = tbm_est.values.values();
  auto& dst = out.values.values();
  for (std::size_t i = 0; i < irm.size(); ++i) {
    dst[i] = tbm[i] > p.delta() ? irm[i] : p.gamma() * irm[i];
  }
  return out;
}

Mask binarize(const Mask& tbm_est, double delta) {
  Mask out{Grid<double>(tbm_est.frames(), tbm_est.num_bins()),
           MaskKind::kBinary};
  const auto& src = tbm_est.values.values();
  auto& dst = out.values.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] > delta ? 1.0 : 0.0;
  }
  return out;
}

ComplexSpectrogram apply_mask(const Mask& mask, const ComplexSpectrogram& noisy) {
  require_same_shape(mask.values, noisy.bins, "apply_mask");
  ComplexSpectrogram out = noisy;
  const auto& gain = mask.values.values();
  auto& dst = out.bins.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= gain[i];
  return out;
}

Waveform enhance(const ComplexSpectrogram& noisy_spec, const Mask& mask) {
  return istft(apply_mask(mask, noisy_spec));
}

Waveform enhance(const Waveform& noisy, const Mask& mask) {
  return enhance(stft(noisy), mask);
}

void write_mask(std::ostream& os, const Mask& m) {
  os.write("MFMK", 4);
  put_u32(os, kMaskDumpVersion);
  put_u32(os, static_cast<std::uint32_t>(m.frames()));
  put_u32(os, static_cast<std::uint32_t>(m.num_bins()));
  put_u8(os, static_cast<std::uint8_t>(m.kind));
  for (double v : m.values.values()) put_f32(os, static_cast<float>(v));
}

Mask read_mask(std::istream& is) {
  ByteReader in(is, "mask dump");
  if (in.tag(4) != "MFMK") in.fail("bad magic, expected MFMK");
  const std::uint32_t version = in.u32();
  if (version != kMaskDumpVersion) {
    in.fail("unsupported version " + std::to_string(version));
  }
  const std::uint32_t frames = in.u32();
  const std::uint32_t bins = in.u32();
  const std::uint8_t kind = in.u8();
  if (kind > 1) in.fail("unknown mask kind " + std::to_string(kind));
  Mask m{Grid<double>(frames, bins), static_cast<MaskKind>(kind)};
  for (auto& v : m.values.values()) v = in.f32();
  return m;
}

void write_mask_file(const std::string& path, const Mask& m) {
  std::ostringstream os(std::ios::binary);
  write_mask(os, m);
  atomic_write_file(path, os.str());
}

Mask read_mask_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_mask(in);
}

void write_mask_csv(std::ostream& os, const Mask& m) {
  os << std::fixed << std::setprecision(6);
  for (std::size_t t = 0; t < m.frames(); ++t) {
    const auto row = m.values.row(t);
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (f) os << ',';
      os << row[f];
    }
    os << '\n';
  }
}

}  // namespace maskfuse
