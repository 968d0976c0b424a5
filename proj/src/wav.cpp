// src/wav.cpp

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

#include "maskfuse/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "maskfuse/binary_io.hpp"

namespace maskfuse {

namespace {

constexpr std::uint16_t kPcmFormat = 1;
constexpr std::uint16_t kChannels = 1;
constexpr std::uint16_t kBitsPerSample = 16;

std::int16_t quantize(double v) {
  const double scaled = std::nearbyint(v * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace

Waveform read_wav(std::istream& is) {
  ByteReader in(is, "wav");
  if (in.tag(4) != "RIFF") in.fail("missing RIFF header");
  in.u32();  // riff size; not trusted
  if (in.tag(4) != "WAVE") in.fail("not a WAVE file");

  bool have_fmt = false;
  for (;;) {
    const std::uint64_t chunk_start = in.offset();
    const std::string id = in.tag(4);
    const std::uint32_t size = in.u32();
    if (id == "fmt ") {
      if (size < 16) in.fail("fmt chunk too short");
      const std::uint16_t format = in.u16();
      const std::uint16_t channels = in.u16();
      const std::uint32_t rate = in.u32();
      in.u32();  // byte rate
      in.u16();  // block align
      const std::uint16_t bits = in.u16();
      if (format != kPcmFormat) {
        in.fail("unsupported audio format " + std::to_string(format) +
                " (need 1 = PCM), fmt chunk at byte " + std::to_string(chunk_start));
      }
      if (channels != kChannels) {
        in.fail("expected 1 channel (mono), got " + std::to_string(channels) +
                " channels");
      }
      if (rate != static_cast<std::uint32_t>(kSampleRate)) {
        in.fail("expected sample rate " + std::to_string(kSampleRate) +
                " Hz, got " + std::to_string(rate) + " Hz");
      }
      if (bits != kBitsPerSample) {
        in.fail("expected 16 bits per sample, got " + std::to_string(bits));
      }
      in.skip(size - 16 + (size & 1));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) in.fail("data chunk before fmt chunk");
      if (size % 2 != 0) in.fail("data chunk size is not a whole number of samples");
      Waveform w;
      w.sample_rate = kSampleRate;
      w.samples.resize(size / 2);
      for (auto& v : w.samples) {
        v = static_cast<std::int16_t>(in.u16()) / 32768.0;
      }
      return w;
    } else {
      in.skip(size + (size & 1));
    }
  }
}

Waveform read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return read_wav(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_wav(std::ostream& os, const Waveform& w) {
  if (w.sample_rate != kSampleRate) {
    throw InvalidArgument("write_wav: sample rate must be " +
                          std::to_string(kSampleRate));
  }
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  os.write("RIFF", 4);
  put_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put_u32(os, 16);
  put_u16(os, kPcmFormat);
  put_u16(os, kChannels);
  put_u32(os, static_cast<std::uint32_t>(kSampleRate));
  put_u32(os, static_cast<std::uint32_t>(kSampleRate) * 2);
  put_u16(os, 2);
  put_u16(os, kBitsPerSample);
  os.write("data", 4);
  put_u32(os, data_bytes);
  for (double v : w.samples) put_u16(os, static_cast<std::uint16_t>(quantize(v)));
}

void write_wav_file(const std::string& path, const Waveform& w) {
  std::ostringstream os(std::ios::binary);
  write_wav(os, w);
  atomic_write_file(path, os.str());
}

}  // namespace maskfuse
