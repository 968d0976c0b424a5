// tests/test_wav.cpp

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

#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "maskfuse/wav.hpp"
#include "oracles.hpp"

using namespace maskfuse;

namespace {

void le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Hand-assembled RIFF header plus raw int16 data.
std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                      std::uint16_t bits, const std::vector<std::int16_t>& data,
                      bool extra_chunk = false) {
  std::string body = "WAVE";
  body += "fmt ";
  le(body, 16, 4);
  le(body, format, 2);
  le(body, channels, 2);
  le(body, rate, 4);
  le(body, rate * channels * bits / 8, 4);
  le(body, channels * bits / 8, 2);
  le(body, bits, 2);
  if (extra_chunk) {
    body += "LIST";
    le(body, 3, 4);
    body += "abc";
    body.push_back('\0');
  }
  body += "data";
  le(body, data.size() * 2, 4);
  for (auto s : data) le(body, static_cast<std::uint16_t>(s), 2);
  std::string out = "RIFF";
  le(out, body.size(), 4);
  return out + body;
}

Waveform parse(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_wav(in);
}

std::string message_of(const std::string& bytes) {
  try {
    parse(bytes);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("wav decode of known samples") {
  const auto w = parse(wav_bytes(1, 1, 16000, 16, {0, 16384, -32768, 32767}, true));
  REQUIRE(w.size() == 4);
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples[0] == 0.0);
  CHECK(w.samples[1] == 0.5);
  CHECK(w.samples[2] == -1.0);
  CHECK(w.samples[3] == 32767.0 / 32768.0);
}

TEST_CASE("wav round trip within one LSB") {
  std::mt19937_64 rng(1);
  Waveform w{maskfuse::testing::random_signal(rng, 5000, 0.99), kSampleRate};
  std::ostringstream out(std::ios::binary);
  write_wav(out, w);
  CHECK(out.str().size() == 44 + 2 * 5000);
  CHECK(out.str() == wav_bytes(1, 1, 16000, 16, [&] {
          std::vector<std::int16_t> q;
          for (double v : w.samples) q.push_back(static_cast<std::int16_t>(std::nearbyint(v * 32768.0)));
          return q;
        }()));
  const auto back = parse(out.str());
  REQUIRE(back.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(std::abs(back.samples[i] - w.samples[i]) <= 1.0 / 32768.0);
  }
  // Re-encoding a decoded file is lossless.
  std::ostringstream again(std::ios::binary);
  write_wav(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("wav clipping") {
  Waveform w{{1.5, -2.0, 1.0}, kSampleRate};
  std::ostringstream out(std::ios::binary);
  write_wav(out, w);
  const auto back = parse(out.str());
  CHECK(back.samples[0] == 32767.0 / 32768.0);
  CHECK(back.samples[1] == -1.0);
  CHECK(back.samples[2] == 32767.0 / 32768.0);
  CHECK_THROWS_AS(write_wav(out, Waveform{{0.0}, 8000}), InvalidArgument);
}

TEST_CASE("wav rejects unsupported layouts") {
  const std::vector<std::int16_t> data(8, 100);
  const auto stereo = message_of(wav_bytes(1, 2, 16000, 16, data));
  CHECK(stereo.find("channel") != std::string::npos);
  CHECK(stereo.find("2") != std::string::npos);

  const auto rate = message_of(wav_bytes(1, 1, 44100, 16, data));
  CHECK(rate.find("16000") != std::string::npos);
  CHECK(rate.find("44100") != std::string::npos);

  const auto depth = message_of(wav_bytes(1, 1, 16000, 24, data));
  CHECK(depth.find("24") != std::string::npos);

  const auto format = message_of(wav_bytes(3, 1, 16000, 16, data));
  CHECK(format.find("format") != std::string::npos);

  CHECK(message_of("RIFX....").find("RIFF") != std::string::npos);
}

TEST_CASE("wav truncation reports a byte offset") {
  const auto full = wav_bytes(1, 1, 16000, 16, std::vector<std::int16_t>(100, 7));
  for (std::size_t cut : {std::size_t{2}, std::size_t{20}, std::size_t{40}, full.size() - 1}) {
    const auto msg = message_of(full.substr(0, cut));
    CHECK(msg.find("byte offset") != std::string::npos);
  }
}

TEST_CASE("wav files") {
  const auto dir = std::filesystem::temp_directory_path() / "maskfuse_wav_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "x.wav").string();
  Waveform w{{0.25, -0.25, 0.125}, kSampleRate};
  write_wav_file(path, w);
  CHECK(read_wav_file(path).samples == w.samples);
  CHECK_THROWS_AS(read_wav_file((dir / "missing.wav").string()), FormatError);
  std::filesystem::remove_all(dir);
}
