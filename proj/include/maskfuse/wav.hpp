// include/maskfuse/wav.hpp

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

#ifndef MASKFUSE_WAV_HPP_
#define MASKFUSE_WAV_HPP_

#include <iosfwd>
#include <string>

#include "maskfuse/dsp.hpp"

namespace maskfuse {

// Only RIFF/WAVE, PCM 16-bit, mono, 16 kHz is accepted. Anything else is
// rejected with a FormatError naming the offending field; nothing is
// resampled or downmixed.

/// Samples are scaled by 1/32768 into [-1, 1).
Waveform read_wav(std::istream& is);
Waveform read_wav_file(const std::string& path);

/// Rounds to nearest and clips to the int16 range.
void write_wav(std::ostream& os, const Waveform& w);
void write_wav_file(const std::string& path, const Waveform& w);

}  // namespace maskfuse

#endif  // MASKFUSE_WAV_HPP_
