// include/maskfuse/binary_io.hpp

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

#ifndef MASKFUSE_BINARY_IO_HPP_
#define MASKFUSE_BINARY_IO_HPP_

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "maskfuse/common.hpp"

namespace maskfuse {

// Little-endian primitives shared by the mask, checkpoint and WAV formats.

inline void put_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void put_u16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u32(os, bits);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(os, bits);
}

/// Sequential reader that reports the byte offset of any short read.
class ByteReader {
 public:
  ByteReader(std::istream& is, std::string_view what) : is_(is), what_(what) {}

  std::uint64_t offset() const { return offset_; }

  void read(char* dst, std::size_t n) {
    is_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) {
      fail("unexpected end of data");
    }
    offset_ += n;
  }

  void skip(std::size_t n) {
    is_.ignore(static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) {
      fail("unexpected end of data");
    }
    offset_ += n;
  }

  std::uint8_t u8() {
    char b;
    read(&b, 1);
    return static_cast<std::uint8_t>(b);
  }

  std::uint16_t u16() {
    unsigned char b[2];
    read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32() {
    unsigned char b[4];
    read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint64_t u64() {
    unsigned char b[8];
    read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::string tag(std::size_t n) {
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  [[noreturn]] void fail(std::string_view msg) const {
    throw FormatError(std::string(what_) + ": " + std::string(msg) +
                      " at byte offset " + std::to_string(offset_));
  }

 private:
  std::istream& is_;
  std::string what_;
  std::uint64_t offset_ = 0;
};

/// Writes `bytes` to `path` through a temporary file and a rename.
void atomic_write_file(const std::string& path, std::string_view bytes);

std::string read_file_bytes(const std::string& path);

}  // namespace maskfuse

#endif  // MASKFUSE_BINARY_IO_HPP_
