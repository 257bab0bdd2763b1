/* Copyright 2026 The crae Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Little-endian primitives for the CRDS and CRAE containers. Bytes are
// assembled explicitly so files are identical regardless of host endianness.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "crae/errors.hpp"

namespace crae::io {

inline void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }

template <typename UInt>
void put_le(std::ostream& os, UInt v) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i)
    bytes[i] = static_cast<char>(static_cast<std::uint8_t>(v >> (8 * i)));
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline void put_u16(std::ostream& os, std::uint16_t v) { put_le(os, v); }
inline void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
inline void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
inline void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

inline void put_tag(std::ostream& os, const char (&tag)[5]) { os.write(tag, 4); }

/// Reader that names the source file in every error.
class Reader {
 public:
  Reader(std::istream& is, std::string source) : is_(is), source_(std::move(source)) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(read_le<std::uint8_t>("u8")); }
  std::uint16_t u16() { return read_le<std::uint16_t>("u16"); }
  std::uint32_t u32() { return read_le<std::uint32_t>("u32"); }
  std::uint64_t u64() { return read_le<std::uint64_t>("u64"); }
  double f64() { return std::bit_cast<double>(read_le<std::uint64_t>("f64")); }

  std::string tag() {
    char buf[4];
    if (!is_.read(buf, 4)) fail("unexpected end of file reading a section tag");
    return std::string(buf, 4);
  }

  void expect_tag(const std::string& expected) {
    const std::string got = tag();
    if (got != expected) fail("expected tag '" + expected + "' but found '" + got + "'");
  }

  bool at_eof() { return is_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw FormatError(source_ + ": " + message);
  }

 private:
  template <typename UInt>
  UInt read_le(const char* what) {
    std::array<unsigned char, sizeof(UInt)> bytes{};
    if (!is_.read(reinterpret_cast<char*>(bytes.data()), sizeof(UInt)))
      fail(std::string("unexpected end of file reading ") + what);
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(UInt(bytes[i]) << (8 * i));
    return v;
  }

  std::istream& is_;
  std::string source_;
};

}  // namespace crae::io
