#pragma once

// Little-endian primitives shared by the PGRD, SRWT and MGDS formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "mgsr/error.hpp"

namespace mgsr::detail {

template <typename U>
void put_le(std::ostream& os, U value) {
  char bytes[sizeof(U)];
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFFu);
  }
  os.write(bytes, sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw IoError("unexpected end of file");
  }
  U value = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    value |= static_cast<U>(bytes[k]) << (8 * k);
  }
  return value;
}

inline void put_u8(std::ostream& os, std::uint8_t v) { put_le<std::uint8_t>(os, v); }
inline void put_u16(std::ostream& os, std::uint16_t v) { put_le<std::uint16_t>(os, v); }
inline void put_u32(std::ostream& os, std::uint32_t v) { put_le<std::uint32_t>(os, v); }
inline void put_f32(std::ostream& os, float v) { put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint8_t get_u8(std::istream& is) { return get_le<std::uint8_t>(is); }
inline std::uint16_t get_u16(std::istream& is) { return get_le<std::uint16_t>(is); }
inline std::uint32_t get_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
inline float get_f32(std::istream& is) { return std::bit_cast<float>(get_le<std::uint32_t>(is)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

inline void expect_magic(std::istream& is, const char (&magic)[5], const std::string& what) {
  char buf[4];
  if (!is.read(buf, 4) || std::string(buf, 4) != std::string(magic, 4)) {
    throw IoError(what + ": bad magic, expected \"" + std::string(magic, 4) + "\"");
  }
}

}  // namespace mgsr::detail
