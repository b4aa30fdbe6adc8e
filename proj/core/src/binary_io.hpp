#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "fixgraph/errors.hpp"

namespace fixgraph::detail {

inline void write_f64_le(std::ostream& os, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}

inline double read_f64_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw IoError("truncated binary payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

/// Reads the magic line and the one-line JSON header that follows it.
/// Throws VersionMismatch when the magic differs.
inline std::string read_header(std::istream& is, const std::string& magic) {
  std::string got(magic.size(), '\0');
  if (!is.read(got.data(), static_cast<std::streamsize>(magic.size())) || got != magic) {
    throw VersionMismatch("expected file magic " + magic.substr(0, magic.size() - 1));
  }
  std::string header;
  if (!std::getline(is, header)) throw IoError("missing header");
  return header;
}

}  // namespace fixgraph::detail
