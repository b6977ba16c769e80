#include "sketchlab/digest.hpp"

#include <stdexcept>

#include <openssl/sha.h>

namespace sketchlab {

std::array<std::uint8_t, 32> iterated_sha256(std::span<const std::uint8_t> data,
                                             std::uint64_t cost) {
  if (cost == 0) throw std::invalid_argument("iterated_sha256: cost must be >= 1");
  std::array<std::uint8_t, 32> digest{};
  SHA256(data.data(), data.size(), digest.data());
  for (std::uint64_t i = 1; i < cost; ++i) {
    SHA256(digest.data(), digest.size(), digest.data());
  }
  return digest;
}

std::string hex_encode(std::span<const std::uint8_t> bytes) {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

std::vector<std::uint8_t> hex_decode(const std::string& hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex_decode: odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("hex_decode: invalid character");
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace sketchlab
